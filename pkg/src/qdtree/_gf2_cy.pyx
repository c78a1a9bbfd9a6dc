# cython: language_level=3, boundscheck=False, wraparound=False
"""Bit-packed GF(2) kernels, compiled implementation.

Exact counterpart of _gf2_py: same signatures, same pivot choices, same
results.  Only the inner loops differ (plain C instead of vectorized NumPy).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

__all__ = ["cnot", "perm_gate", "eliminate", "rank_bits"]


def cnot(uint64_t[:, ::1] xp, uint64_t[:, ::1] zp, Py_ssize_t c, Py_ssize_t t):
    cdef Py_ssize_t cw = c >> 6, tw = t >> 6, i, k = xp.shape[0]
    cdef int cs = c & 63, ts = t & 63
    cdef uint64_t bit
    for i in range(k):
        bit = (xp[i, cw] >> cs) & 1
        xp[i, tw] ^= bit << ts
        bit = (zp[i, tw] >> ts) & 1
        zp[i, cw] ^= bit << cs


def perm_gate(uint64_t[:, ::1] xp, uint64_t[:, ::1] zp, Py_ssize_t q,
              int a, int b, int c, int d):
    cdef Py_ssize_t w = q >> 6, i, k = xp.shape[0]
    cdef int s = q & 63
    cdef uint64_t x, z, nx, nz, keep = ~((<uint64_t>1) << s)
    for i in range(k):
        x = (xp[i, w] >> s) & 1
        z = (zp[i, w] >> s) & 1
        nx = (x if a else 0) ^ (z if b else 0)
        nz = (x if c else 0) ^ (z if d else 0)
        xp[i, w] = (xp[i, w] & keep) | (nx << s)
        zp[i, w] = (zp[i, w] & keep) | (nz << s)


def eliminate(uint64_t[:, ::1] xp, uint64_t[:, ::1] zp,
              int64_t[::1] plane_sel, int64_t[::1] qubit_sel):
    cdef Py_ssize_t k = xp.shape[0], width = xp.shape[1]
    cdef cnp.ndarray[uint8_t, ndim=1] active_arr = np.ones(k, dtype=np.uint8)
    cdef uint8_t[::1] active = active_arr
    cdef Py_ssize_t n_cols = plane_sel.shape[0], j, i, r, w, piv
    cdef int s
    cdef int64_t q
    cdef uint64_t[:, ::1] plane
    cdef int n_pivots = 0
    for j in range(n_cols):
        plane = xp if plane_sel[j] == 0 else zp
        q = qubit_sel[j]
        w = q >> 6
        s = q & 63
        piv = -1
        for i in range(k):
            if active[i] and ((plane[i, w] >> s) & 1):
                piv = i
                break
        if piv < 0:
            continue
        for i in range(k):
            if i != piv and ((plane[i, w] >> s) & 1):
                for r in range(width):
                    xp[i, r] ^= xp[piv, r]
                    zp[i, r] ^= zp[piv, r]
        active[piv] = 0
        n_pivots += 1
    return n_pivots, active_arr


def rank_bits(mat_in, Py_ssize_t nbits):
    cdef cnp.ndarray[uint64_t, ndim=2] mat_arr = np.array(mat_in, dtype=np.uint64)
    cdef uint64_t[:, ::1] mat = mat_arr
    cdef Py_ssize_t k = mat.shape[0], width = mat.shape[1], q, i, r, w, piv
    cdef int s
    cdef cnp.ndarray[uint8_t, ndim=1] used = np.zeros(k, dtype=np.uint8)
    cdef int rank = 0
    for q in range(nbits):
        w = q >> 6
        s = q & 63
        piv = -1
        for i in range(k):
            if not used[i] and ((mat[i, w] >> s) & 1):
                piv = i
                break
        if piv < 0:
            continue
        for i in range(k):
            if i != piv and ((mat[i, w] >> s) & 1):
                for r in range(width):
                    mat[i, r] ^= mat[piv, r]
        used[piv] = 1
        rank += 1
    return rank
