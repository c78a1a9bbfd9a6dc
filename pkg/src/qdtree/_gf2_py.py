"""Bit-packed GF(2) kernels, NumPy implementation.

Tableaux are stored as two uint64 planes of shape (k, W), one for the X part
and one for the Z part; qubit q lives in word q >> 6, bit q & 63 (LSB first).
This module is the always-available fallback; _gf2_cy provides the same
functions compiled.  Both must stay exactly equivalent - the test suite runs
the same cases against each.
"""

import numpy as np

__all__ = ["cnot", "perm_gate", "eliminate", "rank_bits"]


def cnot(xp, zp, c, t):
    """Controlled-NOT with control c and target t, acting on all rows:
    X propagates control -> target, Z propagates target -> control."""
    cw, cs = c >> 6, np.uint64(c & 63)
    tw, ts = t >> 6, np.uint64(t & 63)
    one = np.uint64(1)
    xbit = (xp[:, cw] >> cs) & one
    xp[:, tw] ^= xbit << ts
    zbit = (zp[:, tw] >> ts) & one
    zp[:, cw] ^= zbit << cs


def perm_gate(xp, zp, q, a, b, c, d):
    """One-qubit gate on qubit q as a GF(2) map of the symplectic bits:
    x' = a x + b z, z' = c x + d z  (a, b, c, d in {0, 1})."""
    w, s = q >> 6, np.uint64(q & 63)
    one = np.uint64(1)
    x = (xp[:, w] >> s) & one
    z = (zp[:, w] >> s) & one
    nx = (x if a else np.uint64(0)) ^ (z if b else np.uint64(0))
    nz = (x if c else np.uint64(0)) ^ (z if d else np.uint64(0))
    keep = ~(one << s)
    xp[:, w] = (xp[:, w] & keep) | (np.asarray(nx, dtype=np.uint64) << s)
    zp[:, w] = (zp[:, w] & keep) | (np.asarray(nz, dtype=np.uint64) << s)


def eliminate(xp, zp, plane_sel, qubit_sel):
    """Forward elimination over the selected columns, in place.

    plane_sel[i] chooses the plane of the i-th pivot column (0 = X, 1 = Z)
    and qubit_sel[i] its qubit.  Each pivot row is xorred into every other
    row carrying that bit and then retired.  Returns (n_pivots, active) with
    active a uint8 mask of the rows never used as pivots; those rows span
    the subgroup supported entirely off the selected columns.
    """
    k = xp.shape[0]
    active = np.ones(k, dtype=np.uint8)
    one = np.uint64(1)
    n_pivots = 0
    for pl, q in zip(plane_sel, qubit_sel):
        plane = xp if pl == 0 else zp
        w, s = q >> 6, np.uint64(q & 63)
        bits = ((plane[:, w] >> s) & one).astype(bool)
        cand = np.nonzero(bits & (active != 0))[0]
        if cand.size == 0:
            continue
        piv = cand[0]
        bits[piv] = False
        rows = np.nonzero(bits)[0]
        if rows.size:
            xp[rows] ^= xp[piv]
            zp[rows] ^= zp[piv]
        active[piv] = 0
        n_pivots += 1
    return n_pivots, active


def rank_bits(mat, nbits):
    """GF(2) rank of a packed (k, W) uint64 matrix with nbits columns."""
    mat = mat.copy()
    k = mat.shape[0]
    used = np.zeros(k, dtype=bool)
    one = np.uint64(1)
    rank = 0
    for q in range(nbits):
        w, s = q >> 6, np.uint64(q & 63)
        bits = ((mat[:, w] >> s) & one).astype(bool)
        cand = np.nonzero(bits & ~used)[0]
        if cand.size == 0:
            continue
        piv = cand[0]
        bits[piv] = False
        rows = np.nonzero(bits)[0]
        if rows.size:
            mat[rows] ^= mat[piv]
        used[piv] = True
        rank += 1
    return rank
