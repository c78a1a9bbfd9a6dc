"""Tests for the bit-packed GF(2) kernels, run against every backend.

Reference results come from plain Python integers (one arbitrary-precision
bitmask per row), so the packed uint64 arithmetic is checked independently.
"""
from __future__ import annotations

import numpy as np
import pytest

from qdtree.algebra import GATE_MATS
from qdtree.gf2 import available_backends, get_backend

BACKENDS = available_backends()


def pack_rows(rows, n):
    """Rows given as Python-int bitmasks -> (k, W) uint64 plane."""
    W = max(1, (n + 63) >> 6)
    out = np.zeros((len(rows), W), dtype=np.uint64)
    for i, r in enumerate(rows):
        for w in range(W):
            out[i, w] = (r >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def unpack_rows(plane):
    return [int.from_bytes(row.tobytes(), "little") for row in plane]


def random_rows(rng, k, n):
    return [
        int("".join(rng.choice(["0", "1"], size=n))[::-1] or "0", 2)
        for _ in range(k)
    ]


def ref_cnot(xr, zr, c, t):
    xr = [x ^ (((x >> c) & 1) << t) for x in xr]
    zr = [z ^ (((z >> t) & 1) << c) for z in zr]
    return xr, zr


def ref_perm_gate(xr, zr, q, a, b, c, d):
    nx, nz = [], []
    for x, z in zip(xr, zr):
        xb, zb = (x >> q) & 1, (z >> q) & 1
        xn = (a * xb ^ b * zb) & 1
        zn = (c * xb ^ d * zb) & 1
        nx.append((x & ~(1 << q)) | (xn << q))
        nz.append((z & ~(1 << q)) | (zn << q))
    return nx, nz


def ref_rank(rows):
    rows = list(rows)
    rank = 0
    while rows:
        piv = rows.pop()
        if piv == 0:
            continue
        low = piv & -piv
        rows = [r ^ piv if r & low else r for r in rows]
        rank += 1
    return rank


def row_span(rows):
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return span


@pytest.mark.parametrize("backend", BACKENDS)
def test_cnot_single_row(backend):
    be = get_backend(backend)
    # X on control propagates to target; Z on target propagates to control
    xp = pack_rows([0b001], 3)
    zp = pack_rows([0b000], 3)
    be.cnot(xp, zp, 0, 2)
    assert unpack_rows(xp) == [0b101]
    assert unpack_rows(zp) == [0b000]
    xp = pack_rows([0b000], 3)
    zp = pack_rows([0b100], 3)
    be.cnot(xp, zp, 0, 2)
    assert unpack_rows(xp) == [0b000]
    assert unpack_rows(zp) == [0b101]


@pytest.mark.parametrize("backend", BACKENDS)
def test_perm_gate_realizes_all_six_gates(backend):
    be = get_backend(backend)
    # bits (x, z): Z = (0,1), X = (1,0), Y = (1,1)
    for mats in GATE_MATS:
        a, b, c, d = mats
        for xb, zb in [(0, 1), (1, 0), (1, 1)]:
            xp = pack_rows([xb], 1)
            zp = pack_rows([zb], 1)
            be.perm_gate(xp, zp, 0, a, b, c, d)
            assert unpack_rows(xp)[0] == (a * xb ^ b * zb) & 1
            assert unpack_rows(zp)[0] == (c * xb ^ d * zb) & 1


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [5, 64, 70, 130])
@pytest.mark.parametrize("seed", range(3))
def test_gate_kernels_match_integer_reference(backend, n, seed):
    be = get_backend(backend)
    rng = np.random.default_rng(1000 + seed)
    k = int(rng.integers(1, 9))
    xr = random_rows(rng, k, n)
    zr = random_rows(rng, k, n)
    xp, zp = pack_rows(xr, n), pack_rows(zr, n)
    for _ in range(60):
        if rng.random() < 0.5:
            c, t = rng.choice(n, size=2, replace=False)
            be.cnot(xp, zp, int(c), int(t))
            xr, zr = ref_cnot(xr, zr, int(c), int(t))
        else:
            q = int(rng.integers(n))
            a, b, c, d = GATE_MATS[rng.integers(len(GATE_MATS))]
            be.perm_gate(xp, zp, q, a, b, c, d)
            xr, zr = ref_perm_gate(xr, zr, q, a, b, c, d)
    assert unpack_rows(xp) == xr
    assert unpack_rows(zp) == zr


@pytest.mark.parametrize("backend", BACKENDS)
def test_rank_bits_known_cases(backend):
    be = get_backend(backend)
    assert be.rank_bits(pack_rows([0b1, 0b10, 0b100], 3), 3) == 3
    assert be.rank_bits(pack_rows([0, 0], 3), 3) == 0
    assert be.rank_bits(pack_rows([0b11, 0b11, 0b01], 2), 2) == 2


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [10, 70, 130])
@pytest.mark.parametrize("seed", range(4))
def test_rank_bits_matches_integer_reference(backend, n, seed):
    be = get_backend(backend)
    rng = np.random.default_rng(2000 + 10 * seed + n)
    k = int(rng.integers(1, 14))
    rows = random_rows(rng, k, n)
    assert be.rank_bits(pack_rows(rows, n), n) == ref_rank(rows)


@pytest.mark.parametrize("backend", BACKENDS)
def test_eliminate_known_case(backend):
    be = get_backend(backend)
    # rows: X0X1, Z0Z1, X1 as (x, z) int pairs on 2 qubits
    xp = pack_rows([0b11, 0b00, 0b10], 2)
    zp = pack_rows([0b00, 0b11, 0b00], 2)
    plane_sel = np.array([0, 1], dtype=np.int64)  # X then Z of qubit 1
    qubit_sel = np.array([1, 1], dtype=np.int64)
    n_piv, active = be.eliminate(xp, zp, plane_sel, qubit_sel)
    assert n_piv == 2
    # X0X1 is cleaned to X0 by the X1 pivot; Z0Z1 is the Z pivot
    assert list(active) == [0, 0, 1]
    assert unpack_rows(xp)[2] == 0b01
    assert unpack_rows(zp)[2] == 0b00


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [6, 66])
@pytest.mark.parametrize("seed", range(5))
def test_eliminate_clears_selected_columns(backend, n, seed):
    be = get_backend(backend)
    rng = np.random.default_rng(3000 + seed)
    k = int(rng.integers(2, 9))
    xr, zr = random_rows(rng, k, n), random_rows(rng, k, n)
    xp, zp = pack_rows(xr, n), pack_rows(zr, n)

    m = int(rng.integers(1, 2 * n))
    plane_sel = rng.integers(0, 2, size=m).astype(np.int64)
    qubit_sel = rng.integers(0, n, size=m).astype(np.int64)
    n_piv, active = be.eliminate(xp, zp, plane_sel, qubit_sel)

    # active rows carry no bit in any selected column
    for i in np.nonzero(active)[0]:
        x, z = unpack_rows(xp)[i], unpack_rows(zp)[i]
        for pl, q in zip(plane_sel, qubit_sel):
            assert ((x if pl == 0 else z) >> int(q)) & 1 == 0
    assert n_piv + int(active.sum()) == k

    # row operations are invertible: the joint row span is unchanged
    before = row_span([x | (z << n) for x, z in zip(xr, zr)])
    after = row_span(
        [x | (z << n) for x, z in zip(unpack_rows(xp), unpack_rows(zp))]
    )
    assert before == after

    # pivot count equals the rank of the selected-column submatrix
    cols = []
    for x, z in zip(xr, zr):
        mask = 0
        for j, (pl, q) in enumerate(zip(plane_sel, qubit_sel)):
            bit = ((x if pl == 0 else z) >> int(q)) & 1
            mask |= bit << j
        cols.append(mask)
    assert n_piv == ref_rank(cols)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="only one backend built")
@pytest.mark.parametrize("seed", range(10))
def test_backends_agree_bit_for_bit(seed):
    impls = [get_backend(name) for name in BACKENDS]
    rng = np.random.default_rng(4000 + seed)
    n = int(rng.integers(2, 140))
    k = int(rng.integers(1, 10))
    xr, zr = random_rows(rng, k, n), random_rows(rng, k, n)
    states = [(pack_rows(xr, n), pack_rows(zr, n)) for _ in impls]

    for _ in range(40):
        roll = rng.random()
        if roll < 0.4 and n >= 2:
            c, t = rng.choice(n, size=2, replace=False)
            for (xp, zp), be in zip(states, impls):
                be.cnot(xp, zp, int(c), int(t))
        elif roll < 0.8:
            q = int(rng.integers(n))
            a, b, c, d = GATE_MATS[rng.integers(len(GATE_MATS))]
            for (xp, zp), be in zip(states, impls):
                be.perm_gate(xp, zp, q, a, b, c, d)
        else:
            m = int(rng.integers(1, n + 1))
            plane_sel = rng.integers(0, 2, size=m).astype(np.int64)
            qubit_sel = rng.integers(0, n, size=m).astype(np.int64)
            results = [
                be.eliminate(xp, zp, plane_sel.copy(), qubit_sel.copy())
                for (xp, zp), be in zip(states, impls)
            ]
            assert len({r[0] for r in results}) == 1
            for r in results[1:]:
                assert np.array_equal(r[1], results[0][1])
        for xp, zp in states[1:]:
            assert np.array_equal(xp, states[0][0])
            assert np.array_equal(zp, states[0][1])


def test_backend_module_exports():
    import qdtree.gf2 as gf2

    assert gf2.BACKEND in ("python", "compiled")
    for name in ("cnot", "perm_gate", "eliminate", "rank_bits"):
        assert callable(getattr(gf2, name))
    with pytest.raises(ValueError):
        get_backend("fortran")
