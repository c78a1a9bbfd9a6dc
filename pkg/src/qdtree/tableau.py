"""Phase-free stabilizer tableaux over GF(2).

A state on n qubits is tracked by n generator rows, each a pair of bit
vectors (X part, Z part).  Global phases are irrelevant for every quantity
computed here (ranks, entropies, subgroup labels), so they are not stored.
Rows are packed 64 qubits per word; the heavy lifting lives in the gf2
backends.
"""

from dataclasses import dataclass

import numpy as np

from . import gf2
from .algebra import GATE_MATS, Label


def _words(n):
    return (n + 63) >> 6


@dataclass
class StabTableau:
    """n generator rows on n qubits, X and Z planes packed row-wise."""

    n: int
    xp: np.ndarray
    zp: np.ndarray

    def copy(self):
        return StabTableau(self.n, self.xp.copy(), self.zp.copy())


def new_bell_tableau(n):
    """All-|0> product state except qubits 0 and 1 prepared as a Bell pair.

    Row 0 is X0 X1, row 1 is Z0 Z1, row i >= 2 is Z_i.  Qubit 0 is the
    reference kept aside; qubit 1 seeds the tree.
    """
    if n < 2:
        raise ValueError("need at least the reference and one tree qubit")
    w = _words(n)
    xp = np.zeros((n, w), dtype=np.uint64)
    zp = np.zeros((n, w), dtype=np.uint64)
    xp[0, 0] = np.uint64(0b11)
    zp[1, 0] = np.uint64(0b11)
    for q in range(2, n):
        zp[q, q >> 6] = np.uint64(1) << np.uint64(q & 63)
    return StabTableau(n, xp, zp)


def apply_cnot(tab, control, target, backend=None):
    (backend or gf2).cnot(tab.xp, tab.zp, control, target)


def apply_perm(tab, qubit, code, backend=None):
    """Apply the one-qubit Clifford indexed by code (0..5), identified with
    the permutation of the X, Y, Z axes it implements."""
    a, b, c, d = GATE_MATS[code]
    (backend or gf2).perm_gate(tab.xp, tab.zp, qubit, a, b, c, d)


def _column_selection(pairs):
    plane_sel = np.fromiter((p for p, _ in pairs), dtype=np.int64,
                            count=len(pairs))
    qubit_sel = np.fromiter((q for _, q in pairs), dtype=np.int64,
                            count=len(pairs))
    return plane_sel, qubit_sel


def restricted_rank(tab, pairs, backend=None):
    """Rank of the tableau restricted to the given (plane, qubit) columns.
    Works on copies; the tableau is left untouched."""
    plane_sel, qubit_sel = _column_selection(list(pairs))
    xp, zp = tab.xp.copy(), tab.zp.copy()
    n_piv, _ = (backend or gf2).eliminate(xp, zp, plane_sel, qubit_sel)
    return n_piv


def subsystem_entropy(tab, qubits, backend=None):
    """Entanglement entropy (in bits) of the qubit subset: rank of the
    restricted generator matrix minus the subset size."""
    qs = sorted(set(qubits))
    pairs = [(0, q) for q in qs] + [(1, q) for q in qs]
    return restricted_rank(tab, pairs, backend=backend) - len(qs)


def extract_label(tab, allowed_x, allowed_z, ref_qubit=0, backend=None):
    """Label of the reference-acting subgroup reachable through the allowed
    columns.

    Columns outside allowed_x / allowed_z (and not on the reference) are
    eliminated; the generators surviving with zero support there are the
    stabilizer elements an observer restricted to the allowed columns can
    use.  Their action on the reference qubit spans a subgroup of the
    single-qubit Pauli group whose dimension is 0, 1 or 2; dimension 1 keeps
    the identity of the surviving letter.
    """
    ax, az = set(allowed_x), set(allowed_z)
    pairs = []
    for q in range(tab.n):
        if q == ref_qubit:
            continue
        if q not in ax:
            pairs.append((0, q))
        if q not in az:
            pairs.append((1, q))
    plane_sel, qubit_sel = _column_selection(pairs)
    xp, zp = tab.xp.copy(), tab.zp.copy()
    _, active = (backend or gf2).eliminate(xp, zp, plane_sel, qubit_sel)
    rows = np.nonzero(active)[0]
    w, s = ref_qubit >> 6, np.uint64(ref_qubit & 63)
    one = np.uint64(1)
    xb = (xp[rows, w] >> s) & one
    zb = (zp[rows, w] >> s) & one
    pats = set((xb | (zb << one)).tolist())
    pats.discard(0)
    if not pats:
        return Label.N
    if len(pats) > 1:
        return Label.A
    (v,) = pats
    return {1: Label.X, 2: Label.Z, 3: Label.Y}[v]
