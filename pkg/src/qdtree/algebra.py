"""Label algebra for stabilizer subgroups of a single logical qubit.

Dropping phases, a multiplicatively closed set of Pauli operators on one qubit
is one of five subgroups

    n = {I}          (trivial)
    z = {I, Z}
    x = {I, X}
    y = {I, Y}
    a = {I, X, Y, Z} (all)

The label recorded on a subsystem evolves under two moves: branching (the
two-qubit isometry that copies Z and fans out X) and a random one-qubit
Clifford, which acts as a permutation of the letters {Z, X, Y}.  This module
holds the finite algebra shared by the exact recursions and the Monte Carlo
tableau code: the branching composition table, the single-Pauli pullback it
derives from, and the S3 permutation action with its GF(2) matrices.
"""

from enum import IntEnum
from itertools import permutations

import numpy as np

__all__ = [
    "Label",
    "LABELS",
    "DIMS",
    "BRANCH_TABLE",
    "PAULI_PULLBACK",
    "PERMS3",
    "GATE_MATS",
    "branch_compose",
    "pauli_pullback",
    "permutation_action",
    "label_from_pauli_set",
    "pauli_set",
    "perm_matrices",
]


class Label(IntEnum):
    N = 0
    Z = 1
    X = 2
    Y = 3
    A = 4


LABELS = "nzxya"

# log2 of the subgroup order; equals the information (in bits) the subsystem
# carries about the injected qubit.
DIMS = (0, 1, 1, 1, 2)

_PAULI_ORDER = "IZXY"

# Pullback of single Paulis through the branching isometry: the operator
# P1 (x) P2 on the two children maps back to a parent Pauli, or to nothing
# when it is not in the image algebra (None).  Axes ordered I, Z, X, Y.
PAULI_PULLBACK = (
    ("I", "Z", None, None),
    ("Z", "I", None, None),
    (None, None, "X", "Y"),
    (None, None, "Y", "X"),
)

# branch_compose: parent label given the labels retained on the two children.
# Row: child 1, column: child 2, order n z x y a.  Each entry is what the
# set-wise pauli_pullback of the two subgroups generates.
BRANCH_TABLE = (
    (Label.N, Label.Z, Label.N, Label.N, Label.Z),
    (Label.Z, Label.Z, Label.Z, Label.Z, Label.Z),
    (Label.N, Label.Z, Label.X, Label.Y, Label.A),
    (Label.N, Label.Z, Label.Y, Label.X, Label.A),
    (Label.Z, Label.Z, Label.A, Label.A, Label.A),
)

# The 6 one-qubit gates that matter here, as permutations of the letters
# (z, x, y) = label indices (1, 2, 3).  PERMS3[k][i-1] is the image of i.
PERMS3 = tuple(permutations((1, 2, 3)))

_PAULI_BITS = {1: (0, 1), 2: (1, 0), 3: (1, 1)}  # label index -> (x bit, z bit)


def _gate_mat(perm):
    # GF(2) action on (x, z) symplectic bits; columns are the images of X, Z.
    ax, cx = _PAULI_BITS[perm[1]]  # image of X (letter index 2)
    bz, dz = _PAULI_BITS[perm[0]]  # image of Z (letter index 1)
    return (ax, bz, cx, dz)


# GATE_MATS[k] = (a, b, c, d) with x' = a x + b z, z' = c x + d z over GF(2),
# realizing PERMS3[k] by conjugation.
GATE_MATS = tuple(_gate_mat(p) for p in PERMS3)


def branch_compose(s1, s2):
    """Label on the parent when the children carry labels s1, s2."""
    return BRANCH_TABLE[s1][s2]


def pauli_pullback(p1, p2):
    """Parent Pauli that P1 (x) P2 pulls back to, or None when annihilated."""
    return PAULI_PULLBACK[_PAULI_ORDER.index(p1)][_PAULI_ORDER.index(p2)]


def permutation_action(perm, s):
    """Image of label s under a permutation of the letters (z, x, y); the
    n and a labels are fixed by every permutation."""
    if 1 <= s <= 3:
        return perm[s - 1]
    return s


def pauli_set(s):
    """The subgroup with label s, as a frozenset of Pauli letters."""
    return (
        frozenset("I"),
        frozenset("IZ"),
        frozenset("IX"),
        frozenset("IY"),
        frozenset("IZXY"),
    )[s]


def label_from_pauli_set(group):
    """Inverse of pauli_set; group must be one of the five closed sets."""
    table = {pauli_set(s): Label(s) for s in range(5)}
    return table[frozenset(group)]


def perm_matrices():
    """5x5 permutation matrices acting on label distributions, one per gate."""
    mats = []
    for perm in PERMS3:
        D = np.zeros((5, 5))
        for s in range(5):
            D[permutation_action(perm, s), s] = 1.0
        mats.append(D)
    return mats
