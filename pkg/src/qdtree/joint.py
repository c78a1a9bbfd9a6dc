"""Joint label distribution for nested subsystems F inside G.

State: a 5x5 matrix Pi with Pi[s, t] the probability that the subgroup
accessible from F carries label s while the one accessible from G carries
label t.  Both labels live on the same realization, so one generation applies
the tensor square of the branching map followed by the gate average with the
same permutation acting on both slots.  Leaf membership is three-way: a leaf
is in F with probability f, in G but not F with probability g - f, outside G
with probability 1 - g.

The long-time support of Pi is what distinguishes a genuine mixture of
realization types from a mere superposition of marginals: in the mixed window
the limit concentrates on the diagonal letters {(z,z), (x,x), (y,y)} plus a
single corner entry fixed by where f and g sit relative to 1/2.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import BRANCH_TABLE, Label, perm_matrices

__all__ = [
    "JointParams",
    "apply_M2B",
    "apply_M2u",
    "joint_step",
    "joint_initial_condition",
    "iterate_joint",
    "joint_trajectory",
    "marginals",
    "JointSupportReport",
    "classify_joint_support",
]


def _branch_tensor():
    T = np.zeros((5, 5, 5))
    for s1 in range(5):
        for s2 in range(5):
            T[BRANCH_TABLE[s1][s2], s1, s2] = 1.0
    return T


_T = _branch_tensor()
# K[(s,t), (s1,s2,t1,t2)]: both replicas branch with the same child pairing
_K = np.einsum("sab,tcd->stabcd", _T, _T).reshape(25, 625)
_DMATS = perm_matrices()


@dataclass
class JointParams:
    p: float
    f: float
    g: float

    def __post_init__(self):
        if not 0.0 < self.f < self.g < 1.0:
            raise ValueError("need 0 < f < g < 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")


def _validate(Pi, atol=1e-9):
    Pi = np.asarray(Pi, dtype=float)
    if Pi.shape != (5, 5):
        raise ValueError("joint distribution must be 5x5")
    if Pi.min() < -atol or abs(Pi.sum() - 1.0) > atol:
        raise ValueError("not a joint distribution over label pairs")
    return Pi


def apply_M2B(Pi):
    """Tensor-square branching step:
    out[s, t] = sum T[s, s1, s2] T[t, t1, t2] Pi[s1, t1] Pi[s2, t2]."""
    Pi = _validate(Pi)
    # PP[s1, s2, t1, t2] = Pi[s1, t1] * Pi[s2, t2]
    PP = np.einsum("ac,bd->abcd", Pi, Pi).reshape(625)
    return (_K @ PP).reshape(5, 5)


def apply_M2u(Pi, p):
    """Gate average with the same letter permutation acting on both slots."""
    Pi = _validate(Pi)
    acc = sum(D @ Pi @ D.T for D in _DMATS)
    return (1.0 - p) * Pi + (p / 6.0) * acc


def joint_step(Pi, p):
    """One generation, renormalized (the sum mode is unstable, as in the
    single-copy recursion)."""
    out = apply_M2u(apply_M2B(Pi), p)
    return out / out.sum()


def joint_initial_condition(f, g):
    """Leaf-level joint law: mass 1-g at (n,n), g-f at (n,a), f at (a,a)."""
    Pi = np.zeros((5, 5))
    Pi[Label.N, Label.N] = 1.0 - g
    Pi[Label.N, Label.A] = g - f
    Pi[Label.A, Label.A] = f
    return Pi


def iterate_joint(params, t=None, tol=1e-12, max_steps=100000):
    """Iterate the joint recursion from the leaf law.

    With t given, applies exactly t generations.  With t=None, iterates until
    the sup-norm change drops below tol (or max_steps).  Returns the final Pi.
    """
    Pi = joint_initial_condition(params.f, params.g)
    if t is not None:
        for _ in range(t):
            Pi = joint_step(Pi, params.p)
        return Pi
    for _ in range(max_steps):
        nxt = joint_step(Pi, params.p)
        d = np.max(np.abs(nxt - Pi))
        Pi = nxt
        if d < tol:
            break
    return Pi


def joint_trajectory(params, t):
    """Joint laws after 0..t generations."""
    Pi = joint_initial_condition(params.f, params.g)
    out = [Pi]
    for _ in range(t):
        Pi = joint_step(Pi, params.p)
        out.append(Pi)
    return out


def marginals(Pi):
    """(F-side, G-side) label distributions of a joint law."""
    Pi = np.asarray(Pi, dtype=float)
    return tuple(Pi.sum(axis=1)), tuple(Pi.sum(axis=0))


@dataclass
class JointSupportReport:
    allowed: tuple
    masses: dict
    off_pattern_mass: float
    within_tol: bool
    tol: float


def classify_joint_support(Pi, f, g, tol=1e-6, boundary_eps=1e-9):
    """Check a converged joint law against the allowed support pattern.

    The diagonal letter pairs (z,z), (x,x), (y,y) are always allowed.  The
    remaining mass sits at exactly one of (n,n), (a,a), (n,a) according to
    whether g < 1/2, f > 1/2, or f < 1/2 < g.  Anything else counts as
    off-pattern; within_tol reports whether its total stays below tol.
    """
    Pi = np.asarray(Pi, dtype=float)
    allowed = [(Label.Z, Label.Z), (Label.X, Label.X), (Label.Y, Label.Y)]
    if g <= 0.5 + boundary_eps:
        allowed.append((Label.N, Label.N))
    if f >= 0.5 - boundary_eps:
        allowed.append((Label.A, Label.A))
    if f <= 0.5 + boundary_eps and g >= 0.5 - boundary_eps:
        allowed.append((Label.N, Label.A))

    mask = np.ones((5, 5), dtype=bool)
    masses = {}
    for s, t in allowed:
        masses[(Label(s), Label(t))] = float(Pi[s, t])
        mask[s, t] = False
    off = float(np.abs(Pi[mask]).sum())
    return JointSupportReport(
        allowed=tuple(allowed),
        masses=masses,
        off_pattern_mass=off,
        within_tol=off < tol,
        tol=tol,
    )
