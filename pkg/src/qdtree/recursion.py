"""Exact recursion for the label distribution on an expanding Clifford tree.

State: pi = (pi_n, pi_z, pi_x, pi_y, pi_a), the probability that the subgroup
recorded on a depth-t subtree carries each label (see algebra.py).  One
generation applies the branching map (two children merge into a parent)
followed by the gate average: with probability p a uniformly random letter
permutation acts on the parent wire, with probability 1 - p nothing does.

The total probability is conserved exactly by both maps, but the constant-sum
mode of the branching map has multiplier 2, so rounding noise in the sum
doubles every generation.  The iteration helpers therefore renormalize after
each step; apply_MB / apply_Mu expose the raw maps.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "apply_MB",
    "apply_Mu",
    "step",
    "initial_condition",
    "iterate",
    "iterate_to_convergence",
    "z2_image",
    "qd_fixed_point",
    "mixed_fixed_point",
    "encoding_fixed_point",
    "symmetric_fixed_point",
    "is_physical",
    "closed_form_fixed_points",
    "jacobian",
    "tangent_eigenvalues",
    "FixedPointReport",
    "PhaseReport",
    "classify_phase",
    "phase_boundaries",
    "mutual_info_distribution",
    "mean_mutual_info",
    "ModelParams",
    "P_QD_MIXED",
    "P_MIXED_ENCODING",
]

# Exchange-of-stability points of the recursion.
P_QD_MIXED = 0.6
P_MIXED_ENCODING = 0.75


@dataclass(frozen=True)
class ModelParams:
    """Tree-model parameters: gate probability p, access fraction f,
    generations t (2**t leaves)."""

    p: float
    f: float
    t: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p out of range: {self.p}")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"f out of range: {self.f}")
        if self.t < 0 or int(self.t) != self.t:
            raise ValueError(f"t must be a non-negative integer: {self.t}")


def _validate(pi, atol=1e-9):
    if len(pi) != 5:
        raise ValueError("distribution must have 5 components")
    if min(pi) < -atol or abs(sum(pi) - 1.0) > atol:
        raise ValueError(f"not a distribution over labels: {pi}")


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p out of range: {p}")


def apply_MB(pi):
    """One branching step: label distribution of a parent whose two children
    are independent draws from pi.  Quadratic map; conserves the sum."""
    _validate(pi)
    n, z, x, y, a = pi
    return (
        n * n + 2.0 * n * (x + y),
        z * z + 2.0 * z * (n + x + y + a) + 2.0 * n * a,
        x * x + y * y,
        2.0 * x * y,
        a * a + 2.0 * a * (x + y),
    )


def apply_Mu(pi, p):
    """Average over the parent-wire gate: with probability p the letters
    (z, x, y) are uniformly permuted, replacing their weights by the mean;
    n and a are invariant."""
    _check_p(p)
    _validate(pi)
    n, z, x, y, a = pi
    m = (z + x + y) / 3.0
    q = 1.0 - p
    return (n, q * z + p * m, q * x + p * m, q * y + p * m, a)


def _step_raw(pi, p):
    # unvalidated hot path shared by the iteration helpers
    n, z, x, y, a = pi
    bn = n * n + 2.0 * n * (x + y)
    bz = z * z + 2.0 * z * (n + x + y + a) + 2.0 * n * a
    bx = x * x + y * y
    by = 2.0 * x * y
    ba = a * a + 2.0 * a * (x + y)
    m = (bz + bx + by) / 3.0
    q = 1.0 - p
    v = (bn, q * bz + p * m, q * bx + p * m, q * by + p * m, ba)
    s = v[0] + v[1] + v[2] + v[3] + v[4]
    return (v[0] / s, v[1] / s, v[2] / s, v[3] / s, v[4] / s)


def step(pi, p):
    """One generation: gate average after branching, renormalized."""
    _check_p(p)
    _validate(pi)
    return _step_raw(pi, p)


def initial_condition(f, z_only=False):
    """Leaf distribution for access fraction f.

    Full access to the selected leaves gives (1 - f, 0, 0, 0, f); Z-only
    access gives (1 - f, f, 0, 0, 0).
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must be in [0, 1]")
    if z_only:
        return (1.0 - f, f, 0.0, 0.0, 0.0)
    return (1.0 - f, 0.0, 0.0, 0.0, f)


def iterate(pi0, p, t):
    """Distributions after 0..t generations, as a list of tuples."""
    _check_p(p)
    _validate(pi0)
    out = [tuple(pi0)]
    pi = tuple(pi0)
    for _ in range(t):
        pi = _step_raw(pi, p)
        out.append(pi)
    return out


def iterate_to_convergence(pi0, p, tol=1e-12, max_steps=100000):
    """Iterate until the sup-norm change drops below tol.

    Returns (pi, steps_taken, converged).  Near the exchange points p = 3/5
    and p = 3/4 convergence slows down like 1/|p - p_c|; raise max_steps there.
    """
    _check_p(p)
    _validate(pi0)
    pi = tuple(pi0)
    for k in range(1, max_steps + 1):
        nxt = _step_raw(pi, p)
        d = max(abs(nxt[i] - pi[i]) for i in range(5))
        pi = nxt
        if d < tol:
            return pi, k, True
    return pi, max_steps, False


def z2_image(pi):
    """Image under the complement symmetry, which swaps the n and a labels."""
    n, z, x, y, a = pi
    return (a, z, x, y, n)


def qd_fixed_point(p):
    """Fixed point with pi_n = pi_a = 0 and pi_x = pi_y (redundant plateau)."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must be in [0, 1)")
    z = (3.0 - 6.0 * p + math.sqrt(24.0 * p * p - 24.0 * p + 9.0)) / (6.0 - 6.0 * p)
    x = (1.0 - z) / 2.0
    return (0.0, z, x, x, 0.0)


def mixed_fixed_point(p, image=False):
    """Fixed point mixing a no-information component with the redundant one:
    (1 - u, u/2, u/4, u/4, 0) with u = (6 - 8p)/(3 - 3p).

    Physical (all weights nonnegative) exactly for 3/5 <= p <= 3/4, where u
    runs from 1 down to 0.  `image` selects the complement-symmetric partner.
    """
    u = (6.0 - 8.0 * p) / (3.0 - 3.0 * p)
    pt = (1.0 - u, u / 2.0, u / 4.0, u / 4.0, 0.0)
    return z2_image(pt) if image else pt


def encoding_fixed_point(image=False):
    """The n vertex (or, for image=True, the a vertex)."""
    return (0.0, 0.0, 0.0, 0.0, 1.0) if image else (1.0, 0.0, 0.0, 0.0, 0.0)


def symmetric_fixed_point(p):
    """Fixed point on the self-complementary manifold pi_n = pi_a, pi_x = pi_y.

    Physical for p >= 3/5.  It is the attractor of balanced full access
    (f = 1/2) and is transversally unstable with leading eigenvalue 1 + pi_a.
    """
    x = (3.0 - 8.0 * p + math.sqrt(40.0 * p * p - 24.0 * p + 9.0)) / (12.0 * (1.0 - p))
    n = 1.0 - 4.0 * x
    z = 6.0 * x - 1.0
    return (n, z, x, x, n)


def is_physical(pi, atol=1e-12):
    return all(c >= -atol for c in pi) and abs(sum(pi) - 1.0) < 1e-9


# columns span the sum-zero tangent space of the simplex
_TANGENT_BASIS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, -1.0, -1.0, -1.0],
    ]
)


def _difference_block(pi, p, h):
    pi = np.asarray(pi, dtype=float)
    cols = []
    for i in range(4):
        b = _TANGENT_BASIS[:, i]
        fp = np.array(_step_raw(tuple(pi + h * b), p))
        fm = np.array(_step_raw(tuple(pi - h * b), p))
        cols.append((fp - fm) / (2.0 * h))
    return np.column_stack(cols)  # 5x4, columns approximate J (e_i - e_4)


def jacobian(pi, p, h=1e-6):
    """Linearization of one generation at pi, differenced within the simplex.

    Central differences with step h along sum-zero directions; the returned
    5x5 matrix is the Jacobian composed with the mean-centering projector, so
    it acts correctly on tangent vectors and has one spurious zero eigenvalue
    along the constant direction.
    """
    A = _difference_block(pi, p, h)
    # J (e_i - mean) = J (e_i - e_4) - J (mean - e_4); the second term is the
    # column average of A shifted, worked out directly:
    #   e_i - mean = (e_i - e_4) - sum_j (e_j - e_4)/5
    correction = A.sum(axis=1, keepdims=True) / 5.0
    J5 = np.empty((5, 5))
    J5[:, :4] = A - correction
    J5[:, 4] = -correction[:, 0]
    return J5


def tangent_eigenvalues(pi, p, h=1e-6):
    """Eigenvalues of one generation on the 4-dimensional tangent space."""
    A = _difference_block(pi, p, h)
    C, *_ = np.linalg.lstsq(_TANGENT_BASIS, A, rcond=None)
    return np.linalg.eigvals(C)


@dataclass
class FixedPointReport:
    point: tuple
    kind: str
    stable: bool
    marginal: bool
    leading_eigenvalue_modulus: float
    eigenvalues: np.ndarray
    residual: float


def _report_for(point, kind, p, margin=1e-8):
    nxt = _step_raw(point, p)
    residual = max(abs(nxt[i] - point[i]) for i in range(5))
    eig = tangent_eigenvalues(point, p)
    lead = float(np.max(np.abs(eig)))
    return FixedPointReport(
        point=point,
        kind=kind,
        stable=lead < 1.0 - margin,
        marginal=abs(lead - 1.0) <= margin,
        leading_eigenvalue_modulus=lead,
        eigenvalues=eig,
        residual=residual,
    )


def closed_form_fixed_points(p, margin=1e-8):
    """All physical closed-form fixed points at this p, with stability.

    Kinds: QD (redundant plateau), mixed (two complement-conjugate copies
    where physical), encoding-n / encoding-a (the two vertices), and the
    transversally unstable self-complementary point (physical for p >= 3/5).
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("p must be in [0, 1)")
    out = [_report_for(qd_fixed_point(p), "QD", p, margin)]
    for image in (False, True):
        pt = mixed_fixed_point(p, image=image)
        if is_physical(pt):
            out.append(_report_for(pt, "mixed", p, margin))
    out.append(_report_for(encoding_fixed_point(), "encoding-n", p, margin))
    out.append(_report_for(encoding_fixed_point(image=True), "encoding-a", p, margin))
    sym = symmetric_fixed_point(p)
    if is_physical(sym):
        out.append(_report_for(sym, "Z2-symmetric-unstable", p, margin))
    return out


def mutual_info_distribution(pi):
    """Distribution of the information (bits) a subtree carries about the
    reference: label n gives 0, the one-letter labels give 1, label a gives 2."""
    n, z, x, y, a = pi
    return (n, z + x + y, a)


def mean_mutual_info(pi):
    p0, p1, p2 = mutual_info_distribution(pi)
    return p1 + 2.0 * p2


@dataclass
class PhaseReport:
    p: float
    f: float
    z_only: bool
    phase: str
    kind: str
    attractor: tuple
    distance: float
    iterations: int
    converged: bool
    leading_eigenvalue_modulus: float
    stable: bool
    critical: bool
    info_distribution: tuple
    limit_below: tuple | None = None
    limit_above: tuple | None = None


_PHASE_OF_KIND = {
    "QD": "QD",
    "mixed": "Mixed",
    "encoding-n": "Encoding",
    "encoding-a": "Encoding",
    "Z2-symmetric-unstable": "first-order line",
}


def _nearest_fixed_point(pi, p):
    best_kind, best_pt, best_d = "unknown", None, math.inf
    candidates = [(r.kind, r.point) for r in closed_form_fixed_points(p)]
    for kind, pt in candidates:
        d = max(abs(pi[i] - pt[i]) for i in range(5))
        if d < best_d:
            best_kind, best_pt, best_d = kind, pt, d
    return best_kind, best_pt, best_d


def classify_phase(
    p,
    f,
    z_only=False,
    tol=1e-12,
    max_steps=100000,
    match_tol=1e-6,
    crit_eps=1e-12,
):
    """Run the recursion from the leaf distribution and name the attractor.

    The phase is read off by proximity of the converged iterate to the
    closed-form fixed points.  At p = 3/5 and p = 3/4 (within crit_eps) the
    leading eigenvalue is marginal and the report is flagged critical instead
    of being assigned a phase.  Balanced full access (f = 1/2, not z_only)
    with p > 3/5 sits on a first-order line: the flow is confined to the
    self-complementary manifold, and the two one-sided limits in f select the
    complement-conjugate attractors, both of which are reported.
    """
    pi0 = initial_condition(f, z_only=z_only)
    critical = min(abs(p - P_QD_MIXED), abs(p - P_MIXED_ENCODING)) < crit_eps
    first_order = (not z_only) and abs(f - 0.5) < crit_eps and p > P_QD_MIXED + crit_eps

    pi, iters, conv = iterate_to_convergence(pi0, p, tol=tol, max_steps=max_steps)
    kind, _, dist = _nearest_fixed_point(pi, p)
    if dist > match_tol:
        kind = "unknown"

    if critical:
        phase = "critical"
    elif first_order:
        phase = "first-order line"
    else:
        phase = _PHASE_OF_KIND.get(kind, "unknown")

    limit_below = limit_above = None
    if first_order and not critical:
        eps = 1e-9
        below, _, _ = iterate_to_convergence(
            initial_condition(0.5 - eps), p, tol=tol, max_steps=max_steps
        )
        limit_below = below
        limit_above = z2_image(below)

    eig = tangent_eigenvalues(pi, p)
    lead = float(np.max(np.abs(eig)))
    return PhaseReport(
        p=p,
        f=f,
        z_only=z_only,
        phase=phase,
        kind=kind,
        attractor=pi,
        distance=dist,
        iterations=iters,
        converged=conv,
        leading_eigenvalue_modulus=lead,
        stable=lead < 1.0 - 1e-8,
        critical=critical,
        info_distribution=mutual_info_distribution(pi),
        limit_below=limit_below,
        limit_above=limit_above,
    )


def phase_boundaries(f=0.3, p_min=0.5, p_max=0.8, p_step=1e-3, max_steps=100000):
    """Scan p and report where the classified phase changes.

    Returns a list of (p_boundary, phase_left, phase_right); each boundary is
    the midpoint of the bracketing scan interval, so it is accurate to p_step.
    Grid points that land exactly on a marginal eigenvalue (flagged critical)
    separate two phases and are skipped when reading off the bracket.
    """
    n_pts = int(round((p_max - p_min) / p_step)) + 1
    grid = [p_min + i * p_step for i in range(n_pts)]
    labels = [classify_phase(p, f, max_steps=max_steps).phase for p in grid]

    keep = [(p, lab) for p, lab in zip(grid, labels) if lab != "critical"]
    out = []
    for (p1, l1), (p2, l2) in zip(keep, keep[1:]):
        if l1 != l2:
            out.append((0.5 * (p1 + p2), l1, l2))
    return out
