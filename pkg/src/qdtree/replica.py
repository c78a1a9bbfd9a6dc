"""Two-replica (annealed) analysis of the tree dynamics.

The doubled state on a subtree is carried by three operator-states sigma
(swap on the readable part), nu (mixed), tau (swap on the unreadable part);
their weights (w_sigma, w_nu, w_tau) close under branching plus the gate
average because the one-qubit Clifford group is a 2-design.  Weights are kept
normalized to sum 1; every reported quantity is a scale-invariant ratio.

Annealed purities contract the root weights with the operator inner products
((sigma|sigma) = (tau|tau) = 4, all other pairs 2), giving the annealed
mutual information I2 = log2(purity_RF) - log2(purity_F) + 1 and, from the
attractor switch, the threshold curve p_c(f) between the redundant and
encoding regimes.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "P_L",
    "Q_LOCAL_DIM",
    "apply_Mw",
    "weights_initial_condition",
    "iterate_weights",
    "weights_limit",
    "qd_weight_u",
    "qd_weight_fixed_point",
    "intermediate_weight_fixed_points",
    "WeightFixedPointReport",
    "replica_fixed_points",
    "annealed_purities",
    "annealed_I2",
    "compute_pc",
]

# upper end of the threshold curve: p_c(1/2), where the two intermediate
# fixed points merge with the symmetric one
P_L = (3.0 / 7.0) * (2.0 * math.sqrt(2.0) - 1.0)

# local Hilbert space dimension the weight algebra is derived for
Q_LOCAL_DIM = 2


def _apply_Mw_raw(w, p):
    ws, wn, wt = w
    nu = wn * wn + 2.0 * (ws * wn + ws * wt + wn * wt)
    vs = ws * ws + (p / 3.0) * nu
    vn = (1.0 - p) * nu
    vt = wt * wt + (p / 3.0) * nu
    s = vs + vn + vt
    return (vs / s, vn / s, vt / s)


def apply_Mw(w, p):
    """One branching + gate-average step on normalized replica weights.

    The branching step is quadratic: v = (ws^2, wn^2 + 2(ws*wn + ws*wt +
    wn*wt), wt^2); the gate average then moves weight p/3 of the mixed
    component onto each swap component and keeps 1 - p of it.  The result is
    renormalized to sum 1 (the raw map does not preserve the sum).
    """
    if min(w) < -1e-12:
        raise ValueError("weights must be non-negative")
    return _apply_Mw_raw(w, p)


def weights_initial_condition(f):
    """Leaf weights for readable fraction f: (1 - f, 0, f)."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must be in [0, 1]")
    return (1.0 - f, 0.0, f)


def iterate_weights(w0, p, t):
    """Weights after 0..t generations."""
    w = tuple(w0)
    out = [w]
    for _ in range(t):
        w = apply_Mw(w, p)
        out.append(w)
    return out


def weights_limit(w0, p, tol=1e-13, max_steps=100000):
    """Iterate until the sup-norm change drops below tol.

    Returns (w, steps_taken, converged)."""
    w = tuple(w0)
    for k in range(1, max_steps + 1):
        nxt = apply_Mw(w, p)
        d = max(abs(nxt[i] - w[i]) for i in range(3))
        w = nxt
        if d < tol:
            return w, k, True
    return w, max_steps, False


def _p_of_u(u):
    return 3.0 * u * (1.0 - u) / ((1.0 + u) * (1.0 - 2.0 * u * u))


def qd_weight_u(p, tol=1e-12):
    """Invert p = 3u(1-u) / ((1+u)(1-2u^2)) on the branch u(0)=0, u(1)=1/2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _p_of_u(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def qd_weight_fixed_point(p):
    """Symmetric fixed point (u, 1 - 2u, u) of the weight recursion."""
    u = qd_weight_u(p)
    return (u, 1.0 - 2.0 * u, u)


def intermediate_weight_fixed_points(p):
    """The pair of asymmetric fixed points (u+, 1 - u+ - u-, u-) and its
    swap, from p u^2 - (3 - 3p) u + 4p - 3 = 0.

    Physical exactly for 3/4 <= p <= p_l: the roots leave [0, 1] below 3/4
    (they exchange with the vertices there) and turn complex above p_l
    (merging with the symmetric point).  Returns [] outside that window.
    """
    disc = 9.0 - 6.0 * p - 7.0 * p * p  # (3-3p)^2 - 4p(4p-3)
    if disc < 0.0 or p <= 0.0:
        return []
    sq = math.sqrt(disc)
    up = ((3.0 - 3.0 * p) + sq) / (2.0 * p)
    um = ((3.0 - 3.0 * p) - sq) / (2.0 * p)
    mid = 1.0 - up - um
    if min(up, um, mid) < -1e-12:
        return []
    return [(up, mid, um), (um, mid, up)]


_W_TANGENT = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])


def _weight_tangent_eigenvalues(w, p, h=1e-6):
    w = np.asarray(w, dtype=float)
    cols = []
    for i in range(2):
        b = _W_TANGENT[:, i]
        fp = np.array(_apply_Mw_raw(tuple(w + h * b), p))
        fm = np.array(_apply_Mw_raw(tuple(w - h * b), p))
        cols.append((fp - fm) / (2.0 * h))
    A = np.column_stack(cols)
    C, *_ = np.linalg.lstsq(_W_TANGENT, A, rcond=None)
    return np.linalg.eigvals(C)


@dataclass
class WeightFixedPointReport:
    point: tuple
    kind: str
    stable: bool
    marginal: bool
    leading_eigenvalue_modulus: float
    residual: float


def _w_report(point, kind, p, margin=1e-8):
    nxt = apply_Mw(point, p)
    residual = max(abs(nxt[i] - point[i]) for i in range(3))
    lead = float(np.max(np.abs(_weight_tangent_eigenvalues(point, p))))
    return WeightFixedPointReport(
        point=point,
        kind=kind,
        stable=lead < 1.0 - margin,
        marginal=abs(lead - 1.0) <= margin,
        leading_eigenvalue_modulus=lead,
        residual=residual,
    )


def replica_fixed_points(p, margin=1e-8):
    """All fixed points of the weight recursion at this p, with stability."""
    out = [
        _w_report((1.0, 0.0, 0.0), "encoding-F", p, margin),
        _w_report((0.0, 0.0, 1.0), "encoding-RF", p, margin),
        _w_report(qd_weight_fixed_point(p), "QD", p, margin),
    ]
    for pt in intermediate_weight_fixed_points(p):
        out.append(_w_report(pt, "intermediate", p, margin))
    return out


def annealed_purities(w):
    """Contract weights with the operator inner products.

    purity_F is proportional to (4 w_sigma + 2 w_nu + 2 w_tau)/4 and
    purity_RF to (2 w_sigma + 2 w_nu + 4 w_tau)/4; the common scale factor
    cancels in ratios, which is all anything downstream uses.
    """
    ws, wn, wt = w
    pf = (4.0 * ws + 2.0 * wn + 2.0 * wt) / 4.0
    prf = (2.0 * ws + 2.0 * wn + 4.0 * wt) / 4.0
    return (pf, prf)


def annealed_I2(p, f, t=None, tol=1e-13, max_steps=100000):
    """Annealed mutual information between the reference and the readable
    fraction f, at finite t or (t=None) at the attractor."""
    w0 = weights_initial_condition(f)
    if t is None:
        w, _, _ = weights_limit(w0, p, tol=tol, max_steps=max_steps)
    else:
        w = iterate_weights(w0, p, t)[-1]
    pf, prf = annealed_purities(w)
    return math.log2(prf) - math.log2(pf) + 1.0


def _classify_attractor(f, p, atol=1e-8, budget=20000, max_budget=1000000):
    """Label the attractor reached from the leaf weights: 'QD' or 'encoding'.

    Escalates the iteration budget (doubling) while the iterate is not yet
    within atol of a fixed point; falls back to whichever is nearer at the
    final budget.
    """
    qd = qd_weight_fixed_point(p)
    w = weights_initial_condition(f)
    steps_done = 0
    current = budget
    while True:
        for _ in range(current - steps_done):
            w = apply_Mw(w, p)
        steps_done = current
        d_qd = max(abs(w[i] - qd[i]) for i in range(3))
        d_enc = min(
            max(abs(w[i] - v[i]) for i in range(3))
            for v in ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))
        )
        if d_qd < atol:
            return "QD"
        if d_enc < atol:
            return "encoding"
        if current >= max_budget:
            return "QD" if d_qd < d_enc else "encoding"
        current = min(2 * current, max_budget)


def compute_pc(f, tol=1e-7):
    """Threshold p_c(f) between the redundant and encoding attractors.

    Bisection in p over (3/4, p_l) on the attractor classification of the
    iteration started from the leaf weights.  Symmetric under f <-> 1 - f;
    f = 1/2 is the tangency point and returns p_l directly.
    """
    if not 0.0 < f < 1.0:
        raise ValueError("f must be in (0, 1)")
    if f == 0.5:
        return P_L
    lo, hi = 0.75 + 1e-9, P_L - 1e-9
    if _classify_attractor(f, lo) != "QD":
        return lo
    if _classify_attractor(f, hi) != "encoding":
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _classify_attractor(f, mid) == "QD":
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
