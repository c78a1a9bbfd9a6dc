"""Eavesdropping variant of the recursion at p = 1.

Every parent wire carries a random letter permutation; in addition, with
probability r the wire is copied out to a fresh environment qubit, and each
environment qubit is readable with probability f.  Nothing else is readable,
so the iteration always starts from (1, 0, 0, 0, 0).

The flow stays on the slice pi_a = 0, pi_x = pi_y, which reduces the fixed
point condition to a single quadratic in pi_n.  For f = 1 the no-information
weight pi_n* hits zero at r_c = (2 - sqrt(3))/2 (a sharp purification
transition); for any f < 1 it stays strictly positive.
"""

import math
from dataclasses import dataclass

from .recursion import apply_MB, apply_Mu

__all__ = [
    "R_C",
    "EavesdropParams",
    "apply_Me",
    "apply_Mtilde",
    "eavesdrop_step",
    "iterate_eavesdrop",
    "eavesdrop_limit",
    "EavesdropFixedPoint",
    "eavesdrop_fixed_point",
    "scaling_variable",
    "scaled_order_parameter",
    "scaling_reference",
    "scaling_asymptote",
    "scaling_collapse",
]

# location of the f = 1 purification transition
R_C = (2.0 - math.sqrt(3.0)) / 2.0


@dataclass
class EavesdropParams:
    r: float
    f: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0 or not 0.0 <= self.f <= 1.0:
            raise ValueError("r and f must be in [0, 1]")


def apply_Me(pi, f):
    """Average over one eavesdrop event: the copy lands in the readable set
    with probability f (label becomes z: the copied Z is recovered, the X
    content is dephased away), otherwise the copy is lost and the X content
    is still dephased (x, y collapse to n; a collapses to z)."""
    n, z, x, y, a = pi
    keep = 1.0 - f
    return (keep * (n + x + y), f + keep * (z + a), 0.0, 0.0, 0.0)


def apply_Mtilde(pi, params):
    """One generation: the p = 1 recursion step, then with probability r an
    eavesdrop average on the parent wire."""
    psi = apply_Mu(apply_MB(pi), 1.0)
    tapped = apply_Me(psi, params.f)
    r = params.r
    return tuple((1.0 - r) * psi[i] + r * tapped[i] for i in range(5))


def eavesdrop_step(pi, params):
    """apply_Mtilde with renormalization (same unstable sum mode as the
    plain recursion)."""
    v = apply_Mtilde(pi, params)
    s = sum(v)
    return tuple(c / s for c in v)


def iterate_eavesdrop(params, t):
    """Distributions after 0..t generations from (1, 0, 0, 0, 0)."""
    pi = (1.0, 0.0, 0.0, 0.0, 0.0)
    out = [pi]
    for _ in range(t):
        pi = eavesdrop_step(pi, params)
        out.append(pi)
    return out


def eavesdrop_limit(params, tol=1e-12, max_steps=100000):
    """Iterate from (1, 0, 0, 0, 0) until the sup-norm change drops below
    tol.  Returns (pi, steps_taken, converged).  Near r = r_c at f = 1 the
    approach is algebraic, so max_steps matters there."""
    pi = (1.0, 0.0, 0.0, 0.0, 0.0)
    for k in range(1, max_steps + 1):
        nxt = eavesdrop_step(pi, params)
        d = max(abs(nxt[i] - pi[i]) for i in range(5))
        pi = nxt
        if d < tol:
            return pi, k, True
    return pi, max_steps, False


def _pin_star(r, f):
    # no-information weight at the fixed point
    if f == 1.0:
        if r == 1.0:
            return 0.0
        return max(0.0, (4.0 * r * r - 8.0 * r + 1.0) / (1.0 - r))
    A = f * r - 2.0 * r + 1.0
    B = 4.0 * r - 1.0 + 4.0 * f * r - 4.0 * f * r * r
    C = 2.0 * (f - 1.0) * r
    if r == 0.0:
        return 1.0
    disc = B * B - 4.0 * A * C
    if disc < -1e-14:
        raise ArithmeticError("negative discriminant in fixed point quadratic")
    sq = math.sqrt(max(disc, 0.0))
    # stable quadratic formula; C <= 0 guarantees the roots straddle zero
    q = -0.5 * (B + math.copysign(sq, B))
    roots = []
    if A != 0.0:
        roots.append(q / A)
    if q != 0.0:
        roots.append(C / q)
    in_range = [root for root in roots if -1e-12 <= root <= 1.0 + 1e-12]
    if not in_range:
        raise ArithmeticError(f"no fixed point root in [0, 1] at r={r}, f={f}")
    return min(max(max(in_range), 0.0), 1.0)


@dataclass
class EavesdropFixedPoint:
    point: tuple
    purified: bool


def eavesdrop_fixed_point(params):
    """Closed-form fixed point of the eavesdrop recursion.

    Solves (fr - 2r + 1) pi^2 + (4r - 1 + 4fr - 4fr^2) pi + 2(f - 1) r = 0
    for pi_n (for f = 1 the explicit branch max(0, (4r^2 - 8r + 1)/(1 - r))),
    then reconstructs pi_x from the x-component fixed point equation
    pi_x = (1 - r)(1 - pi_n^2) / (3 + 4 (1 - r) pi_n).
    The purified flag marks pi_n = 0 (all initial information lost).
    """
    r, f = params.r, params.f
    n = _pin_star(r, f)
    x = (1.0 - r) * (1.0 - n * n) / (3.0 + 4.0 * (1.0 - r) * n)
    z = 1.0 - n - 2.0 * x
    return EavesdropFixedPoint(point=(n, z, x, x, 0.0), purified=(n == 0.0))


def scaling_variable(r, f):
    """y = sqrt(1 - f) / |r - r_c|."""
    return math.sqrt(1.0 - f) / abs(r - R_C)


def scaled_order_parameter(pin, r):
    """(pi_n* + 4 (r - r_c)) / (4 |r - r_c|)."""
    return (pin + 4.0 * (r - R_C)) / (4.0 * abs(r - R_C))


def scaling_reference(y):
    """Reference curve F(y) = sqrt(y^2 / (4 sqrt(3)) + 1) used by the
    acceptance comparison."""
    return math.sqrt(y * y / (4.0 * math.sqrt(3.0)) + 1.0)


def scaling_asymptote(y):
    """Exact asymptote of the quadratic-root solution in the joint limit
    f -> 1, r -> r_c at fixed y: expanding the root gives
    sqrt(1 + c y^2) with c = r_c / (8 (1 - r_c)) = (2 sqrt(3) - 3)/24."""
    c = R_C / (8.0 * (1.0 - R_C))
    return math.sqrt(1.0 + c * y * y)


def scaling_collapse(f_values, r_values):
    """Cross-tabulate the rescaled order parameter near the transition.

    Returns rows (f, r, y, measured, reference, asymptote) with y the scaling
    variable, measured the rescaled closed-form order parameter, and the two
    comparison curves evaluated at y.
    """
    rows = []
    for f in f_values:
        for r in r_values:
            pin = _pin_star(r, f)
            y = scaling_variable(r, f)
            s = scaled_order_parameter(pin, r)
            rows.append((f, r, y, s, scaling_reference(y), scaling_asymptote(y)))
    return rows
