"""Incidence inequality right-hand sides and dimension-bound calculators.

Every implemented upper bound on incidence counts is a monomial in
(delta, K_P, K_T, |P|, |T|) valid on a region of the exponent plane
(alpha, beta): alpha for the disc/ball family, beta for the curve family.
Slack factors C_eps * delta^-eps are never folded in: all values are
evaluated at C = 1, eps = 0, and empirical verification fits the constant
and compares log-log slopes instead.

The module also evaluates the exponent functions that summarise those
bounds, inverts them into lower bounds for the dimension of point sets
threaded by curve families, and tabulates every such lower-bound formula
(current, prior, conjectured) on the (u, v) parameter square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class TheoremId(str, Enum):
    CIRCLE_LS_LOW = "CIRCLE_LS_LOW"
    CIRCLE_LS_HIGH = "CIRCLE_LS_HIGH"
    CIRCLE_BROAD = "CIRCLE_BROAD"
    SLAB_TRI_KAKEYA = "SLAB_TRI_KAKEYA"
    SLAB_TRI_RESTRICTION = "SLAB_TRI_RESTRICTION"
    CIRCLE_L2_LOW = "CIRCLE_L2_LOW"
    CIRCLE_L2_HIGH = "CIRCLE_L2_HIGH"
    SINE_SMALLCAP_LOW = "SINE_SMALLCAP_LOW"
    SINE_SMALLCAP_HIGH = "SINE_SMALLCAP_HIGH"
    SINE_L2_TABLE = "SINE_L2_TABLE"
    SINE_L2_LAMBDA = "SINE_L2_LAMBDA"
    COROLLARY_TABLE = "COROLLARY_TABLE"


class RegionError(ValueError):
    """Raised when (alpha, beta) violates a bound's validity region."""


def _require(cond: bool, inequality: str):
    if not cond:
        raise RegionError(f"validity region violated: need {inequality}")


def theorem_rhs(
    id: TheoremId | str,
    delta: float,
    alpha: float,
    beta: float,
    k_p: float,
    k_t: float,
    n_p: float,
    n_t: float,
    R: float | None = None,
    kappa: float | None = None,
) -> float:
    """Value of the bound's right-hand side at C = 1, eps = 0.

    K_P/K_T are the curve/disc family non-concentration constants and
    n_p/n_t the family cardinalities.  The two broad bounds include their
    literal R^100 factor.  Raises RegionError outside the validity region,
    naming the violated inequality.
    """
    id = TheoremId(id)
    if id is TheoremId.CIRCLE_LS_LOW or id is TheoremId.SINE_SMALLCAP_LOW:
        _require(3 * alpha + beta <= 7, "3*alpha + beta <= 7")
        return delta**-0.75 * k_p**0.25 * k_t**0.75 * n_p**0.75 * n_t**0.25
    if id is TheoremId.CIRCLE_LS_HIGH or id is TheoremId.SINE_SMALLCAP_HIGH:
        _require(3 * alpha + beta > 7, "3*alpha + beta > 7")
        lam = 4.0 / (3 * alpha + beta - 3)
        return (
            delta ** (-0.75 * lam)
            * k_p ** (lam / 4)
            * k_t ** (3 * lam / 4)
            * n_p ** (1 - lam / 4)
            * n_t ** (1 - 3 * lam / 4)
        )
    if id is TheoremId.CIRCLE_BROAD or id is TheoremId.SLAB_TRI_RESTRICTION:
        _require(3 * alpha + 2 * beta <= 9, "3*alpha + 2*beta <= 9")
        if R is None:
            raise ValueError("broad bound needs the arc scale R")
        return R**100 * delta**-0.5 * k_p ** (1 / 3) * k_t**0.5 * n_p ** (2 / 3) * n_t**0.5
    if id is TheoremId.SLAB_TRI_KAKEYA:
        return k_p ** (1 / 3) * n_p ** (2 / 3) * n_t
    if id is TheoremId.CIRCLE_L2_LOW:
        _require(alpha + beta <= 4, "alpha + beta <= 4")
        return delta**-1.0 * (k_p * k_t) ** 0.5 * (n_p * n_t) ** 0.5
    if id is TheoremId.CIRCLE_L2_HIGH or id is TheoremId.SINE_L2_LAMBDA:
        _require(alpha + beta > 4, "alpha + beta > 4")
        lam = 1.0 / (alpha + beta - 2)
        return delta ** (-2 * lam) * (k_p * k_t) ** lam * (n_p * n_t) ** (1 - lam)
    if id is TheoremId.SINE_L2_TABLE:
        _require(alpha + beta <= 4, "alpha + beta <= 4")
        if beta <= 0.5:
            power = -0.5
        elif beta <= 1.0:
            power = -0.25 - beta / 2
        elif beta <= 2.0:
            power = -0.5 - beta / 4
        else:
            power = -1.0
        return delta**power * (k_p * k_t) ** 0.5 * (n_p * n_t) ** 0.5
    if id is TheoremId.COROLLARY_TABLE:
        return k_p * k_t * delta ** corollary_delta_power(alpha, beta)
    raise ValueError(f"unknown theorem id {id}")


def corollary_delta_power(alpha: float, beta: float) -> float:
    """delta-exponent of the count-free corollary table, by first matching case."""
    a, b = alpha, beta
    if a + b > 4 or 3 * a + b > 7:
        return 1 - a - b
    if 0 <= b <= 0.5 and a < 1 + b:
        return -0.5 - b / 2 - a / 2
    if 0.5 <= b <= 1 and a <= 2 - b:
        return -0.25 - b - a / 2
    if 0.5 <= b <= 1 and 2 - b < a < 1 + b:
        return -0.75 - 3 * b / 4 - a / 4
    if 0 <= b <= 1 and a >= 1 + b:
        return -1 - b
    if 1 <= b <= 2 and a <= 1:
        return -0.5 - 3 * b / 4 - a / 2
    if 1 <= b <= 2 and 1 < a <= (7 - b) / 3:
        return -0.75 - 3 * b / 4 - a / 4
    if 2 <= b <= 2.5 and b - 1 < a <= (7 - b) / 3:
        return -0.75 - 3 * b / 4 - a / 4
    if 2 <= b <= 2.5 and a <= b - 1:
        return -a / 2 - b / 2 - 1
    if 2.5 <= b <= min(3.0, 4.0 - a):
        return -a / 2 - b / 2 - 1
    raise RegionError("validity region violated: (alpha, beta) outside [0,2]x[0,3]")


THEOREM_MEASURE = {
    TheoremId.CIRCLE_LS_LOW: "plain",
    TheoremId.CIRCLE_LS_HIGH: "plain",
    TheoremId.CIRCLE_BROAD: "broad",
    TheoremId.SLAB_TRI_KAKEYA: "tri",
    TheoremId.SLAB_TRI_RESTRICTION: "broad",
    TheoremId.CIRCLE_L2_LOW: "plain",
    TheoremId.CIRCLE_L2_HIGH: "plain",
    TheoremId.SINE_SMALLCAP_LOW: "plain",
    TheoremId.SINE_SMALLCAP_HIGH: "plain",
    TheoremId.SINE_L2_TABLE: "plain",
    TheoremId.SINE_L2_LAMBDA: "plain",
    TheoremId.COROLLARY_TABLE: "plain",
}


# ---------------------------------------------------------------------------
# exponent functions and their inversion


FAMILIES = ("circle_ls", "circle_l2", "sine_smallcap", "circle_broad_g")


def exponent_f(family: str, alpha: float, beta: float) -> float:
    """delta-exponent of the incidence bound for maximal families (eps = 0).

    circle_ls:      max{(alpha + 3*beta + 3)/4, alpha + beta - 1}
    circle_l2:      max{1 + (alpha + beta)/2, alpha + beta - 1}
    sine_smallcap:  alpha + 2*beta/3          (trilinear route)
    circle_broad_g: 1/2 + alpha/2 + 2*beta/3  (broad route, 3a + 2b <= 9)
    """
    if family == "circle_ls":
        return max((alpha + 3 * beta + 3) / 4, alpha + beta - 1)
    if family == "circle_l2":
        return max(1 + (alpha + beta) / 2, alpha + beta - 1)
    if family == "sine_smallcap":
        return alpha + 2 * beta / 3
    if family == "circle_broad_g":
        return 0.5 + alpha / 2 + 2 * beta / 3
    raise ValueError(f"unknown exponent family {family!r}")


def invert_to_dim_bound(family: str, u: float, v: float, tol: float = 1e-9) -> float:
    """Least d in [0, 2] with f(d, v) >= u + v, by bisection (inf if none).

    Each exponent family is nondecreasing in its first argument, so the
    threshold is well defined; the result is the dimension lower bound that
    the family's incidence inequality forces on a (u, v) configuration.
    """
    target = u + v
    if exponent_f(family, 0.0, v) >= target:
        return 0.0
    if exponent_f(family, 2.0, v) < target:
        return math.inf
    lo, hi = 0.0, 2.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if exponent_f(family, mid, v) >= target:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# dimension lower-bound formulas


@dataclass(frozen=True)
class BoundFormula:
    name: str
    value: float
    region: str
    provenance: str  # theorem | prior | conjecture


def _clamp_dim(x: float) -> float:
    return min(2.0, max(0.0, x))


def furstenberg_lower_bounds(u: float, v: float) -> list[BoundFormula]:
    """All dimension lower bounds at (u, v), with case splits applied.

    u is the dimension threaded on each curve (0 < u <= 1), v the dimension
    of the curve family (0 <= v <= 3).  Includes the three current bounds,
    the cinematic-family variant, the two prior bounds, and the conjectured
    min form (flagged conjectural); `best_known` aggregates the
    non-conjectural entries.
    """
    if not (0.0 < u <= 1.0 and 0.0 <= v <= 3.0):
        raise ValueError("(u, v) must lie in (0,1] x [0,3]")
    out = [
        BoundFormula(
            "local_smoothing",
            _clamp_dim(4 * u + v - 3 if 3 * u + v <= 4 else u + 1),
            "4u+v-3 if 3u+v<=4 else u+1",
            "theorem",
        ),
        BoundFormula(
            "broad_trilinear",
            _clamp_dim(2 * u + 2 * v / 3 - 1 if 3 * u + 2 * v <= 6 else u + 1),
            "2u+2v/3-1 if 3u+2v<=6 else u+1",
            "theorem",
        ),
        BoundFormula("trilinear_kakeya", _clamp_dim(u + v / 3), "u+v/3", "theorem"),
        BoundFormula(
            "cinematic_l2",
            _clamp_dim(2 * u + v - 2 if u + v <= 3 else u + 1),
            "2u+v-2 if u+v<=3 else u+1",
            "theorem",
        ),
        BoundFormula(
            "prior_circular",
            _clamp_dim(u + max(v / 3, min(u, v))),
            "u+max{v/3, min{u,v}}",
            "prior",
        ),
        BoundFormula("prior_tangency", _clamp_dim(u + min(u, v)), "u+min{u,v}", "prior"),
        BoundFormula(
            "conjectured_min",
            _clamp_dim(min(u + v, (5 * u + v) / 3, u + 1)),
            "min{u+v, (5u+v)/3, u+1}",
            "conjecture",
        ),
    ]
    best = max(f.value for f in out if f.provenance != "conjecture")
    out.append(BoundFormula("best_known", best, "max of non-conjectural bounds", "theorem"))
    return out


def conjecture_forms_agree(u: float, v: float) -> bool:
    """True iff the piecewise conjecture display equals its three-term min form."""
    if v <= u:
        cases = u + v
    elif 2 * u + v <= 3:
        cases = (5 * u + v) / 3
    else:
        cases = u + 1
    return math.isclose(cases, min(u + v, (5 * u + v) / 3, u + 1), rel_tol=0.0, abs_tol=1e-12)


def exceptional_direction_bound(s: float, t: float) -> float:
    """Conjectured cap max{3s/2 - t/2, 0} on the dimension of angles where a
    t-dimensional set of R^3 projects below dimension s (s <= min(t, 1))."""
    return max(1.5 * s - 0.5 * t, 0.0)


# labelled branch expressions for plot-ready region data
_BRANCHES = (
    ("u+1", lambda u, v: u + 1),
    ("4u+v-3", lambda u, v: 4 * u + v - 3),
    ("2u+2v/3-1", lambda u, v: 2 * u + 2 * v / 3 - 1),
    ("2u+v-2", lambda u, v: 2 * u + v - 2),
    ("u+v", lambda u, v: u + v),
    ("2u", lambda u, v: 2 * u),
    ("u+v/3", lambda u, v: u + v / 3),
)


def best_bound_label(u: float, v: float) -> tuple[str, float]:
    """Best non-conjectural bound and the branch expression achieving it."""
    best = max(f.value for f in furstenberg_lower_bounds(u, v) if f.provenance != "conjecture")
    for name, fn in _BRANCHES:
        if abs(_clamp_dim(fn(u, v)) - best) <= 1e-9:
            return name, best
    return "other", best
