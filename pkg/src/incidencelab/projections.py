"""Restricted projections, covering numbers, and curvature checks.

Two scalar projections of R^3 are provided: pairing with the unit direction
gamma(theta) = (cos theta, sin theta, 1)/sqrt(2), and pairing with the
moment-curve vector (1, theta, theta^2).  Covering numbers of value sets are
computed exactly by the greedy sweep, which is optimal in one dimension.
The module also runs the rational-grid experiment that realises anomalously
small projection covers along rational angles, estimates box-counting
dimension by log-log slope, and evaluates the two curvature determinants of
a curve family's defining function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import SQRT2
from .setgen import PointCloud, RationalAngles, jarnik_n, make_rational_angles

MOMENT = "pi"
LIGHT = "rho"


def project(kind: str, theta: float, cloud) -> np.ndarray:
    """Scalar projection values of a 3-d cloud (or (n,3) array).

    kind 'rho' pairs with the unit vector gamma(theta); kind 'pi' pairs with
    (1, theta, theta^2).
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    pts = pts.reshape(-1, 3)
    if kind == LIGHT:
        v = np.array([math.cos(theta), math.sin(theta), 1.0]) / SQRT2
    elif kind == MOMENT:
        v = np.array([1.0, theta, theta * theta])
    else:
        raise ValueError(f"unknown projection kind {kind!r}")
    return pts @ v


def covering_number(values, delta: float) -> int:
    """Minimal number of closed length-2*delta intervals covering the values.

    Greedy left-to-right placement on the sorted values is optimal in 1-d.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        return 0
    count = 1
    anchor = v[0]
    for x in v[1:]:
        if x - anchor > 2.0 * delta:
            count += 1
            anchor = x
    return count


# ---------------------------------------------------------------------------
# rational-grid experiment


@dataclass
class JarnikRow:
    theta_p: int
    theta_q: int
    covering: int
    n_values: int
    bound: float
    ratio: float


@dataclass
class JarnikResult:
    t: float
    s: float
    epsilon: float
    n: int
    delta: float
    alpha: float
    angles: RationalAngles
    rows: list[JarnikRow]

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    @property
    def value_count_cap(self) -> float:
        """Cardinality cap 4*n^(1 + 3*alpha/t) + 1 on each exact value set."""
        return 4.0 * self.n ** (1.0 + 3.0 * self.alpha / self.t) + 1.0


def rational_projection_values(n: int, p: int, q: int) -> np.ndarray:
    """Exact value set of the moment projection of the (1/n)-grid at theta=p/q.

    Over the grid {(k/n, l/n, m/n)} the projection is
    (k*q^2 + l*p*q + m*p^2)/(n*q^2); the distinct numerators are built by two
    exact integer sumsets, never materialising the (n+1)^3 grid.
    """
    base = np.arange(n + 1, dtype=np.int64)
    s12 = np.unique(np.add.outer(base * (q * q), base * (p * q)).ravel())
    nums = np.unique(np.add.outer(s12, base * (p * p)).ravel())
    return nums.astype(float) / float(n * q * q)


def run_jarnik_experiment(t: float, s: float, epsilon: float, n_j: int) -> JarnikResult:
    """Covering counts of the rational-angle projections against n^(1+3*alpha/t).

    For every admissible theta = p/q the exact value set of the moment
    projection is enumerated, covered at scale delta = n^(-3/t), and compared
    with the predicted cover size; the fitted constant is the max ratio.
    """
    angles = make_rational_angles(t, s, epsilon, n_j)
    n, delta, alpha = angles.n, angles.delta, angles.alpha
    bound = n ** (1.0 + 3.0 * alpha / t)
    rows = []
    for p, q in angles.fractions:
        vals = rational_projection_values(n, p, q)
        cov = covering_number(vals, delta)
        rows.append(
            JarnikRow(
                theta_p=p,
                theta_q=q,
                covering=cov,
                n_values=int(vals.size),
                bound=bound,
                ratio=cov / bound,
            )
        )
    return JarnikResult(t=t, s=s, epsilon=epsilon, n=n, delta=delta, alpha=alpha, angles=angles, rows=rows)


# ---------------------------------------------------------------------------
# curvature determinants


@dataclass
class CinematicFn:
    """Defining function g(x1, x2, y1, t) of a curve family y2 = g(x, y1, t).

    `partials`, when given, must return the tuple
    (g_x1, g_x2, g_t, g_x1y1, g_x2y1, g_ty1, g_x1y1y1, g_x2y1y1, g_ty1y1);
    otherwise all are taken by central finite differences with step 1e-4
    (truncation O(1e-8), adequate for O(1) determinant targets).
    """

    g: Callable[[float, float, float, float], float]
    partials: Callable[[float, float, float, float], tuple] | None = None
    fd_step: float = 1e-4


def builtin_sine_g() -> CinematicFn:
    """Sine-wave family: g = (x1 cos y1 + x2 sin y1 + t)/sqrt(2), exact partials."""

    def g(x1, x2, y1, t):
        return (x1 * math.cos(y1) + x2 * math.sin(y1) + t) / SQRT2

    def partials(x1, x2, y1, t):
        c, s = math.cos(y1) / SQRT2, math.sin(y1) / SQRT2
        return (c, s, 1.0 / SQRT2, -s, c, 0.0, -c, -s, 0.0)

    return CinematicFn(g=g, partials=partials)


def circle_g() -> CinematicFn:
    """Circle family through upper semicircles: g = x2 + sqrt(t^2 - (y1 - x1)^2)."""

    def g(x1, x2, y1, t):
        return x2 + math.sqrt(t * t - (y1 - x1) ** 2)

    return CinematicFn(g=g)


def _fd_partials(fn: CinematicFn, x1, x2, y1, t):
    g, h = fn.g, fn.fd_step

    def d(f, var):
        e = [0.0, 0.0, 0.0, 0.0]
        e[var] = h
        return lambda a, b, c, dd: (
            f(a + e[0], b + e[1], c + e[2], dd + e[3]) - f(a - e[0], b - e[1], c - e[2], dd - e[3])
        ) / (2.0 * h)

    gx1, gx2, gt = d(g, 0), d(g, 1), d(g, 3)
    gx1y1, gx2y1, gty1 = d(gx1, 2), d(gx2, 2), d(gt, 2)
    gx1y1y1, gx2y1y1, gty1y1 = d(gx1y1, 2), d(gx2y1, 2), d(gty1, 2)
    args = (x1, x2, y1, t)
    return tuple(f(*args) for f in (gx1, gx2, gt, gx1y1, gx2y1, gty1, gx1y1y1, gx2y1y1, gty1y1))


def cinematic_check(fn: CinematicFn, x: tuple[float, float], y1: float, t: float) -> tuple[float, float]:
    """(rotational, cinematic) determinants of the defining function at a point.

    rotational = g_x1*g_x2y1 - g_x2*g_x1y1; cinematic is the 3x3 determinant
    with rows (g_x1, g_x2, g_t) and its first and second y1-derivatives.
    Both must be nonzero for a cinematic family.
    """
    vals = (fn.partials or (lambda *a: _fd_partials(fn, *a)))(x[0], x[1], y1, t)
    gx1, gx2, gt, gx1y1, gx2y1, gty1, gx1y1y1, gx2y1y1, gty1y1 = vals
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("non-finite derivative evaluation")
    rotational = gx1 * gx2y1 - gx2 * gx1y1
    cinematic = float(
        np.linalg.det(
            np.array(
                [
                    [gx1, gx2, gt],
                    [gx1y1, gx2y1, gty1],
                    [gx1y1y1, gx2y1y1, gty1y1],
                ]
            )
        )
    )
    return rotational, cinematic


# ---------------------------------------------------------------------------
# box-counting dimension


def box_dimension_estimate(cloud: PointCloud, scales) -> tuple[float, float, float]:
    """Least-squares slope of log2(cell count) against log2(1/delta).

    Returns (slope, intercept, rms residual); cell counts are exact via
    integer grid hashing.
    """
    scales = np.asarray(scales, dtype=float)
    xs, ys = [], []
    for d in scales:
        cells = np.unique(np.floor(cloud.points / d).astype(np.int64), axis=0)
        xs.append(math.log2(1.0 / d))
        ys.append(math.log2(max(1, cells.shape[0])))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((np.polyval([slope, intercept], xs) - ys) ** 2)))
    return float(slope), float(intercept), resid
