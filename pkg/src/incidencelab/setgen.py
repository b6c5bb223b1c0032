"""Construction of (delta, alpha, K)-sets and their certificates.

A family of points (or of curve parameters) is non-concentrated at exponent
alpha if every ball of radius r >= delta meets at most K*(r/delta)^alpha of
them; K is the non-concentration constant.  This module certifies K with a
proven sandwich and builds the standard realisations: grids, Cantor-type
iterated grids, random thinned sets, the tangent-plank sharpness pair, the
rational-grid projection example, and the dual point set of a sine-wave
family over a set of angles.

The exact supremum defining K ranges over all centres and all radii and is
not computable; `katz_tao_constant` restricts centres to cloud points and
radii to dyadic multiples of delta.  Any ball B(y, r) meeting the cloud is
contained in B(p, 2r) for a cloud point p inside it, and rounding 2r up to a
dyadic radius costs at most another factor 2, so the true constant lies in
[K_lower, 4^alpha * K_lower].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    SQRT2,
    TWO_PI,
    Ball3,
    CircleAnnulus,
    LightPlaneSlab,
    SineWaveStrip,
    gamma,
)


@dataclass(frozen=True)
class PointCloud:
    """Finite delta-separated family of centres with axis-aligned bounds."""

    dim: int
    points: np.ndarray
    delta: float
    bounds: np.ndarray  # shape (dim, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.dim)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float).reshape(self.dim, 2))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def diameter(self) -> float:
        spans = self.bounds[:, 1] - self.bounds[:, 0]
        return float(np.sqrt(np.sum(spans**2)))


@dataclass(frozen=True)
class NonConcentrationCert:
    """Certified sandwich K_lower <= K_true <= K_upper = 4^alpha * K_lower."""

    alpha: float
    k_lower: float
    k_upper: float
    sandwich_factor: float
    r_at_max: float
    n_points: int


@dataclass
class GeneratedFamily:
    """A curve family together with its parameter cloud and certificate."""

    objects: list
    cloud: PointCloud
    cert: NonConcentrationCert | None


def katz_tao_constant(cloud: PointCloud, alpha: float, chunk: int = 512) -> NonConcentrationCert:
    """Certify the non-concentration constant of `cloud` at exponent alpha.

    K_lower maximises count(B(p, r)) / (r/delta)^alpha over cloud points p
    and dyadic radii r = delta * 2^j up to four diameters (the headroom keeps
    the containment argument valid for arbitrarily large balls).
    """
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if cloud.n == 0:
        raise ValueError("empty family")
    pts = cloud.points
    delta = cloud.delta
    diam = max(cloud.diameter(), float(np.ptp(pts, axis=0).max(initial=0.0)))
    j_max = max(0, math.ceil(math.log2(max(4.0 * diam, delta) / delta)))
    radii = delta * 2.0 ** np.arange(j_max + 1)
    r2 = radii**2

    best = 0.0
    best_r = delta
    weights = (radii / delta) ** alpha
    for start in range(0, cloud.n, chunk):
        block = pts[start : start + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        for i, rr in enumerate(r2):
            count = (d2 <= rr).sum(axis=1).max()
            ratio = count / weights[i]
            if ratio > best:
                best = float(ratio)
                best_r = float(radii[i])
    factor = 4.0**alpha
    return NonConcentrationCert(
        alpha=alpha,
        k_lower=best,
        k_upper=factor * best,
        sandwich_factor=factor,
        r_at_max=best_r,
        n_points=cloud.n,
    )


# ---------------------------------------------------------------------------
# grid-type generators


def _unit_bounds(dim: int) -> np.ndarray:
    return np.array([[0.0, 1.0]] * dim)


def _lattice_align(h: float, delta: float) -> float:
    """Round a spacing to the (delta/16) lattice, never below delta."""
    lat = delta / 16.0
    return max(delta, round(h / lat) * lat)


def _axis_positions(lo: float, hi: float, h: float, stride: int) -> np.ndarray:
    m = max(1, math.ceil((hi - lo) / h - 1e-12))
    idx = np.arange(0, m, stride)
    return lo + idx * h


def make_grid_set(
    dim: int,
    alpha: float,
    delta: float,
    bounds: np.ndarray | None = None,
    max_points: int | None = None,
) -> PointCloud:
    """Grid of spacing ~delta^(alpha/dim) over `bounds` (default unit box).

    Per axis over a span S the grid holds ceil(S/h) points at lattice-aligned
    spacing h = max(delta, delta^(alpha/dim) rounded to delta/16).  When
    `max_points` is given, every axis is strided by the smallest integer
    factor bringing the total at or below the cap; the result is a coarser
    grid, still delta-separated and still non-concentrated at alpha.
    """
    if not (0 <= alpha <= dim + 1e-9):
        raise ValueError(f"alpha must lie in [0, {dim}]")
    b = _unit_bounds(dim) if bounds is None else np.asarray(bounds, dtype=float).reshape(dim, 2)
    h = _lattice_align(delta ** (alpha / dim) if alpha > 0 else max(np.ptp(b, axis=1).max(), 1.0), delta)
    counts = [max(1, math.ceil((hi - lo) / h - 1e-12)) for lo, hi in b]
    total = math.prod(counts)
    stride = 1
    if max_points is not None and total > max_points:
        stride = math.ceil((total / max_points) ** (1.0 / dim))
        while math.prod(max(1, -(-c // stride)) for c in counts) > max_points:
            stride += 1
    axes = [_axis_positions(lo, hi, h, stride) for lo, hi in b]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return PointCloud(dim=dim, points=pts, delta=delta, bounds=b)


def grid_cardinality(dim: int, alpha: float, delta: float, bounds: np.ndarray | None = None) -> int:
    """Closed-form unstrided cardinality of `make_grid_set`."""
    b = _unit_bounds(dim) if bounds is None else np.asarray(bounds, dtype=float).reshape(dim, 2)
    h = _lattice_align(delta ** (alpha / dim) if alpha > 0 else max(np.ptp(b, axis=1).max(), 1.0), delta)
    return math.prod(max(1, math.ceil((hi - lo) / h - 1e-12)) for lo, hi in b)


def make_cantor_set(
    dim: int,
    branches: int,
    ratio_denominator: int,
    depth: int,
    ambient_dim: int | None = None,
) -> PointCloud:
    """Self-similar iterated grid realising alpha = log(branches)/log(L).

    Each level-j cell of side L^-j spawns `branches` of its L^dim subcells,
    chosen with maximal spread in row-major order; recursion stops when the
    cell size reaches delta = L^-depth.  branches = L^dim reproduces the
    full grid; branches = 1 degenerates to a single point.
    """
    L = ratio_denominator
    if L < 2:
        raise ValueError("ratio denominator must be >= 2")
    m_cells = L**dim
    if not (1 <= branches <= m_cells):
        raise ValueError(f"branches must lie in [1, {m_cells}]")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    chosen = np.array([math.floor(i * m_cells / branches) for i in range(branches)], dtype=int)
    offsets = np.stack(np.unravel_index(chosen, (L,) * dim), axis=-1).astype(float)

    pts = np.zeros((1, dim))
    for level in range(1, depth + 1):
        shift = offsets * (L ** float(-level))
        pts = (pts[:, None, :] + shift[None, :, :]).reshape(-1, dim)
    delta = L ** float(-depth)
    if ambient_dim is not None and ambient_dim > dim:
        pad = np.zeros((pts.shape[0], ambient_dim - dim))
        pts = np.hstack([pts, pad])
        dim = ambient_dim
    return PointCloud(dim=dim, points=pts, delta=delta, bounds=_unit_bounds(dim))


# ---------------------------------------------------------------------------
# random generator with certificate-driven rejection


def make_random_set(
    dim: int,
    alpha: float,
    delta: float,
    seed: int,
    bounds: np.ndarray | None = None,
    max_points: int | None = None,
    k_cap: float = 16.0,
    attempts: int = 16,
) -> PointCloud:
    """Uniform sample, greedy delta-net thinning, snap, certificate rejection.

    Resamples (with fresh substreams of `seed`) until the certified K_lower
    is at most `k_cap`.  Deterministic given (arguments, seed).
    """
    b = _unit_bounds(dim) if bounds is None else np.asarray(bounds, dtype=float).reshape(dim, 2)
    target = grid_cardinality(dim, alpha, delta, b)
    if max_points is not None:
        target = min(target, max_points)
    sep = 1.125 * delta  # margin so that lattice snapping keeps separation >= delta
    lat = delta / 16.0
    for attempt in range(attempts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
        raw = rng.uniform(b[:, 0], b[:, 1], size=(2 * target + 8, dim))
        kept = _greedy_thin(raw, sep, target)
        pts = np.round(kept / lat) * lat
        cloud = PointCloud(dim=dim, points=pts, delta=delta, bounds=b)
        cert = katz_tao_constant(cloud, alpha)
        if cert.k_lower <= k_cap:
            return cloud
    raise RuntimeError(f"random set rejected {attempts} times (K_lower > {k_cap})")


def _greedy_thin(raw: np.ndarray, sep: float, target: int) -> np.ndarray:
    """Keep points in order, dropping any within `sep` of a kept point."""
    cell = sep
    kept: list[np.ndarray] = []
    buckets: dict[tuple, list[int]] = {}
    neighbor_shifts = np.array(
        np.meshgrid(*([[-1, 0, 1]] * raw.shape[1]), indexing="ij")
    ).reshape(raw.shape[1], -1).T
    for p in raw:
        key = tuple((p // cell).astype(int))
        ok = True
        for shift in neighbor_shifts:
            nb = buckets.get(tuple(np.asarray(key) + shift))
            if not nb:
                continue
            for j in nb:
                if np.sum((kept[j] - p) ** 2) < sep * sep:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            buckets.setdefault(key, []).append(len(kept))
            kept.append(p)
            if len(kept) >= target:
                break
    return np.array(kept) if kept else np.empty((0, raw.shape[1]))


# ---------------------------------------------------------------------------
# curve families


CIRCLE_CENTER_BOUNDS = np.array([[1.5, 2.5], [0.0, 1.0]])
CIRCLE_RADIUS_BOUNDS = (1.0, 2.0)
SINE_PARAM_HALFWIDTH = 1.0 / math.sqrt(3.0)  # cube inscribed in the unit ball


def make_circle_family(
    beta: float,
    delta: float,
    kind: str = "grid",
    seed: int = 0,
    center_bounds: np.ndarray | None = None,
    max_points: int | None = None,
    certify: bool = True,
) -> GeneratedFamily:
    """(delta, beta)-set of circle annuli, parameterised by (centre, radius).

    Parameter points live in center_bounds x [1, 2]; the dual cloud is what
    gets certified.  kind is 'grid' or 'random'.
    """
    cb = CIRCLE_CENTER_BOUNDS if center_bounds is None else np.asarray(center_bounds, float)
    bounds = np.vstack([cb, [CIRCLE_RADIUS_BOUNDS]])
    cloud = _param_cloud(3, beta, delta, bounds, kind, seed, max_points)
    annuli = [
        CircleAnnulus((p[0], p[1]), min(2.0, max(1.0, p[2])), delta) for p in cloud.points
    ]
    cert = katz_tao_constant(cloud, beta) if certify else None
    return GeneratedFamily(annuli, cloud, cert)


def make_sine_family(
    beta: float,
    delta: float,
    kind: str = "grid",
    seed: int = 0,
    max_points: int | None = None,
    certify: bool = True,
) -> GeneratedFamily:
    """(delta, beta)-set of sine-wave strips with parameters in the unit ball.

    Grid families use the cube inscribed in the unit ball so the parameter
    constraint |(a,b,c)| <= 1 holds pointwise.
    """
    w = SINE_PARAM_HALFWIDTH
    bounds = np.array([[-w, w]] * 3)
    cloud = _param_cloud(3, beta, delta, bounds, kind, seed, max_points)
    strips = [SineWaveStrip(p[0], p[1], p[2], delta) for p in cloud.points]
    cert = katz_tao_constant(cloud, beta) if certify else None
    return GeneratedFamily(strips, cloud, cert)


def _param_cloud(dim, alpha, delta, bounds, kind, seed, max_points) -> PointCloud:
    if kind == "grid":
        return make_grid_set(dim, alpha, delta, bounds, max_points)
    if kind == "random":
        return make_random_set(dim, alpha, delta, seed, bounds, max_points)
    raise ValueError(f"unknown construction kind {kind!r}")


# ---------------------------------------------------------------------------
# tangent-plank sharpness pair

# Frame of the plank: short axis along the unit normal gamma(0), long axis
# along the tangent light-ray direction ell(0), medium axis horizontal.
# Centred at (0, 0, 1/sqrt(2)), every light plane with angle near 0 passing
# through the centre has constant offset <centre, gamma(theta)> = 1/2.
PLANK_CENTER = np.array([0.0, 0.0, 1.0 / SQRT2])
PLANK_LONG = np.array([-1.0, 0.0, 1.0]) / SQRT2
PLANK_MEDIUM = np.array([0.0, 1.0, 0.0])


def make_plank_sharpness_example(beta: float, delta: float) -> tuple[list[Ball3], list[LightPlaneSlab]]:
    """Ball/slab pair saturating the piecewise sine-wave incidence bound.

    The plank is 1 x delta^(1/2) x delta, tangent to the light cone.  For
    beta in [1/2, 1] the balls form a one-dimensional (delta, beta)-set along
    the long axis; for beta in [1, 2] a full line of ~delta^-1 balls is
    translated ~delta^((1-beta)/2) times at spacing delta^(beta/2) along the
    medium axis.  Slabs are the ~delta^(-1/2) light planes whose normals make
    angle <= delta^(1/2) with the plank normal; their thickness is 10*delta
    so each slab covers the plank entirely and every pair is incident.
    """
    if not (0.5 <= beta <= 2.0):
        raise ValueError("sharpness construction undefined")
    n_slabs = max(1, round(delta**-0.5))
    offsets = (np.arange(n_slabs) - (n_slabs - 1) / 2.0) * delta
    slabs = [LightPlaneSlab(th % TWO_PI, 0.5, 10.0 * delta) for th in offsets]

    if beta <= 1.0:
        n_balls = max(1, round(delta**-beta))
        s = (np.arange(n_balls) - (n_balls - 1) / 2.0) * delta**beta
        centers = PLANK_CENTER[None, :] + s[:, None] * PLANK_LONG[None, :]
    else:
        n_line = max(1, round(1.0 / delta))
        n_med = max(1, round(delta ** ((1.0 - beta) / 2.0)))
        s = (np.arange(n_line) - (n_line - 1) / 2.0) * delta
        m = (np.arange(n_med) - (n_med - 1) / 2.0) * delta ** (beta / 2.0)
        centers = (
            PLANK_CENTER[None, None, :]
            + s[:, None, None] * PLANK_LONG[None, None, :]
            + m[None, :, None] * PLANK_MEDIUM[None, None, :]
        ).reshape(-1, 3)
    balls = [Ball3(tuple(c), delta) for c in centers]
    return balls, slabs


# ---------------------------------------------------------------------------
# rational-grid projection example


def make_jarnik_grid(t: float, n_j: int, max_materialised: int = 2_000_000) -> tuple[PointCloud, float]:
    """Grid {(k/n, l/n, m/n) : 0 <= k,l,m <= n} with n = round(n_j^(2t/3)).

    Returns the cloud and delta = n^(-3/t), at which the grid is a
    (delta, t, C)-set with small C.  Refuses to materialise more than
    `max_materialised` points; `run_jarnik_experiment` avoids materialising
    by working with exact integer value sets.
    """
    if not (0.0 < t < 3.0 + 1e-12):
        raise ValueError("t must lie in (0, 3]")
    n = jarnik_n(t, n_j)
    if (n + 1) ** 3 > max_materialised:
        raise ValueError(f"grid with n={n} is too large to materialise")
    delta = float(n ** (-3.0 / t))
    axis = np.arange(n + 1) / n
    g = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([x.ravel() for x in g], axis=-1)
    cloud = PointCloud(dim=3, points=pts, delta=delta, bounds=_unit_bounds(3))
    return cloud, delta


def jarnik_n(t: float, n_j: int) -> int:
    return max(2, round(n_j ** (2.0 * t / 3.0)))


@dataclass
class RationalAngles:
    """Reduced fractions p/q in (1/4, 3/4) with bounded denominator."""

    thetas: np.ndarray
    fractions: list[tuple[int, int]]
    alpha: float
    n: int
    delta: float
    q_max: int
    raw_count: int


def make_rational_angles(t: float, s: float, epsilon: float, n_j: int) -> RationalAngles:
    """All reduced p/q in (1/4, 3/4) with q <= n^(3*alpha/(2t)), thinned to delta.

    alpha solves s = (t + 3*alpha)/3 + epsilon and must land in (0, 1).  The
    denominator cap n^(3*alpha/(2t)) equals n_j^alpha and drops below 2 for
    small alpha, which would leave no admissible fraction; the cap is floored
    at 2 so the set always contains 1/2.
    """
    if not (t / 3.0 < s <= min(1.0, t)):
        raise ValueError("parameters outside Jarnik regime")
    alpha = s - epsilon - t / 3.0
    if not (0.0 < alpha < 1.0):
        raise ValueError("parameters outside Jarnik regime")
    n = jarnik_n(t, n_j)
    delta = float(n ** (-3.0 / t))
    q_bound = n ** (3.0 * alpha / (2.0 * t))
    q_max = max(2, math.floor(q_bound + 1e-9))
    fractions = []
    for q in range(2, q_max + 1):
        for p in range(math.floor(q / 4.0) + 1, math.ceil(3.0 * q / 4.0)):
            if 4 * p > q and 4 * p < 3 * q and math.gcd(p, q) == 1:
                fractions.append((p, q))
    fractions.sort(key=lambda pq: pq[0] / pq[1])
    raw = len(fractions)
    thinned: list[tuple[int, int]] = []
    last = -math.inf
    for p, q in fractions:
        v = p / q
        if v - last >= delta:
            thinned.append((p, q))
            last = v
    thetas = np.array([p / q for p, q in thinned])
    return RationalAngles(
        thetas=thetas,
        fractions=thinned,
        alpha=alpha,
        n=n,
        delta=delta,
        q_max=q_max,
        raw_count=raw,
    )


# ---------------------------------------------------------------------------
# dual point set of a sine family over a set of angles


@dataclass
class DualPointSet:
    cloud: PointCloud
    raw_count: int
    dedup_count: int


def make_furstenberg_dual(cloud3: PointCloud, thetas, delta: float) -> DualPointSet:
    """Point set {(theta, <z, gamma(theta)>) : theta in thetas, z in cloud3}.

    Values are snapped to the delta-grid and deduplicated; both the raw and
    the deduplicated cardinalities are reported.
    """
    thetas = np.asarray(thetas, dtype=float)
    z = cloud3.points
    heights = (
        z[:, 0][None, :] * np.cos(thetas)[:, None]
        + z[:, 1][None, :] * np.sin(thetas)[:, None]
        + z[:, 2][None, :]
    ) / SQRT2
    pts = np.stack(
        [np.repeat(thetas, z.shape[0]), heights.ravel()],
        axis=-1,
    )
    raw = pts.shape[0]
    snapped = np.round(pts / delta) * delta
    dedup = np.unique(snapped, axis=0)
    lo = dedup.min(axis=0) if dedup.size else np.zeros(2)
    hi = dedup.max(axis=0) if dedup.size else np.ones(2)
    bounds = np.stack([lo, hi + delta], axis=-1)
    cloud = PointCloud(dim=2, points=dedup, delta=delta, bounds=bounds)
    return DualPointSet(cloud=cloud, raw_count=raw, dedup_count=dedup.shape[0])
