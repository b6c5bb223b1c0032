"""Exact counting of plain, trilinear and broad incidences.

Two interchangeable counting paths are provided.  The brute path evaluates
the exact predicate on every curve/disc pair in vectorised chunks.  The
indexed path buckets disc (or ball) centres into cells of side 4*delta,
keeps only the occupied cells, filters curve/cell pairs with a conservative
test dilated by the cell diameter, and then applies the exact predicate to
the surviving candidates only.  The filter never discards an incident pair,
so the two paths agree exactly; equivalence is enforced by the test suite on
randomised instances.

Counting parallelises over curves; reports are merged in curve order so
results are identical at any thread count.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import (
    TWO_PI,
    Ball3,
    CircleAnnulus,
    Disc2,
    LightPlaneSlab,
    SineWaveStrip,
    gamma,
    sine_range_arrays,
)

_CELL_FACTOR = 4.0
_FILTER_CHUNK = 1 << 22


@dataclass(frozen=True)
class IncidenceReport:
    total: int
    per_curve: np.ndarray
    elapsed: float
    method: str

    def __post_init__(self):
        if int(self.per_curve.sum()) != self.total:
            raise ValueError("per-curve counts do not sum to total")


@dataclass(frozen=True)
class TriParams:
    """Separation threshold for trilinear counting."""

    kappa: float

    def __post_init__(self):
        if not (0.0 < self.kappa <= TWO_PI):
            raise ValueError("kappa must lie in (0, 2*pi]")


@dataclass(frozen=True)
class BroadParams:
    """Number of excluded directions and the arc scale (arcs of diameter 1/R)."""

    n_directions: int
    arc_scale: float

    def __post_init__(self):
        if self.n_directions < 1:
            raise ValueError("need at least one excluded direction")
        if self.arc_scale < 1.0:
            raise ValueError("arc scale R must be >= 1")


# ---------------------------------------------------------------------------
# family introspection


@dataclass(frozen=True)
class _Fam:
    kind: str  # circle | sine | slab
    curve_data: tuple
    disc_data: tuple
    n_curves: int
    n_discs: int
    delta: float


def _uniform(vals, what):
    arr = np.asarray(vals, dtype=float)
    if arr.size == 0:
        return 0.0
    if not np.all(np.abs(arr - arr[0]) <= 1e-12 * max(1.0, abs(arr[0]))):
        raise ValueError(f"mismatched scales: {what} not uniform across the family")
    return float(arr[0])


def _check_scales(curve_thick: float, disc_rad: float):
    if curve_thick == 0.0 or disc_rad == 0.0:
        return
    ratio = curve_thick / disc_rad
    for ok in (1.0, 10.0, 0.1):
        if abs(ratio - ok) <= 1e-9:
            return
    raise ValueError("mismatched scales between curve and disc families")


def _extract(curves, discs) -> _Fam:
    if len(curves) == 0 and len(discs) == 0:
        return _Fam("circle", ((), (), 0.0), ((), 0.0), 0, 0, 1e-3)
    c0 = curves[0] if len(curves) else None
    d0 = discs[0] if len(discs) else None

    if (c0 is None or isinstance(c0, CircleAnnulus)) and (d0 is None or isinstance(d0, Disc2)):
        bc = np.array([a.center for a in curves], dtype=float).reshape(-1, 2)
        br = np.array([a.radius for a in curves], dtype=float)
        bt = _uniform([a.thickness for a in curves], "annulus thickness") if len(curves) else 0.0
        dc = np.array([d.center for d in discs], dtype=float).reshape(-1, 2)
        dr = _uniform([d.radius for d in discs], "disc radius") if len(discs) else 0.0
        _check_scales(bt, dr)
        delta = min(x for x in (bt, dr) if x > 0.0)
        return _Fam("circle", (bc, br, bt), (dc, dr), len(curves), len(discs), delta)

    if (c0 is None or isinstance(c0, SineWaveStrip)) and (d0 is None or isinstance(d0, Disc2)):
        abc = np.array([s.params for s in curves], dtype=float).reshape(-1, 3)
        st = _uniform([s.thickness for s in curves], "strip thickness") if len(curves) else 0.0
        dc = np.array([d.center for d in discs], dtype=float).reshape(-1, 2)
        dr = _uniform([d.radius for d in discs], "disc radius") if len(discs) else 0.0
        _check_scales(st, dr)
        delta = min(x for x in (st, dr) if x > 0.0)
        return _Fam("sine", (abc, st), (dc, dr), len(curves), len(discs), delta)

    if (c0 is None or isinstance(c0, LightPlaneSlab)) and (d0 is None or isinstance(d0, Ball3)):
        th = np.array([s.theta for s in curves], dtype=float)
        off = np.array([s.offset for s in curves], dtype=float)
        st = _uniform([s.thickness for s in curves], "slab thickness") if len(curves) else 0.0
        bc = np.array([b.center for b in discs], dtype=float).reshape(-1, 3)
        brad = _uniform([b.radius for b in discs], "ball radius") if len(discs) else 0.0
        _check_scales(st, brad)
        delta = min(x for x in (st, brad) if x > 0.0)
        return _Fam("slab", (th, off, st), (bc, brad), len(curves), len(discs), delta)

    raise ValueError("mismatched family kinds")


# ---------------------------------------------------------------------------
# exact pair predicates on index arrays


def _exact_pairs_mask(fam: _Fam, ci: np.ndarray, di: np.ndarray) -> np.ndarray:
    if fam.kind == "circle":
        (bc, br, bt), (dc, dr) = fam.curve_data, fam.disc_data
        d = np.hypot(*(dc[di] - bc[ci]).T)
        return np.abs(d - br[ci]) < dr + bt
    if fam.kind == "sine":
        (abc, st), (dc, dr) = fam.curve_data, fam.disc_data
        th, y = dc[di, 0], dc[di, 1]
        lo = np.maximum(0.0, th - dr)
        hi = np.minimum(TWO_PI, th + dr)
        mn, mx = sine_range_arrays(abc[ci, 0], abc[ci, 1], abc[ci, 2], lo, hi)
        tol = dr + st
        return (lo <= hi) & (y > mn - tol) & (y < mx + tol)
    (th, off, st), (bc, brad) = fam.curve_data, fam.disc_data
    g = gamma(th[ci])
    dist = np.abs((bc[di] * g).sum(axis=1) - off[ci])
    return dist < st + brad


# ---------------------------------------------------------------------------
# brute force


def brute_force_incidences(curves, discs, threads: int = 1) -> IncidenceReport:
    """Reference O(|P|*|T|) count; evaluates the exact predicate on all pairs."""
    t0 = time.perf_counter()
    fam = _extract(curves, discs)
    per_curve = np.zeros(fam.n_curves, dtype=np.int64)
    if fam.n_curves and fam.n_discs:
        chunk = max(1, _FILTER_CHUNK // max(1, fam.n_discs))

        def work(lo):
            hi = min(lo + chunk, fam.n_curves)
            ci = np.repeat(np.arange(lo, hi), fam.n_discs)
            di = np.tile(np.arange(fam.n_discs), hi - lo)
            mask = _exact_pairs_mask(fam, ci, di)
            return lo, hi, mask.reshape(hi - lo, fam.n_discs).sum(axis=1)

        for lo, hi, counts in _run_chunks(work, range(0, fam.n_curves, chunk), threads):
            per_curve[lo:hi] = counts
    return IncidenceReport(
        total=int(per_curve.sum()),
        per_curve=per_curve,
        elapsed=time.perf_counter() - t0,
        method="brute",
    )


def _run_chunks(work, starts, threads):
    starts = list(starts)
    if threads <= 1 or len(starts) <= 1:
        return [work(lo) for lo in starts]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(work, starts))


# ---------------------------------------------------------------------------
# indexed engine


def _bucket_discs(fam: _Fam, cell: float):
    centers = fam.disc_data[0]
    idx = np.floor(centers / cell).astype(np.int64)
    idx -= idx.min(axis=0)
    strides = np.cumprod(np.append(idx.max(axis=0) + 1, 1)[::-1])[::-1][1:]
    keys = (idx * strides).sum(axis=1)
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]
    ukeys, starts, counts = np.unique(skeys, return_index=True, return_counts=True)
    upos = np.searchsorted(skeys, ukeys)
    cell_centers = (idx[order[upos]] + 0.5) * cell + np.floor(centers / cell).min(axis=0) * cell
    return order, starts, counts, cell_centers


def _cell_filter_mask(fam: _Fam, ci, cell_centers_block, cell: float):
    """Conservative curve-vs-cell test; never rejects a cell holding an incident disc."""
    if fam.kind == "circle":
        (bc, br, bt), (_, dr) = fam.curve_data, fam.disc_data
        pad = dr + bt + cell * math.sqrt(2.0) / 2.0
        d = np.hypot(*(cell_centers_block - bc[ci]).T)
        return np.abs(d - br[ci]) < pad
    if fam.kind == "sine":
        (abc, st), (_, dr) = fam.curve_data, fam.disc_data
        half = dr + cell / 2.0
        lo = np.maximum(0.0, cell_centers_block[:, 0] - half)
        hi = np.minimum(TWO_PI, cell_centers_block[:, 0] + half)
        mn, mx = sine_range_arrays(abc[ci, 0], abc[ci, 1], abc[ci, 2], lo, hi)
        tol = dr + st + cell / 2.0
        y = cell_centers_block[:, 1]
        return (lo <= hi) & (y > mn - tol) & (y < mx + tol)
    (th, off, st), (_, brad) = fam.curve_data, fam.disc_data
    pad = st + brad + cell * math.sqrt(3.0) / 2.0
    g = gamma(th[ci])
    return np.abs((cell_centers_block * g).sum(axis=1) - off[ci]) < pad


def incident_pairs(curves, discs, threads: int = 1):
    """Index arrays (curve_idx, disc_idx) of all incident pairs, indexed engine."""
    fam = _extract(curves, discs)
    return _indexed_pairs(fam, threads)


def _indexed_pairs(fam: _Fam, threads: int):
    if fam.n_curves == 0 or fam.n_discs == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    cell = _CELL_FACTOR * fam.delta
    order, starts, counts, cell_centers = _bucket_discs(fam, cell)
    n_cells = cell_centers.shape[0]
    chunk = max(1, _FILTER_CHUNK // max(1, n_cells))

    def work(lo):
        hi = min(lo + chunk, fam.n_curves)
        ci = np.repeat(np.arange(lo, hi), n_cells)
        cc = np.tile(np.arange(n_cells), hi - lo)
        keep = _cell_filter_mask(fam, ci, cell_centers[cc], cell)
        ci, cc = ci[keep], cc[keep]
        sel = counts[cc]
        tot = int(sel.sum())
        if tot == 0:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        pair_curves = np.repeat(ci, sel)
        base = np.repeat(np.cumsum(sel) - sel, sel)
        pos = np.arange(tot) - base
        pair_discs = order[np.repeat(starts[cc], sel) + pos]
        mask = _exact_pairs_mask(fam, pair_curves, pair_discs)
        return pair_curves[mask], pair_discs[mask]

    results = _run_chunks(work, range(0, fam.n_curves, chunk), threads)
    ci = np.concatenate([r[0] for r in results]) if results else np.empty(0, np.int64)
    di = np.concatenate([r[1] for r in results]) if results else np.empty(0, np.int64)
    return ci, di


def count_incidences(curves, discs, method: str = "indexed", threads: int = 1) -> IncidenceReport:
    """Exact bipartite incidence count; per_curve[i] counts discs meeting curve i."""
    if method == "brute":
        return brute_force_incidences(curves, discs, threads=threads)
    if method != "indexed":
        raise ValueError(f"unknown method {method!r}")
    t0 = time.perf_counter()
    fam = _extract(curves, discs)
    ci, _ = _indexed_pairs(fam, threads)
    per_curve = np.bincount(ci, minlength=fam.n_curves).astype(np.int64)
    return IncidenceReport(
        total=int(per_curve.sum()),
        per_curve=per_curve,
        elapsed=time.perf_counter() - t0,
        method="indexed",
    )


# ---------------------------------------------------------------------------
# trilinear incidences


def separated_ordered_triples(coords: np.ndarray, kappa: float) -> int:
    """Ordered triples from `coords` with pairwise separation >= kappa.

    Sorted, a triple (i <= j <= k) is admissible iff both adjacent gaps are
    >= kappa, so the unordered count is sum_j A(j)*B(j) with A/B counting
    admissible partners below and above; separation forces distinctness, so
    the ordered count is six times that.
    """
    c = np.sort(np.asarray(coords, dtype=float))
    m = c.size
    if m < 3:
        return 0
    below = np.searchsorted(c, c - kappa, side="right")
    above = m - np.searchsorted(c, c + kappa, side="left")
    return 6 * int((below.astype(np.int64) * above.astype(np.int64)).sum())


def _separation_coords(fam_kind: str, group_obj, disc_like, pair_group, pair_obj):
    """Separation coordinate of each incident object, per the family kind."""
    if fam_kind == "circle":
        bc = np.array([a.center for a in group_obj], dtype=float).reshape(-1, 2)
        dc = np.array([d.center for d in disc_like], dtype=float).reshape(-1, 2)
        rel = dc[pair_obj] - bc[pair_group]
        return np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
    if fam_kind == "sine":
        dc = np.array([d.center for d in disc_like], dtype=float).reshape(-1, 2)
        return dc[pair_obj, 0]
    th = np.array([s.theta for s in disc_like], dtype=float)
    return th[pair_obj]


def count_trilinear(P, T, params: TriParams, threads: int = 1) -> float:
    """Sum over P of the cube root of ordered incident triples from T.

    P is the family summed over (annuli, strips, or balls); T supplies the
    triples (discs, or slabs for the ball form).  The separation coordinate
    is the slab angle, the disc's first coordinate (sine case), or the
    angular position of the disc around the annulus centre (circle case, an
    extension of the slab/sine definition).
    """
    if len(P) == 0 or len(T) == 0:
        return 0.0
    if isinstance(P[0], Ball3) and isinstance(T[0], LightPlaneSlab):
        ci, di = incident_pairs(T, P, threads=threads)  # engine groups by slabs
        pair_group, pair_obj = di, ci
        kind = "slab"
    else:
        pair_group, pair_obj = incident_pairs(P, T, threads=threads)
        kind = _extract(P, T).kind
    coords = _separation_coords(kind, P, T, pair_group, pair_obj)
    order = np.argsort(pair_group, kind="stable")
    pg, cs = pair_group[order], coords[order]
    bounds = np.searchsorted(pg, np.arange(len(P) + 1))
    total = 0.0
    for b in range(len(P)):
        lo, hi = bounds[b], bounds[b + 1]
        if hi - lo >= 3:
            total += separated_ordered_triples(cs[lo:hi], params.kappa) ** (1.0 / 3.0)
    return total


# ---------------------------------------------------------------------------
# broad incidences


def arc_count(R: float) -> int:
    """Number of equal arcs in the exact partition at arc scale R."""
    return math.ceil(TWO_PI * R)


def _arc_windows(m: int, kill: float, line_directions: bool, wraparound: bool):
    """All maximal killed-arc masks achievable by a single direction.

    Positions are measured in arc units on a circle of circumference m (or
    the segment [0, m] when wraparound is False); a direction at x kills the
    arcs within distance < kill of x, plus the antipodal window when the
    direction is a full line.  Candidate positions are every point where a
    window edge can cross an arc boundary, plus midpoints between
    consecutive crossings, so every achievable killed set is enumerated;
    masks contained in another are dropped (using a larger killed set never
    hurts the minimiser).
    """
    bounds = np.arange(m + (0 if wraparound else 1), dtype=float)
    crit = [bounds, bounds + kill, bounds - kill]
    if line_directions:
        half = m / 2.0
        crit += [bounds + half, bounds + kill + half, bounds - kill + half]
    crit = np.concatenate(crit)
    crit = np.mod(crit, m) if wraparound else np.clip(crit, 0.0, m)
    crit = np.unique(crit)
    mids = (crit + np.diff(np.append(crit, crit[0] + m if wraparound else m)) / 2.0)
    candidates = np.unique(np.concatenate([crit, np.mod(mids, m) if wraparound else np.clip(mids, 0, m)]))

    masks = set()
    for x in candidates:
        masks.add(_killed_mask(m, x, kill, line_directions, wraparound))
    maximal = []
    for mask in sorted(masks, key=lambda v: -bin(v).count("1")):
        if not any(mask & keep == mask for keep in maximal):
            maximal.append(mask)
    return maximal


def _killed_mask(m: int, x: float, kill: float, line_directions: bool, wraparound: bool) -> int:
    mask = 0
    positions = [x, x + m / 2.0] if line_directions else [x]
    for i in range(m):
        for p in positions:
            if wraparound:
                rel = (p - i) % m
                d = 0.0 if rel <= 1.0 else min(rel - 1.0, m - rel)
            else:
                d = max(i - p, p - (i + 1.0), 0.0)
            if d < kill:
                mask |= 1 << i
                break
    return mask


def broad_profile_value(
    counts,
    n_directions: int,
    arc_scale: float,
    *,
    line_directions: bool,
    wraparound: bool = True,
    mode: str = "exact",
) -> int:
    """min over direction placements of the max surviving arc count.

    Exact mode searches all combinations of maximal killed-windows (complete
    by dominance); greedy mode repeatedly kills the window centred on the
    currently largest arc and upper-bounds the exact value.
    """
    counts = np.asarray(counts, dtype=np.int64)
    m = counts.size
    kill = m / (TWO_PI * arc_scale)
    if mode == "greedy":
        return _broad_greedy(counts, n_directions, kill, line_directions, wraparound)
    if mode != "exact":
        raise ValueError(f"unknown broad mode {mode!r}")
    if n_directions > 4 or m > 64:
        raise ValueError("exact broad search too large")
    masks = _arc_windows(m, kill, line_directions, wraparound)
    order = np.argsort(-counts, kind="stable")
    r = min(n_directions, len(masks))
    best = None
    for combo in itertools.combinations(masks, r):
        u = 0
        for mk in combo:
            u |= mk
        val = 0
        for i in order:
            if not (u >> int(i)) & 1:
                val = int(counts[i])
                break
        if best is None or val < best:
            best = val
            if best == 0:
                break
    return 0 if best is None else best


def _broad_greedy(counts, n_directions, kill, line_directions, wraparound) -> int:
    m = counts.size
    alive = np.ones(m, dtype=bool)
    for _ in range(n_directions):
        if not alive.any():
            break
        live_counts = np.where(alive, counts, -1)
        i = int(np.argmax(live_counts))  # argmax takes the lowest index on ties
        mask = _killed_mask(m, i + 0.5, kill, line_directions, wraparound)
        for j in range(m):
            if (mask >> j) & 1:
                alive[j] = False
    return int(counts[alive].max()) if alive.any() else 0


def broad_profiles(P, T, params: BroadParams, threads: int = 1) -> np.ndarray:
    """Per-curve arc profiles c_tau = I(B_tau, T) (circle) or I(B, T_tau) (sine)."""
    fam = _extract(P, T)
    m = arc_count(params.arc_scale)
    width = TWO_PI / m
    profiles = np.zeros((fam.n_curves, m), dtype=np.int64)
    if fam.n_curves == 0 or fam.n_discs == 0:
        return profiles
    ci, di = _indexed_pairs(fam, threads)
    if ci.size == 0:
        return profiles

    if fam.kind == "circle":
        (bc, br, bt), (dc, dr) = fam.curve_data, fam.disc_data
        rel = dc[di] - bc[ci]
        r = np.hypot(rel[:, 0], rel[:, 1])
        phi = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
        reach = 4.0 * dr  # angular reach of a disc onto arc pieces, conservative
        j_lo = np.floor((phi - reach) / width).astype(np.int64)
        j_hi = np.floor((phi + reach) / width).astype(np.int64)
        for shift in range(int((j_hi - j_lo).max()) + 1):
            j = j_lo + shift
            live = j <= j_hi
            arcs = np.mod(j, m)
            gap = _vec_circular_gap(phi, arcs * width, width)
            t_near = np.clip(r * np.cos(gap), br[ci] - bt, br[ci] + bt)
            d2 = r * r + t_near * t_near - 2.0 * r * t_near * np.cos(gap)
            hit = live & (d2 < dr * dr)
            np.add.at(profiles, (ci[hit], arcs[hit]), 1)
    elif fam.kind == "sine":
        (_, st), (dc, dr) = fam.curve_data, fam.disc_data
        th = dc[di, 0]
        j_lo = np.maximum(0, np.floor((th - dr) / width).astype(np.int64))
        j_hi = np.minimum(m - 1, np.floor((th + dr) / width).astype(np.int64))
        for shift in range(int((j_hi - j_lo).max()) + 1):
            j = j_lo + shift
            live = j <= j_hi
            inside = (th > j * width - dr) & (th < (j + 1) * width + dr)
            hit = live & inside
            np.add.at(profiles, (ci[hit], j[hit]), 1)
    else:
        raise ValueError("broad incidences are defined for circle and sine families")
    return profiles


def _vec_circular_gap(phi, arc_lo, width):
    rel = np.mod(phi - arc_lo, TWO_PI)
    return np.where(rel <= width, 0.0, np.minimum(rel - width, TWO_PI - rel))


def count_broad(
    P,
    T,
    params: BroadParams,
    mode: str = "exact",
    literal: bool = False,
    threads: int = 1,
) -> float:
    """Broad incidence count: sum over curves of the placement-minimised max arc.

    Directions are full lines for circle families (each excludes two
    antipodal arc windows) and points of [0, 2*pi] for sine families.  With
    `literal=True` (sine only) the arc profile is the global one, summed over
    all curves, instead of the per-curve profile.
    """
    fam = _extract(P, T)
    line_dirs = fam.kind == "circle"
    wrap = fam.kind == "circle"
    if literal and fam.kind != "sine":
        raise ValueError("literal broad profile only applies to sine families")
    profiles = broad_profiles(P, T, params, threads=threads)
    if literal:
        glob = profiles.sum(axis=0)
        value = broad_profile_value(
            glob, params.n_directions, params.arc_scale,
            line_directions=line_dirs, wraparound=wrap, mode=mode,
        )
        return float(value * fam.n_curves)
    total = 0
    for row in profiles:
        if row.any():
            total += broad_profile_value(
                row, params.n_directions, params.arc_scale,
                line_directions=line_dirs, wraparound=wrap, mode=mode,
            )
    return float(total)
