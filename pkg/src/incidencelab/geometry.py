"""Delta-scale geometric primitives.

Object types for thickened curves at a common scale delta (discs, circle
annuli, sine-wave strips, balls, light-plane slabs), strict intersection
predicates, and the parameter-space duality transforms between them.

Conventions used throughout:

* All intersection predicates are strict at the dilated threshold, e.g. a
  disc of radius delta meets an annulus of thickness delta iff the
  centre-to-circle gap is < 2*delta.  Constants in downstream inequalities
  absorb the factor-2 convention; strictness keeps decisions stable under
  exact arithmetic on dyadic inputs.
* The sine-strip predicate uses the horizontal window [theta0 - r, theta0 + r]
  and a vertical tolerance rather than true Euclidean distance to the curve.
  Both are equivalent up to an absolute constant because the centre curves
  have slope at most 1/sqrt(2) for parameters in the unit ball, and the
  window form is exactly computable from the closed-form sinusoid range.
* The theta domain of a sine strip is the interval [0, 2*pi], not the
  quotient circle.  Light-plane angles live in [0, 2*pi); wraparound arc
  distance is used only by the broad-incidence machinery.
* Experiments place object parameters on the lattice (delta/16)*Z so that
  predicate decisions stay clear of thresholds in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Scale:
    """Common scale of one experiment; all objects in it share one delta."""

    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def lattice(self) -> float:
        """Spacing of the placement lattice (delta/16)*Z."""
        return self.delta / 16.0

    def snap(self, x):
        """Snap a float or array to the placement lattice."""
        h = self.lattice
        return np.round(np.asarray(x, dtype=float) / h) * h


@dataclass(frozen=True)
class Disc2:
    """Disc in the plane; radius equals the ambient delta."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disc radius must be positive")


@dataclass(frozen=True)
class CircleAnnulus:
    """Thickened circle: centre, radius in [1, 2], thickness delta."""

    center: tuple[float, float]
    radius: float
    thickness: float

    def __post_init__(self):
        if not (1.0 <= self.radius <= 2.0):
            raise ValueError(f"annulus radius must lie in [1, 2], got {self.radius}")
        if self.thickness <= 0.0:
            raise ValueError("annulus thickness must be positive")


@dataclass(frozen=True)
class SineWaveStrip:
    """Thickened sine-wave graph theta -> (a cos theta + b sin theta + c)/sqrt(2).

    The graph domain is [0, 2*pi] and the parameter point (a, b, c) lies in
    the closed unit ball of R^3, which caps the centre-curve slope at
    1/sqrt(2).
    """

    a: float
    b: float
    c: float
    thickness: float

    def __post_init__(self):
        if self.a * self.a + self.b * self.b + self.c * self.c > 1.0 + 1e-12:
            raise ValueError("sine-strip parameters must lie in the unit ball")
        if self.thickness <= 0.0:
            raise ValueError("strip thickness must be positive")

    @property
    def params(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def height(self, theta):
        th = np.asarray(theta, dtype=float)
        return (self.a * np.cos(th) + self.b * np.sin(th) + self.c) / SQRT2


@dataclass(frozen=True)
class Ball3:
    """Ball in R^3; radius is delta or a recorded dilate of it."""

    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("ball radius must be positive")


@dataclass(frozen=True)
class LightPlaneSlab:
    """Thickened light plane {p : |<p, gamma(theta)> - offset| < thickness}.

    gamma(theta) = (cos theta, sin theta, 1)/sqrt(2) is the unit normal, so
    the slab is the Euclidean `thickness`-neighbourhood of the plane at
    signed distance `offset` from the origin.
    """

    theta: float
    offset: float
    thickness: float

    def __post_init__(self):
        if not (0.0 <= self.theta < TWO_PI + 1e-12):
            raise ValueError("slab angle must lie in [0, 2*pi)")
        if self.thickness <= 0.0:
            raise ValueError("slab thickness must be positive")


def gamma(theta):
    """Unit normal direction (cos theta, sin theta, 1)/sqrt(2); |gamma| = 1."""
    th = np.asarray(theta, dtype=float)
    out = np.stack([np.cos(th), np.sin(th), np.ones_like(th)], axis=-1)
    return out / SQRT2


# ---------------------------------------------------------------------------
# sinusoid range


def _interval_contains_angle(lo, hi, target):
    """True where some target + 2*pi*k lies in [lo, hi] (elementwise)."""
    lo = np.asarray(lo, dtype=float)
    k_min = np.ceil((lo - target) / TWO_PI)
    return target + TWO_PI * k_min <= np.asarray(hi, dtype=float)


def sine_range_arrays(a, b, c, lo, hi):
    """Exact (min, max) of (a cos t + b sin t + c)/sqrt(2) on [lo, hi].

    Broadcasts over numpy inputs.  Written as R*cos(t - phi), the extrema are
    attained either at the endpoints or where t hits phi (max) or phi + pi
    (min) inside the interval.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    amp = np.hypot(a, b)
    phi = np.arctan2(b, a)
    cos_lo = np.cos(lo - phi)
    cos_hi = np.cos(hi - phi)
    cos_max = np.where(_interval_contains_angle(lo, hi, phi), 1.0, np.maximum(cos_lo, cos_hi))
    cos_min = np.where(
        _interval_contains_angle(lo, hi, phi + math.pi), -1.0, np.minimum(cos_lo, cos_hi)
    )
    return (amp * cos_min + c) / SQRT2, (amp * cos_max + c) / SQRT2


def sine_range(strip: SineWaveStrip, lo: float, hi: float) -> tuple[float, float]:
    """Exact range of the centre curve of `strip` on [lo, hi] (lo <= hi)."""
    if lo > hi:
        raise ValueError("need lo <= hi")
    mn, mx = sine_range_arrays(strip.a, strip.b, strip.c, lo, hi)
    return float(mn), float(mx)


# ---------------------------------------------------------------------------
# intersection predicates (scalar; the counting engine has vector twins)


def disc_meets_annulus(d: Disc2, b: CircleAnnulus) -> bool:
    """Strict test for open-disc / open-annulus intersection.

    Equivalent to | |y - x_B| - t_B | < radius + thickness, which is exactly
    nonempty intersection of the two open sets.
    """
    gap = math.hypot(d.center[0] - b.center[0], d.center[1] - b.center[1]) - b.radius
    return abs(gap) < d.radius + b.thickness


def disc_meets_sinestrip(d: Disc2, s: SineWaveStrip) -> bool:
    """True iff some theta in [theta0 - r, theta0 + r] (within [0, 2*pi]) has
    |y0 - curve(theta)| < r + thickness, decided via the exact sinusoid range."""
    theta0, y0 = d.center
    lo = max(0.0, theta0 - d.radius)
    hi = min(TWO_PI, theta0 + d.radius)
    if lo > hi:
        return False
    mn, mx = sine_range(s, lo, hi)
    tol = d.radius + s.thickness
    return (mn - tol) < y0 < (mx + tol)


def ball_meets_slab(b: Ball3, t: LightPlaneSlab) -> bool:
    g = gamma(t.theta)
    dist = abs(float(np.dot(np.asarray(b.center, dtype=float), g)) - t.offset)
    return dist < t.thickness + b.radius


def disc_meets_annulus_arc(d: Disc2, b: CircleAnnulus, arc_lo: float, arc_hi: float) -> bool:
    """Strict test for the disc against one angular piece of the annulus.

    The piece is {x_B + t*e(phi) : phi in [arc_lo, arc_hi], |t - t_B| <= thickness};
    the disc meets it iff the distance from the disc centre to the (closed)
    piece is < d.radius.  The nearest point lies radially inside the angular
    range, or on the radial edge segment at the nearer angular endpoint.
    """
    dx = d.center[0] - b.center[0]
    dy = d.center[1] - b.center[1]
    r = math.hypot(dx, dy)
    phi = math.atan2(dy, dx) % TWO_PI
    gap = _circular_gap_to_interval(phi, arc_lo % TWO_PI, arc_hi - arc_lo)
    if gap <= 0.0:
        dist = max(0.0, abs(r - b.radius) - b.thickness)
    else:
        t_near = min(max(r * math.cos(gap), b.radius - b.thickness), b.radius + b.thickness)
        dist = math.sqrt(max(0.0, r * r + t_near * t_near - 2.0 * r * t_near * math.cos(gap)))
    return dist < d.radius


def _circular_gap_to_interval(phi: float, lo: float, width: float) -> float:
    """Circular distance from angle phi to the closed arc [lo, lo + width]."""
    rel = (phi - lo) % TWO_PI
    if rel <= width:
        return 0.0
    return min(rel - width, TWO_PI - rel)


# ---------------------------------------------------------------------------
# duality transforms


def dual_circle_to_ball(b: CircleAnnulus, dilation: float = 1.0) -> Ball3:
    """Annulus (centre x, radius t) -> ball at (x, t) with radius dilation*delta."""
    return Ball3((b.center[0], b.center[1], b.radius), dilation * b.thickness)


def dual_sine_to_ball(s: SineWaveStrip, dilation: float = 1.0) -> Ball3:
    """Sine strip with parameters (a, b, c) -> ball at (a, b, c).

    dilation=10 is the convention used when pairing with `dual_disc_to_slab`,
    which emits slabs of thickness 10*delta.
    """
    return Ball3(s.params, dilation * s.thickness)


def dual_disc_to_slab(d: Disc2) -> LightPlaneSlab:
    """Disc centred at (theta, t) -> slab of thickness 10*delta, normal gamma(theta).

    The slab offset along the unit normal equals t: the dual point z of any
    sine strip satisfies <z, gamma(theta)> = curve_z(theta), so this is the
    unique offset making strip-disc incidences carry over to ball-slab
    incidences at the dilated thickness.
    """
    theta, t = d.center
    return LightPlaneSlab(theta % TWO_PI, t, 10.0 * d.radius)


def dual_slab_to_disc(t: LightPlaneSlab, delta: float | None = None) -> Disc2:
    """Slab -> disc at the parameter point (theta, offset)."""
    r = t.thickness if delta is None else delta
    return Disc2((t.theta, t.offset), r)
