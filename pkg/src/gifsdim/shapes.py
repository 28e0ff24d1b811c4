"""Shape primitives used for seeds, neighborhoods, and image enclosures.

Shapes are immutable and live in R^D for D in {1, 2}.  A Ball is an interval
(D=1) or a disk (D=2); a Box is an axis-aligned product of intervals.  All
predicates take an absolute geometric tolerance, default GEOM_TOL, because
exactly tangent configurations occur in the built-in systems (two image disks
of the continued-fraction family touch at a point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UnsupportedShape

GEOM_TOL = 1e-12


@dataclass(frozen=True)
class Ball:
    """Closed ball: interval when len(center) == 1, disk when 2."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius < 0:
            raise ValueError(f"negative radius {self.radius}")

    @property
    def dim(self):
        return len(self.center)

    @property
    def diameter(self):
        return 2.0 * self.radius


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box given by componentwise bounds."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(c) for c in self.lo))
        object.__setattr__(self, "hi", tuple(float(c) for c in self.hi))
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi dimension mismatch")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"empty box {self.lo}..{self.hi}")

    @property
    def dim(self):
        return len(self.lo)

    @property
    def center(self):
        return tuple(0.5 * (l + h) for l, h in zip(self.lo, self.hi))

    @property
    def diameter(self):
        return math.dist(self.lo, self.hi)


def shape_dim(shape):
    return shape.dim


def diameter(shape):
    return shape.diameter


def center_point(shape):
    return tuple(shape.center)


def as_complex(point):
    """View a 2-D point as a complex number (1-D points map to the real line)."""
    if len(point) == 1:
        return complex(point[0], 0.0)
    if len(point) == 2:
        return complex(point[0], point[1])
    raise UnsupportedShape(f"points of dimension {len(point)}")


def from_complex(z, dim):
    if dim == 1:
        return (z.real,)
    return (z.real, z.imag)


def contains_point(shape, point, tol=GEOM_TOL):
    if isinstance(shape, Ball):
        return math.dist(shape.center, point) <= shape.radius + tol
    if isinstance(shape, Box):
        return all(
            l - tol <= x <= h + tol for x, l, h in zip(point, shape.lo, shape.hi)
        )
    raise UnsupportedShape(type(shape).__name__)


def contains_shape(outer, inner, tol=GEOM_TOL):
    """Certified `inner subset of outer` test (conservative: False may mean
    merely unproven for mixed shape kinds)."""
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        return (
            math.dist(outer.center, inner.center) + inner.radius
            <= outer.radius + tol
        )
    if isinstance(outer, Box) and isinstance(inner, Box):
        return all(
            ol - tol <= il and ih <= oh + tol
            for ol, oh, il, ih in zip(outer.lo, outer.hi, inner.lo, inner.hi)
        )
    if isinstance(outer, Box) and isinstance(inner, Ball):
        return all(
            l - tol <= c - inner.radius and c + inner.radius <= h + tol
            for l, h, c in zip(outer.lo, outer.hi, inner.center)
        )
    if isinstance(outer, Ball) and isinstance(inner, Box):
        # All corners inside the ball suffices (balls are convex).
        corners = _corners(inner)
        return all(
            math.dist(outer.center, c) <= outer.radius + tol for c in corners
        )
    raise UnsupportedShape(f"{type(outer).__name__} vs {type(inner).__name__}")


def interior_margin(outer, inner):
    """How deep `inner` sits inside `outer`: the largest delta such that the
    delta-dilation of inner still fits (negative when inner pokes out)."""
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        return outer.radius - (math.dist(outer.center, inner.center) + inner.radius)
    if isinstance(outer, Box) and isinstance(inner, Box):
        return min(
            m
            for ol, oh, il, ih in zip(outer.lo, outer.hi, inner.lo, inner.hi)
            for m in (il - ol, oh - ih)
        )
    if isinstance(outer, Box) and isinstance(inner, Ball):
        return min(
            m
            for l, h, c in zip(outer.lo, outer.hi, inner.center)
            for m in (c - inner.radius - l, h - (c + inner.radius))
        )
    if isinstance(outer, Ball) and isinstance(inner, Box):
        worst = max(math.dist(outer.center, c) for c in _corners(inner))
        return outer.radius - worst
    raise UnsupportedShape(f"{type(outer).__name__} vs {type(inner).__name__}")


def _corners(box):
    if box.dim == 1:
        return [(box.lo[0],), (box.hi[0],)]
    return [
        (box.lo[0], box.lo[1]),
        (box.lo[0], box.hi[1]),
        (box.hi[0], box.lo[1]),
        (box.hi[0], box.hi[1]),
    ]


def separation_gap(a, b):
    """Signed distance between two shapes: positive = certified disjoint by
    that margin, negative = penetration depth of the enclosures."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        return math.dist(a.center, b.center) - (a.radius + b.radius)
    if isinstance(a, Box) and isinstance(b, Box):
        # Largest per-axis gap decides; overlap depth is the smallest overlap.
        gaps = [
            max(bl - ah, al - bh)
            for al, ah, bl, bh in zip(a.lo, a.hi, b.lo, b.hi)
        ]
        return max(gaps)
    if isinstance(a, Box):
        a, b = b, a
    if isinstance(a, Ball) and isinstance(b, Box):
        clamped = tuple(
            min(max(c, l), h) for c, l, h in zip(a.center, b.lo, b.hi)
        )
        return math.dist(a.center, clamped) - a.radius
    raise UnsupportedShape(f"{type(a).__name__} vs {type(b).__name__}")


def overlap_witness_point(a, b):
    """A point in the interior of both shapes, or None.

    Only implemented for ball pairs (the exact-enclosure case); the caller
    treats None as `no constructive witness`.
    """
    if not (isinstance(a, Ball) and isinstance(b, Ball)):
        return None
    d = math.dist(a.center, b.center)
    if d >= a.radius + b.radius:
        return None
    if d == 0.0:
        return tuple(a.center)
    # Midpoint of the lens along the center segment.
    t = 0.5 * (1.0 + (a.radius - b.radius) / d)
    t = min(max(t, 0.0), 1.0)
    return tuple(
        ca + t * (cb - ca) for ca, cb in zip(a.center, b.center)
    )


def dilate(shape, delta):
    """Closed delta-neighborhood (balls stay balls, boxes stay boxes)."""
    if delta < 0:
        raise ValueError("negative dilation")
    if isinstance(shape, Ball):
        return Ball(shape.center, shape.radius + delta)
    if isinstance(shape, Box):
        return Box(
            tuple(l - delta for l in shape.lo),
            tuple(h + delta for h in shape.hi),
        )
    raise UnsupportedShape(type(shape).__name__)


def circumball(shape):
    if isinstance(shape, Ball):
        return shape
    if isinstance(shape, Box):
        return Ball(shape.center, 0.5 * shape.diameter)
    raise UnsupportedShape(type(shape).__name__)


def bounding_box(shape):
    if isinstance(shape, Box):
        return shape
    if isinstance(shape, Ball):
        return Box(
            tuple(c - shape.radius for c in shape.center),
            tuple(c + shape.radius for c in shape.center),
        )
    raise UnsupportedShape(type(shape).__name__)
