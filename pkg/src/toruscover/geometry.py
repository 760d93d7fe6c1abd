"""Points, dyadic cubes and balls on the d-dimensional unit torus.

Coordinates live in [0, 1) and distances wrap around.  A level-n dyadic cube
is the half-open box prod_i [k_i 2^-n, (k_i+1) 2^-n); because 2^n scaling of
a double is exact, cube membership and the ball/cube predicates below involve
no rounding beyond the unavoidable square-root comparison, and that one is
done with correctly rounded hypot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def wrap_unit(x: float) -> float:
    """Map a real to its representative in [0, 1)."""
    y = math.fmod(x, 1.0)
    if y < 0.0:
        y += 1.0
    return y if y < 1.0 else 0.0


def circle_distance(a: float, b: float) -> float:
    """Distance between two points of [0,1) on the circle."""
    d = abs(a - b)
    return d if d <= 0.5 else 1.0 - d


@dataclass(frozen=True)
class TorusPoint:
    """A point of the d-torus; dimension is the coordinate count."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) == 0:
            raise ValueError("a torus point needs at least one coordinate")
        for x in self.coords:
            if not (0.0 <= x < 1.0):
                raise ValueError(f"coordinate {x!r} outside [0, 1)")

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class DyadicCube:
    """Half-open dyadic cube: level n, corner index k in [0, 2^n)^d."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("cube level must be nonnegative")
        if len(self.index) == 0:
            raise ValueError("a cube needs at least one index coordinate")
        top = 1 << self.level
        for k in self.index:
            if not (0 <= k < top):
                raise ValueError(f"index {k} outside [0, {top})")

    @property
    def dim(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return 2.0 ** -self.level

    def corner(self) -> tuple[float, ...]:
        h = self.side
        return tuple(k * h for k in self.index)


@dataclass(frozen=True)
class TorusBall:
    """Closed metric ball; radius is capped at 1/2, half the diameter cap
    used by covering sequences."""

    center: TorusPoint
    radius: float

    def __post_init__(self) -> None:
        if not (0.0 < self.radius <= 0.5):
            raise ValueError(f"ball radius {self.radius!r} outside (0, 1/2]")

    @property
    def dim(self) -> int:
        return self.center.dim


def torus_distance(p: TorusPoint, q: TorusPoint) -> float:
    """Euclidean distance on the torus (wrap-around in each coordinate)."""
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    return math.hypot(*(circle_distance(a, b) for a, b in zip(p.coords, q.coords)))


def cube_of_point(p: TorusPoint, level: int) -> DyadicCube:
    """The level cube containing the point.  Exact: multiplying a double in
    [0,1) by 2^level only shifts its exponent."""
    if level < 0:
        raise ValueError("cube level must be nonnegative")
    scale = float(1 << level)
    return DyadicCube(level, tuple(int(x * scale) for x in p.coords))


def cube_subset(inner: DyadicCube, outer: DyadicCube) -> bool:
    """True iff ``inner`` is contained in ``outer``.  Dyadic nesting makes
    this a right-shift comparison of indices."""
    if inner.dim != outer.dim:
        raise ValueError("dimension mismatch")
    shift = inner.level - outer.level
    if shift < 0:
        return False
    return all((a >> shift) == b for a, b in zip(inner.index, outer.index))


def _axis_interval_distances(c: float, a: float, h: float) -> tuple[float, float]:
    """Min and max circle distance from the point c to the interval [a, a+h]
    taken modulo 1.  Assumes 0 < h; h >= 1 means the whole circle."""
    if h >= 1.0:
        return 0.0, 0.5
    t = c - a
    t = math.fmod(t, 1.0)
    if t < 0.0:
        t += 1.0
    # t is the position of c relative to the interval start, in [0, 1)
    d_start = circle_distance(0.0, t)
    d_end = circle_distance(h, t)
    if t <= h:
        dmin = 0.0
    else:
        dmin = min(d_start, d_end)
    # the farthest interval point from c is an endpoint, unless the antipode
    # of c lies inside the interval
    anti = t - 0.5 if t >= 0.5 else t + 0.5
    if 0.0 <= anti <= h:
        dmax = 0.5
    else:
        dmax = max(d_start, d_end)
    return dmin, dmax


def ball_intersects_cube(ball: TorusBall, cube: DyadicCube) -> bool:
    """True iff the open ball interior meets the closed cube.

    Per coordinate the nearest cube point realizes the componentwise minimum
    distance, so the squared distance from center to cube splits as a sum.
    The comparison is strict: touching at distance exactly r does not count.
    """
    if ball.dim != cube.dim:
        raise ValueError("dimension mismatch")
    h = cube.side
    corner = cube.corner()
    gaps = [
        _axis_interval_distances(c, a, h)[0]
        for c, a in zip(ball.center.coords, corner)
    ]
    return math.hypot(*gaps) < ball.radius


def ball_contains_cube(ball: TorusBall, cube: DyadicCube) -> bool:
    """True iff the closed ball contains the closed cube.

    The farthest cube point from the center has, in each coordinate, the
    componentwise maximum distance, realized at a cube corner or capped at
    1/2 when the coordinate's antipode falls inside the cube's shadow.
    """
    if ball.dim != cube.dim:
        raise ValueError("dimension mismatch")
    h = cube.side
    corner = cube.corner()
    far = [
        _axis_interval_distances(c, a, h)[1]
        for c, a in zip(ball.center.coords, corner)
    ]
    return math.hypot(*far) <= ball.radius
