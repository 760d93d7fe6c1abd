"""Dimension estimators and frequency confidence intervals.

Box dimension comes from a least-squares fit of log2 counts against grid
level; local dimension from mass ratios log(mu(B(x, r))) / log(r) along a
shrinking radius list, with the liminf estimated over the finest half.
Binomial frequencies get Wilson score intervals (they behave at 0 and 1,
where the covering experiments often sit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def fit_log2_counts(levels, log2_counts) -> SlopeFit:
    """Least squares of log2 N against level; needs at least three points."""
    xs = [float(x) for x in levels]
    ys = [float(y) for y in log2_counts]
    if len(xs) != len(ys):
        raise ValueError("levels and counts must pair up")
    if len(xs) < 3:
        raise ValueError("need at least three points for a slope fit")
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("levels are all equal")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    syy = sum((y - my) ** 2 for y in ys)
    if syy == 0.0:
        r2 = 1.0
    else:
        r2 = (sxy * sxy) / (sxx * syy)
    return SlopeFit(slope, intercept, r2, tuple(zip(xs, ys)))


def box_dimension_fit(levels, counts) -> SlopeFit:
    """Box-counting fit from raw cube counts (ints of any size)."""
    log2s = []
    for c in counts:
        c = int(c)
        if c < 1:
            raise ValueError("cube counts must be positive")
        bits = c.bit_length()
        if bits <= 53:
            log2s.append(math.log2(c))
        else:
            log2s.append((bits - 53) + math.log2(c >> (bits - 53)))
    return fit_log2_counts(levels, log2s)


@dataclass(frozen=True)
class LocalDimensionProfile:
    """Mass scaling ratios at a point: ratios[i] = log2(mass_i) / log2(r_i),
    with the liminf estimated as the minimum over the finest half of the
    radii (which must come sorted coarsest first)."""

    log2_radii: tuple[float, ...]
    ratios: tuple[float, ...]
    liminf_estimate: float

    @classmethod
    def from_log2(cls, log2_radii, log2_masses) -> "LocalDimensionProfile":
        rs = [float(r) for r in log2_radii]
        ms = [float(m) for m in log2_masses]
        if len(rs) != len(ms) or not rs:
            raise ValueError("radii and masses must pair up and be nonempty")
        if any(r >= 0 for r in rs):
            raise ValueError("radii must be below one (negative log2)")
        if any(b >= a for a, b in zip(rs[:-1], rs[1:])):
            raise ValueError("radii must strictly shrink")
        ratios = tuple(m / r for r, m in zip(rs, ms))
        finest = ratios[len(ratios) // 2:]
        return cls(tuple(rs), ratios, min(finest))


def local_dimension_profile(mass_at, point, radii) -> LocalDimensionProfile:
    """Profile from a mass callback: ``mass_at(point, r)`` returns mu(B(x,r))
    as a float or Fraction; radii sorted coarsest first."""
    log2_r = [math.log2(float(r)) for r in radii]
    log2_m = []
    for r in radii:
        m = mass_at(point, r)
        m = float(m)
        if m <= 0.0:
            raise ValueError(f"zero mass at radius {r}; profile undefined")
        log2_m.append(math.log2(m))
    return LocalDimensionProfile.from_log2(log2_r, log2_m)


_Z_CACHE: dict[float, float] = {}


def _z_for(confidence: float) -> float:
    z = _Z_CACHE.get(confidence)
    if z is None:
        if not (0.5 < confidence < 1.0):
            raise ValueError("confidence must lie in (0.5, 1)")
        z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
        _Z_CACHE[confidence] = z
    return z


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("need a positive trial count")
    if not (0 <= successes <= trials):
        raise ValueError("successes must lie in [0, trials]")
    z = _z_for(confidence)
    n = float(trials)
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    return lo, hi


def binomial_standard_error(successes: int, trials: int) -> float:
    """Plain Wald standard error sqrt(p(1-p)/n), floored at the resolution
    1/n so a zero count does not claim zero uncertainty."""
    if trials <= 0:
        raise ValueError("need a positive trial count")
    p = successes / trials
    return max(math.sqrt(p * (1.0 - p) / trials), 1.0 / trials)
