"""Diameter sequences for random covering sets and their scale diagnostics.

A covering set on the d-torus is determined by a nonincreasing sequence of
ball diameters l_n <= 1/2.  Three ways to specify one:

* ``PowerLawLengths``: l_n = c * n^(-1/g) with growth exponent g in (0, d].
  The exponent g is simultaneously the index growth rate
  limsup log n / (-log l_n) and the critical exponent of sum l_n^s.
* ``BlockConstantLengths``: piecewise constant with exact ``Fraction``
  values (schedule constructions need lengths like 2^-2536, far below the
  double range).  The final block extends to infinity.
* ``ExplicitLengths``: a finite tuple of floats; diagnostics on it are
  finite-horizon estimates and are flagged as such.

The census groups indices by dyadic scale band: band k holds the n with
2^(-k+1) <= l_n < 2^(-k+2), so band 2 starts at the maximal value 1/2.
``diagnose_census_regularity`` inspects a census for the scaling pattern
(band counts growing like 2^(a k) along bands with ratio tending to one)
that the hitting dichotomy requires, and ``borel_cantelli_classify`` reports
whether the covering set has full or zero volume almost surely.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .exactmath import floor_log2_fraction, log2_int

_FLOAT_MIN_EXP = -1074  # smallest positive double is 2^-1074


@dataclass(frozen=True)
class PowerLawLengths:
    """l_n = c * n^(-1/growth_exponent); growth_exponent in (0, d], c in (0, 1/2]."""

    growth_exponent: float
    d: int = 1
    c: float = 0.5

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if not (0.0 < self.growth_exponent <= self.d):
            raise ValueError("growth exponent must lie in (0, d]")
        if not (0.0 < self.c <= 0.5):
            raise ValueError("prefactor must lie in (0, 1/2]")


@dataclass(frozen=True)
class BlockConstantLengths:
    """Piecewise constant diameters: ``blocks`` is a tuple of (value, first)
    pairs, values exact fractions, ``first`` the 1-based index where each
    block starts.  The last block has no end."""

    blocks: tuple[tuple[Fraction, int], ...]
    d: int = 1

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if not self.blocks:
            raise ValueError("need at least one block")
        if self.blocks[0][1] != 1:
            raise ValueError("first block must start at index 1")
        prev_value = None
        prev_first = 0
        for value, first in self.blocks:
            value = Fraction(value)
            if not (0 < value <= Fraction(1, 2)):
                raise ValueError(f"block value {value} outside (0, 1/2]")
            if first <= prev_first:
                raise ValueError("block starts must strictly increase")
            if prev_value is not None and value > prev_value:
                raise ValueError("block values must be nonincreasing")
            prev_value = value
            prev_first = first
        object.__setattr__(
            self,
            "blocks",
            tuple((Fraction(v), int(f)) for v, f in self.blocks),
        )


@dataclass(frozen=True)
class ExplicitLengths:
    """A finite nonincreasing tuple of diameters in (0, 1/2]."""

    values: tuple[float, ...]
    d: int = 1

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if not self.values:
            raise ValueError("need at least one value")
        prev = None
        for v in self.values:
            if not (0.0 < v <= 0.5):
                raise ValueError(f"value {v!r} outside (0, 1/2]")
            if prev is not None and v > prev:
                raise ValueError("values must be nonincreasing")
            prev = v


LengthSpec = Union[PowerLawLengths, BlockConstantLengths, ExplicitLengths]


def value_at_exact(spec: LengthSpec, n: int) -> Fraction | float:
    """l_n without float conversion: a Fraction for block specs, else float."""
    if n < 1:
        raise ValueError("indices are 1-based")
    if isinstance(spec, PowerLawLengths):
        return spec.c * float(n) ** (-1.0 / spec.growth_exponent)
    if isinstance(spec, BlockConstantLengths):
        starts = [first for _, first in spec.blocks]
        pos = bisect.bisect_right(starts, n) - 1
        return spec.blocks[pos][0]
    if n > len(spec.values):
        raise ValueError(
            f"index {n} beyond the explicit horizon {len(spec.values)}"
        )
    return spec.values[n - 1]


def value_at(spec: LengthSpec, n: int) -> float:
    """l_n as a float; raises if the exact value underflows doubles."""
    v = value_at_exact(spec, n)
    if isinstance(v, Fraction):
        out = float(v)
        if out == 0.0:
            raise ValueError(
                f"l_{n} = {v} underflows float64; use value_at_exact"
            )
        return out
    return v


def values_window(spec: LengthSpec, first: int, last: int) -> np.ndarray:
    """l_first .. l_last as a float64 array (inclusive window)."""
    if not (1 <= first <= last):
        raise ValueError("window must satisfy 1 <= first <= last")
    count = last - first + 1
    if isinstance(spec, PowerLawLengths):
        n = np.arange(first, last + 1, dtype=np.float64)
        return spec.c * n ** (-1.0 / spec.growth_exponent)
    if isinstance(spec, BlockConstantLengths):
        out = np.empty(count, dtype=np.float64)
        starts = [f for _, f in spec.blocks]
        for pos, (value, start) in enumerate(spec.blocks):
            end = starts[pos + 1] - 1 if pos + 1 < len(starts) else last
            a = max(start, first)
            b = min(end, last)
            if a > b:
                continue
            fv = float(value)
            if fv == 0.0:
                raise ValueError(
                    f"block value {value} underflows float64 in window"
                )
            out[a - first:b - first + 1] = fv
        return out
    if last > len(spec.values):
        raise ValueError(
            f"window end {last} beyond the explicit horizon {len(spec.values)}"
        )
    return np.asarray(spec.values[first - 1:last], dtype=np.float64)


def spec_to_dict(spec: LengthSpec) -> dict:
    """Serializable form of a length spec.

    Keys follow the config vocabulary: ``variant`` plus ``alpha``/``c`` for
    the power law, ``blocks`` (value, first-index pairs with exact values as
    num/den strings) for the block-constant variant, ``values`` for the
    explicit one, and ``d`` always.
    """
    if isinstance(spec, PowerLawLengths):
        return {
            "variant": "power_law",
            "alpha": spec.growth_exponent,
            "c": spec.c,
            "d": spec.d,
        }
    if isinstance(spec, BlockConstantLengths):
        return {
            "variant": "block_constant",
            "blocks": [
                [f"{v.numerator}/{v.denominator}", first]
                for v, first in spec.blocks
            ],
            "d": spec.d,
        }
    return {"variant": "explicit", "values": list(spec.values), "d": spec.d}


def spec_from_dict(data: dict) -> LengthSpec:
    """Inverse of ``spec_to_dict``; raises ValueError on malformed input."""
    try:
        variant = data["variant"]
    except KeyError:
        raise ValueError("length spec needs a 'variant' key") from None
    d = int(data.get("d", 1))
    if variant == "power_law":
        return PowerLawLengths(
            growth_exponent=float(data["alpha"]), d=d,
            c=float(data.get("c", 0.5)),
        )
    if variant == "block_constant":
        blocks = tuple(
            (Fraction(str(value)), int(first)) for value, first in data["blocks"]
        )
        return BlockConstantLengths(blocks, d=d)
    if variant == "explicit":
        return ExplicitLengths(tuple(float(v) for v in data["values"]), d=d)
    raise ValueError(f"unknown length spec variant {variant!r}")


@dataclass(frozen=True)
class ExponentReport:
    """An exponent value plus whether it is analytic or a horizon estimate."""

    value: float
    exact: bool


def index_growth_exponent(spec: LengthSpec) -> ExponentReport:
    """limsup_n log n / (-log l_n).

    Analytic for the power-law and block-constant variants; for an explicit
    tuple the value is the max over the tail half of the horizon and is
    flagged as an estimate.
    """
    if isinstance(spec, PowerLawLengths):
        return ExponentReport(float(spec.growth_exponent), True)
    if isinstance(spec, BlockConstantLengths):
        # the final block is an infinite run of a constant length, so
        # log n / (-log l_n) tends to infinity along it; the limsup saturates
        # at the dimension cap
        return ExponentReport(float(spec.d), True)
    m = len(spec.values)
    lo = max(1, m // 2)
    best = 0.0
    for n in range(lo, m + 1):
        v = spec.values[n - 1]
        denom = -math.log(v)
        if denom <= 0.0:
            continue
        best = max(best, math.log(n) / denom)
    return ExponentReport(min(best, float(spec.d)), False)


def critical_sum_exponent(spec: LengthSpec) -> ExponentReport:
    """sup of s in [0, d] with sum_n l_n^s divergent.

    Computed by an independent route from ``index_growth_exponent``: the
    power-law case integrates the defining series directly and the explicit
    case bisects on partial-sum growth.  The two must agree; the test suite
    asserts it.
    """
    if isinstance(spec, PowerLawLengths):
        # sum c^s n^(-s/g) diverges iff s/g <= 1, so the sup over [0, d]
        # is min(g, d); the constructor already caps g at d
        return ExponentReport(min(float(spec.growth_exponent), float(spec.d)), True)
    if isinstance(spec, BlockConstantLengths):
        # the infinite constant tail contributes value^s * infinity for every
        # s, so the sum diverges for all s and the sup is the cap d
        return ExponentReport(float(spec.d), True)
    m = len(spec.values)
    if m < 4:
        return ExponentReport(float(spec.d), False)
    values = np.asarray(spec.values, dtype=np.float64)
    logs = np.log(values)

    def grows(s: float) -> bool:
        # does doubling the horizon still grow the partial sum noticeably?
        full = np.logaddexp.reduce(s * logs)
        half = np.logaddexp.reduce(s * logs[: m // 2])
        return (full - half) > math.log(1.01)

    lo, hi = 0.0, float(spec.d)
    if not grows(lo):
        return ExponentReport(0.0, False)
    if grows(hi):
        return ExponentReport(hi, False)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if grows(mid):
            lo = mid
        else:
            hi = mid
    return ExponentReport(0.5 * (lo + hi), False)


@dataclass(frozen=True)
class ScaleCensus:
    """Counts of indices per dyadic scale band up to a horizon.

    ``counts[k]`` is #{ n <= horizon : 2^(-k+1) <= l_n < 2^(-k+2) }; bands
    with count zero are omitted.  Counts are exact integers (they can exceed
    the double range for schedule-built sequences).
    """

    counts: dict[int, int] = field(default_factory=dict)
    horizon: int = 0

    def bands(self) -> list[int]:
        return sorted(k for k, c in self.counts.items() if c > 0)


def band_of_fraction(value: Fraction) -> int:
    """The dyadic band of an exact length: 2^(-k+1) <= value < 2^(-k+2)."""
    return 1 - floor_log2_fraction(value)


def band_of_float(value: float) -> int:
    """The dyadic band of a float length, exact via frexp."""
    _, e = math.frexp(value)  # value = m * 2^e with m in [0.5, 1)
    return 2 - e


def scale_census(spec: LengthSpec, horizon: int) -> ScaleCensus:
    """Census of scale bands over indices 1..horizon.

    Block-constant specs are counted analytically (the horizon may be an
    arbitrarily large integer); the other variants enumerate and cap the
    horizon at 10^8.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    counts: dict[int, int] = {}
    if isinstance(spec, BlockConstantLengths):
        starts = [f for _, f in spec.blocks]
        for pos, (value, start) in enumerate(spec.blocks):
            end = starts[pos + 1] - 1 if pos + 1 < len(starts) else horizon
            a, b = start, min(end, horizon)
            if a > b:
                continue
            k = band_of_fraction(value)
            counts[k] = counts.get(k, 0) + (b - a + 1)
        return ScaleCensus(counts, horizon)
    if horizon > 10**8:
        raise ValueError("enumerated census capped at horizon 10^8")
    chunk = 1 << 20
    for first in range(1, horizon + 1, chunk):
        last = min(first + chunk - 1, horizon)
        vals = values_window(spec, first, last)
        _, exps = np.frexp(vals)
        bands = 2 - exps
        found = np.bincount(bands - bands.min())
        base = int(bands.min())
        for off, c in enumerate(found):
            if c:
                counts[base + off] = counts.get(base + off, 0) + int(c)
    return ScaleCensus(counts, horizon)


@dataclass(frozen=True)
class CensusDiagnosis:
    verdict: str  # "consistent" | "violated" | "inconclusive"
    witness_bands: tuple[int, ...]
    witness_values: tuple[float, ...]
    limit_estimate: float | None
    detail: str


def diagnose_census_regularity(
    census: ScaleCensus,
    d: int = 1,
    ratio_tol: float = 0.05,
    value_tol: float = 0.05,
    min_bands: int = 10,
) -> CensusDiagnosis:
    """Test a census for regular dyadic scaling.

    The pattern looked for: along occupied bands k_1 < k_2 < ... with
    k_{i+1}/k_i -> 1, the values log2(count) / k stabilize at a limit below
    the dimension.  Verdicts are finite-horizon judgements:

    * ``consistent``: at least ``min_bands`` occupied bands, tail band ratios
      within ``ratio_tol`` of one, tail values within ``value_tol`` of their
      mean, and the limit estimate below d.
    * ``violated``: the occupied bands themselves rule the pattern out on the
      observed range, either because consecutive occupied bands are spaced by
      ratios bounded well away from one (no admissible subsequence can pass
      through them) or because the values stabilize at or above d.
    * ``inconclusive``: anything else; a deeper horizon might settle it.
    """
    bands = census.bands()
    if len(bands) >= 2:
        tail_bands = bands[-6:]
        ratios = [b / a for a, b in zip(tail_bands[:-1], tail_bands[1:])]
    else:
        ratios = []

    if len(bands) >= 3 and ratios and min(ratios) > 1.5:
        witness = tuple(bands[-5:])
        values = tuple(log2_int(census.counts[k]) / k for k in witness)
        return CensusDiagnosis(
            "violated",
            witness,
            values,
            None,
            "occupied bands are geometrically sparse; consecutive band "
            f"ratios stay above {min(ratios):.2f}, so no subsequence of "
            "them can have ratio tending to one",
        )
    if len(bands) < min_bands:
        return CensusDiagnosis(
            "inconclusive",
            tuple(bands),
            tuple(log2_int(census.counts[k]) / k for k in bands),
            None,
            f"only {len(bands)} occupied bands at horizon {census.horizon}; "
            f"need {min_bands} for a stable tail",
        )

    # the deepest occupied band is cut off by the horizon for a decreasing
    # sequence (its index range extends past the last counted index), which
    # would bias the tail statistics low; drop it
    witness = tuple(bands[:-1][-5:])
    values = tuple(log2_int(census.counts[k]) / k for k in witness)
    # the growth rate of band counts: least-squares slope of log2(count)
    # against band index over the witness tail
    xs = np.asarray(witness, dtype=np.float64)
    ys = np.asarray([log2_int(census.counts[k]) for k in witness])
    slope = float(np.polyfit(xs, ys, 1)[0])

    ratio_ok = max(ratios) <= 1.0 + ratio_tol
    mean_v = sum(values) / len(values)
    stable = all(abs(v - mean_v) <= value_tol for v in values)

    if ratio_ok and stable and slope < d - value_tol:
        return CensusDiagnosis(
            "consistent",
            witness,
            values,
            slope,
            f"tail band ratios within {ratio_tol} of one and values within "
            f"{value_tol} of {mean_v:.4f}; growth estimate {slope:.4f}",
        )
    if ratio_ok and stable:
        return CensusDiagnosis(
            "violated",
            witness,
            values,
            slope,
            f"band values stabilize at {slope:.4f}, at or above the "
            f"dimension {d}",
        )
    return CensusDiagnosis(
        "inconclusive",
        witness,
        values,
        slope,
        "tail not settled: "
        + ("band ratios still above tolerance" if not ratio_ok else
           "values still drifting"),
    )


@dataclass(frozen=True)
class VolumeClassification:
    verdict: str  # "full_measure" | "measure_zero"
    exact: bool
    detail: str


def borel_cantelli_classify(spec: LengthSpec) -> VolumeClassification:
    """Almost-sure volume of the covering set: full iff sum l_n^d diverges.

    Analytic for power-law and block-constant specs; estimated from partial
    sums for explicit tuples.
    """
    d = spec.d
    if isinstance(spec, PowerLawLengths):
        full = spec.growth_exponent >= d
        return VolumeClassification(
            "full_measure" if full else "measure_zero",
            True,
            f"sum l_n^{d} ~ sum n^(-{d}/{spec.growth_exponent}) "
            + ("diverges" if full else "converges"),
        )
    if isinstance(spec, BlockConstantLengths):
        return VolumeClassification(
            "full_measure",
            True,
            "the final block repeats a positive constant forever, so "
            f"sum l_n^{d} diverges",
        )
    est = critical_sum_exponent(spec)
    full = est.value >= d - 0.01
    return VolumeClassification(
        "full_measure" if full else "measure_zero",
        False,
        f"estimated critical exponent {est.value:.4f} vs dimension {d}",
    )
