"""Random covering realizations and their dyadic-grid rasterizations.

A realization of the covering process is determined by a 64-bit seed and a
length spec: ball j (1-based) has diameter l_j and a center whose coordinate
i is uniform draw number (j-1)*d + i of the counter-based stream, so any
window of balls can be materialized without generating the prefix.

``GridSet`` holds a set of level-n dyadic cubes as a packed bit array; stage
rasterizations, refinement, intersection tests and a run-length text format
live on it.  The rasterizers come in two modes:

* ``intersected``: cubes whose closure meets the open ball,
* ``contained``: cubes contained in the closed ball,

matching the strict/closed conventions of the scalar predicates in
``geometry``, which the test suite checks cube by cube.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as kern
from .geometry import DyadicCube, TorusBall, TorusPoint, ball_intersects_cube
from .lengths import (
    BlockConstantLengths,
    ExplicitLengths,
    LengthSpec,
    value_at_exact,
    values_window,
)

MAX_BALLS = 10**8
MAX_GRID_BITS = 30  # hard cap on level*d for a GridSet
MAX_BOOL_BITS = 27  # unpacked boolean staging allowed below this


@dataclass(frozen=True)
class StageWindow:
    """An inclusive 1-based range of ball indices."""

    first: int
    last: int

    def __post_init__(self) -> None:
        if not (1 <= self.first <= self.last):
            raise ValueError("window must satisfy 1 <= first <= last")

    @property
    def count(self) -> int:
        return self.last - self.first + 1


@dataclass(frozen=True)
class CoveringRealization:
    """A reproducible covering realization: seed, lengths, materializable
    horizon."""

    seed: int
    lengths: LengthSpec
    ball_count: int

    @property
    def d(self) -> int:
        return self.lengths.d


def realize(seed: int, spec: LengthSpec, ball_count: int) -> CoveringRealization:
    """Validate and wrap a covering realization."""
    if not (0 <= seed < 2**64):
        raise ValueError("seed must be an unsigned 64-bit integer")
    if not (1 <= ball_count <= MAX_BALLS):
        raise ValueError(f"ball count must lie in [1, {MAX_BALLS}]")
    if isinstance(spec, ExplicitLengths) and ball_count > len(spec.values):
        raise ValueError("ball count exceeds the explicit horizon")
    return CoveringRealization(seed, spec, ball_count)


def centers(real: CoveringRealization, window: StageWindow) -> np.ndarray:
    """Centers of the window's balls, shape (count, d)."""
    if window.last > real.ball_count:
        raise ValueError("window beyond the realization horizon")
    d = real.d
    start = (window.first - 1) * d
    flat = kern.uniforms(real.seed, start, window.count * d)
    return flat.reshape(window.count, d)


def radii_window(real: CoveringRealization, window: StageWindow) -> np.ndarray:
    """Radii (half diameters) of the window's balls as floats."""
    if window.last > real.ball_count:
        raise ValueError("window beyond the realization horizon")
    return values_window(real.lengths, window.first, window.last) * 0.5


def ball_at(real: CoveringRealization, j: int) -> TorusBall:
    """Ball number j as a geometry object."""
    w = StageWindow(j, j)
    center = centers(real, w)[0]
    radius = float(radii_window(real, w)[0])
    return TorusBall(TorusPoint(tuple(float(x) for x in center)), radius)


class GridSet:
    """A set of level-n dyadic cubes on the d-torus, packed one bit per cube.

    Flat cube order is C order over the index tuple (first coordinate major).
    Construction is capped at level*d <= 30 (one gigacube, 128 MiB packed).
    """

    def __init__(self, level: int, d: int, packed: np.ndarray) -> None:
        if level < 0 or d < 1:
            raise ValueError("bad level or dimension")
        if level * d > MAX_GRID_BITS:
            raise ValueError(
                f"grid of 2^{level * d} cubes exceeds the 2^{MAX_GRID_BITS} cap"
            )
        size = 1 << (level * d)
        if packed.dtype != np.uint8 or packed.shape != ((size + 7) // 8,):
            raise ValueError("packed buffer has the wrong shape or dtype")
        self.level = level
        self.d = d
        self.packed = packed

    # -- constructors ---------------------------------------------------

    @classmethod
    def empty(cls, level: int, d: int) -> "GridSet":
        size = 1 << (level * d)
        return cls(level, d, np.zeros((size + 7) // 8, dtype=np.uint8))

    @classmethod
    def from_bool(cls, level: int, d: int, bits: np.ndarray) -> "GridSet":
        size = 1 << (level * d)
        flat = np.asarray(bits, dtype=bool).reshape(size)
        return cls(level, d, np.packbits(flat, bitorder="little"))

    @classmethod
    def from_flat_indices(cls, level: int, d: int, indices) -> "GridSet":
        size = 1 << (level * d)
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= size):
            raise ValueError("flat index out of range")
        flat = np.zeros(size, dtype=bool)
        if idx.size:
            flat[idx] = True
        return cls.from_bool(level, d, flat)

    # -- basic queries ---------------------------------------------------

    @property
    def size(self) -> int:
        return 1 << (self.level * self.d)

    def count(self) -> int:
        return int(np.bitwise_count(self.packed).sum())

    def fraction(self) -> float:
        return self.count() / self.size

    def to_bool(self) -> np.ndarray:
        if self.level * self.d > MAX_BOOL_BITS:
            raise ValueError("grid too large to unpack; raise the cap knowingly")
        return np.unpackbits(self.packed, count=self.size, bitorder="little").astype(bool)

    def flat_indices(self) -> np.ndarray:
        return np.nonzero(self.to_bool())[0].astype(np.int64)

    def has_cube(self, cube: DyadicCube) -> bool:
        if cube.level != self.level or cube.dim != self.d:
            raise ValueError("cube level or dimension mismatch")
        flat = 0
        for k in cube.index:
            flat = (flat << self.level) | k
        return bool((self.packed[flat // 8] >> (flat % 8)) & 1)

    # -- set operations ---------------------------------------------------

    def refine(self, to_level: int) -> "GridSet":
        """The same point set expressed on a finer grid."""
        if to_level < self.level:
            raise ValueError("refinement must not coarsen")
        if to_level == self.level:
            return self
        if to_level * self.d > MAX_BOOL_BITS:
            raise ValueError("refined grid too large to stage")
        f = 1 << (to_level - self.level)
        arr = self.to_bool().reshape((1 << self.level,) * self.d)
        for axis in range(self.d):
            arr = np.repeat(arr, f, axis=axis)
        return GridSet.from_bool(to_level, self.d, arr.reshape(-1))

    def intersects(self, other: "GridSet") -> bool:
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        a, b = self, other
        if a.level < b.level:
            a = a.refine(b.level)
        elif b.level < a.level:
            b = b.refine(a.level)
        return bool(np.bitwise_and(a.packed, b.packed).any())

    def intersection_count(self, other: "GridSet") -> int:
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        a, b = self, other
        if a.level < b.level:
            a = a.refine(b.level)
        elif b.level < a.level:
            b = b.refine(a.level)
        return int(np.bitwise_count(np.bitwise_and(a.packed, b.packed)).sum())

    # -- text serialization ------------------------------------------------

    def to_rle_text(self) -> str:
        """Run-length text form: header then one 'start length' line per run
        of set cubes in flat order."""
        bits = np.unpackbits(self.packed, count=self.size, bitorder="little")
        changes = np.nonzero(np.diff(bits))[0] + 1
        edges = np.concatenate(([0], changes, [bits.size]))
        lines = [f"torus-gridset 1", f"level {self.level}", f"dim {self.d}"]
        runs = []
        for a, b in zip(edges[:-1], edges[1:]):
            if bits[a]:
                runs.append((int(a), int(b - a)))
        lines.append(f"runs {len(runs)}")
        lines.extend(f"{a} {n}" for a, n in runs)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_rle_text(cls, text: str) -> "GridSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].split() != ["torus-gridset", "1"]:
            raise ValueError("not a torus-gridset v1 document")
        header = {}
        for ln in lines[1:4]:
            key, _, val = ln.partition(" ")
            header[key] = int(val)
        for key in ("level", "dim", "runs"):
            if key not in header:
                raise ValueError(f"missing header field {key}")
        level, d, nruns = header["level"], header["dim"], header["runs"]
        size = 1 << (level * d)
        bits = np.zeros(size, dtype=bool)
        body = lines[4:]
        if len(body) != nruns:
            raise ValueError("run count does not match the body")
        prev_end = 0
        for ln in body:
            a_s, n_s = ln.split()
            a, n = int(a_s), int(n_s)
            if n <= 0 or a < prev_end or a + n > size:
                raise ValueError("runs must be sorted, disjoint and in range")
            bits[a:a + n] = True
            prev_end = a + n
        return cls.from_bool(level, d, bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSet):
            return NotImplemented
        return (
            self.level == other.level
            and self.d == other.d
            and bool(np.array_equal(self.packed, other.packed))
        )


# -- rasterization ---------------------------------------------------------


def _axis_distance_grids(x: float, level: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For axis cells k = lo..hi (unwrapped), the componentwise min and max
    circle distance from coordinate x to the cell [k/S, (k+1)/S], plus the
    wrapped cell indices.  Mirrors the scalar formulas in geometry."""
    size = 1 << level
    h = 2.0 ** -level
    ks = np.arange(lo, hi + 1, dtype=np.int64)
    wrapped = np.mod(ks, size)
    start = wrapped.astype(np.float64) * h
    t = np.mod(x - start, 1.0)
    d_start = np.minimum(t, 1.0 - t)
    u = np.abs(t - h)
    d_end = np.minimum(u, 1.0 - u)
    dmin = np.where(t <= h, 0.0, np.minimum(d_start, d_end))
    anti = np.where(t >= 0.5, t - 0.5, t + 0.5)
    dmax = np.where(anti <= h, 0.5, np.maximum(d_start, d_end))
    return dmin, dmax, wrapped


def _stage_one_ball(bits: np.ndarray, x: np.ndarray, r: float, level: int,
                    mode: str, d: int) -> None:
    """Mark the cubes of one ball in an unpacked boolean grid (d >= 2)."""
    size = 1 << level
    scale = float(size)
    mins = []
    maxs = []
    wraps = []
    for i in range(d):
        lo = int(math.floor((x[i] - r) * scale))
        hi = int(math.ceil((x[i] + r) * scale) - 1.0)
        if hi - lo + 1 >= size:
            lo, hi = 0, size - 1
        dmin, dmax, wrapped = _axis_distance_grids(float(x[i]), level, lo, hi)
        mins.append(dmin)
        maxs.append(dmax)
        wraps.append(wrapped)
    shape = tuple(len(w) for w in wraps)
    sq = np.zeros(shape, dtype=np.float64)
    arrs = mins if mode == "intersected" else maxs
    for i, arr in enumerate(arrs):
        view = [None] * d
        view[i] = slice(None)
        sq = sq + (arr ** 2)[tuple(view)]
    dist = np.sqrt(sq)
    mask = dist < r if mode == "intersected" else dist <= r
    if not mask.any():
        return
    flat = np.zeros(shape, dtype=np.int64)
    for i, wrapped in enumerate(wraps):
        view = [None] * d
        view[i] = slice(None)
        flat = (flat << level) | wrapped[tuple(view)]
    grid_flat = flat[mask].reshape(-1)
    bits[grid_flat] = True


def stage_gridset(real: CoveringRealization, window: StageWindow, level: int,
                  mode: str = "intersected") -> GridSet:
    """Rasterize the union of the window's balls onto the level grid.

    ``intersected`` marks cubes meeting some open ball, ``contained`` marks
    cubes inside some closed ball.
    """
    if mode not in ("intersected", "contained"):
        raise ValueError("mode must be 'intersected' or 'contained'")
    d = real.d
    if level * d > MAX_GRID_BITS:
        raise ValueError("stage grid exceeds the size cap")
    ctr = centers(real, window)
    rad = radii_window(real, window)
    size = 1 << level
    if d == 1:
        scale = float(size)
        u = ctr[:, 0]
        if mode == "intersected":
            lo = np.floor((u - rad) * scale).astype(np.int64)
            hi = (np.ceil((u + rad) * scale) - 1.0).astype(np.int64)
        else:
            lo = np.ceil((u - rad) * scale).astype(np.int64)
            hi = (np.floor((u + rad) * scale) - 1.0).astype(np.int64)
            keep = hi >= lo
            lo, hi = lo[keep], hi[keep]
        if lo.size == 0:
            return GridSet.empty(level, d)
        bits = kern.raster_union(lo, hi, size)
        return GridSet.from_bool(level, d, bits.astype(bool))
    if level * d > MAX_BOOL_BITS:
        raise ValueError("multi-dimensional staging needs level*d <= 27")
    bits = np.zeros(1 << (level * d), dtype=bool)
    for j in range(window.count):
        _stage_one_ball(bits, ctr[j], float(rad[j]), level, mode, d)
    return GridSet.from_bool(level, d, bits)


# -- diameter band windows ---------------------------------------------------


def diameter_band_window(spec: LengthSpec, coarse_level: int, fine_level: int,
                         horizon: int) -> StageWindow | None:
    """The window of indices whose diameters lie in the band
    [sqrt(d) 2^-fine, sqrt(d) 2^-coarse], i.e. between the diameters of the
    fine and coarse grid cubes.  Returns None when no index of 1..horizon
    qualifies."""
    if coarse_level >= fine_level:
        raise ValueError("need coarse_level < fine_level")
    d = spec.d
    if isinstance(spec, BlockConstantLengths):
        lo_sq = Fraction(d, 1 << (2 * fine_level))
        hi_sq = Fraction(d, 1 << (2 * coarse_level))
        first = None
        last = None
        for n in _block_boundary_indices(spec, horizon):
            v = value_at_exact(spec, n)
            assert isinstance(v, Fraction)
            if lo_sq <= v * v <= hi_sq:
                if first is None:
                    first = _block_range_at(spec, n, horizon)[0]
                last = _block_range_at(spec, n, horizon)[1]
        if first is None:
            return None
        return StageWindow(first, min(last, horizon))
    lo = math.sqrt(d) * 2.0 ** -fine_level
    hi = math.sqrt(d) * 2.0 ** -coarse_level
    # values are nonincreasing; binary search the first index with l <= hi
    # and the last with l >= lo
    first = _first_index_at_most(spec, hi, horizon)
    if first is None:
        return None
    last = _last_index_at_least(spec, lo, horizon, start=first)
    if last is None or last < first:
        return None
    return StageWindow(first, last)


def _block_boundary_indices(spec: BlockConstantLengths, horizon: int):
    for _, start in spec.blocks:
        if start <= horizon:
            yield start


def _block_range_at(spec: BlockConstantLengths, n: int, horizon: int) -> tuple[int, int]:
    starts = [f for _, f in spec.blocks]
    pos = bisect.bisect_right(starts, n) - 1
    start = starts[pos]
    end = starts[pos + 1] - 1 if pos + 1 < len(starts) else horizon
    return start, min(end, horizon)


def _value_float(spec: LengthSpec, n: int) -> float:
    v = value_at_exact(spec, n)
    return float(v)


def _first_index_at_most(spec: LengthSpec, bound: float, horizon: int) -> int | None:
    if _value_float(spec, horizon) > bound:
        return None
    lo, hi = 1, horizon
    while lo < hi:
        mid = (lo + hi) // 2
        if _value_float(spec, mid) <= bound:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _last_index_at_least(spec: LengthSpec, bound: float, horizon: int,
                         start: int = 1) -> int | None:
    if _value_float(spec, start) < bound:
        return None
    lo, hi = start, horizon
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _value_float(spec, mid) >= bound:
            lo = mid
        else:
            hi = mid - 1
    return lo


# -- exact center counting ---------------------------------------------------


def count_window_centers_in_cube(real: CoveringRealization, cube: DyadicCube,
                                 window: StageWindow) -> int:
    """How many balls of the window have their center inside the cube."""
    if cube.dim != real.d:
        raise ValueError("dimension mismatch")
    ctr = centers(real, window)
    scale = float(1 << cube.level)
    idx = np.floor(ctr * scale).astype(np.int64)
    target = np.asarray(cube.index, dtype=np.int64)
    return int((idx == target[None, :]).all(axis=1).sum())


# -- Monte Carlo hitting ------------------------------------------------------


def first_hit_indices(spec: LengthSpec, seed: int, trials: int,
                      window: StageWindow, target, level: int | None = None,
                      trial0: int = 0) -> np.ndarray:
    """For each trial (an independent realization with a derived seed),
    the 1-based index of the first ball of the window that hits the target,
    or -1 if none does.

    The target is a ``TorusPoint`` (exact point-in-ball test) or a
    ``GridSet`` (ball neighborhoods tested against marked cubes at the grid
    level).  Dimension one runs in the compiled kernels.
    """
    d = spec.d
    rad = values_window(spec, window.first, window.last) * 0.5
    ball0 = (window.first - 1) * d
    if isinstance(target, TorusPoint):
        if target.dim != d:
            raise ValueError("dimension mismatch")
        if d == 1:
            off = kern.first_hit_point(
                seed, trial0, trials, ball0, rad, target.coords[0]
            )
        else:
            off = _first_hit_point_nd(seed, trial0, trials, window, rad, target, d)
    elif isinstance(target, GridSet):
        if target.d != d:
            raise ValueError("dimension mismatch")
        if d == 1:
            bits = np.unpackbits(
                target.packed, count=target.size, bitorder="little"
            ).astype(np.int64)
            prefix = np.zeros(target.size + 1, dtype=np.int64)
            np.cumsum(bits, out=prefix[1:])
            off = kern.first_hit_ranges(
                seed, trial0, trials, ball0, rad, target.level, prefix
            )
        else:
            off = _first_hit_grid_nd(seed, trial0, trials, window, rad, target, d)
    else:
        raise TypeError("target must be a TorusPoint or a GridSet")
    out = np.where(off >= 0, off + window.first, -1)
    return out.astype(np.int64)


def _first_hit_point_nd(seed, trial0, trials, window, rad, target, d):
    point = np.asarray(target.coords, dtype=np.float64)
    n = window.count
    out = np.full(trials, -1, dtype=np.int64)
    ball0 = (window.first - 1) * d
    for t in range(trials):
        st = kern.mix64(seed, trial0 + t)
        flat = kern.uniforms(st, ball0, n * d)
        pts = flat.reshape(n, d)
        diff = np.abs(pts - point[None, :])
        np.minimum(diff, 1.0 - diff, out=diff)
        dist = np.sqrt((diff ** 2).sum(axis=1))
        hit = dist <= rad
        if hit.any():
            out[t] = int(np.argmax(hit))
    return out


def _first_hit_grid_nd(seed, trial0, trials, window, rad, target, d):
    level = target.level
    marked = target.flat_indices()
    marked_set = set(int(m) for m in marked)
    size = 1 << level
    n = window.count
    out = np.full(trials, -1, dtype=np.int64)
    ball0 = (window.first - 1) * d
    scale = float(size)
    for t in range(trials):
        st = kern.mix64(seed, trial0 + t)
        flat = kern.uniforms(st, ball0, n * d)
        pts = flat.reshape(n, d)
        for j in range(n):
            r = float(rad[j])
            hit = False
            ranges = []
            for i in range(d):
                lo = int(math.floor((pts[j, i] - r) * scale))
                hi = int(math.ceil((pts[j, i] + r) * scale) - 1.0)
                if hi - lo + 1 >= size:
                    lo, hi = 0, size - 1
                ranges.append((lo, hi))
            ball = TorusBall(TorusPoint(tuple(float(x) for x in pts[j])), r)
            for flat_idx in _box_flat_indices(ranges, level, d):
                if flat_idx in marked_set:
                    cube = _cube_from_flat(flat_idx, level, d)
                    if ball_intersects_cube(ball, cube):
                        hit = True
                        break
            if hit:
                out[t] = j
                break
    return out


def _box_flat_indices(ranges, level, d):
    size = 1 << level
    axes = [np.mod(np.arange(lo, hi + 1, dtype=np.int64), size) for lo, hi in ranges]
    flat = np.zeros((1,) * d, dtype=np.int64)
    for i, ax in enumerate(axes):
        view = [None] * d
        view[i] = slice(None)
        flat = (flat << level) | ax[tuple(view)]
    return flat.reshape(-1)


def _cube_from_flat(flat: int, level: int, d: int) -> DyadicCube:
    mask = (1 << level) - 1
    idx = []
    for i in range(d):
        shift = level * (d - 1 - i)
        idx.append((flat >> shift) & mask)
    return DyadicCube(level, tuple(idx))
