"""Reference numpy implementation of the Monte Carlo hot kernels.

Every function here has a compiled twin in ``fastkern.pyx`` with identical
floating point semantics; the two backends must agree bit for bit, so keep
them in sync when editing either one.

The random source is the splitmix64 output function (Steele, Lea and Flood's
public-domain constants).  It is counter based: output ``j`` of the stream
with seed ``s`` is ``finalize(s + (j + 1) * GOLDEN)``, so any stream position
can be generated without generating its prefix.  A coordinate draw is the top
53 bits of a word scaled to [0, 1).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

_G = np.uint64(GOLDEN)
_A = np.uint64(_MIX_A)
_B = np.uint64(_MIX_B)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_UNIT = 2.0**-53

# Arrays of uint64 wrap modulo 2**64 silently, which is exactly what the
# mixer needs; keep errstate quiet anyway for the scalar paths.  The state
# object is built per call: numpy 2 refuses to re-enter a shared instance.
def _quiet():
    return np.errstate(over="ignore")


def mix64(seed: int, index: int) -> int:
    """Scalar splitmix64 output, used for deriving child seeds."""
    z = (seed + ((index + 1) & MASK64) * GOLDEN) & MASK64
    z ^= z >> 30
    z = (z * _MIX_A) & MASK64
    z ^= z >> 27
    z = (z * _MIX_B) & MASK64
    z ^= z >> 31
    return z


def _finalize(z: np.ndarray) -> np.ndarray:
    z ^= z >> _S30
    z *= _A
    z ^= z >> _S27
    z *= _B
    z ^= z >> _S31
    return z


def raw_words(seed: int, start: int, count: int) -> np.ndarray:
    """splitmix64 outputs at stream positions [start, start + count)."""
    with _quiet():
        idx = np.arange(1, count + 1, dtype=np.uint64)
        idx += np.uint64(start & MASK64)
        idx *= _G
        idx += np.uint64(seed & MASK64)
        return _finalize(idx)


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform [0,1) doubles at stream positions [start, start + count)."""
    return (raw_words(seed, start, count) >> _S11).astype(np.float64) * _UNIT


def uniform_matrix(seed: int, trial0: int, trials: int, start: int, count: int) -> np.ndarray:
    """One row of ``count`` uniforms per trial.

    Row t uses the derived stream seed ``mix64(seed, trial0 + t)`` so that
    trials are independent and reproducible regardless of execution order.
    """
    with _quiet():
        seeds = raw_words(seed, trial0, trials)  # derived seeds, one per trial
        idx = np.arange(1, count + 1, dtype=np.uint64)
        idx += np.uint64(start & MASK64)
        z = idx[None, :] * _G + seeds[:, None]
        return (_finalize(z) >> _S11).astype(np.float64) * _UNIT


def _trial_chunks(trials: int, count: int, budget: int = 1 << 21):
    step = max(1, budget // max(count, 1))
    for t0 in range(0, trials, step):
        yield t0, min(step, trials - t0)


def cover_miss_flags(seed: int, trial0: int, trials: int, count: int,
                     arc_length: float) -> np.ndarray:
    """Per trial: 1 if ``count`` closed arcs of length ``arc_length`` centered
    at uniform points fail to cover the circle, else 0.

    Coverage of the circle by equal closed arcs holds exactly when every
    cyclic gap between consecutive sorted centers is at most the arc length.
    """
    out = np.empty(trials, dtype=np.uint8)
    if count == 0:
        out[:] = 1
        return out
    for t0, tn in _trial_chunks(trials, count):
        u = uniform_matrix(seed, trial0 + t0, tn, 0, count)
        u.sort(axis=1)
        gaps = np.diff(u, axis=1)
        wrap = u[:, 0] + 1.0 - u[:, -1]
        biggest = wrap if count == 1 else np.maximum(gaps.max(axis=1), wrap)
        out[t0:t0 + tn] = (biggest > arc_length).astype(np.uint8)
    return out


def first_hit_point(seed: int, trial0: int, trials: int, ball0: int,
                    radii: np.ndarray, point: float) -> np.ndarray:
    """Per trial: offset of the first ball whose closed ball contains the
    point (wrap-around metric), or -1.  Ball ``j`` (offset from the window
    start) draws its center at stream position ``ball0 + j``.
    """
    n = radii.shape[0]
    out = np.full(trials, -1, dtype=np.int64)
    for t0, tn in _trial_chunks(trials, n):
        u = uniform_matrix(seed, trial0 + t0, tn, ball0, n)
        dist = np.abs(u - point)
        np.minimum(dist, 1.0 - dist, out=dist)
        hit = dist <= radii[None, :]
        any_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        out[t0:t0 + tn] = np.where(any_hit, first, -1)
    return out


def first_hit_ranges(seed: int, trial0: int, trials: int, ball0: int,
                     radii: np.ndarray, level: int, prefix: np.ndarray) -> np.ndarray:
    """Per trial: offset of the first ball whose open neighborhood meets a
    marked level cube, or -1.

    ``prefix`` is the inclusive-scan of the target cube indicator: prefix[i]
    counts marked cubes with index < i, so prefix has length 2**level + 1.
    Ball j covers grid indices [floor((u-r)*S), ceil((u+r)*S) - 1] wrapped
    modulo S = 2**level; it hits when that range contains a marked cube.
    """
    n = radii.shape[0]
    size = 1 << level
    total = int(prefix[size])
    scale = float(size)
    out = np.full(trials, -1, dtype=np.int64)
    for t0, tn in _trial_chunks(trials, n):
        u = uniform_matrix(seed, trial0 + t0, tn, ball0, n)
        lo = np.floor((u - radii[None, :]) * scale).astype(np.int64)
        hi = (np.ceil((u + radii[None, :]) * scale) - 1.0).astype(np.int64)
        width_full = (hi - lo + 1) >= size
        lo_m = np.mod(lo, size)
        hi_m = np.mod(hi, size)
        wrapped = hi_m < lo_m
        cnt = np.where(
            wrapped,
            (total - prefix[lo_m]) + prefix[hi_m + 1],
            prefix[hi_m + 1] - prefix[lo_m],
        )
        hit = cnt > 0
        if total > 0:
            hit |= width_full
        else:
            hit &= ~width_full
        any_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        out[t0:t0 + tn] = np.where(any_hit, first, -1)
    return out


def count_in_cube(seed: int, trial0: int, trials: int, ball0: int, nballs: int,
                  level: int, cube_index: int) -> np.ndarray:
    """Per trial: how many of the ``nballs`` window centers land in the level
    cube with the given index (dimension one)."""
    scale = float(1 << level)
    out = np.empty(trials, dtype=np.int64)
    for t0, tn in _trial_chunks(trials, nballs):
        u = uniform_matrix(seed, trial0 + t0, tn, ball0, nballs)
        idx = np.floor(u * scale).astype(np.int64)
        out[t0:t0 + tn] = (idx == cube_index).sum(axis=1)
    return out


def raster_union(lo: np.ndarray, hi: np.ndarray, size: int) -> np.ndarray:
    """Union of wrapped inclusive index ranges [lo_i, hi_i] as a byte mask.

    Entries must satisfy hi >= lo; a width of ``size`` or more marks every
    cell.  Wrapping is modulo ``size``.
    """
    bits = np.zeros(size, dtype=np.uint8)
    if lo.shape[0] == 0:
        return bits
    if ((hi - lo + 1) >= size).any():
        bits[:] = 1
        return bits
    diff = np.zeros(size + 1, dtype=np.int64)
    lo_m = np.mod(lo, size)
    hi_m = np.mod(hi, size)
    wrapped = hi_m < lo_m
    np.add.at(diff, lo_m, 1)
    np.add.at(diff, hi_m + 1, -1)
    if wrapped.any():
        # a wrapped range [lo, size-1] + [0, hi] was added as the empty
        # range [lo, hi]; patch in the missing full sweep [0, size-1]
        nw = int(wrapped.sum())
        diff[0] += nw
        diff[size] -= nw
    covered = np.cumsum(diff[:size]) > 0
    return covered.astype(np.uint8)
