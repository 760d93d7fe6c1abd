# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of pykern.py.

Same functions, same floating point semantics.  The module is built with
-ffp-contract=off so that no fused multiply-adds sneak in; every arithmetic
expression below matches the numpy reference operation for operation, and the
test suite asserts bit identity between the two backends.
"""

from libc.stdlib cimport malloc, free, qsort
from libc.math cimport floor, ceil, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

cdef unsigned long long _GOLD = 0x9E3779B97F4A7C15ULL
cdef unsigned long long _MIXA = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long _MIXB = 0x94D049BB133111EBULL
cdef double _UNIT = 1.0 / 9007199254740992.0  # 2**-53


cdef inline unsigned long long _out64(unsigned long long seed,
                                      unsigned long long index) noexcept nogil:
    cdef unsigned long long z = seed + (index + 1ULL) * _GOLD
    z ^= z >> 30
    z *= _MIXA
    z ^= z >> 27
    z *= _MIXB
    z ^= z >> 31
    return z


cdef inline double _u01(unsigned long long seed,
                        unsigned long long index) noexcept nogil:
    return <double>(_out64(seed, index) >> 11) * _UNIT


def mix64(seed, index):
    """Scalar splitmix64 output, used for deriving child seeds."""
    return int(_out64(<unsigned long long>(seed & MASK64),
                      <unsigned long long>(index & MASK64)))


def raw_words(seed, start, count):
    """splitmix64 outputs at stream positions [start, start + count)."""
    cdef Py_ssize_t n = count
    out = np.empty(n, dtype=np.uint64)
    cdef unsigned long long[::1] view = out
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long base = <unsigned long long>(start & MASK64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = _out64(s, base + <unsigned long long>i)
    return out


def uniforms(seed, start, count):
    """Uniform [0,1) doubles at stream positions [start, start + count)."""
    cdef Py_ssize_t n = count
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long base = <unsigned long long>(start & MASK64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = _u01(s, base + <unsigned long long>i)
    return out


def uniform_matrix(seed, trial0, trials, start, count):
    """One row of ``count`` uniforms per trial, row t seeded with
    mix64(seed, trial0 + t)."""
    cdef Py_ssize_t nt = trials
    cdef Py_ssize_t nc = count
    out = np.empty((nt, nc), dtype=np.float64)
    cdef double[:, ::1] view = out
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long t0 = <unsigned long long>(trial0 & MASK64)
    cdef unsigned long long base = <unsigned long long>(start & MASK64)
    cdef unsigned long long st
    cdef Py_ssize_t t, j
    with nogil:
        for t in range(nt):
            st = _out64(s, t0 + <unsigned long long>t)
            for j in range(nc):
                view[t, j] = _u01(st, base + <unsigned long long>j)
    return out


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*>a)[0]
    cdef double y = (<const double*>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def cover_miss_flags(seed, trial0, trials, count, arc_length):
    """Per trial: 1 if ``count`` closed arcs of length ``arc_length`` centered
    at uniform points fail to cover the circle, else 0."""
    cdef Py_ssize_t nt = trials
    cdef Py_ssize_t nc = count
    out = np.empty(nt, dtype=np.uint8)
    cdef unsigned char[::1] view = out
    cdef double arc = arc_length
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long t0 = <unsigned long long>(trial0 & MASK64)
    cdef unsigned long long st
    cdef Py_ssize_t t, j
    cdef double gap, biggest
    cdef double* buf
    if nc == 0:
        out[:] = 1
        return out
    buf = <double*>malloc(nc * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(nt):
                st = _out64(s, t0 + <unsigned long long>t)
                for j in range(nc):
                    buf[j] = _u01(st, <unsigned long long>j)
                qsort(buf, nc, sizeof(double), _cmp_double)
                biggest = buf[0] + 1.0 - buf[nc - 1]
                for j in range(nc - 1):
                    gap = buf[j + 1] - buf[j]
                    if gap > biggest:
                        biggest = gap
                view[t] = 1 if biggest > arc else 0
    finally:
        free(buf)
    return out


def first_hit_point(seed, trial0, trials, ball0, radii, point):
    """Per trial: offset of the first ball containing the point, or -1."""
    cdef Py_ssize_t nt = trials
    cdef double[::1] rad = np.ascontiguousarray(radii, dtype=np.float64)
    cdef Py_ssize_t n = rad.shape[0]
    out = np.empty(nt, dtype=np.int64)
    cdef long long[::1] view = out
    cdef double x = point
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long t0 = <unsigned long long>(trial0 & MASK64)
    cdef unsigned long long b0 = <unsigned long long>(ball0 & MASK64)
    cdef unsigned long long st
    cdef Py_ssize_t t, j
    cdef double u, dist
    cdef long long found
    with nogil:
        for t in range(nt):
            st = _out64(s, t0 + <unsigned long long>t)
            found = -1
            for j in range(n):
                u = _u01(st, b0 + <unsigned long long>j)
                dist = fabs(u - x)
                if 1.0 - dist < dist:
                    dist = 1.0 - dist
                if dist <= rad[j]:
                    found = j
                    break
            view[t] = found
    return out


def first_hit_ranges(seed, trial0, trials, ball0, radii, level, prefix):
    """Per trial: offset of the first ball whose grid range holds a marked
    cube, or -1.  See the reference backend for the range conventions."""
    cdef Py_ssize_t nt = trials
    cdef double[::1] rad = np.ascontiguousarray(radii, dtype=np.float64)
    cdef long long[::1] pre = np.ascontiguousarray(prefix, dtype=np.int64)
    cdef Py_ssize_t n = rad.shape[0]
    cdef long long size = 1LL << <int>level
    cdef long long total = pre[size]
    cdef double scale = <double>size
    out = np.empty(nt, dtype=np.int64)
    cdef long long[::1] view = out
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long t0 = <unsigned long long>(trial0 & MASK64)
    cdef unsigned long long b0 = <unsigned long long>(ball0 & MASK64)
    cdef unsigned long long st
    cdef Py_ssize_t t, j
    cdef double u
    cdef long long lo, hi, lo_m, hi_m, cnt, found
    cdef bint hit
    with nogil:
        for t in range(nt):
            st = _out64(s, t0 + <unsigned long long>t)
            found = -1
            for j in range(n):
                u = _u01(st, b0 + <unsigned long long>j)
                lo = <long long>floor((u - rad[j]) * scale)
                hi = <long long>(ceil((u + rad[j]) * scale) - 1.0)
                if hi - lo + 1 >= size:
                    hit = total > 0
                else:
                    lo_m = lo % size
                    if lo_m < 0:
                        lo_m += size
                    hi_m = hi % size
                    if hi_m < 0:
                        hi_m += size
                    if hi_m < lo_m:
                        cnt = (total - pre[lo_m]) + pre[hi_m + 1]
                    else:
                        cnt = pre[hi_m + 1] - pre[lo_m]
                    hit = cnt > 0
                if hit:
                    found = j
                    break
            view[t] = found
    return out


def count_in_cube(seed, trial0, trials, ball0, nballs, level, cube_index):
    """Per trial: how many of the window centers land in the level cube."""
    cdef Py_ssize_t nt = trials
    cdef Py_ssize_t n = nballs
    cdef double scale = <double>(1LL << <int>level)
    cdef long long target = cube_index
    out = np.empty(nt, dtype=np.int64)
    cdef long long[::1] view = out
    cdef unsigned long long s = <unsigned long long>(seed & MASK64)
    cdef unsigned long long t0 = <unsigned long long>(trial0 & MASK64)
    cdef unsigned long long b0 = <unsigned long long>(ball0 & MASK64)
    cdef unsigned long long st
    cdef Py_ssize_t t, j
    cdef long long acc
    with nogil:
        for t in range(nt):
            st = _out64(s, t0 + <unsigned long long>t)
            acc = 0
            for j in range(n):
                if <long long>floor(_u01(st, b0 + <unsigned long long>j) * scale) == target:
                    acc += 1
            view[t] = acc
    return out


def raster_union(lo, hi, size):
    """Union of wrapped inclusive index ranges [lo_i, hi_i] as a byte mask."""
    cdef long long[::1] lo_v = np.ascontiguousarray(lo, dtype=np.int64)
    cdef long long[::1] hi_v = np.ascontiguousarray(hi, dtype=np.int64)
    cdef Py_ssize_t m = lo_v.shape[0]
    cdef long long n = size
    bits = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] bview = bits
    if m == 0:
        return bits
    diff = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] dview = diff
    cdef Py_ssize_t i
    cdef long long a, b, acc
    cdef bint full = 0
    with nogil:
        for i in range(m):
            if hi_v[i] - lo_v[i] + 1 >= n:
                full = 1
                break
        if not full:
            for i in range(m):
                a = lo_v[i] % n
                if a < 0:
                    a += n
                b = hi_v[i] % n
                if b < 0:
                    b += n
                dview[a] += 1
                dview[b + 1] -= 1
                if b < a:
                    dview[0] += 1
                    dview[n] -= 1
            acc = 0
            for i in range(n):
                acc += dview[i]
                bview[i] = 1 if acc > 0 else 0
    if full:
        bits[:] = 1
    return bits
