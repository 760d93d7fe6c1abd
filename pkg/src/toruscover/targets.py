"""Deterministic target sets: interval families, self-similar sets and the
two scheduled Cantor-type constructions.

Everything here is exact.  Interval endpoints are fractions, counts are
python ints (they routinely need thousands of bits), and the schedule
builders search for minimal exponents with exact rational inequalities, so
a schedule's reported cardinalities and lengths carry no rounding at all.

The two scheduled constructions:

* ``AvoidanceSchedule``: a nested family whose limit set has packing
  dimension witnessed arbitrarily close to one while the associated
  block-constant covering sequence almost surely misses it.  Level k splits
  every interval into 2^(m_k) children of length delta_k = 2^-(n_1+...+n_k),
  placed leftmost in equal slots, and the covering blocks run between
  consecutive floor(2^(n_k s_k)).
* ``IntersectionSchedule``: a coupled pair of families used to exhibit a
  subset of (covering set) intersect F with box and local dimensions
  min(t, alpha).  Level k covers the circle by inflated arcs of length
  eta_k^beta_k (eta_k = 2^-(m_1+...+m_k)), keeps a maximal disjoint
  subfamily inside each retained interval, recurses in equal slots, and
  tracks the exact cardinalities L_k (refined intervals) and M_k (kept
  arcs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import (
    ceil_fraction,
    dyadic_pair,
    floor_fraction,
    floor_pow2,
    is_dyadic,
    log2_fraction,
    log2_int,
)
from .lengths import BlockConstantLengths

MAX_EXPONENT = 1 << 24
MAX_FAMILY_COUNT = 10**7
LOG2_3 = math.log2(3.0)


class InfeasibleScheduleError(ValueError):
    """Raised when no exponent below the hard cap satisfies the constraints."""


# -- plain interval families --------------------------------------------------


@dataclass(frozen=True)
class IntervalFamily:
    """Finitely many disjoint closed intervals of equal length in [0, 1]."""

    depth: int
    length: Fraction
    offsets: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not (0 < self.length <= 1):
            raise ValueError("interval length must lie in (0, 1]")
        if not self.offsets:
            raise ValueError("family must be nonempty")
        prev_end = None
        for o in self.offsets:
            if o < 0 or o + self.length > 1:
                raise ValueError("interval leaves [0, 1]")
            if prev_end is not None and o < prev_end:
                raise ValueError("offsets must be sorted with disjoint interiors")
            prev_end = o + self.length

    @property
    def count(self) -> int:
        return len(self.offsets)


def interval_mass(family: IntervalFamily, lo: Fraction, hi: Fraction,
                  mode: str = "touching") -> Fraction:
    """Mass the uniform measure on the family assigns to [lo, hi].

    ``touching`` counts every member interval meeting [lo, hi] (an outer
    value), ``inside`` only members contained in it (an inner value); the two
    agree whenever the query endpoints fall in the family's gaps.
    """
    if mode not in ("touching", "inside"):
        raise ValueError("mode must be 'touching' or 'inside'")
    if hi < lo:
        raise ValueError("empty query interval")
    n = 0
    for o in family.offsets:
        if mode == "touching":
            if o <= hi and o + family.length >= lo:
                n += 1
        else:
            if o >= lo and o + family.length <= hi:
                n += 1
    return Fraction(n, family.count)


def family_to_gridset(family: IntervalFamily, grid_level: int, *, covering_mod=None):
    """Cubes of the level grid touching some member interval, as a GridSet.

    Cube i is the half-open [i 2^-n, (i+1) 2^-n); a closed interval [a, b]
    touches it iff a < (i+1) 2^-n and b >= i 2^-n, which makes the marked
    range floor(a 2^n) .. min(floor(b 2^n), 2^n - 1), computed exactly.
    """
    from . import covering as _cov

    size = 1 << grid_level
    marked = set()
    for o in family.offsets:
        a = o * size
        b = (o + family.length) * size
        i_min = floor_fraction(a)
        i_max = min(floor_fraction(b), size - 1)
        marked.update(range(i_min, i_max + 1))
    return _cov.GridSet.from_flat_indices(grid_level, 1, sorted(marked))


def family_to_text(family: IntervalFamily) -> str:
    """Dyadic text form: offsets and length as (numerator, exponent) pairs
    meaning num / 2^exp.  Raises for non-dyadic families."""
    if not is_dyadic(family.length) or not all(is_dyadic(o) for o in family.offsets):
        raise ValueError(
            "family has non-dyadic endpoints; the text format is exact and "
            "dyadic only"
        )
    ln, le = dyadic_pair(family.length)
    lines = [
        "torus-intervals 1",
        f"depth {family.depth}",
        f"count {family.count}",
        f"length {ln} {le}",
    ]
    for o in family.offsets:
        on, oe = dyadic_pair(o)
        lines.append(f"{on} {oe}")
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> IntervalFamily:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != ["torus-intervals", "1"]:
        raise ValueError("not a torus-intervals v1 document")
    header = {}
    for ln in lines[1:3]:
        key, _, val = ln.partition(" ")
        header[key] = int(val)
    if "depth" not in header or "count" not in header:
        raise ValueError("missing depth or count header")
    parts = lines[3].split()
    if len(parts) != 3 or parts[0] != "length":
        raise ValueError("missing length header")
    length = Fraction(int(parts[1]), 1 << int(parts[2]))
    body = lines[4:]
    if len(body) != header["count"]:
        raise ValueError("offset count does not match the header")
    offsets = []
    for ln in body:
        n_s, e_s = ln.split()
        offsets.append(Fraction(int(n_s), 1 << int(e_s)))
    return IntervalFamily(header["depth"], length, tuple(offsets))


# -- simple target specs ------------------------------------------------------


@dataclass(frozen=True)
class FullTorusTarget:
    d: int = 1

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be at least 1")


@dataclass(frozen=True)
class SinglePointTarget:
    point: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.point:
            raise ValueError("point needs at least one coordinate")
        for x in self.point:
            if not (0.0 <= x < 1.0):
                raise ValueError("coordinates must lie in [0, 1)")

    @property
    def d(self) -> int:
        return len(self.point)


@dataclass(frozen=True)
class SelfSimilarCantorTarget:
    """Attractor of ``copies`` maps x -> ratio*x + i*(1-ratio)/(copies-1)
    on [0, 1]; the classical middle-thirds set is ratio 1/3, copies 2."""

    ratio: Fraction
    copies: int = 2

    def __post_init__(self) -> None:
        r = Fraction(self.ratio)
        if not (0 < r < 1):
            raise ValueError("ratio must lie in (0, 1)")
        if self.copies < 2:
            raise ValueError("need at least two copies")
        if self.copies * r > 1:
            raise ValueError("copies overlap: need copies * ratio <= 1")
        object.__setattr__(self, "ratio", r)

    @property
    def d(self) -> int:
        return 1

    def family_at_depth(self, depth: int) -> IntervalFamily:
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if self.copies**depth > MAX_FAMILY_COUNT:
            raise ValueError("family too large to materialize")
        step = (1 - self.ratio) / (self.copies - 1)
        offsets = [Fraction(0)]
        for _ in range(depth):
            offsets = [
                self.ratio * o + i * step
                for o in offsets
                for i in range(self.copies)
            ]
        offsets.sort()
        return IntervalFamily(depth, self.ratio**depth, tuple(offsets))


# -- the avoidance schedule ---------------------------------------------------


@dataclass(frozen=True)
class AvoidanceSchedule:
    """Exponent data of the nested avoided family; see the module docstring.

    ``packing_exponents`` s_k (increasing, in (0, 1)) witness the packing
    dimension from below, ``failure_budgets`` eps_k bound each block's hit
    probability, ``branch_exponents`` m_k and ``length_exponents`` n_k are
    the subdivision counts found by the greedy builder.
    """

    packing_exponents: tuple[Fraction, ...]
    failure_budgets: tuple[Fraction, ...]
    branch_exponents: tuple[int, ...]
    length_exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        k = len(self.packing_exponents)
        if k == 0:
            raise ValueError("schedule needs at least one level")
        if not (len(self.failure_budgets) == len(self.branch_exponents)
                == len(self.length_exponents) == k):
            raise ValueError("all exponent tuples must have equal length")
        prev_s = Fraction(0)
        for s in self.packing_exponents:
            if not (prev_s < s < 1):
                raise ValueError("packing exponents must increase within (0, 1)")
            prev_s = s
        for eps in self.failure_budgets:
            if not (0 < eps < 1):
                raise ValueError("failure budgets must lie in (0, 1)")
        prev_m, prev_n = 0, 0
        for m, n in zip(self.branch_exponents, self.length_exponents):
            if not (prev_m < m < n and prev_n < n):
                raise ValueError(
                    "need m_{k-1} < m_k < n_k and n_{k-1} < n_k at every level"
                )
            prev_m, prev_n = m, n

    @property
    def depth(self) -> int:
        return len(self.branch_exponents)

    def delta_exponent(self, k: int) -> int:
        """delta_k = 2^-(this); level lengths shrink by 2^-n_k each level."""
        self._check_level(k)
        return sum(self.length_exponents[:k])

    def branch_total_exponent(self, k: int) -> int:
        """N_k = 2^(this) intervals at level k."""
        self._check_level(k)
        return sum(self.branch_exponents[:k])

    def delta(self, k: int) -> Fraction:
        return Fraction(1, 1 << self.delta_exponent(k))

    def interval_count(self, k: int) -> int:
        return 1 << self.branch_total_exponent(k)

    def block_range(self, k: int) -> tuple[int, int]:
        """Covering indices of block k as the half-open [start, end):
        boundaries are floor(2^(n_j s_j)), exactly."""
        self._check_level(k)
        if k == 1:
            start = 1
        else:
            start = floor_pow2(
                Fraction(self.length_exponents[k - 2])
                * self.packing_exponents[k - 2]
            )
        end = floor_pow2(
            Fraction(self.length_exponents[k - 1]) * self.packing_exponents[k - 1]
        )
        return start, end

    def block_width(self, k: int) -> int:
        start, end = self.block_range(k)
        return end - start

    def hit_probability_exponent(self, k: int) -> int:
        """Per-ball hit probability of level k is exactly 2^(this): a block-k
        ball of diameter delta_k hits the level family iff its center falls
        within delta_k/2 of one of the N_k intervals, a union of measure
        N_k * 2 * delta_k (the slots are wide enough that the inflated
        intervals stay disjoint)."""
        self._check_level(k)
        return 1 + self.branch_total_exponent(k) - self.delta_exponent(k)

    def block_miss_bound(self, k: int) -> float:
        """The closed-form bound 3 N_k 2^(n_k s_k) delta_k on the probability
        that some block-k ball hits the level family (real exponent)."""
        self._check_level(k)
        exponent = (
            self.branch_total_exponent(k)
            + float(Fraction(self.length_exponents[k - 1])
                    * self.packing_exponents[k - 1])
            - self.delta_exponent(k)
        )
        return 3.0 * 2.0**exponent

    def block_bound_holds(self, k: int) -> bool:
        """Exact check that the block bound is at most the failure budget:
        3 * 2^(M_k - D_k + n_k s_k) <= eps_k, raised to the s_k denominator
        so both sides are integers."""
        self._check_level(k)
        s = self.packing_exponents[k - 1]
        n = self.length_exponents[k - 1]
        eps = self.failure_budgets[k - 1]
        q = s.denominator
        shift = (self.branch_total_exponent(k) - self.delta_exponent(k)) * q \
            + n * s.numerator
        lhs = 3**q * eps.denominator**q
        rhs = eps.numerator**q
        if shift >= 0:
            lhs <<= shift
        else:
            rhs <<= -shift
        return lhs <= rhs

    def family(self, k: int) -> IntervalFamily:
        """Materialize level k (leftmost slot placement); capped by count."""
        self._check_level(k)
        if self.interval_count(k) > MAX_FAMILY_COUNT:
            raise ValueError(
                f"level {k} has 2^{self.branch_total_exponent(k)} intervals; "
                "too many to materialize"
            )
        offsets = [Fraction(0)]
        parent_len = Fraction(1)
        for j in range(1, k + 1):
            m = self.branch_exponents[j - 1]
            slot = parent_len / (1 << m)
            offsets = [o + i * slot for o in offsets for i in range(1 << m)]
            parent_len = parent_len / (1 << self.length_exponents[j - 1])
        offsets.sort()
        return IntervalFamily(k, parent_len, tuple(offsets))

    def to_block_lengths(self) -> BlockConstantLengths:
        """The associated covering sequence: diameter delta_k on block k.
        The final block is extended to infinity by the block-constant
        convention; diagnostics should stop at the schedule horizon."""
        blocks = []
        for k in range(1, self.depth + 1):
            start, _ = self.block_range(k)
            blocks.append((self.delta(k), start))
        return BlockConstantLengths(tuple(blocks))

    def horizon(self) -> int:
        """Last covering index the schedule describes."""
        return self.block_range(self.depth)[1] - 1

    def _check_level(self, k: int) -> None:
        if not (1 <= k <= self.depth):
            raise ValueError(f"level {k} outside 1..{self.depth}")


def build_avoidance_schedule(
    packing_exponents: tuple[Fraction, ...],
    failure_budgets: tuple[Fraction, ...],
) -> AvoidanceSchedule:
    """Greedy minimal exponents for the avoidance construction.

    Level by level, m_k is the least exponent above m_{k-1} making the level
    nondegenerate (N_k delta_k^{s_k} >= 1, an exact rational inequality) and
    n_k is the least exponent above max(n_{k-1}, m_k) whose closed-form block
    bound fits the failure budget and whose boundary exponent n_k s_k clears
    the previous one by at least 1, so the covering block cannot come out
    empty.  Raises when a search passes the cap.
    """
    s_list = tuple(Fraction(s) for s in packing_exponents)
    eps_list = tuple(Fraction(e) for e in failure_budgets)
    if len(s_list) != len(eps_list):
        raise ValueError("need one failure budget per packing exponent")
    ms: list[int] = []
    ns: list[int] = []
    m_total = 0  # M_{k-1}
    d_total = 0  # D_{k-1}
    for k, (s, eps) in enumerate(zip(s_list, eps_list), start=1):
        prev_m = ms[-1] if ms else 0
        prev_n = ns[-1] if ns else 0
        # nondegeneracy: m (1 - s) >= s D_{k-1} - M_{k-1}
        need = (s * d_total - m_total) / (1 - s)
        m = max(prev_m + 1, ceil_fraction(need))
        if m > MAX_EXPONENT:
            raise InfeasibleScheduleError(
                f"level {k}: branch exponent {m} beyond the cap {MAX_EXPONENT}"
            )
        m_total_k = m_total + m

        # block bound: 3 * 2^(M_k - D_{k-1} - n(1-s)) <= eps, exact via ^q
        q = s.denominator
        p = s.numerator
        prev_edge = Fraction(prev_n) * s_list[k - 2] if k > 1 else Fraction(0)

        def bound_ok(n: int) -> bool:
            shift = (m_total_k - d_total) * q - n * (q - p)
            lhs = 3**q * eps.denominator**q
            rhs = eps.numerator**q
            if shift >= 0:
                lhs <<= shift
            else:
                rhs <<= -shift
            return lhs <= rhs

        def feasible(n: int) -> bool:
            # the boundary exponent must advance by a whole power of two,
            # else floor(2^(n s)) can land on the block start and leave the
            # covering block empty; (2^b, 2^(b+1)] always holds an integer
            if n * s < prev_edge + 1:
                return False
            return bound_ok(n)

        base = max(prev_n + 1, m + 1)
        est = (m_total_k - d_total + LOG2_3 - log2_fraction(eps)) / float(1 - s)
        n = max(base, int(math.ceil(est)) - 2)
        while not feasible(n):
            n += 1
            if n > MAX_EXPONENT:
                raise InfeasibleScheduleError(
                    f"level {k}: length exponent beyond the cap {MAX_EXPONENT}"
                )
        while n - 1 >= base and feasible(n - 1):
            n -= 1
        ms.append(m)
        ns.append(n)
        m_total = m_total_k
        d_total += n
    schedule = AvoidanceSchedule(s_list, eps_list, tuple(ms), tuple(ns))
    for k in range(1, schedule.depth + 1):
        start, end = schedule.block_range(k)
        if end <= start:
            raise InfeasibleScheduleError(f"level {k}: empty covering block")
        if not schedule.block_bound_holds(k):
            raise InfeasibleScheduleError(f"level {k}: block bound failed")
    return schedule


# -- the intersection schedule ------------------------------------------------


@dataclass(frozen=True)
class IntersectionSchedule:
    """Exponent data of the coupled construction; see the module docstring.

    ``length_exponents`` n_k grow the refined interval family (target side),
    ``cover_exponents`` m_k grow the arc scale (covering side), interleaved
    n_1 < m_1 < n_2 < m_2 < ...; ``inflation_exponents`` beta_k < alpha are
    the arc inflation powers, with beta_k * H_k an integer so eta_k^beta_k
    is an exact dyadic length.
    """

    target_dim: Fraction
    growth_exponent: Fraction
    inflation_exponents: tuple[Fraction, ...]
    length_exponents: tuple[int, ...]
    cover_exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        t = Fraction(self.target_dim)
        a = Fraction(self.growth_exponent)
        if not (0 <= t < 1):
            raise ValueError("target dimension must lie in [0, 1)")
        if not (0 < a < 1):
            raise ValueError("growth exponent must lie in (0, 1)")
        depth = len(self.length_exponents)
        if depth == 0:
            raise ValueError("schedule needs at least one level")
        if not (len(self.cover_exponents) == len(self.inflation_exponents) == depth):
            raise ValueError("all exponent tuples must have equal length")
        prev = 0
        for n, m in zip(self.length_exponents, self.cover_exponents):
            if not (prev < n < m):
                raise ValueError("need strict interleaving n_1 < m_1 < n_2 < ...")
            prev = m
        h = 0
        d_total = 0
        for idx, (n, m, beta) in enumerate(
            zip(self.length_exponents, self.cover_exponents,
                self.inflation_exponents),
            start=1,
        ):
            beta = Fraction(beta)
            if not (0 < beta < a):
                raise ValueError("inflation exponents must lie in (0, alpha)")
            d_total += n
            h += m
            bh = beta * h
            if bh.denominator != 1:
                raise ValueError(
                    f"level {idx}: beta_k * H_k = {bh} is not an integer"
                )
            if bh.numerator < d_total + 4:
                raise ValueError(
                    f"level {idx}: arcs too long; need beta_k H_k >= D_k + 4"
                )
        object.__setattr__(self, "target_dim", t)
        object.__setattr__(self, "growth_exponent", a)
        object.__setattr__(
            self, "inflation_exponents",
            tuple(Fraction(b) for b in self.inflation_exponents),
        )
        # exact level cardinalities, computed once
        counts = _intersection_counts(self)
        object.__setattr__(self, "_counts", counts)

    @property
    def depth(self) -> int:
        return len(self.length_exponents)

    def delta_exponent(self, k: int) -> int:
        self._check_level(k)
        return sum(self.length_exponents[:k])

    def eta_exponent(self, k: int) -> int:
        self._check_level(k)
        return sum(self.cover_exponents[:k])

    def delta(self, k: int) -> Fraction:
        return Fraction(1, 1 << self.delta_exponent(k))

    def eta(self, k: int) -> Fraction:
        return Fraction(1, 1 << self.eta_exponent(k))

    def arc_length(self, k: int) -> Fraction:
        """eta_k^beta_k, an exact dyadic length."""
        self._check_level(k)
        bh = self.inflation_exponents[k - 1] * self.eta_exponent(k)
        return Fraction(1, 1 << bh.numerator)

    def refined_count(self, k: int) -> int:
        """L_k: refined target intervals at level k."""
        self._check_level(k)
        return self._counts["L"][k - 1]

    def kept_arc_count(self, k: int) -> int:
        """M_k: disjoint arcs kept inside the refined intervals at level k."""
        self._check_level(k)
        return self._counts["M"][k - 1]

    def slot_count(self, k: int) -> int:
        """S_k: slots per kept arc when refining to level k (k >= 2)."""
        self._check_level(k)
        if k == 1:
            raise ValueError("slots start at level 2")
        return self._counts["S"][k - 1]

    def keep_per_interval(self, k: int) -> int:
        """floor(delta_k / (3 eta_k^beta_k)): arcs kept in each interval.
        A zero-dimensional target keeps a single arc instead, collapsing
        the family to one nested chain."""
        self._check_level(k)
        return self._counts["keep"][k - 1]

    def cover_block(self, k: int) -> tuple[int, int]:
        """Covering indices of stage k as the half-open [start, end) with
        boundaries floor(2^(m_j alpha)), exactly."""
        self._check_level(k)
        if k == 1:
            start = 1
        else:
            start = floor_pow2(
                Fraction(self.cover_exponents[k - 2]) * self.growth_exponent
            )
        end = floor_pow2(
            Fraction(self.cover_exponents[k - 1]) * self.growth_exponent
        )
        return start, end

    def cover_failure_log2_bound(self, k: int) -> float:
        """log2 of the closed-form bound on the stage-k conditioning failure:
        3 eta^-beta (1 - eta^beta / 2)^(W_k) with W_k the block width.

        The decay term W log2(1 - eta^beta/2) is kept in exponent space: the
        widths reach 2^(10^6) and the arc lengths 2^(-10^6), far outside the
        double range.  The width itself is only computed exactly while the
        block exponents stay small; past that the exact value would need a
        root of a multi-million-bit integer and log2(W) is taken in floats,
        where the floor corrections are below the last double bit anyway.
        """
        self._check_level(k)
        exp_end = Fraction(self.cover_exponents[k - 1]) * self.growth_exponent
        exp_start = (Fraction(0) if k == 1 else
                     Fraction(self.cover_exponents[k - 2]) *
                     self.growth_exponent)
        bh = float(self.inflation_exponents[k - 1] * self.eta_exponent(k))
        if exp_end <= 4096:
            start, end = self.cover_block(k)
            width = end - start
            if width <= 0:
                return math.inf
            log2_w = log2_int(width)
        else:
            width = None
            gap = float(exp_end - exp_start)
            log2_w = float(exp_end)
            if gap <= 60.0:
                log2_w += math.log1p(-(2.0 ** -gap)) / math.log(2.0)
        if width is None:
            magnitude = log2_w - (bh + 1.0) - math.log2(math.log(2.0))
            product = -math.inf if magnitude > 1000.0 else -(2.0 ** magnitude)
            return LOG2_3 + bh + product
        if bh <= 45.0 and width < 2**53:
            product = float(width) * math.log2(1.0 - 2.0 ** -(bh + 1.0))
        else:
            # |W log2(1-x)| = W x / ln 2 up to O(x), in exponents:
            magnitude = log2_w - (bh + 1.0) - math.log2(math.log(2.0))
            product = -math.inf if magnitude > 1000.0 else -(2.0 ** magnitude)
        return LOG2_3 + bh + product

    def to_block_lengths(self) -> BlockConstantLengths:
        """The associated covering sequence: diameter eta_k on block k."""
        blocks = []
        for k in range(1, self.depth + 1):
            start, _ = self.cover_block(k)
            blocks.append((self.eta(k), start))
        return BlockConstantLengths(tuple(blocks))

    def horizon(self) -> int:
        return self.cover_block(self.depth)[1] - 1

    def _check_level(self, k: int) -> None:
        if not (1 <= k <= self.depth):
            raise ValueError(f"level {k} outside 1..{self.depth}")


def _intersection_counts(sched: IntersectionSchedule) -> dict:
    """Exact L_k, M_k, S_k and keep counts from the recurrences."""
    t = sched.target_dim
    l_counts: list[int] = []
    m_counts: list[int] = []
    s_counts: list[int] = []
    keeps: list[int] = []
    h = 0
    d_total = 0
    l_prev_m = 1
    for k in range(1, sched.depth + 1):
        n = sched.length_exponents[k - 1]
        m = sched.cover_exponents[k - 1]
        d_total += n
        h += m
        if k == 1:
            l_k = 1 << floor_fraction(Fraction(n) * t)
            s_k = 0
        else:
            if t == 0:
                l_k = l_prev_m  # one slot per kept arc when t = 0
                s_k = 0
            else:
                exp = floor_fraction(Fraction(n) * t) - (h - m) + (d_total - n)
                if exp < 2:
                    raise ValueError(
                        f"level {k}: slot count 2^{exp} below 3; lengthen n_{k}"
                    )
                s_k = 1 << exp
                l_k = l_prev_m * (s_k - 2)
        bh = (sched.inflation_exponents[k - 1] * h).numerator
        if t == 0:
            # a zero-dimensional target keeps a single arc per interval, so
            # the family collapses to one nested chain (a point in the limit)
            keep = 1
        else:
            keep = (1 << (bh - d_total)) // 3
            if keep < 1:
                raise ValueError(f"level {k}: no room for a kept arc per interval")
        m_k = l_k * keep
        l_counts.append(l_k)
        m_counts.append(m_k)
        s_counts.append(s_k)
        keeps.append(keep)
        l_prev_m = m_k
    return {"L": l_counts, "M": m_counts, "S": s_counts, "keep": keeps}


def build_intersection_schedule(
    target_dim,
    growth_exponent,
    depth: int = 3,
    ratio_tol: Fraction = Fraction(1, 20),
    intermediate_slack: Fraction = Fraction(1, 20),
    inflation_exponents: tuple[Fraction, ...] | None = None,
) -> IntersectionSchedule:
    """Greedy minimal exponents for the intersection construction.

    Each n_k is the least exponent keeping the refined-family growth ratio
    log2(L_k) / D_k within the slack of the target dimension (and the slot
    count at least 4); each m_k is the least exponent in the residue class
    making beta_k H_k an integer that keeps the kept-arc growth ratio
    log2(M_k) / H_k within the slack of beta_k, subject to the arc-length
    constraint beta_k H_k >= D_k + 4.  The final level runs at the tight
    tolerance so the reported box-count slopes land within ``ratio_tol`` of
    the targets.  All the inequalities are exact (big integer comparisons).
    """
    t = Fraction(target_dim)
    a = Fraction(growth_exponent)
    if not (0 <= t < 1):
        raise ValueError("target dimension must lie in [0, 1)")
    if not (0 < a < 1):
        raise ValueError("growth exponent must lie in (0, 1)")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    ratio_tol = Fraction(ratio_tol)
    intermediate_slack = Fraction(intermediate_slack)
    if inflation_exponents is None:
        betas = tuple(a * (1 - Fraction(1, 4**k)) for k in range(1, depth + 1))
    else:
        betas = tuple(Fraction(b) for b in inflation_exponents)
        if len(betas) != depth:
            raise ValueError("need one inflation exponent per level")
    gap = a - betas[-1]
    if gap >= ratio_tol:
        raise InfeasibleScheduleError(
            f"final inflation exponent {betas[-1]} sits {gap} below alpha; "
            f"the kept-arc ratio can never reach alpha - {ratio_tol}"
        )

    ns: list[int] = []
    ms: list[int] = []
    h = 0
    d_total = 0
    l_prev_m = 1  # M_{k-1}; level 1 uses one root interval
    for k in range(1, depth + 1):
        is_final = k == depth
        slack_l = ratio_tol if is_final else intermediate_slack
        slack_m = (ratio_tol - (a - betas[k - 1])) if is_final else intermediate_slack
        if slack_m <= 0:
            raise InfeasibleScheduleError(
                f"level {k}: no slack left for the kept-arc ratio"
            )

        # --- n_k: least exponent with enough slots and a tight L ratio ---
        def l_count_at(n: int) -> tuple[int, int]:
            d_k = d_total + n
            if k == 1:
                return 1 << floor_fraction(Fraction(n) * t), d_k
            if t == 0:
                return l_prev_m, d_k
            exp = floor_fraction(Fraction(n) * t) - h + d_total
            if exp < 2:
                return 0, d_k
            return l_prev_m * ((1 << exp) - 2), d_k

        def n_ok(n: int) -> bool:
            l_k, d_k = l_count_at(n)
            if l_k < 1:
                return False
            if t == 0:
                return True
            # log2(L_k) >= (t - slack) * D_k, exactly
            need = (t - slack_l) * d_k
            if need <= 0:
                return True
            return l_k >= 1 << ceil_fraction(need)

        n_lo = ms[-1] + 1 if ms else 1
        n = _least_true(n_ok, n_lo, MAX_EXPONENT,
                        f"level {k}: no feasible length exponent")
        ns.append(n)
        # l_count_at reads the running totals, so take the count before
        # advancing them
        l_k, _ = l_count_at(n)
        d_total += n

        # --- m_k: least exponent in the beta residue class with a tight
        # M ratio and short enough arcs ---
        q = betas[k - 1].denominator

        def m_ok(m: int) -> bool:
            h_k = h + m
            bh = betas[k - 1] * h_k
            if bh.denominator != 1:
                return False
            if bh.numerator < d_total + 4:
                return False
            if t == 0:
                # single-chain family: no kept-arc growth to enforce
                return True
            keep = (1 << (bh.numerator - d_total)) // 3
            if keep < 1:
                return False
            m_count = l_k * keep
            need = (betas[k - 1] - slack_m) * h_k
            if need <= 0:
                return True
            return m_count >= 1 << ceil_fraction(need)

        # the residue class of m modulo q making beta * (h + m) an integer
        m_lo = n + 1
        m = _least_true_in_class(m_ok, m_lo, q, betas[k - 1], h, MAX_EXPONENT,
                                 f"level {k}: no feasible cover exponent")
        ms.append(m)
        h += m
        bh = (betas[k - 1] * h).numerator
        keep = 1 if t == 0 else (1 << (bh - d_total)) // 3
        l_prev_m = l_k * keep

    return IntersectionSchedule(t, a, betas, tuple(ns), tuple(ms))


def _least_true(pred, lo: int, cap: int, fail_msg: str) -> int:
    """Least integer >= lo satisfying a predicate that is monotone up to
    bounded floor noise: bracket by doubling, binary search, then walk down."""
    hi = lo
    while not pred(hi):
        hi = max(hi + 1, hi * 2)
        if hi > cap:
            raise InfeasibleScheduleError(fail_msg)
    lo_search = lo
    while lo_search < hi:
        mid = (lo_search + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo_search = mid + 1
    n = lo_search
    while n - 1 >= lo and pred(n - 1):
        n -= 1
    return n


def _least_true_in_class(pred, lo: int, q: int, beta: Fraction, h_prev: int,
                         cap: int, fail_msg: str) -> int:
    """Least m >= lo with beta*(h_prev+m) integral and pred(m) true."""
    # find the residue r mod q with beta*(h_prev + r) integral; beta = p/q in
    # lowest terms, so p*(h_prev + m) = 0 mod q iff m = -h_prev mod q
    first = lo + (-(h_prev + lo)) % q
    # bracket by doubling the step count, then binary search on it
    step = 0
    while not pred(first + step * q):
        step = max(step + 1, step * 2)
        if first + step * q > cap:
            raise InfeasibleScheduleError(fail_msg)
    lo_s, hi_s = 0, step
    while lo_s < hi_s:
        mid = (lo_s + hi_s) // 2
        if pred(first + mid * q):
            hi_s = mid
        else:
            lo_s = mid + 1
    m = first + lo_s * q
    while m - q >= first and pred(m - q):
        m -= q
    return m


# -- target spec union and dimensions ----------------------------------------


@dataclass(frozen=True)
class ScheduledTarget:
    schedule: "AvoidanceSchedule | IntersectionSchedule"

    @property
    def d(self) -> int:
        return 1


TargetSpec = (
    FullTorusTarget | SinglePointTarget | SelfSimilarCantorTarget | ScheduledTarget
)


@dataclass(frozen=True)
class DimensionReport:
    hausdorff: float
    packing: float
    hausdorff_exact: bool
    packing_exact: bool
    detail: str


def analytic_dimensions(target) -> DimensionReport:
    """Hausdorff and packing dimensions of a target set.

    Exact for the full torus, points and self-similar sets.  For an
    avoidance schedule the Hausdorff value is the finite-depth mass
    distribution bound min_k M_k / D_k (a lower bound estimate) and the
    packing value is the deepest witnessed exponent s_K, which approaches
    one as the schedule deepens.  For an intersection schedule the target
    family has Hausdorff dimension exactly t.
    """
    if isinstance(target, FullTorusTarget):
        d = float(target.d)
        return DimensionReport(d, d, True, True, "the whole torus")
    if isinstance(target, SinglePointTarget):
        return DimensionReport(0.0, 0.0, True, True, "a single point")
    if isinstance(target, SelfSimilarCantorTarget):
        s = math.log(target.copies) / -math.log(float(target.ratio))
        return DimensionReport(
            s, s, True, True,
            f"self-similar with {target.copies} maps of ratio {target.ratio}; "
            "open set condition holds",
        )
    if isinstance(target, ScheduledTarget):
        sched = target.schedule
        if isinstance(sched, AvoidanceSchedule):
            bound = min(
                sched.branch_total_exponent(k) / sched.delta_exponent(k)
                for k in range(1, sched.depth + 1)
            )
            witness = float(sched.packing_exponents[-1])
            return DimensionReport(
                bound, witness, False, False,
                "avoidance family: Hausdorff value is the finite-depth mass "
                "bound min_k log2(N_k)/log2(1/delta_k); packing value is the "
                "deepest witnessed exponent and tends to one with depth",
            )
        t = float(sched.target_dim)
        packing = 1.0 if sched.target_dim > 0 else 0.0
        return DimensionReport(
            t, packing, True, False,
            "intersection family: the refined family is engineered with "
            "log2(L_k)/D_k -> t, so the Hausdorff dimension is t; the "
            "packing value reflects the spread at covering scales",
        )
    raise TypeError(f"not a target spec: {target!r}")
