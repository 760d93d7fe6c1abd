"""Target specs and the two scheduled constructions.

The avoidance and intersection builders both return schedules whose counts
are recomputed from first principles here (and, for the canonical
parameters, pinned to exact frozen exponents), so a regression in the greedy
search or the count recurrences turns up as an integer mismatch rather than
a drifting Monte Carlo statistic.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toruscover.covering import GridSet
from toruscover.exactmath import floor_pow2
from toruscover.targets import (
    AvoidanceSchedule,
    DimensionReport,
    FullTorusTarget,
    InfeasibleScheduleError,
    IntersectionSchedule,
    IntervalFamily,
    ScheduledTarget,
    SelfSimilarCantorTarget,
    SinglePointTarget,
    analytic_dimensions,
    build_avoidance_schedule,
    build_intersection_schedule,
    family_from_text,
    family_to_gridset,
    family_to_text,
    interval_mass,
)

CANONICAL_PACKING = (Fraction(1, 2), Fraction(3, 4), Fraction(7, 8))
CANONICAL_BUDGETS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))

# Frozen output of the greedy avoidance builder on the canonical request.
CANONICAL_BRANCH = (1, 20, 357)
CANONICAL_LENGTH = (8, 67, 2461)
CANONICAL_MISS_BOUNDS = (0.375, 0.2229763340630102, 0.12157870824853215)

# A hand-checkable two-level intersection schedule; see the count assertions.
DEMO_SCHEDULE = dict(
    target_dim=Fraction(3, 10),
    growth_exponent=Fraction(3, 5),
    inflation_exponents=(Fraction(9, 20), Fraction(11, 20)),
    length_exponents=(5, 57),
    cover_exponents=(20, 120),
)


def demo_schedule() -> IntersectionSchedule:
    return IntersectionSchedule(**DEMO_SCHEDULE)


# -- interval families --------------------------------------------------------


def test_interval_family_validation():
    IntervalFamily(1, Fraction(1, 4), (Fraction(0), Fraction(1, 2)))
    with pytest.raises(ValueError):
        IntervalFamily(1, Fraction(1, 4), ())
    with pytest.raises(ValueError):
        IntervalFamily(1, Fraction(1, 4), (Fraction(7, 8),))  # leaves [0,1]
    with pytest.raises(ValueError):
        IntervalFamily(1, Fraction(1, 4), (Fraction(1, 2), Fraction(0)))
    with pytest.raises(ValueError):
        IntervalFamily(1, Fraction(1, 4), (Fraction(0), Fraction(1, 8)))


def test_interval_mass_modes():
    fam = IntervalFamily(
        1, Fraction(1, 8), (Fraction(0), Fraction(1, 2), Fraction(3, 4))
    )
    # query cutting through the middle interval
    lo, hi = Fraction(9, 16), Fraction(13, 16)
    assert interval_mass(fam, lo, hi, "touching") == Fraction(2, 3)
    assert interval_mass(fam, lo, hi, "inside") == Fraction(0)
    # query aligned with gaps: both modes agree
    lo, hi = Fraction(7, 16), Fraction(1)
    assert interval_mass(fam, lo, hi, "touching") == Fraction(2, 3)
    assert interval_mass(fam, lo, hi, "inside") == Fraction(2, 3)
    with pytest.raises(ValueError):
        interval_mass(fam, Fraction(1), Fraction(0))


def test_middle_thirds_gridset_cube_count():
    fam = SelfSimilarCantorTarget(Fraction(1, 3), 2).family_at_depth(2)
    gs = family_to_gridset(fam, 4)
    assert isinstance(gs, GridSet)
    # hand count: [0,1/9]->2 cells, [2/9,1/3]->3, [2/3,7/9]->3, [8/9,1]->2
    assert gs.count() == 10
    assert gs.flat_indices().tolist() == [0, 1, 3, 4, 5, 10, 11, 12, 14, 15]


def test_family_text_roundtrip():
    fam = IntervalFamily(
        3, Fraction(1, 64), (Fraction(0), Fraction(5, 32), Fraction(63, 64))
    )
    text = family_to_text(fam)
    assert text.splitlines()[0] == "torus-intervals 1"
    assert family_from_text(text) == fam


def test_family_text_rejects_non_dyadic():
    fam = SelfSimilarCantorTarget(Fraction(1, 3), 2).family_at_depth(1)
    with pytest.raises(ValueError):
        family_to_text(fam)


def test_family_text_rejects_malformed():
    good = family_to_text(IntervalFamily(0, Fraction(1, 2), (Fraction(0),)))
    with pytest.raises(ValueError):
        family_from_text(good.replace("torus-intervals 1", "intervals 2"))
    with pytest.raises(ValueError):
        family_from_text(good.replace("count 1", "count 2"))


@given(depth=st.integers(min_value=0, max_value=6))
def test_cantor_family_counts(depth):
    target = SelfSimilarCantorTarget(Fraction(1, 4), 3)
    fam = target.family_at_depth(depth)
    assert fam.count == 3**depth
    assert fam.length == Fraction(1, 4) ** depth
    ends = [o + fam.length for o in fam.offsets]
    assert all(b <= a for a, b in zip(fam.offsets[1:], ends[:-1]))


def test_cantor_middle_thirds_depth2_offsets():
    fam = SelfSimilarCantorTarget(Fraction(1, 3), 2).family_at_depth(2)
    assert fam.offsets == (
        Fraction(0), Fraction(2, 9), Fraction(2, 3), Fraction(8, 9)
    )


def test_cantor_validation():
    with pytest.raises(ValueError):
        SelfSimilarCantorTarget(Fraction(1, 2), 3)  # copies overlap
    with pytest.raises(ValueError):
        SelfSimilarCantorTarget(Fraction(0), 2)
    with pytest.raises(ValueError):
        SelfSimilarCantorTarget(Fraction(1, 3), 1)


# -- simple targets and dimensions ---------------------------------------------


def test_simple_target_validation():
    with pytest.raises(ValueError):
        FullTorusTarget(0)
    with pytest.raises(ValueError):
        SinglePointTarget(())
    with pytest.raises(ValueError):
        SinglePointTarget((1.0,))
    assert SinglePointTarget((0.25, 0.5)).d == 2


def test_analytic_dimensions_simple():
    full = analytic_dimensions(FullTorusTarget(2))
    assert (full.hausdorff, full.packing) == (2.0, 2.0)
    assert full.hausdorff_exact and full.packing_exact
    point = analytic_dimensions(SinglePointTarget((0.5,)))
    assert (point.hausdorff, point.packing) == (0.0, 0.0)


def test_analytic_dimensions_cantor():
    thirds = analytic_dimensions(SelfSimilarCantorTarget(Fraction(1, 3), 2))
    assert thirds.hausdorff == pytest.approx(math.log(2) / math.log(3))
    assert thirds.packing == thirds.hausdorff
    quarter = analytic_dimensions(SelfSimilarCantorTarget(Fraction(1, 4), 2))
    assert quarter.hausdorff == pytest.approx(0.5)


def test_analytic_dimensions_scheduled():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    rep = analytic_dimensions(ScheduledTarget(sched))
    assert isinstance(rep, DimensionReport)
    want = min(
        sched.branch_total_exponent(k) / sched.delta_exponent(k)
        for k in (1, 2, 3)
    )
    assert rep.hausdorff == want
    assert rep.packing == 7 / 8
    assert not rep.packing_exact

    inter = analytic_dimensions(ScheduledTarget(demo_schedule()))
    assert inter.hausdorff == 0.3
    assert inter.packing == 1.0

    with pytest.raises(TypeError):
        analytic_dimensions("not a target")


# -- avoidance schedules --------------------------------------------------------


def test_canonical_avoidance_schedule_frozen():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    assert sched.branch_exponents == CANONICAL_BRANCH
    assert sched.length_exponents == CANONICAL_LENGTH
    assert [sched.delta_exponent(k) for k in (1, 2, 3)] == [8, 75, 2536]
    assert [sched.branch_total_exponent(k) for k in (1, 2, 3)] == [1, 21, 378]
    assert [sched.hit_probability_exponent(k) for k in (1, 2, 3)] == [
        -6, -53, -2157
    ]


def test_canonical_avoidance_bounds_hold_exactly():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    for k, want in zip((1, 2, 3), CANONICAL_MISS_BOUNDS):
        assert sched.block_bound_holds(k)
        assert sched.block_miss_bound(k) == pytest.approx(want)
        assert sched.block_miss_bound(k) <= float(sched.failure_budgets[k - 1])


def test_avoidance_blocks_partition_the_index_range():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    prev_end = None
    for k in (1, 2, 3):
        start, end = sched.block_range(k)
        assert start < end
        if prev_end is not None:
            assert start == prev_end
        prev_end = end
    assert sched.block_range(1)[0] == 1
    assert sched.block_range(1)[1] == 16  # floor(2^(8*1/2))
    assert sched.horizon() == floor_pow2(Fraction(2461 * 7, 8)) - 1


def test_avoidance_greedy_is_tight():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    # shaving one bit off the first length exponent must break the bound
    shaved = AvoidanceSchedule(
        CANONICAL_PACKING,
        CANONICAL_BUDGETS,
        sched.branch_exponents,
        (7,) + sched.length_exponents[1:],
    )
    assert not shaved.block_bound_holds(1)


def test_avoidance_family_materialization():
    sched = build_avoidance_schedule(CANONICAL_PACKING, CANONICAL_BUDGETS)
    fam = sched.family(1)
    assert fam.count == 2
    assert fam.length == Fraction(1, 2**8)
    assert fam.offsets == (Fraction(0), Fraction(1, 2))
    with pytest.raises(ValueError):
        sched.family(3)  # 2^378 intervals


def test_avoidance_schedule_validation():
    with pytest.raises(ValueError):
        AvoidanceSchedule((), (), (), ())
    with pytest.raises(ValueError):
        AvoidanceSchedule(
            (Fraction(1, 2), Fraction(1, 2)),  # not increasing
            (Fraction(1, 2), Fraction(1, 4)),
            (1, 20), (8, 67),
        )
    with pytest.raises(ValueError):
        AvoidanceSchedule(
            (Fraction(1, 2),), (Fraction(1, 2),), (9,), (8,)
        )  # needs m < n


def test_avoidance_builder_rejects_infeasible():
    with pytest.raises(InfeasibleScheduleError):
        build_avoidance_schedule(
            (Fraction(999999, 1000000),), (Fraction(1, 10**9),)
        )


@given(
    s1=st.fractions(min_value=Fraction(1, 10), max_value=Fraction(1, 2),
                    max_denominator=32),
    eps1=st.fractions(min_value=Fraction(1, 32), max_value=Fraction(1, 2),
                      max_denominator=32),
)
@settings(max_examples=30, deadline=None)
def test_avoidance_builder_output_always_validates(s1, eps1):
    s2 = (s1 + 1) / 2
    eps2 = eps1 / 2
    sched = build_avoidance_schedule((s1, s2), (eps1, eps2))
    for k in (1, 2):
        assert sched.block_bound_holds(k)
        assert sched.block_miss_bound(k) <= float(sched.failure_budgets[k - 1])


# -- intersection schedules ------------------------------------------------------


def test_demo_schedule_counts_by_hand():
    sched = demo_schedule()
    # level 1: L = 2^floor(5 * 3/10) = 2; bh = (9/20)*20 = 9;
    # keep = floor(2^(9-5)/3) = 5; M = 10
    assert sched.refined_count(1) == 2
    assert sched.keep_per_interval(1) == 5
    assert sched.kept_arc_count(1) == 10
    # level 2: slots S = 2^(floor(57*3/10) - 20 + 5) = 2^2; L = 10*(4-2);
    # bh = (11/20)*140 = 77; keep = floor(2^(77-62)/3) = 10922
    assert sched.slot_count(2) == 4
    assert sched.refined_count(2) == 20
    assert sched.keep_per_interval(2) == 10922
    assert sched.kept_arc_count(2) == 20 * 10922
    assert sched.arc_length(1) == Fraction(1, 2**9)
    assert sched.arc_length(2) == Fraction(1, 2**77)
    assert sched.delta(2) == Fraction(1, 2**62)


def test_demo_schedule_cover_blocks():
    sched = demo_schedule()
    assert sched.cover_block(1) == (1, 2**12)   # floor(2^(20*3/5))
    assert sched.cover_block(2) == (2**12, 2**72)
    assert sched.horizon() == 2**72 - 1
    # covering balls in block k have diameter eta_k = 2^-H_k, small enough
    # to sit inside a kept arc of generation k
    blocks = sched.to_block_lengths()
    assert blocks.blocks[0] == (Fraction(1, 2**20), 1)
    assert blocks.blocks[1] == (Fraction(1, 2**140), 2**12)


def test_demo_cover_bound_matches_direct_formula():
    sched = demo_schedule()
    width = 2**12 - 1
    direct = math.log2(3.0) + 9.0 + width * math.log2(1.0 - 2.0**-10)
    assert sched.cover_failure_log2_bound(1) == pytest.approx(direct)
    # level 2 has 2^72 balls against a per-arc success chance of 2^-78, so
    # the bound stays positive (the demo is a shape demo, not a covering
    # guarantee); the count is beyond exact-float range and must still agree
    # with the first-order expansion log2(1 - x) ~ -x/ln 2
    width2 = 2**72 - 2**12
    product2 = -float(width2) * 2.0**-78 / math.log(2.0)
    expected2 = math.log2(3.0) + 77.0 + product2
    assert sched.cover_failure_log2_bound(2) == pytest.approx(
        expected2, rel=1e-9)


def test_intersection_schedule_validation():
    good = DEMO_SCHEDULE.copy()
    with pytest.raises(ValueError):
        bad = dict(good, inflation_exponents=(Fraction(1, 3), Fraction(11, 20)))
        IntersectionSchedule(**bad)  # beta*H = 20/3 not an integer
    with pytest.raises(ValueError):
        bad = dict(good, inflation_exponents=(Fraction(2, 5), Fraction(11, 20)))
        IntersectionSchedule(**bad)  # bh = 8 < D_1 + 4 = 9
    with pytest.raises(ValueError):
        bad = dict(good, cover_exponents=(4, 120))
        IntersectionSchedule(**bad)  # needs D_1 < H_1
    with pytest.raises(ValueError):
        IntersectionSchedule(
            Fraction(3, 2), Fraction(3, 5),
            (Fraction(9, 20),), (5,), (20,),
        )  # target dimension above one


def test_zero_dimensional_schedule_collapses_to_a_chain():
    sched = IntersectionSchedule(
        Fraction(0), Fraction(3, 5),
        (Fraction(9, 20), Fraction(11, 20)),
        (5, 57), (20, 120),
    )
    assert sched.refined_count(1) == 1
    assert sched.keep_per_interval(1) == 1
    assert sched.kept_arc_count(1) == 1
    assert sched.refined_count(2) == 1
    assert sched.kept_arc_count(2) == 1


def test_built_schedule_count_ratios_reach_targets():
    t, a = Fraction(3, 10), Fraction(3, 5)
    sched = build_intersection_schedule(t, a, depth=3)
    # the builder promises log2(L_k)/D_k >= t - 1/20 at every level and
    # log2(M_K)/H_K >= a - 1/20 at the deepest
    for k in (1, 2, 3):
        d_k = sched.delta_exponent(k)
        h_k = sched.eta_exponent(k)
        l_bits = sched.refined_count(k).bit_length() - 1
        m_bits = sched.kept_arc_count(k).bit_length() - 1
        assert l_bits >= math.ceil((t - Fraction(1, 20)) * d_k)
        if k == 3:
            assert m_bits >= math.floor((a - Fraction(1, 20)) * h_k)
        # never overshoot the nominal dimensions
        assert l_bits <= math.ceil(t * d_k)
        assert m_bits <= h_k


def test_built_schedule_matches_count_recurrences():
    sched = build_intersection_schedule(
        Fraction(3, 5), Fraction(3, 10), depth=2
    )
    t = sched.target_dim
    # recompute L and M independently
    n1, n2 = sched.length_exponents
    m1, m2 = sched.cover_exponents
    l1 = 1 << math.floor(t * n1)
    bh1 = sched.inflation_exponents[0] * m1
    keep1 = (1 << (bh1.numerator - n1)) // 3
    assert sched.refined_count(1) == l1
    assert sched.kept_arc_count(1) == l1 * keep1
    s2 = 1 << (math.floor(t * n2) - m1 + n1)
    l2 = l1 * keep1 * (s2 - 2)
    assert sched.slot_count(2) == s2
    assert sched.refined_count(2) == l2


def test_builder_rejects_hopeless_requests(monkeypatch):
    # zero slack is infeasible past level one; shrink the search cap so the
    # failure surfaces without walking exponents into the millions
    import toruscover.targets as targets_mod

    monkeypatch.setattr(targets_mod, "MAX_EXPONENT", 1 << 12)
    with pytest.raises(InfeasibleScheduleError):
        build_intersection_schedule(
            Fraction(1, 2), Fraction(3, 5), depth=2,
            ratio_tol=Fraction(0), intermediate_slack=Fraction(0),
        )


def test_schedule_level_bounds_checked():
    sched = demo_schedule()
    for bad in (0, 3):
        with pytest.raises(ValueError):
            sched.refined_count(bad)
        with pytest.raises(ValueError):
            sched.cover_block(bad)
