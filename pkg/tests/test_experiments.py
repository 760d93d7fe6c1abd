"""Report machinery, shared helpers, and reduced runs of every experiment.

The reduced runs keep the statistics easy (hundreds of trials) but exercise
the full code paths; the acceptance suite repeats them at scale.  Frozen
numbers here are either analytic (exact block probabilities, the miss
product) or deterministic outputs pinned after an independent hand check.
"""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from toruscover import _kernels as kern
from toruscover import experiments as ex
from toruscover.experiments import (
    CSV_COLUMNS,
    CheckResult,
    ExperimentReport,
    build_report,
    derived_seed,
    monotone_toward,
    recompute_verdict,
    report_to_json,
    reports_to_csv,
    reports_to_json,
    window_miss_product,
)
from toruscover.lengths import ExplicitLengths, PowerLawLengths
from toruscover.targets import (
    FullTorusTarget,
    IntersectionSchedule,
    SelfSimilarCantorTarget,
    SinglePointTarget,
)

DEMO_SCHEDULE = dict(
    target_dim=Fraction(3, 10),
    growth_exponent=Fraction(3, 5),
    inflation_exponents=(Fraction(9, 20), Fraction(11, 20)),
    length_exponents=(5, 57),
    cover_exponents=(20, 120),
)


# -- checks and reports -----------------------------------------------------------


def test_check_needs_a_side():
    with pytest.raises(ValueError):
        CheckResult("free", 0.5)
    with pytest.raises(ValueError):
        CheckResult("nan", math.nan, hi=1.0)


def test_check_passed_logic():
    assert CheckResult("hi", 0.3, hi=0.3).passed
    assert not CheckResult("hi", 0.300001, hi=0.3).passed
    assert CheckResult("lo", 0.3, lo=0.3).passed
    assert not CheckResult("lo", 0.299999, lo=0.3).passed
    assert CheckResult("both", 0.5, lo=0.4, hi=0.6).passed
    assert not CheckResult("both", 0.7, lo=0.4, hi=0.6).passed


def test_report_rejects_mismatched_verdict():
    good = CheckResult("ok", 0.0, hi=1.0)
    with pytest.raises(ValueError):
        ExperimentReport(
            name="x", parameters={}, estimate=0.0, interval=(0.0, 0.0),
            theory_value=None, theory_kind="exact", verdict="fail",
            checks=(good,),
        )
    with pytest.raises(ValueError):
        ExperimentReport(
            name="x", parameters={}, estimate=0.0, interval=(0.0, 0.0),
            theory_value=None, theory_kind="exact", verdict="pass",
        )


def test_report_validates_kind_and_interval():
    with pytest.raises(ValueError):
        build_report("x", {}, 0.0, (0.0, 0.0), None, "sideways", ())
    with pytest.raises(ValueError):
        build_report("x", {}, 0.0, (1.0, 0.0), None, "exact", ())
    # NaN intervals mark a statistic that was never computed
    r = build_report("x", {}, math.nan, (math.nan, math.nan), None, "exact", ())
    assert r.verdict == "inconclusive"


def test_build_report_derives_verdict():
    passing = build_report(
        "x", {}, 0.5, (0.4, 0.6), 1.0, "upper_bound",
        [CheckResult("a", 0.5, hi=1.0)],
    )
    assert passing.verdict == "pass"
    failing = build_report(
        "x", {}, 0.5, (0.4, 0.6), 1.0, "upper_bound",
        [CheckResult("a", 0.5, hi=1.0), CheckResult("b", 2.0, hi=1.0)],
    )
    assert failing.verdict == "fail"
    empty = build_report("x", {}, 0.5, (0.4, 0.6), None, "exact", ())
    assert empty.verdict == "inconclusive"


def test_recompute_verdict_is_pure():
    r = build_report(
        "x", {}, 0.5, (0.4, 0.6), 1.0, "upper_bound",
        [CheckResult("a", 0.5, hi=1.0)],
    )
    assert recompute_verdict(r) == r.verdict == "pass"
    # rebuilding with one failing check flips it
    r2 = build_report(
        r.name, r.parameters, r.estimate, r.interval, r.theory_value,
        r.theory_kind, r.checks + (CheckResult("b", 2.0, hi=1.0),),
    )
    assert recompute_verdict(r2) == "fail"


def test_build_report_copies_series():
    series = {"values": [1, 2]}
    r = build_report("x", {}, 0.0, (0.0, 0.0), None, "exact", (),
                     series=series)
    series["values"].append(3)
    series["extra"] = True
    assert "extra" not in r.series


# -- shared helpers ---------------------------------------------------------------


def test_derived_seed_matches_mix_chain():
    assert derived_seed(7, 3, 11) == int(
        kern.mix64(int(kern.mix64(7, 3)), 11))
    assert derived_seed(7, 3) != derived_seed(7, 4)
    assert derived_seed(7) == 7
    # negative indices wrap to their 64-bit pattern
    assert derived_seed(7, -1) == int(kern.mix64(7, (1 << 64) - 1))


def test_monotone_toward_accepts_progress():
    assert monotone_toward((0.5, 0.3, 0.1), 0.0, 0.02)
    assert monotone_toward((0.1, 0.5, 0.9), 1.0, 0.02)


def test_monotone_toward_allows_arrived_plateau():
    assert monotone_toward((0.5, 0.01, 0.01), 0.0, 0.02)
    assert monotone_toward((0.5, 0.005, 0.015), 0.0, 0.02)
    assert not monotone_toward((0.5, 0.1, 0.1), 0.0, 0.02)


def test_monotone_toward_rejects_retreat():
    assert not monotone_toward((0.5, 0.3, 0.4), 0.0, 0.02)
    with pytest.raises(ValueError):
        monotone_toward((0.5,), 0.0, 0.02)


def test_slack_is_wilson_halfwidth():
    from toruscover.estimators import wilson_interval

    lo, hi = wilson_interval(37, 400, confidence=0.99)
    assert ex._slack99(37, 400) == (hi - lo) / 2.0


def test_worst_margin_picks_tightest():
    assert ex._worst_margin([0.1, 0.3, 0.2], [0.5, 0.3, 0.4]) == 1
    assert ex._worst_margin([0.9, 0.1], [0.5, 0.5]) == 0


def test_run_chunked_covers_the_grid():
    out = ex._run_chunked(700, lambda start, count: np.arange(
        start, start + count))
    assert np.array_equal(out, np.arange(700))
    threaded = ex._run_chunked(
        700, lambda start, count: np.arange(start, start + count), threads=3)
    assert np.array_equal(threaded, out)
    with pytest.raises(ValueError):
        ex._run_chunked(0, lambda start, count: np.empty(0))


def test_window_miss_product_frozen():
    assert window_miss_product(PowerLawLengths(0.5), 11, 10**5) == \
        pytest.approx(0.9535017068414411, rel=1e-12)


def test_window_miss_product_plain_loop():
    spec = PowerLawLengths(0.5)
    acc = 1.0
    for n in range(11, 2001):
        acc *= 1.0 - 0.5 * n**-2.0
    assert window_miss_product(spec, 11, 2000) == pytest.approx(acc, rel=1e-12)


def test_window_miss_product_tiny_window():
    assert window_miss_product(ExplicitLengths((0.5, 0.25)), 1, 2) == \
        pytest.approx(0.375)


def test_window_miss_product_validation():
    with pytest.raises(ValueError):
        window_miss_product(PowerLawLengths(0.5, d=2), 1, 10)
    with pytest.raises(ValueError):
        window_miss_product(PowerLawLengths(0.5), 0, 10)
    with pytest.raises(ValueError):
        window_miss_product(PowerLawLengths(0.5), 10, 9)


# -- moment experiment ------------------------------------------------------------


def test_moments_level_zero_is_degenerate_and_exact():
    # at base level 0 the subcube is the whole circle: every center lands
    # in it, so the sample moments equal the closed forms exactly
    r = ex.verify_subcube_count_moments(
        11, base_level=0, ball_count=128, trials=400)
    assert r.verdict == "pass"
    assert r.series["closed_form_mean"] == 128.0
    assert r.series["closed_form_second_moment"] == 128.0**2
    assert r.series["sample_mean"] == 128.0
    assert r.series["deviation_frequency"] == 0.0
    assert r.theory_kind == "upper_bound"
    assert r.theory_value == pytest.approx(4.0 / 128.0)


def test_moments_nontrivial_level_passes():
    r = ex.verify_subcube_count_moments(
        11, base_level=2, ball_count=256, trials=500)
    assert r.verdict == "pass"
    assert len(r.checks) == 3
    mean = r.series["closed_form_mean"]
    assert mean == 256.0 / 4.0
    assert abs(r.series["sample_mean"] - mean) <= \
        3.0 * r.series["mean_standard_error"]


def test_moments_deterministic_and_thread_invariant():
    kwargs = dict(base_level=2, ball_count=256, trials=500)
    a = ex.verify_subcube_count_moments(11, **kwargs)
    b = ex.verify_subcube_count_moments(11, **kwargs)
    c = ex.verify_subcube_count_moments(11, threads=4, **kwargs)
    assert a == b == c
    assert reports_to_json([a]) == reports_to_json([b])


def test_moments_validation():
    with pytest.raises(ValueError):
        ex.verify_subcube_count_moments(1, base_level=-1)
    with pytest.raises(ValueError):
        ex.verify_subcube_count_moments(1, ball_count=10)


# -- coincidence experiment ---------------------------------------------------------


def test_coincidence_content_free_regime_is_inconclusive():
    r = ex.verify_cube_coincidence_bound(
        3, levels=(6, 8), packing_exponent=Fraction(2, 5),
        draw_exponent=Fraction(2, 5), trials=200)
    assert r.verdict == "inconclusive"
    assert math.isnan(r.estimate)
    assert r.checks == ()
    assert "carries no content" in r.detail


def test_coincidence_reduced_run_passes():
    r = ex.verify_cube_coincidence_bound(3, levels=(6, 8, 10), trials=400)
    assert r.verdict == "pass"
    names = [c.name for c in r.checks]
    assert any("strictly decreases" in n for n in names)
    bounds = r.series["bounds"]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert len(r.series["miss_frequencies"]) == 3


def test_coincidence_validation():
    with pytest.raises(ValueError):
        ex.verify_cube_coincidence_bound(1, packing_exponent=Fraction(3, 2))
    with pytest.raises(ValueError):
        ex.verify_cube_coincidence_bound(1, levels=(8,))
    with pytest.raises(ValueError):
        ex.verify_cube_coincidence_bound(1, levels=(8, 8))


# -- cover experiment ---------------------------------------------------------------


def test_cover_reduced_run_passes():
    r = ex.verify_circle_cover_bound(9, eta_exponents=(4, 6), trials=400)
    assert r.verdict == "pass"
    assert len(r.series["non_cover_frequencies"]) == 2
    assert len(r.series["arc_counts"]) == 2
    names = [c.name for c in r.checks]
    assert any("strictly decreases" in n for n in names)


def test_cover_validation():
    with pytest.raises(ValueError):
        ex.verify_circle_cover_bound(1, inflation_exponent=Fraction(9, 10),
                                     growth_exponent=Fraction(1, 2))
    with pytest.raises(ValueError):
        ex.verify_circle_cover_bound(1, eta_exponents=(6,))
    with pytest.raises(ValueError):
        ex.verify_circle_cover_bound(1, prefactor=0)


# -- avoidance experiment -------------------------------------------------------------


def test_avoidance_reduced_run_matches_analytic_series():
    r = ex.avoidance_experiment(2025, trials=200)
    assert r.verdict == "pass"
    # the exact block probabilities and widths depend only on the canonical
    # schedule, not on the seed
    assert r.series["block_width_log2"] == pytest.approx(
        (3.9068905956085187, 50.249999999999986, 2153.375), rel=1e-12)
    assert r.series["exact_hit_probabilities"] == pytest.approx(
        (0.21039728666065993, 0.13813004965978146, 0.07785469678603721),
        rel=1e-12)
    assert r.series["methods"] == ["direct", "thinned", "thinned"]
    assert len(r.checks) == 7
    assert r.theory_kind == "upper_bound"
    assert "tightest margin" in r.detail


def test_avoidance_needs_enough_trials():
    with pytest.raises(ValueError):
        ex.avoidance_experiment(1, trials=50)


# -- intersection experiment ----------------------------------------------------------


def test_intersection_deterministic_estimate():
    r = ex.intersection_experiment(
        1, target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5))
    assert r.verdict == "pass"
    assert r.theory_value == pytest.approx(0.3)
    assert r.estimate == pytest.approx(0.2500024790464225, rel=1e-9)
    assert abs(r.estimate - r.theory_value) <= r.tolerance
    assert abs(r.series["liminf_estimate"] - r.theory_value) <= r.tolerance


def test_intersection_seed_is_provenance_only():
    a = ex.intersection_experiment(
        1, target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5))
    b = ex.intersection_experiment(
        2, target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5))
    assert a.estimate == b.estimate
    assert a.checks == b.checks


def test_intersection_validation():
    with pytest.raises(ValueError):
        ex.intersection_experiment(1, target_dim=Fraction(3, 10),
                                   growth_exponent=Fraction(3, 5), depth=2)


# -- stage materialization ------------------------------------------------------------


def test_materialize_demo_stage():
    sched = IntersectionSchedule(**DEMO_SCHEDULE)
    stage = ex.materialize_intersection_stage(sched, 5)
    assert stage.attempts == 5
    assert len(stage.kept_centers) == sched.kept_arc_count(1)
    assert stage.family.count == sched.refined_count(2)
    assert stage.family.length == sched.delta(2)
    assert stage == ex.materialize_intersection_stage(sched, 5)


def test_materialized_family_sits_inside_kept_arcs():
    sched = IntersectionSchedule(**DEMO_SCHEDULE)
    stage = ex.materialize_intersection_stage(sched, 5)
    half_arc = sched.arc_length(1) / 2
    length = stage.family.length
    offsets = sorted(stage.family.offsets)
    # intervals are disjoint
    for a, b in zip(offsets, offsets[1:]):
        assert a + length <= b
    # every interval is covered by some kept arc, allowing for wrap
    for o in offsets:
        mid = o + length / 2
        ok = False
        for c in stage.kept_centers:
            gap = (mid - c) % 1
            if min(gap, 1 - gap) <= half_arc:
                ok = True
                break
        assert ok, f"interval at {o} outside every kept arc"


def test_materialize_rejections():
    with pytest.raises(ValueError):
        shallow = IntersectionSchedule(
            target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5),
            inflation_exponents=(Fraction(9, 20),),
            length_exponents=(5,), cover_exponents=(20,))
        ex.materialize_intersection_stage(shallow, 0)
    with pytest.raises(ValueError):
        wide = IntersectionSchedule(
            target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5),
            inflation_exponents=(Fraction(9, 20), Fraction(11, 20)),
            length_exponents=(10, 107), cover_exponents=(40, 180))
        ex.materialize_intersection_stage(wide, 0)
    with pytest.raises(ValueError):
        fine = IntersectionSchedule(
            target_dim=Fraction(3, 10), growth_exponent=Fraction(3, 5),
            inflation_exponents=(Fraction(9, 20), Fraction(11, 20)),
            length_exponents=(5, 2001), cover_exponents=(120, 4000))
        ex.materialize_intersection_stage(fine, 0)


def test_materialize_attempt_budget():
    sched = IntersectionSchedule(**DEMO_SCHEDULE)
    # seed 5 needs five attempts, so a budget of one must fail
    with pytest.raises(RuntimeError):
        ex.materialize_intersection_stage(sched, 5, max_attempts=1)


# -- dichotomy experiment -------------------------------------------------------------


def test_dichotomy_reduced_run():
    spec = PowerLawLengths(0.5)
    targets = [FullTorusTarget(1), SinglePointTarget((0.5,)),
               SelfSimilarCantorTarget(Fraction(1, 3), 2)]
    reports = ex.dichotomy_experiment(spec, targets, 7, trials=200,
                                      grid_level=10)
    assert [r.name for r in reports] == [
        "dichotomy_full_torus", "dichotomy_single_point",
        "dichotomy_self_similar",
    ]
    full, point, cantor = reports
    assert all(r.verdict == "pass" for r in reports)
    assert full.theory_value == 1.0 and cantor.theory_value == 1.0
    assert point.theory_value == 0.0
    assert full.series["hit_frequencies"] == [1.0, 1.0, 1.0]
    # the analytic miss product over the deepest disjoint window
    assert point.series["deepest_miss_product"] == pytest.approx(
        0.9999550034872485, rel=1e-12)
    assert point.estimate == 0.0


def test_dichotomy_duplicate_labels_get_suffixes():
    spec = PowerLawLengths(0.5)
    targets = [SinglePointTarget((0.25,)), SinglePointTarget((0.75,))]
    reports = ex.dichotomy_experiment(spec, targets, 7, trials=100,
                                      window_ends=(10**3, 10**4),
                                      grid_level=8)
    assert [r.name for r in reports] == [
        "dichotomy_single_point_0", "dichotomy_single_point_1"]


def test_dichotomy_validation():
    spec = PowerLawLengths(0.5)
    target = [FullTorusTarget(1)]
    with pytest.raises(ValueError):
        ex.dichotomy_experiment(spec, target, 1, window_ends=(100,))
    with pytest.raises(ValueError):
        ex.dichotomy_experiment(spec, target, 1, window_ends=(100, 100))
    with pytest.raises(ValueError):
        ex.dichotomy_experiment(spec, target, 1, window_ends=(1000, 2000),
                                hit_window_start=1000)


# -- census and crosscheck ------------------------------------------------------------


def test_census_experiment_passes_with_frozen_estimate():
    r = ex.census_regularity_experiment()
    assert r.verdict == "pass"
    assert r.estimate == pytest.approx(0.5000030464884785, rel=1e-12)
    assert r.theory_value == 0.5
    assert r.series["regular_verdict"] == "consistent"
    assert r.series["engineered_verdict"] == "violated"


def test_census_experiment_fails_on_impossible_tolerance():
    r = ex.census_regularity_experiment(value_tol=1e-7)
    assert r.verdict == "fail"
    failed = [c for c in r.checks if not c.passed]
    assert len(failed) == 1
    assert "estimate" in failed[0].name


def test_crosscheck_experiment_exact_agreement():
    r = ex.exponent_crosscheck_experiment(3)
    assert r.verdict == "pass"
    assert r.estimate == 1.0
    assert r.series["agreements"] == 100
    assert r.series["power_law_samples"] == 56
    assert r.series["block_constant_samples"] == 44
    with pytest.raises(ValueError):
        ex.exponent_crosscheck_experiment(1, samples=0)


# -- serialization ---------------------------------------------------------------------


def test_encode_scalars():
    assert ex._encode(None) is None
    assert ex._encode(True) is True
    assert ex._encode("s") == "s"
    assert ex._encode(np.int64(7)) == 7
    assert ex._encode(np.float64(2.5)) == 2.5
    assert ex._encode(Fraction(3, 4)) == "3/4"
    assert ex._encode(math.inf) == "inf"
    assert ex._encode(-math.inf) == "-inf"
    assert ex._encode(math.nan) == "nan"


def test_encode_containers():
    assert ex._encode(np.array([1, 2])) == [1, 2]
    assert ex._encode((Fraction(1, 2), 3)) == ["1/2", 3]
    assert ex._encode({1: {"x": Fraction(1, 3)}}) == {"1": {"x": "1/3"}}
    with pytest.raises(TypeError):
        ex._encode({1, 2})


def test_report_json_roundtrip():
    r = build_report(
        "demo", {"ratio": Fraction(2, 3)}, 0.5, (0.4, 0.6), 1.0,
        "upper_bound", [CheckResult("a", 0.5, hi=1.0)],
        series={"values": np.array([1.5, 2.5])}, tolerance=0.1,
        detail="reduced",
    )
    text = report_to_json(r)
    assert text.endswith("\n")
    back = json.loads(text)
    assert back["name"] == "demo"
    assert back["parameters"]["ratio"] == "2/3"
    assert back["series"]["values"] == [1.5, 2.5]
    assert back["checks"][0]["passed"] is True
    # sorted keys make the output canonical
    assert text == json.dumps(back, sort_keys=True, indent=2) + "\n"


def test_reports_json_handles_nan_estimates():
    r = ex.verify_cube_coincidence_bound(
        3, levels=(6, 8), packing_exponent=Fraction(2, 5),
        draw_exponent=Fraction(2, 5), trials=200)
    back = json.loads(reports_to_json([r]))
    assert back["reports"][0]["estimate"] == "nan"
    assert back["reports"][0]["interval"] == ["nan", "nan"]


def test_csv_summary_shape():
    r = build_report(
        "demo", {}, 0.25, (0.2, 0.3), 0.5, "upper_bound",
        [CheckResult("a", 0.5, hi=1.0), CheckResult("b", 2.0, hi=1.0)],
    )
    text = reports_to_csv([r, r])
    lines = text.split("\r\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "demo,fail,0.25,0.2,0.3,0.5,upper_bound,,2,1"
    assert len(lines) == 4 and lines[3] == ""


def test_csv_quotes_embedded_commas():
    import csv
    import io

    r = build_report(
        'odd,"name"', {}, 0.0, (0.0, 0.0), None, "exact",
        [CheckResult("a", 0.0, hi=1.0)],
    )
    text = reports_to_csv([r])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[1][0] == 'odd,"name"'
    assert rows[1][5] == ""  # absent theory value
