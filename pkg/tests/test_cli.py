"""End-to-end checks of the command line front end.

Everything runs ``main`` in-process with a temp config and output dir; one
test shells out to confirm the installed console script answers at all.
"""

import json
import shutil
import subprocess
import textwrap

import pytest

from toruscover.cli import ConfigError, main


def write_config(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return str(path)


def run_main(tmp_path, text, *extra):
    cfg = write_config(tmp_path, text)
    out = tmp_path / "out"
    code = main(["--config", cfg, "--out", str(out), *extra])
    return code, out


CENSUS_CFG = """\
    [experiment]
    name = census_regularity
    seed = 0
"""

MOMENTS_CFG = """\
    [experiment]
    name = subcube_count_moments
    seed = 11
    trials = 400

    [params]
    base_level = 0
    ball_count = 128
"""

DICHOTOMY_CFG = """\
    [experiment]
    name = dichotomy
    seed = 7
    trials = 100

    [params]
    window_ends = 1000 10000
    grid_level = 8

    [lengths]
    variant = power_law
    alpha = 1/2

    [targets]
    full_torus = yes
    point = 0.5
    cantor_ratio = 1/3
"""


def test_census_run_writes_both_outputs(tmp_path, capsys):
    code, out = run_main(tmp_path, CENSUS_CFG)
    assert code == 0
    assert capsys.readouterr().out == "census_regularity: pass\n"
    payload = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert payload["reports"][0]["name"] == "census_regularity"
    assert payload["reports"][0]["verdict"] == "pass"
    csv_text = (out / "summary.csv").read_bytes()
    assert csv_text.startswith(b"name,verdict,")
    assert b"\r\n" in csv_text


def test_reruns_are_byte_identical(tmp_path):
    cfg = write_config(tmp_path, MOMENTS_CFG)
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["--config", cfg, "--out", str(out)]) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]


def test_seed_override_changes_the_report(tmp_path):
    cfg = write_config(tmp_path, MOMENTS_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out1)]) == 0
    assert main(["--config", cfg, "--out", str(out2), "--seed", "99"]) == 0
    a = json.loads((out1 / "report.json").read_text(encoding="utf-8"))
    b = json.loads((out2 / "report.json").read_text(encoding="utf-8"))
    assert a["reports"][0]["parameters"]["seed"] == 11
    assert b["reports"][0]["parameters"]["seed"] == 99
    assert a != b


def test_trials_override_is_recorded(tmp_path):
    code, out = run_main(tmp_path, MOMENTS_CFG, "--trials", "300")
    assert code == 0
    payload = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert payload["reports"][0]["parameters"]["trials"] == 300


def test_threads_do_not_change_outputs(tmp_path):
    cfg = write_config(tmp_path, MOMENTS_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out1)]) == 0
    assert main(["--config", cfg, "--out", str(out2), "--threads", "4"]) == 0
    assert (out1 / "report.json").read_bytes() == \
        (out2 / "report.json").read_bytes()


def test_format_selects_files(tmp_path):
    cfg = write_config(tmp_path, CENSUS_CFG)
    out_json = tmp_path / "j"
    assert main(["--config", cfg, "--out", str(out_json),
                 "--format", "json"]) == 0
    assert (out_json / "report.json").exists()
    assert not (out_json / "summary.csv").exists()
    out_csv = tmp_path / "c"
    assert main(["--config", cfg, "--out", str(out_csv),
                 "--format", "csv"]) == 0
    assert (out_csv / "summary.csv").exists()
    assert not (out_csv / "report.json").exists()


def test_failing_report_exits_one_but_still_writes(tmp_path, capsys):
    code, out = run_main(tmp_path, """\
        [experiment]
        name = census_regularity

        [params]
        value_tol = 1/10000000
    """)
    assert code == 1
    assert "census_regularity: fail" in capsys.readouterr().out
    payload = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert payload["reports"][0]["verdict"] == "fail"
    assert (out / "summary.csv").exists()


def test_inconclusive_exits_zero(tmp_path, capsys):
    code, _ = run_main(tmp_path, """\
        [experiment]
        name = cube_coincidence_bound
        seed = 3
        trials = 200

        [params]
        levels = 6 8
        packing_exponent = 2/5
        draw_exponent = 2/5
    """)
    assert code == 0
    assert "inconclusive" in capsys.readouterr().out


def test_dichotomy_target_order(tmp_path, capsys):
    code, out = run_main(tmp_path, DICHOTOMY_CFG)
    assert code == 0
    assert capsys.readouterr().out.splitlines() == [
        "dichotomy_full_torus: pass",
        "dichotomy_single_point: pass",
        "dichotomy_self_similar: pass",
    ]
    payload = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert len(payload["reports"]) == 3


def test_trials_note_for_non_trial_experiments(tmp_path, capsys):
    code, _ = run_main(tmp_path, """\
        [experiment]
        name = exponent_crosscheck
        seed = 3
        trials = 500
    """)
    assert code == 0
    err = capsys.readouterr().err
    assert "takes no trial count" in err


def test_unknown_experiment_exits_two(tmp_path, capsys):
    code, _ = run_main(tmp_path, """\
        [experiment]
        name = perpetual_motion
    """)
    assert code == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_config_errors_exit_two(tmp_path, capsys):
    bad_cases = [
        "[params]\nsamples = 3\n",                      # no [experiment]
        "[experiment]\nseed = 1\n",                     # no name
        "[experiment]\nname = exponent_crosscheck\n\n"
        "[params]\nwingspan = 7\n",                     # unknown param
        "[experiment]\nname = subcube_count_moments\n\n"
        "[params]\nball_count = abc\n",                 # bad int
        "not an ini file at all [",                     # parse error
    ]
    for text in bad_cases:
        path = tmp_path / "bad.ini"
        path.write_text(text, encoding="utf-8")
        assert main(["--config", str(path), "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_missing_config_file_exits_two(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "nope.ini"),
                 "--out", str(tmp_path)])
    assert code == 2
    assert "cannot read config" in capsys.readouterr().err


def test_bad_experiment_values_exit_two(tmp_path, capsys):
    # values that parse but fail the experiment's own validation
    code, _ = run_main(tmp_path, """\
        [experiment]
        name = circle_cover_bound
        trials = 200

        [params]
        eta_exponents = 6
    """)
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_lengths_section_errors_exit_two(tmp_path, capsys):
    missing = """\
        [experiment]
        name = dichotomy

        [targets]
        full_torus = yes
    """
    code, _ = run_main(tmp_path, missing)
    assert code == 2
    bad_block = """\
        [experiment]
        name = dichotomy

        [lengths]
        variant = block_constant
        blocks = 1/4
    """
    code, _ = run_main(tmp_path, bad_block)
    assert code == 2
    err = capsys.readouterr().err
    assert "value:first" in err


def test_target_section_errors_exit_two(tmp_path, capsys):
    unknown_key = """\
        [experiment]
        name = dichotomy

        [lengths]
        variant = power_law
        alpha = 1/2

        [targets]
        moonbase = yes
    """
    code, _ = run_main(tmp_path, unknown_key)
    assert code == 2
    empty = """\
        [experiment]
        name = dichotomy

        [lengths]
        variant = power_law
        alpha = 1/2

        [targets]
        full_torus = no
    """
    code, _ = run_main(tmp_path, empty)
    assert code == 2
    assert "names no targets" in capsys.readouterr().err


def test_infeasible_schedule_exits_three(tmp_path, capsys):
    code, _ = run_main(tmp_path, """\
        [experiment]
        name = avoidance_bounds
        trials = 100

        [params]
        packing_exponents = 999999/1000000
        failure_budgets = 1/1000000000
    """)
    assert code == 3
    assert "infeasible" in capsys.readouterr().err


def test_block_constant_lengths_parse(tmp_path):
    code, out = run_main(tmp_path, """\
        [experiment]
        name = dichotomy
        seed = 7
        trials = 100

        [params]
        window_ends = 1000 10000
        grid_level = 8

        [lengths]
        variant = block_constant
        blocks = 1/4:1, 1/64:50, 1/4096:1000

        [targets]
        point = 0.5
    """)
    assert code == 0
    payload = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert payload["reports"][0]["name"] == "dichotomy_single_point"


def test_missing_required_argument_exits_two():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_console_script_responds():
    exe = shutil.which("toruscover")
    assert exe is not None, "console script not on PATH"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True,
                          timeout=60)
    assert proc.returncode == 0
    assert "report.json" in proc.stdout


def test_config_error_is_an_exception():
    # the dedicated type keeps argparse/config failures apart from bugs
    assert issubclass(ConfigError, Exception)
    with pytest.raises(ConfigError):
        raise ConfigError("x")
