"""Command line front end: read a config, dispatch one experiment, write
its reports.  No experiment logic lives here.

The config is an INI file with an ``[experiment]`` section naming the
experiment and optionally fixing ``seed`` and ``trials``; experiment
arguments go in ``[params]``.  Experiments that consume a diameter sequence
read it from a ``[lengths]`` section (``variant`` = ``power_law`` |
``block_constant`` | ``explicit``, with ``alpha``/``c``, ``blocks`` as
``value:first`` pairs, or ``values``, plus ``d``).  The dichotomy reads its
targets from ``[targets]`` (``full_torus``, ``point``, ``cantor_ratio`` and
``cantor_copies``; any subset, reported in that order).

Example::

    [experiment]
    name = circle_cover_bound
    seed = 42

    [params]
    eta_exponents = 6 8 10
    inflation_exponent = 1/2
    growth_exponent = 9/10

Exit codes: 0 when every report passes or is inconclusive, 1 when a report
fails, 2 for unusable arguments or config, 3 when a schedule builder finds
the request infeasible.
"""

from __future__ import annotations

import argparse
import configparser
import os
import re
import sys
from fractions import Fraction

from . import experiments
from .lengths import LengthSpec, spec_from_dict
from .targets import (
    FullTorusTarget,
    InfeasibleScheduleError,
    SelfSimilarCantorTarget,
    SinglePointTarget,
)


class ConfigError(Exception):
    """The config file cannot be turned into an experiment call."""


def _split(text: str) -> list[str]:
    return [tok for tok in re.split(r"[,\s]+", text.strip()) if tok]


def _coerce_int(text: str) -> int:
    return int(text)


def _coerce_float(text: str) -> float:
    return float(Fraction(text))


def _coerce_fraction(text: str) -> Fraction:
    return Fraction(text)


def _coerce_int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in _split(text))


def _coerce_fraction_tuple(text: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(tok) for tok in _split(text))


_SCHEMAS: dict[str, dict] = {
    "subcube_count_moments": {
        "base_level": _coerce_int,
        "ball_count": _coerce_int,
    },
    "cube_coincidence_bound": {
        "levels": _coerce_int_tuple,
        "packing_exponent": _coerce_fraction,
        "draw_exponent": _coerce_fraction,
        "base_level": _coerce_int,
    },
    "circle_cover_bound": {
        "eta_exponents": _coerce_int_tuple,
        "inflation_exponent": _coerce_fraction,
        "growth_exponent": _coerce_fraction,
        "prefactor": _coerce_int,
        "offset": _coerce_int,
    },
    "dichotomy": {
        "window_ends": _coerce_int_tuple,
        "hit_window_start": _coerce_int,
        "grid_level": _coerce_int,
        "plateau_tol": _coerce_float,
    },
    "avoidance_bounds": {
        "packing_exponents": _coerce_fraction_tuple,
        "failure_budgets": _coerce_fraction_tuple,
        "geo_ratio": _coerce_float,
    },
    "intersection_dimension": {
        "target_dim": _coerce_fraction,
        "growth_exponent": _coerce_fraction,
        "depth": _coerce_int,
        "address_count": _coerce_int,
        "tolerance": _coerce_float,
    },
    "census_regularity": {
        "growth_exponent": _coerce_fraction,
        "horizon": _coerce_int,
        "packing_exponents": _coerce_fraction_tuple,
        "failure_budgets": _coerce_fraction_tuple,
        "value_tol": _coerce_float,
    },
    "exponent_crosscheck": {
        "samples": _coerce_int,
    },
}

_TAKES_TRIALS = {
    "subcube_count_moments",
    "cube_coincidence_bound",
    "circle_cover_bound",
    "dichotomy",
    "avoidance_bounds",
}
_TAKES_THREADS = set(_TAKES_TRIALS)

_EPILOG = """\
outputs (under --out):
  report.json   full reports: parameters, estimate, 99% interval, theory
                value and kind, verdict, checks and series
  summary.csv   one row per report, RFC 4180, columns:
                {}
""".format(", ".join(experiments.CSV_COLUMNS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toruscover",
        description="run one covering-set experiment from a config file",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--config", required=True, help="INI config path")
    parser.add_argument(
        "--seed", type=int, default=None,
        help="64-bit seed; overrides the config (default from config, else 0)",
    )
    parser.add_argument(
        "--trials", type=int, default=None,
        help="Monte Carlo trials; overrides the config",
    )
    parser.add_argument(
        "--out", default=".", help="output directory (default: current)"
    )
    parser.add_argument(
        "--threads", type=int, default=None,
        help="worker threads for trial chunks; results do not depend on it",
    )
    parser.add_argument(
        "--format", choices=("json", "csv", "both"), default="both",
        help="which outputs to write (default: both)",
    )
    return parser


def _read_config(path: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not cfg.has_section("experiment"):
        raise ConfigError("config needs an [experiment] section")
    if not cfg.has_option("experiment", "name"):
        raise ConfigError("[experiment] needs a 'name' key")
    return cfg


def _parse_params(name: str, cfg: configparser.ConfigParser) -> dict:
    schema = _SCHEMAS[name]
    params: dict = {}
    if not cfg.has_section("params"):
        return params
    for key, raw in cfg.items("params"):
        if key not in schema:
            raise ConfigError(f"unknown parameter {key!r} for {name}")
        try:
            params[key] = schema[key](raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    return params


def _lengths_from_config(cfg: configparser.ConfigParser) -> LengthSpec:
    if not cfg.has_section("lengths"):
        raise ConfigError("this experiment needs a [lengths] section")
    sec = cfg["lengths"]
    data: dict = {"variant": sec.get("variant", "")}
    if "d" in sec:
        data["d"] = sec["d"]
    if data["variant"] == "power_law":
        if "alpha" not in sec:
            raise ConfigError("power_law lengths need an 'alpha' key")
        data["alpha"] = float(Fraction(sec["alpha"]))
        if "c" in sec:
            data["c"] = float(Fraction(sec["c"]))
    elif data["variant"] == "block_constant":
        if "blocks" not in sec:
            raise ConfigError("block_constant lengths need a 'blocks' key")
        pairs = []
        for token in _split(sec["blocks"]):
            value, sep, first = token.partition(":")
            if not sep:
                raise ConfigError(
                    f"block {token!r} is not a value:first pair"
                )
            pairs.append([value, int(first)])
        data["blocks"] = pairs
    elif data["variant"] == "explicit":
        if "values" not in sec:
            raise ConfigError("explicit lengths need a 'values' key")
        data["values"] = [float(Fraction(tok)) for tok in _split(sec["values"])]
    try:
        return spec_from_dict(data)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad [lengths] section: {exc}") from exc


def _targets_from_config(cfg: configparser.ConfigParser, spec: LengthSpec) -> list:
    if not cfg.has_section("targets"):
        raise ConfigError("the dichotomy needs a [targets] section")
    sec = cfg["targets"]
    targets: list = []
    known = {"full_torus", "point", "cantor_ratio", "cantor_copies"}
    for key in sec:
        if key not in known:
            raise ConfigError(f"unknown target key {key!r}")
    try:
        if sec.getboolean("full_torus", fallback=False):
            targets.append(FullTorusTarget(spec.d))
        if "point" in sec:
            coords = tuple(float(tok) for tok in _split(sec["point"]))
            targets.append(SinglePointTarget(coords))
        if "cantor_ratio" in sec:
            targets.append(
                SelfSimilarCantorTarget(
                    Fraction(sec["cantor_ratio"]),
                    int(sec.get("cantor_copies", "2")),
                )
            )
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad [targets] section: {exc}") from exc
    if not targets:
        raise ConfigError("[targets] names no targets")
    return targets


def run_config(
    cfg: configparser.ConfigParser,
    seed_override: int | None = None,
    trials_override: int | None = None,
    threads: int | None = None,
) -> list:
    """Dispatch the configured experiment and return its reports."""
    name = cfg.get("experiment", "name").strip()
    if name not in _SCHEMAS:
        raise ConfigError(
            f"unknown experiment {name!r}; known: {', '.join(sorted(_SCHEMAS))}"
        )
    try:
        seed = (
            seed_override
            if seed_override is not None
            else cfg.getint("experiment", "seed", fallback=0)
        )
        trials = (
            trials_override
            if trials_override is not None
            else cfg.getint("experiment", "trials", fallback=None)
        )
    except ValueError as exc:
        raise ConfigError(f"bad [experiment] section: {exc}") from exc

    kwargs = _parse_params(name, cfg)
    if trials is not None:
        if name in _TAKES_TRIALS:
            kwargs["trials"] = trials
        else:
            print(f"note: {name} takes no trial count; ignoring it",
                  file=sys.stderr)
    if threads is not None and name in _TAKES_THREADS:
        kwargs["threads"] = threads

    if name == "dichotomy":
        spec = _lengths_from_config(cfg)
        targets = _targets_from_config(cfg, spec)
        return experiments.dichotomy_experiment(spec, targets, seed, **kwargs)
    single = {
        "subcube_count_moments": experiments.verify_subcube_count_moments,
        "cube_coincidence_bound": experiments.verify_cube_coincidence_bound,
        "circle_cover_bound": experiments.verify_circle_cover_bound,
        "avoidance_bounds": experiments.avoidance_experiment,
        "intersection_dimension": experiments.intersection_experiment,
        "census_regularity": experiments.census_regularity_experiment,
        "exponent_crosscheck": experiments.exponent_crosscheck_experiment,
    }[name]
    return [single(seed, **kwargs)]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _read_config(args.config)
        reports = run_config(
            cfg,
            seed_override=args.seed,
            trials_override=args.trials,
            threads=args.threads,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleScheduleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out, exist_ok=True)
    if args.format in ("json", "both"):
        path = os.path.join(args.out, "report.json")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(experiments.reports_to_json(reports))
    if args.format in ("csv", "both"):
        path = os.path.join(args.out, "summary.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(experiments.reports_to_csv(reports))

    for r in reports:
        print(f"{r.name}: {r.verdict}")
    return 1 if any(r.verdict == "fail" for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
