"""Command line interface: estimate, simulate, bench.

Exit codes: 0 success, 2 for unreadable/unparseable input or invalid
arguments and configs, 3 for degenerate data (no usable signal). The default
output directory for file-writing commands is the PESEL_OUTPUT_DIR
environment variable, falling back to the current directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from . import __version__
from .bench import load_config, run_to_files
from .criteria import (
    PeselVariant,
    ScoreParts,
    auto_variant,
    pesel_trace,
    select_k,
)
from .errors import (
    ConfigError,
    DegenerateDataError,
    DegenerateSignalError,
    DomainError,
    IngestError,
    PeselError,
)
from .matrix import load_csv
from .simgen import Scenario, ScenarioSpec, StudentScaling, generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

OUTPUT_DIR_ENV = "PESEL_OUTPUT_DIR"

# Numeric aliases accepted by --scenario alongside the full names.
SCENARIO_ALIASES = {
    "1a": Scenario.EQUAL_SPECTRUM,
    "1b": Scenario.EXP_SPECTRUM,
    "2": Scenario.FIXED_EFFECT,
    "3": Scenario.STUDENT_NOISE,
    "4": Scenario.SURPLUS_VARS,
}

DEFAULT_K_MAX_CAP = 50


@dataclass(frozen=True)
class EstimateReport:
    """JSON-serializable result of the estimate command."""

    n: int
    p: int
    variant: str
    k_selected: int
    scores: tuple[ScoreParts, ...]
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "variant": self.variant,
            "k_selected": self.k_selected,
            "scores": [asdict(s) for s in self.scores],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateReport":
        return cls(
            n=data["n"],
            p=data["p"],
            variant=data["variant"],
            k_selected=data["k_selected"],
            scores=tuple(ScoreParts(**s) for s in data["scores"]),
            warnings=tuple(data["warnings"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "EstimateReport":
        return cls.from_dict(json.loads(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pesel",
        description="Estimate the number of principal components, simulate "
        "benchmark datasets, and run Monte Carlo benchmarks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="select the number of components for a CSV file")
    est.add_argument("input", help="path to the data CSV (rows = observations)")
    est.add_argument(
        "--variant",
        choices=["auto", "hetero-n", "homo-n", "hetero-p", "homo-p"],
        default="auto",
        help="criterion variant; auto picks hetero-p when p > n, else hetero-n",
    )
    est.add_argument(
        "--k-max",
        type=int,
        default=None,
        help=f"largest candidate rank (default min(n, p) - 1, capped at {DEFAULT_K_MAX_CAP})",
    )
    est.add_argument("--format", choices=["json", "text"], default="text")
    est.add_argument("--delimiter", default=",", help="CSV delimiter (default comma)")
    est.add_argument(
        "--has-header",
        action="store_true",
        help="skip a single header row in the input",
    )

    sim = sub.add_parser("simulate", help="generate a synthetic dataset")
    sim.add_argument(
        "--scenario",
        required=True,
        help="scenario name (equal-spectrum, exp-spectrum, fixed-effect, "
        "student-noise, surplus-vars) or alias (1a, 1b, 2, 3, 4)",
    )
    sim.add_argument("--n", type=int, required=True, help="number of observations")
    sim.add_argument("--p", type=int, required=True, help="number of signal variables")
    sim.add_argument("--k-true", type=int, required=True, help="true number of components")
    sim.add_argument("--snr", type=float, required=True, help="signal-to-noise ratio")
    sim.add_argument("--seed", type=int, required=True, help="64-bit generator seed")
    sim.add_argument(
        "--student-scaling",
        choices=[s.value for s in StudentScaling],
        default=StudentScaling.VARIANCE_MATCHED.value,
        help="Student-t noise scaling (student-noise scenario only)",
    )
    sim.add_argument(
        "--out",
        default=None,
        help=f"output directory (default ${OUTPUT_DIR_ENV} or the current directory)",
    )
    sim.add_argument(
        "--write-signal",
        action="store_true",
        help="also write the noiseless signal matrix as M.csv",
    )

    ben = sub.add_parser("bench", help="run a Monte Carlo benchmark from a config file")
    ben.add_argument("config", help="path to the benchmark config JSON")
    ben.add_argument(
        "--out",
        default=None,
        help=f"output directory (default ${OUTPUT_DIR_ENV} or the current directory)",
    )
    return parser


def _resolve_out_dir(flag_value) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _fail(message: str, code: int) -> int:
    print(f"pesel: error: {message}", file=sys.stderr)
    return code


def cmd_estimate(args) -> int:
    try:
        X = load_csv(args.input, has_header=args.has_header, delimiter=args.delimiter)
    except FileNotFoundError:
        return _fail(f"cannot read input file: {args.input}", EXIT_INPUT)
    except IngestError as exc:
        return _fail(str(exc), EXIT_INPUT)

    warnings: list[str] = []
    if args.variant == "auto":
        variant = auto_variant(X.n, X.p)
    else:
        variant = PeselVariant.from_label(args.variant)

    hard_max = min(X.n, X.p) - 1
    if args.k_max is None:
        k_max = min(hard_max, DEFAULT_K_MAX_CAP)
        if hard_max > DEFAULT_K_MAX_CAP:
            warnings.append(
                f"candidate ranks capped at {DEFAULT_K_MAX_CAP} "
                f"(pass --k-max up to {hard_max} to widen)"
            )
    else:
        k_max = args.k_max

    try:
        trace = pesel_trace(X, variant, k_max)
        selection = select_k(trace)
    except DomainError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except DegenerateDataError as exc:
        return _fail(f"degenerate data: {exc}", EXIT_DEGENERATE)

    if selection.tie_broken:
        warnings.append("tie between candidate ranks broken toward the smallest k")

    report = EstimateReport(
        n=X.n,
        p=X.p,
        variant=variant.label,
        k_selected=selection.k_selected,
        scores=trace.scores,
        warnings=tuple(warnings),
    )
    if args.format == "json":
        print(report.to_json())
    else:
        _print_text_report(report)
    return EXIT_OK


def _print_text_report(report: EstimateReport) -> None:
    print(
        f"n={report.n} p={report.p} variant={report.variant} "
        f"k_selected={report.k_selected}"
    )
    print(f"{'':2}{'k':>4} {'loglik':>18} {'penalty':>14} {'total':>18} {'sigma2_hat':>12}")
    for s in report.scores:
        marker = "*" if s.k == report.k_selected else " "
        total = f"{s.total:.4f}" if math.isfinite(s.total) else "-inf"
        loglik = f"{s.loglik:.4f}" if math.isfinite(s.loglik) else "-inf"
        print(
            f"{marker:2}{s.k:>4} {loglik:>18} {s.penalty:>14.4f} "
            f"{total:>18} {s.sigma2_hat:>12.6g}"
        )
    for note in report.warnings:
        print(f"warning: {note}")


def _parse_scenario(text: str) -> Scenario:
    if text in SCENARIO_ALIASES:
        return SCENARIO_ALIASES[text]
    try:
        return Scenario(text.replace("-", "_"))
    except ValueError:
        raise DomainError(
            f"unknown scenario {text!r}; expected one of "
            + ", ".join(sorted(SCENARIO_ALIASES))
            + " or "
            + ", ".join(s.value.replace("_", "-") for s in Scenario)
        ) from None


def _format_float(x: float) -> str:
    return repr(float(x))


def _write_matrix_csv(path: Path, values) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in values:
            fh.write(",".join(_format_float(v) for v in row))
            fh.write("\n")


def cmd_simulate(args) -> int:
    try:
        spec = ScenarioSpec(
            scenario=_parse_scenario(args.scenario),
            n=args.n,
            p=args.p,
            k_true=args.k_true,
            snr=args.snr,
            seed=args.seed,
            student_scaling=StudentScaling(args.student_scaling),
        )
        dataset = generate(spec)
    except (DomainError, DegenerateSignalError) as exc:
        return _fail(str(exc), EXIT_INPUT)

    out = _resolve_out_dir(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_matrix_csv(out / "X.csv", dataset.X.values)
        if args.write_signal:
            _write_matrix_csv(out / "M.csv", dataset.M.values)
        sidecar = {
            "scenario": spec.scenario.value,
            "n": spec.n,
            "p": spec.p,
            "k_true": spec.k_true,
            "snr": spec.snr,
            "seed": spec.seed,
            "student_scaling": spec.student_scaling.value,
            "x_rows": dataset.X.n,
            "x_columns": dataset.X.p,
        }
        with open(out / "spec.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        return _fail(f"cannot write outputs: {exc}", EXIT_INPUT)

    print(f"wrote {out / 'X.csv'} ({dataset.X.n}x{dataset.X.p})")
    if args.write_signal:
        print(f"wrote {out / 'M.csv'} ({dataset.M.n}x{dataset.M.p})")
    print(f"wrote {out / 'spec.json'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError:
        return _fail(f"cannot read config file: {args.config}", EXIT_INPUT)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_INPUT)

    config = replace(config, output_dir=_resolve_out_dir(args.out))
    try:
        paths = run_to_files(config, tool_version=__version__)
    except OSError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except DegenerateDataError as exc:
        return _fail(f"degenerate data: {exc}", EXIT_DEGENERATE)

    for name in ("records", "summary", "manifest"):
        print(f"wrote {paths[name]}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return cmd_estimate(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_bench(args)
    except PeselError as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
