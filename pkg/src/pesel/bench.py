"""Monte Carlo benchmark harness: cells x replicates x methods.

A benchmark config names scenario cell templates (each expanded over its n,
p and SNR grids), a replication count, a method list, a candidate-rank bound
and a base seed. Methods are the four criteria by label ("hetero-n",
"homo-n", "hetero-p", "homo-p") plus the variance-explained baseline
("variance-threshold:0.9" selects the smallest rank whose leading
eigenvalues cover the given fraction of total variance, on the rows-as-
samples spectrum).

Seeds are derived, not shared: cell c gets the scenario seed
``SeedSequence([base_seed, c])`` and replicate r of that cell draws its
noise from the generator's ``[cell_seed, 1, r]`` stream, so every record is
reproducible in isolation and results do not depend on execution order.
Replicates of one cell share the signal matrix and differ only in noise.

Selections are deterministic given the config; recorded runtimes are
wall-clock and naturally vary between runs, so the records CSV is
reproducible in every column except ``runtime_ms`` (the summary CSV contains
no timings and is byte-stable). Both CSV files start with a ``#`` schema
comment line; readers should skip ``#`` lines.

Failures inside one replicate (a degenerate dataset, every candidate rank
scoring -inf) never abort the run: the record is flagged degenerate with an
empty selection and excluded from summary statistics.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .criteria import PeselVariant, pesel_trace, select_k
from .errors import ConfigError, DegenerateDataError, DomainError, PeselError
from .matrix import DataMatrix, EigenSpectrum, Orientation, covariance_spectrum
from .simgen import Scenario, ScenarioSpec, StudentScaling, generate

RECORDS_SCHEMA = "pesel-bench records v1"
SUMMARY_SCHEMA = "pesel-bench summary v1"

RECORD_COLUMNS = (
    "cell_id",
    "replicate",
    "method",
    "k_selected",
    "k_true",
    "runtime_ms",
    "degenerate",
)
SUMMARY_COLUMNS = (
    "cell_id",
    "scenario",
    "n",
    "p",
    "k_true",
    "snr",
    "method",
    "n_replicates",
    "n_degenerate",
    "mean_k",
    "mode_k",
    "recovery_rate",
    "freq",
)

VARIANCE_THRESHOLD_PREFIX = "variance-threshold:"


@dataclass(frozen=True)
class CellTemplate:
    """One config entry; expands over its n, p and SNR grids."""

    scenario: Scenario
    n: tuple[int, ...]
    p: tuple[int, ...]
    k_true: int
    snr_grid: tuple[float, ...]
    student_scaling: StudentScaling = StudentScaling.VARIANCE_MATCHED


@dataclass(frozen=True)
class BenchmarkConfig:
    cells: tuple[CellTemplate, ...]
    replications: int
    methods: tuple[str, ...]
    k_max: int
    base_seed: int
    output_dir: Path | None = None


@dataclass(frozen=True)
class Cell:
    """A fully expanded experiment cell with its derived scenario spec."""

    cell_id: str
    spec: ScenarioSpec


@dataclass(frozen=True)
class BenchmarkRecord:
    """Outcome of one method on one replicate of one cell."""

    cell_id: str
    replicate: int
    method: str
    k_selected: int | None
    k_true: int
    runtime_ms: float
    degenerate: bool


@dataclass(frozen=True)
class CellSummary:
    """Selection statistics for one (cell, method) pair.

    Degenerate replicates are excluded from the statistics and counted in
    ``n_degenerate``; the frequency table sums to
    ``n_replicates - n_degenerate``.
    """

    cell_id: str
    method: str
    n_replicates: int
    n_degenerate: int
    mean_k: float | None
    mode_k: int | None
    recovery_rate: float
    freq: dict[int, int] = field(default_factory=dict)


def variance_threshold_baseline(spectrum: EigenSpectrum, fraction: float) -> int:
    """Smallest k whose top-k eigenvalues reach ``fraction`` of total variance."""
    if not 0.0 < fraction < 1.0:
        raise DomainError(f"fraction must be in (0, 1), got {fraction}")
    total = float(spectrum.lambdas.sum())
    if total <= 0.0:
        raise DegenerateDataError("spectrum has zero total variance")
    cumulative = np.cumsum(spectrum.lambdas) / total
    return int(np.searchsorted(cumulative, fraction) + 1)


def parse_method(method: str) -> Callable[[DataMatrix, int], int]:
    """Turn a method id into an evaluator mapping (X, k_max) to a selected k.

    Raises DomainError for an unknown method id.
    """
    if method.startswith(VARIANCE_THRESHOLD_PREFIX):
        raw = method[len(VARIANCE_THRESHOLD_PREFIX) :]
        try:
            fraction = float(raw)
        except ValueError:
            raise DomainError(f"bad variance threshold fraction {raw!r}") from None
        if not 0.0 < fraction < 1.0:
            raise DomainError(f"variance threshold fraction {fraction} not in (0, 1)")

        def baseline(X: DataMatrix, k_max: int) -> int:
            return variance_threshold_baseline(
                covariance_spectrum(X, Orientation.ROWS), fraction
            )

        return baseline

    variant = PeselVariant.from_label(method)

    def criterion(X: DataMatrix, k_max: int) -> int:
        k_eff = min(k_max, min(X.n, X.p) - 1)
        return select_k(pesel_trace(X, variant, k_eff)).k_selected

    return criterion


def expand_cells(config: BenchmarkConfig) -> list[Cell]:
    """Expand templates over their grids; cell c gets seed derived from
    (base_seed, c)."""
    cells: list[Cell] = []
    ordinal = 0
    for template in config.cells:
        for n in template.n:
            for p in template.p:
                for snr in template.snr_grid:
                    seed = int(
                        np.random.SeedSequence(
                            [config.base_seed, ordinal]
                        ).generate_state(1, np.uint64)[0]
                    )
                    spec = ScenarioSpec(
                        scenario=template.scenario,
                        n=n,
                        p=p,
                        k_true=template.k_true,
                        snr=snr,
                        seed=seed,
                        student_scaling=template.student_scaling,
                    )
                    cell_id = (
                        f"{template.scenario.value}-n{n}-p{p}"
                        f"-k{template.k_true}-snr{snr:g}"
                    )
                    cells.append(Cell(cell_id=cell_id, spec=spec))
                    ordinal += 1
    return cells


def evaluate_method(
    X: DataMatrix, method: str, k_max: int
) -> tuple[int | None, bool, float]:
    """Run one method on one dataset: (k or None, degenerate flag, runtime ms)."""
    evaluator = parse_method(method)
    start = time.perf_counter()
    try:
        k = evaluator(X, k_max)
        degenerate = False
    except (DegenerateDataError, np.linalg.LinAlgError):
        k = None
        degenerate = True
    return k, degenerate, (time.perf_counter() - start) * 1e3


def run_benchmark(config: BenchmarkConfig) -> list[BenchmarkRecord]:
    """Produce one record per cell x replicate x method.

    Deterministic in everything but runtimes; degenerate replicates are
    recorded, never fatal. If the config names an output directory it is
    checked for writability up front so a doomed run fails before compute.
    """
    if config.replications < 1:
        raise DomainError(f"replications must be >= 1, got {config.replications}")
    for method in config.methods:
        parse_method(method)
    if config.output_dir is not None:
        _ensure_writable(Path(config.output_dir))

    records: list[BenchmarkRecord] = []
    for cell in expand_cells(config):
        for rep in range(config.replications):
            try:
                dataset = generate(cell.spec, replicate=rep)
            except PeselError:
                for method in config.methods:
                    records.append(
                        BenchmarkRecord(
                            cell_id=cell.cell_id,
                            replicate=rep,
                            method=method,
                            k_selected=None,
                            k_true=cell.spec.k_true,
                            runtime_ms=0.0,
                            degenerate=True,
                        )
                    )
                continue
            for method in config.methods:
                k, degenerate, runtime = evaluate_method(
                    dataset.X, method, config.k_max
                )
                records.append(
                    BenchmarkRecord(
                        cell_id=cell.cell_id,
                        replicate=rep,
                        method=method,
                        k_selected=k,
                        k_true=cell.spec.k_true,
                        runtime_ms=runtime,
                        degenerate=degenerate,
                    )
                )
    return records


def summarize(records: list[BenchmarkRecord]) -> list[CellSummary]:
    """Per (cell, method) selection statistics, independent of record order."""
    if not records:
        raise DomainError("no records to summarize")
    groups: dict[tuple[str, str], list[BenchmarkRecord]] = {}
    for record in records:
        groups.setdefault((record.cell_id, record.method), []).append(record)

    summaries = []
    for (cell_id, method), group in sorted(groups.items()):
        valid = [r.k_selected for r in group if not r.degenerate]
        degenerate = len(group) - len(valid)
        freq: dict[int, int] = {}
        for k in sorted(valid):
            freq[k] = freq.get(k, 0) + 1
        if valid:
            mean_k = float(np.mean(valid))
            top_count = max(freq.values())
            mode_k = min(k for k, c in freq.items() if c == top_count)
            hits = sum(1 for r in group if not r.degenerate and r.k_selected == r.k_true)
            recovery = hits / len(valid)
        else:
            mean_k, mode_k, recovery = None, None, 0.0
        summaries.append(
            CellSummary(
                cell_id=cell_id,
                method=method,
                n_replicates=len(group),
                n_degenerate=degenerate,
                mean_k=mean_k,
                mode_k=mode_k,
                recovery_rate=recovery,
                freq=freq,
            )
        )
    return summaries


def load_config(path) -> BenchmarkConfig:
    """Parse and validate a benchmark config JSON file.

    Raises ConfigError listing every offending key rather than stopping at
    the first problem.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"not valid JSON: {exc}"]) from None
    return config_from_dict(raw)


_TOP_KEYS = {"cells", "replications", "methods", "k_max", "base_seed"}
_CELL_KEYS = {"scenario", "n", "p", "k_true", "snr_grid", "student_scaling"}


def config_from_dict(raw: dict) -> BenchmarkConfig:
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a JSON object"])
    for key in raw:
        if key not in _TOP_KEYS:
            problems.append(f"unknown key {key!r}")
    for key in _TOP_KEYS:
        if key not in raw:
            problems.append(f"missing key {key!r}")
    if problems:
        raise ConfigError(problems)

    replications = _expect_int(raw, "replications", problems, minimum=1)
    k_max = _expect_int(raw, "k_max", problems, minimum=1)
    base_seed = _expect_int(raw, "base_seed", problems, minimum=0)
    if base_seed is not None and base_seed >= 2**64:
        problems.append("'base_seed' must fit in 64 bits")

    methods: list[str] = []
    if not isinstance(raw["methods"], list) or not raw["methods"]:
        problems.append("'methods' must be a non-empty list")
    else:
        for method in raw["methods"]:
            try:
                parse_method(str(method))
                methods.append(str(method))
            except DomainError as exc:
                problems.append(f"'methods': {exc}")

    templates: list[CellTemplate] = []
    if not isinstance(raw["cells"], list) or not raw["cells"]:
        problems.append("'cells' must be a non-empty list")
    else:
        for idx, cell in enumerate(raw["cells"]):
            template = _parse_cell(cell, idx, problems)
            if template is not None:
                templates.append(template)

    if problems:
        raise ConfigError(problems)
    return BenchmarkConfig(
        cells=tuple(templates),
        replications=replications,
        methods=tuple(methods),
        k_max=k_max,
        base_seed=base_seed,
    )


def _expect_int(raw, key, problems, minimum):
    value = raw.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        problems.append(f"{key!r} must be an integer >= {minimum}")
        return None
    return value


def _parse_cell(cell, idx, problems) -> CellTemplate | None:
    where = f"cells[{idx}]"
    if not isinstance(cell, dict):
        problems.append(f"{where} must be an object")
        return None
    bad = False
    for key in cell:
        if key not in _CELL_KEYS:
            problems.append(f"{where}: unknown key {key!r}")
            bad = True
    for key in ("scenario", "n", "p", "k_true", "snr_grid"):
        if key not in cell:
            problems.append(f"{where}: missing key {key!r}")
            bad = True
    if bad:
        return None

    try:
        scenario = Scenario(cell["scenario"])
    except ValueError:
        problems.append(
            f"{where}: unknown scenario {cell['scenario']!r}; expected one of "
            + ", ".join(s.value for s in Scenario)
        )
        return None

    def as_grid(value, key, kind=int):
        items = value if isinstance(value, list) else [value]
        out = []
        for item in items:
            if kind is int and (not isinstance(item, int) or isinstance(item, bool)):
                problems.append(f"{where}: {key!r} entries must be integers")
                return None
            if kind is float and not isinstance(item, (int, float)):
                problems.append(f"{where}: {key!r} entries must be numbers")
                return None
            out.append(kind(item))
        if not out:
            problems.append(f"{where}: {key!r} must not be empty")
            return None
        return tuple(out)

    n_grid = as_grid(cell["n"], "n")
    p_grid = as_grid(cell["p"], "p")
    snr_grid = as_grid(cell["snr_grid"], "snr_grid", kind=float)
    k_true = cell["k_true"]
    if not isinstance(k_true, int) or isinstance(k_true, bool) or k_true < 1:
        problems.append(f"{where}: 'k_true' must be a positive integer")
        return None
    scaling = StudentScaling.VARIANCE_MATCHED
    if "student_scaling" in cell:
        try:
            scaling = StudentScaling(cell["student_scaling"])
        except ValueError:
            problems.append(
                f"{where}: unknown student_scaling {cell['student_scaling']!r}"
            )
            return None
    if n_grid is None or p_grid is None or snr_grid is None:
        return None
    if any(s <= 0 for s in snr_grid):
        problems.append(f"{where}: 'snr_grid' values must be positive")
        return None
    return CellTemplate(
        scenario=scenario,
        n=n_grid,
        p=p_grid,
        k_true=k_true,
        snr_grid=snr_grid,
        student_scaling=scaling,
    )


def config_to_dict(config: BenchmarkConfig) -> dict:
    """Config echo used in manifests (inverse of config_from_dict)."""
    return {
        "replications": config.replications,
        "methods": list(config.methods),
        "k_max": config.k_max,
        "base_seed": config.base_seed,
        "cells": [
            {
                "scenario": t.scenario.value,
                "n": list(t.n),
                "p": list(t.p),
                "k_true": t.k_true,
                "snr_grid": list(t.snr_grid),
                "student_scaling": t.student_scaling.value,
            }
            for t in config.cells
        ],
    }


def _ensure_writable(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    if not os.access(directory, os.W_OK):
        raise IOError(f"output directory is not writable: {directory}")


def write_records_csv(path, records: list[BenchmarkRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {RECORDS_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.cell_id,
                    r.replicate,
                    r.method,
                    "" if r.k_selected is None else r.k_selected,
                    r.k_true,
                    f"{r.runtime_ms:.3f}",
                    int(r.degenerate),
                ]
            )


def write_summary_csv(path, summaries: list[CellSummary], cells: list[Cell]) -> None:
    by_id = {cell.cell_id: cell.spec for cell in cells}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {SUMMARY_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            spec = by_id[s.cell_id]
            freq_json = json.dumps({str(k): v for k, v in sorted(s.freq.items())})
            writer.writerow(
                [
                    s.cell_id,
                    spec.scenario.value,
                    spec.n,
                    spec.p,
                    spec.k_true,
                    f"{spec.snr:g}",
                    s.method,
                    s.n_replicates,
                    s.n_degenerate,
                    "" if s.mean_k is None else repr(s.mean_k),
                    "" if s.mode_k is None else s.mode_k,
                    repr(s.recovery_rate),
                    freq_json,
                ]
            )


def read_csv_rows(path) -> list[dict[str, str]]:
    """Read one of the bench CSVs back, skipping '#' schema comment lines."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    return list(reader)


def run_to_files(config: BenchmarkConfig, tool_version: str) -> dict[str, Path]:
    """Run the benchmark and write records.csv, summary.csv and manifest.json
    into the config's output directory."""
    if config.output_dir is None:
        raise DomainError("config has no output directory")
    out = Path(config.output_dir)
    _ensure_writable(out)

    records = run_benchmark(config)
    summaries = summarize(records)
    cells = expand_cells(config)

    paths = {
        "records": out / "records.csv",
        "summary": out / "summary.csv",
        "manifest": out / "manifest.json",
    }
    write_records_csv(paths["records"], records)
    write_summary_csv(paths["summary"], summaries, cells)
    manifest = {
        "config": config_to_dict(config),
        "base_seed": config.base_seed,
        "tool_version": tool_version,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return paths
