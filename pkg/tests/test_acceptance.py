"""Acceptance gate: every criterion below prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines; the
Monte Carlo criteria reuse the benchmark harness end to end and finish in
well under their stated time budgets on commodity hardware.
"""

import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from pesel import (
    DataMatrix,
    EigenStructure,
    Orientation,
    PeselVariant,
    Scenario,
    ScenarioSpec,
    SpikeBelowNoiseError,
    covariance_spectrum,
    effective_dimension,
    equalize_singular_values,
    generate,
    load_csv,
    pesel_trace,
    select_k,
    transpose,
)
from pesel.bench import BenchmarkConfig, CellTemplate, run_benchmark, summarize
from pesel.reference import closed_form_sil, direct_sil_loglik, ml_estimates


def report(name: str, ok: bool, detail: str) -> bool:
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def recovery_by_method(config: BenchmarkConfig) -> dict[tuple[str, str], object]:
    summaries = summarize(run_benchmark(config))
    return {(s.cell_id, s.method): s for s in summaries}


def test_oracle_equivalence():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    for _ in range(50):
        n = int(rng.integers(6, 13))
        p = int(rng.integers(4, 11))
        X = DataMatrix(rng.standard_normal((n, p)))
        for orientation in Orientation:
            samples, ambient = (n, p) if orientation is Orientation.ROWS else (p, n)
            spectrum = covariance_spectrum(X, orientation)
            for k in range(0, min(n, p) - 1):
                for structure in EigenStructure:
                    try:
                        est = ml_estimates(X, k, structure, orientation)
                    except SpikeBelowNoiseError:
                        continue
                    direct = direct_sil_loglik(X, est, structure, orientation)
                    closed = closed_form_sil(spectrum, samples, ambient, k, structure)
                    worst = max(worst, abs(direct - closed) / abs(closed))
                    checked += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 10.0
    assert report(
        "oracle equivalence",
        ok,
        f"{checked} evaluations, worst rel diff {worst:.2e}, {elapsed:.1f}s",
    )


def test_transposition_duality():
    rng = np.random.default_rng(1002)
    worst = 0.0
    pairs = [
        (PeselVariant.HETERO_P, PeselVariant.HETERO_N),
        (PeselVariant.HOMO_P, PeselVariant.HOMO_N),
    ]
    for _ in range(20):
        n = int(rng.integers(5, 25))
        p = int(rng.integers(5, 25))
        X = DataMatrix(rng.standard_normal((n, p)))
        k_max = min(n, p) - 1
        for variant_p, variant_n in pairs:
            on_x = pesel_trace(X, variant_p, k_max).scores
            on_xt = pesel_trace(transpose(X), variant_n, k_max).scores
            for a, b in zip(on_x, on_xt):
                if math.isinf(a.total) or math.isinf(b.total):
                    assert a.total == b.total
                    continue
                worst = max(worst, abs(a.total - b.total))
    ok = worst <= 1e-10
    assert report(
        "transposition duality", ok, f"worst abs score difference {worst:.2e}"
    )


def _scaling_check(X: DataMatrix, k_max: int) -> float:
    worst = 0.0
    for variant in PeselVariant:
        base = pesel_trace(X, variant, k_max)
        base_k = select_k(base).k_selected
        for c in (0.01, 1.0, 100.0):
            scaled = pesel_trace(DataMatrix(c * X.values), variant, k_max)
            assert select_k(scaled).k_selected == base_k
            finite_pattern = [math.isinf(s.total) for s in base.scores]
            assert finite_pattern == [math.isinf(s.total) for s in scaled.scores]
            diffs = [
                s.total - b.total
                for s, b in zip(scaled.scores, base.scores)
                if not math.isinf(b.total)
            ]
            spread = max(diffs) - min(diffs)
            scale = max(1.0, abs(diffs[0]))
            worst = max(worst, spread / scale)
    return worst


def test_scaling_argmax_invariance():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(8, 30))
        p = int(rng.integers(8, 30))
        X = DataMatrix(rng.standard_normal((n, p)))
        worst = max(worst, _scaling_check(X, min(n, p) - 2))
    scenarios = list(Scenario)
    for i in range(20):
        spec = ScenarioSpec(
            scenario=scenarios[i % len(scenarios)],
            n=24 + 2 * (i % 5),
            p=20 + 2 * (i % 7),
            k_true=3,
            snr=[0.5, 1.0, 4.0][i % 3],
            seed=9000 + i,
        )
        X = generate(spec).X
        worst = max(worst, _scaling_check(X, min(X.n, X.p) - 2))
    ok = worst < 1e-8
    assert report(
        "scaling argmax invariance",
        ok,
        f"40 matrices x 4 variants x 3 scales, worst rel spread {worst:.2e}",
    )


def test_penalty_formula_checks():
    frozen = [
        (PeselVariant.HETERO_N, 100, 10, 2, 30),
        (PeselVariant.HOMO_N, 100, 10, 2, 29),
        (PeselVariant.HETERO_P, 10, 100, 2, 30),
        (PeselVariant.HOMO_P, 10, 100, 2, 29),
        (PeselVariant.HETERO_N, 40, 7, 3, 21 - 6 + 3 + 7 + 1),
        (PeselVariant.HOMO_N, 40, 7, 3, 21 - 6 + 7 + 2),
        (PeselVariant.HETERO_N, 40, 7, 0, 8),
        (PeselVariant.HOMO_N, 40, 7, 0, 9),
    ]
    mismatches = [
        (variant, n, p, k)
        for variant, n, p, k, expected in frozen
        if effective_dimension(variant, n, p, k) != expected
    ]
    checked = len(frozen)
    for n in (5, 10, 20, 50, 200):
        for p in (4, 9, 30, 120):
            for k in range(min(n, p)):
                stiefel_p = p * k - k * (k + 1) // 2
                stiefel_n = n * k - k * (k + 1) // 2
                expectations = {
                    PeselVariant.HETERO_N: stiefel_p + k + p + 1,
                    PeselVariant.HOMO_N: stiefel_p + p + 1 + 1,
                    PeselVariant.HETERO_P: stiefel_n + k + n + 1,
                    PeselVariant.HOMO_P: stiefel_n + n + 1 + 1,
                }
                for variant, expected in expectations.items():
                    checked += 1
                    if effective_dimension(variant, n, p, k) != expected:
                        mismatches.append((variant, n, p, k))
    ok = not mismatches
    assert report(
        "penalty formula checks",
        ok,
        f"{checked} exact integer comparisons, {len(mismatches)} mismatches",
    )


def test_scenario2_recovery():
    start = time.perf_counter()
    strong = BenchmarkConfig(
        cells=(
            CellTemplate(
                scenario=Scenario.FIXED_EFFECT,
                n=(100,),
                p=(800,),
                k_true=5,
                snr_grid=(4.0,),
            ),
        ),
        replications=100,
        methods=("hetero-p",),
        k_max=99,
        base_seed=20250501,
    )
    (strong_summary,) = recovery_by_method(strong).values()
    strong_rate = strong_summary.recovery_rate

    wide = BenchmarkConfig(
        cells=(
            CellTemplate(
                scenario=Scenario.FIXED_EFFECT,
                n=(50,),
                p=(2000,),
                k_true=5,
                snr_grid=(1.0,),
            ),
        ),
        replications=100,
        methods=("hetero-p", "hetero-n"),
        k_max=49,
        base_seed=20250502,
    )
    wide_summaries = recovery_by_method(wide)
    rate_p = next(s for (_, m), s in wide_summaries.items() if m == "hetero-p").recovery_rate
    rate_n = next(s for (_, m), s in wide_summaries.items() if m == "hetero-n").recovery_rate
    elapsed = time.perf_counter() - start

    ok = strong_rate >= 0.90 and rate_p > rate_n and elapsed < 300.0
    assert report(
        "scenario 2 recovery",
        ok,
        f"n=100/p=800/snr=4 recovery {strong_rate:.2f} (need >= 0.90); "
        f"n=50/p=2000/snr=1 hetero-p {rate_p:.2f} > hetero-n {rate_n:.2f}; "
        f"{elapsed:.0f}s < 300s",
    )


def test_scenario4_robustness():
    config = BenchmarkConfig(
        cells=(
            CellTemplate(
                scenario=Scenario.SURPLUS_VARS,
                n=(100,),
                p=(800,),
                k_true=5,
                snr_grid=(1.0, 4.0, 8.0),
            ),
        ),
        replications=100,
        methods=("hetero-p", "variance-threshold:0.9"),
        k_max=99,
        base_seed=20250503,
    )
    summaries = summarize(run_benchmark(config))
    pesel_means = {
        s.cell_id: s.mean_k for s in summaries if s.method == "hetero-p"
    }
    vt_snr8 = next(
        s.mean_k
        for s in summaries
        if s.method == "variance-threshold:0.9" and s.cell_id.endswith("snr8")
    )
    ok = all(m <= 6.0 for m in pesel_means.values()) and vt_snr8 > 6.0
    detail = (
        "hetero-p mean k by cell "
        + ", ".join(f"{cid.split('-')[-1]}={m:.2f}" for cid, m in sorted(pesel_means.items()))
        + f" (all <= 6); variance-threshold mean k at snr=8 {vt_snr8:.1f} (> 6)"
    )
    assert report("scenario 4 robustness", ok, detail)


def test_homo_vs_hetero_spectrum_shapes():
    config = BenchmarkConfig(
        cells=(
            CellTemplate(
                scenario=Scenario.EQUAL_SPECTRUM,
                n=(100,),
                p=(50,),
                k_true=5,
                snr_grid=(1.0,),
            ),
            CellTemplate(
                scenario=Scenario.EXP_SPECTRUM,
                n=(100,),
                p=(50,),
                k_true=5,
                snr_grid=(1.0,),
            ),
        ),
        replications=100,
        methods=("hetero-n", "homo-n"),
        k_max=25,
        base_seed=20250504,
    )
    summaries = summarize(run_benchmark(config))
    rates = {
        (s.cell_id.split("-")[0], s.method): s.recovery_rate for s in summaries
    }
    equal_ok = (
        rates[("equal_spectrum", "homo-n")]
        >= rates[("equal_spectrum", "hetero-n")] - 0.05
    )
    exp_ok = (
        rates[("exp_spectrum", "hetero-n")]
        >= rates[("exp_spectrum", "homo-n")] - 0.05
    )
    ok = equal_ok and exp_ok
    assert report(
        "homo vs hetero",
        ok,
        f"equal spectrum: homo {rates[('equal_spectrum', 'homo-n')]:.2f} vs "
        f"hetero {rates[('equal_spectrum', 'hetero-n')]:.2f}; exp spectrum: "
        f"hetero {rates[('exp_spectrum', 'hetero-n')]:.2f} vs "
        f"homo {rates[('exp_spectrum', 'homo-n')]:.2f} (slack 0.05)",
    )


def test_equalization_contract():
    worst_spread = 0.0
    worst_iter = 0
    worst_col = 0.0
    for seed in range(20):
        M = np.random.default_rng(3000 + seed).standard_normal((100, 50))
        result = equalize_singular_values(M, 5, tol=1e-6, max_iter=100)
        worst_spread = max(worst_spread, result.spread)
        worst_iter = max(worst_iter, result.iterations)
        norms = np.linalg.norm(result.matrix, axis=0)
        means = result.matrix.mean(axis=0)
        worst_col = max(
            worst_col,
            float(np.max(np.abs(norms - 1.0))),
            float(np.max(np.abs(means))),
        )
        if not result.converged:
            break
    ok = worst_spread < 1e-6 and worst_iter <= 100 and worst_col < 1e-8
    assert report(
        "equalization contract",
        ok,
        f"20 inputs: max spread {worst_spread:.2e}, max iterations {worst_iter}, "
        f"max column deviation {worst_col:.2e}",
    )


def test_real_data_selection():
    candidates = [os.environ.get("PESEL_URINE_CSV"), "data/UrineSpectra.csv"]
    path = next((c for c in candidates if c and Path(c).exists()), None)
    if path is None:
        report("real data selection", True, "SKIPPED - dataset not supplied")
        pytest.skip("UrineSpectra CSV not supplied (set PESEL_URINE_CSV)")
    X = load_csv(path)
    assert (X.n, X.p) == (18, 189)
    k_p = select_k(pesel_trace(X, PeselVariant.HETERO_P, 17)).k_selected
    k_n = select_k(pesel_trace(X, PeselVariant.HETERO_N, 17)).k_selected
    ok = k_p == 1 and k_n == 2
    assert report(
        "real data selection", ok, f"hetero-p selected {k_p} (want 1), hetero-n {k_n} (want 2)"
    )
