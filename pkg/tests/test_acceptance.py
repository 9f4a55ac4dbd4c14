"""Acceptance criteria 1-9. Each test prints one ``[criterion k] PASS|FAIL`` line
(visible with ``pytest -s`` or in the captured output of a failure)."""

import math
import time

import numpy as np
import pytest

from toeplitz_trace_lab import (
    RateExperiment, SymbolPairSet, SymbolSpec, dyadic_grid, limit_integral,
    run_rate_experiment, tables_for, trace_product_exact,
)
from toeplitz_trace_lab.proofcheck.suites import (
    dirichlet_suite, domain_suite, oracle_suite, parts_suite, representation_suite,
)


def verdict(k, ok, elapsed, budget, detail):
    ok = bool(ok) and elapsed < budget
    print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s of {budget}s) {detail}")
    assert ok, detail


def pure(a):
    return SymbolSpec.pure_power(a)


def test_criterion_1_constant_zero_error():
    t0 = time.perf_counter()
    one = SymbolSpec.constant()
    worst = 0.0
    for p in (1, 2):
        pairs = SymbolPairSet.repeated(one, one, p)
        limit = limit_integral(pairs)
        for n in (8, 64, 256):
            tr = trace_product_exact(pairs, n, tables_for(pairs, n)).value
            worst = max(worst, abs(tr / n - limit) / abs(limit))
    verdict(1, worst <= 1e-9, time.perf_counter() - t0, 1,
            f"max E_n/|I| = {worst:.3g} (need <= 1e-9)")


def _rate(pairs):
    t0 = time.perf_counter()
    report = run_rate_experiment(RateExperiment(pairs, dyadic_grid(64, 4096), epsilon=0.01))
    return report, time.perf_counter() - t0


def test_criterion_2_positive_memory_rate():
    report, dt = _rate(SymbolPairSet.single(pure(0.2), pure(0.2)))
    bound = -0.6 + 0.01 + 0.1
    ok = report.slope <= bound and report.r_squared >= 0.95
    verdict(2, ok, dt, 300,
            f"slope {report.slope:.4f} (need <= {bound:.2f}), r^2 {report.r_squared:.4f} (need >= 0.95)")


def test_criterion_3_sign_mixed_rate():
    pairs = SymbolPairSet(((pure(0.3), pure(0.2)), (pure(0.2), pure(-0.9))))
    report, dt = _rate(pairs)
    bound = -0.5 + 0.11
    verdict(3, report.slope <= bound, dt, 600,
            f"slope {report.slope:.4f} (need <= {bound:.2f}; psi = -0.2, psi_bar = 0.5)")


def test_criterion_4_negative_memory_rate():
    report, dt = _rate(SymbolPairSet.single(pure(0.2), pure(-0.4)))
    verdict(4, report.slope <= -0.85, dt, 300, f"slope {report.slope:.4f} (need <= -0.85)")


def _summary(records):
    fails = [r["name"] for r in records if not r["pass"]]
    return not fails, (f"failed: {fails}" if fails else f"{len(records)} checks passed")


def test_criterion_5_integral_representation():
    t0 = time.perf_counter()
    records = representation_suite(alpha=0.2, beta=0.2, samples=1 << 20, seed=7)
    ok, detail = _summary(records)
    z = [f"{(r['estimate'] - r['exact']) / r['stderr']:+.2f}" for r in records if "stderr" in r]
    rel = [f"{r['rel_error']:.1e}" for r in records if "rel_error" in r]
    verdict(5, ok, time.perf_counter() - t0, 120,
            f"{detail}; QMC z-scores {z} (need |z| <= 3); constant rel errors {rel} (need <= 1e-6)")


def test_criterion_6_kernel_suite():
    t0 = time.perf_counter()
    records = dirichlet_suite(n_list=tuple(2**k for k in range(1, 11)), grid_points=10_000)
    ok, detail = _summary(records)
    by = {r["name"]: r for r in records}
    verdict(6, ok, time.perf_counter() - t0, 60,
            f"{detail}; |D_n|/L_n max {by['dirichlet_bound']['worst_ratio']:.4f}, "
            f"identity err {by['reproducing_identity']['max_rel_error']:.1e}, "
            f"convolution norms {np.round(by['l_convolution']['normalised_max'], 2).tolist()}")


def test_criterion_7_domain_suite():
    t0 = time.perf_counter()
    records = domain_suite(samples=10_000, sandwich_samples=100_000, alpha=0.3, beta=0.3, c=2.0)
    ok, detail = _summary(records)
    rates = [r["violation_rate"] for r in records if "violation_rate" in r]
    verdict(7, ok, time.perf_counter() - t0, 60, f"{detail}; violation rates {rates}")


def test_criterion_8_oracles():
    t0 = time.perf_counter()
    records = oracle_suite(n_list=(7, 64, 257, 512), hutchinson_seeds=20)
    ok, detail = _summary(records)
    by = {r["name"]: r for r in records}
    h = by["hutchinson_mean"]
    verdict(8, ok, time.perf_counter() - t0, 120,
            f"{detail}; fft err {by['fft_vs_dense']['max_rel_error']:.1e}, "
            f"quadrature err {by['quadrature_vs_oracle']['max_rel_error']:.1e} over "
            f"{by['quadrature_vs_oracle']['cases']} cases, Hutchinson |mean-exact|/pooled = "
            f"{abs(h['mean'] - h['exact']) / h['pooled_stderr']:.2f}")


def test_criterion_9_split_diagnostics():
    t0 = time.perf_counter()
    records = parts_suite(alpha=0.2, beta=0.2, n_list=(16, 32, 64, 128, 256))
    ok, detail = _summary(records)
    growth = records[0]
    extra = (f"; I_n2 growth slope {growth['slope']:.3f} (need <= {growth['bound']:.2f})"
             if "slope" in growth else f"; {growth.get('error')}")
    verdict(9, ok, time.perf_counter() - t0, 300, detail + extra)
