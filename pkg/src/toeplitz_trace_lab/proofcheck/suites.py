"""Named check suites. Each returns a flat record with a ``pass`` flag and the
measured quantities, ready for canonical JSON."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..exceptions import RejectionStarved, StochasticFloor
from ..fourier import fourier_coefficient, fourier_coefficient_oracle
from ..limits import exponents, limit_integral
from ..rates import fit_loglog_slope
from ..symbols import SymbolPairSet, SymbolSpec
from ..toeplitz import (
    build_toeplitz, tables_for, trace_product_exact, trace_product_stochastic,
)
from .dirichlet import (
    check_dirichlet_bound, check_l_convolution, check_l_envelope,
    reproducing_identity_error,
)
from .domain import check_lemma3_bound, sample_sequential_Wc, sample_uniform_Wc, sandwich_holds
from .integrals import estimate_In_parts, parts_full_exact, representation_check

log = logging.getLogger(__name__)

DYADIC_N = tuple(2**k for k in range(1, 11))


def _record(name, passed, **metrics):
    return dict(metrics, name=name, **{"pass": bool(passed)})


def dirichlet_suite(n_list=DYADIC_N, grid_points=10_000):
    """Kernel bound, envelope comparison, reproducing identity and the
    normalised convolution of two envelopes."""
    grid = np.linspace(-math.pi, math.pi, grid_points)
    out = []
    worst = check_dirichlet_bound(n_list, grid)
    out.append(_record("dirichlet_bound", worst <= math.pi + 1e-9, worst_ratio=worst))

    env = check_l_envelope(n_list, grid)
    out.append(_record("l_envelope", env <= 1.0 + 1e-12, worst_ratio=env))

    rng = np.random.default_rng(11)
    repro = max(
        reproducing_identity_error(n, x, z)
        for n in n_list
        for x, z in rng.uniform(-math.pi, math.pi, size=(8, 2))
    )
    out.append(_record("reproducing_identity", repro <= 1e-8, max_rel_error=repro))

    conv_n = [n for n in n_list if n >= 4]
    xs = np.concatenate([[0.0], np.geomspace(1e-4, math.pi, 48), -np.geomspace(1e-3, 3.0, 8)])
    norms = [check_l_convolution(n, xs) for n in conv_n]
    # bounded by 10 and not growing: the large-n end sits at or below the small-n end
    ok = max(norms) <= 10.0 and norms[-1] <= norms[0]
    out.append(_record("l_convolution", ok, n=conv_n, normalised_max=norms))
    return out


def _sandwich_samples(p, size, c, rng):
    try:
        return sample_uniform_Wc(p, size, c, rng), "uniform"
    except RejectionStarved:
        return sample_sequential_Wc(p, size, c, rng), "sequential"


def domain_suite(samples=10_000, sandwich_samples=100_000, alpha=0.3, beta=0.3, c=2.0,
                 seed=0):
    pairs = SymbolPairSet.single(SymbolSpec.pure_power(alpha), SymbolSpec.pure_power(beta))
    out = []
    for pi in ((0,), (1,)):
        bc = check_lemma3_bound(pairs, pi, samples, c, seed)
        out.append(_record(
            f"k_bound_pi{pi[0]}", bc.violation_rate == 0.0,
            calibrated_C=bc.calibrated_C, violation_rate=bc.violation_rate,
            samples=bc.samples,
        ))
    rng = np.random.default_rng(seed)
    for p in (1, 2, 3):
        x, how = _sandwich_samples(p, sandwich_samples, c, rng)
        held = sandwich_holds(x, c)
        out.append(_record(
            f"sandwich_p{p}", bool(np.all(held)), samples=len(x), sampler=how,
            failures=int(np.sum(~held)),
        ))
    return out


def representation_suite(alpha=0.2, beta=0.2, samples=1 << 20, seed=7,
                         constant_p=(1, 2)):
    g, h = SymbolSpec.pure_power(alpha), SymbolSpec.pure_power(beta)
    out = []
    for n, p in ((2, 1), (3, 1), (2, 2)):
        rc = representation_check(SymbolPairSet.repeated(g, h, p), n, "QuasiMC", samples, seed)
        out.append(_record(
            f"representation_n{n}_p{p}", rc.passed, exact=rc.exact_trace,
            estimate=rc.integral_estimate, stderr=rc.estimate_stderr,
            x_form_estimate=rc.x_form_estimate, imag_residual=rc.imag_residual,
        ))
    one = SymbolSpec.constant()
    for p in constant_p:
        n = 3 if p == 1 else 2
        pairs = SymbolPairSet.repeated(one, one, p)
        rc = representation_check(pairs, n, "TensorGrid")
        # T_n(1) = 2 pi I, so the trace of 2p factors is n (2 pi)^(2p)
        analytic = n * (2.0 * math.pi) ** (2 * p)
        rel = abs(rc.integral_estimate - analytic) / analytic
        out.append(_record(
            f"representation_constant_p{p}", rel <= 1e-6, n=n, analytic=analytic,
            estimate=rc.integral_estimate, rel_error=rel,
        ))
    return out


def parts_suite(alpha=0.2, beta=0.2, n_list=(16, 32, 64, 128, 256), samples=1 << 20,
                seed=3, slack=0.2, epsilon=0.01):
    """Growth of both parts of ``I_n^(1)`` and the consistency of the split.

    The complement part may grow no faster than ``n^(psi_+ + slack)`` and
    the W part no faster than ``n^(psi_bar + epsilon + slack)``, the slack
    absorbing log factors. The split sum is compared, within three combined
    standard errors, with an independent whole-domain estimate and with the
    exact value ``Tr - n I``.
    """
    pairs = SymbolPairSet.single(SymbolSpec.pure_power(alpha), SymbolSpec.pure_power(beta))
    summary = exponents(pairs)
    ests = []
    consistent = True
    for n in n_list:
        try:
            est = estimate_In_parts(pairs, n, (1,), samples, seed)
        except StochasticFloor as exc:
            return [_record("parts_growth", False, n=n, error=str(exc))]
        exact = parts_full_exact(pairs, n, (1,))
        split = est.I_n1 + est.I_n2
        split_se = math.hypot(est.I_n1_stderr, est.I_n2_stderr)
        consistent &= abs(split - est.full) <= 3.0 * math.hypot(split_se, est.full_stderr)
        consistent &= abs(split - exact) <= 3.0 * split_se
        ests.append((est, exact))
    fit2 = fit_loglog_slope([(e.n, abs(e.I_n2)) for e, _ in ests])
    fit1 = fit_loglog_slope([(e.n, abs(e.I_n1)) for e, _ in ests])
    bound2 = summary.psi_plus + slack
    bound1 = summary.psi_bar + epsilon + slack
    rows = [
        {"n": e.n, "I_n1": e.I_n1, "I_n1_stderr": e.I_n1_stderr, "I_n2": e.I_n2,
         "I_n2_stderr": e.I_n2_stderr, "full": e.full, "full_stderr": e.full_stderr,
         "exact": x}
        for e, x in ests
    ]
    return [
        _record("parts_growth", fit2.slope <= bound2, slope=fit2.slope, bound=bound2,
                r_squared=fit2.r_squared, rows=rows),
        _record("parts_growth_W", fit1.slope <= bound1, slope=fit1.slope, bound=bound1,
                r_squared=fit1.r_squared),
        _record("parts_consistency", consistent, rows=rows),
    ]


ORACLE_CASES = (
    ("pure_power", 0.2, 0), ("pure_power", 0.2, 1), ("pure_power", 0.2, 17),
    ("pure_power", 0.2, 128), ("pure_power", 0.6, 3), ("pure_power", 0.6, 64),
    ("pure_power", -0.4, 0), ("pure_power", -0.4, 9), ("pure_power", -0.9, 40),
    ("pure_power", 0.45, 5), ("farima", 0.15, 0), ("farima", 0.15, 2),
    ("farima", 0.15, 33), ("farima", 0.35, 100), ("farima", -0.2, 7),
    ("power_times_smooth", 0.3, 0), ("power_times_smooth", 0.3, 4),
    ("power_times_smooth", 0.3, 50), ("power_times_smooth", -0.5, 12),
    ("power_times_smooth", 0.7, 128),
)


def _oracle_spec(kind, a):
    if kind == "pure_power":
        return SymbolSpec.pure_power(a)
    if kind == "farima":
        return SymbolSpec.farima(a)
    return SymbolSpec.power_times_smooth(a, (1.0, 0.3, -0.1))


def oracle_suite(n_list=(7, 64, 257, 512), hutchinson_seeds=20, probes=64):
    out = []
    rng = np.random.default_rng(5)
    worst = 0.0
    for n in n_list:
        table = tables_for(SymbolPairSet.single(
            SymbolSpec.farima(0.15), SymbolSpec.pure_power(-0.3)), n)[0]
        op = build_toeplitz(table, n)
        v = rng.standard_normal(n)
        dense = op.dense() @ v
        worst = max(worst, float(np.linalg.norm(op @ v - dense) / np.linalg.norm(dense)))
    out.append(_record("fft_vs_dense", worst <= 1e-10, max_rel_error=worst))

    errs = []
    for kind, a, tau in ORACLE_CASES:
        spec = _oracle_spec(kind, a)
        got = fourier_coefficient(spec, tau)
        ref = fourier_coefficient_oracle(spec, tau)
        errs.append(abs(got - ref) / abs(ref))
    out.append(_record("quadrature_vs_oracle", max(errs) <= 1e-10, cases=len(errs),
                       max_rel_error=max(errs)))

    n = 256
    d = SymbolSpec.farima(0.15)
    pairs = SymbolPairSet.single(d, d)
    tables = tables_for(pairs, n)
    exact = trace_product_exact(pairs, n, tables).value
    runs = [trace_product_stochastic(pairs, n, tables, probes, s)
            for s in range(hutchinson_seeds)]
    mean = float(np.mean([r.value for r in runs]))
    pooled = math.sqrt(sum(r.stderr**2 for r in runs)) / len(runs)
    out.append(_record("hutchinson_mean", abs(mean - exact) <= 3.0 * pooled,
                       exact=exact, mean=mean, pooled_stderr=pooled,
                       seeds=hutchinson_seeds, probes=probes))
    return out


def zero_error_suite(n_list=(8, 64, 256)):
    one = SymbolSpec.constant()
    worst = 0.0
    for p in (1, 2):
        pairs = SymbolPairSet.repeated(one, one, p)
        limit = limit_integral(pairs)
        for n in n_list:
            tr = trace_product_exact(pairs, n, tables_for(pairs, n)).value
            worst = max(worst, abs(tr / n - limit) / abs(limit))
    return [_record("constant_zero_error", worst <= 1e-9, max_rel_error=worst)]


SUITES = {
    "zero_error": zero_error_suite,
    "dirichlet": dirichlet_suite,
    "domain": domain_suite,
    "representation": representation_suite,
    "oracles": oracle_suite,
    "parts": parts_suite,
}


def run_suites(names=None, **options):
    """Run the named suites (all by default) and return the flat list of records.

    ``options`` maps a suite name to keyword arguments for that suite.
    """
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    records = []
    for name in names:
        log.info("running suite %s", name)
        for rec in SUITES[name](**options.get(name, {})):
            records.append(dict(rec, suite=name))
    return records
