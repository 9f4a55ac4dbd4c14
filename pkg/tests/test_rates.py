import numpy as np
import pytest

from toeplitz_trace_lab import (
    DegenerateFit, Method, RateExperiment, SymbolPairSet, SymbolSpec, ValidationError,
    dyadic_grid, fit_loglog_slope, measure_error, measure_error_equal_pairs,
    run_rate_experiment,
)
from toeplitz_trace_lab.exceptions import StochasticFloor


def test_dyadic_grid():
    assert dyadic_grid(64, 4096) == (64, 128, 256, 512, 1024, 2048, 4096)
    assert dyadic_grid(3, 20) == (3, 6, 12)


def test_fit_recovers_power_law():
    n = np.array([16, 32, 64, 128, 256])
    fit = fit_loglog_slope(zip(n, 5.0 * n**-0.7))
    assert fit.slope == pytest.approx(-0.7, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(5.0), abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_drops_zeros_and_degenerates():
    fit = fit_loglog_slope([(8, 0.0), (16, 1.0), (32, 0.5)])
    assert fit.dropped == 1 and fit.used == 2
    with pytest.raises(DegenerateFit):
        fit_loglog_slope([(8, 0.0), (16, 1.0)])


def test_experiment_validation(power_pair):
    with pytest.raises(ValidationError):
        RateExperiment(power_pair, (8, 16, 32))
    with pytest.raises(ValidationError):
        RateExperiment(power_pair, (8, 16, 16, 32))
    with pytest.raises(ValidationError):
        RateExperiment(power_pair, (8, 16, 32, 64), epsilon=0.0)
    with pytest.raises(ValidationError):
        Method("lanczos")


def test_error_nonnegative_and_equal_pairs_identity():
    g, h = SymbolSpec.pure_power(0.2), SymbolSpec.farima(0.1)
    for p in (1, 2):
        for n in (16, 50):
            direct = measure_error(SymbolPairSet.repeated(g, h, p), n)
            equal = measure_error_equal_pairs(g, h, p, n)
            assert direct >= 0.0
            assert direct == equal


def test_constant_symbols_give_vacuous_pass():
    one = SymbolSpec.constant()
    report = run_rate_experiment(RateExperiment(SymbolPairSet.single(one, one), (8, 16, 32, 64)))
    assert report.zero_error and report.passed
    assert any("ZeroError" in note for note in report.notes)


def test_envelope_and_slope(power_pair):
    report = run_rate_experiment(RateExperiment(power_pair, dyadic_grid(32, 1024)))
    errs = [e for _, e in report.errors]
    rises = [b / a for a, b in zip(errs, errs[1:]) if b > a]
    assert len(rises) <= 1 and all(r <= 1.1 for r in rises)
    assert report.passed
    assert report.slope <= report.theoretical_exponent + report.epsilon + report.margin
    assert report.slope >= -1.1
    d = report.to_dict()
    assert d["pass"] is True and len(d["errors"]) == 6


def test_hutchinson_floor(power_pair):
    # at n = 64 the error is far below the stochastic noise of 4 probes
    exp = RateExperiment(power_pair, (64, 128, 256, 512), Method.hutchinson(4, 0))
    with pytest.raises(StochasticFloor):
        run_rate_experiment(exp)


def test_errors_csv(tmp_path, power_pair):
    report = run_rate_experiment(RateExperiment(power_pair, (16, 32, 64, 128)))
    path = tmp_path / "e.csv"
    report.write_errors_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,E_n,method,stderr"
    assert lines[1].startswith("16,") and lines[1].endswith(",exact,0")
