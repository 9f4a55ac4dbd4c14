import math

import numpy as np
import pytest
from scipy import integrate

from toeplitz_trace_lab import (
    CoeffCache, CoeffTable, NonIntegrable, QuadConfig, SymbolSpec, eval_symbol,
    farima_coefficient_closed_form, fourier_coefficient, fourier_coefficient_oracle,
    fourier_coefficients_batch,
)
from toeplitz_trace_lab.quadrature import adaptive_singular_integral, singular_integral


@pytest.mark.parametrize("s", [-0.5, 0.0, 0.3, 0.9])
def test_power_integral_closed_form(s):
    got = singular_integral(lambda x: x ** (-s), max(s, 0.0))
    assert got == pytest.approx(math.pi ** (1 - s) / (1 - s), rel=1e-13)


def test_nonintegrable():
    with pytest.raises(NonIntegrable):
        singular_integral(lambda x: 1 / x, 1.0)


def test_adaptive_oracle_matches_closed_form():
    got = adaptive_singular_integral(lambda x: np.ones_like(x), 0.6)
    assert got == pytest.approx(math.pi**0.4 / 0.4, rel=1e-12)


@pytest.mark.parametrize("d", [-0.3, 0.1, 0.15, 0.35])
def test_farima_closed_form(d):
    spec = SymbolSpec.farima(d)
    table = fourier_coefficients_batch(spec, 40)
    ref = np.array([farima_coefficient_closed_form(d, k) for k in range(41)])
    assert np.max(np.abs(table.coeffs - ref)) <= 1e-12 * abs(ref[0])


def test_complex_exponential_quadrature_is_real_and_even():
    # the full complex integral over [-pi, pi] splits at the singularity
    rng = np.random.default_rng(0)
    specs = [SymbolSpec.pure_power(0.3), SymbolSpec.farima(-0.2),
             SymbolSpec.power_times_smooth(0.1, (0.4,)), SymbolSpec.pure_power(-0.5),
             SymbolSpec.farima(0.2)]
    for spec in specs:
        tau = int(rng.integers(0, 12))
        parts = []
        for part in (np.cos, np.sin):
            total = 0.0
            for a, b in ((-math.pi, 0.0), (0.0, math.pi)):
                val, _ = integrate.quad(lambda x: part(tau * x) * eval_symbol(spec, x),
                                        a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
                total += val
            parts.append(total)
        coef = fourier_coefficient(spec, tau)
        assert parts[0] == pytest.approx(coef, rel=1e-7, abs=1e-9)
        assert abs(parts[1]) < 1e-9
        assert fourier_coefficient(spec, -tau) == coef


@pytest.mark.parametrize("spec", [SymbolSpec.pure_power(0.2), SymbolSpec.farima(0.35),
                                  SymbolSpec.power_times_smooth(-0.4, (0.3, 0.1))])
def test_refinement_stable(spec):
    base = QuadConfig()
    fine = QuadConfig(nodes_per_panel=2 * base.nodes_per_panel)
    for tau in (0, 3, 50):
        a = fourier_coefficient(spec, tau, base)
        b = fourier_coefficient(spec, tau, fine)
        assert abs(a - b) <= 10 * base.rel_tol * abs(b)


@pytest.mark.parametrize("alpha", [0.2, 0.6, -0.4])
def test_riemann_lebesgue_envelope(alpha):
    spec = SymbolSpec.pure_power(alpha)
    mags = [abs(fourier_coefficient(spec, 2**k)) for k in range(1, 9)]
    assert all(b < a for a, b in zip(mags, mags[1:]))


@pytest.mark.parametrize("spec", [SymbolSpec.pure_power(0.2), SymbolSpec.pure_power(-0.6),
                                  SymbolSpec.farima(0.15), SymbolSpec.constant(3.0)])
def test_batch_matches_single_and_oracle(spec):
    table = fourier_coefficients_batch(spec, 130)
    for tau in (0, 1, 2, 7, 64, 129, 130):
        single = fourier_coefficient(spec, tau)
        scale = abs(table[0])
        assert abs(table[tau] - single) <= 1e-11 * scale
        if spec.family.value != "Constant":
            assert abs(single - fourier_coefficient_oracle(spec, tau)) <= 1e-10 * scale


def test_constant_coefficients():
    table = fourier_coefficients_batch(SymbolSpec.constant(), 10)
    assert table[0] == pytest.approx(2 * math.pi, rel=1e-15)
    assert np.max(np.abs(table.coeffs[1:])) < 1e-14


def test_table_csv_round_trip(tmp_path):
    spec = SymbolSpec.pure_power(0.2)
    table = fourier_coefficients_batch(spec, 20)
    path = tmp_path / "c.csv"
    table.to_csv(path)
    back = CoeffTable.from_csv(path, spec)
    assert np.array_equal(back.coeffs, table.coeffs)
    with pytest.raises(ValueError):
        table.coeffs[0] = 1.0


def test_cache_is_exactly_keyed():
    cache = CoeffCache()
    spec = SymbolSpec.pure_power(0.2)
    a = fourier_coefficients_batch(spec, 16, cache=cache)
    assert fourier_coefficients_batch(spec, 16, cache=cache) is a
    fourier_coefficients_batch(spec, 16, QuadConfig(nodes_per_panel=16), cache=cache)
    fourier_coefficients_batch(spec, 17, cache=cache)
    assert len(cache) == 3
