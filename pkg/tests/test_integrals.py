import math

import numpy as np
import pytest

from toeplitz_trace_lab import (
    StochasticFloor, SymbolPairSet, SymbolSpec, UnsupportedScale, limit_integral, tables_for,
    trace_product_exact,
)
from toeplitz_trace_lab.proofcheck import (
    estimate_In_parts, integrand_x, integrand_y, parts_full_exact, representation_check,
)
from toeplitz_trace_lab.proofcheck.integrals import axis_rule


def test_axis_rule_integrates_powers():
    for s in (-0.5, 0.0, 0.4):
        x, w = axis_rule(s, 30, 16)
        got = np.sum(w * np.abs(x) ** (-s))
        assert got == pytest.approx(2 * math.pi ** (1 - s) / (1 - s), rel=1e-12)


def test_forms_agree_pointwise_after_change_of_variables(power_pair):
    # y_k = xbar_k maps one form onto the other with unit Jacobian
    rng = np.random.default_rng(0)
    x = rng.uniform(-math.pi, math.pi, (200, 2))
    y = np.cumsum(x, axis=1)
    a = integrand_x(power_pair, 3, x)
    b = integrand_y(power_pair, 3, y)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


def test_tensor_grid_reproduces_trace(power_pair):
    rc = representation_check(power_pair, 2, "TensorGrid")
    assert rc.passed
    assert abs(rc.integral_estimate - rc.exact_trace) <= 1e-3 * abs(rc.exact_trace)
    assert rc.imag_residual < 1e-8 * abs(rc.exact_trace)


def test_qmc_forms_agree(power_pair):
    rc = representation_check(power_pair, 3, "QuasiMC", 1 << 16, seed=1)
    assert rc.passed
    combined = math.hypot(rc.estimate_stderr, rc.x_form_stderr)
    assert abs(rc.integral_estimate - rc.x_form_estimate) <= 4 * combined


def test_scale_limits(power_pair, mixed_pairs):
    with pytest.raises(UnsupportedScale):
        representation_check(power_pair, 5)
    with pytest.raises(UnsupportedScale):
        one = SymbolSpec.constant()
        representation_check(SymbolPairSet.repeated(one, one, 3), 2)
    with pytest.raises(UnsupportedScale):
        estimate_In_parts(mixed_pairs, 16, (0, 1))


def test_parts_sum_to_whole_for_constant_product():
    one = SymbolSpec.constant()
    pairs = SymbolPairSet.single(one, one)
    est = estimate_In_parts(pairs, 16, (0,), 1 << 18, seed=2)
    exact = parts_full_exact(pairs, 16, (0,))
    assert exact == pytest.approx(16 * (2 * math.pi) ** 2)
    split_se = math.hypot(est.I_n1_stderr, est.I_n2_stderr)
    assert abs(est.I_n1 + est.I_n2 - exact) <= 4 * split_se
    assert abs(est.full - exact) <= 4 * est.full_stderr


def test_parts_increment_matches_trace(power_pair):
    n = 32
    est = estimate_In_parts(power_pair, n, (1,), 1 << 18, seed=5)
    exact = parts_full_exact(power_pair, n, (1,))
    tr = trace_product_exact(power_pair, n, tables_for(power_pair, n)).value
    assert exact < 0 and exact == pytest.approx(tr - n * limit_integral(power_pair), rel=1e-12)
    se = math.hypot(est.I_n1_stderr, est.I_n2_stderr)
    assert abs(est.I_n1 + est.I_n2 - exact) <= 4 * se


def test_unresolved_part_is_reported(power_pair):
    with pytest.raises(StochasticFloor):
        estimate_In_parts(power_pair, 256, (1,), 1 << 10, seed=0)
