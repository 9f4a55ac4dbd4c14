import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_trace_lab import (
    Family, SingularPoint, SymbolPairSet, SymbolSpec, ValidationError,
    check_class_membership, eval_symbol, eval_symbol_derivative,
)

SPECS = [
    SymbolSpec.pure_power(0.4),
    SymbolSpec.pure_power(-0.6),
    SymbolSpec.farima(0.2),
    SymbolSpec.farima(-0.3),
    SymbolSpec.power_times_smooth(0.3, (0.5, -0.2)),
    SymbolSpec.constant(2.0),
]

spec_strategy = st.sampled_from(SPECS)
angle = st.floats(min_value=1e-3, max_value=20.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(spec_strategy, angle)
def test_even(spec, x):
    assert eval_symbol(spec, x) == pytest.approx(eval_symbol(spec, -x), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(spec_strategy, angle)
def test_periodic(spec, x):
    # skip points that land within rounding of the singularity after the shift
    if abs(math.remainder(x, 2 * math.pi)) < 1e-3:
        return
    assert eval_symbol(spec, x) == pytest.approx(eval_symbol(spec, x + 2 * math.pi), rel=1e-11)


@pytest.mark.parametrize("spec", SPECS)
def test_finite_difference_order_two(spec):
    x = np.array([0.3, 1.1, 2.5, -0.8])
    d = eval_symbol_derivative(spec, x)
    errs = []
    for h in (1e-3, 1e-4):
        fd = (eval_symbol(spec, x + h) - eval_symbol(spec, x - h)) / (2 * h)
        errs.append(np.abs(fd - d))
    if spec.family is Family.CONSTANT:
        assert np.all(errs[0] < 1e-10)
        return
    # a 10x smaller step cuts the error about 100x
    ratio = errs[0] / errs[1]
    assert np.all((ratio > 50) & (ratio < 200))


def test_singular_point():
    with pytest.raises(SingularPoint):
        eval_symbol(SymbolSpec.pure_power(0.2), 0.0)
    assert eval_symbol(SymbolSpec.pure_power(0.2), 0.0, allow_infinite=True) == math.inf
    assert eval_symbol(SymbolSpec.pure_power(-0.2), 0.0) == 0.0
    with pytest.raises(SingularPoint):
        eval_symbol(SymbolSpec.farima(0.1), 2 * math.pi)


@pytest.mark.parametrize("spec", SPECS[:5])
def test_class_bounds_stable_under_refinement(spec):
    # nested grids, each adding one decade closer to 0
    sups = []
    grid = np.geomspace(1e-2, math.pi, 400)
    for k in range(2, 9):
        sups.append(check_class_membership(spec, grid))
        grid = np.concatenate([np.geomspace(10.0 ** -(k + 1), 10.0**-k, 60), grid])
    s0 = np.array([r.sup0 for r in sups])
    s1 = np.array([r.sup1 for r in sups])
    assert np.all(np.diff(s0) >= -1e-12) and np.all(np.diff(s1) >= -1e-12)
    assert s0[-1] <= 1.01 * s0[-2] + 1e-12 and s1[-1] <= 1.01 * s1[-2] + 1e-12


def test_validation_messages():
    with pytest.raises(ValidationError, match="alpha < 1 required"):
        SymbolSpec.pure_power(1.2)
    with pytest.raises(ValidationError):
        SymbolSpec(Family.CONSTANT, 0.5)
    with pytest.raises(ValidationError):
        SymbolSpec.power_times_smooth(0.1, (1.5,))
    with pytest.raises(ValidationError, match="Theta_1"):
        SymbolPairSet.repeated(SymbolSpec.pure_power(0.3), SymbolSpec.pure_power(0.2), 2)


def test_round_trip_records():
    for spec in SPECS:
        assert SymbolSpec.from_dict(spec.to_dict()) == spec
    assert SymbolSpec.from_dict({"family": "Farima", "d": 0.15}).alpha == pytest.approx(0.3)
    with pytest.raises(ValidationError):
        SymbolSpec.from_dict({"family": "PurePower", "alpha": 0.1, "beta": 2})
    pairs = SymbolPairSet(((SPECS[0], SPECS[1]), (SPECS[2], SPECS[3])))
    assert SymbolPairSet.from_list(pairs.to_list()) == pairs


def test_pair_set_layout(mixed_pairs):
    assert mixed_pairs.p == 2
    assert mixed_pairs.theta == (0.3, 0.2, 0.2, -0.9)
    g1, h1, g2, h2 = mixed_pairs.symbols()
    assert (g1.alpha, h1.alpha, g2.alpha, h2.alpha) == (0.3, 0.2, 0.2, -0.9)
    assert mixed_pairs.rotate(1).pairs == mixed_pairs.pairs[::-1]
