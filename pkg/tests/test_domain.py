import math

import numpy as np
import pytest

from toeplitz_trace_lab import RejectionStarved, SymbolPairSet, SymbolSpec
from toeplitz_trace_lab.proofcheck import (
    DomainPoint, check_lemma3_bound, check_sandwich, in_domain_W, sample_sequential_Wc,
    sample_uniform_Wc, sandwich_holds, w_membership,
)


def test_membership_by_hand():
    # xbar = (1, 1.1, 0.6, 0.65): only the last test |0.65| <= 2 |0.65 - 1| holds
    pt = DomainPoint((1.0, 0.1, -0.5, 0.05))
    m = in_domain_W(pt)
    assert m.members == frozenset({4})
    assert m.in_W
    # |xbar_1| = 0.1 <= 2 |x_2| puts this one in W_1
    assert in_domain_W(DomainPoint((0.1, 1.0))).members == frozenset({1, 2})
    assert not in_domain_W(DomainPoint((1.0, 0.1))).in_W
    assert pt.partial_sums == pytest.approx((1.0, 1.1, 0.6, 0.65))
    assert (pt.c_minus, pt.c_plus) == (0.5, 1.5)


def test_partition_is_total():
    x = np.random.default_rng(0).uniform(-math.pi, math.pi, (5000, 4))
    flags = w_membership(x, 2.0)
    assert flags.dtype == bool and flags.shape == (5000, 4)
    inside = np.any(flags, axis=1)
    # every sampled point is classified exactly once
    assert inside.sum() + (~inside).sum() == 5000


@pytest.mark.parametrize("p", [1, 2, 3])
def test_samplers_land_in_complement(p):
    rng = np.random.default_rng(p)
    for draw in (sample_uniform_Wc, sample_sequential_Wc):
        x = draw(p, 2000, 2.0, rng)
        assert x.shape == (2000, 2 * p)
        assert not np.any(w_membership(x, 2.0))
        assert np.all(sandwich_holds(x, 2.0))
        assert check_sandwich(DomainPoint(tuple(x[0])))


def test_rejection_starves_at_high_dimension():
    with pytest.raises(RejectionStarved):
        sample_uniform_Wc(6, 100, 2.0, np.random.default_rng(0), batch=4096)


@pytest.mark.parametrize("pi", [(0,), (1,)])
def test_k_bound(pi):
    pairs = SymbolPairSet.single(SymbolSpec.pure_power(0.3), SymbolSpec.pure_power(0.3))
    res = check_lemma3_bound(pairs, pi, 4000, seed=1)
    assert res.violation_rate == 0.0
    assert 0 < res.calibrated_C < 10
