import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from toeplitz_trace_lab import RateExperiment, dyadic_grid, run_rate_experiment
from toeplitz_trace_lab.estimators import PowerLawRate


def test_fit_predict_and_params():
    n = np.array([[32], [64], [128], [256]])
    y = 2.0 * n[:, 0] ** -0.45
    est = PowerLawRate(bound=-0.4).fit(n, y)
    assert est.slope_ == pytest.approx(-0.45)
    assert est.predict([[512]])[0] == pytest.approx(2.0 * 512**-0.45)
    assert est.passes()
    assert est.get_params() == {"bound": -0.4}
    assert clone(est).set_params(bound=-0.5).bound == -0.5
    assert est.score(n, y) == pytest.approx(1.0)


def test_unfitted_and_shape_errors():
    with pytest.raises(NotFittedError):
        PowerLawRate().predict([[3]])
    with pytest.raises(ValueError):
        PowerLawRate().fit(np.ones((4, 2)), np.ones(4))
    with pytest.raises(ValueError):
        PowerLawRate().fit([[1], [2]], [1.0, 1.0]).passes()


def test_agrees_with_rate_report(power_pair):
    report = run_rate_experiment(RateExperiment(power_pair, dyadic_grid(32, 512)))
    n, e = zip(*report.errors)
    est = PowerLawRate().fit(np.array(n)[:, None], e)
    assert est.slope_ == pytest.approx(report.slope, rel=1e-12)
