"""Empirical convergence rate of ``|Tr[prod T_n(g_j) T_n(h_j)] / n - I(theta)|``.

The error is measured on a (by default dyadic) grid of ``n`` and a straight
line is fitted in log-log coordinates. The fitted slope is compared with the
exponent ``-1 + sum_j (alpha_j + beta_j)_+``, allowing ``epsilon + margin``
of slack for finite-n wobble.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateFit, StochasticFloor, ValidationError
from .fourier import CoeffCache
from .io import write_csv
from .limits import exponents, limit_integral
from .quadrature import DEFAULT_QUAD, QuadConfig
from .symbols import SymbolPairSet
from .toeplitz import tables_for, trace_product_exact, trace_product_stochastic

log = logging.getLogger(__name__)

DEFAULT_MARGIN = 0.1
ZERO_FLOOR = 1e-12


@dataclass(frozen=True)
class Method:
    kind: str = "exact"
    probes: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "hutchinson"):
            raise ValidationError(f"unknown trace method {self.kind!r}")
        if self.kind == "hutchinson" and self.probes < 2:
            raise ValidationError("hutchinson needs probes >= 2")

    @classmethod
    def hutchinson(cls, probes, seed=0):
        return cls("hutchinson", int(probes), int(seed))

    def to_dict(self):
        return {"kind": self.kind, "probes": self.probes, "seed": self.seed}


EXACT = Method()


@dataclass(frozen=True)
class Measurement:
    n: int
    error: float
    stderr: float
    trace: float


def _measure(pairs, n, method, quad, tables=None, limit=None):
    if n < 1:
        raise ValueError("n must be positive")
    if limit is None:
        limit = limit_integral(pairs, quad)
    if tables is None:
        tables = tables_for(pairs, n, quad)
    if method.kind == "exact":
        tr = trace_product_exact(pairs, n, tables)
    else:
        tr = trace_product_stochastic(pairs, n, tables, method.probes, method.seed)
    error = abs(tr.value / n - limit)
    stderr = tr.stderr / n
    if method.kind == "hutchinson" and stderr > 0.0 and error <= 10.0 * stderr:
        raise StochasticFloor(
            f"n={n}: error {error:.3g} is within 10 standard errors ({stderr:.3g}) of 0"
        )
    return Measurement(n, error, stderr, tr.value)


def measure_error(pairs, n, method=EXACT, quad=DEFAULT_QUAD):
    """``|n^-1 Tr[prod_j T_n(g_j) T_n(h_j)] - I(theta)|``."""
    return _measure(pairs, n, method, quad).error


def measure_error_equal_pairs(g, h, p, n, method=EXACT, quad=DEFAULT_QUAD):
    """Error for ``(T_n(g) T_n(h))**p`` against ``(2 pi)^(2p-1) int (g h)^p``."""
    return measure_error(SymbolPairSet.repeated(g, h, p), n, method, quad)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    used: int
    dropped: int


def fit_loglog_slope(points):
    """Least-squares line through ``(log n, log E_n)``.

    Nonpositive errors carry no log-scale information and are dropped (the
    count is returned in ``dropped``).
    """
    pts = [(float(n), float(e)) for n, e in points]
    keep = [(n, e) for n, e in pts if e > 0.0]
    dropped = len(pts) - len(keep)
    if dropped:
        log.info("ZeroError: dropped %d nonpositive errors from the fit", dropped)
    if len({n for n, _ in keep}) < 2:
        raise DegenerateFit(f"need 2 distinct positive points, have {len(keep)}")
    x = np.log([n for n, _ in keep])
    y = np.log([e for _, e in keep])
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - intercept - slope * x) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    # a constant series is fitted perfectly
    r2 = 1.0 if ss_tot <= 1e-28 * max(1.0, len(y)) else 1.0 - ss_res / ss_tot
    return SlopeFit(float(slope), float(intercept), float(r2), len(keep), dropped)


@dataclass(frozen=True)
class RateExperiment:
    pairs: SymbolPairSet
    n_grid: tuple
    method: Method = EXACT
    epsilon: float = 0.01
    quad: QuadConfig = DEFAULT_QUAD
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if len(grid) < 4:
            raise ValidationError("n_grid needs at least 4 points")
        if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
            raise ValidationError("n_grid must be strictly increasing positive integers")
        if not self.epsilon > 0.0:
            raise ValidationError("epsilon must be positive")
        if self.margin < 0.0:
            raise ValidationError("margin must be nonnegative")


def dyadic_grid(lo, hi):
    """Powers of two from ``lo`` to ``hi`` inclusive."""
    out = []
    n = int(lo)
    while n <= hi:
        out.append(n)
        n *= 2
    return tuple(out)


@dataclass
class RateReport:
    measurements: list
    slope: float
    intercept: float
    r_squared: float
    theoretical_exponent: float
    epsilon: float
    margin: float
    limit: float
    method: Method
    passed: bool = False
    zero_error: bool = False
    notes: list = field(default_factory=list)

    @property
    def errors(self):
        return [(m.n, m.error) for m in self.measurements]

    @property
    def pass_(self):
        return self.passed

    def to_dict(self):
        return {
            "errors": [[m.n, m.error] for m in self.measurements],
            "stderr": [m.stderr for m in self.measurements],
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "theoretical_exponent": self.theoretical_exponent,
            "epsilon": self.epsilon,
            "margin": self.margin,
            "limit": self.limit,
            "method": self.method.to_dict(),
            "pass": self.passed,
            "zero_error": self.zero_error,
            "notes": list(self.notes),
        }

    def write_errors_csv(self, path):
        write_csv(
            path,
            ["n", "E_n", "method", "stderr"],
            [(m.n, m.error, self.method.kind, m.stderr) for m in self.measurements],
        )


def check_rate_bound(report, epsilon, margin):
    """True iff the fitted slope does not exceed ``-1 + psi_bar + epsilon + margin``."""
    if report.zero_error:
        return True
    return bool(report.slope <= report.theoretical_exponent + epsilon + margin)


def _diagnostics(measurements, slope, psi_bar):
    notes = []
    if psi_bar > 0.0 and slope < -1.1:
        notes.append(
            f"slope {slope:.4g} decays faster than 1/n; suspect the limit integral"
        )
    errs = [m.error for m in measurements]
    inversions = sum(1 for a, b in zip(errs, errs[1:]) if b > 1.1 * a)
    if inversions:
        notes.append(f"error envelope rose by more than 10% at {inversions} grid step(s)")
    return notes


def run_rate_experiment(exp, cache=None):
    """Measure the error over ``exp.n_grid`` and test the fitted slope."""
    summary = exponents(exp.pairs)
    theory = -1.0 + summary.psi_bar
    limit = limit_integral(exp.pairs, exp.quad)
    cache = cache if cache is not None else CoeffCache()
    tables = tables_for(exp.pairs, exp.n_grid[-1], exp.quad, cache)
    measurements = []
    for n in exp.n_grid:
        m = _measure(exp.pairs, n, exp.method, exp.quad, tables, limit)
        log.debug("n=%d E_n=%.6g", n, m.error)
        measurements.append(m)

    floor = ZERO_FLOOR * max(abs(limit), 1.0)
    points = [(m.n, m.error) for m in measurements if m.error > floor]
    if len(points) < 2:
        report = RateReport(
            measurements, math.nan, math.nan, math.nan, theory, exp.epsilon,
            exp.margin, limit, exp.method, zero_error=True,
            notes=["ZeroError: E_n below 1e-12 |I| on the grid; rate test vacuous"],
        )
        report.passed = True
        return report

    fit = fit_loglog_slope(points)
    report = RateReport(
        measurements, fit.slope, fit.intercept, fit.r_squared, theory,
        exp.epsilon, exp.margin, limit, exp.method,
        notes=_diagnostics(measurements, fit.slope, summary.psi_bar),
    )
    if fit.dropped or len(points) < len(measurements):
        report.notes.append("ZeroError: some E_n fell below the floor and were not fitted")
    report.passed = check_rate_bound(report, exp.epsilon, exp.margin)
    return report
