"""Fourier coefficients ``hat f(tau) = int_{-pi}^{pi} exp(i tau x) f(x) dx``.

Symbols are real and even, so ``hat f(tau) = 2 int_0^pi f(x) cos(tau x) dx``
is real and even in ``tau``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import quadrature
from .quadrature import DEFAULT_QUAD, QuadConfig
from .symbols import Family, SymbolSpec, eval_symbol, regular_part


def _symbol_integrand(spec):
    def f(x):
        return eval_symbol(spec, x, allow_infinite=True)

    return f


def fourier_coefficient(spec, tau, quad=DEFAULT_QUAD):
    """Single coefficient by graded quadrature with oscillation-limited panels."""
    tau = abs(int(tau))
    f = _symbol_integrand(spec)
    value = quadrature.singular_integral(
        lambda x: f(x) * np.cos(tau * x),
        max(spec.alpha, 0.0),
        quad,
        max_frequency=tau,
    )
    return 2.0 * value


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """Coefficients for lags ``0..max_lag``; ``coeffs[k]`` serves ``+k`` and ``-k``."""

    spec: SymbolSpec
    coeffs: np.ndarray
    quad: QuadConfig = DEFAULT_QUAD

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def max_lag(self):
        return self.coeffs.size - 1

    def __getitem__(self, lag):
        return self.coeffs[abs(lag)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lag", "value"])
            for lag, value in enumerate(self.coeffs):
                writer.writerow([lag, format(float(value), ".17g")])

    @classmethod
    def from_csv(cls, path, spec, quad=DEFAULT_QUAD):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        lags = [int(r["lag"]) for r in rows]
        if lags != list(range(len(lags))):
            raise ValueError("lags must run 0..max_lag in order")
        return cls(spec, np.array([float(r["value"]) for r in rows]), quad)


def _graded_head(spec, quad, head, max_lag):
    """Contribution of ``(0, head]`` to ``int_0^pi f(x) cos(tau x) dx``."""
    edges = quadrature.graded_breakpoints(head, quad)
    x, w = quadrature.panel_nodes(edges, quad)
    fx = eval_symbol(spec, x) * w
    taus = np.arange(max_lag + 1, dtype=float)
    # (tau, panel)
    panels = np.einsum("pm,tpm->tp", fx, np.cos(taus[:, None, None] * x[None]))
    tail = panels[:, -1] * quadrature.tail_factor(quad, max(spec.alpha, 0.0))
    return panels[:, ::-1].sum(axis=1) + tail


def _uniform_body(spec, quad, panels, max_lag):
    """Contribution of ``[pi/panels, pi]`` using equal panels and one FFT per node index.

    With width ``h = pi/panels`` the node ``x_km = h (k + (1 + u_m)/2)`` gives
    ``cos(tau x_km) = Re[exp(i tau h (1+u_m)/2) * exp(2 pi i tau k / (2 panels))]``,
    so the sum over ``k`` is a length-``2*panels`` inverse DFT.
    """
    h = math.pi / panels
    u, w = quadrature.gauss_legendre(quad.nodes_per_panel)
    k = np.arange(1, panels)
    offset = 0.5 * (1.0 + u)
    x = h * (k[None, :] + offset[:, None])
    a = np.zeros((u.size, 2 * panels))
    a[:, 1:panels] = eval_symbol(spec, x) * (0.5 * h * w)[:, None]
    spectrum = np.fft.ifft(a, axis=1)[:, : max_lag + 1] * (2 * panels)
    taus = np.arange(max_lag + 1, dtype=float)
    phase = np.exp(1j * h * offset[:, None] * taus[None, :])
    return np.real(phase * spectrum).sum(axis=0)


def fourier_coefficients_batch(spec, max_lag, quad=DEFAULT_QUAD, cache=None):
    """Coefficients for lags ``0..max_lag`` in one pass.

    The mesh is graded on ``(0, pi/M]`` and uniform with ``M = 4 max(max_lag, 1)``
    panels on the rest, so every panel satisfies the same width limit
    ``pi / (4 tau)`` as :func:`fourier_coefficient`.
    """
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    if cache is not None:
        hit = cache.get(spec, max_lag, quad)
        if hit is not None:
            return hit
    panels = 4 * max(max_lag, 1)
    head = _graded_head(spec, quad, math.pi / panels, max_lag)
    body = _uniform_body(spec, quad, panels, max_lag)
    table = CoeffTable(spec, 2.0 * (head + body), quad)
    if cache is not None:
        cache.put(table)
    return table


class CoeffCache:
    """Explicit cache of coefficient tables keyed by (spec, max_lag, quad).

    Single-writer: guard with a lock if shared across threads.
    """

    def __init__(self):
        self._tables = {}

    def get(self, spec, max_lag, quad):
        return self._tables.get((spec, max_lag, quad))

    def put(self, table):
        self._tables[(table.spec, table.max_lag, table.quad)] = table

    def __len__(self):
        return len(self._tables)


def farima_coefficient_closed_form(d, tau, scale=1.0):
    """``2 pi`` times the FARIMA(0,d,0) autocovariance at lag ``tau``.

    ``gamma(k) = Gamma(1-2d) Gamma(k+d) / (Gamma(k-d+1) Gamma(1-d) Gamma(d))``
    for unit innovation variance. Validation oracle only.
    """
    k = abs(int(tau))
    if d == 0.0:
        return 2.0 * math.pi * scale * (1.0 if k == 0 else 0.0)
    lead = special.gammaln(1.0 - 2.0 * d) - special.gammaln(1.0 - d)
    if k == 0:
        log_ratio = lead - special.gammaln(1.0 - d)
        return 2.0 * math.pi * scale * math.exp(log_ratio)
    # Gamma(k+d)/Gamma(d) via recurrence keeps the sign right for d < 0
    ratio = math.exp(lead)
    ratio *= math.exp(special.gammaln(k + d) - special.gammaln(k - d + 1.0))
    ratio /= special.gamma(d)
    return 2.0 * math.pi * scale * ratio


def fourier_coefficient_oracle(spec, tau):
    """Coefficient from the adaptive algebraic-weight oracle (independent scheme)."""
    tau = abs(int(tau))
    s = spec.alpha if spec.family is not Family.CONSTANT else 0.0

    def regular(x):
        return regular_part(spec, x) * np.cos(tau * x)

    return 2.0 * quadrature.adaptive_singular_integral(regular, s, frequency=tau)
