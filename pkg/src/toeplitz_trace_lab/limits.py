"""Exponent bookkeeping and the limit ``(2 pi)^(2p-1) int_{-pi}^{pi} prod_j g_j h_j``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .exceptions import NonIntegrable
from .quadrature import DEFAULT_QUAD
from .symbols import eval_symbol, regular_part


@dataclass(frozen=True)
class ExponentSummary:
    psi: float
    psi_bar: float
    psi_plus: float
    per_pair: tuple

    def to_dict(self):
        return {
            "psi": self.psi,
            "psi_bar": self.psi_bar,
            "psi_plus": self.psi_plus,
            "per_pair": list(self.per_pair),
        }


def exponents(pairs):
    per_pair = tuple(g.alpha + h.alpha for g, h in pairs.pairs)
    psi = math.fsum(per_pair)
    psi_bar = math.fsum(max(s, 0.0) for s in per_pair)
    return ExponentSummary(psi, psi_bar, max(psi, 0.0), per_pair)


def two_pi_power(k):
    if k >= 7:
        return math.exp(k * math.log(2.0 * math.pi))
    return (2.0 * math.pi) ** k


def _product(pairs, x):
    out = np.ones_like(x)
    for s in pairs.symbols():
        out = out * eval_symbol(s, x)
    return out


def limit_integral(pairs, quad=DEFAULT_QUAD):
    """``I(theta)`` by graded quadrature of ``2 prod g_j h_j`` on (0, pi]."""
    summary = exponents(pairs)
    if summary.psi >= 1.0:
        raise NonIntegrable(f"psi = {summary.psi} >= 1")
    half = quadrature.singular_integral(
        lambda x: _product(pairs, x), max(summary.psi, 0.0), quad
    )
    return two_pi_power(2 * pairs.p - 1) * 2.0 * half


def limit_integral_oracle(pairs):
    """Same quantity through the adaptive algebraic-weight scheme."""
    summary = exponents(pairs)

    def regular(x):
        out = np.ones_like(np.asarray(x, dtype=float))
        for s in pairs.symbols():
            out = out * regular_part(s, x)
        return out

    half = quadrature.adaptive_singular_integral(regular, summary.psi)
    return two_pi_power(2 * pairs.p - 1) * 2.0 * half
