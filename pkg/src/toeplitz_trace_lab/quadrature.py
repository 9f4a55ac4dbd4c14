"""Graded-mesh Gauss-Legendre quadrature for integrands with an algebraic
endpoint singularity ``x**(-s)`` at ``x = 0``, ``s < 1``.

Panels shrink geometrically toward the origin. Below ``abs_floor`` the
remaining sliver is closed with a geometric-series extrapolation of the
innermost panel, which is exact for a pure power.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import NonIntegrable, ToleranceNotMet


@dataclass(frozen=True)
class QuadConfig:
    panels_per_decade: int = 4
    nodes_per_panel: int = 32
    grading_ratio: float = 0.5
    abs_floor: float = 1e-15
    rel_tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.grading_ratio < 1.0:
            raise ValueError("grading_ratio must lie in (0, 1)")
        if not 0.0 < self.abs_floor < math.pi:
            raise ValueError("abs_floor must lie in (0, pi)")
        if self.panels_per_decade < 1 or self.nodes_per_panel < 1:
            raise ValueError("panel counts must be positive")
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")

    @property
    def ratio(self):
        """Effective panel ratio: the finer of the two grading settings."""
        return min(self.grading_ratio, 10.0 ** (-1.0 / self.panels_per_decade))

    def to_dict(self):
        return {
            "panels_per_decade": self.panels_per_decade,
            "nodes_per_panel": self.nodes_per_panel,
            "grading_ratio": self.grading_ratio,
            "abs_floor": self.abs_floor,
            "rel_tol": self.rel_tol,
        }


DEFAULT_QUAD = QuadConfig()


@functools.lru_cache(maxsize=16)
def gauss_legendre(m):
    """Nodes and weights of the m-point rule on [-1, 1] (read-only arrays)."""
    u, w = np.polynomial.legendre.leggauss(m)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def graded_breakpoints(top, quad):
    """Decreasing breakpoints ``top * r**k`` until one falls below abs_floor."""
    r = quad.ratio
    count = math.ceil(math.log(quad.abs_floor / top) / math.log(r)) + 1
    count = max(count, 2)
    return top * r ** np.arange(count)


def panel_nodes(edges, quad):
    """Nodes/weights for the panels ``[edges[i+1], edges[i]]``.

    Returns arrays of shape (panels, nodes_per_panel).
    """
    u, w = gauss_legendre(quad.nodes_per_panel)
    hi = np.asarray(edges[:-1], dtype=float)[:, None]
    lo = np.asarray(edges[1:], dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    return lo + half * (1.0 + u), half * w


def _split_for_oscillation(edges, max_frequency):
    if max_frequency <= 0:
        return np.asarray(edges, dtype=float)
    width_cap = math.pi / (4.0 * max_frequency)
    out = [edges[0]]
    for hi, lo in zip(edges[:-1], edges[1:]):
        pieces = max(1, math.ceil((hi - lo) / width_cap))
        if pieces > 1:
            out.extend(hi - (hi - lo) * np.arange(1, pieces) / pieces)
        out.append(lo)
    return np.asarray(out, dtype=float)


def tail_factor(quad, singular_exponent):
    """``q/(1-q)`` with ``q = r**(1-s)``: ratio of the sliver below the
    innermost panel to that panel, for an integrand ``x**(-s)``."""
    q = quad.ratio ** (1.0 - singular_exponent)
    return q / (1.0 - q)


def singular_integral(integrand, singular_exponent, quad=DEFAULT_QUAD, max_frequency=0.0,
                      upper=math.pi):
    """Integrate ``integrand`` over ``(0, upper]``.

    Parameters
    ----------
    integrand : callable
        Vectorised function of an array of points in ``(0, upper]``.
    singular_exponent : float
        ``s`` such that ``integrand(x) ~ C x**(-s)`` as ``x -> 0``. Must be < 1.
    quad : QuadConfig
    max_frequency : float
        Highest oscillation frequency present; panels wider than
        ``pi / (4 * max_frequency)`` are split.

    Raises
    ------
    NonIntegrable
        If ``singular_exponent >= 1``.
    ToleranceNotMet
        If the innermost panels do not follow the announced power law
        closely enough for the tail extrapolation to be trusted.
    """
    if not singular_exponent < 1.0:
        raise NonIntegrable(f"x**(-{singular_exponent}) is not integrable at 0")
    edges = graded_breakpoints(upper, quad)
    coarse = len(edges) - 1
    # innermost two panels stay unsplit so their ratio is the power-law ratio
    fine = _split_for_oscillation(edges[:-2], max_frequency)
    edges = np.concatenate([fine, edges[-2:]])
    x, w = panel_nodes(edges, quad)
    panels = np.sum(w * np.asarray(integrand(x), dtype=float), axis=1)
    body = float(np.sum(panels[::-1]))

    last, prev = panels[-1], panels[-2]
    tail = last * tail_factor(quad, singular_exponent)
    total = body + tail
    if coarse >= 2 and prev != 0.0:
        q_seen = last / prev
        if abs(q_seen) < 1.0:
            tail_seen = last * q_seen / (1.0 - q_seen)
            if abs(tail_seen - tail) > quad.rel_tol * max(abs(total), 1e-300):
                raise ToleranceNotMet(
                    f"innermost panel ratio {q_seen:.6g} inconsistent with "
                    f"exponent {singular_exponent}; tail disagreement "
                    f"{abs(tail_seen - tail):.3g}"
                )
    return total


def adaptive_singular_integral(regular, singular_exponent, frequency=0.0,
                               upper=math.pi, epsrel=1e-13):
    """Independent oracle for ``int_0^upper x**(-s) regular(x) dx``.

    ``regular`` must be smooth and finite on ``[0, upper]`` (the singular
    factor is handled exactly by the algebraic weight of QUADPACK's QAWS,
    an adaptive bisection scheme with modified Clenshaw-Curtis rules).
    ``frequency`` only sets how finely the interval is pre-chunked.
    """
    if not singular_exponent < 1.0:
        raise NonIntegrable(f"x**(-{singular_exponent}) is not integrable at 0")
    chunks = max(1, math.ceil(frequency * upper / math.pi))
    bounds = np.linspace(0.0, upper, chunks + 1)

    def scalar(x):
        return float(regular(np.asarray(x, dtype=float)))

    with warnings.catch_warnings():
        # QUADPACK flags roundoff once it has hit machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _chunked_quad(scalar, singular_exponent, bounds, epsrel)


def _chunked_quad(scalar, singular_exponent, bounds, epsrel):
    total, _ = integrate.quad(
        scalar, bounds[0], bounds[1], weight="alg", wvar=(-singular_exponent, 0.0),
        epsabs=0.0, epsrel=epsrel, limit=500,
    )
    for lo, hi in zip(bounds[1:-1], bounds[2:]):
        piece, _ = integrate.quad(
            lambda x: x ** (-singular_exponent) * scalar(x), lo, hi,
            epsabs=0.0, epsrel=epsrel, limit=500,
        )
        total += piece
    return total
