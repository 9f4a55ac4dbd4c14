"""The kernel ``D_n(x) = sum_{t=1}^n exp(i x t)`` and its envelope
``L_n(x) = min(1/|x|, n)``."""

from __future__ import annotations

import math

import numpy as np

from ..symbols import reduce_angle


def dirichlet_eval(n, x):
    """Closed form ``exp(i(n+1)x/2) sin(nx/2) / sin(x/2)``, equal to ``n`` at
    ``x = 0 (mod 2 pi)``. Vectorised over ``x``."""
    x = reduce_angle(x)
    half = 0.5 * x
    s = np.sin(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s == 0.0, float(n), np.sin(n * half) / s)
    out = np.exp(1j * (n + 1) * half) * ratio
    return complex(out) if out.ndim == 0 else out


def dirichlet_direct(n, x):
    """Term-by-term sum, O(n) per point; the reference for :func:`dirichlet_eval`."""
    x = np.asarray(x, dtype=float)
    t = np.arange(1, n + 1)
    return np.exp(1j * np.multiply.outer(x, t)).sum(axis=-1)


def l_bound(n, x):
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.minimum(np.where(x == 0.0, np.inf, 1.0 / x), float(n))
    return float(out) if out.ndim == 0 else out


def check_dirichlet_bound(n_list, x_grid):
    """Largest ``|D_n(x)| / L_n(x)`` over the grid (at most pi on [-pi, pi])."""
    x_grid = np.asarray(x_grid, dtype=float)
    worst = 0.0
    for n in n_list:
        ratio = np.abs(dirichlet_eval(n, x_grid)) / l_bound(n, x_grid)
        worst = max(worst, float(np.max(ratio)))
    return worst


def check_l_envelope(n_list, x_grid, etas=(0.0, 0.5, 1.0), rtol=1e-12):
    """Worst ``L_n / min{n, 2n/(1+n|x|), n^eta |x|^(eta-1)}``; at most 1 + rtol."""
    x = np.abs(np.asarray(x_grid, dtype=float))
    x = x[x > 0.0]
    worst = 0.0
    for n in n_list:
        lhs = l_bound(n, x)
        for eta in etas:
            rhs = np.minimum.reduce([
                np.full_like(x, float(n)),
                2.0 * n / (1.0 + n * x),
                n**eta * x ** (eta - 1.0),
            ])
            worst = max(worst, float(np.max(lhs / rhs)))
    return worst


def _piece_integral(a, b, factors):
    """Exact integral over [a, b] of a product of two factors, each either a
    constant or ``1/|y - pole|`` with no sign change of ``y - pole`` on the piece."""
    consts = [v for kind, v in factors if kind == "c"]
    poles = [v for kind, v in factors if kind == "p"]
    scale = math.prod(consts)
    if not poles:
        return scale * (b - a)
    if len(poles) == 1:
        q = poles[0]
        return scale * abs(math.log(abs(b - q)) - math.log(abs(a - q)))
    q1, q2 = poles
    if q1 == q2:
        return abs(1.0 / (a - q1) - 1.0 / (b - q1))

    def prim(y):
        return math.log(abs((y - q1) / (y - q2))) / (q1 - q2)

    return abs(prim(b) - prim(a))


def l_convolution(n, x, periodic=False):
    """``int_{-pi}^{pi} L_n(x - y) L_n(y) dy`` by exact piecewise integration.

    ``L_n`` is taken on the real line, so ``x - y`` ranges over [-2 pi, 2 pi];
    with ``periodic=True`` it is reduced into [-pi, pi] first. On each piece
    between breakpoints both factors are either the constant ``n`` or
    ``1/|y - pole|``, whose products have logarithmic or rational
    antiderivatives.
    """
    x = float(x)
    inv = 1.0 / n
    cuts = {-math.pi, math.pi, -inv, 0.0, inv}
    shifts = (-1, 0, 1) if periodic else (0,)
    for z in (0.0, inv, -inv, math.pi, -math.pi):
        for k in shifts:
            y = x - z - 2.0 * math.pi * k
            if -math.pi < y < math.pi:
                cuts.add(y)
    cuts = sorted(cuts)
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b - a <= 0.0:
            continue
        mid = 0.5 * (a + b)
        factors = []
        factors.append(("c", float(n)) if abs(mid) <= inv else ("p", 0.0))
        u = float(reduce_angle(x - mid)) if periodic else x - mid
        shift = x - mid - u
        factors.append(("c", float(n)) if abs(u) <= inv else ("p", x - shift))
        total += _piece_integral(a, b, factors)
    return total


def check_l_convolution(n, x_grid, periodic=False):
    """Largest ``l_convolution(n, x) / (L_n(x) log n)`` over the grid."""
    if n < 2:
        raise ValueError("need n >= 2 so that log n > 0")
    x_grid = np.asarray(x_grid, dtype=float)
    vals = np.array([l_convolution(n, x, periodic) for x in x_grid])
    return float(np.max(vals / (l_bound(n, x_grid) * math.log(n))))


def reproducing_identity_error(n, x, z, nodes=None):
    """Relative error of ``(1/2pi) int D_n(x-y) D_n(y-z) dy = D_n(x-z)``.

    The integrand is a trigonometric polynomial of degree < 2n in ``y``, so the
    periodic trapezoid rule with more than 2n nodes integrates it exactly.
    """
    nodes = nodes or 4 * n + 8
    y = -math.pi + 2.0 * math.pi * np.arange(nodes) / nodes
    vals = dirichlet_eval(n, x - y) * dirichlet_eval(n, y - z)
    lhs = vals.mean()
    rhs = dirichlet_eval(n, x - z)
    return abs(lhs - rhs) / max(abs(rhs), 1.0)
