"""Monte Carlo and tensor-grid evaluation of the 2p-dimensional integral
representations of ``Tr[prod_j T_n(g_j) T_n(h_j)]``, and of its split over
``W`` and ``W^c`` at ``p = 1``.

Two coordinate systems are used. In ``y`` form the integrand is

    prod_j g_j(y_{2j-1}) h_j(y_{2j}) * prod_{j=1}^{2p} D_n(y_j - y_{j-1}),  y_0 = y_2p,

and in ``x`` form (``x_1 = y_1``, ``x_j = y_j - y_{j-1}``, unit Jacobian)

    prod_j g_j(xbar_{2j-1}) h_j(xbar_{2j}) * conj(D_n(xbar_2p - x_1)) prod_{j>=2} D_n(x_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .. import quadrature
from ..exceptions import StochasticFloor, UnsupportedScale
from ..limits import limit_integral
from ..symbols import eval_symbol
from ..toeplitz import tables_for, trace_product_exact
from .dirichlet import dirichlet_eval, l_bound
from .domain import H1_CUTOFF, k_product, w_membership

REPLICATES = 16
# the split estimator's stderr feeds 3-sigma comparisons; more, smaller
# replicates keep that stderr itself from being noisy
PARTS_REPLICATES = 64


def _symbols_at(pairs, pts):
    out = np.ones(pts.shape[0])
    for k, s in enumerate(pairs.symbols()):
        out = out * eval_symbol(s, pts[:, k], allow_infinite=True)
    return out


def integrand_y(pairs, n, y):
    """y-form integrand at the rows of ``y`` (shape ``(m, 2p)``)."""
    y = np.asarray(y, dtype=float)
    prev = np.roll(y, 1, axis=1)
    kern = np.prod(dirichlet_eval(n, y - prev), axis=1)
    with np.errstate(invalid="ignore"):
        vals = _symbols_at(pairs, y) * kern
    # hyperplanes through the singularities carry no mass
    return np.where(np.isfinite(vals), vals, 0.0)


def integrand_x(pairs, n, x):
    """x-form integrand at the rows of ``x`` (shape ``(m, 2p)``)."""
    x = np.asarray(x, dtype=float)
    xbar = np.cumsum(x, axis=1)
    kern = np.conj(dirichlet_eval(n, xbar[:, -1] - x[:, 0]))
    kern = kern * np.prod(dirichlet_eval(n, x[:, 1:]), axis=1)
    with np.errstate(invalid="ignore"):
        vals = _symbols_at(pairs, xbar) * kern
    vals = np.where(np.abs(x[:, 0]) < H1_CUTOFF, 0.0, vals)
    return np.where(np.isfinite(vals), vals, 0.0)


@dataclass(frozen=True)
class RepresentationCheck:
    n: int
    p: int
    exact_trace: float
    integral_estimate: float
    estimate_stderr: float
    x_form_estimate: float
    x_form_stderr: float
    imag_residual: float
    sampler: str
    samples: int
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def _replicate_seeds(seed, count):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _qmc_estimates(pairs, n, samples, seed):
    d = 2 * pairs.p
    per = max(1, samples // REPLICATES)
    m = max(1, math.ceil(math.log2(per)))
    volume = (2.0 * math.pi) ** d
    ys, xs = [], []
    for rs in _replicate_seeds(seed, REPLICATES):
        u = qmc.Sobol(d, scramble=True, seed=rs).random_base2(m)
        pts = math.pi * (2.0 * u - 1.0)
        ys.append(volume * integrand_y(pairs, n, pts).mean())
        xs.append(volume * integrand_x(pairs, n, pts).mean())
    return np.array(ys), np.array(xs), REPLICATES * 2**m


def axis_rule(singular_exponent, panels, nodes, ratio=0.5):
    """1-D rule on [-pi, pi] graded toward 0 from both sides.

    For ``s > 0`` the sliver inside the innermost panel is folded into that
    panel's weights assuming ``|x|**(-s)`` behaviour there; otherwise the
    innermost panel simply extends to 0.
    """
    edges = math.pi * ratio ** np.arange(panels + 1)
    if singular_exponent <= 0.0:
        edges[-1] = 0.0
    cfg = quadrature.QuadConfig(nodes_per_panel=nodes, grading_ratio=ratio)
    x, w = quadrature.panel_nodes(edges, cfg)
    w = w.copy()
    if singular_exponent > 0.0:
        q = ratio ** (1.0 - singular_exponent)
        w[-1] *= 1.0 + q / (1.0 - q)
    x, w = x.ravel(), w.ravel()
    return np.concatenate([-x[::-1], x]), np.concatenate([w[::-1], w])


def _tensor_sum(integrand, rules, chunk=1 << 20):
    """Sum of ``integrand`` times tensor weights, iterating over leading axes."""
    d = len(rules)
    grids = [r[0] for r in rules]
    weights = [r[1] for r in rules]
    tail = 1
    split = d
    while split > 0 and tail * grids[split - 1].size <= chunk:
        split -= 1
        tail *= grids[split].size
    tail_pts = np.stack(np.meshgrid(*grids[split:], indexing="ij"), -1).reshape(-1, d - split)
    tail_w = np.ones(1)
    for w in weights[split:]:
        tail_w = np.multiply.outer(tail_w, w).ravel()
    total = 0.0 + 0.0j
    head_axes = [range(g.size) for g in grids[:split]]
    for idx in np.ndindex(*[len(a) for a in head_axes]):
        head = np.array([grids[k][i] for k, i in enumerate(idx)])
        hw = math.prod(weights[k][i] for k, i in enumerate(idx))
        pts = np.concatenate([np.broadcast_to(head, (tail_pts.shape[0], split)), tail_pts], 1)
        total += hw * np.dot(tail_w, integrand(pts))
    return total


def _tensor_estimates(pairs, n, panels, nodes):
    # y-form singularities sit on coordinate hyperplanes, one exponent per axis
    y_rules = [axis_rule(max(s.alpha, 0.0), panels, nodes) for s in pairs.symbols()]
    y_val = _tensor_sum(lambda pts: integrand_y(pairs, n, pts), y_rules)
    x_rules = [axis_rule(0.0, panels, nodes) for _ in pairs.symbols()]
    x_val = _tensor_sum(lambda pts: integrand_x(pairs, n, pts), x_rules)
    return y_val, x_val, x_rules[0][0].size ** (2 * pairs.p)


def representation_check(pairs, n, sampler="QuasiMC", samples=1 << 20, seed=0,
                         tensor_panels=None, tensor_nodes=None):
    """Compare the trace with both integral forms.

    ``QuasiMC`` uses 16 independently scrambled Sobol' streams (the same
    points feed both forms) and passes when the y-form estimate is within
    3 standard errors of the trace. ``TensorGrid`` uses a product of graded
    Gauss-Legendre rules and passes at 1e-3 relative.
    """
    if not 1 <= n <= 4 or pairs.p not in (1, 2):
        raise UnsupportedScale("representation checks need n <= 4 and p <= 2")
    exact = trace_product_exact(pairs, n, tables_for(pairs, n)).value
    if sampler == "QuasiMC":
        if samples < 1000:
            raise ValueError("QuasiMC needs at least 1000 samples")
        ys, xs, used = _qmc_estimates(pairs, n, samples, seed)
        est, x_est = complex(ys.mean()), complex(xs.mean())
        se = float(np.std(ys.real, ddof=1) / math.sqrt(REPLICATES))
        x_se = float(np.std(xs.real, ddof=1) / math.sqrt(REPLICATES))
        passed = abs(est.real - exact) <= 3.0 * se
    elif sampler == "TensorGrid":
        if tensor_panels is None:
            tensor_panels, tensor_nodes = (24, 16) if pairs.p == 1 else (4, 8)
        est, x_est, used = _tensor_estimates(pairs, n, tensor_panels, tensor_nodes or 8)
        se = x_se = 0.0
        passed = abs(est.real - exact) <= 1e-3 * abs(exact)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return RepresentationCheck(
        n, pairs.p, exact, est.real, se, x_est.real, x_se,
        max(abs(est.imag), abs(x_est.imag)), sampler, int(used), bool(passed),
    )


# --- the W / W^c split at p = 1 -------------------------------------------------


def _sample_envelope(n, u):
    """Inverse-CDF draw from the density proportional to ``L_n(x)**2`` on [-pi, pi]."""
    inner = 2.0 * n  # mass of n^2 on |x| <= 1/n
    outer = n - 1.0 / math.pi  # mass of x^-2 on 1/n < x <= pi, one side
    total = inner + 2.0 * outer
    t = u * total
    x = np.empty_like(u)
    left = t < outer
    mid = (t >= outer) & (t < outer + inner)
    right = t >= outer + inner
    # left tail: cdf(x) = 1/|x| - 1/pi for x in [-pi, -1/n]
    x[left] = -1.0 / (t[left] + 1.0 / math.pi)
    x[mid] = -1.0 / n + (t[mid] - outer) / (n * n)
    r = t[right] - outer - inner
    x[right] = 1.0 / (n - r)
    return x, total


def _envelope_density(n, x, total):
    ax = np.abs(x)
    return np.where(ax <= 1.0 / n, float(n * n), 1.0 / np.maximum(ax, 1.0 / n) ** 2) / total


@dataclass(frozen=True)
class PartsEstimate:
    n: int
    pi: tuple
    I_n1: float
    I_n1_stderr: float
    I_n2: float
    I_n2_stderr: float
    full: float
    full_stderr: float
    samples: int

    def to_dict(self):
        return dict(self.__dict__, pi=list(self.pi))


def _sample_l1(n, u):
    """Inverse-CDF draw from the density proportional to ``L_n(x)`` on [-pi, pi]."""
    inner = 2.0  # mass of n on |x| <= 1/n
    outer = math.log(n * math.pi)  # mass of 1/x on 1/n < x <= pi, one side
    total = inner + 2.0 * outer
    t = u * total
    x = np.empty_like(u)
    left = t < outer
    mid = (t >= outer) & (t < outer + inner)
    right = t >= outer + inner
    x[left] = -math.pi * np.exp(-t[left])
    x[mid] = -1.0 / n + (t[mid] - outer) / n
    x[right] = np.exp(t[right] - outer - inner) / n
    return x, total


def _parts_replicate(pairs, n, pi, c, m, rng):
    # x_1: half the points stratified-uniform, half stratified from the
    # L_n(x_1) density (the complement part concentrates at |x_1| ~ 1/n);
    # each point is weighted by the equal mixture of the two densities.
    # x_2: importance-sampled from L_n^2 and paired with -x_2, which cancels
    # the part of k^(1) that is odd in x_2.
    quarter = m // 4
    strata = (np.arange(quarter) + rng.uniform(size=(2, quarter))) / quarter
    x1_l, l_total = _sample_l1(n, strata[1])
    x1 = np.concatenate([-math.pi + 2.0 * math.pi * strata[0], x1_l])
    q1 = 0.5 / (2.0 * math.pi) + 0.5 * l_bound(n, x1) / l_total
    x2, total = _sample_envelope(n, rng.uniform(size=2 * quarter))
    x1 = np.concatenate([x1, x1])
    q1 = np.concatenate([q1, q1])
    x2 = np.concatenate([x2, -x2])
    pts = np.stack([x1, x2], axis=1)
    kern = np.abs(dirichlet_eval(n, x2)) ** 2
    weight = 1.0 / (q1 * _envelope_density(n, x2, total))
    vals = k_product(pairs, pi, pts) * kern * weight
    vals = np.where((np.abs(x1) < H1_CUTOFF) | ~np.isfinite(vals), 0.0, vals)
    in_w = np.any(w_membership(pts, c), axis=1)
    size = vals.size
    return vals[in_w].sum() / size, vals[~in_w].sum() / size, vals.mean()


def estimate_In_parts(pairs, n, pi, samples=1 << 20, seed=0, c=2.0, require_resolved=True):
    """Estimates of the W and W^c parts of ``I_n^pi`` for ``p = 1``.

    ``full`` is an estimate of the whole-domain integral from an independent
    stream, for the partition consistency check. With ``require_resolved``
    a part whose standard error exceeds 30% of its magnitude raises
    :class:`StochasticFloor`.
    """
    if pairs.p != 1:
        raise UnsupportedScale("the W / W^c split is estimated for p = 1 only")
    if n > 512:
        raise UnsupportedScale("n <= 512 required")
    pi = tuple(int(v) for v in pi)
    m = max(64, samples // PARTS_REPLICATES) // 4 * 4
    seeds = _replicate_seeds(seed, 2 * PARTS_REPLICATES)
    parts = np.array([
        _parts_replicate(pairs, n, pi, c, m, np.random.default_rng(s))[:2]
        for s in seeds[:PARTS_REPLICATES]
    ])
    fulls = np.array([
        _parts_replicate(pairs, n, pi, c, m, np.random.default_rng(s))[2]
        for s in seeds[PARTS_REPLICATES:]
    ])
    means = parts.mean(axis=0)
    ses = parts.std(axis=0, ddof=1) / math.sqrt(PARTS_REPLICATES)
    if require_resolved:
        for name, mu, se in zip(("I_n1", "I_n2"), means, ses):
            if se > 0.3 * abs(mu) and se > 0.0:
                raise StochasticFloor(f"{name}: stderr {se:.3g} vs estimate {mu:.3g}")
    return PartsEstimate(
        n, pi, float(means[0]), float(ses[0]), float(means[1]), float(ses[1]),
        float(fulls.mean()), float(fulls.std(ddof=1) / math.sqrt(PARTS_REPLICATES)),
        PARTS_REPLICATES * m,
    )


def parts_full_exact(pairs, n, pi):
    """Closed value of ``I_n^pi`` at p = 1: ``n I`` for ``pi = (0)`` and
    ``Tr - n I`` for ``pi = (1)``."""
    limit = limit_integral(pairs)
    if tuple(pi) == (0,):
        return n * limit
    trace = trace_product_exact(pairs, n, tables_for(pairs, n)).value
    return trace - n * limit

