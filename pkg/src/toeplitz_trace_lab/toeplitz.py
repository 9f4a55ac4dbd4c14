"""Symmetric Toeplitz operators and traces of their products.

``T_n(f)`` has entry ``(i, j) = hat f(i - j)``. Products are applied with a
2n circulant embedding, so a matvec costs O(n log n) and the exact trace of
``prod_j T_n(g_j) T_n(h_j)`` costs O(p n^2 log n).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, InsufficientLags
from .fourier import fourier_coefficients_batch
from .quadrature import DEFAULT_QUAD

THREADS_ENV = "TOEPLITZ_TRACE_LAB_THREADS"
# columns per block; bounds the (2n x block) complex work arrays
_BLOCK_ELEMENTS = 1 << 16


def thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


class ToeplitzOperator:
    """Real symmetric Toeplitz matrix of order ``n`` built from a coefficient table."""

    def __init__(self, table, n):
        n = int(n)
        if n < 1:
            raise ValueError("n must be positive")
        if table.max_lag < n - 1:
            raise InsufficientLags(
                f"table covers lags 0..{table.max_lag}, need 0..{n - 1}"
            )
        self.n = n
        self.table = table
        self.column = np.array(table.coeffs[:n])
        self.column.setflags(write=False)
        circ = np.zeros(2 * n)
        circ[:n] = self.column
        circ[n + 1:] = self.column[1:][::-1]
        self.spectrum = np.fft.rfft(circ)
        self.spectrum.setflags(write=False)

    @property
    def shape(self):
        return (self.n, self.n)

    def dense(self):
        return scipy.linalg.toeplitz(self.column)

    def matmat(self, V):
        """Apply to the columns of ``V`` (shape ``(n, k)``)."""
        V = np.asarray(V, dtype=float)
        if V.shape[0] != self.n:
            raise DimensionMismatch(f"expected {self.n} rows, got {V.shape[0]}")
        spec = np.fft.rfft(V, n=2 * self.n, axis=0)
        spec *= self.spectrum[:, None]
        return np.fft.irfft(spec, n=2 * self.n, axis=0)[: self.n]

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise DimensionMismatch(f"expected a vector of length {self.n}, got {v.shape}")
        return self.matmat(v[:, None])[:, 0]

    def __matmul__(self, other):
        other = np.asarray(other)
        return self.matvec(other) if other.ndim == 1 else self.matmat(other)


def build_toeplitz(table, n):
    """Build ``T_n`` from ``table`` and check the FFT path against the first
    and last columns (both known exactly from the table)."""
    op = ToeplitzOperator(table, n)
    e = np.zeros((n, 2))
    e[0, 0] = 1.0
    e[-1, 1] = 1.0
    cols = op.matmat(e)
    scale = max(np.max(np.abs(op.column)), np.finfo(float).tiny)
    err = max(
        np.max(np.abs(cols[:, 0] - op.column)),
        np.max(np.abs(cols[:, 1] - op.column[::-1])),
    )
    if err > 1e-10 * scale * max(1.0, np.log2(n)):
        raise ArithmeticError(f"circulant embedding inconsistent (error {err:.3g})")
    return op


def toeplitz_matvec(op, v):
    return op.matvec(v)


@dataclass(frozen=True)
class TraceResult:
    value: float
    method: str
    probes: int
    stderr: float
    seed: int
    n: int
    p: int

    def __post_init__(self):
        if self.method not in ("exact", "hutchinson"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "exact" and (self.stderr != 0.0 or self.probes != 0):
            raise ValueError("exact traces carry no probes and no standard error")
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        from .io import dumps

        return dumps(self.to_dict())


def tables_for(pairs, n, quad=DEFAULT_QUAD, cache=None):
    """Coefficient tables for the 2p symbols of ``pairs`` covering lag ``n - 1``."""
    return [fourier_coefficients_batch(s, n - 1, quad, cache) for s in pairs.symbols()]


def _operators(pairs, n, tables):
    symbols = pairs.symbols()
    if len(tables) != len(symbols):
        raise DimensionMismatch(f"need {len(symbols)} coefficient tables, got {len(tables)}")
    for s, t in zip(symbols, tables):
        if t.spec != s:
            raise ValueError(f"table for {t.spec} supplied where {s} expected")
    return [build_toeplitz(t, n) for t in tables]


def _apply_chain(ops, V):
    for op in reversed(ops):
        V = op.matmat(V)
    return V


def _blocks(total, n):
    width = max(1, min(total, _BLOCK_ELEMENTS // (2 * n)))
    return [(lo, min(lo + width, total)) for lo in range(0, total, width)]


def _ordered_map(fn, items):
    threads = thread_count()
    if threads == 1 or len(items) == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def trace_product_exact(pairs, n, tables):
    """Exact ``Tr[prod_j T_n(g_j) T_n(h_j)]`` by pushing every basis vector
    through the chain of FFT matvecs and reading off the diagonal."""
    ops = _operators(pairs, n, tables)

    def diag_block(bounds):
        lo, hi = bounds
        E = np.zeros((n, hi - lo))
        E[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        out = _apply_chain(ops, E)
        return out[np.arange(lo, hi), np.arange(hi - lo)]

    diag = np.concatenate(_ordered_map(diag_block, _blocks(n, n)))
    return TraceResult(float(np.sum(diag)), "exact", 0, 0.0, 0, n, pairs.p)


def rademacher_probe(seed, index, n):
    """Probe ``index`` of stream ``seed``: a counter-based draw, independent of
    how many other probes are generated or in which order."""
    key = np.array([seed, index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.integers(0, 2, size=n).astype(float) * 2.0 - 1.0


def trace_product_stochastic(pairs, n, tables, probes, seed):
    """Hutchinson estimate with Rademacher probes; deterministic in (seed, probes)."""
    probes = int(probes)
    if probes < 2:
        raise ValueError("need at least two probes")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    ops = _operators(pairs, n, tables)

    def quad_forms(bounds):
        lo, hi = bounds
        Z = np.stack([rademacher_probe(seed, i, n) for i in range(lo, hi)], axis=1)
        return np.einsum("ij,ij->j", Z, _apply_chain(ops, Z))

    samples = np.concatenate(_ordered_map(quad_forms, _blocks(probes, n)))
    value = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / np.sqrt(probes))
    return TraceResult(value, "hutchinson", probes, stderr, int(seed), n, pairs.p)


def trace_result_from_json(text):
    return TraceResult(**json.loads(text))
