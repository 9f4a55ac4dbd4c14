"""Parametric even symbols with a power-law singularity at the origin.

Every family is closed form so that both the value and the derivative are
analytic away from ``x = 0``::

    PurePower          scale * |x|**(-alpha)
    Farima             scale * (2 sin(|x|/2))**(-alpha)        alpha = 2d
    PowerTimesSmooth   scale * |x|**(-alpha) * (1 + sum_k c_k cos(k x))
    Constant           scale

Inputs are reduced into [-pi, pi] before evaluation, which realises the
2*pi-periodic extension of each symbol.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SingularPoint, ValidationError

TWO_PI = 2.0 * math.pi


class Family(str, enum.Enum):
    PURE_POWER = "PurePower"
    FARIMA = "Farima"
    POWER_TIMES_SMOOTH = "PowerTimesSmooth"
    CONSTANT = "Constant"


@dataclass(frozen=True)
class SymbolSpec:
    """A symbol ``f`` in the class of functions bounded by ``C |x|**(-alpha)``.

    Instances are immutable and hashable, so they can key coefficient caches.
    """

    family: Family
    alpha: float = 0.0
    smooth_coeffs: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        try:
            family = Family(self.family)
        except ValueError:
            raise ValidationError(f"unknown symbol family {self.family!r}") from None
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(
            self, "smooth_coeffs", tuple(float(c) for c in self.smooth_coeffs)
        )
        if not math.isfinite(self.alpha) or not self.alpha < 1.0:
            raise ValidationError(f"alpha < 1 required, got alpha={self.alpha}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValidationError(f"scale must be positive, got {self.scale}")
        if family is Family.CONSTANT and self.alpha != 0.0:
            raise ValidationError("Constant symbols have alpha = 0")
        if self.smooth_coeffs and family is not Family.POWER_TIMES_SMOOTH:
            raise ValidationError("smooth_coeffs only apply to PowerTimesSmooth")
        if family is Family.POWER_TIMES_SMOOTH:
            grid = np.linspace(-math.pi, math.pi, 8193)
            if np.min(_smooth_factor(self.smooth_coeffs, grid)) <= 0.0:
                raise ValidationError(
                    "smooth factor 1 + sum c_k cos(kx) must be positive on [-pi, pi]"
                )

    @classmethod
    def pure_power(cls, alpha, scale=1.0):
        return cls(Family.PURE_POWER, alpha, (), scale)

    @classmethod
    def farima(cls, d, scale=1.0):
        """Symbol ``(2 sin(|x|/2))**(-2d)``, i.e. 2*pi times a FARIMA(0,d,0) density."""
        return cls(Family.FARIMA, 2.0 * d, (), scale)

    @classmethod
    def power_times_smooth(cls, alpha, smooth_coeffs, scale=1.0):
        return cls(Family.POWER_TIMES_SMOOTH, alpha, tuple(smooth_coeffs), scale)

    @classmethod
    def constant(cls, scale=1.0):
        return cls(Family.CONSTANT, 0.0, (), scale)

    @property
    def d(self):
        return self.alpha / 2.0

    def to_dict(self):
        out = {"family": self.family.value, "scale": self.scale}
        if self.family is Family.FARIMA:
            out["d"] = self.d
        else:
            out["alpha"] = self.alpha
        if self.family is Family.POWER_TIMES_SMOOTH:
            out["smooth_coeffs"] = list(self.smooth_coeffs)
        return out

    @classmethod
    def from_dict(cls, record):
        record = dict(record)
        unknown = set(record) - {"family", "alpha", "d", "smooth_coeffs", "scale"}
        if unknown:
            raise ValidationError(f"unknown symbol keys: {sorted(unknown)}")
        if "family" not in record:
            raise ValidationError("symbol record needs a 'family'")
        if "alpha" in record and "d" in record:
            raise ValidationError("give either alpha or d, not both")
        if "d" in record:
            if record["family"] != Family.FARIMA.value:
                raise ValidationError("'d' is only meaningful for Farima symbols")
            alpha = 2.0 * float(record["d"])
        else:
            alpha = float(record.get("alpha", 0.0))
        return cls(
            record["family"],
            alpha,
            tuple(record.get("smooth_coeffs", ())),
            float(record.get("scale", 1.0)),
        )


def _smooth_factor(coeffs, x):
    out = np.ones_like(x, dtype=float)
    for k, c in enumerate(coeffs, start=1):
        out = out + c * np.cos(k * x)
    return out


def _smooth_factor_derivative(coeffs, x):
    out = np.zeros_like(x, dtype=float)
    for k, c in enumerate(coeffs, start=1):
        out = out - k * c * np.sin(k * x)
    return out


def reduce_angle(x):
    """Map ``x`` into [-pi, pi] by subtracting the nearest multiple of 2*pi."""
    x = np.asarray(x, dtype=float)
    return x - TWO_PI * np.rint(x / TWO_PI)


def eval_symbol(spec, x, allow_infinite=False):
    """Evaluate ``spec`` at ``x`` (scalar or array, radians).

    At ``x = 0 (mod 2 pi)`` a symbol with ``alpha > 0`` is unbounded; this
    raises :class:`SingularPoint` unless ``allow_infinite`` is set, in which
    case ``inf`` is returned there.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    ax = np.abs(reduce_angle(x))
    at_zero = ax == 0.0
    if spec.alpha > 0.0 and np.any(at_zero) and not allow_infinite:
        raise SingularPoint(f"{spec.family.value} with alpha={spec.alpha} at x = 0")

    fam = spec.family
    with np.errstate(divide="ignore"):
        if fam is Family.CONSTANT:
            val = np.full_like(ax, spec.scale)
        elif fam is Family.PURE_POWER:
            val = spec.scale * ax ** (-spec.alpha)
        elif fam is Family.FARIMA:
            val = spec.scale * (2.0 * np.sin(0.5 * ax)) ** (-spec.alpha)
        else:
            val = (
                spec.scale
                * ax ** (-spec.alpha)
                * _smooth_factor(spec.smooth_coeffs, ax)
            )
    if val.ndim == 0:
        return float(val)
    return val


def regular_part(spec, x):
    """``|x|**alpha * f(x)`` on [-pi, pi], continuous through ``x = 0``."""
    x = reduce_angle(x)
    fam = spec.family
    if fam is Family.FARIMA:
        # 2 sin(x/2) / x == np.sinc(x / (2 pi))
        val = spec.scale * np.sinc(x / TWO_PI) ** (-spec.alpha)
    elif fam is Family.POWER_TIMES_SMOOTH:
        val = spec.scale * _smooth_factor(spec.smooth_coeffs, x)
    else:
        val = np.full_like(x, spec.scale)
    return val


def eval_symbol_derivative(spec, x):
    """Analytic derivative ``df/dx``; raises :class:`SingularPoint` at ``x = 0``."""
    x = reduce_angle(x)
    if np.any(x == 0.0):
        raise SingularPoint("derivative is undefined at x = 0")
    ax = np.abs(x)
    sgn = np.sign(x)
    a = spec.alpha
    fam = spec.family
    if fam is Family.CONSTANT:
        val = np.zeros_like(ax)
    elif fam is Family.PURE_POWER:
        val = -a * spec.scale * ax ** (-a - 1.0) * sgn
    elif fam is Family.FARIMA:
        val = (
            -a * spec.scale * (2.0 * np.sin(0.5 * ax)) ** (-a - 1.0)
            * np.cos(0.5 * ax) * sgn
        )
    else:
        s = _smooth_factor(spec.smooth_coeffs, ax)
        ds = _smooth_factor_derivative(spec.smooth_coeffs, ax)
        val = spec.scale * (-a * ax ** (-a - 1.0) * s + ax ** (-a) * ds) * sgn
    if val.ndim == 0:
        return float(val)
    return val


@dataclass(frozen=True)
class ClassReport:
    sup0: float
    sup1: float


def check_class_membership(spec, grid):
    """Grid suprema of ``|x|^a |f(x)|`` and ``|x|^(a+1) |f'(x)|``.

    Both stay bounded as the grid approaches 0 exactly when ``spec`` lies in
    the differentiable power-law class with exponent ``spec.alpha``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if np.any(reduce_angle(grid) == 0.0):
        raise ValueError("grid must exclude 0")
    ax = np.abs(reduce_angle(grid))
    sup0 = np.max(ax**spec.alpha * np.abs(eval_symbol(spec, grid)))
    sup1 = np.max(ax ** (spec.alpha + 1.0) * np.abs(eval_symbol_derivative(spec, grid)))
    return ClassReport(float(sup0), float(sup1))


@dataclass(frozen=True)
class SymbolPairSet:
    """``p`` ordered pairs ``(g_j, h_j)``.

    The exponent vector is ``theta = (alpha_1..alpha_p, beta_1..beta_p)``;
    construction fails unless ``sum_j (alpha_j + beta_j)_+ < 1``.
    """

    pairs: tuple = field()

    def __post_init__(self):
        pairs = tuple((g, h) for g, h in self.pairs)
        if not pairs:
            raise ValidationError("need at least one (g, h) pair")
        for g, h in pairs:
            if not (isinstance(g, SymbolSpec) and isinstance(h, SymbolSpec)):
                raise ValidationError("pairs must hold SymbolSpec instances")
        object.__setattr__(self, "pairs", pairs)
        psi_bar = sum(max(g.alpha + h.alpha, 0.0) for g, h in pairs)
        if not psi_bar < 1.0:
            raise ValidationError(
                f"theta outside Theta_1^{{2p}}: sum of (alpha_j + beta_j)_+ = "
                f"{psi_bar:.6g} must be < 1"
            )

    @classmethod
    def single(cls, g, h):
        return cls(((g, h),))

    @classmethod
    def repeated(cls, g, h, p):
        """The equal-pairs case ``(T_n(g) T_n(h))**p``."""
        return cls(((g, h),) * p)

    @property
    def p(self):
        return len(self.pairs)

    @property
    def theta(self):
        return tuple(g.alpha for g, _ in self.pairs) + tuple(
            h.alpha for _, h in self.pairs
        )

    def symbols(self):
        """The 2p symbols in product order g_1, h_1, ..., g_p, h_p."""
        return [s for pair in self.pairs for s in pair]

    def rotate(self, k=1):
        k %= self.p
        return SymbolPairSet(self.pairs[k:] + self.pairs[:k])

    def to_list(self):
        return [{"g": g.to_dict(), "h": h.to_dict()} for g, h in self.pairs]

    @classmethod
    def from_list(cls, records):
        return cls(
            tuple(
                (SymbolSpec.from_dict(r["g"]), SymbolSpec.from_dict(r["h"]))
                for r in records
            )
        )
