"""Traces of products of Toeplitz matrices whose symbols have power-law
singularities at the origin, their limits, and the rate at which the
normalised trace approaches the limit."""

from .exceptions import (
    DegenerateFit, DimensionMismatch, InsufficientLags, NonIntegrable, ParseError,
    RejectionStarved, SingularPoint, StochasticFloor, ToleranceNotMet, TraceLabError,
    UnsupportedScale, ValidationError,
)
from .fourier import (
    CoeffCache, CoeffTable, farima_coefficient_closed_form, fourier_coefficient,
    fourier_coefficient_oracle, fourier_coefficients_batch,
)
from .limits import ExponentSummary, exponents, limit_integral, limit_integral_oracle
from .quadrature import DEFAULT_QUAD, QuadConfig
from .rates import (
    EXACT, Method, RateExperiment, RateReport, check_rate_bound, dyadic_grid,
    fit_loglog_slope, measure_error, measure_error_equal_pairs, run_rate_experiment,
)
from .symbols import (
    Family, SymbolPairSet, SymbolSpec, check_class_membership, eval_symbol,
    eval_symbol_derivative,
)
from .toeplitz import (
    ToeplitzOperator, TraceResult, build_toeplitz, tables_for, toeplitz_matvec,
    trace_product_exact, trace_product_stochastic,
)

__version__ = "0.1.0"
