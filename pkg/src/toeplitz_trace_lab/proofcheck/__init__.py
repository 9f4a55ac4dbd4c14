"""Numerical checks of the kernel, domain and integral-representation facts
behind the trace asymptotics."""

from .dirichlet import (
    check_dirichlet_bound, check_l_convolution, check_l_envelope, dirichlet_direct,
    dirichlet_eval, l_bound, l_convolution, reproducing_identity_error,
)
from .domain import (
    BoundCheck, DomainPoint, check_lemma3_bound, check_sandwich, in_domain_W, k_product,
    sample_sequential_Wc, sample_uniform_Wc, sandwich_holds, w_membership,
)
from .integrals import (
    PartsEstimate, RepresentationCheck, estimate_In_parts, integrand_x, integrand_y,
    parts_full_exact, representation_check,
)
from .suites import SUITES, run_suites

__all__ = [
    "BoundCheck", "DomainPoint", "PartsEstimate", "RepresentationCheck", "SUITES",
    "check_dirichlet_bound", "check_l_convolution", "check_l_envelope", "check_lemma3_bound",
    "check_sandwich", "dirichlet_direct", "dirichlet_eval", "estimate_In_parts",
    "in_domain_W", "integrand_x", "integrand_y", "k_product", "l_bound", "l_convolution",
    "parts_full_exact", "representation_check", "reproducing_identity_error", "run_suites",
    "sample_sequential_Wc", "sample_uniform_Wc", "sandwich_holds", "w_membership",
]
