"""Multivariate reciprocal inverse Gaussian distributions on matrix cones.

The family lives on the open convex set where M_x = 2 diag(x) - W is
positive definite.  This package provides the exact density, normalizer,
Laplace transform, sequential sampler, marginalization, conditioning and
convolution calculus, closed-form tree integrals in terms of MacDonald
functions, Gaussian orthant probabilities, and an independent
quadrature / Monte Carlo harness that verifies every closed form.
"""

from .backend import BACKEND, HAVE_COMPILED
from .gstz import (
    ConditionalResult,
    GstzParams,
    condition,
    convolve_ig,
    laplace,
    log_density,
    marginalize,
    moments,
    normalizer,
    permute_params,
    sample,
)
from .integrals import (
    Estimate,
    chunked_mc,
    gstz_rhs,
    hhh_rhs,
    mc_gstz_lhs,
    mc_stz_lhs,
    orthant_laplace_check,
    orthant_mc,
    orthant_via_convolution,
    quad_gstz_lhs,
    quad_stz_lhs,
    quad_tree_integral,
    stz_rhs,
    tree_integral_closed,
    tree_integral_closed_y,
)
from .linalg import (
    ConePoint,
    ModelError,
    NotInConeError,
    WeightMatrix,
    build_weight_matrix,
    complete_weights,
    cone_membership,
    daisy_weights,
    det_complete,
    det_daisy,
    m_matrix,
    schur_split,
    weight_matrix_from_dense,
)
from .univariate import (
    GigParams,
    bessel_k,
    gig_log_density,
    ig_cdf,
    ig_laplace,
    log_bessel_k,
    rig_cdf,
    rig_laplace,
    rig_moments,
    sample_gamma_half,
    sample_ig,
    sample_rig,
)

__version__ = "0.1.0"
