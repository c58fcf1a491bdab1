"""Operator-valued Schatten norms, conditional Rényi entropies and matrix spectral factorization."""

__version__ = "0.1.0"

from .entropies import (CoherentInfo, alpha_prime, coherent_info_alpha, cond_renyi_entropy,
                        cond_vn_entropy, continuity_bound, sandwiched_divergence,
                        von_neumann_entropy, w_alpha)
from .linalg import (BipartiteOp, Channel, DimensionError, LinAlgFailure, SingularityError,
                     apply_channel, derive_seed, haar_unitary, partial_trace, permute_subsystems,
                     random_channel, random_density, random_pure_state, trace_distance)
from .schatten import INF, as_order, conjugate, holder_check, schatten_interp_check, schatten_norm
from .specfact import (AnalyticMatPoly, TrigMatPoly, conformal_inverse, conformal_map,
                       outerness_certificate, spectral_factorize, strip_factorize)
from .vvnorms import (PQQuery, PQResult, norm_1alpha, pq_norm_hermitian_upper,
                      pq_norm_inf_positive, pq_norm_sup_positive)

__all__ = [
    "__version__",
    "INF", "as_order", "conjugate", "schatten_norm", "holder_check", "schatten_interp_check",
    "BipartiteOp", "Channel", "DimensionError", "LinAlgFailure", "SingularityError",
    "apply_channel", "derive_seed", "haar_unitary", "partial_trace", "permute_subsystems",
    "random_channel", "random_density", "random_pure_state", "trace_distance",
    "PQQuery", "PQResult", "norm_1alpha", "pq_norm_inf_positive", "pq_norm_sup_positive",
    "pq_norm_hermitian_upper",
    "alpha_prime", "von_neumann_entropy", "sandwiched_divergence", "cond_vn_entropy",
    "cond_renyi_entropy", "w_alpha", "coherent_info_alpha", "CoherentInfo", "continuity_bound",
    "TrigMatPoly", "AnalyticMatPoly", "spectral_factorize", "outerness_certificate",
    "conformal_map", "conformal_inverse", "strip_factorize",
]
