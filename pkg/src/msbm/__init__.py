"""Multi-graph stochastic block model estimation.

Spectral clustering on the mean graph, exact and local-search profile
maximum likelihood, variational EM with penalized model selection,
majority-vote baselines, and exact numerical evaluation of the
consistency bounds that govern them.
"""

import os as _os

# Pin BLAS/OMP thread pools to one thread before numpy loads so that all
# results (and serialized outputs) are bit-identical regardless of the host's
# thread configuration.  Set MSBM_THREADS=native to opt out.
if _os.environ.get("MSBM_THREADS") != "native":
    for _var in (
        "OPENBLAS_NUM_THREADS",
        "OMP_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
    ):
        _os.environ[_var] = "1"
del _os

from .core import (  # noqa: E402
    BlockStats,
    ClassLabels,
    FitResult,
    MultiGraph,
    ProbArray,
    accuracy,
    align_labels,
    block_stats,
    majority_mismatch_r,
)
from .generator import (  # noqa: E402
    PProcessSpec,
    balanced_labels,
    planted_partition,
    sample_labels,
    sample_multigraph,
    sample_p_array,
)
from .likelihood import (  # noqa: E402
    SearchOptions,
    complete_loglik,
    exact_profile_mle,
    local_search_profile_mle,
    profile_loglik,
    sigma,
)
from .spectral import SpectralOptions, mean_graph, offdiag_svd, spectral_cluster  # noqa: E402
from .variational import (  # noqa: E402
    VariationalState,
    VemOptions,
    elbo,
    icl,
    select_k,
    vem_fit,
)
from .theory_bounds import (  # noqa: E402
    TheoryReport,
    bound_constants,
    c0_of,
    delta_of,
    exact_sigma_gap,
    expected_profile_terms,
    lemma3_bound,
    min_nodes_k2,
    theory_report,
)
from .baselines import majority_vote, per_layer_fit  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "BlockStats",
    "ClassLabels",
    "FitResult",
    "MultiGraph",
    "PProcessSpec",
    "ProbArray",
    "SearchOptions",
    "SpectralOptions",
    "TheoryReport",
    "VariationalState",
    "VemOptions",
    "accuracy",
    "align_labels",
    "balanced_labels",
    "block_stats",
    "bound_constants",
    "c0_of",
    "complete_loglik",
    "delta_of",
    "elbo",
    "exact_profile_mle",
    "exact_sigma_gap",
    "expected_profile_terms",
    "icl",
    "lemma3_bound",
    "local_search_profile_mle",
    "majority_mismatch_r",
    "majority_vote",
    "mean_graph",
    "min_nodes_k2",
    "offdiag_svd",
    "per_layer_fit",
    "planted_partition",
    "profile_loglik",
    "sample_labels",
    "sample_multigraph",
    "sample_p_array",
    "select_k",
    "sigma",
    "spectral_cluster",
    "theory_report",
    "vem_fit",
]
