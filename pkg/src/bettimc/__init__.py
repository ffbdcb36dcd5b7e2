"""Monte Carlo estimation of normalized Betti numbers of simplicial complexes."""

from bettimc.complex import (
    CliqueComplex,
    Complex,
    ExplicitComplex,
    Graph,
    SimplexIndex,
    contains,
    enumerate_k_simplices,
    generate_complete_partite,
    generate_disjoint_cliques,
    simplex_graph_neighbors,
    up_degree,
)
from bettimc.errors import (
    BettiError,
    InputError,
    NumericError,
    ResourceError,
    SampleBudgetExceeded,
)
from bettimc.estimators import (
    EstimateConfig,
    EstimateResult,
    cbne,
    cbne_var,
    norm_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BettiError",
    "CliqueComplex",
    "Complex",
    "EstimateConfig",
    "EstimateResult",
    "ExplicitComplex",
    "Graph",
    "InputError",
    "NumericError",
    "ResourceError",
    "SampleBudgetExceeded",
    "SimplexIndex",
    "cbne",
    "cbne_var",
    "contains",
    "enumerate_k_simplices",
    "generate_complete_partite",
    "generate_disjoint_cliques",
    "norm_bound",
    "simplex_graph_neighbors",
    "up_degree",
]
