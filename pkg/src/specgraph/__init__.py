"""Spectral graph signal processing and graph convolutional networks."""

from .errors import SpecGraphError
from .graph import (
    Graph,
    NodePartition,
    bfs_distance,
    build_graph,
    connected_components,
    diameter,
    hop_distances,
    read_edge_list,
)
from .laplacian import (
    IncidenceMatrix,
    LaplacianKind,
    LaplacianMatrix,
    apply_laplacian,
    incidence,
    laplacian,
    quadratic_form,
)
from .spectral import (
    Domain,
    GraphSignal,
    SpectralBasis,
    eigendecompose,
    exact_filter,
    gft,
    igft,
    polynomial_shift_filter,
)
from .filters import (
    CayleyFilter,
    ChebyshevFilter,
    ExactFilter,
    FirstOrderGCN,
    apply_filter,
    cayley_apply,
    cayley_transform,
    chebyshev_apply,
    chebyshev_locality_matrix,
    estimate_lambda_max,
    gcn_propagate,
    renormalized_adjacency,
    spectral_cnn_layer,
)
from .lanczos import LanczosBasis, lanczos_filter, lanczos_iterate, theorem_bound_check, tridiag_eig

__version__ = "0.1.0"

__all__ = [
    "apply_filter",
    "apply_laplacian",
    "bfs_distance",
    "build_graph",
    "cayley_apply",
    "cayley_transform",
    "CayleyFilter",
    "chebyshev_apply",
    "chebyshev_locality_matrix",
    "ChebyshevFilter",
    "connected_components",
    "diameter",
    "Domain",
    "eigendecompose",
    "estimate_lambda_max",
    "exact_filter",
    "ExactFilter",
    "FirstOrderGCN",
    "gcn_propagate",
    "gft",
    "Graph",
    "GraphSignal",
    "hop_distances",
    "igft",
    "incidence",
    "IncidenceMatrix",
    "lanczos_filter",
    "lanczos_iterate",
    "LanczosBasis",
    "laplacian",
    "LaplacianKind",
    "LaplacianMatrix",
    "NodePartition",
    "polynomial_shift_filter",
    "quadratic_form",
    "read_edge_list",
    "renormalized_adjacency",
    "SpecGraphError",
    "spectral_cnn_layer",
    "SpectralBasis",
    "theorem_bound_check",
    "tridiag_eig",
]
