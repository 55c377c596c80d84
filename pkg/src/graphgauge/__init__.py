"""Discrete gauge theory on graphs: clique-complex forms, connection Laplacians, Yang-Mills."""

from .calculus import Form, betti_numbers, forman_ricci, hodge_laplacian_matrix, weitzenboeck_split
from .errors import (
    CliqueLookupError,
    ContractViolation,
    DistanceError,
    GraphGaugeError,
    OrientationError,
    UnsupportedPotential,
    ValidationError,
)
from .gauge import Connection, EndForm, GaugeTransformation, curvature, generalized_weitzenboeck
from .graph import CliqueComplex, Graph, build_complex, spanning_forest, tree_distance
from .groups import Group
from .yangmills import (
    OptimizerOptions,
    YMProblem,
    YMReport,
    known_families,
    max_connection,
    spanning_tree_gauge_fix,
    u1_grid_oracle,
    ym_optimize,
    ym_residual,
    ym_value,
)

__version__ = "0.1.0"
