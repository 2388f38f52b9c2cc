"""Exact solvers for cleaning biased graphs.

A biased graph is a simple graph together with a linear class of "balanced"
simple cycles, answered through a membership oracle.  The cleaning problem
deletes at most k vertices so that no unbalanced cycle survives; the rooted
variant only protects the component of a root vertex.  This package provides
the covering LP over balloon constraints, its shortest-path separation oracle,
half-integral rounding, the branching solvers built on top, brute-force
reference implementations, and a small instance file format with a CLI.
"""

from .graph import (
    CycleLimitExceeded,
    Graph,
    GraphError,
    SimpleCycle,
    VertexPath,
    close_cycle,
    components,
    connected_component,
    enumerate_simple_cycles,
)
from .bias import (
    BiasOracle,
    ColorBias,
    CyclicGroup,
    EmptyBias,
    GroupBias,
    LinearityError,
    MatrixGroup,
    PartitionBias,
    TableGroup,
    TabulatedBias,
    ThetaWitness,
    build_apex_instance,
    build_multiway_instance,
    is_balanced_cycle,
    is_balanced_subgraph,
    load_group_table,
    validate_linearity,
)
from .locallp import (
    Balloon,
    BalloonConstraint,
    FractionalAssignment,
    HalfIntegralCertificate,
    InternalConsistencyError,
    LocalLpEngine,
    PerturbedLength,
    maximize_reachable_region,
    round_half_integral,
    separate,
    shortest_path_tree,
    solve_local_lp,
)
from .solvers import (
    FixState,
    GlobalSolution,
    LocalSolution,
    SolveStats,
    approximate_local,
    certify,
    solve_global,
    solve_local,
)
from .brute import BruteResult, brute_global, brute_local, brute_min_balloon
from .instance import (
    Instance,
    InstanceFormatError,
    parse_instance,
    random_instance,
    render_instance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
