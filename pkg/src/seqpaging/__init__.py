"""Sequential paging cost analysis under general cell residence times.

The package computes, in closed form, the expected cost of paging a mobile
user cell by cell in decreasing order of location probability, when the
location estimate is conditioned on the last interaction cell and the user
moves as a random walk with Gamma-distributed dwell times.  A seeded
discrete-event simulator provides an independent Monte Carlo check of every
analytic quantity.
"""

from .topology import (
    CellGraph,
    build_hex_patch,
    from_edges,
    load_graph,
    parse_edge_list,
    format_edge_list,
    save_graph,
)
from .mobility import (
    ConvergenceError,
    StationaryDistribution,
    TransitionMatrix,
    propagate,
    stationary_distribution,
    symmetric_random_walk,
)
from .residence import CrossingPmf, ResidenceModel, crossing_pmf
from .paging import (
    CostReport,
    LocationProfile,
    location_profile,
    query_order,
    sequential_cost,
    sweep,
    total_cost,
)
from .simulator import (
    IntervalSample,
    SimConfig,
    SimulationFault,
    estimate_cost,
    estimate_crossing_pmf,
    estimate_profile,
    sample_equilibrium_residual,
    simulate_interval,
)

__version__ = "0.1.0"

__all__ = [
    "CellGraph",
    "ConvergenceError",
    "CostReport",
    "CrossingPmf",
    "IntervalSample",
    "LocationProfile",
    "ResidenceModel",
    "SimConfig",
    "SimulationFault",
    "StationaryDistribution",
    "TransitionMatrix",
    "build_hex_patch",
    "crossing_pmf",
    "estimate_cost",
    "estimate_crossing_pmf",
    "estimate_profile",
    "format_edge_list",
    "from_edges",
    "load_graph",
    "location_profile",
    "parse_edge_list",
    "propagate",
    "query_order",
    "sample_equilibrium_residual",
    "save_graph",
    "sequential_cost",
    "simulate_interval",
    "stationary_distribution",
    "sweep",
    "symmetric_random_walk",
    "total_cost",
    "__version__",
]
