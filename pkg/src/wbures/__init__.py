"""Weighted distances between many-qubit states and the resource-cost bound they imply."""

from .distances import (
    BuresValue,
    bures_length,
    fisher_speed,
    hamiltonian_variance,
    seminorm,
    uhlmann_fidelity,
)
from .resource import (
    BoundReport,
    Circuit,
    GateSpec,
    audit_bound,
    intermediate_tau,
    resource_cost,
    simulate_circuit,
)
from .states import (
    DensityMatrix,
    StateSpec,
    basis,
    build_state,
    classical,
    dicke,
    ghz,
    mixed,
    product,
    raw,
    validate,
)
from .weighted import (
    Partition,
    WeightedResult,
    enumerate_partitions,
    sandwich_bounds,
    subset_distance_cache,
    weighted_distance,
    weighted_distance_bruteforce,
    weighted_sum,
)

__version__ = "0.1.0"
