"""Exact simulation of a Grover search for causal (acyclic) edge orientations
of multiloop Feynman topologies, with a brute-force classical cross-check."""

from .grover import (
    CircuitProgram,
    GroverPlan,
    PlanError,
    RegisterLayout,
    SeparationError,
    VerifyReport,
    extract_causal,
    plan,
    program_to_text,
    run,
    synthesize,
    verify,
)
from .statevector import (
    GateOp,
    Histogram,
    QuantumState,
    SimulatorError,
    apply_gate,
    init_state,
    probabilities,
    sample,
)
from .topology import (
    CausalSet,
    ClauseSet,
    Cycle,
    MultiloopTopology,
    TopologyError,
    build_clauses,
    clauses_for_cycles,
    enumerate_causal,
    enumerate_cycles,
    is_causal,
    load_topology,
    mirror,
)

__version__ = "0.1.0"
