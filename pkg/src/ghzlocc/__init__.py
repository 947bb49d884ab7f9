"""Simulate and verify the three-party GHZ-assisted implementation of two
consecutive controlled-block gates under local operations and classical
communication."""
from .analysis import lower_bound_demo, resource_comparison
from .gates import (
    DiagonalBlockOp,
    cnot,
    compose_w,
    embed_diagonal_block,
    hadamard,
    haar_random_blocks,
    pauli_x,
    pauli_z,
)
from .locc import LoccWorld, Party, run_interleaved
from .protocols import decompose_on_control, ghz_protocol, two_bell_baseline, verify_report
from .qstate import (
    Bipartition,
    StateVector,
    Unitary,
    apply_gate,
    entanglement_entropy,
    make_state,
    measure_computational,
    state_distance,
)

__version__ = "0.1.0"
