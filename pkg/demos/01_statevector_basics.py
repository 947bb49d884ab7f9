"""Statevector basics: building states, applying gates, measuring, entropy.

Run with ``python demos/01_statevector_basics.py``.
"""
import numpy as np

from ghzlocc.gates import cnot, hadamard
from ghzlocc.qstate import (
    Bipartition,
    apply_gate,
    basis_state,
    entanglement_entropy,
    measure_computational,
)

# Wire 0 is the most significant bit: |q0 q1 q2>.
state = basis_state("000")
state = apply_gate(state, hadamard(), [0])
state = apply_gate(state, cnot(), [0, 1])
state = apply_gate(state, cnot(), [0, 2])
print("H then two CNOTs on |000>:", np.round(state.amplitudes, 3))

# Each single-party cut of the GHZ state carries one ebit.
for w in range(3):
    cut = Bipartition.from_side([w], 3)
    print(f"entropy across wire {w} | rest: {entanglement_entropy(state, cut):.6f}")

# Measuring removes the wire from the register.
outcome, prob, post = measure_computational(state, 0, forced_outcome=1)
print(f"forced outcome {outcome} with probability {prob}: remaining", np.round(post.amplitudes, 3))

rng = np.random.default_rng(1)
samples = [measure_computational(state, 0, rng=rng)[0] for _ in range(1000)]
print("fraction of 1s over 1000 sampled measurements:", np.mean(samples))
