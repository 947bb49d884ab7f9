"""The GHZ protocol, branch by branch.

Alice, Bob and Charlie apply two controlled-block gates that share Alice's
control qubit. Only one GHZ state and three classical bits are used. Every
measurement branch is forced in turn and compared with the target unitary.
"""
import numpy as np

from ghzlocc.gates import DiagonalBlockOp, haar_random_blocks, pauli_x
from ghzlocc.locc import transcript_to_jsonl
from ghzlocc.protocols import ghz_protocol, verify_report
from ghzlocc.qstate import make_state, random_state

# Two CNOTs with a common control turn |+>|0>|0> into a GHZ state.
cnot_op = DiagonalBlockOp.controlled(pauli_x())
plus00 = make_state(np.array([1, 0, 0, 0, 1, 0, 0, 0]) / np.sqrt(2))
report = ghz_protocol(cnot_op, cnot_op, plus00)
print("two CNOTs on |+00>, final amplitudes per branch:")
for br in report.branches:
    print(f"  {br.outcomes}  p={br.probability:.3f}  ", np.round(br.final_state.amplitudes.real, 3))
print("resources:", report.tally.as_dict())

# Unknown blocks: Bob holds a 2-qubit register, Charlie a 3-qubit one.
rng = np.random.default_rng(2024)
u, v = haar_random_blocks(2, rng), haar_random_blocks(3, rng)
initial = random_state(1 + 2 + 3, rng)
report = ghz_protocol(u, v, initial)
verdict = verify_report(report)
print(f"\nrandom 2- and 3-qubit blocks: passed={verdict.passed}, "
      f"max distance to target {report.max_exact_distance:.2e}")

# The transcript is what each party did, in order.
first = report.branches[-1]
print(f"\ntranscript for branch {first.key}:")
print(transcript_to_jsonl(report.transcripts[first.key]))

# Dropping Alice's final Z leaves a sign error on branches with b != c.
broken = ghz_protocol(u, v, initial, skip={"alice_z"})
for br in broken.branches:
    print(f"  without Z: {br.outcomes}  distance {br.exact_distance:.2e}")
