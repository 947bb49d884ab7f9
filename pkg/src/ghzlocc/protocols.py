"""Distributed implementation of two consecutive controlled-block operations.

Alice holds the shared control qubit ``A``; Bob holds a register the first
operation ``u`` acts on and Charlie the register of the second operation
``v``. Two schemes are provided:

* :func:`ghz_protocol` consumes one shared GHZ state and three cbits.
* :func:`two_bell_baseline` runs the bipartite Bell-pair scheme twice,
  once with Bob and once with Charlie.

Both are checked against ``compose_w(u, v) @ initial``. Every measurement
branch must reproduce that state exactly, global phase included.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Collection, Sequence

import numpy as np

from .gates import DiagonalBlockOp, compose_w, cnot, embed_diagonal_block, hadamard, pauli_x, pauli_z
from .locc import (
    LoccWorld,
    Party,
    ResourceTally,
    Step,
    gate_step,
    measure_step,
    receive_step,
    random_schedule,
    run_interleaved,
    send_step,
    serial_schedule,
)
from .qstate import ALGEBRA_TOL, VERIFY_TOL, StateVector, apply_gate, state_distance

ALICE, BOB, CHARLIE = Party.ALICE, Party.BOB, Party.CHARLIE

# Corrections that can be switched off to show they matter.
CORRECTIONS = ("bob_x", "charlie_x", "alice_z")

__all__ = [
    "OutcomeBranch",
    "ProtocolReport",
    "Verdict",
    "CORRECTIONS",
    "data_wires",
    "ghz_programs",
    "two_bell_programs",
    "run_branch",
    "ghz_protocol",
    "two_bell_baseline",
    "decompose_on_control",
    "verify_report",
    "sweep_schedules",
    "schedule_deviation",
]


@dataclass(frozen=True)
class OutcomeBranch:
    """One measurement record and the state it left on (A, B..., C...)."""

    outcomes: dict
    probability: float
    final_state: StateVector
    exact_distance: float
    fidelity: float

    @property
    def a(self):
        return self.outcomes.get("a")

    @property
    def b(self):
        return self.outcomes.get("b")

    @property
    def c(self):
        return self.outcomes.get("c")

    @property
    def key(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.outcomes.items())


@dataclass
class ProtocolReport:
    scheme: str
    mode: str
    branches: list
    oracle_state: StateVector
    tally: ResourceTally
    transcripts: dict = field(default_factory=dict)

    @property
    def max_exact_distance(self) -> float:
        return max((b.exact_distance for b in self.branches), default=float("inf"))

    @property
    def min_fidelity(self) -> float:
        return min((b.fidelity for b in self.branches), default=0.0)

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches))


@dataclass(frozen=True)
class Verdict:
    passed: bool
    worst_branch: OutcomeBranch | None
    reason: str = ""

    def __bool__(self):
        return self.passed


def data_wires(n_b: int, n_c: int) -> tuple[str, list[str], list[str]]:
    """Labels of Alice's control, Bob's register and Charlie's register."""
    return "A", [f"B[{k}]" for k in range(n_b)], [f"C[{k}]" for k in range(n_c)]


def _block_segment(party: Party, ancilla: str, register: list[str], op: DiagonalBlockOp,
                   in_tag: str, out_tag: str, forced_bit: int | None, correct: bool,
                   prefix: tuple[str, str, str]) -> list[Step]:
    """Partner side of one controlled-block round.

    Wait for Alice's bit, flip the ancilla if it was 1, apply the block
    operation controlled by the ancilla, then measure the ancilla in the
    X basis and report the result to Alice.
    """
    flip = (lambda mem: mem[in_tag] == 1) if correct else (lambda mem: False)
    return [
        receive_step(party, f"{prefix[0]}: receive {in_tag}", in_tag),
        gate_step(party, f"{prefix[0]}: conditional X", pauli_x(), [ancilla], when=flip, name="X"),
        gate_step(party, f"{prefix[1]}: block operation", embed_diagonal_block(op), [ancilla, *register],
                  name="U" if party is BOB else "V"),
        gate_step(party, f"{prefix[2]}: H", hadamard(), [ancilla], name="H"),
        measure_step(party, f"{prefix[2]}: measure {ancilla}", ancilla, out_tag, forced_bit),
        send_step(party, f"{prefix[2]}: send {out_tag}", out_tag, [ALICE]),
    ]


_BOB_STEPS = ("step 2", "step 3", "step 4")
_CHARLIE_STEPS = ("step 2'", "step 3'", "step 4'")


def ghz_programs(u: DiagonalBlockOp, v: DiagonalBlockOp, forced: dict | None = None,
                 skip: Collection[str] = ()) -> dict[Party, list[Step]]:
    """Party step lists of the GHZ scheme.

    ``forced`` maps the outcome names ``a``, ``b``, ``c`` to bits to force;
    ``skip`` disables any of :data:`CORRECTIONS`.
    """
    forced = forced or {}
    _, bw, cw = data_wires(u.block_qubits, v.block_qubits)
    phase = (lambda mem: mem["b"] ^ mem["c"] == 1) if "alice_z" not in skip else (lambda mem: False)
    alice = [
        gate_step(ALICE, "step 1: CNOT(A, A1)", cnot(), ["A", "A1"], name="CNOT"),
        measure_step(ALICE, "step 1: measure A1", "A1", "a", forced.get("a")),
        send_step(ALICE, "step 1: broadcast a", "a", [BOB, CHARLIE]),
        receive_step(ALICE, "step 5: receive b", "b"),
        receive_step(ALICE, "step 5: receive c", "c"),
        gate_step(ALICE, "step 5: conditional Z", pauli_z(), ["A"], when=phase, name="Z"),
    ]
    bob = _block_segment(BOB, "B1", bw, u, "a", "b", forced.get("b"), "bob_x" not in skip, _BOB_STEPS)
    charlie = _block_segment(CHARLIE, "C1", cw, v, "a", "c", forced.get("c"),
                             "charlie_x" not in skip, _CHARLIE_STEPS)
    return {ALICE: alice, BOB: bob, CHARLIE: charlie}


def two_bell_programs(u: DiagonalBlockOp, v: DiagonalBlockOp, forced: dict | None = None,
                      skip: Collection[str] = ()) -> dict[Party, list[Step]]:
    """Party step lists of the two-Bell-pair scheme.

    Round one with Bob uses pair (A1, B1) and outcomes ``a1``, ``b``; round
    two with Charlie uses pair (A2, C1) and outcomes ``a2``, ``c``. Alice
    corrects with Z after each round.
    """
    forced = forced or {}
    _, bw, cw = data_wires(u.block_qubits, v.block_qubits)
    z_on = "alice_z" not in skip

    def alice_round(anc, atag, partner, ptag, rnd):
        phase = (lambda mem: mem[ptag] == 1) if z_on else (lambda mem: False)
        return [
            gate_step(ALICE, f"round {rnd}: CNOT(A, {anc})", cnot(), ["A", anc], name="CNOT"),
            measure_step(ALICE, f"round {rnd}: measure {anc}", anc, atag, forced.get(atag)),
            send_step(ALICE, f"round {rnd}: send {atag}", atag, [partner]),
            receive_step(ALICE, f"round {rnd}: receive {ptag}", ptag),
            gate_step(ALICE, f"round {rnd}: conditional Z", pauli_z(), ["A"], when=phase, name="Z"),
        ]

    rounds = [f"round {r}" for r in (1, 2)]
    bob = _block_segment(BOB, "B1", bw, u, "a1", "b", forced.get("b"), "bob_x" not in skip,
                         (rounds[0],) * 3)
    charlie = _block_segment(CHARLIE, "C1", cw, v, "a2", "c", forced.get("c"),
                             "charlie_x" not in skip, (rounds[1],) * 3)
    alice = alice_round("A1", "a1", BOB, "b", 1) + alice_round("A2", "a2", CHARLIE, "c", 2)
    return {ALICE: alice, BOB: bob, CHARLIE: charlie}


_SCHEMES = {
    "ghz": (ghz_programs, ("a", "b", "c")),
    "two_bell": (two_bell_programs, ("a1", "b", "a2", "c")),
}


def _check_dims(u: DiagonalBlockOp, v: DiagonalBlockOp, initial: StateVector):
    expected = 1 + u.block_qubits + v.block_qubits
    if initial.num_qubits != expected:
        raise ValueError(
            f"initial state has {initial.num_qubits} qubits, blocks need 1 + {u.block_qubits} + {v.block_qubits}")


def _setup_world(scheme: str, u, v, initial, rng) -> LoccWorld:
    a, bw, cw = data_wires(u.block_qubits, v.block_qubits)
    world = LoccWorld(rng=rng)
    world.add_register(initial, [a, *bw, *cw], [ALICE] + [BOB] * len(bw) + [CHARLIE] * len(cw))
    if scheme == "ghz":
        world.install_resource("ghz", [ALICE, BOB, CHARLIE], ["A1", "B1", "C1"])
    else:
        world.install_resource("bell", [ALICE, BOB], ["A1", "B1"])
        world.install_resource("bell", [ALICE, CHARLIE], ["A2", "C1"])
    return world


def run_branch(scheme: str, u: DiagonalBlockOp, v: DiagonalBlockOp, initial: StateVector,
               forced: dict | None = None, schedule: Sequence[Party] | None = None,
               skip: Collection[str] = (), rng=None) -> tuple[StateVector, dict, float, LoccWorld]:
    """Run one execution of ``scheme`` and return ``(final, outcomes, probability, world)``.

    ``final`` is the state of (A, B..., C...) once all ancillas are measured.
    Outcomes not listed in ``forced`` are sampled from ``rng``.
    """
    _check_dims(u, v, initial)
    build, tags = _SCHEMES[scheme]
    world = _setup_world(scheme, u, v, initial, rng)
    n_start = len(world.transcript)
    run_interleaved(build(u, v, forced, skip), schedule, world)
    a, bw, cw = data_wires(u.block_qubits, v.block_qubits)
    final = world.labelled_state([a, *bw, *cw])
    outcomes, prob = {}, 1.0
    for e in world.transcript[n_start:]:
        if e.kind == "local_measure":
            prob *= e.payload["probability"]
    for party_mem in world.memory.values():
        for t in tags:
            if t in party_mem and t not in outcomes:
                outcomes[t] = party_mem[t]
    return final, {t: outcomes[t] for t in tags}, prob, world


def _report(scheme, u, v, initial, mode, seed, schedule, skip) -> ProtocolReport:
    _check_dims(u, v, initial)
    oracle = apply_gate(initial, compose_w(u, v), range(initial.num_qubits))
    _, tags = _SCHEMES[scheme]
    if mode == "enumerate":
        runs = [dict(zip(tags, bits)) for bits in itertools.product((0, 1), repeat=len(tags))]
    elif mode == "sampled":
        runs = [None]
    else:
        raise ValueError(f"mode must be 'enumerate' or 'sampled', got {mode!r}")
    branches, transcripts, tally = [], {}, None
    for forced in runs:
        final, outcomes, prob, world = run_branch(scheme, u, v, initial, forced, schedule, skip, rng=seed)
        exact, fid = state_distance(final, oracle)
        br = OutcomeBranch(outcomes, prob, final, exact, fid)
        branches.append(br)
        transcripts[br.key] = list(world.transcript)
        if tally is None:
            tally = world.tally
        elif tally != world.tally:
            raise RuntimeError(f"resource use differs between branches: {tally} vs {world.tally}")
    return ProtocolReport(scheme, mode, branches, oracle, tally, transcripts)


def ghz_protocol(u: DiagonalBlockOp, v: DiagonalBlockOp, initial: StateVector,
                 mode: str = "enumerate", seed=None, schedule: Sequence[Party] | None = None,
                 skip: Collection[str] = ()) -> ProtocolReport:
    """Apply ``u`` on (A, B) then ``v`` on (A, C) using one GHZ state.

    ``mode="enumerate"`` forces all eight ``(a, b, c)`` branches;
    ``mode="sampled"`` draws one branch with ``seed``.
    """
    return _report("ghz", u, v, initial, mode, seed, schedule, skip)


def two_bell_baseline(u: DiagonalBlockOp, v: DiagonalBlockOp, initial: StateVector,
                      mode: str = "enumerate", seed=None, schedule: Sequence[Party] | None = None,
                      skip: Collection[str] = ()) -> ProtocolReport:
    """Same target as :func:`ghz_protocol`, using two Bell pairs (16 branches)."""
    return _report("two_bell", u, v, initial, mode, seed, schedule, skip)


def decompose_on_control(state: StateVector):
    """Split ``state`` as ``alpha0 |0>|xi0> + alpha1 |1>|xi1>`` on wire 0.

    The alphas are real and non-negative; phases go into the xi. A branch
    with zero weight gets ``None`` for its xi.
    """
    if state.num_qubits < 2:
        raise ValueError("need at least 2 qubits to split off a control")
    half = state.amplitudes.reshape(2, -1)
    out = []
    for row in half:
        alpha = float(np.linalg.norm(row))
        xi = StateVector(row / alpha) if alpha > ALGEBRA_TOL else None
        out.extend([alpha, xi])
    return tuple(out)


def verify_report(report: ProtocolReport, tolerance: float = VERIFY_TOL) -> Verdict:
    if not report.branches:
        return Verdict(False, None, "no branches")
    worst = max(report.branches, key=lambda b: b.exact_distance)
    if not worst.exact_distance < tolerance:
        return Verdict(False, worst, f"branch {worst.key} off by {worst.exact_distance:.3g}")
    total = report.total_probability
    # a sampled report holds one branch; only an enumeration must sum to 1
    if report.mode == "enumerate" and abs(total - 1.0) > tolerance:
        return Verdict(False, worst, f"branch probabilities sum to {total!r}")
    return Verdict(True, worst)


def sweep_schedules(scheme: str, u: DiagonalBlockOp, v: DiagonalBlockOp, n_sampled: int,
                    rng=None) -> list[list[Party]]:
    """Every serial party order plus ``n_sampled`` random interleavings.

    Random interleavings may put a receive before its send; the blocking
    scheduler holds such a step until the message arrives.
    """
    programs = _SCHEMES[scheme][0](u, v)
    rng = np.random.default_rng(rng)
    out = [serial_schedule(programs, order) for order in itertools.permutations(list(Party))]
    out.extend(random_schedule(programs, rng) for _ in range(n_sampled))
    return out


def schedule_deviation(scheme: str, u: DiagonalBlockOp, v: DiagonalBlockOp, initial: StateVector,
                       schedules: Sequence[Sequence[Party]], skip: Collection[str] = ()) -> float:
    """Largest amplitude difference, over all branches, between any schedule and the first one."""
    _, tags = _SCHEMES[scheme]
    worst = 0.0
    for bits in itertools.product((0, 1), repeat=len(tags)):
        forced = dict(zip(tags, bits))
        ref = run_branch(scheme, u, v, initial, forced, schedules[0], skip)[0]
        for sched in schedules[1:]:
            final = run_branch(scheme, u, v, initial, forced, sched, skip)[0]
            worst = max(worst, state_distance(final, ref)[0])
    return worst
