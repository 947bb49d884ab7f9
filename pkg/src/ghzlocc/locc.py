"""Three-party LOCC execution model.

Each party owns a set of named wires and may only touch those. Parties talk
through classical mailboxes. A party program is a list of :class:`Step`; the
scheduler in :func:`run_interleaved` advances parties one step at a time in
a caller-chosen order, holding a party at a receive until its message is in
the mailbox.
"""
from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .qstate import StateVector, Unitary, apply_gate, make_state, measure_computational, tensor

__all__ = [
    "Party",
    "ClassicalMessage",
    "ResourceTally",
    "TranscriptEvent",
    "LoccError",
    "OwnershipError",
    "CausalityError",
    "DeadlockError",
    "LoccWorld",
    "Step",
    "gate_step",
    "measure_step",
    "send_step",
    "receive_step",
    "run_interleaved",
    "serial_schedule",
    "random_schedule",
    "all_interleavings",
    "count_interleavings",
    "audit_transcript",
    "transcript_to_jsonl",
    "ghz_resource",
    "bell_resource",
]

EVENT_KINDS = ("local_gate", "local_measure", "send", "receive", "resource_claim")


class Party(str, Enum):
    ALICE = "Alice"
    BOB = "Bob"
    CHARLIE = "Charlie"

    def __str__(self):
        return self.value


class LoccError(RuntimeError):
    pass


class OwnershipError(LoccError):
    """A party tried to act on a wire it does not hold."""


class CausalityError(LoccError):
    """A message was consumed before it was sent."""


class DeadlockError(LoccError):
    def __init__(self, blocked: Mapping[Party, str]):
        self.blocked = dict(blocked)
        waits = ", ".join(f"{p} awaits {tag!r}" for p, tag in self.blocked.items())
        super().__init__(f"no runnable step: {waits}")


@dataclass(frozen=True)
class ClassicalMessage:
    sender: Party
    recipients: frozenset
    bit: int
    tag: str

    def __post_init__(self):
        object.__setattr__(self, "recipients", frozenset(self.recipients))
        if not self.recipients:
            raise ValueError("message needs at least one recipient")
        if self.sender in self.recipients:
            raise ValueError(f"{self.sender} cannot send to itself")
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit!r}")


@dataclass
class ResourceTally:
    """Counts of consumed entanglement and classical communication.

    ``cbits`` counts one per message, a broadcast included;
    ``raw_directed_messages`` counts one per (sender, recipient) pair.
    """

    ghz_consumed: int = 0
    bell_consumed: int = 0
    cbits: int = 0
    raw_directed_messages: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TranscriptEvent:
    actor: Party
    kind: str
    step_label: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"actor": str(self.actor), "kind": self.kind,
             "step_label": self.step_label, "payload": self.payload},
            sort_keys=True,
        )


def transcript_to_jsonl(events: Iterable[TranscriptEvent]) -> str:
    return "".join(e.to_json() + "\n" for e in events)


def ghz_resource() -> StateVector:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return make_state(amps)


def bell_resource() -> StateVector:
    return make_state(np.array([1, 0, 0, 1]) / np.sqrt(2))


_RESOURCES = {"ghz": (ghz_resource, 3, "ghz_consumed"), "bell": (bell_resource, 2, "bell_consumed")}


class LoccWorld:
    """Global physical state plus everything the parties are allowed to see.

    ``wires`` lists live wire labels in register order. ``memory`` holds each
    party's private classical record (measurement outcomes it made and bits
    it received); conditional corrections read only from there.
    """

    def __init__(self, rng=None):
        self.state: StateVector | None = None
        self.wires: list[str] = []
        self.ownership: dict[str, Party] = {}
        self.mailbox: dict[Party, deque] = {p: deque() for p in Party}
        self.memory: dict[Party, dict[str, int]] = {p: {} for p in Party}
        self.transcript: list[TranscriptEvent] = []
        self.tally = ResourceTally()
        self.rng = np.random.default_rng(rng)

    def _log(self, actor, kind, step_label, **payload):
        self.transcript.append(TranscriptEvent(Party(actor), kind, step_label, payload))

    def _attach(self, state: StateVector, labels: Sequence[str], owners: Sequence[Party]):
        if len(labels) != state.num_qubits or len(owners) != state.num_qubits:
            raise ValueError("need one label and one owner per qubit")
        clash = set(labels) & set(self.wires)
        if clash or len(set(labels)) != len(labels):
            raise ValueError(f"wire labels already in use: {sorted(clash) or labels}")
        self.state = state if self.state is None else tensor(self.state, state)
        self.wires.extend(labels)
        self.ownership.update(zip(labels, (Party(o) for o in owners)))

    def add_register(self, state: StateVector, labels: Sequence[str], owners: Sequence[Party],
                     step_label: str = "input") -> None:
        """Attach the parties' input qubits. Not counted as a resource."""
        self._attach(state, labels, owners)
        for party in dict.fromkeys(Party(o) for o in owners):
            mine = [w for w, o in zip(labels, owners) if Party(o) is party]
            self._log(party, "resource_claim", step_label, resource="input", wires=mine)

    def install_resource(self, kind: str, owners: Sequence[Party],
                         labels: Sequence[str] | None = None,
                         step_label: str = "share resource") -> list[str]:
        """Share a ``"ghz"`` or ``"bell"`` state, one wire per owner, and tally it."""
        if kind not in _RESOURCES:
            raise ValueError(f"unknown resource kind {kind!r}")
        factory, count, counter = _RESOURCES[kind]
        owners = [Party(o) for o in owners]
        if len(owners) != count:
            raise ValueError(f"{kind} needs {count} owners, got {len(owners)}")
        if len(set(owners)) != count:
            raise ValueError(f"duplicate owner in {[str(o) for o in owners]}")
        if labels is None:
            n = getattr(self.tally, counter)
            labels = [f"{kind}{n}.{o}" for o in owners]
        self._attach(factory(), list(labels), owners)
        setattr(self.tally, counter, getattr(self.tally, counter) + 1)
        for label, owner in zip(labels, owners):
            self._log(owner, "resource_claim", step_label, resource=kind, wires=[label])
        return list(labels)

    def _owned_indices(self, party: Party, wires: Sequence[str]) -> list[int]:
        for w in wires:
            owner = self.ownership.get(w)
            if owner is not party:
                raise OwnershipError(f"{party} does not own wire {w!r} (owner: {owner})")
        return [self.wires.index(w) for w in wires]

    def local_apply(self, party: Party, gate: Unitary, wires: Sequence[str],
                    step_label: str = "", name: str | None = None) -> None:
        party = Party(party)
        idx = self._owned_indices(party, wires)
        self.state = apply_gate(self.state, gate, idx)
        self._log(party, "local_gate", step_label, gate=name or f"U{gate.dim}", wires=list(wires))

    def local_measure(self, party: Party, wire: str, forced_outcome: int | None = None,
                      step_label: str = "") -> int:
        party = Party(party)
        (idx,) = self._owned_indices(party, [wire])
        outcome, prob, self.state = measure_computational(
            self.state, idx, forced_outcome=forced_outcome, rng=self.rng)
        self.wires.pop(idx)
        del self.ownership[wire]
        self._log(party, "local_measure", step_label, wire=wire, outcome=outcome,
                  probability=prob, forced=forced_outcome is not None)
        return outcome

    def send_classical(self, msg: ClassicalMessage, step_label: str = "") -> None:
        for r in sorted(msg.recipients):
            self.mailbox[r].append(msg)
        self.tally.cbits += 1
        self.tally.raw_directed_messages += len(msg.recipients)
        self._log(msg.sender, "send", step_label, tag=msg.tag, bit=msg.bit,
                  recipients=sorted(str(r) for r in msg.recipients))

    def has_message(self, party: Party, tag: str) -> bool:
        return any(m.tag == tag for m in self.mailbox[Party(party)])

    def receive_classical(self, party: Party, tag: str, step_label: str = "") -> int:
        party = Party(party)
        box = self.mailbox[party]
        for i, msg in enumerate(box):
            if msg.tag == tag:
                del box[i]
                self._log(party, "receive", step_label, tag=tag, bit=msg.bit, sender=str(msg.sender))
                return msg.bit
        raise CausalityError(f"{party} has no message tagged {tag!r}")

    def labelled_state(self, order: Sequence[str]) -> StateVector:
        """Global state with live wires permuted into ``order``."""
        if sorted(order) != sorted(self.wires):
            raise ValueError(f"order {list(order)} does not match live wires {self.wires}")
        psi = self.state.amplitudes.reshape((2,) * len(self.wires))
        psi = np.transpose(psi, [self.wires.index(w) for w in order])
        return StateVector(psi.reshape(-1))


@dataclass(frozen=True)
class Step:
    """One atomic action of one party. ``awaits`` names a message tag the step consumes."""

    party: Party
    label: str
    action: Callable[[LoccWorld], None]
    awaits: str | None = None

    def runnable(self, world: LoccWorld) -> bool:
        return self.awaits is None or world.has_message(self.party, self.awaits)


def gate_step(party: Party, label: str, gate: Unitary, wires: Sequence[str],
              when: Callable[[dict], bool] | None = None, name: str | None = None) -> Step:
    """Apply ``gate``; if ``when`` is given it is evaluated on the party's own memory."""
    def action(world: LoccWorld):
        if when is None or when(world.memory[party]):
            world.local_apply(party, gate, wires, step_label=label, name=name)
    return Step(party, label, action)


def measure_step(party: Party, label: str, wire: str, record_as: str,
                 forced_outcome: int | None = None) -> Step:
    def action(world: LoccWorld):
        world.memory[party][record_as] = world.local_measure(
            party, wire, forced_outcome=forced_outcome, step_label=label)
    return Step(party, label, action)


def send_step(party: Party, label: str, tag: str, recipients: Iterable[Party]) -> Step:
    recipients = frozenset(recipients)

    def action(world: LoccWorld):
        bit = world.memory[party][tag]
        world.send_classical(ClassicalMessage(party, recipients, bit, tag), step_label=label)
    return Step(party, label, action)


def receive_step(party: Party, label: str, tag: str) -> Step:
    def action(world: LoccWorld):
        world.memory[party][tag] = world.receive_classical(party, tag, step_label=label)
    return Step(party, label, action, awaits=tag)


def run_interleaved(programs: Mapping[Party, Sequence[Step]], schedule: Sequence[Party] | None,
                    world: LoccWorld, strict: bool = False) -> LoccWorld:
    """Execute party programs in the order given by ``schedule``.

    ``schedule`` is a sequence of party picks, each advancing that party by one
    step, so it must name each party exactly ``len(program)`` times. ``None``
    means Alice, Bob, Charlie serially.

    In the default (blocking) mode a pick whose step waits on an absent
    message is held back and retried after later picks run; if no held or
    remaining pick can run, :class:`DeadlockError` names the blocked parties.
    With ``strict=True`` the schedule must be causally realizable as written
    and a premature receive raises :class:`CausalityError`.
    """
    programs = {Party(p): list(steps) for p, steps in programs.items()}
    if schedule is None:
        schedule = serial_schedule(programs, list(Party))
    schedule = [Party(p) for p in schedule]
    want = Counter({p: len(s) for p, s in programs.items() if s})
    if Counter(schedule) != want:
        raise ValueError(f"schedule step counts {dict(Counter(schedule))} != program lengths {dict(want)}")

    cursor = {p: 0 for p in programs}
    pending = list(schedule)
    while pending:
        for pos, party in enumerate(pending):
            step = programs[party][cursor[party]]
            if step.runnable(world):
                break
            if strict:
                raise CausalityError(f"{party} step {step.label!r} needs {step.awaits!r} before it was sent")
        else:
            blocked = {p: programs[p][cursor[p]].awaits for p in dict.fromkeys(pending)}
            raise DeadlockError(blocked)
        pending.pop(pos)
        step.action(world)
        cursor[party] += 1
    return world


def serial_schedule(programs: Mapping[Party, Sequence[Step]], order: Sequence[Party]) -> list[Party]:
    sched = []
    for p in order:
        sched.extend([Party(p)] * len(programs.get(Party(p), ())))
    return sched


def random_schedule(programs: Mapping[Party, Sequence[Step]], rng=None) -> list[Party]:
    """Uniformly shuffled pick sequence; per-party order is kept by construction."""
    picks = serial_schedule(programs, list(programs))
    order = np.random.default_rng(rng).permutation(len(picks))
    return [picks[i] for i in order]


def all_interleavings(counts: Mapping[Party, int]) -> Iterator[list[Party]]:
    """Every distinct merge of the parties' step sequences (multiset permutations)."""
    parties = [p for p, n in counts.items() if n > 0]
    total = sum(counts[p] for p in parties)

    def rec(remaining: dict, prefix: list):
        if len(prefix) == total:
            yield list(prefix)
            return
        for p in parties:
            if remaining[p]:
                remaining[p] -= 1
                prefix.append(p)
                yield from rec(remaining, prefix)
                prefix.pop()
                remaining[p] += 1

    yield from rec({p: counts[p] for p in parties}, [])


def audit_transcript(events: Sequence[TranscriptEvent]) -> None:
    """Replay a transcript and raise if any event breaks locality or causality."""
    owner: dict[str, Party] = {}
    in_flight: Counter = Counter()
    for n, e in enumerate(events):
        if e.kind not in EVENT_KINDS:
            raise LoccError(f"event {n}: unknown kind {e.kind!r}")
        p = e.payload
        if e.kind == "resource_claim":
            for w in p["wires"]:
                if w in owner:
                    raise OwnershipError(f"event {n}: wire {w!r} claimed twice")
                owner[w] = e.actor
        elif e.kind in ("local_gate", "local_measure"):
            wires = p["wires"] if e.kind == "local_gate" else [p["wire"]]
            for w in wires:
                if owner.get(w) is not e.actor:
                    raise OwnershipError(f"event {n}: {e.actor} touched {w!r} owned by {owner.get(w)}")
            if e.kind == "local_measure":
                del owner[p["wire"]]
        elif e.kind == "send":
            for r in p["recipients"]:
                in_flight[(Party(r), p["tag"])] += 1
        elif e.kind == "receive":
            key = (e.actor, p["tag"])
            if in_flight[key] == 0:
                raise CausalityError(f"event {n}: {e.actor} received {p['tag']!r} before any send")
            in_flight[key] -= 1


def count_interleavings(counts: Mapping[Party, int]) -> int:
    total, out = 0, 1
    for n in counts.values():
        total += n
        out *= math.comb(total, n)
    return out
