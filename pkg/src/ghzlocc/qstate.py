"""Small exact statevector mathematics.

Wire 0 is the most significant bit of the basis index everywhere in this
package, so ``|q0 q1 ... q_{n-1}>`` maps to index ``q0 * 2**(n-1) + ...``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CONSTRUCTION_TOL = 1e-9
VERIFY_TOL = 1e-10
ALGEBRA_TOL = 1e-12
MIN_BRANCH_PROBABILITY = 1e-12

__all__ = [
    "StateVector",
    "Unitary",
    "Bipartition",
    "ZeroProbabilityError",
    "make_state",
    "basis_state",
    "random_state",
    "tensor",
    "apply_gate",
    "measure_computational",
    "outcome_probabilities",
    "state_distance",
    "entanglement_entropy",
]


class ZeroProbabilityError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


def _num_qubits_for(length: int) -> int:
    if length < 2 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of 2 (>= 2)")
    return length.bit_length() - 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on ``num_qubits`` wires. Immutable."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits_for(amps.size)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class Unitary:
    """Square unitary matrix acting on ``num_qubits`` wires."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        _num_qubits_for(m.shape[0])
        residual = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
        if residual > VERIFY_TOL:
            raise ValueError(f"matrix is not unitary (residual {residual:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.matrix @ other.matrix)

    def dagger(self) -> "Unitary":
        return Unitary(self.matrix.conj().T)


@dataclass(frozen=True)
class Bipartition:
    """A cut of the wires ``0..n-1`` into two nonempty sides."""

    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        a, b = frozenset(self.side_a), frozenset(self.side_b)
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if a & b:
            raise ValueError(f"sides overlap on wires {sorted(a & b)}")
        if a | b != frozenset(range(len(a) + len(b))):
            raise ValueError("bipartition must cover wires 0..n-1 exactly")

    @classmethod
    def from_side(cls, side_a: Iterable[int], num_qubits: int) -> "Bipartition":
        a = frozenset(side_a)
        return cls(a, frozenset(range(num_qubits)) - a)

    @property
    def num_qubits(self) -> int:
        return len(self.side_a) + len(self.side_b)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.side_b, self.side_a)


def make_state(amplitudes: Sequence[complex]) -> StateVector:
    """Build a state from raw amplitudes, renormalizing small drift.

    Raises ``ValueError`` for non power-of-2 lengths and for vectors whose
    norm is off from 1 by more than 1e-9.
    """
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    _num_qubits_for(amps.size)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("zero vector is not a state")
    if abs(norm - 1.0) > CONSTRUCTION_TOL:
        raise ValueError(f"vector norm {norm:.12g} deviates from 1 beyond {CONSTRUCTION_TOL}")
    return StateVector(amps / norm)


def basis_state(bits: str | Sequence[int]) -> StateVector:
    """``basis_state("010")`` is ``|010>``."""
    bits = [int(b) for b in bits]
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int("".join(map(str, bits)), 2)] = 1.0
    return StateVector(amps)


def random_state(num_qubits: int, rng=None) -> StateVector:
    """Haar-random pure state."""
    rng = np.random.default_rng(rng)
    dim = 2**num_qubits
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(v / np.linalg.norm(v))


def tensor(*states: StateVector) -> StateVector:
    amps = np.ones(1, dtype=complex)
    for s in states:
        amps = np.kron(amps, s.amplitudes)
    return StateVector(amps)


def _check_wires(wires: Sequence[int], num_qubits: int) -> tuple[int, ...]:
    wires = tuple(int(w) for w in wires)
    if len(set(wires)) != len(wires):
        raise ValueError(f"repeated wire in {wires}")
    for w in wires:
        if not 0 <= w < num_qubits:
            raise ValueError(f"wire {w} out of range for {num_qubits} qubits")
    return wires


def apply_gate(state: StateVector, gate: Unitary, wires: Sequence[int]) -> StateVector:
    """Apply ``gate`` to ``wires`` (first listed wire = most significant gate bit)."""
    n = state.num_qubits
    wires = _check_wires(wires, n)
    k = len(wires)
    if gate.dim != 2**k:
        raise ValueError(f"gate of dim {gate.dim} cannot act on {k} wires")
    psi = state.amplitudes.reshape((2,) * n)
    g = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(wires)))
    out = np.moveaxis(out, list(range(k)), list(wires))
    return StateVector(out.reshape(-1))


def outcome_probabilities(state: StateVector, wire: int) -> tuple[float, float]:
    """Born probabilities of reading 0 and 1 on ``wire``."""
    (wire,) = _check_wires([wire], state.num_qubits)
    psi = np.moveaxis(state.amplitudes.reshape((2,) * state.num_qubits), wire, 0)
    p = np.sum(np.abs(psi.reshape(2, -1)) ** 2, axis=1)
    return float(p[0]), float(p[1])


def measure_computational(
    state: StateVector,
    wire: int,
    forced_outcome: int | None = None,
    rng=None,
) -> tuple[int, float, StateVector]:
    """Measure ``wire`` in the computational basis and drop it from the register.

    Returns ``(outcome, probability, post_state)``. With ``forced_outcome`` the
    branch is selected instead of sampled; forcing an outcome of probability
    at most 1e-12 raises :class:`ZeroProbabilityError`. ``rng`` is anything
    ``numpy.random.default_rng`` accepts.
    """
    n = state.num_qubits
    if n < 2:
        raise ValueError("cannot measure away the last qubit of a register")
    p0, p1 = outcome_probabilities(state, wire)
    if forced_outcome is None:
        outcome = 0 if np.random.default_rng(rng).random() < p0 else 1
    else:
        if forced_outcome not in (0, 1):
            raise ValueError(f"forced outcome must be 0 or 1, got {forced_outcome!r}")
        outcome = forced_outcome
    prob = (p0, p1)[outcome]
    if prob <= MIN_BRANCH_PROBABILITY:
        raise ZeroProbabilityError(f"outcome {outcome} on wire {wire} has probability {prob:.3g}")
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), wire, 0)[outcome]
    return outcome, prob, StateVector(psi.reshape(-1) / np.sqrt(prob))


def state_distance(s1: StateVector, s2: StateVector) -> tuple[float, float]:
    """``(max |a_i - b_i|, |<s1|s2>|^2)``.

    The first entry is phase sensitive, the second is not.
    """
    if s1.num_qubits != s2.num_qubits:
        raise ValueError(f"qubit counts differ: {s1.num_qubits} vs {s2.num_qubits}")
    exact = float(np.max(np.abs(s1.amplitudes - s2.amplitudes)))
    fidelity = float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)
    return exact, fidelity


def entanglement_entropy(state: StateVector, cut: Bipartition) -> float:
    """Base-2 von Neumann entropy of either side of ``cut``, in ebits."""
    n = state.num_qubits
    if cut.num_qubits != n:
        raise ValueError(f"bipartition covers {cut.num_qubits} wires, state has {n}")
    a, b = sorted(cut.side_a), sorted(cut.side_b)
    psi = np.transpose(state.amplitudes.reshape((2,) * n), a + b)
    s = np.linalg.svd(psi.reshape(2 ** len(a), 2 ** len(b)), compute_uv=False)
    p = s**2
    p = p[p > ALGEBRA_TOL]
    p = p / p.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))
