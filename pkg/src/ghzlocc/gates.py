"""Named gates, diagonal-block (controlled-block) operators and Haar sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import Unitary

MAX_BLOCK_QUBITS = 3

__all__ = [
    "DiagonalBlockOp",
    "identity",
    "pauli_x",
    "pauli_z",
    "hadamard",
    "cnot",
    "embed_diagonal_block",
    "compose_w",
    "controlled_not_pair",
    "haar_unitary",
    "haar_random_blocks",
]


def identity(num_qubits: int = 1) -> Unitary:
    return Unitary(np.eye(2**num_qubits))


def pauli_x() -> Unitary:
    return Unitary([[0, 1], [1, 0]])


def pauli_z() -> Unitary:
    return Unitary([[1, 0], [0, -1]])


def hadamard() -> Unitary:
    return Unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def cnot() -> Unitary:
    """Controlled-NOT, control on the first wire."""
    return Unitary([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


@dataclass(frozen=True)
class DiagonalBlockOp:
    """``|0><0| (x) block0 + |1><1| (x) block1``.

    Both blocks act on ``block_qubits`` wires. The caller holding one of
    these only needs to apply it, never to inspect the blocks.
    """

    block0: Unitary
    block1: Unitary

    def __post_init__(self):
        if self.block0.dim != self.block1.dim:
            raise ValueError(f"block dims differ: {self.block0.dim} vs {self.block1.dim}")

    @property
    def block_qubits(self) -> int:
        return self.block0.num_qubits

    def block(self, i: int) -> Unitary:
        return (self.block0, self.block1)[i]

    @classmethod
    def controlled(cls, gate: Unitary) -> "DiagonalBlockOp":
        """``(I, gate)``; ``controlled(pauli_x())`` is the CNOT."""
        return cls(identity(gate.num_qubits), gate)


def embed_diagonal_block(op: DiagonalBlockOp) -> Unitary:
    d = op.block0.dim
    m = np.zeros((2 * d, 2 * d), dtype=complex)
    m[:d, :d] = op.block0.matrix
    m[d:, d:] = op.block1.matrix
    return Unitary(m)


def compose_w(u: DiagonalBlockOp, v: DiagonalBlockOp) -> Unitary:
    """Target operator ``sum_i |i><i| (x) u_i (x) v_i`` on wires (A, B..., C...).

    This is the combined effect of ``u`` on (A, B-register) followed by
    ``v`` on (A, C-register); it serves as the reference the protocols are
    checked against.
    """
    dim_b, dim_c = u.block0.dim, v.block0.dim
    d = dim_b * dim_c
    m = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in (0, 1):
        m[i * d:(i + 1) * d, i * d:(i + 1) * d] = np.kron(u.block(i).matrix, v.block(i).matrix)
    return Unitary(m)


def controlled_not_pair() -> Unitary:
    """``|0><0| (x) I (x) I + |1><1| (x) X (x) X``: two CNOTs sharing control A."""
    x = DiagonalBlockOp.controlled(pauli_x())
    return compose_w(x, x)


def haar_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary from QR of a complex Ginibre matrix.

    The diagonal of R is rotated onto the positive reals so the result is
    Haar and not merely orthonormal.
    """
    rng = np.random.default_rng(rng)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_blocks(block_qubits: int, seed) -> DiagonalBlockOp:
    """Two independent Haar blocks on ``block_qubits`` wires, reproducible from ``seed``."""
    if not 1 <= block_qubits <= MAX_BLOCK_QUBITS:
        raise ValueError(f"block_qubits must be in [1, {MAX_BLOCK_QUBITS}], got {block_qubits}")
    rng = np.random.default_rng(seed)
    dim = 2**block_qubits
    return DiagonalBlockOp(Unitary(haar_unitary(dim, rng)), Unitary(haar_unitary(dim, rng)))
