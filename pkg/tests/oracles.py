"""Brute-force references, deliberately independent of the package internals."""
import itertools

import numpy as np


def basis_permutation(order, n):
    """Matrix P with P|x_0 ... x_{n-1}> = |x_order[0] ... x_order[n-1]>."""
    dim = 2**n
    p = np.zeros((dim, dim))
    for bits in itertools.product((0, 1), repeat=n):
        src = int("".join(map(str, bits)), 2)
        dst = int("".join(str(bits[w]) for w in order), 2)
        p[dst, src] = 1
    return p


def dense_operator(gate, wires, n):
    """Full 2^n matrix of ``gate`` on ``wires``: pad with identity, then permute."""
    k = len(wires)
    rest = [w for w in range(n) if w not in wires]
    p = basis_permutation(list(wires) + rest, n)
    padded = np.kron(gate, np.eye(2 ** (n - k)))
    return p.T @ padded @ p


def reduced_density(psi, keep, n):
    """Partial trace by explicit index loops."""
    keep = list(keep)
    dk = 2 ** len(keep)
    rho = np.zeros((dk, dk), dtype=complex)
    for i, j in itertools.product(range(2**n), repeat=2):
        bi = [(i >> (n - 1 - w)) & 1 for w in range(n)]
        bj = [(j >> (n - 1 - w)) & 1 for w in range(n)]
        if any(bi[w] != bj[w] for w in range(n) if w not in keep):
            continue
        ri = int("".join(str(bi[w]) for w in keep), 2)
        rj = int("".join(str(bj[w]) for w in keep), 2)
        rho[ri, rj] += psi[i] * np.conj(psi[j])
    return rho


def entropy_from_density(rho):
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > 1e-14]
    return float(-np.sum(ev * np.log2(ev)))


def w_two_factor(u_blocks, v_blocks):
    """First line of the composite: (sum |i><i| (x) I (x) v_i)(sum |j><j| (x) u_j (x) I)."""
    db, dc = u_blocks[0].shape[0], v_blocks[0].shape[0]
    proj = [np.diag([1, 0]), np.diag([0, 1])]
    second = sum(np.kron(np.kron(proj[i], np.eye(db)), v_blocks[i]) for i in (0, 1))
    first = sum(np.kron(np.kron(proj[j], u_blocks[j]), np.eye(dc)) for j in (0, 1))
    return second @ first


def random_unitary(dim, rng):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q
