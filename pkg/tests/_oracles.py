"""Independent dense references for the test suite.

Everything here is built from explicit Kronecker products and scipy's expm,
sharing no kernel code with the package, so agreement between the two is a
real check.  Qubit 0 is the leftmost tensor factor throughout.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
from scipy.linalg import expm

from hive_vqe.hamiltonian import Boundary

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def kron_all(ops: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def site_op(n: int, q: int, op: np.ndarray) -> np.ndarray:
    return kron_all([op if k == q else I2 for k in range(n)])


def dense_coupling_sum(n: int, boundary: Boundary) -> np.ndarray:
    """Sum of neighboring ZZ products, with the wraparound bond when closed."""
    total = np.zeros((2**n, 2**n), dtype=np.complex128)
    bonds = boundary.coupling_count(n)
    for i in range(bonds):
        total += site_op(n, i, PAULI_Z) @ site_op(n, (i + 1) % n, PAULI_Z)
    return total


def dense_field_sum(n: int) -> np.ndarray:
    total = np.zeros((2**n, 2**n), dtype=np.complex128)
    for q in range(n):
        total += site_op(n, q, PAULI_X)
    return total


def dense_tfim(n: int, h: float, boundary: Boundary) -> np.ndarray:
    return -dense_coupling_sum(n, boundary) - h * dense_field_sum(n)


def dense_unitary(n: int, layers: int, theta: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Full circuit unitary: per layer, the coupling exponential then the field one."""
    zz = dense_coupling_sum(n, boundary)
    x = dense_field_sum(n)
    unitary = np.eye(2**n, dtype=np.complex128)
    for layer in range(layers):
        unitary = expm(-1j * theta[2 * layer] * zz) @ unitary
        unitary = expm(-1j * theta[2 * layer + 1] * x) @ unitary
    return unitary


def plus_vec(n: int) -> np.ndarray:
    return np.full(2**n, 2.0 ** (-n / 2), dtype=np.complex128)
