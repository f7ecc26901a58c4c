"""Dense complex statevector engine for chains of 2 to 12 qubits.

Both circuit layers diagonalize by hand, so no matrix exponential is ever
formed.  The coupling layer multiplies each basis amplitude by a phase drawn
from a precomputed integer table of summed ZZ eigenvalues, and the field layer
applies the same single-qubit rotation to every qubit as an in-place butterfly
pass.  Every kernel accepts leading batch axes (one parameter row per batch
row), which is what makes population-based optimization cheap.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from hive_vqe.hamiltonian import Boundary, PauliSum

MIN_QUBITS = 2
MAX_QUBITS = 12

NORM_DRIFT_TOLERANCE = 1e-8

_renormalizations = 0


def _check_qubit_count(n: int) -> None:
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise ValueError(
            f"dense simulation supports {MIN_QUBITS} <= n <= {MAX_QUBITS}, got n={n}"
        )


@dataclass(frozen=True)
class StateVector:
    """Amplitudes of an n-qubit state in the fixed basis ordering.

    Instances are treated as immutable; operations return fresh vectors.
    Derivative vectors are represented by the same type and are deliberately
    not forced to unit norm.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n)
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for n={self.n}, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def plus_state(n: int) -> StateVector:
    """Uniform superposition, the shared circuit input."""
    _check_qubit_count(n)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128))


@functools.lru_cache(maxsize=None)
def _zz_structure(n: int, boundary: Boundary) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer table of summed bond eigenvalues, plus gather helpers.

    Returns ``(table, gather_index, k_values)`` where ``table[b]`` is the sum
    of ``z_i z_{i+1}`` over all bonds for basis state ``b`` and
    ``k_values[gather_index] == table``.
    """
    _check_qubit_count(n)
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    z = 1 - 2 * bits
    pairs = [(i, i + 1) for i in range(n - 1)]
    if boundary is Boundary.CLOSED:
        pairs.append((n - 1, 0))
    table = np.zeros(1 << n, dtype=np.int64)
    for a, b in pairs:
        table += z[:, a] * z[:, b]
    k_values = np.arange(table.min(), table.max() + 1)
    table.flags.writeable = False
    return table, table - table.min(), k_values


def apply_zz_layer(amplitudes: np.ndarray, angle, n: int, boundary: Boundary) -> np.ndarray:
    """Phase kernel exp(-i * angle * sum_bonds Z Z) on the last axis.

    ``angle`` may be a scalar or carry the batch shape of the leading axes.
    """
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    _, gather, k_values = _zz_structure(n, boundary)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(angle, dtype=np.float64), k_values))
    return amplitudes * phases[..., gather]


def apply_x_layer(amplitudes: np.ndarray, angle, n: int) -> np.ndarray:
    """Rotation kernel exp(-i * angle * sum_i X_i) on the last axis."""
    out = np.array(amplitudes, dtype=np.complex128, copy=True)
    lead = out.shape[:-1]
    c = np.asarray(np.cos(angle), dtype=np.complex128)[..., None, None]
    s = 1j * np.asarray(np.sin(angle), dtype=np.complex128)[..., None, None]
    for q in range(n):
        view = out.reshape(lead + (1 << q, 2, 1 << (n - 1 - q)))
        upper = view[..., 0, :].copy()
        view[..., 0, :] = c * upper - s * view[..., 1, :]
        view[..., 1, :] = c * view[..., 1, :] - s * upper
    return out


def apply_coupling_generator(amplitudes: np.ndarray, n: int, boundary: Boundary) -> np.ndarray:
    """Action of the bond sum ``sum Z_i Z_{i+1}`` (diagonal integer table)."""
    table, _, _ = _zz_structure(n, boundary)
    return np.asarray(amplitudes, dtype=np.complex128) * table


def apply_field_generator(amplitudes: np.ndarray, n: int) -> np.ndarray:
    """Action of the field sum ``sum X_i`` (one bit-flip image per qubit)."""
    src = np.asarray(amplitudes, dtype=np.complex128)
    out = np.zeros_like(src)
    lead = src.shape[:-1]
    for q in range(n):
        shape = lead + (1 << q, 2, 1 << (n - 1 - q))
        view = src.reshape(shape)
        acc = out.reshape(shape)
        acc[..., 0, :] += view[..., 1, :]
        acc[..., 1, :] += view[..., 0, :]
    return out


def ensure_normalized(amplitudes: np.ndarray) -> np.ndarray:
    """Renormalize rows whose accumulated norm drift exceeds the tolerance.

    The layer kernels are exactly norm preserving up to roundoff, so this is
    a guard rail; every triggered repair is counted for diagnostics.
    """
    global _renormalizations
    norms = np.sum(np.abs(amplitudes) ** 2, axis=-1)
    drifted = np.abs(norms - 1.0) > NORM_DRIFT_TOLERANCE
    if np.any(drifted):
        _renormalizations += int(np.count_nonzero(drifted))
        amplitudes = amplitudes / np.sqrt(norms)[..., None]
    return amplitudes


def renormalization_count() -> int:
    """Total norm repairs since import, for drift diagnostics."""
    return _renormalizations


def evolve_zz_layer(state: StateVector, angle: float, boundary: Boundary) -> StateVector:
    """Apply the coupling-layer exponential at the given angle."""
    return StateVector(state.n, apply_zz_layer(state.amplitudes, float(angle), state.n, boundary))


def evolve_x_layer(state: StateVector, angle: float) -> StateVector:
    """Apply the field-layer exponential at the given angle."""
    return StateVector(state.n, apply_x_layer(state.amplitudes, float(angle), state.n))


def expectation(state: StateVector, op: PauliSum) -> float:
    """Real expectation value of a Hermitian Pauli sum."""
    if op.n != state.n:
        raise ValueError(f"operator acts on {op.n} qubits, state has {state.n}")
    value = np.vdot(state.amplitudes, op.apply(state.amplitudes))
    return float(value.real)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product <a|b>."""
    if a.n != b.n:
        raise ValueError(f"states act on different qubit counts: {a.n} vs {b.n}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
