"""Pauli-string operators and the transverse-field Ising chain.

Basis convention used across the package: qubit 0 is the leftmost tensor
factor and therefore the most significant bit of a basis-state index.  Basis
state ``b`` assigns qubit ``i`` the bit ``(b >> (n - 1 - i)) & 1``, and the Z
eigenvalue is ``+1`` for bit 0, ``-1`` for bit 1.  Any self-consistent
ordering gives the same spectra; this one is pinned so dense matrices, phase
tables, and tests agree entry for entry.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

MAX_DENSE_QUBITS = 12

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


def _check_dense_size(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ValueError(
            f"dense materialization is limited to {MAX_DENSE_QUBITS} qubits, got n={n}"
        )


class Boundary(enum.Enum):
    """Chain topology: open ends, or closed with a wraparound bond."""

    OPEN = "open"
    CLOSED = "closed"

    def coupling_count(self, n: int) -> int:
        """Number of nearest-neighbour bonds on an n-site chain."""
        return n - 1 if self is Boundary.OPEN else n

    @classmethod
    def parse(cls, text: str) -> "Boundary":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown boundary {text!r}; expected 'open' or 'closed'"
            ) from None


@dataclass(frozen=True)
class PauliString:
    """One real-weighted tensor product of single-qubit Pauli operators.

    ``letters`` holds one character of ``IXYZ`` per qubit, leftmost character
    acting on qubit 0.
    """

    coefficient: float
    letters: str

    def __post_init__(self) -> None:
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise ValueError(
                f"letters must be a nonempty string over IXYZ, got {self.letters!r}"
            )
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @property
    def n(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        """Dense matrix, including the coefficient."""
        _check_dense_size(self.n)
        out = np.array([[self.coefficient]], dtype=np.complex128)
        for letter in self.letters:
            out = np.kron(out, _PAULI[letter])
        return out


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings on a fixed qubit count.

    Zero-coefficient terms are dropped at construction, so the empty sum is a
    valid representation of the zero operator.
    """

    n: int
    terms: tuple[PauliString, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        kept = tuple(t for t in self.terms if t.coefficient != 0.0)
        for term in kept:
            if term.n != self.n:
                raise ValueError(
                    f"term {term.letters!r} acts on {term.n} qubits, expected {self.n}"
                )
        object.__setattr__(self, "terms", kept)

    def to_dense(self) -> np.ndarray:
        _check_dense_size(self.n)
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=np.complex128)
        for term in self.terms:
            out += term.matrix()
        return out

    @functools.cached_property
    def _action(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-term (gather indices, phases) for matrix-free application.

        A Pauli string maps basis state ``b`` to ``phase(b) * |b ^ flip>``, so
        its action on an amplitude vector is one gather plus one multiply.
        """
        dim = 1 << self.n
        idx = np.arange(dim)
        tables = []
        for term in self.terms:
            flip = 0
            sign_mask = 0
            y_count = 0
            for i, letter in enumerate(term.letters):
                bit = 1 << (self.n - 1 - i)
                if letter in "XY":
                    flip |= bit
                if letter in "ZY":
                    sign_mask |= bit
                if letter == "Y":
                    y_count += 1
            src = idx ^ flip
            parity = _bit_parity(src & sign_mask, self.n)
            phase = term.coefficient * (1j**y_count) * (1.0 - 2.0 * parity)
            tables.append((src, phase.astype(np.complex128)))
        return tables

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Matrix-free operator product, acting on the last axis."""
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        dim = 1 << self.n
        if amplitudes.shape[-1] != dim:
            raise ValueError(
                f"amplitude axis has length {amplitudes.shape[-1]}, expected {dim}"
            )
        out = np.zeros_like(amplitudes)
        for src, phase in self._action:
            out += phase * amplitudes[..., src]
        return out


def _bit_parity(values: np.ndarray, nbits: int) -> np.ndarray:
    bits = (values[:, None] >> np.arange(nbits)) & 1
    return bits.sum(axis=1) % 2


@dataclass(frozen=True)
class TfimSpec:
    """Ising chain in a transverse field: ``-sum_i Z_i Z_{i+1} - h sum_i X_i``."""

    n: int
    h: float
    boundary: Boundary = Boundary.CLOSED

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"chain needs at least 2 sites, got n={self.n}")
        if not np.isfinite(self.h):
            raise ValueError("transverse field strength must be finite")

    @property
    def coupling_count(self) -> int:
        return self.boundary.coupling_count(self.n)


def build_tfim(spec: TfimSpec) -> PauliSum:
    """Assemble the chain Hamiltonian as a Pauli sum.

    Coupling terms carry coefficient -1, field terms -h; at h = 0 the field
    terms vanish and are dropped.
    """
    terms = []
    for i in range(spec.coupling_count):
        letters = ["I"] * spec.n
        letters[i] = "Z"
        letters[(i + 1) % spec.n] = "Z"
        terms.append(PauliString(-1.0, "".join(letters)))
    for i in range(spec.n):
        letters = ["I"] * spec.n
        letters[i] = "X"
        terms.append(PauliString(-float(spec.h), "".join(letters)))
    return PauliSum(spec.n, tuple(terms))


@functools.lru_cache(maxsize=None)
def exact_ground_energy(spec: TfimSpec) -> float:
    """Smallest eigenvalue of the dense chain Hamiltonian (n <= 12)."""
    dense = build_tfim(spec).to_dense()
    return float(np.linalg.eigvalsh(dense)[0])
