"""Operator construction, matrix-free application, and exact ground energies."""

import time

import numpy as np
import pytest

from hive_vqe.hamiltonian import (
    MAX_DENSE_QUBITS,
    Boundary,
    PauliString,
    PauliSum,
    TfimSpec,
    build_tfim,
    exact_ground_energy,
)

from _oracles import dense_tfim


def test_boundary_parse_and_coupling_count():
    assert Boundary.parse("open") is Boundary.OPEN
    assert Boundary.parse(" Closed ") is Boundary.CLOSED
    assert Boundary.OPEN.coupling_count(5) == 4
    assert Boundary.CLOSED.coupling_count(5) == 5
    with pytest.raises(ValueError, match="boundary"):
        Boundary.parse("ring")


def test_pauli_string_validation():
    with pytest.raises(ValueError):
        PauliString(1.0, "XQ")
    with pytest.raises(ValueError):
        PauliString(float("nan"), "XX")
    s = PauliString(-2.0, "ZIZ")
    assert s.matrix().shape == (8, 8)


def test_pauli_string_matrix_frozen_values():
    # Z on qubit 0 of two: diag(1, 1, -1, -1) with the leftmost-factor convention.
    z0 = PauliString(1.0, "ZI").matrix()
    assert np.array_equal(np.diag(z0), np.array([1, 1, -1, -1], dtype=np.complex128))
    x1 = PauliString(1.0, "IX").matrix()
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 0] = expected[2, 3] = expected[3, 2] = 1.0
    assert np.array_equal(x1, expected.astype(np.complex128))


def test_pauli_sum_drops_zero_terms_and_validates():
    op = PauliSum(2, (PauliString(0.0, "XX"), PauliString(1.5, "ZZ")))
    assert len(op.terms) == 1
    with pytest.raises(ValueError):
        PauliSum(2, (PauliString(1.0, "XXX"),))


def test_apply_matches_dense_matvec():
    rng = np.random.default_rng(11)
    letters = "IXYZ"
    for n in (2, 3, 5):
        terms = []
        for _ in range(6):
            word = "".join(rng.choice(list(letters)) for _ in range(n))
            terms.append(PauliString(float(rng.normal()), word))
        op = PauliSum(n, tuple(terms))
        dense = op.to_dense()
        for _ in range(4):
            vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
            np.testing.assert_allclose(op.apply(vec), dense @ vec, atol=1e-12)


def test_apply_batched_rows():
    rng = np.random.default_rng(3)
    op = build_tfim(TfimSpec(n=3, h=1.1, boundary=Boundary.CLOSED))
    batch = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
    out = op.apply(batch)
    for row_in, row_out in zip(batch, out):
        np.testing.assert_allclose(op.apply(row_in), row_out, atol=1e-13)


def test_build_tfim_term_counts_and_coefficients():
    open_op = build_tfim(TfimSpec(n=4, h=1.1, boundary=Boundary.OPEN))
    closed_op = build_tfim(TfimSpec(n=4, h=1.1, boundary=Boundary.CLOSED))
    assert len(open_op.terms) == 3 + 4
    assert len(closed_op.terms) == 4 + 4
    for term in open_op.terms:
        assert term.coefficient in (-1.0, -1.1)
    zero_field = build_tfim(TfimSpec(n=4, h=0.0, boundary=Boundary.OPEN))
    assert len(zero_field.terms) == 3


def test_build_tfim_matches_dense_reference():
    for boundary in (Boundary.OPEN, Boundary.CLOSED):
        for n in (2, 3, 4):
            ours = build_tfim(TfimSpec(n=n, h=1.1, boundary=boundary)).to_dense()
            ref = dense_tfim(n, 1.1, boundary)
            np.testing.assert_allclose(ours, ref, atol=1e-14)


def test_ground_energy_two_site_closed_form():
    # Single bond plus two fields diagonalizes to -sqrt(1 + 4 h^2).
    start = time.perf_counter()
    value = exact_ground_energy(TfimSpec(n=2, h=1.1, boundary=Boundary.OPEN))
    assert abs(value - (-np.sqrt(5.84))) < 1e-12
    assert time.perf_counter() - start < 1.0


def test_ground_energy_zero_field_is_bond_count():
    for n in range(2, 7):
        open_value = exact_ground_energy(TfimSpec(n=n, h=0.0, boundary=Boundary.OPEN))
        assert open_value == pytest.approx(-(n - 1), abs=1e-12)
    closed_value = exact_ground_energy(TfimSpec(n=4, h=0.0, boundary=Boundary.CLOSED))
    assert closed_value == pytest.approx(-4.0, abs=1e-12)


def test_ground_energy_matches_dense_eigensolver():
    for boundary in (Boundary.OPEN, Boundary.CLOSED):
        value = exact_ground_energy(TfimSpec(n=5, h=1.1, boundary=boundary))
        ref = np.linalg.eigvalsh(dense_tfim(5, 1.1, boundary))[0]
        assert value == pytest.approx(float(ref), abs=1e-12)


def test_dense_size_guard():
    op = build_tfim(TfimSpec(n=MAX_DENSE_QUBITS + 1, h=1.0, boundary=Boundary.OPEN))
    with pytest.raises(ValueError, match="12 qubits"):
        op.to_dense()


def test_spec_validation():
    with pytest.raises(ValueError):
        TfimSpec(n=1, h=1.0, boundary=Boundary.OPEN)
    with pytest.raises(ValueError):
        TfimSpec(n=4, h=float("inf"), boundary=Boundary.OPEN)
