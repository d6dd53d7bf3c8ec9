"""
Tests for the two-mode Fock basis, states, operators and gamma coefficients
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonics.exceptions import (
    BasisError,
    DensityMatrixError,
    IndexRangeError,
    InvalidStateError,
    PhotonicsError,
)
from photonics.fock import (
    BasisState,
    DensityMatrix,
    FockBasis,
    FockOperator,
    dyad_sum,
    expectation,
    gamma_coefficient,
    gamma_squared_exact,
    log_binomial,
    log_factorial,
    make_mm_state,
    make_noon_state,
)


@st.composite
def gamma_indices(draw, max_m=30):
    m = draw(st.integers(min_value=1, max_value=max_m))
    m_prime = draw(st.integers(min_value=0, max_value=m - 1))
    k = draw(st.integers(min_value=0, max_value=m))
    l = draw(st.integers(min_value=0, max_value=m_prime))
    return m, m_prime, k, l


class TestFockBasis:
    def test_row_major_index(self):
        basis = FockBasis(2)
        assert basis.dim == 9
        assert basis.index(BasisState(0, 0)) == 0
        assert basis.index(BasisState(1, 2)) == 5
        assert basis.index(BasisState(2, 2)) == 8

    def test_index_round_trips_through_state(self):
        basis = FockBasis(3)
        assert [basis.index(s) for s in basis.states()] == list(range(basis.dim))

    def test_state_outside_truncation(self):
        with pytest.raises(BasisError):
            FockBasis(2).index(BasisState(3, 0))

    def test_negative_photon_numbers_rejected(self):
        with pytest.raises(InvalidStateError):
            BasisState(-1, 0)

    def test_basis_state_str(self):
        assert str(BasisState(3, 1)) == "|3,1>"
        assert BasisState(3, 1).swapped() == BasisState(1, 3)


class TestStates:
    def test_mm_state_support(self):
        state = make_mm_state(2, 1)
        support = state.support()
        assert set(support) == {BasisState(2, 1), BasisState(1, 2)}
        for amplitude in support.values():
            assert amplitude == pytest.approx(1 / math.sqrt(2))

    def test_noon_state_is_mm_with_zero(self):
        noon = make_noon_state(4)
        assert noon.amplitude(BasisState(4, 0)) == pytest.approx(1 / math.sqrt(2))
        assert noon.amplitude(BasisState(0, 4)) == pytest.approx(1 / math.sqrt(2))

    def test_larger_basis_keeps_norm(self):
        state = make_mm_state(3, 1, FockBasis(5))
        assert np.vdot(state.amplitudes, state.amplitudes).real == pytest.approx(1.0)

    @pytest.mark.parametrize("m, m_prime", [(1, 1), (2, 3), (3, -1)])
    def test_invalid_ordering(self, m, m_prime):
        with pytest.raises(InvalidStateError):
            make_mm_state(m, m_prime)

    def test_basis_overflow(self):
        with pytest.raises(BasisError):
            make_mm_state(4, 1, FockBasis(3))

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            make_mm_state(1, 1)
        assert issubclass(InvalidStateError, PhotonicsError)

    def test_amplitudes_are_read_only(self):
        state = make_mm_state(2, 0)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_projector_is_valid_pure_density_matrix(self):
        rho = make_mm_state(3, 1).projector().validate()
        assert rho.rank == 1
        assert rho.trace == pytest.approx(1.0)


class TestGamma:
    def test_known_value(self):
        # C(3,1) C(1,0) / 2
        assert gamma_squared_exact(3, 1, 1, 0) == Fraction(3, 2)
        assert gamma_coefficient(3, 1, 1, 0) == pytest.approx(math.sqrt(1.5), rel=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(gamma_indices())
    def test_exact_square_is_binomial_product(self, indices):
        m, m_prime, k, l = indices
        expected = Fraction(math.comb(m, k) * math.comb(m_prime, l), 2)
        assert gamma_squared_exact(m, m_prime, k, l) == expected

    @settings(max_examples=200, deadline=None)
    @given(gamma_indices())
    def test_log_domain_matches_exact(self, indices):
        m, m_prime, k, l = indices
        exact = float(gamma_squared_exact(m, m_prime, k, l))
        assert gamma_coefficient(m, m_prime, k, l) ** 2 == pytest.approx(exact, rel=1e-12)

    @pytest.mark.parametrize("k, l", [(-1, 0), (5, 0), (0, 2)])
    def test_index_range(self, k, l):
        with pytest.raises(IndexRangeError):
            gamma_coefficient(4, 1, k, l)

    def test_log_factorial(self):
        assert log_factorial(0) == 0.0
        assert log_factorial(10) == pytest.approx(math.log(3628800))
        assert log_binomial(30, 15) == pytest.approx(math.log(math.comb(30, 15)))
        with pytest.raises(IndexRangeError):
            log_factorial(-1)


class TestOperators:
    def test_coincident_dyads_add(self):
        basis = FockBasis(1)
        ket, bra = BasisState(1, 0), BasisState(0, 1)
        op = dyad_sum([(ket, bra, 1.0), (ket, bra, 2.0)], basis)
        assert op.entry(ket, bra) == 3.0
        assert op.nonzero_count() == 1

    def test_dyad_outside_basis(self):
        with pytest.raises(BasisError):
            dyad_sum([(BasisState(2, 0), BasisState(0, 0), 1.0)], FockBasis(1))

    def test_hermitian_flag_checked(self):
        basis = FockBasis(1)
        with pytest.raises(BasisError):
            dyad_sum([(BasisState(1, 0), BasisState(0, 1), 1.0)], basis, hermitian=True)

    def test_squared_and_dagger(self):
        basis = FockBasis(1)
        op = dyad_sum([(BasisState(1, 0), BasisState(0, 1), 1j)], basis, label="X")
        assert op.dagger().entry(BasisState(0, 1), BasisState(1, 0)) == -1j
        assert op.squared().nonzero_count() == 0
        assert op.squared().label == "(X)^2"

    def test_expectation_of_identity_is_trace(self):
        rho = make_mm_state(2, 1).projector()
        assert expectation(FockOperator.identity(rho.basis), rho) == pytest.approx(1.0)

    def test_expectation_basis_mismatch(self):
        rho = make_mm_state(2, 1).projector()
        with pytest.raises(BasisError):
            expectation(FockOperator.identity(FockBasis(3)), rho)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(min_value=-2, max_value=2, allow_nan=False),
        st.floats(min_value=-2, max_value=2, allow_nan=False),
    )
    def test_expectation_is_linear(self, alpha, beta):
        basis = FockBasis(2)
        rho = make_mm_state(2, 1).projector()
        first = FockOperator.projector(basis, BasisState(2, 1))
        second = dyad_sum([(BasisState(1, 2), BasisState(2, 1), 1.0)], basis)
        combined = FockOperator(basis, alpha * first.matrix + beta * second.matrix)
        expected = alpha * expectation(first, rho) + beta * expectation(second, rho)
        assert expectation(combined, rho) == pytest.approx(expected, abs=1e-12)


class TestDensityMatrix:
    def test_validate_rejects_bad_trace(self):
        basis = FockBasis(1)
        with pytest.raises(DensityMatrixError):
            DensityMatrix(basis, 2 * np.eye(basis.dim) / basis.dim).validate()

    def test_validate_rejects_negative_eigenvalue(self):
        basis = FockBasis(1)
        matrix = np.diag([1.5, -0.5, 0.0, 0.0])
        with pytest.raises(DensityMatrixError):
            DensityMatrix(basis, matrix).validate()

    def test_validate_rejects_non_hermitian(self):
        basis = FockBasis(1)
        matrix = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
        matrix[0, 1] = 0.1
        with pytest.raises(DensityMatrixError):
            DensityMatrix(basis, matrix).validate()

    def test_to_records(self):
        rho = make_noon_state(1).projector()
        records = rho.to_records()
        assert len(records) == 4
        assert {tuple(r["ket"]) for r in records} == {(1, 0), (0, 1)}
        assert all(r["re"] == pytest.approx(0.5) and r["im"] == 0.0 for r in records)
