# python -m pytest experiments/test_hilbert.py
import numpy as np
import pytest

from core.config import TWO_PI
from core.errors import InvalidDimensionError, InvalidParameterError, NumericalConsistencyError
from core.hilbert import (
    HilbertLayout,
    QuantumState,
    annihilation,
    basis_state,
    bose_occupation,
    check_fock_cutoff,
    embed,
    expectation,
    fock_diagonal_state,
    number_op,
    partial_trace,
    product_state,
    qutrit_ops,
    thermal_populations,
    thermal_state,
    validate_state,
)

QUBIT_W = TWO_PI * 5.06881e9
PHONON_W = TWO_PI * 5.04863e9


class TestOperators:
    def test_two_level_annihilation(self):
        np.testing.assert_array_equal(annihilation(2), np.array([[0, 1], [0, 0]], dtype=complex))

    def test_number_operator_diagonal(self):
        np.testing.assert_allclose(np.diag(number_op(4)).real, [0, 1, 2, 3])

    def test_truncated_commutator(self):
        a = annihilation(5)
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(5)
        expected[4, 4] = -4.0
        np.testing.assert_allclose(comm, expected, atol=1e-14)

    def test_dimension_below_two_rejected(self):
        with pytest.raises(InvalidDimensionError):
            annihilation(1)

    def test_qutrit_ladder(self):
        q = qutrit_ops()
        e = np.array([0, 1, 0], dtype=complex)
        np.testing.assert_allclose(q.sigma_ge @ e, [1, 0, 0])
        np.testing.assert_allclose(q.proj_g + q.proj_e + q.proj_f, np.eye(3))
        np.testing.assert_allclose(q.sigma_ef @ q.sigma_ge, np.zeros((3, 3)))


class TestEmbed:
    layout = HilbertLayout()

    def test_identity_embeds_to_identity(self):
        np.testing.assert_allclose(embed(np.eye(3), "qubit", self.layout), np.eye(15))

    def test_disjoint_slots_commute_exactly(self):
        q = qutrit_ops()
        A = embed(q.sigma_ge, "qubit", self.layout)
        B = embed(annihilation(5), "phonon", self.layout)
        assert np.array_equal(A @ B - B @ A, np.zeros((15, 15), dtype=complex))

    def test_expectation_matches_subsystem(self):
        q = qutrit_ops()
        qubit = thermal_state(QUBIT_W, 0.04, 3)
        phonon = thermal_state(PHONON_W, 0.04, 5)
        joint = product_state(qubit, phonon)
        full = expectation(embed(q.proj_e, "qubit", self.layout), joint)
        assert full == pytest.approx(expectation(q.proj_e, qubit), rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            embed(np.eye(4), "qubit", self.layout)

    def test_partial_trace_recovers_factor(self):
        qubit = thermal_state(QUBIT_W, 0.04, 3)
        phonon = fock_diagonal_state([0.9, 0.1], 5)
        joint = product_state(qubit, phonon)
        np.testing.assert_allclose(partial_trace(joint, 0), qubit.density, atol=1e-15)
        np.testing.assert_allclose(partial_trace(joint, 1), phonon.density, atol=1e-15)


class TestStates:
    def test_zero_temperature_is_ground(self):
        np.testing.assert_array_equal(thermal_populations(QUBIT_W, 0.0, 3), [1.0, 0.0, 0.0])

    def test_ten_millikelvin_first_level(self):
        pops = thermal_populations(PHONON_W, 0.01, 5)
        assert pops[1] == pytest.approx(3.0e-11, rel=0.05)

    def test_qubit_at_forty_millikelvin(self):
        pops = thermal_populations(QUBIT_W, 0.04, 3)
        assert pops[1] == pytest.approx(2.28e-3, rel=0.02)
        assert np.all(np.diff(pops) < 0)

    def test_negative_temperature_rejected(self):
        with pytest.raises(InvalidParameterError):
            thermal_state(QUBIT_W, -0.01, 3)

    def test_truncated_occupation_matches_bose(self):
        state = thermal_state(PHONON_W, 0.04, 5)
        n = expectation(number_op(5), state)
        assert n == pytest.approx(bose_occupation(PHONON_W, 0.04), rel=1e-6)
        assert n == pytest.approx(2.346e-3, rel=5e-3)

    def test_state_is_read_only(self):
        state = basis_state(1, 3)
        with pytest.raises(ValueError):
            state.density[0, 0] = 1.0

    def test_dims_must_match(self):
        with pytest.raises(InvalidDimensionError):
            QuantumState(np.eye(4) / 4, (3,))


class TestValidation:
    def test_thermal_state_passes(self):
        validate_state(product_state(thermal_state(QUBIT_W, 0.04, 3), thermal_state(PHONON_W, 0.01, 5)))

    def test_trace_violation(self):
        with pytest.raises(NumericalConsistencyError):
            validate_state(QuantumState(np.diag([0.5, 0.4]).astype(complex), check=False))

    def test_negative_eigenvalue(self):
        with pytest.raises(NumericalConsistencyError):
            validate_state(QuantumState(np.diag([1.1, -0.1]).astype(complex), check=False))

    @pytest.mark.parametrize(
        "rho",
        [
            np.diag([0.5, 0.2]),                      # trace 0.7
            np.diag([1.1, -0.1]),                     # 음의 고유값
            np.array([[0.5, 0.3], [0.1, 0.5]]),       # 비 Hermitian
        ],
    )
    def test_constructor_rejects_unphysical(self, rho):
        with pytest.raises(NumericalConsistencyError):
            QuantumState(rho.astype(complex))

    def test_unchecked_state_skips_validation(self):
        state = QuantumState(np.diag([0.5, 0.2]).astype(complex), check=False)
        assert np.trace(state.density).real == pytest.approx(0.7)

    @pytest.mark.parametrize("pops", [[0.3], [0.9, 0.2], [0.5, 0.4, 0.05]])
    def test_fock_diagonal_needs_unit_sum(self, pops):
        with pytest.raises(InvalidParameterError):
            fock_diagonal_state(pops, 4)

    def test_product_of_valid_states_is_valid(self):
        state = product_state(basis_state(1, 3), fock_diagonal_state([0.7, 0.3], 4))
        assert state.dims == (3, 4)
        assert np.trace(state.density).real == pytest.approx(1.0, abs=1e-12)

    def test_thermal_state_is_valid(self):
        state = thermal_state(QUBIT_W, 0.2, 3)
        assert np.trace(state.density).real == pytest.approx(1.0, abs=1e-12)
        assert state.populations().min() > 0

    def test_imaginary_expectation(self):
        with pytest.raises(NumericalConsistencyError):
            expectation(1j * np.eye(2), basis_state(0, 2))

    def test_fock_cutoff_guard(self):
        layout = HilbertLayout()
        ok = product_state(basis_state(0, 3), fock_diagonal_state([0.99, 0.01], 5))
        check_fock_cutoff(ok)
        bad = product_state(basis_state(0, 3), fock_diagonal_state([0.9, 0, 0, 0, 0.1], layout.fock_cutoff))
        with pytest.raises(NumericalConsistencyError):
            check_fock_cutoff(bad)
