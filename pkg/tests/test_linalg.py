import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctqd import bloch_rotation, compose, fidelity, mat_exp
from ctqd.errors import (DimensionError, InvalidMatrixError,
                         NormalizationError)
from ctqd.linalg import (SIGMA_X, SIGMA_Z, is_unitary, unitarity_defect,
                         wrap_phase)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


class TestMatExp:
    def test_zero_generator(self):
        assert np.allclose(mat_exp(np.zeros((3, 3)), 1.0), np.eye(3), atol=1e-15)

    def test_half_period_pauli_x(self):
        assert np.allclose(mat_exp(SIGMA_X, np.pi / 2), -1j * SIGMA_X, atol=1e-14)

    def test_diagonal_scalar_exponentials(self):
        delta = 0.2802
        u = mat_exp(np.diag([delta, 0.0, 0.0]), 1.0)
        assert np.allclose(np.diag(u), [np.exp(-1j * delta), 1.0, 1.0], atol=1e-14)
        assert np.allclose(u, np.diag(np.diag(u)))

    def test_rejects_nonfinite(self):
        bad = np.array([[np.nan, 0], [0, 1]], dtype=complex)
        with pytest.raises(InvalidMatrixError):
            mat_exp(bad, 1.0)

    def test_rejects_bad_shape(self):
        with pytest.raises(InvalidMatrixError):
            mat_exp(np.eye(4), 1.0)

    def test_non_hermitian_falls_back(self):
        a = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        u = mat_exp(a, 1.0)
        assert np.allclose(u, np.array([[1.0, -1j], [0.0, 1.0]]), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([2, 3]),
           st.floats(-5.0, 5.0))
    def test_unitarity_property(self, seed, dim, t):
        h = random_hermitian(np.random.default_rng(seed), dim)
        assert unitarity_defect(mat_exp(h, t)) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
    def test_group_property(self, seed, t1, t2):
        h = random_hermitian(np.random.default_rng(seed), 3)
        combined = compose(mat_exp(h, t2), mat_exp(h, t1))
        assert np.max(np.abs(combined - mat_exp(h, t1 + t2))) < 1e-10


class TestCompose:
    def test_identity(self):
        rng = np.random.default_rng(1)
        u = mat_exp(random_hermitian(rng, 3), 0.7)
        assert np.allclose(compose(np.eye(3), u), u)

    def test_inverse(self):
        rng = np.random.default_rng(2)
        u = mat_exp(random_hermitian(rng, 3), 1.3)
        assert np.max(np.abs(compose(u.conj().T, u) - np.eye(3))) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            compose(np.eye(2), np.eye(3))


class TestFidelity:
    def test_self_overlap(self):
        psi = np.array([1, 1j, 0]) / np.sqrt(2)
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        g = np.array([1, 0, 0], dtype=complex)
        f = np.array([0, 1, 0], dtype=complex)
        assert fidelity(g, f) == 0.0

    def test_half_overlap(self):
        g = np.array([1, 0], dtype=complex)
        plus = np.array([1, 1]) / np.sqrt(2)
        assert fidelity(plus, g) == pytest.approx(0.5, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)

    def test_unnormalized_rejected(self):
        with pytest.raises(NormalizationError):
            fidelity(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


class TestBlochRotation:
    def test_zero_angle(self):
        assert np.allclose(bloch_rotation([0, 0, 1.0], 0.0), np.eye(2))

    def test_quarter_turn_z(self):
        assert np.allclose(bloch_rotation([0, 0, 1.0], np.pi / 2),
                           -1j * SIGMA_Z, atol=1e-15)

    def test_half_turn_any_axis_is_minus_identity(self):
        n = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        assert np.allclose(bloch_rotation(n, np.pi), -np.eye(2), atol=1e-14)

    def test_unitary_det_one(self):
        n = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2)
        u = bloch_rotation(n, 0.37)
        assert is_unitary(u, 1e-13)
        assert np.linalg.det(u) == pytest.approx(1.0, abs=1e-13)

    def test_unnormalized_axis_rejected(self):
        with pytest.raises(NormalizationError):
            bloch_rotation([0.0, 0.0, 1.1], 0.5)


@given(st.floats(-50.0, 50.0))
def test_wrap_phase_range(x):
    y = wrap_phase(x)
    assert -np.pi < y <= np.pi
    assert abs(np.exp(1j * y) - np.exp(1j * x)) < 1e-9
