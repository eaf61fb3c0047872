import numpy as np
import pytest

from ctqd import ErrorModel, PulseShape, SPPulsePair, build_hamiltonian
from ctqd.errors import SpecError
from ctqd.pulses import detuning_integral


@pytest.fixture
def pair():
    return SPPulsePair(PulseShape.gaussian(2.381, 1.0), delta=0.2802,
                       theta_s=0.3, theta_p=0.1)


def test_bare_detuning_structure():
    shape = PulseShape.gaussian(0.0, 1.0)  # zero amplitude
    pair = SPPulsePair(shape, delta=0.2802)
    h = build_hamiltonian(pair, ErrorModel(), 1.0)
    assert np.allclose(h, np.diag([0.0, 0.0, 0.2802]))


def test_coupling_magnitudes(pair):
    h = build_hamiltonian(pair, ErrorModel(), 2.0)
    assert abs(h[0, 2]) == pytest.approx(pair.omega_p(2.0), abs=1e-15)
    assert abs(h[1, 2]) == pytest.approx(pair.omega_s(2.0), abs=1e-15)


def test_amplitude_error_scales_stokes_exactly(pair):
    h0 = build_hamiltonian(pair, ErrorModel(), 3.0)
    h1 = build_hamiltonian(pair, ErrorModel(delta_omega_s=0.2), 3.0)
    assert h1[2, 1] == 1.2 * h0[2, 1]
    assert h1[2, 0] == h0[2, 0]


def test_hermitian_exactly(pair):
    for t in np.linspace(0, pair.T, 7):
        h = build_hamiltonian(pair, ErrorModel(stark=0.05, delta_delta=0.1), t)
        assert np.array_equal(h, h.conj().T)


def test_synchronization_ratio_constant(pair):
    ratio = []
    for t in np.linspace(0.5, 5.5, 11):
        h = build_hamiltonian(pair, ErrorModel(), t)
        ratio.append(abs(h[2, 0] / h[2, 1]))
    assert np.allclose(ratio, np.tan(pair.mixing_angle), atol=1e-12)


def test_detuning_error_and_stark(pair):
    h = build_hamiltonian(pair, ErrorModel(delta_delta=0.5, stark=0.1), 1.0)
    assert h[2, 2] == pytest.approx(1.5 * 0.2802 + 0.1)


def test_duration_dilation(pair):
    err = ErrorModel(delta_t=0.25)
    assert pair.duration(err) == pytest.approx(1.25 * pair.T)
    # envelope value at the dilated peak equals the nominal peak value
    assert pair.omega_s(3.0 * 1.25, err) == pytest.approx(pair.omega_s(3.0), abs=1e-12)


def test_theta_sp(pair):
    assert pair.theta_sp == pytest.approx(0.2)
    moved = pair.with_phases(1.0, 0.25)
    assert moved.theta_sp == pytest.approx(0.75)
    assert moved.shape is pair.shape


def test_error_model_validation():
    with pytest.raises(SpecError):
        ErrorModel(delta_omega_s=np.inf)
    with pytest.raises(SpecError):
        ErrorModel(delta_t=-1.0)
    assert ErrorModel().is_nominal()


def test_detuning_integral_constant(pair):
    assert detuning_integral(pair) == pytest.approx(0.2802 * 6.0)
    err = ErrorModel(delta_delta=0.1, delta_t=0.5)
    assert detuning_integral(pair, err) == pytest.approx(1.1 * 0.2802 * 9.0)


def test_time_dependent_detuning_hook():
    shape = PulseShape.gaussian(1.0, 1.0)
    pair = SPPulsePair(shape, delta=0.0, delta_of_t=lambda t: 0.5 * np.ones_like(t))
    assert detuning_integral(pair) == pytest.approx(0.5 * 6.0, rel=1e-6)
    h = build_hamiltonian(pair, ErrorModel(), 1.0)
    assert h[2, 2] == pytest.approx(0.5)


def test_pair_dict_round_trip(pair):
    clone = SPPulsePair.from_dict(pair.to_dict())
    assert clone.theta_s == pair.theta_s
    assert clone.theta_p == pair.theta_p
    assert clone.delta == pair.delta
    assert clone.shape == pair.shape
