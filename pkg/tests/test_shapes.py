import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctqd import PulseShape, eval_shape
from ctqd.errors import DomainError, SpecError
from tests.conftest import SHAPE_PARAMS


def test_triangle_peak_value():
    shape = PulseShape.triangle(3.884, 0.5, 1.0)
    assert eval_shape(shape, 0.5) == pytest.approx(3.884, abs=1e-12)


def test_sawtooth_starts_at_zero_ends_at_peak():
    shape = PulseShape.sawtooth(3.935, 1.0)
    assert eval_shape(shape, 0.0) == 0.0
    assert eval_shape(shape, 1.0) == pytest.approx(3.935)


def test_trapezoid_plateau():
    # tau2 <= tau1 reads as the plateau duration: plateau on [0.2, 0.4]
    shape = PulseShape.trapezoidal(3.249, 0.2, 0.2, 1.0)
    for t in (0.25, 0.3, 0.39):
        assert eval_shape(shape, t) == pytest.approx(3.249, abs=1e-12)
    assert eval_shape(shape, 0.1) == pytest.approx(3.249 / 2)
    assert eval_shape(shape, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_trapezoid_endpoint_reading():
    # tau2 > tau1 is the plateau end moment directly
    shape = PulseShape.trapezoidal(1.0, 0.2, 0.6, 1.0)
    assert eval_shape(shape, 0.5) == pytest.approx(1.0)
    assert eval_shape(shape, 0.8) == pytest.approx(0.5)


def test_gaussian_peak_at_center():
    shape = PulseShape.gaussian(2.381, 1.0)
    assert shape.T == 6.0
    ts = np.linspace(0, 6, 601)
    vals = eval_shape(shape, ts)
    assert ts[np.argmax(vals)] == pytest.approx(3.0)
    assert np.max(vals) == pytest.approx(2.381)


def test_sinusoidal_phase_offset():
    shape = PulseShape.sinusoidal(2.0, 1.0, 0.3)
    assert eval_shape(shape, 0.0) == pytest.approx(2.0 * np.sin(0.3))


def test_domain_error():
    shape = PulseShape.sawtooth(1.0, 1.0)
    with pytest.raises(DomainError):
        eval_shape(shape, 1.5)
    with pytest.raises(DomainError):
        eval_shape(shape, -0.2)


@pytest.mark.parametrize("name", sorted(SHAPE_PARAMS))
def test_continuity_at_knots(name):
    shape = SHAPE_PARAMS[name]["shape"]
    eps = 1e-9
    knots = {"triangle": [shape.tau], "trapezoidal": [shape.tau1, shape.tau1 + shape.tau2]}
    for knot in knots.get(name, []):
        left = eval_shape(shape, knot - eps)
        right = eval_shape(shape, knot + eps)
        assert abs(left - right) < 1e-6  # linear pieces: jump scales with eps
    ts = np.linspace(0, shape.T, 2001)
    vals = eval_shape(shape, ts)
    max_step = np.max(np.abs(np.diff(vals)))
    slope_bound = 25.0 * shape.A * (ts[1] - ts[0])
    assert max_step < slope_bound


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(SHAPE_PARAMS)), st.floats(0.0, 1.0))
def test_nonnegative_and_finite(name, frac):
    shape = SHAPE_PARAMS[name]["shape"]
    v = eval_shape(shape, frac * shape.T)
    assert np.isfinite(v) and v >= 0.0


def test_sampled_shape_and_csv(tmp_path):
    pts = [(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]
    shape = PulseShape.sampled(pts, A=2.0)
    assert eval_shape(shape, 0.25) == pytest.approx(1.0)
    assert eval_shape(shape, 0.5) == pytest.approx(2.0)
    path = tmp_path / "table.csv"
    path.write_text("# test table\nt,value\n0.0,0.0\n0.5,1.0\n1.0,0.0\n")
    loaded = PulseShape.sampled_from_csv(path, A=2.0)
    ts = np.linspace(0, 1, 11)
    assert np.allclose(eval_shape(loaded, ts), eval_shape(shape, ts))


def test_sampled_validation():
    with pytest.raises(SpecError):
        PulseShape.sampled([(0.0, 1.0)])
    with pytest.raises(SpecError):
        PulseShape.sampled([(0.0, 1.0), (0.0, 2.0)])
    with pytest.raises(SpecError):
        PulseShape.sampled([(0.1, 1.0), (0.5, 2.0)])
    with pytest.raises(SpecError):
        PulseShape.sampled([(0.0, 1.0), (0.5, -2.0)])


def test_shape_dict_round_trip():
    from ctqd.shapes import shape_from_dict, shape_to_dict

    for name in SHAPE_PARAMS:
        shape = SHAPE_PARAMS[name]["shape"]
        clone = shape_from_dict(shape_to_dict(shape))
        ts = np.linspace(0, shape.T, 17)
        assert np.array_equal(eval_shape(clone, ts), eval_shape(shape, ts))
