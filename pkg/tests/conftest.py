import numpy as np
import pytest

from ctqd import PulseShape, SPPulsePair, characterize_pair

# published gate parameter sets (Gaussian pulses, tau = 1, T = 6)
GATE_PARAMS = {
    "2x1": dict(A=1.099, delta=0.6574, alpha=1.1868, base=1.5708),
    "4x3": dict(A=2.381, delta=0.2802, alpha=0.4479, base=0.5237),
    "4x5": dict(A=2.381, delta=0.2802, alpha=0.4479, base=-0.9425),
    "8x1": dict(A=1.1299, delta=0.164, alpha=0.2957, base=1.5708),
    "8x5": dict(A=1.1299, delta=0.164, alpha=0.2957, base=-0.9425),
}

# two-pair demonstration parameters per pulse shape (T = 1 unless noted)
SHAPE_PARAMS = {
    "gaussian": dict(shape=PulseShape.gaussian(1.099, 1.0), delta=0.6574),
    "sinusoidal": dict(shape=PulseShape.sinusoidal(3.044, 1.0, 0.0), delta=1.98),
    "sawtooth": dict(shape=PulseShape.sawtooth(3.935, 1.0), delta=1.865),
    "triangle": dict(shape=PulseShape.triangle(3.884, 0.5, 1.0), delta=2.18),
    "trapezoidal": dict(shape=PulseShape.trapezoidal(3.249, 0.2, 0.2, 1.0), delta=2.04),
}

# published second-concatenation phase differences (numeric solutions)
LEVEL2_TABLE = {
    4: [-0.9750, 2.1678, -0.9744],
    5: [4.8034, -2.2925, 0.3437, -0.4690],
    6: [5.0645, -4.4539, -1.3636, 1.8294, -1.2188],
    7: [-0.7739, -3.8410, 0.2731, 0.2287, 2.6760, -0.8487],
    8: [-1.1366, 1.8387, -2.0145, -3.3636, 4.2688, -4.4445, 5.1465],
}

# published third-concatenation rows; printed values are these exact
# fractions to 4-5 significant digits
PC_TABLE = {
    3: [2 * np.pi / 3, 0.0],
    5: [4 * np.pi / 5, 0.0, 2 * np.pi / 5, 0.0],
    7: [6 * np.pi / 7, 0.0, 4 * np.pi / 7, 0.0, 2 * np.pi / 7, 0.0],
}
PC_TABLE_PRINTED = {
    3: [2.0944, 0.0],
    5: [2.5133, 0.0, 1.2566, 0.0],
    7: [2.6928, 0.0, 1.7952, 0.0, 0.8976, 0.0],
}
FC_TABLE_PRINTED = {
    3: [2.3562, 0.0],
    5: [1.5708, 2.3562, -1.5708, -1.5708],
    7: [3.1416, -2.3886, 0.0097, 2.6366, -0.0096, -1.8235],
}


def gate_pair(key: str) -> SPPulsePair:
    p = GATE_PARAMS[key]
    return SPPulsePair(PulseShape.gaussian(p["A"], 1.0), delta=p["delta"])


@pytest.fixture(scope="session")
def pair_4x3():
    return gate_pair("4x3")


@pytest.fixture(scope="session")
def char_4x3(pair_4x3):
    return characterize_pair(pair_4x3)
