"""Synchronized Stokes/pump pulse pairs and systematic-error injection.

The three-level system uses basis ordering {|g>, |f>, |e>} with the
pump coupling |g><->|e> and the Stokes coupling |f><->|e>.  The
instantaneous Hamiltonian (hbar = 1, rates in units of Omega_0) is

    H(t) = Delta |e><e| + Omega_p(t) e^{i theta_p} |e><g|
                        + Omega_s(t) e^{i theta_s} |e><f| + h.c.

Phase convention: the constant pulse phases multiply the *emission*
components |e><g|, |e><f|.  This is the convention under which the
published phase-difference relations of the concatenated design
(pi - 2 alpha and its higher-level analogues) hold literally; putting
the phases on the absorption components instead flips the sign of every
designed phase difference.

Both pulses share one envelope: Omega_p(t)/Omega_s(t) = tan(phi) is
constant in time (synchronization), which is what decouples the dark
state exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecError
from .shapes import PulseShape, eval_shape, shape_from_dict, shape_to_dict


@dataclass(frozen=True)
class ErrorModel:
    """Static systematic deviations of the drive.

    delta_omega_s, delta_omega_p
        Multiplicative amplitude errors on the Stokes / pump envelope.
    delta_delta
        Multiplicative detuning error.
    delta_t
        Multiplicative duration error: the time axis of the pair window
        dilates by (1 + delta_t) (clock miscalibration; envelope values
        and phases untouched).
    stark
        Additive constant shift of the |e> level, units Omega_0.
    """

    delta_omega_s: float = 0.0
    delta_omega_p: float = 0.0
    delta_delta: float = 0.0
    delta_t: float = 0.0
    stark: float = 0.0

    def __post_init__(self):
        vals = (self.delta_omega_s, self.delta_omega_p, self.delta_delta,
                self.delta_t, self.stark)
        if not all(np.isfinite(v) for v in vals):
            raise SpecError("error-model deviations must be finite")
        if self.delta_t <= -1.0:
            raise SpecError("duration error must keep the window positive")

    def is_nominal(self) -> bool:
        return self == ErrorModel()


NOMINAL = ErrorModel()


@dataclass(frozen=True)
class SPPulsePair:
    """One synchronized Stokes+pump pulse pair.

    Fields
    ------
    shape
        Stokes envelope; the pump envelope is tan(mixing_angle) times it.
    omega0
        Frequency unit (rad/time).  All internal rates are expressed in
        units of omega0, so it only scales reported times/rates.
    mixing_angle
        Constant phi with tan(phi) = Omega_p/Omega_s.
    theta_s, theta_p
        Constant Stokes / pump phases (rad).
    delta
        Detuning of |e>, units omega0, constant in time by default;
        pass ``delta_of_t`` to make it time-dependent (unused by the
        published designs).
    """

    shape: PulseShape
    omega0: float = 1.0
    mixing_angle: float = np.pi / 4
    theta_s: float = 0.0
    theta_p: float = 0.0
    delta: float = 0.0
    delta_of_t: callable = None

    def __post_init__(self):
        if not (0.0 <= self.mixing_angle < np.pi / 2):
            raise SpecError("mixing angle must lie in [0, pi/2)")

    @property
    def T(self) -> float:
        """Nominal pair duration, units 1/omega0."""
        return self.shape.T

    @property
    def theta_sp(self) -> float:
        """Stokes-pump phase difference theta_s - theta_p."""
        return self.theta_s - self.theta_p

    def duration(self, err: ErrorModel = NOMINAL) -> float:
        return self.T * (1.0 + err.delta_t)

    def omega_s(self, t, err: ErrorModel = NOMINAL):
        """Stokes rate at time(s) t within the (possibly dilated) window."""
        scale = 1.0 + err.delta_t
        return (1.0 + err.delta_omega_s) * eval_shape(self.shape, np.asarray(t) / scale)

    def omega_p(self, t, err: ErrorModel = NOMINAL):
        scale = 1.0 + err.delta_t
        return (1.0 + err.delta_omega_p) * np.tan(self.mixing_angle) * eval_shape(
            self.shape, np.asarray(t) / scale
        )

    def detuning(self, t, err: ErrorModel = NOMINAL):
        base = self.delta_of_t(t) if self.delta_of_t is not None else self.delta
        return (1.0 + err.delta_delta) * base + err.stark

    def with_phases(self, theta_s: float, theta_p: float) -> "SPPulsePair":
        return SPPulsePair(self.shape, self.omega0, self.mixing_angle,
                           theta_s, theta_p, self.delta, self.delta_of_t)

    def to_dict(self) -> dict:
        return {
            "shape": shape_to_dict(self.shape),
            "omega0": self.omega0,
            "mixing_angle": self.mixing_angle,
            "theta_s": self.theta_s,
            "theta_p": self.theta_p,
            "delta": self.delta,
            "T": self.T,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SPPulsePair":
        return cls(
            shape=shape_from_dict(d["shape"]),
            omega0=d.get("omega0", 1.0),
            mixing_angle=d.get("mixing_angle", np.pi / 4),
            theta_s=d.get("theta_s", 0.0),
            theta_p=d.get("theta_p", 0.0),
            delta=d.get("delta", 0.0),
        )


def build_hamiltonian(pair: SPPulsePair, err: ErrorModel, t) -> np.ndarray:
    """Instantaneous 3x3 Hamiltonian at time t within the pair window.

    Parameters
    ----------
    pair : SPPulsePair
    err : ErrorModel
        Applied as Omega_s -> (1+delta_omega_s) Omega_s,
        Omega_p -> (1+delta_omega_p) Omega_p,
        Delta -> (1+delta_delta) Delta + stark, window -> (1+delta_t) T.
    t : float
        0 <= t <= pair.duration(err).

    Returns
    -------
    numpy.ndarray
        Hermitian by construction (upper triangle mirrors the conjugated
        lower triangle exactly).
    """
    if t < 0 or t > pair.duration(err) * (1 + 1e-12):
        raise DomainError("time outside the pair window")
    h = np.zeros((3, 3), dtype=complex)
    wp = pair.omega_p(t, err) * np.exp(1j * pair.theta_p)
    ws = pair.omega_s(t, err) * np.exp(1j * pair.theta_s)
    h[2, 0] = wp
    h[0, 2] = np.conj(wp)
    h[2, 1] = ws
    h[1, 2] = np.conj(ws)
    h[2, 2] = pair.detuning(t, err)
    return h


def detuning_integral(pair: SPPulsePair, err: ErrorModel = NOMINAL) -> float:
    """Integral of the (erred) detuning over the pair window.

    Constant detuning integrates exactly; a time-dependent profile is
    integrated with a fixed 512-node midpoint rule.
    """
    T = pair.duration(err)
    if pair.delta_of_t is None:
        return ((1.0 + err.delta_delta) * pair.delta + err.stark) * T
    n = 512
    ts = (np.arange(n) + 0.5) * (T / n)
    return float(np.sum(pair.detuning(ts, err)) * (T / n))
