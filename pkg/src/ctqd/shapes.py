"""Pulse-envelope catalog.

Every shape evaluates the dimensionless Stokes envelope Omega_s(t)/Omega_0
on its window [0, T] (times in units of 1/Omega_0) and is continuous on
the window.  Supported kinds:

================  =============================================================
gaussian          A exp(-(t - 3 tau)^2 / tau^2), window T = 6 tau, peak at 3 tau
sinusoidal        A |sin(pi t / T + tau)|        (tau is a phase offset)
sawtooth          A t / T
triangle          rise to A at t = tau, linear fall to 0 at T
trapezoidal       rise on [0, tau1], plateau, linear fall to 0 at T
sampled           two-column table (time, amplitude), linear interpolation
================  =============================================================

The trapezoid's second parameter is nominally the end moment of the
plateau; published parameter sets use tau2 <= tau1 where that reading
leaves no plateau at all, so in that case tau2 is interpreted as the
plateau duration (plateau = [tau1, tau1 + tau2]), which is also the only
reading that keeps the tabulated fall-segment slope A/(tau1 + tau2 - T)
continuous.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SpecError

KINDS = ("gaussian", "sinusoidal", "sawtooth", "triangle", "trapezoidal", "sampled")


@dataclass(frozen=True)
class PulseShape:
    """Envelope description; construct via the classmethods below."""

    kind: str
    A: float
    T: float
    tau: float = 0.0
    tau1: float = 0.0
    tau2: float = 0.0
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown shape kind {self.kind!r}")
        if self.T <= 0 or not np.isfinite(self.T):
            raise SpecError("shape duration must be positive and finite")

    @classmethod
    def gaussian(cls, A: float, tau: float = 1.0) -> "PulseShape":
        """Gaussian bell of width tau centered at 3 tau; window [0, 6 tau]."""
        return cls("gaussian", A=A, T=6.0 * tau, tau=tau)

    @classmethod
    def sinusoidal(cls, A: float, T: float = 1.0, tau: float = 0.0) -> "PulseShape":
        return cls("sinusoidal", A=A, T=T, tau=tau)

    @classmethod
    def sawtooth(cls, A: float, T: float = 1.0) -> "PulseShape":
        return cls("sawtooth", A=A, T=T)

    @classmethod
    def triangle(cls, A: float, tau: float, T: float = 1.0) -> "PulseShape":
        if not 0.0 < tau < T:
            raise SpecError("triangle peak time must lie inside (0, T)")
        return cls("triangle", A=A, T=T, tau=tau)

    @classmethod
    def trapezoidal(cls, A: float, tau1: float, tau2: float, T: float = 1.0) -> "PulseShape":
        end = _plateau_end(tau1, tau2)
        if not 0.0 < tau1 <= end < T:
            raise SpecError("trapezoid knots must satisfy 0 < tau1 <= plateau end < T")
        return cls("trapezoidal", A=A, T=T, tau1=tau1, tau2=tau2)

    @classmethod
    def sampled(cls, points, A: float = 1.0) -> "PulseShape":
        """Tabulated envelope; ``points`` is an iterable of (t, value)."""
        pts = tuple((float(t), float(v)) for t, v in points)
        if len(pts) < 2:
            raise SpecError("sampled shape needs at least two points")
        ts = [p[0] for p in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise SpecError("sampled times must be strictly increasing")
        if ts[0] != 0.0:
            raise SpecError("sampled table must start at t = 0")
        if any(p[1] < 0 for p in pts):
            raise SpecError("sampled amplitudes must be non-negative")
        return cls("sampled", A=A, T=ts[-1], samples=pts)

    @classmethod
    def sampled_from_csv(cls, path, A: float = 1.0) -> "PulseShape":
        """Load a two-column CSV (time, amplitude); '#' lines are comments."""
        pts = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                cols = line.split(",")
                if len(cols) < 2:
                    raise SpecError(f"bad sample row: {line!r}")
                try:
                    pts.append((float(cols[0]), float(cols[1])))
                except ValueError:
                    continue  # header row
        return cls.sampled(pts, A=A)

    def __call__(self, t):
        return eval_shape(self, t)


def _plateau_end(tau1: float, tau2: float) -> float:
    return tau1 + tau2 if tau2 <= tau1 else tau2


def eval_shape(shape: PulseShape, t):
    """Dimensionless envelope value(s) at time(s) ``t`` in [0, T].

    Parameters
    ----------
    shape : PulseShape
    t : float or array_like

    Returns
    -------
    float or numpy.ndarray
        Omega_s(t)/Omega_0, non-negative and finite.

    Raises
    ------
    DomainError
        If any time lies outside [0, T] (beyond rounding slack).
    """
    t = np.asarray(t, dtype=float)
    slack = 1e-12 * max(1.0, shape.T)
    if np.any(t < -slack) or np.any(t > shape.T + slack):
        raise DomainError(f"time outside pulse window [0, {shape.T}]")
    t = np.clip(t, 0.0, shape.T)

    if shape.kind == "gaussian":
        out = shape.A * np.exp(-((t - 3.0 * shape.tau) ** 2) / shape.tau**2)
    elif shape.kind == "sinusoidal":
        out = shape.A * np.abs(np.sin(np.pi * t / shape.T + shape.tau))
    elif shape.kind == "sawtooth":
        out = shape.A * t / shape.T
    elif shape.kind == "triangle":
        rise = shape.A * t / shape.tau
        fall = shape.A * (t - shape.T) / (shape.tau - shape.T)
        out = np.where(t <= shape.tau, rise, fall)
    elif shape.kind == "trapezoidal":
        end = _plateau_end(shape.tau1, shape.tau2)
        rise = shape.A * t / shape.tau1
        fall = shape.A * (t - shape.T) / (end - shape.T)
        out = np.where(t <= shape.tau1, rise, np.where(t <= end, shape.A, fall))
    else:  # sampled
        ts = np.array([p[0] for p in shape.samples])
        vs = np.array([p[1] for p in shape.samples])
        out = shape.A * np.interp(t, ts, vs)
    return out if out.ndim else float(out)


def shape_to_dict(shape: PulseShape) -> dict:
    d = {"kind": shape.kind, "A": shape.A, "T": shape.T}
    if shape.kind == "gaussian":
        d["tau"] = shape.tau
    elif shape.kind == "sinusoidal":
        d["tau"] = shape.tau
    elif shape.kind == "triangle":
        d["tau"] = shape.tau
    elif shape.kind == "trapezoidal":
        d["tau1"] = shape.tau1
        d["tau2"] = shape.tau2
    elif shape.kind == "sampled":
        d["samples"] = [list(p) for p in shape.samples]
    return d


def shape_from_dict(d: dict) -> PulseShape:
    kind = d.get("kind")
    if kind == "gaussian":
        return PulseShape.gaussian(d["A"], d.get("tau", 1.0))
    if kind == "sinusoidal":
        return PulseShape.sinusoidal(d["A"], d.get("T", 1.0), d.get("tau", 0.0))
    if kind == "sawtooth":
        return PulseShape.sawtooth(d["A"], d.get("T", 1.0))
    if kind == "triangle":
        return PulseShape.triangle(d["A"], d["tau"], d.get("T", 1.0))
    if kind == "trapezoidal":
        return PulseShape.trapezoidal(d["A"], d["tau1"], d["tau2"], d.get("T", 1.0))
    if kind == "sampled":
        return PulseShape.sampled(d["samples"], d.get("A", 1.0))
    raise SpecError(f"unknown shape kind {kind!r}")
