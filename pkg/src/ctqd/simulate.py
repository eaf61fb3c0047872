"""Time-ordered propagation of pulse pairs and sequences.

Integrator
----------
Each pair window is split into ``steps_per_pair`` slices; on every slice
the propagator is the exponential of a fourth-order Magnus generator
built from the Hamiltonian at the two Gauss-Legendre nodes,

    G = (h/2)(H1 + H2) + i (sqrt(3)/12) h^2 [H1, H2],
    U_step = exp(-i G),

so every step is exactly unitary and the global error scales as h^4.
(A plain midpoint exponential is second order and cannot meet the
step-halving convergence guarantees this module advertises, which is
why the fourth-order generator is the single supported method.)

Gauge factorization
-------------------
Constant pulse phases enter the Hamiltonian as a diagonal conjugation:
H(theta_s, theta_p) = Phi H(0, 0) Phi^dag with
Phi = diag(e^{-i theta_p}, e^{-i theta_s}, 1).  Pair propagators are
therefore computed once for the phase-free pair and conjugated, which
makes trains of identical pulses (the designed sequences) cost a single
integration regardless of length.  The identity is exact; it is also
unit-tested against direct integration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SpecError, StepCountError
from .pulses import NOMINAL, ErrorModel, SPPulsePair

GAUSS_NODES = (0.5 - np.sqrt(3.0) / 6.0, 0.5 + np.sqrt(3.0) / 6.0)


@dataclass(frozen=True)
class PropagationConfig:
    """Integration controls.

    steps_per_pair
        Time slices per pair window (>= 100).  The default 2000 puts the
        step-halving change of any reported quantity below 1e-9 for the
        published pulse parameters.
    sample_stride
        Steps between retained samples in population traces.
    integrator
        Single supported method; see module docstring.
    check_convergence
        When True, every pair propagation re-runs at double resolution
        and raises :class:`StepCountError` if the two disagree beyond
        ``convergence_tol``.
    """

    steps_per_pair: int = 2000
    sample_stride: int = 20
    integrator: str = "gauss-magnus4"
    check_convergence: bool = False
    convergence_tol: float = 1e-9

    def __post_init__(self):
        if self.steps_per_pair < 100:
            raise SpecError("steps_per_pair must be at least 100")
        if self.sample_stride < 1:
            raise SpecError("sample_stride must be positive")
        if self.integrator != "gauss-magnus4":
            raise SpecError(f"unsupported integrator {self.integrator!r}")


DEFAULT_CONFIG = PropagationConfig()


def _pair_key(pair: SPPulsePair):
    return (pair.shape, pair.omega0, pair.mixing_angle, pair.delta)


def _window_hamiltonians(pair: SPPulsePair, err: ErrorModel, steps: int):
    """Batched zero-phase Hamiltonians at the Gauss nodes of every slice."""
    T = pair.duration(err)
    h = T / steps
    t0 = np.arange(steps) * h
    ts = np.concatenate([t0 + GAUSS_NODES[0] * h, t0 + GAUSS_NODES[1] * h])
    ws = np.asarray(pair.omega_s(ts, err), dtype=float)
    wp = np.asarray(pair.omega_p(ts, err), dtype=float)
    dd = np.broadcast_to(np.asarray(pair.detuning(ts, err), dtype=float), ts.shape)
    H = np.zeros((2 * steps, 3, 3), dtype=complex)
    H[:, 2, 0] = wp
    H[:, 0, 2] = wp
    H[:, 2, 1] = ws
    H[:, 1, 2] = ws
    H[:, 2, 2] = dd
    return H[:steps], H[steps:], h


def _step_unitaries(pair: SPPulsePair, err: ErrorModel, steps: int) -> np.ndarray:
    H1, H2, h = _window_hamiltonians(pair, err, steps)
    G = 0.5 * h * (H1 + H2) + (1j * np.sqrt(3.0) / 12.0) * h * h * (H1 @ H2 - H2 @ H1)
    w, V = np.linalg.eigh(G)
    U = np.einsum("nij,nj,nkj->nik", V, np.exp(-1j * w), V.conj())
    return U


def _ordered_product(U: np.ndarray) -> np.ndarray:
    """Product U[n-1] @ ... @ U[0] by pairwise reduction."""
    while U.shape[0] > 1:
        if U.shape[0] % 2:
            U = np.concatenate([np.matmul(U[1:-1:2], U[0:-1:2]), U[-1:]])
        else:
            U = np.matmul(U[1::2], U[0::2])
    return U[0]


@lru_cache(maxsize=256)
def _window_propagator_cached(key, err: ErrorModel, steps: int) -> np.ndarray:
    shape, omega0, mixing, delta = key
    pair = SPPulsePair(shape, omega0, mixing, 0.0, 0.0, delta)
    U = _ordered_product(_step_unitaries(pair, err, steps))
    U.setflags(write=False)
    return U


@lru_cache(maxsize=16)
def _window_steps_cached(key, err: ErrorModel, steps: int) -> np.ndarray:
    shape, omega0, mixing, delta = key
    pair = SPPulsePair(shape, omega0, mixing, 0.0, 0.0, delta)
    U = _step_unitaries(pair, err, steps)
    U.setflags(write=False)
    return U


def _phase_conjugation(pair: SPPulsePair) -> np.ndarray:
    return np.array([np.exp(-1j * pair.theta_p), np.exp(-1j * pair.theta_s), 1.0],
                    dtype=complex)


def propagate_pair(pair: SPPulsePair, err: ErrorModel = NOMINAL,
                   cfg: PropagationConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Time-ordered propagator of one pair over its full window.

    Deterministic for fixed inputs; unitary to better than 1e-10.
    """
    if pair.delta_of_t is None:
        U0 = _window_propagator_cached(_pair_key(pair), err, cfg.steps_per_pair)
    else:
        zero = pair.with_phases(0.0, 0.0)
        U0 = _ordered_product(_step_unitaries(zero, err, cfg.steps_per_pair))
    phi = _phase_conjugation(pair)
    U = (phi[:, None] * U0) * phi.conj()[None, :]
    if cfg.check_convergence:
        fine = PropagationConfig(cfg.steps_per_pair * 2, cfg.sample_stride,
                                 cfg.integrator)
        defect = float(np.max(np.abs(U - propagate_pair(pair, err, fine))))
        if defect > cfg.convergence_tol:
            raise StepCountError(
                f"step-doubling changes the propagator by {defect:.2e} "
                f"(> {cfg.convergence_tol:.1e}) at {cfg.steps_per_pair} steps"
            )
    return U


def propagate_pair_direct(pair: SPPulsePair, err: ErrorModel = NOMINAL,
                          cfg: PropagationConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Integrate with the phases inside the Hamiltonian (no factorization).

    Exists so the gauge identity used by :func:`propagate_pair` can be
    verified independently, and for gauge-invariance checks that must
    not assume it.
    """
    H1, H2, h = _window_hamiltonians(pair.with_phases(0.0, 0.0), err,
                                     cfg.steps_per_pair)
    phi = _phase_conjugation(pair)
    H1 = (phi[:, None] * H1) * phi.conj()[None, :]
    H2 = (phi[:, None] * H2) * phi.conj()[None, :]
    G = 0.5 * h * (H1 + H2) + (1j * np.sqrt(3.0) / 12.0) * h * h * (H1 @ H2 - H2 @ H1)
    w, V = np.linalg.eigh(G)
    return _ordered_product(np.einsum("nij,nj,nkj->nik", V, np.exp(-1j * w), V.conj()))


def _pairs_of(seq):
    return seq.pairs if hasattr(seq, "pairs") else list(seq)


def propagate_sequence(seq, err: ErrorModel = NOMINAL,
                       cfg: PropagationConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Ordered composition of all pair propagators of a sequence.

    Exactly the fold of :func:`propagate_pair` over the pairs (same code
    path), so caching cannot introduce any discrepancy between the two.
    """
    U = np.eye(3, dtype=complex)
    for pair in _pairs_of(seq):
        U = propagate_pair(pair, err, cfg) @ U
    return U


@dataclass(frozen=True)
class TraceResult:
    """Sampled evolution: times, populations (n, 3) and amplitudes (n, 3)."""

    times: np.ndarray
    populations: np.ndarray
    amplitudes: np.ndarray

    def final_state(self) -> np.ndarray:
        return self.amplitudes[-1]


def trace_populations(seq, err: ErrorModel = NOMINAL, init=None,
                      cfg: PropagationConfig = DEFAULT_CONFIG) -> TraceResult:
    """Propagate an initial state and sample populations along the way.

    Parameters
    ----------
    seq : Sequence or iterable of SPPulsePair
    err : ErrorModel
    init : array_like, optional
        Normalized initial state; defaults to |g>.
    cfg : PropagationConfig
        Samples are kept every ``cfg.sample_stride`` steps plus the end
        of every pair.

    Returns
    -------
    TraceResult
        P_g + P_f + P_e stays within 1e-9 of 1 at every sample (the
        stepper is unitary).
    """
    pairs = _pairs_of(seq)
    psi = np.array([1, 0, 0], dtype=complex) if init is None else np.asarray(
        init, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-6:
        raise SpecError("initial state must be normalized")
    if not pairs:
        empty = np.zeros((0, 3))
        return TraceResult(np.zeros(0), empty, empty.astype(complex))
    times = [0.0]
    amps = [psi.copy()]
    t_offset = 0.0
    for pair in pairs:
        steps = cfg.steps_per_pair
        if pair.delta_of_t is None:
            U_steps = _window_steps_cached(_pair_key(pair), err, steps)
        else:
            U_steps = _step_unitaries(pair.with_phases(0.0, 0.0), err, steps)
        phi = _phase_conjugation(pair)
        psi_in = phi.conj() * psi
        h = pair.duration(err) / steps
        for k in range(steps):
            psi_in = U_steps[k] @ psi_in
            if (k + 1) % cfg.sample_stride == 0 or k == steps - 1:
                times.append(t_offset + (k + 1) * h)
                amps.append(phi * psi_in)
        psi = phi * psi_in
        t_offset += pair.duration(err)
    amplitudes = np.array(amps)
    return TraceResult(np.array(times), np.abs(amplitudes) ** 2, amplitudes)
