"""Instantaneous eigensystem, dark/bright frame, and pair characterization.

Frame conventions (emission-phase Hamiltonian, see :mod:`ctqd.pulses`):

    |d(t)> = cos(phi) e^{+i theta_sp} |g> - sin(phi) |f>
    |b(t)> = sin(phi) |g> + cos(phi) e^{-i theta_sp} |f>
    |E+>   = sin(varphi) e^{-i theta_p}-dressed bright + cos(varphi) |e>
    |E->   = cos(varphi) e^{-i theta_p}-dressed bright - sin(varphi) |e>

with tan(phi) = Omega_p/Omega_s constant (synchronization), tan(2 varphi)
= 2 Omega/Delta, Omega = sqrt(Omega_p^2 + Omega_s^2).  The dark-state
phase is fixed by a real, negative |f> coefficient.

Propagators in the {d, b, e} basis carry a residual global phase on the
bright/excited block equal to half the integrated detuning (the trace of
the Hamiltonian).  :func:`pair_dbe_propagator` removes it, which makes
the block exactly special-unitary, so a synchronized pair takes the form

    [[1, 0, 0], [0, s e^{i alpha}, r e^{-i theta_s}],
     [0, -conj(r) e^{i theta_s}, s e^{-i alpha}]]

with s = sqrt(1 - |r|^2).  ``alpha`` extracted this way is the quantity
the phase-difference designs consume, and matches the published
per-pulse values for the tabulated gate parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConstraintError, DegenerateError, NotBlockDiagonalError,
                     NormalizationError)
from .linalg import normalize_axis, wrap_phase
from .pulses import NOMINAL, ErrorModel, SPPulsePair, detuning_integral
from .simulate import (DEFAULT_CONFIG, PropagationConfig, propagate_pair,
                       propagate_pair_direct, propagate_sequence)

DARK_CLEAN_TOL = 1e-8


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigensystem of a synchronized pair at one time."""

    phi: float
    varphi: float
    theta_sp: float
    theta_s: float
    energies: tuple  # (E0, E+, E-)
    basis: np.ndarray  # columns |d>, |b>, |e>
    eigvecs: np.ndarray  # columns |d>, |E+>, |E->


def dark_bright_basis(phi: float, theta_sp: float) -> np.ndarray:
    """Unitary with columns |d>, |b>, |e> in the {g, f, e} basis."""
    d = np.array([np.cos(phi) * np.exp(1j * theta_sp), -np.sin(phi), 0.0])
    b = np.array([np.sin(phi), np.cos(phi) * np.exp(-1j * theta_sp), 0.0])
    e = np.array([0.0, 0.0, 1.0], dtype=complex)
    return np.stack([d, b, e], axis=1)


def eigensystem(pair: SPPulsePair, t: float, err: ErrorModel = NOMINAL) -> EigenFrame:
    """Instantaneous eigenframe of the pair Hamiltonian at time t.

    Returns energies (0, E+, E-) and eigenvectors satisfying
    H|E_k> = E_k|E_k> to 1e-9; the dark state has no |e> component.

    Raises
    ------
    DegenerateError
        If the Hamiltonian vanishes identically at t (no branch).
    """
    ws = float(pair.omega_s(t, err))
    wp = float(pair.omega_p(t, err))
    dd = float(pair.detuning(t, err))
    omega = np.hypot(ws, wp)
    if omega == 0.0 and dd == 0.0:
        raise DegenerateError("H(t) = 0: eigenframe undefined")
    phi = pair.mixing_angle
    varphi = 0.5 * np.arctan2(2.0 * omega, dd)
    root = np.sqrt(0.25 * dd * dd + omega * omega)
    e_plus = 0.5 * dd + root
    e_minus = 0.5 * dd - root
    tsp = pair.theta_sp
    basis = dark_bright_basis(phi, tsp)
    bright_phased = np.array([np.sin(phi) * np.exp(-1j * pair.theta_p),
                              np.cos(phi) * np.exp(-1j * pair.theta_s), 0.0])
    e_ket = np.array([0.0, 0.0, 1.0], dtype=complex)
    vec_p = np.sin(varphi) * bright_phased + np.cos(varphi) * e_ket
    vec_m = np.cos(varphi) * bright_phased - np.sin(varphi) * e_ket
    eigvecs = np.stack([basis[:, 0], vec_p, vec_m], axis=1)
    return EigenFrame(phi, varphi, tsp, pair.theta_s,
                      (0.0, e_plus, e_minus), basis, eigvecs)


def db_transform(frame: EigenFrame) -> np.ndarray:
    """Change-of-basis unitary {g, f, e} -> {d, b, e} of a frame.

    ``B.conj().T @ H @ B`` has no coupling between |d> and {|b>, |e>}
    for a synchronized pair.
    """
    return frame.basis


def to_dbe(U_lab: np.ndarray, phi: float, theta_sp: float,
           detuning_phase: float = 0.0) -> np.ndarray:
    """Express a lab-frame propagator in the {d, b, e} basis.

    ``detuning_phase`` is the integrated detuning over the propagated
    interval; half of it is stripped from the bright/excited block so
    the block is special-unitary (see module docstring).
    """
    B = dark_bright_basis(phi, theta_sp)
    M = B.conj().T @ U_lab @ B
    M[1:, 1:] *= np.exp(0.5j * detuning_phase)
    return M


def pair_dbe_propagator(pair: SPPulsePair, err: ErrorModel = NOMINAL,
                        cfg: PropagationConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Simulated single-pair propagator in the pair's own {d, b, e} basis."""
    U = propagate_pair(pair, err, cfg)
    return to_dbe(U, pair.mixing_angle, pair.theta_sp,
                  detuning_integral(pair, err))


def sequence_dbe_propagator(seq, err: ErrorModel = NOMINAL,
                            cfg: PropagationConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Sequence propagator in the frame of the first pair.

    Meaningful for sequences sharing one theta_sp (hierarchy levels 1-2);
    third-level sequences rotate the frame per block and are not block
    diagonal in any single frame.
    """
    pairs = seq.pairs if hasattr(seq, "pairs") else list(seq)
    U = propagate_sequence(pairs, err, cfg)
    phase = sum(detuning_integral(p, err) for p in pairs)
    return to_dbe(U, pairs[0].mixing_angle, pairs[0].theta_sp, phase)


@dataclass(frozen=True)
class PairCharacterization:
    """Single-pair propagator parameters (r, s, alpha).

    ``alpha`` is reported in (-pi, pi]; the designed phase differences
    consume it modulo pi, so the branch does not affect any phase
    relation.  |r|^2 + s^2 = 1.
    """

    r: complex
    s: float
    alpha: float

    @property
    def alpha_mod_pi(self) -> float:
        """Representative in [0, pi), the form tabulated for gates."""
        return float(np.mod(self.alpha, np.pi))


def extract_r_alpha(U_dbe: np.ndarray, theta_s: float = 0.0) -> PairCharacterization:
    """Read (r, s, alpha) off a {d, b, e} pair propagator.

    Parameters
    ----------
    U_dbe : numpy.ndarray
        3x3 unitary whose first row/column must be (1, 0, 0) to 1e-8
        (dark state untouched).
    theta_s : float
        Stokes phase of the pair, used to strip the phase convention
        from the off-diagonal element: r = U_be * e^{i theta_s}.

    Raises
    ------
    NotBlockDiagonalError
        If the dark row/column is not clean, which signals broken
        Stokes/pump synchronization.
    """
    U = np.asarray(U_dbe, dtype=complex)
    target = np.array([1.0, 0.0, 0.0])
    defect = max(np.max(np.abs(U[0, :] - target)), np.max(np.abs(U[:, 0] - target)))
    if defect > DARK_CLEAN_TOL:
        raise NotBlockDiagonalError(
            f"dark row/column deviates by {defect:.2e} (> {DARK_CLEAN_TOL:.0e}); "
            "is the pair synchronized?"
        )
    alpha = float(np.angle(U[1, 1]))
    r = U[1, 2] * np.exp(1j * theta_s)
    s = float(np.sqrt(max(0.0, 1.0 - abs(r) ** 2)))
    return PairCharacterization(complex(r), s, alpha)


def pair_block(char: PairCharacterization, theta_s: float) -> np.ndarray:
    """Rebuild the {d, b, e} pair propagator from (r, s, alpha).

    Inverse of :func:`extract_r_alpha` to within the dark-cleanliness
    tolerance of the input.
    """
    r, s, a = char.r, char.s, char.alpha
    return np.array([
        [1.0, 0.0, 0.0],
        [0.0, s * np.exp(1j * a), r * np.exp(-1j * theta_s)],
        [0.0, -np.conj(r) * np.exp(1j * theta_s), s * np.exp(-1j * a)],
    ])


def characterize_pair(pair: SPPulsePair, err: ErrorModel = NOMINAL,
                      cfg: PropagationConfig = DEFAULT_CONFIG) -> PairCharacterization:
    """Simulate one pair and extract its (r, s, alpha)."""
    return extract_r_alpha(pair_dbe_propagator(pair, err, cfg), pair.theta_s)


def unit_rotation_axis(mixing_angle: float, theta_sp: float) -> np.ndarray:
    """Bloch axis of the two-pair unit's action on span{|g>, |f>}.

    The doubled mixing angle appears because |d>, |b> are full-angle
    superpositions while Bloch axes live at half angles.
    """
    two_phi = 2.0 * mixing_angle
    return normalize_axis(-np.sin(two_phi) * np.cos(theta_sp),
                          np.sin(two_phi) * np.sin(theta_sp),
                          np.cos(two_phi))


def unit_rotation_angle(char: PairCharacterization, pair: SPPulsePair,
                        err: ErrorModel = NOMINAL) -> float:
    """Rotation parameter of the error-free two-pair unit on {g, f}.

    Equals alpha minus half the integrated detuning (the lab-frame
    bright phase): the unit acts as
    e^{i a} * exp(-i a n.sigma) with a this value and n from
    :func:`unit_rotation_axis`.
    """
    return wrap_phase(char.alpha - 0.5 * detuning_integral(pair, err))


@dataclass(frozen=True)
class GaugeReport:
    """Outcome of a gauge-invariance check."""

    max_amplitude_deviation: float
    n_levels: int
    n_free_phases: int
    ok: bool


def gauge_invariance_check(pair: SPPulsePair, phase_shift,
                           err: ErrorModel = NOMINAL,
                           cfg: PropagationConfig = DEFAULT_CONFIG,
                           tol: float = 1e-10) -> GaugeReport:
    """Verify that constant coupling phases only rephase the propagator.

    Both the shifted and the unshifted pair are integrated directly (no
    phase factorization), and every propagator entry magnitude is
    compared.  ``phase_shift`` is (shift_p, shift_s) added to the pump
    and Stokes phases.  For the three-level chain every phase vector is
    gauge-trivial; there are as many free basis phases as levels.
    """
    dp, ds = float(phase_shift[0]), float(phase_shift[1])
    U0 = propagate_pair_direct(pair, err, cfg)
    U1 = propagate_pair_direct(pair.with_phases(pair.theta_s + ds,
                                                pair.theta_p + dp), err, cfg)
    dev = float(np.max(np.abs(np.abs(U1) - np.abs(U0))))
    return GaugeReport(dev, 3, 3, dev < tol)


def coupling_phase_freedom(n_levels: int, edges, edge_phases,
                           tol: float = 1e-9) -> int:
    """Count free coupling phases of a general phase-shifted model.

    ``edges`` lists coupled level pairs (j, m); a phase vector is
    gauge-trivial iff phases theta_j on the levels solve
    theta_jm = theta_m - theta_j on every edge.  Chains and trees are
    always solvable (as many free phases as levels); cyclic couplings
    must close around every loop.

    Raises
    ------
    ConstraintError
        If the phase vector is not realizable by level phases.
    """
    edges = list(edges)
    phases = np.asarray(edge_phases, dtype=float)
    if len(edges) != len(phases):
        raise NormalizationError("one phase per edge required")
    A = np.zeros((len(edges), n_levels))
    for k, (j, m) in enumerate(edges):
        A[k, m] = 1.0
        A[k, j] = -1.0
    sol, *_ = np.linalg.lstsq(A, phases, rcond=None)
    residual = float(np.max(np.abs(A @ sol - phases))) if len(edges) else 0.0
    if residual > tol:
        raise ConstraintError(
            f"phase vector violates the gauge constraint (residual {residual:.2e})"
        )
    return n_levels
