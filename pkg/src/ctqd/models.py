"""Closed-form propagator models used by the phase designers.

Three layers of idealization, each matched against full simulation in
the test suite:

* single-pair block in {d, b, e} with an amplitude deviation on the
  transition element r (the deviation the first hierarchy level cancels
  exactly, independent of its size);
* two-pair unit with a fractional deviation of the dynamical phase
  alpha (the deviation the second hierarchy level suppresses order by
  order);
* equatorial Bloch rotation by pi/4 per composed block (the third
  hierarchy level's design model: each designed block acts on
  span{|g>, |f>} as exp(-i beta (1+delta) n.sigma) with beta = pi/4 and
  the block's azimuth set by its relative Stokes-pump phase).

All deviation arguments broadcast: passing an array of deviations
evaluates the whole batch in one chain of 2x2 products, which is what
keeps the multistart solvers cheap.  Taylor coefficients of model
amplitudes are taken on a small complex circle (the amplitudes are
entire in the deviation), giving every order at once to near machine
precision; the public finite-difference path lives in
:mod:`ctqd.design`.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .errors import DomainError

RING_POINTS = 32
RING_RADIUS = 0.2


def pair_with_r_deviation(r, s, alpha: float, theta_s: float,
                          delta_r: float) -> np.ndarray:
    """Single-pair {d, b, e} block with r -> (1 + delta_r) r.

    The companion s deviates to keep the block unitary,
    s' = sqrt(1 - |r'|^2); alpha is untouched (pure transition-amplitude
    deviation).
    """
    r2 = (1.0 + delta_r) * r
    if abs(r2) > 1.0:
        raise DomainError("deviated |r| exceeds 1; block cannot stay unitary")
    s2 = np.sqrt(1.0 - abs(r2) ** 2)
    return np.array([
        [1.0, 0.0, 0.0],
        [0.0, s2 * np.exp(1j * alpha), r2 * np.exp(-1j * theta_s)],
        [0.0, -np.conj(r2) * np.exp(1j * theta_s), s2 * np.exp(-1j * alpha)],
    ])


def unit_with_alpha_deviation(dalpha, r, alpha: float, theta_offset: float) -> np.ndarray:
    """Two-pair unit block on {b, e} with alpha -> (1 + dalpha) alpha.

    ``theta_offset`` is the Stokes phase of the unit's first pair; at
    dalpha = 0 the unit is exactly diag(e^{2 i alpha}, e^{-2 i alpha}).
    ``dalpha`` may be an array; the block batch has shape (..., 2, 2).
    """
    d = np.asarray(dalpha, dtype=complex)
    s = np.sqrt(1.0 - abs(r) ** 2)
    osc = np.exp(2j * alpha * d)
    off = 2j * s * np.sin(alpha * d)
    out = np.empty(d.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(2j * alpha) * (abs(r) ** 2 + osc * s * s)
    out[..., 1, 1] = np.exp(-2j * alpha) * (abs(r) ** 2 + s * s / osc)
    out[..., 1, 0] = np.conj(r) * off * np.exp(1j * (theta_offset - alpha))
    out[..., 0, 1] = r * off * np.exp(1j * (alpha - theta_offset))
    return out


def chain_transition_amplitude(dalpha, r, alpha: float, unit_offsets):
    """b -> e amplitude of a chain of alpha-deviated units.

    ``unit_offsets`` are the cumulative Stokes offsets of the units
    (first entry conventionally 0).  Identically zero at dalpha = 0 for
    any offsets; the second-hierarchy phases push its low-order
    dalpha-derivatives to zero as well.  Broadcasts over ``dalpha``.
    """
    d = np.atleast_1d(np.asarray(dalpha, dtype=complex))
    U = np.broadcast_to(np.eye(2, dtype=complex), d.shape + (2, 2)).copy()
    for th in unit_offsets:
        U = unit_with_alpha_deviation(d, r, alpha, th) @ U
    amp = U[..., 1, 0]
    return amp if np.ndim(dalpha) else complex(amp[0])


def ring_coefficients(f, kmax: int, radius: float = RING_RADIUS,
                      points: int = RING_POINTS) -> np.ndarray:
    """Taylor coefficients c_0..c_kmax of an entire function.

    ``f`` must accept an array of complex arguments.  Samples on
    |z| = radius and reads the series off the FFT; accurate to ~1e-13
    for the model amplitudes at the default radius.
    """
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    c = np.fft.fft(np.asarray(f(z))) / points
    return c[: kmax + 1] / radius ** np.arange(kmax + 1)


def transition_derivatives(r, alpha: float, unit_offsets, kmax: int) -> np.ndarray:
    """|d^k/d(dalpha)^k| of the chain transition amplitude, k = 0..kmax."""
    c = ring_coefficients(
        lambda z: chain_transition_amplitude(z, r, alpha, unit_offsets), kmax)
    return np.array([abs(c[k]) * factorial(k) for k in range(kmax + 1)])


# ---------------------------------------------------------------------------
# third-hierarchy rotation model


def rotation_block(azimuth, angle) -> np.ndarray:
    """exp(-i angle (cos(az) sigma_x + sin(az) sigma_y)) on {|g>, |f>}.

    ``angle`` may be an array; the result then has shape (..., 2, 2).
    """
    a = np.asarray(angle, dtype=complex)
    c, s = np.cos(a), np.sin(a)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 1, 1] = c
    out[..., 0, 1] = -1j * s * np.exp(-1j * azimuth)
    out[..., 1, 0] = -1j * s * np.exp(1j * azimuth)
    return out


def block_azimuths(base_phase: float, diffs) -> np.ndarray:
    """Azimuth of every composed block given the designed differences."""
    steps = np.concatenate([[0.0], np.cumsum(np.asarray(tuple(diffs), dtype=float))])
    return base_phase + steps


def composite_state(base_phase: float, diffs, dbeta=0.0,
                    beta0: float = np.pi / 4) -> np.ndarray:
    """Final model state from |g>; broadcasts over ``dbeta``."""
    d = np.atleast_1d(np.asarray(dbeta, dtype=complex))
    psi = np.zeros(d.shape + (2,), dtype=complex)
    psi[..., 0] = 1.0
    angle = beta0 * (1.0 + d)
    for az in block_azimuths(base_phase, diffs):
        psi = np.einsum("...ij,...j->...i", rotation_block(az, angle), psi)
    return psi if np.ndim(dbeta) else psi[0]


def target_vector(target_alpha: float, target_chi: float = 0.0) -> np.ndarray:
    """State cos(a)|g> + sin(a) e^{i chi}|f> in the package basis.

    Under the emission-phase Hamiltonian convention the relative phase
    chi of the published design formulas maps to e^{-i chi} on the |f>
    amplitude; this helper applies that mapping so designers, simulator
    and formulas agree on one chi.
    """
    return np.array([np.cos(target_alpha),
                     np.sin(target_alpha) * np.exp(-1j * target_chi)])


def composite_population(diffs, dbeta=0.0, beta0: float = np.pi / 4):
    """Transfer probability P_f of the composite (base-phase free)."""
    psi = composite_state(0.0, diffs, dbeta, beta0)
    p = np.abs(psi[..., 1]) ** 2
    return p if np.ndim(dbeta) else float(p)


def composite_fidelity(base_phase: float, diffs, dbeta, target_alpha: float,
                       target_chi: float = 0.0):
    tgt = target_vector(target_alpha, target_chi)
    psi = composite_state(base_phase, diffs, dbeta)
    f = np.abs(np.conj(tgt[0]) * psi[..., 0] + np.conj(tgt[1]) * psi[..., 1]) ** 2
    return f if np.ndim(dbeta) else float(f)


def _quadratic_taylor(amplitude_coeffs: np.ndarray) -> np.ndarray:
    """Real Taylor coefficients of |a(x)|^2 given the coefficients of a."""
    u = amplitude_coeffs
    kmax = len(u) - 1
    out = np.zeros(kmax + 1)
    for m in range(kmax + 1):
        out[m] = np.real(sum(u[k] * np.conj(u[m - k]) for k in range(m + 1)))
    return out


def population_taylor(diffs, kmax: int, beta0: float = np.pi / 4) -> np.ndarray:
    """Taylor coefficients of P_f(dbeta) around 0 (c_k, not derivatives)."""
    u = ring_coefficients(
        lambda z: composite_state(0.0, diffs, z, beta0)[..., 1], kmax)
    return _quadratic_taylor(u)


def fidelity_taylor(base_phase: float, diffs, target_alpha: float,
                    target_chi: float, kmax: int) -> np.ndarray:
    """Taylor coefficients f_k of the model fidelity around dbeta = 0."""
    tgt = target_vector(target_alpha, target_chi)

    def amp(z):
        psi = composite_state(base_phase, diffs, z)
        return np.conj(tgt[0]) * psi[..., 0] + np.conj(tgt[1]) * psi[..., 1]

    return _quadratic_taylor(ring_coefficients(amp, kmax))


def align_base_phase(diffs, target_alpha: float, target_chi: float = 0.0) -> float:
    """Base azimuth that points the composite at the target state.

    Shifting every block azimuth by c multiplies the |f> amplitude by
    e^{i c} and leaves |g> alone, so the optimum is read off the
    amplitudes at base 0 in closed form.
    """
    psi0 = composite_state(0.0, diffs)
    tgt = target_vector(target_alpha, target_chi)
    a = np.conj(tgt[0]) * psi0[0]
    b = np.conj(tgt[1]) * psi0[1]
    if abs(b) < 1e-15:
        return 0.0
    if abs(a) < 1e-15:
        return float(-np.angle(b))
    return float(np.angle(a) - np.angle(b))


# ---------------------------------------------------------------------------
# closed-form population/fidelity coefficients of three-block composites


def pc_population_zero(t21: float, t32: float) -> float:
    """P_f of three pi/4 blocks at zero deviation."""
    return 0.25 * (2.0 + np.cos(t21 + t32) - np.cos(t21 - t32))


def pc_population_slope(t21: float, t32: float) -> float:
    """d P_f / d(dbeta) of three pi/4 blocks at zero deviation."""
    return -(np.pi / 4.0) * (2.0 * np.cos(t32) * np.cos(0.5 * t21) ** 2
                             + np.cos(t21))


def fc_f0(theta1: float, t21: float, t32: float, chi: float) -> float:
    """Zero-order fidelity coefficient, equal-superposition target."""
    z = theta1 + chi
    return 0.125 * (4.0 + np.sin(z) - np.sin(2.0 * t21 + z)
                    - 2.0 * np.sin(t21) * np.cos(t21 + 2.0 * t32 + z)
                    - 4.0 * np.cos(t21) * np.sin(t21 + t32 + z))


def fc_f1(theta1: float, t21: float, t32: float, chi: float) -> float:
    """First-order fidelity coefficient, equal-superposition target."""
    z = theta1 + chi
    return (np.pi / 2.0) * np.cos(0.5 * t21) * np.sin(t32) * np.cos(
        0.5 * t21 + t32 + z)
