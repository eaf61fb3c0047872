"""Dense complex linear algebra for 2x2 and 3x3 propagators and states.

All matrices and state vectors are plain ``numpy`` arrays of complex128.
Default equality tolerance for unitarity/norm checks is ``1e-10``
(double precision leaves ample headroom over hundreds of composed
steps); every checking helper takes an overridable ``tol``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidMatrixError, NormalizationError

DEFAULT_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Basis kets of the lambda system, ordering {|g>, |f>, |e>}.
KET_G = np.array([1, 0, 0], dtype=complex)
KET_F = np.array([0, 1, 0], dtype=complex)
KET_E = np.array([0, 0, 1], dtype=complex)


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3):
        raise InvalidMatrixError(f"expected a 2x2 or 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise InvalidMatrixError("matrix contains non-finite entries")
    return a


def unitarity_defect(u) -> float:
    """Max-norm of U^dag U - I."""
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    return unitarity_defect(u) < tol


def mat_exp(a, t: float) -> np.ndarray:
    """Propagator ``exp(-i a t)`` of a constant generator.

    Parameters
    ----------
    a : array_like
        2x2 or 3x3 complex matrix with finite entries.
    t : float
        Evolution parameter.

    Returns
    -------
    numpy.ndarray
        ``exp(-i a t)``.  Hermitian generators take the exact
        eigendecomposition path and the result is unitary to 1e-12;
        non-Hermitian input falls back to scaling-and-squaring Pade
        (diagnostics only).
    """
    a = _as_square(a)
    if np.max(np.abs(a - a.conj().T)) < 1e-12 * max(1.0, np.max(np.abs(a))):
        w, v = np.linalg.eigh(a)
        return (v * np.exp(-1j * w * t)) @ v.conj().T
    return scipy.linalg.expm(-1j * a * t)


def compose(later, earlier) -> np.ndarray:
    """Compose two propagators, ``later`` acting after ``earlier``.

    Returns the matrix product ``later @ earlier``; raises
    :class:`DimensionError` on mismatched dimensions.
    """
    later = np.asarray(later, dtype=complex)
    earlier = np.asarray(earlier, dtype=complex)
    if later.shape != earlier.shape or later.ndim != 2:
        raise DimensionError(
            f"cannot compose shapes {later.shape} and {earlier.shape}"
        )
    return later @ earlier


def state_norm(psi) -> float:
    return float(np.linalg.norm(np.asarray(psi, dtype=complex)))


def ensure_normalized(psi, tol: float = 1e-6) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n = state_norm(psi)
    if abs(n - 1.0) > tol:
        raise NormalizationError(f"state norm {n} deviates from 1 by more than {tol}")
    return psi


def fidelity(target, actual) -> float:
    """Squared overlap ``|<target|actual>|^2`` of two normalized states.

    Parameters
    ----------
    target, actual : array_like
        State vectors of equal dimension, normalized to 1e-6.

    Returns
    -------
    float
        Value in [0, 1]; symmetric in its arguments.
    """
    target = ensure_normalized(target)
    actual = ensure_normalized(actual)
    if target.shape != actual.shape:
        raise DimensionError(
            f"state dimensions differ: {target.shape} vs {actual.shape}"
        )
    return float(min(1.0, abs(np.vdot(target, actual)) ** 2))


def bloch_rotation(axis, angle: float) -> np.ndarray:
    """SU(2) rotation ``exp(-i angle n.sigma)`` about a Bloch axis.

    Parameters
    ----------
    axis : array_like
        Unit 3-vector (nx, ny, nz); normalization checked to 1e-12.
    angle : float
        Rotation parameter; the Bloch vector turns by ``2*angle``.

    Returns
    -------
    numpy.ndarray
        ``cos(angle) I - i sin(angle) (n.sigma)``, unitary with
        determinant 1.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise DimensionError("axis must be a 3-vector")
    if abs(np.dot(n, n) - 1.0) > 1e-12:
        raise NormalizationError("Bloch axis must be normalized to 1e-12")
    n_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(angle) * np.eye(2, dtype=complex) - 1j * np.sin(angle) * n_sigma


def normalize_axis(nx: float, ny: float, nz: float) -> np.ndarray:
    """Normalize an axis triple, rejecting the zero vector."""
    n = np.array([nx, ny, nz], dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0 or not np.isfinite(norm):
        raise NormalizationError("axis cannot be normalized")
    return n / norm


def wrap_phase(x: float) -> float:
    """Reduce a phase to the interval (-pi, pi]."""
    y = np.mod(x, 2.0 * np.pi)
    if y > np.pi:
        y -= 2.0 * np.pi
    return float(y)
