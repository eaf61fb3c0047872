"""Hierarchical phase design and sequence assembly.

The designed train consists of N1 x N2 x N3 identical pulse pairs
(N1 = 2 fixed) that differ only in their constant phases:

* level 1 nullifies the bright-excited transition of every two-pair
  unit exactly: the Stokes phases of the unit's pairs differ by
  pi - 2 alpha, with alpha the single-pair dynamical phase;
* level 2 concatenates N2 units with extra per-unit offsets that push
  the low-order response to a fractional deviation of alpha to zero;
* level 3 concatenates N3 such blocks, shifting the Stokes-pump
  relative phase per block, which steers the rotation axis of every
  block on the Bloch sphere of span{|g>, |f>} and compensates the
  residual rotation-angle deviation in either the transfer population
  (PC) or the full fidelity (FC) of a target state.

Assembly bookkeeping (phase of pair p in unit u of block b):

    Theta_b  = base_phase + S_b           (S_b: summed level-3 diffs)
    theta_s  = Theta_b + L_u + p (pi - 2 alpha)
    theta_p  = theta_s + Theta_b          (i.e. theta_sp = -Theta_b)

so the Stokes staircase shows all three hierarchy levels and every
block's relative phase, hence its Bloch azimuth, advances with the
level-3 staircase.  The base phase is the free knob that sets the
relative phase of the final superposition.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import comb, factorial, log2

import numpy as np
from scipy.optimize import minimize

from . import models
from .errors import (DomainError, NoSolutionError, PrecisionWarning, SpecError,
                     UseNumericError)
from .frames import PairCharacterization
from .linalg import wrap_phase
from .pulses import SPPulsePair

DEFAULT_SEED = 42
DEFAULT_RESTARTS = 32


# ---------------------------------------------------------------------------
# level 1


def level1_phase(alpha: float) -> float:
    """Stokes phase difference pi - 2 alpha of a two-pair unit, in (-pi, pi].

    Nullifies the unit's bright-excited transition exactly, for any
    transition amplitude |r| < 1 (the design is independent of r).
    """
    if not np.isfinite(alpha):
        raise DomainError("alpha must be finite")
    return wrap_phase(np.pi - 2.0 * alpha)


# ---------------------------------------------------------------------------
# level 2


def level2_phases_pow2(alpha: float, M: int) -> np.ndarray:
    """Cumulative per-unit offsets of the 2^M-unit cascade.

    Depth m of the cascade adds pi - 2^{m+1} alpha to the later half of
    every 2^m-unit group; the returned vector (length 2^M, first entry
    0) is the summed offset of each unit.  The chain is then accurate
    to deviation order M+1.
    """
    if M < 1:
        raise DomainError("cascade depth M must be >= 1")
    offsets = [0.0]
    for m in range(1, M + 1):
        step = np.pi - 2.0 ** (m + 1) * alpha
        offsets = offsets + [u + step for u in offsets]
    return np.array(offsets)


def level2_phases_three(alpha: float) -> tuple:
    """Offsets (theta'_21, theta'_32) of the three-unit chain.

    Three equal-magnitude phasors close only at mutual 2 pi/3 spacing,
    so both consecutive differences are equal; the principal family
    2 arctan[(sqrt(3) - 2 sin 4 alpha)/(2 cos 4 alpha - 1)]
    (= 2 pi/3 - 4 alpha mod 2 pi) is returned, evaluated through atan2
    so the 2 cos 4 alpha = 1 branch point is regular.  The mirror
    family is the negated spacing.
    """
    step = 2.0 * np.arctan2(np.sqrt(3.0) - 2.0 * np.sin(4.0 * alpha),
                            2.0 * np.cos(4.0 * alpha) - 1.0)
    step = wrap_phase(step)
    return (step, step)


def _nullable_orders(n2: int) -> int:
    return int(log2(n2))


def level2_phases_numeric(alpha: float, r: float, n2: int,
                          seed: int = DEFAULT_SEED,
                          restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Consecutive unit phase differences for an N2-unit chain, solved
    numerically.

    Minimizes the weighted squared low-order derivatives of the
    bright-excited amplitude with a multistart Nelder-Mead simplex
    (deterministic for fixed seed; ties resolved by restart order).
    Orders 1..floor(log2 N2) are nullifiable and must come out below
    1e-6 each; one more order is included in the objective with a small
    weight to prefer flat solutions among the degenerate optima.

    Returns
    -------
    numpy.ndarray
        Differences (theta'_21, ..., theta'_{N2,N2-1}), length N2 - 1.

    Raises
    ------
    NoSolutionError
        If no restart drives the nullifiable orders below tolerance;
        carries the best attempt.
    """
    if not 2 <= n2 <= 8:
        raise DomainError("numeric level-2 solver supports 2 <= N2 <= 8")
    if not 0.0 < abs(r) < 1.0:
        raise DomainError("need 0 < |r| < 1")
    k_null = _nullable_orders(n2)
    k_obj = k_null + 1
    weights = 4.0 ** -np.arange(1, k_obj + 1)

    def objective(diffs):
        offsets = np.concatenate([[0.0], np.cumsum(diffs)])
        d = models.transition_derivatives(r, alpha, offsets, k_obj)
        return float(np.dot(weights, d[1:] ** 2))

    def residual(diffs):
        offsets = np.concatenate([[0.0], np.cumsum(diffs)])
        return float(np.max(models.transition_derivatives(r, alpha, offsets,
                                                          k_null)[1:]))

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, n2 - 1)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-16,
                                "maxiter": 4000, "maxfev": 6000})
        if best is None or res.fun < best.fun:
            best = res
    diffs = np.array([wrap_phase(x) for x in best.x])
    if residual(diffs) > 1e-6:
        raise NoSolutionError(
            f"level-2 solver left residual {residual(diffs):.2e} for N2={n2}",
            best_phases=diffs, best_objective=best.fun)
    return diffs


def level2_unit_offsets(alpha: float, n2: int, r: float = None,
                        seed: int = DEFAULT_SEED) -> np.ndarray:
    """Cumulative per-unit offsets for any N2 (dispatching by structure).

    Powers of two use the cascade, N2 = 3 the closed form, anything
    else the numeric solver (which needs r).
    """
    if n2 < 1:
        raise SpecError("N2 must be positive")
    if n2 == 1:
        return np.zeros(1)
    if n2 & (n2 - 1) == 0:
        return level2_phases_pow2(alpha, int(log2(n2)))
    if n2 == 3:
        return np.concatenate([[0.0], np.cumsum(level2_phases_three(alpha))])
    if r is None:
        raise SpecError(f"N2={n2} needs the numeric solver; pass r")
    return np.concatenate([[0.0],
                           np.cumsum(level2_phases_numeric(alpha, abs(r), n2, seed))])


def _fd_derivative(f, k: int, h: float = 1e-3, refinements: int = 2):
    """k-th central finite difference with Richardson extrapolation."""
    if k == 0:
        return f(0.0)

    def stencil(hh):
        return sum((-1) ** j * comb(k, j) * f((k / 2.0 - j) * hh)
                   for j in range(k + 1)) / hh ** k

    vals = [stencil(h / 2 ** i) for i in range(refinements + 1)]
    for level in range(1, refinements + 1):
        fac = 4.0 ** level
        vals = [(fac * vals[i + 1] - vals[i]) / (fac - 1.0)
                for i in range(len(vals) - 1)]
    return vals[0]


def taylor_coeffs_Ueb(offsets, alpha: float, r: float, max_order: int,
                      step: float = 1e-3) -> np.ndarray:
    """|d^k U_eb / d(dalpha)^k| at zero deviation, k = 0..max_order.

    Central finite differences of the complex chain amplitude with two
    Richardson refinement levels (step 1e-3); differentiating the
    complex amplitude rather than its modulus keeps the estimate
    well-conditioned at the design point, where the modulus has a
    root.  Accuracy ~1e-7 for the orders a designed chain leaves small.
    """
    if max_order > 6:
        warnings.warn("finite differences above order 6 are noise-dominated",
                      PrecisionWarning, stacklevel=2)
    offsets = tuple(float(x) for x in offsets)

    def amp(d):
        return models.chain_transition_amplitude(d, r, alpha, offsets)

    return np.array([abs(_fd_derivative(amp, k, step))
                     for k in range(max_order + 1)])


# ---------------------------------------------------------------------------
# level 3


@dataclass(frozen=True)
class TargetState:
    """Final-state target cos(a)|g> + sin(a) e^{i chi}|f>.

    Either the superposition angle ``alpha`` or the transfer population
    ``p_f`` = sin^2(alpha) may be given (both, if consistent).  ``chi``
    is the relative phase; see :func:`ctqd.models.target_vector` for the
    sign convention tying it to the computational basis.
    """

    alpha: float = None
    chi: float = 0.0
    p_f: float = None

    def __post_init__(self):
        if self.alpha is None and self.p_f is None:
            raise SpecError("target needs alpha or p_f")
        if self.p_f is not None and not 0.0 <= self.p_f <= 1.0:
            raise DomainError("p_f must lie in [0, 1]")
        if self.alpha is not None and self.p_f is not None:
            if abs(np.sin(self.alpha) ** 2 - self.p_f) > 1e-9:
                raise SpecError("inconsistent target: p_f != sin^2(alpha)")

    @property
    def angle(self) -> float:
        if self.alpha is not None:
            return float(self.alpha)
        return float(np.arcsin(np.sqrt(self.p_f)))

    @property
    def population(self) -> float:
        if self.p_f is not None:
            return float(self.p_f)
        return float(np.sin(self.alpha) ** 2)

    def vector(self) -> np.ndarray:
        return models.target_vector(self.angle, self.chi)


def level3_pc_three(p_f: float) -> tuple:
    """Closed-form (theta''_21, theta''_32) of the three-block
    population-compensating design.

    All sign branches of
    2 arctan[+-(sqrt(1 - P^2) +- sqrt(2P - P^2))] are enumerated; the
    returned branch satisfies the zero- and first-order conditions to
    1e-9 and minimizes the curvature of the transfer population.
    """
    if not 0.0 <= p_f <= 1.0:
        raise DomainError("population must lie in [0, 1]")
    u = np.sqrt(max(0.0, 1.0 - p_f * p_f))
    v = np.sqrt(max(0.0, p_f * (2.0 - p_f)))
    candidates = []
    for s_out in (1.0, -1.0):
        for s_in in (1.0, -1.0):
            t21 = 2.0 * np.arctan(s_out * (u + s_in * v))
            t32 = 2.0 * np.arctan(s_out * (u - s_in * v))
            if (abs(models.pc_population_zero(t21, t32) - p_f) < 1e-9
                    and abs(models.pc_population_slope(t21, t32)) < 1e-9):
                curvature = abs(models.population_taylor((t21, t32), 2)[2])
                candidates.append((curvature, len(candidates), t21, t32))
    if not candidates:
        raise NoSolutionError(f"no branch satisfies the conditions at P_f={p_f}")
    # curvature ties (exact mirror branches) resolve to the first branch
    # in enumeration order, which is the published sign choice
    _, _, t21, t32 = min(candidates, key=lambda c: (round(c[0], 9), c[1]))
    return (float(t21), float(t32))


def level3_pc_numeric(p_f: float, n3: int, seed: int = DEFAULT_SEED,
                      restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Block phase differences of an N3-block population-compensating
    design (numeric).

    Holds the zero-deviation transfer at ``p_f`` and nullifies the
    first (N3 - 1)/2 derivatives with respect to the common
    rotation-angle deviation.
    """
    if n3 < 3:
        raise DomainError("numeric level-3 design needs N3 >= 3")
    if not 0.0 <= p_f <= 1.0:
        raise DomainError("population must lie in [0, 1]")
    k_null = (n3 - 1) // 2
    weights = 4.0 ** -np.arange(1, k_null + 1)

    def residuals(diffs):
        c = models.population_taylor(tuple(diffs), k_null)
        ders = np.array([c[k] * factorial(k) for k in range(k_null + 1)])
        return abs(ders[0] - p_f), np.abs(ders[1:])

    def objective(diffs):
        r0, rk = residuals(diffs)
        return float(r0 ** 2 + np.dot(weights, rk ** 2))

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, n3 - 1)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-16,
                                "maxiter": 4000, "maxfev": 6000})
        if best is None or res.fun < best.fun:
            best = res
    diffs = np.array([wrap_phase(x) for x in best.x])
    r0, rk = residuals(diffs)
    if r0 > 1e-8 or (len(rk) and np.max(rk) > 1e-6):
        raise NoSolutionError(
            f"PC solver residuals {r0:.2e}/{np.max(rk):.2e} for N3={n3}",
            best_phases=diffs, best_objective=best.fun)
    return diffs


def level3_fc_three(target: TargetState, theta1: float = 0.0) -> tuple:
    """Analytic (theta''_21, theta''_32) of the three-block
    fidelity-compensating design for the equal superposition.

    Enumerates the known solution families of the zero/first-order
    fidelity conditions (valid only for target angle pi/4) and keeps
    the member with the smallest second-order coefficient.

    Raises
    ------
    UseNumericError
        If the target is not the equal superposition.
    """
    if abs(target.angle - np.pi / 4) > 1e-12:
        raise UseNumericError("analytic family covers only the pi/4 target")
    chi = target.chi
    candidates = []
    for m in (-1, 0, 1):
        candidates.append((m * np.pi, 1.5 * np.pi - theta1 - chi + 2 * m * np.pi))
        candidates.append((0.75 * np.pi - 0.5 * (theta1 + chi) + m * np.pi,
                           2 * m * np.pi))
        # families with a pinned theta1 apply only when it matches
        for sgn in (1.0, -1.0):
            if abs(wrap_phase(theta1 - (0.5 * np.pi - sgn * np.pi / 3 - chi))) < 1e-9:
                candidates.append((sgn * 2.0 * np.pi / 3 + 4 * m * np.pi,
                                   2 * m * np.pi))
            if abs(wrap_phase(theta1 - (1.5 * np.pi - sgn * 2 * np.pi / 3 - chi))) < 1e-9:
                candidates.append((sgn * 4.0 * np.pi / 3 + 4 * m * np.pi,
                                   2 * m * np.pi))
        if abs(wrap_phase(theta1 - (0.5 * np.pi - chi + 2 * m * np.pi))) < 1e-9:
            candidates.append((0.123, np.pi))  # t21 arbitrary on this family
    valid = []
    for t21, t32 in candidates:
        if (abs(models.fc_f0(theta1, t21, t32, chi) - 1.0) < 1e-9
                and abs(models.fc_f1(theta1, t21, t32, chi)) < 1e-9):
            f2 = models.fidelity_taylor(theta1, (t21, t32), np.pi / 4, chi, 2)[2]
            valid.append((abs(f2), wrap_phase(t21), wrap_phase(t32)))
    if not valid:
        raise NoSolutionError("no analytic family member satisfies the conditions")
    _, t21, t32 = min(valid, key=lambda c: c[0])
    return (t21, t32)


def level3_fc_numeric(target: TargetState, n3: int, seed: int = DEFAULT_SEED,
                      restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Block phase differences of an N3-block fidelity-compensating
    design (numeric).

    The base phase is eliminated analytically inside the objective (it
    only rotates the final relative phase), leaving the differences to
    maximize flatness of the fidelity in the rotation-angle deviation.
    """
    if n3 < 3:
        raise DomainError("numeric level-3 design needs N3 >= 3")
    k_null = (n3 - 1) // 2
    weights = 4.0 ** -np.arange(1, k_null + 1)
    a_t, chi = target.angle, target.chi

    def coeffs(diffs):
        t1 = models.align_base_phase(tuple(diffs), a_t, chi)
        c = models.fidelity_taylor(t1, tuple(diffs), a_t, chi, k_null)
        return np.array([c[k] * factorial(k) for k in range(k_null + 1)])

    def objective(diffs):
        f = coeffs(diffs)
        return float((f[0] - 1.0) ** 2 + np.dot(weights, f[1:] ** 2))

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, n3 - 1)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-16,
                                "maxiter": 4000, "maxfev": 8000})
        if best is None or res.fun < best.fun:
            best = res
    diffs = np.array([wrap_phase(x) for x in best.x])
    f = coeffs(diffs)
    if abs(f[0] - 1.0) > 1e-8 or (len(f) > 1 and np.max(np.abs(f[1:])) > 1e-6):
        raise NoSolutionError(
            f"FC solver residuals f0-1={f[0]-1:.2e}, max|f_k|={np.max(np.abs(f[1:])):.2e}",
            best_phases=diffs, best_objective=best.fun)
    return diffs


# ---------------------------------------------------------------------------
# assembly


@dataclass(frozen=True)
class HierarchySpec:
    """Concatenation depths and third-level mode.

    N1 = 2 always; ``level3_mode`` is "pc", "fc" or "none" ("none"
    requires N3 = 1: a bare level-2 block).
    """

    n2: int
    n3: int
    level3_mode: str = "pc"
    target: TargetState = None

    N1 = 2

    def __post_init__(self):
        if self.n2 < 1 or self.n3 < 1:
            raise SpecError("N2 and N3 must be positive")
        if self.level3_mode not in ("pc", "fc", "none"):
            raise SpecError(f"unknown level-3 mode {self.level3_mode!r}")
        if self.level3_mode == "none" and self.n3 != 1:
            raise SpecError("N3 > 1 requires a level-3 mode")
        if self.level3_mode != "none" and self.n3 > 1 and self.target is None:
            raise SpecError("level-3 design needs a target state")

    @property
    def n_pairs(self) -> int:
        return self.N1 * self.n2 * self.n3


@dataclass(frozen=True)
class PhaseProvenance:
    """Additive contributions to one pair's Stokes phase.

    theta_s  = wrap(((base + level3) + level2) + level1)
    theta_p  = wrap(theta_s_raw + (base + level3))

    Stored unreduced so the audit can replay the exact float arithmetic.
    """

    base: float
    level3: float
    level2: float
    level1: float

    def theta_s_raw(self) -> float:
        return ((self.base + self.level3) + self.level2) + self.level1

    def theta_p_raw(self) -> float:
        return self.theta_s_raw() + (self.base + self.level3)


@dataclass
class Sequence:
    """Fully resolved pulse train plus the bookkeeping that produced it."""

    pairs: list
    provenance: list
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def audit(self) -> bool:
        """Replay the provenance arithmetic; must match bit for bit."""
        for pair, prov in zip(self.pairs, self.provenance):
            if pair.theta_s != wrap_phase(prov.theta_s_raw()):
                return False
            if pair.theta_p != wrap_phase(prov.theta_p_raw()):
                return False
        return True

    def to_json(self, path=None, indent=2) -> str:
        doc = {
            "meta": self.meta,
            "pairs": [
                {**pair.to_dict(),
                 "provenance": {"base": prov.base, "level3": prov.level3,
                                "level2": prov.level2, "level1": prov.level1}}
                for pair, prov in zip(self.pairs, self.provenance)
            ],
        }
        text = json.dumps(doc, indent=indent)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_json(cls, source) -> "Sequence":
        if isinstance(source, (str, bytes)) and not str(source).lstrip().startswith("{"):
            with open(source) as fh:
                doc = json.load(fh)
        elif hasattr(source, "read"):
            doc = json.load(source)
        else:
            doc = json.loads(source)
        pairs, prov = [], []
        for entry in doc["pairs"]:
            pairs.append(SPPulsePair.from_dict(entry))
            p = entry.get("provenance", {})
            prov.append(PhaseProvenance(p.get("base", 0.0), p.get("level3", 0.0),
                                        p.get("level2", 0.0), p.get("level1", 0.0)))
        return cls(pairs, prov, doc.get("meta", {}))


def level3_diffs(spec: HierarchySpec, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Third-level block differences for a hierarchy spec."""
    if spec.n3 == 1:
        return np.zeros(0)
    if spec.level3_mode == "pc":
        if spec.n3 == 3:
            return np.array(level3_pc_three(spec.target.population))
        return level3_pc_numeric(spec.target.population, spec.n3, seed)
    if spec.n3 == 3:
        try:
            return np.array(level3_fc_three(spec.target))
        except UseNumericError:
            pass
    return level3_fc_numeric(spec.target, spec.n3, seed)


def solve_base_phase(spec: HierarchySpec, seed: int = DEFAULT_SEED,
                     diffs=None) -> float:
    """Base Stokes phase that aligns the final state with the target.

    ``diffs`` overrides the third-level differences (they must match
    what the sequence is assembled with; solutions are not unique, and
    each carries its own alignment).
    """
    if spec.target is None:
        return 0.0
    if diffs is None:
        diffs = level3_diffs(spec, seed)
    return models.align_base_phase(tuple(diffs), spec.target.angle,
                                   spec.target.chi)


def calibrate_base_phase(spec: HierarchySpec, base_pair: SPPulsePair,
                         characterization: PairCharacterization,
                         target: TargetState = None, seed: int = DEFAULT_SEED,
                         cfg=None, level3_diffs_override=None) -> float:
    """Base phase aligned by direct simulation instead of the model.

    :func:`solve_base_phase` assumes every designed block rotates by
    pi/4; pulses tuned for other per-block angles shift the final
    relative phase by a constant this routine measures: the sequence is
    simulated once at base 0, the final relative phase read off, and
    the base shifted by the difference (the shift enters the phase with
    unit slope).
    """
    from .linalg import KET_G
    from .simulate import DEFAULT_CONFIG, propagate_sequence

    target = target if target is not None else spec.target
    if target is None:
        raise SpecError("alignment needs a target state")
    cfg = cfg if cfg is not None else DEFAULT_CONFIG
    seq0 = assemble(spec, base_pair, characterization, base_phase=0.0,
                    seed=seed, level3_diffs_override=level3_diffs_override)
    psi = propagate_sequence(seq0, cfg=cfg) @ KET_G
    chi0 = float(np.angle(psi[1]) - np.angle(psi[0]))
    # target convention: arg(psi_f/psi_g) of the target is -chi
    return wrap_phase(-target.chi - chi0)


def assemble(spec: HierarchySpec, base_pair: SPPulsePair,
             characterization: PairCharacterization,
             base_phase: float = None, seed: int = DEFAULT_SEED,
             level2_offsets_override=None, level3_diffs_override=None) -> Sequence:
    """Emit the full N1 x N2 x N3 train with resolved absolute phases.

    Parameters
    ----------
    spec : HierarchySpec
    base_pair : SPPulsePair
        Pulse whose envelope/detuning every pair copies.  Its theta_s is
        the default base phase; its theta_p is ignored (the pump phase
        follows from the relative-phase bookkeeping, see module
        docstring).
    characterization : PairCharacterization
        Extracted at nominal parameters from ``base_pair``.
    base_phase : float, optional
        Overrides the base Stokes phase (e.g. the solved alignment).
    seed : int
        Seed for any numeric phase solver the spec requires.
    level2_offsets_override, level3_diffs_override : array_like, optional
        Bypass the designers with explicit phases, e.g. to reproduce a
        published phase table (numeric solutions are not unique).

    The level-3 differences and the base phase must come from the same
    solution; mixing a published base with self-solved differences
    misaligns the final relative phase.
    """
    alpha = characterization.alpha
    lvl1 = level1_phase(alpha)
    if level2_offsets_override is not None:
        unit_offsets = np.asarray(level2_offsets_override, dtype=float)
        if unit_offsets.shape != (spec.n2,):
            raise SpecError("level-2 override must give one offset per unit")
    else:
        unit_offsets = level2_unit_offsets(alpha, spec.n2,
                                           r=abs(characterization.r), seed=seed)
    if level3_diffs_override is not None:
        diffs3 = np.asarray(level3_diffs_override, dtype=float)
        if diffs3.shape != (spec.n3 - 1,):
            raise SpecError("level-3 override must give N3 - 1 differences")
    else:
        diffs3 = level3_diffs(spec, seed)
    block_offsets = np.concatenate([[0.0], np.cumsum(diffs3)])
    base = float(base_phase if base_phase is not None else base_pair.theta_s)

    pairs, prov = [], []
    for b in range(spec.n3):
        for u in range(spec.n2):
            for p in range(2):
                rec = PhaseProvenance(base, float(block_offsets[b]),
                                      float(unit_offsets[u]), p * lvl1)
                pairs.append(base_pair.with_phases(
                    wrap_phase(rec.theta_s_raw()), wrap_phase(rec.theta_p_raw())))
                prov.append(rec)

    meta = {
        "n1": spec.N1, "n2": spec.n2, "n3": spec.n3,
        "level3_mode": spec.level3_mode,
        "alpha": alpha, "alpha_mod_pi": characterization.alpha_mod_pi,
        "r_abs": abs(characterization.r), "s": characterization.s,
        "level1_phase": lvl1,
        "level2_offsets": [float(x) for x in unit_offsets],
        "level3_diffs": [float(x) for x in diffs3],
        "base_phase": base,
        "seed": seed,
    }
    if spec.target is not None:
        meta["target"] = {"alpha": spec.target.angle, "chi": spec.target.chi,
                          "p_f": spec.target.population}
    seq = Sequence(pairs, prov, meta)
    if len(seq) != spec.n_pairs:
        raise SpecError("assembled length disagrees with the hierarchy spec")
    return seq
