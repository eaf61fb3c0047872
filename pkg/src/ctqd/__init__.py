"""Concatenated phase-sequence design for robust transitionless driving
of three-level lambda systems, with a direct time-ordered simulator to
verify every design.

Public surface: pulse shapes and pairs (:mod:`ctqd.shapes`,
:mod:`ctqd.pulses`), dense linear algebra (:mod:`ctqd.linalg`),
dark/bright-frame analysis (:mod:`ctqd.frames`), analytic design models
(:mod:`ctqd.models`), the hierarchy designers and sequence assembly
(:mod:`ctqd.design`), the propagator (:mod:`ctqd.simulate`) and error
scans (:mod:`ctqd.scan`).
"""

from ._version import __version__
from .design import (HierarchySpec, PhaseProvenance, Sequence, TargetState,
                     assemble, calibrate_base_phase, level1_phase,
                     level2_phases_numeric, level2_phases_pow2,
                     level2_phases_three, level2_unit_offsets, level3_diffs,
                     level3_fc_numeric, level3_fc_three, level3_pc_numeric,
                     level3_pc_three, solve_base_phase, taylor_coeffs_Ueb)
from .errors import (ConstraintError, CtqdError, DegenerateError,
                     DimensionError, DomainError, InvalidMatrixError,
                     NoSolutionError, NormalizationError,
                     NotBlockDiagonalError, PrecisionWarning, SpecError,
                     StepCountError, UseNumericError)
from .frames import (EigenFrame, GaugeReport, PairCharacterization,
                     characterize_pair, dark_bright_basis, db_transform,
                     eigensystem, extract_r_alpha, gauge_invariance_check,
                     pair_block, pair_dbe_propagator, sequence_dbe_propagator,
                     to_dbe, unit_rotation_angle, unit_rotation_axis)
from .linalg import (KET_E, KET_F, KET_G, bloch_rotation, compose, fidelity,
                     mat_exp, wrap_phase)
from .pulses import ErrorModel, SPPulsePair, build_hamiltonian
from .scan import (ScanAxis, ScanConfig, ScanGrid, evaluate_point, run_scan,
                   write_scan_csv, write_shape_csv, write_trace_csv)
from .shapes import PulseShape, eval_shape
from .simulate import (PropagationConfig, TraceResult, propagate_pair,
                       propagate_sequence, trace_populations)

__all__ = [name for name in dir() if not name.startswith("_")]
