"""Error-grid scans, single-point evaluation, and CSV output.

CSV dialect: comma separated, LF line endings, one header row, values
printed with 12 significant digits, and ``#``-prefixed comment lines
carrying metadata (sequence hash, seed, package version).  Writing is
idempotent: re-reading a written file and writing it again reproduces
the bytes exactly (12 significant digits are the documented precision
of the interchange format).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ._version import __version__
from .errors import SpecError
from .linalg import KET_G, fidelity
from .pulses import ErrorModel
from .simulate import (DEFAULT_CONFIG, PropagationConfig, propagate_sequence,
                       trace_populations)

AXIS_PARAMS = ("delta_omega_s", "delta_omega_p", "delta_delta", "delta_t", "stark")
METRICS = ("F", "P_e", "P_f", "P_g")


@dataclass(frozen=True)
class ScanAxis:
    param: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.param not in AXIS_PARAMS:
            raise SpecError(f"unknown scan parameter {self.param!r}; "
                            f"choose from {AXIS_PARAMS}")
        if self.count < 1:
            raise SpecError("axis count must be at least 1")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise SpecError("axis range must be finite")
        if self.count == 1 and self.lo != self.hi:
            raise SpecError("a single-point axis needs lo == hi")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class ScanConfig:
    """Two error axes, requested metrics, and the fidelity target."""

    axis_x: ScanAxis
    axis_y: ScanAxis
    metrics: tuple = ("F", "P_e")
    target: np.ndarray = None

    def __post_init__(self):
        for m in self.metrics:
            if m not in METRICS:
                raise SpecError(f"unknown metric {m!r}")
        if "F" in self.metrics and self.target is None:
            raise SpecError("metric F needs a target state")


@dataclass
class ScanGrid:
    """Row-major scan results: index = ix * ny + iy, x the outer axis."""

    axis_x: ScanAxis
    axis_y: ScanAxis
    metrics: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def area_fraction(self, metric: str, predicate) -> float:
        """Fraction of grid points whose metric satisfies the predicate."""
        vals = self.metrics[metric]
        return float(np.count_nonzero(predicate(vals)) / vals.size)


def error_model(param_x: str, x: float, param_y: str, y: float) -> ErrorModel:
    return ErrorModel(**{param_x: x, param_y: y})


def evaluate_point(seq, err: ErrorModel, target=None,
                   cfg: PropagationConfig = DEFAULT_CONFIG) -> dict:
    """Propagate |g> through the sequence under one error model.

    Returns all metrics: populations of the three levels and, when a
    target is given, the fidelity to it.
    """
    U = propagate_sequence(seq, err, cfg)
    psi = U @ KET_G
    out = {
        "P_g": float(abs(psi[0]) ** 2),
        "P_f": float(abs(psi[1]) ** 2),
        "P_e": float(abs(psi[2]) ** 2),
    }
    if target is not None:
        target = np.asarray(target, dtype=complex)
        if target.shape == (2,):  # {g, f}-subspace target: no |e> component
            target = np.concatenate([target, [0.0]])
        out["F"] = fidelity(target, psi / np.linalg.norm(psi))
    return out


def _scan_rows(args):
    seq_json, config, cfg, ix_list = args
    from .design import Sequence

    seq = Sequence.from_json(seq_json)
    xs = config.axis_x.values()
    ys = config.axis_y.values()
    rows = []
    for ix in ix_list:
        for y in ys:
            err = error_model(config.axis_x.param, float(xs[ix]),
                              config.axis_y.param, float(y))
            rows.append(evaluate_point(seq, err, config.target, cfg))
    return rows


def run_scan(seq, config: ScanConfig, cfg: PropagationConfig = DEFAULT_CONFIG,
             workers: int = 1) -> ScanGrid:
    """Evaluate every grid point independently.

    Rows are statically partitioned across workers and gathered by
    index, so the output is identical for any worker count.
    """
    xs = config.axis_x.values()
    ny = config.axis_y.count
    all_ix = list(range(len(xs)))
    if workers <= 1:
        ys = config.axis_y.values()
        results = []
        for x in xs:
            for y in ys:
                err = error_model(config.axis_x.param, float(x),
                                  config.axis_y.param, float(y))
                results.append(evaluate_point(seq, err, config.target, cfg))
    else:
        seq_json = seq.to_json() if hasattr(seq, "to_json") else None
        if seq_json is None:
            raise SpecError("parallel scans need a serializable Sequence")
        chunks = [all_ix[i::workers] for i in range(workers)]
        ordered = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk, rows in zip(chunks, pool.map(
                    _scan_rows,
                    [(seq_json, config, cfg, chunk) for chunk in chunks])):
                for k, ix in enumerate(chunk):
                    ordered[ix] = rows[k * ny:(k + 1) * ny]
        results = []
        for ix in all_ix:
            results.extend(ordered[ix])

    wanted = tuple(config.metrics) + tuple(
        m for m in ("P_f", "P_g") if m not in config.metrics)
    metrics = {m: np.array([r[m] for r in results])
               for m in wanted if m in results[0]}
    return ScanGrid(config.axis_x, config.axis_y, metrics)


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def sequence_hash(seq) -> str:
    doc = json.loads(seq.to_json()) if hasattr(seq, "to_json") else {}
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _metadata_lines(meta: dict):
    yield f"# ctqd {__version__}"
    for key, value in meta.items():
        yield f"# {key}: {value}"


def write_scan_csv(grid: ScanGrid, path, meta: dict = None) -> None:
    """Write dx, dy and every metric, rows sorted by (dx, dy)."""
    names = [m for m in ("F", "P_e", "P_f", "P_g") if m in grid.metrics]
    xs = grid.axis_x.values()
    ys = grid.axis_y.values()
    ny = len(ys)
    with open(path, "w", newline="\n") as fh:
        for line in _metadata_lines(meta or {}):
            fh.write(line + "\n")
        fh.write(f"# axis_x: {grid.axis_x.param}\n")
        fh.write(f"# axis_y: {grid.axis_y.param}\n")
        fh.write("dx,dy," + ",".join(names) + "\n")
        for ix, x in enumerate(xs):
            for iy, y in enumerate(ys):
                vals = [grid.metrics[m][ix * ny + iy] for m in names]
                fh.write(",".join([_fmt(x), _fmt(y)] + [_fmt(v) for v in vals]) + "\n")


def read_csv(path):
    """Read back a package CSV: (metadata dict, column dict of arrays)."""
    meta, names, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    meta[key.strip()] = value.strip()
                continue
            if names is None:
                names = line.split(",")
                continue
            if line:
                rows.append([float(v) for v in line.split(",")])
    data = np.array(rows) if rows else np.zeros((0, len(names or [])))
    return meta, {name: data[:, k] for k, name in enumerate(names or [])}


def write_trace_csv(trace, path, meta: dict = None,
                    include_amplitudes: bool = False) -> None:
    """Write a population trace; amplitude columns only when asked."""
    cols = ["t", "P_g", "P_f", "P_e"]
    if include_amplitudes:
        cols += ["re_g", "im_g", "re_f", "im_f", "re_e", "im_e"]
    with open(path, "w", newline="\n") as fh:
        for line in _metadata_lines(meta or {}):
            fh.write(line + "\n")
        fh.write(",".join(cols) + "\n")
        for k in range(len(trace.times)):
            row = [trace.times[k], *trace.populations[k]]
            if include_amplitudes:
                for amp in trace.amplitudes[k]:
                    row += [amp.real, amp.imag]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_shape_csv(pair, path, n_samples: int = 1000, meta: dict = None) -> None:
    """Sample the Stokes and pump envelopes of a pair over its window."""
    ts = np.linspace(0.0, pair.T, n_samples)
    ws = pair.omega_s(ts)
    wp = pair.omega_p(ts)
    with open(path, "w", newline="\n") as fh:
        for line in _metadata_lines(meta or {}):
            fh.write(line + "\n")
        fh.write("t,omega_s,omega_p\n")
        for k in range(n_samples):
            fh.write(",".join(_fmt(v) for v in (ts[k], ws[k], wp[k])) + "\n")


def trace_csv(seq, err: ErrorModel, path, init=None,
              cfg: PropagationConfig = DEFAULT_CONFIG, meta: dict = None,
              include_amplitudes: bool = False):
    """Convenience: run a trace and write it."""
    trace = trace_populations(seq, err, init, cfg)
    write_trace_csv(trace, path, meta, include_amplitudes)
    return trace
