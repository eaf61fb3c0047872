"""Command-line front end.

Subcommands
-----------
design    Solve the hierarchy phases for a design spec and write the
          sequence JSON; prints the phase report.
simulate  Propagate a sequence under one error model; prints metrics.
scan      Evaluate a 2-D error grid; writes CSV.
trace     Population evolution of a sequence; writes CSV.
shapes    Sample a pulse envelope; writes CSV.

Exit codes: 0 success, 1 runtime failure (e.g. solver gave up),
2 usage or config error.  The environment variable ``CTQD_SEED``
overrides the solver seed from config files; an explicit ``--seed``
flag overrides both.

Design spec JSON::

    {
      "pulse": {"shape": {"kind": "gaussian", "A": 2.381, "tau": 1.0},
                "delta": 0.2802, "mixing_angle": 0.785398163397448},
      "hierarchy": {"n2": 2, "n3": 3, "level3_mode": "pc"},
      "target": {"p_f": 0.5, "chi": 0.0},      # or {"alpha": ..., "chi": ...}
      "base_phase": 0.5237,                     # number or "auto" (default)
      "seed": 42,
      "steps_per_pair": 2000
    }

Scan config JSON::

    {
      "sequence": "seq.json",                   # path or inline design spec
      "axes": [{"param": "delta_omega_s", "min": -0.5, "max": 0.5, "count": 41},
               {"param": "delta_delta",   "min": -0.5, "max": 0.5, "count": 41}],
      "metrics": ["F", "P_e"],
      "target": {"alpha": 0.785398163397448, "chi": 0.0},
      "steps_per_pair": 2000,
      "workers": 1
    }
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._version import __version__
from .design import (HierarchySpec, Sequence, TargetState, assemble,
                     solve_base_phase)
from .errors import CtqdError, NoSolutionError, SpecError
from .frames import characterize_pair
from .pulses import ErrorModel, SPPulsePair
from .scan import (ScanAxis, ScanConfig, error_model, evaluate_point, read_csv,
                   run_scan, sequence_hash, trace_csv, write_scan_csv,
                   write_shape_csv)
from .shapes import PulseShape, shape_from_dict
from .simulate import DEFAULT_CONFIG, PropagationConfig


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read JSON {path!r}: {exc}") from exc


def _target_from(doc) -> TargetState:
    if doc is None:
        return None
    try:
        return TargetState(alpha=doc.get("alpha"), chi=doc.get("chi", 0.0),
                           p_f=doc.get("p_f"))
    except TypeError as exc:
        raise SpecError(f"bad target spec: {exc}") from exc


def _pair_from(doc) -> SPPulsePair:
    if "shape" not in doc:
        raise SpecError("design spec needs pulse.shape")
    shape = shape_from_dict(doc["shape"])
    return SPPulsePair(shape,
                       omega0=doc.get("omega0", 1.0),
                       mixing_angle=doc.get("mixing_angle", np.pi / 4),
                       theta_s=doc.get("theta_s", 0.0),
                       theta_p=doc.get("theta_p", 0.0),
                       delta=doc.get("delta", 0.0))


def _seed(args, doc) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("CTQD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise SpecError(f"CTQD_SEED must be an integer, got {env!r}") from exc
    return int(doc.get("seed", 42))


def _staircase_report(seq: Sequence) -> str:
    meta = seq.meta
    lines = []
    lines.append(f"extracted alpha = {meta['alpha_mod_pi']:.4f} "
                 f"(branch {meta['alpha']:+.4f}), |r| = {meta['r_abs']:.4f}, "
                 f"s = {meta['s']:.4f}")
    lines.append(f"level-1: theta_21 = pi - 2*alpha = {meta['level1_phase']:+.4f}")
    offs = meta["level2_offsets"]
    if len(offs) > 1:
        diffs = [offs[i + 1] - offs[i] for i in range(len(offs) - 1)]
        lines.append("level-2 unit differences: "
                     + " ".join(f"{d:+.4f}" for d in diffs))
    d3 = meta["level3_diffs"]
    if d3:
        lines.append(f"level-3 ({meta['level3_mode']}) block differences: "
                     + " ".join(f"{d:+.4f}" for d in d3))
    lines.append(f"base Stokes phase theta_s1 = {meta['base_phase']:+.4f}")
    lines.append("")
    lines.append("Stokes phase staircase (one step per pair):")
    lo = min(p.theta_s for p in seq.pairs)
    hi = max(p.theta_s for p in seq.pairs)
    span = max(hi - lo, 1e-9)
    n2 = meta["n2"]
    for n, pair in enumerate(seq.pairs, start=1):
        width = int(round(40 * (pair.theta_s - lo) / span))
        block, rest = divmod(n - 1, 2 * n2)
        tags = []
        if rest == 0 and n > 1:
            tags.append("level-3 step")
        elif rest % 2 == 0 and n > 1:
            tags.append("level-2 step")
        elif n > 1:
            tags.append("level-1 step")
        lines.append(f"  pair {n:3d} |{'#' * width:<40s}| theta_s = "
                     f"{pair.theta_s:+.4f}  {' '.join(tags)}")
    return "\n".join(lines)


def cmd_design(args) -> int:
    doc = _load_json(args.spec)
    for key in ("pulse", "hierarchy"):
        if key not in doc:
            raise SpecError(f"design spec is missing the {key!r} section")
    pair = _pair_from(doc["pulse"])
    h = doc["hierarchy"]
    target = _target_from(doc.get("target"))
    spec = HierarchySpec(n2=int(h.get("n2", 1)), n3=int(h.get("n3", 1)),
                         level3_mode=h.get("level3_mode",
                                           "pc" if int(h.get("n3", 1)) > 1 else "none"),
                         target=target)
    seed = _seed(args, doc)
    cfg = PropagationConfig(steps_per_pair=int(doc.get("steps_per_pair", 2000)))
    char = characterize_pair(pair, cfg=cfg)
    base = doc.get("base_phase", "auto")
    if base == "auto" or base is None:
        base = solve_base_phase(spec, seed) if target is not None else pair.theta_s
    seq = assemble(spec, pair, char, base_phase=float(base), seed=seed)
    print(_staircase_report(seq))
    if args.output:
        seq.to_json(args.output)
        print(f"\nwrote {len(seq)}-pair sequence to {args.output} "
              f"(hash {sequence_hash(seq)})")
    return 0


def _error_from_args(args) -> ErrorModel:
    return ErrorModel(delta_omega_s=args.delta_omega_s,
                      delta_omega_p=args.delta_omega_p,
                      delta_delta=args.delta_delta,
                      delta_t=args.delta_t,
                      stark=args.stark)


def _add_error_flags(p):
    p.add_argument("--delta-omega-s", type=float, default=0.0)
    p.add_argument("--delta-omega-p", type=float, default=0.0)
    p.add_argument("--delta-delta", type=float, default=0.0)
    p.add_argument("--delta-t", type=float, default=0.0)
    p.add_argument("--stark", type=float, default=0.0)


def cmd_simulate(args) -> int:
    seq = Sequence.from_json(args.sequence)
    cfg = PropagationConfig(steps_per_pair=args.steps)
    target = None
    if args.target_alpha is not None or args.target_pf is not None:
        target = TargetState(alpha=args.target_alpha, chi=args.target_chi,
                             p_f=args.target_pf).vector()
    out = evaluate_point(seq, _error_from_args(args), target, cfg)
    print(json.dumps(out, indent=2))
    return 0


def cmd_scan(args) -> int:
    doc = _load_json(args.config)
    if "sequence" not in doc or "axes" not in doc:
        raise SpecError("scan config needs 'sequence' and 'axes'")
    if isinstance(doc["sequence"], str):
        seq = Sequence.from_json(doc["sequence"])
    else:
        raise SpecError("inline design specs are not supported here; "
                        "run 'ctqd design' first and point to its output")
    axes = doc["axes"]
    if len(axes) != 2:
        raise SpecError("exactly two axes required")
    ax = [ScanAxis(a["param"], float(a["min"]), float(a["max"]), int(a["count"]))
          for a in axes]
    target_state = _target_from(doc.get("target"))
    metrics = tuple(doc.get("metrics", ["F", "P_e"]))
    config = ScanConfig(ax[0], ax[1], metrics,
                        target_state.vector() if target_state else None)
    cfg = PropagationConfig(steps_per_pair=int(doc.get("steps_per_pair", 2000)))
    workers = args.workers if args.workers else int(doc.get("workers", 1))
    grid = run_scan(seq, config, cfg, workers=workers)
    out = args.output or doc.get("output", "scan.csv")
    write_scan_csv(grid, out, meta={"sequence_hash": sequence_hash(seq),
                                    "seed": _seed(args, doc)})
    print(f"wrote {ax[0].count}x{ax[1].count} grid to {out}")
    return 0


def cmd_trace(args) -> int:
    seq = Sequence.from_json(args.sequence)
    cfg = PropagationConfig(steps_per_pair=args.steps,
                            sample_stride=args.stride)
    trace = trace_csv(seq, _error_from_args(args), args.output,
                      cfg=cfg, meta={"sequence_hash": sequence_hash(seq)},
                      include_amplitudes=args.amplitudes)
    pf = trace.populations[-1]
    print(f"wrote {len(trace.times)} samples to {args.output}; final "
          f"P_g={pf[0]:.6f} P_f={pf[1]:.6f} P_e={pf[2]:.3e}")
    return 0


def cmd_shapes(args) -> int:
    kwargs = {"kind": args.kind, "A": args.A, "T": args.T}
    if args.kind == "gaussian":
        shape = PulseShape.gaussian(args.A, args.tau)
    elif args.kind == "sinusoidal":
        shape = PulseShape.sinusoidal(args.A, args.T, args.tau)
    elif args.kind == "sawtooth":
        shape = PulseShape.sawtooth(args.A, args.T)
    elif args.kind == "triangle":
        shape = PulseShape.triangle(args.A, args.tau, args.T)
    elif args.kind == "trapezoidal":
        shape = PulseShape.trapezoidal(args.A, args.tau1, args.tau2, args.T)
    elif args.kind == "sampled":
        shape = PulseShape.sampled_from_csv(args.table, args.A)
    else:  # pragma: no cover - argparse restricts choices
        raise SpecError(f"unknown shape {args.kind!r}")
    pair = SPPulsePair(shape, mixing_angle=args.mixing_angle)
    write_shape_csv(pair, args.output, n_samples=args.samples, meta=kwargs)
    print(f"wrote {args.samples} samples to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctqd",
                                description="concatenated phase-sequence design "
                                            "and simulation for three-level "
                                            "lambda systems")
    p.add_argument("--version", action="version", version=f"ctqd {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="solve phases and write a sequence")
    d.add_argument("spec", help="design spec JSON")
    d.add_argument("-o", "--output", help="sequence JSON output path")
    d.add_argument("--seed", type=int)
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="single-point metrics of a sequence")
    s.add_argument("sequence", help="sequence JSON")
    s.add_argument("--steps", type=int, default=2000)
    s.add_argument("--target-alpha", type=float)
    s.add_argument("--target-chi", type=float, default=0.0)
    s.add_argument("--target-pf", type=float)
    _add_error_flags(s)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("scan", help="2-D error grid")
    c.add_argument("config", help="scan config JSON")
    c.add_argument("-o", "--output")
    c.add_argument("--workers", type=int, default=0)
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_scan)

    t = sub.add_parser("trace", help="population evolution CSV")
    t.add_argument("sequence", help="sequence JSON")
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--steps", type=int, default=2000)
    t.add_argument("--stride", type=int, default=20)
    t.add_argument("--amplitudes", action="store_true",
                   help="include Re/Im amplitude columns")
    _add_error_flags(t)
    t.set_defaults(func=cmd_trace)

    h = sub.add_parser("shapes", help="sample a pulse envelope")
    h.add_argument("kind", choices=("gaussian", "sinusoidal", "sawtooth",
                                    "triangle", "trapezoidal", "sampled"))
    h.add_argument("-o", "--output", required=True)
    h.add_argument("--A", type=float, default=1.0)
    h.add_argument("--T", type=float, default=1.0)
    h.add_argument("--tau", type=float, default=1.0)
    h.add_argument("--tau1", type=float, default=0.2)
    h.add_argument("--tau2", type=float, default=0.2)
    h.add_argument("--table", help="CSV table for the sampled shape")
    h.add_argument("--mixing-angle", type=float, default=np.pi / 4)
    h.add_argument("--samples", type=int, default=1000)
    h.set_defaults(func=cmd_shapes)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoSolutionError as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        if exc.best_phases is not None:
            print(f"best phases found: {np.round(exc.best_phases, 6).tolist()}",
                  file=sys.stderr)
        return 1
    except CtqdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
