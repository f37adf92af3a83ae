"""Command-line surface: construction, decomposition, norms, verification.

Commands: rule, frame, decompose, reconstruct, norms, decay, shift-study,
verify.  Configuration comes from an optional JSON file plus flags (flags
win); NEEDLET_NODE_BUDGET overrides the node budget.  All CSV output uses
a header row, comma separators, and 17-significant-digit floats, so equal
configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import function_spaces as fs
from . import hermite_core as hc
from . import needlet_frame as nf
from . import quadrature as quad
from . import verification
from .errors import NeedletError, ParameterError, ResourceError


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass
class RunConfig:
    dimension: int = 1
    delta: float = 0.025
    j_max: int = 3
    cutoff: str = "quadratic"
    grid_radius: float | None = None
    points_per_unit: int | None = None
    node_budget: int = quad.DEFAULT_NODE_BUDGET
    output_dir: str = "."

    def to_json(self) -> str:
        payload = {f.name: getattr(self, f.name) for f in fields(self)}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        cfg = cls()
        if path:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ParameterError(f"unknown config keys: {sorted(unknown)}")
            for key, value in data.items():
                if key == "cutoff" and isinstance(value, dict):
                    value = value.get("kind", "quadratic")
                setattr(cfg, key, value)
        env_budget = os.environ.get("NEEDLET_NODE_BUDGET")
        if env_budget:
            cfg.node_budget = int(env_budget)
        return cfg

    def apply_flags(self, args: argparse.Namespace) -> "RunConfig":
        for name in ("dimension", "delta", "j_max", "cutoff", "node_budget"):
            val = getattr(args, name, None)
            if val is not None:
                setattr(self, name, val)
        if getattr(args, "grid_radius", None) is not None:
            self.grid_radius = args.grid_radius
        if getattr(args, "points_per_unit", None) is not None:
            self.points_per_unit = args.points_per_unit
        if getattr(args, "output_dir", None) is not None:
            self.output_dir = args.output_dir
        return self

    def build_frame(self) -> nf.NeedletFrame:
        return nf.build_frame(
            d=self.dimension,
            delta=self.delta,
            j_max=self.j_max,
            cutoff=self.cutoff,
            node_budget=self.node_budget,
        )

    def grid_for(self, frame: nf.NeedletFrame) -> fs.GridSpec:
        radius = self.grid_radius
        if radius is None:
            radius = frame.max_node + 1.0
        ppu = self.points_per_unit
        if ppu is None:
            ppu = 4 * 2**frame.j_max
        return fs.GridSpec(radius=radius, points_per_unit=ppu)


def _out_path(cfg: RunConfig, arg_out: str | None, default_name: str) -> str:
    if arg_out:
        return arg_out
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, default_name)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _parse_scalar(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_function(
    spec: str, cfg: RunConfig, degree: int | None, quad_order: int | None
) -> hc.HermiteExpansion:
    """Parse ``hermite:<json>`` or ``bump:width,center...`` function specs."""
    if spec.startswith("hermite:"):
        try:
            data = json.loads(spec[len("hermite:") :])
            dim = int(data.get("dim", cfg.dimension))
            coeffs = {tuple(int(a) for a in alpha): float(c) for alpha, c in data["coeffs"]}
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed hermite spec: {exc}") from exc
        degree = max((sum(a) for a in coeffs), default=0)
        return hc.HermiteExpansion(dim, degree, coeffs)
    if spec.startswith("bump:"):
        try:
            parts = [float(v) for v in spec[len("bump:") :].split(",")]
        except ValueError as exc:
            raise ParameterError(f"malformed bump spec: {exc}") from exc
        if not parts:
            raise ParameterError("bump spec needs at least a width")
        width = parts[0]
        center = parts[1:] or [0.0]
        if len(center) == 1 and cfg.dimension > 1:
            center = center * cfg.dimension
        if degree is None:
            degree = min(4**cfg.j_max, 256)
        if quad_order is None:
            quad_order = 2 * degree + 16
        bump = fs.smooth_bump(width, np.asarray(center), dim=cfg.dimension)
        return hc.project_function(bump, degree, quad_order, dim=cfg.dimension).expansion
    raise ParameterError(f"function spec must start with 'hermite:' or 'bump:', got {spec!r}")


def cmd_rule(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    if args.n < 1:
        raise ParameterError(f"rule order must be >= 1, got {args.n}")
    rule = quad.product_cubature(args.n, args.d, node_budget=cfg.node_budget)
    path = _out_path(cfg, args.out, f"rule_n{args.n}_d{args.d}.csv")
    if args.d == 1:
        base = rule.base
        rows = (
            [str(i), _fmt(base.nodes[i]), _fmt(base.gauss_weights[i]), _fmt(base.christoffel_weights[i])]
            for i in range(base.n)
        )
        _write_csv(path, ["index", "node", "gauss_weight", "christoffel_weight"], rows)
    else:
        rows = (
            [str(i), _fmt(rule.nodes[i, 0]), _fmt(rule.nodes[i, 1]), _fmt(rule.weights[i])]
            for i in range(rule.nodes.shape[0])
        )
        _write_csv(path, ["index", "node_1", "node_2", "weight"], rows)
    print(path)
    return 0


def cmd_frame(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    os.makedirs(cfg.output_dir, exist_ok=True)
    with open(
        os.path.join(cfg.output_dir, "run_config.json"), "w", encoding="utf-8"
    ) as fh:
        fh.write(cfg.to_json())
    manifest_path = os.path.join(cfg.output_dir, "frame_manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(frame.manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.cutoff_table:
        ts = np.linspace(0.0, 4.5, 1001)
        for name, cut in (("a", frame.pair.a_hat), ("b", frame.pair.b_hat)):
            vals = cut(ts)
            _write_csv(
                os.path.join(cfg.output_dir, f"cutoff_{name}.csv"),
                ["t", "value"],
                ([_fmt(t), _fmt(v)] for t, v in zip(ts, vals)),
            )
    coord_cols = [f"xi_{i+1}" for i in range(frame.d)]
    tile_cols = [
        name
        for i in range(frame.d)
        for name in (f"tile_lo_{i+1}", f"tile_hi_{i+1}")
    ]
    for level in frame.levels:
        path = os.path.join(cfg.output_dir, f"frame_level_{level.j}.csv")

        def rows(lev=level):
            for i in range(lev.node_count):
                lo, hi = lev.tile_box(i)
                cells = [str(i)]
                cells += [_fmt(c) for c in lev.nodes[i]]
                cells.append(_fmt(lev.weights[i]))
                for axis in range(lev.d):
                    cells += [_fmt(lo[axis]), _fmt(hi[axis])]
                yield cells

        _write_csv(path, ["index"] + coord_cols + ["weight"] + tile_cols, rows())
    print(manifest_path)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    f = _parse_function(args.function, cfg, args.degree, args.quad_order)
    coeffs = nf.analyze(f, frame)
    path = _out_path(cfg, args.out, "coefficients.csv")
    coord_cols = [f"xi_{i+1}" for i in range(frame.d)]

    def rows():
        for j in sorted(coeffs.level_values):
            values = coeffs.level_values[j]
            level = frame.levels[j]
            for i, v in enumerate(values):
                yield [str(j), str(i)] + [_fmt(c) for c in level.nodes[i]] + [_fmt(v)]

    _write_csv(path, ["level", "node_index"] + coord_cols + ["s_value"], rows())
    print(path)
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    level_values: dict[int, np.ndarray] = {}
    with open(args.coeffs, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        try:
            j_col = header.index("level")
            i_col = header.index("node_index")
            v_col = header.index("s_value")
        except ValueError as exc:
            raise ParameterError(f"coefficient CSV missing column: {exc}") from exc
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            j, i, v = int(parts[j_col]), int(parts[i_col]), float(parts[v_col])
            if j < 0 or j > frame.j_max:
                raise ParameterError(f"coefficient level {j} outside frame depth")
            arr = level_values.setdefault(j, np.zeros(frame.levels[j].node_count))
            arr[i] = v
    coeffs = nf.NeedletCoefficients(frame=frame, level_values=level_values)
    g = nf.synthesize(coeffs, frame)
    path = _out_path(cfg, args.out, "reconstruction.json")
    payload = {
        "dim": g.dim,
        "degree": g.degree,
        "coeffs": [[list(a), c] for a, c in sorted(g.coeffs.items())],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    print(path)
    return 0


def cmd_norms(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    grid = cfg.grid_for(frame)
    f = _parse_function(args.function, cfg, args.degree, args.quad_order)
    alpha = args.alpha
    p = _parse_scalar(args.p)
    q = _parse_scalar(args.q)
    params = fs.SpaceParams(alpha, p, q)
    kind = args.kind
    if kind == "F":
        value = fs.f_continuous_norm(f, params, frame, grid)
    elif kind == "B":
        value = fs.b_continuous_norm(f, params, frame, grid)
    elif kind == "f":
        value = fs.f_sequence_norm(nf.analyze(f, frame), params, frame, grid)
    elif kind == "b":
        value = fs.b_sequence_norm(nf.analyze(f, frame), params, frame)
    elif kind == "E":
        value = fs.best_approx_error(f, args.approx_n, p, grid).value
    elif kind == "A":
        value = fs.approximation_norm(f, alpha, q, p, grid)
    else:
        raise ParameterError(f"unknown norm kind {kind!r}")
    row = [args.id, _fmt(alpha), args.p, args.q, kind, _fmt(value)]
    line = ",".join(row)
    if args.out:
        _write_csv(args.out, ["function_id", "alpha", "p", "q", "norm_kind", "value"], [row])
    print(line)
    return 0


def cmd_decay(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    level = frame.levels[args.level]
    node = args.node if args.node is not None else level.node_count // 2
    report = nf.localization_profile(
        frame, args.level, node, args.k, dx_order=args.deriv
    )
    path = _out_path(cfg, args.out, f"decay_j{args.level}_k{args.k}.csv")
    rows = ([_fmt(o), _fmt(v), _fmt(w)] for o, v, w in report.samples)
    _write_csv(path, ["offset", "kernel", "weighted"], rows)
    print(
        f"level={args.level} node={node} k={args.k} deriv={args.deriv} "
        f"inner_max={_fmt(report.inner_max)} tail_max={_fmt(report.tail_max)}"
    )
    return 0


def cmd_shift_study(args: argparse.Namespace) -> int:
    cfg = RunConfig.load(args.config).apply_flags(args)
    frame = cfg.build_frame()
    shifts = [float(s) for s in args.shifts.split(",") if s]
    params = fs.SpaceParams(args.alpha, _parse_scalar(args.p), _parse_scalar(args.q))
    rows = fs.shift_study(
        args.width, shifts, params, frame, grid=None, degree=args.degree
    )
    path = _out_path(cfg, args.out, "shift_study.csv")
    _write_csv(
        path,
        ["y", "l2", "bH", "fH"],
        ([_fmt(r.y), _fmt(r.l2), _fmt(r.b_norm), _fmt(r.f_norm)] for r in rows),
    )
    print(path)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(verification.SUITES) if args.suite == "all" else [args.suite]
    results = verification.run_suites(names)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failures += not r.passed
        print(f"{status} {r.suite}/{r.name}: {r.detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--dimension", type=int, choices=(1, 2))
    sub.add_argument("--delta", type=float)
    sub.add_argument("--j-max", dest="j_max", type=int)
    sub.add_argument("--cutoff", choices=("quadratic", "dual"))
    sub.add_argument("--grid-radius", dest="grid_radius", type=float)
    sub.add_argument("--points-per-unit", dest="points_per_unit", type=int)
    sub.add_argument("--node-budget", dest="node_budget", type=int)
    sub.add_argument("--output-dir", dest="output_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-needlets",
        description="Hermite needlet frames: rules, decompositions, norms, checks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("rule", help="dump a Gauss-Hermite product rule as CSV")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--d", type=int, default=1, choices=(1, 2))
    sub.add_argument("--out")
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_rule)

    sub = subs.add_parser("frame", help="build a frame; write manifest and levels")
    sub.add_argument("--out-dir", dest="output_dir")
    sub.add_argument(
        "--cutoff-table",
        dest="cutoff_table",
        action="store_true",
        help="also tabulate the cutoff pair as t,value CSV files",
    )
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_frame)

    for name, handler in (("decompose", cmd_decompose), ("norms", cmd_norms)):
        sub = subs.add_parser(name)
        sub.add_argument("--function", required=True, help="hermite:<json> or bump:w,c")
        sub.add_argument("--degree", type=int, help="projection degree for bump specs")
        sub.add_argument("--quad-order", dest="quad_order", type=int)
        sub.add_argument("--out")
        _add_config_flags(sub)
        if name == "norms":
            sub.add_argument("--alpha", type=float, required=True)
            sub.add_argument("--p", required=True)
            sub.add_argument("--q", required=True)
            sub.add_argument(
                "--kind", required=True, choices=("F", "B", "f", "b", "E", "A")
            )
            sub.add_argument("--approx-n", dest="approx_n", type=int, default=0)
            sub.add_argument("--id", default="f0", help="function id for the CSV row")
        sub.set_defaults(func=handler)

    sub = subs.add_parser("reconstruct", help="synthesize from a coefficient CSV")
    sub.add_argument("--coeffs", required=True)
    sub.add_argument("--out")
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_reconstruct)

    sub = subs.add_parser("decay", help="kernel localization profile")
    sub.add_argument("--level", type=int, required=True)
    sub.add_argument("--node", type=int)
    sub.add_argument("--k", type=int, default=6)
    sub.add_argument("--deriv", type=int, default=0, choices=(0, 1))
    sub.add_argument("--out")
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_decay)

    sub = subs.add_parser("shift-study", help="norms of a shifted bump")
    sub.add_argument("--shifts", required=True, help="comma-separated shifts")
    sub.add_argument("--width", type=float, default=1.0)
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--p", default="2")
    sub.add_argument("--q", default="2")
    sub.add_argument("--degree", type=int)
    sub.add_argument("--out")
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_shift_study)

    sub = subs.add_parser("verify", help="run the property suite")
    sub.add_argument(
        "--suite",
        default="all",
        choices=tuple(verification.SUITES) + ("all",),
    )
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except NeedletError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
