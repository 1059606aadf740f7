"""Command-line interface: ``lieflow <subcommand> --config run.json``.

Exit codes: 0 success, 1 computational error (the error class name is
printed), 2 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, Context, coefficients_to_json, config_hash, load
from .errors import LieflowError, NonConstantCharacteristics
from .fourier import decay_profile, sugiura_zeta
from .generator import apply_generator, as_operator
from .groups import GroupElement, GroupId, exp_params, haar_quadrature
from .pmp import (
    almost_positive_check,
    anchored_test_functions,
    extract_characteristics,
    pmp_check,
    random_test_functions,
)
from .simulate import PathConfig, empirical_semigroup, simulate_paths
from .symbol import assemble_symbol, evolve_semigroup


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def fmt(x: float) -> str:
    """Shortest round-trip representation; stable across runs."""
    x = float(x)
    if x == 0.0:
        return "0.0"  # folds -0.0
    return repr(x)


def label_text(label) -> str:
    return ";".join(str(v) for v in label)


def _csv(header: str, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash: {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return 0.0 if v == 0.0 else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _read_config(args) -> dict:
    if not args.config:
        raise ConfigError("a configuration file is required (--config)")
    if args.config == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
    if not text.strip():
        raise ConfigError("field <root>: empty configuration")
    cfg = load(text)
    seed = os.environ.get("LIEFLOW_SEED")
    if seed is not None:
        try:
            cfg["seed"] = int(seed)
        except ValueError:
            raise ConfigError("LIEFLOW_SEED must be an integer") from None
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _param_columns(group: GroupId) -> list[str]:
    if group.is_torus:
        return [f"theta{i + 1}" for i in range(group.d)]
    return ["qw", "qx", "qy", "qz"]


# ---------------------------------------------------------------------------
# subcommands


def cmd_symbol(args, cfg) -> str:
    ctx = Context(cfg)
    char = ctx.characteristics()
    grid = None if char.is_constant else haar_quadrature(ctx.group, ctx.resolution).points
    sym = assemble_symbol(char, ctx.max_norm, grid=grid)
    rows = []
    n = 1 if sym.hunt_constant else len(sym.grid)
    for s in range(n):
        for lab in sym.labels:
            m = sym.at(s, lab)
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    rows.append([str(ctx.group), s, label_text(lab), i, j, fmt(m[i, j].real), fmt(m[i, j].imag)])
    return _csv(config_hash(cfg), ["group", "sigma_index", "weight_label", "row", "col", "re", "im"], rows)


def cmd_apply(args, cfg) -> str:
    ctx = Context(cfg)
    char = ctx.characteristics()
    f = ctx.function()
    pts = ctx.points()
    vals = apply_generator(char, f, pts)
    rows = [[i, *[fmt(v) for v in p], fmt(np.real(val))] for i, (p, val) in enumerate(zip(pts, vals))]
    return _csv(config_hash(cfg), ["index", *_param_columns(ctx.group), "value"], rows)


def cmd_evolve(args, cfg) -> str:
    ctx = Context(cfg)
    t = args.t if args.t is not None else cfg.get("t", 1.0)
    char = ctx.characteristics()
    f = ctx.function()
    if not char.is_constant:
        raise NonConstantCharacteristics("evolve needs constant characteristics")
    sym = assemble_symbol(char, max(ctx.max_norm, f.band_limit))
    ft = evolve_semigroup(sym, f, float(t))
    out = {k: v for k, v in cfg.items() if k not in ("function", "config_hash")}
    out["function"] = coefficients_to_json(ft)
    out["t"] = float(t)
    out["config_hash"] = config_hash(cfg)
    return _json(_clean(out))


def cmd_simulate(args, cfg) -> str:
    ctx = Context(cfg)
    sim = cfg.get("simulation", {})
    t = args.t if args.t is not None else sim.get("t", cfg.get("t", 1.0))
    steps = args.steps if args.steps is not None else sim.get("steps", 100)
    paths = args.paths if args.paths is not None else sim.get("paths", 10000)
    start = args.start if args.start is not None else sim.get("start")
    char = ctx.characteristics()
    g0 = None
    if start is not None:
        v = np.asarray(start, dtype=float)
        if v.shape != (ctx.group.dim,):
            raise ConfigError(f"start must have {ctx.group.dim} entries")
        g0 = GroupElement(ctx.group, exp_params(ctx.group, v))
    pc = PathConfig(float(t), int(steps), int(paths), ctx.seed)
    ens = simulate_paths(char, pc, g0, threads=args.threads)
    est, se = empirical_semigroup(ctx.function(), ens)
    h = config_hash(cfg)
    if args.endpoints:
        rows = [[i, int(al), *[fmt(v) for v in p]] for i, (p, al) in enumerate(zip(ens.points, ens.alive))]
        with open(args.endpoints, "w") as fh:
            fh.write(_csv(h, ["path", "alive", *_param_columns(ctx.group)], rows))
    return _json(_clean(dict(
        estimate=est, std_error=se, surviving_fraction=ens.surviving_fraction,
        t=float(t), steps=int(steps), paths=int(paths), seed=ctx.seed, config_hash=h,
    )))


def cmd_verify_pmp(args, cfg) -> str:
    ctx = Context(cfg)
    block = cfg.get("pmp", {})
    seed = args.corpus_seed if args.corpus_seed is not None else block.get("corpus_seed", 0)
    tol = args.tol if args.tol is not None else block.get("tol", 1e-7)
    n = args.n if args.n is not None else block.get("n_functions", 100)
    res = args.grid if args.grid is not None else block.get("grid")
    char = ctx.characteristics()
    A = as_operator(char)
    fns = random_test_functions(ctx.group, n, seed)
    grid = haar_quadrature(ctx.group, res).points if res else None
    report = pmp_check(A, fns, grid, tol)
    anchored = anchored_test_functions(ctx.group, n, seed)
    ap = almost_positive_check(A, anchored, tol, grid)
    return _json(_clean(dict(
        pmp=report.to_dict(), almost_positive=ap.to_dict(), corpus_seed=seed,
        config_hash=config_hash(cfg),
    )))


def cmd_extract(args, cfg) -> str:
    ctx = Context(cfg)
    block = cfg.get("extraction", {})
    delta = args.delta if args.delta is not None else block.get("delta", 1.0)
    res = args.resolution if args.resolution is not None else block.get("resolution")
    char = ctx.characteristics()
    if not char.is_constant:
        raise NonConstantCharacteristics("extraction needs a left-invariant operator")
    ex = extract_characteristics(as_operator(char), ctx.group, ctx.chart, float(delta), res)
    out = ex.to_dict()
    out["config_hash"] = config_hash(cfg)
    return _json(_clean(out))


def cmd_decay(args, cfg) -> str:
    ctx = Context(cfg)
    f = ctx.function()
    rows = [[label_text(lab), fmt(norm), fmt(hs)] for lab, (norm, hs) in zip(f.labels, decay_profile(f))]
    return _csv(config_hash(cfg), ["weight_label", "norm", "hs_norm"], rows)


def cmd_zeta(args, cfg) -> str:
    if cfg is not None:
        ctx = Context(cfg)
        group = ctx.group
        h = config_hash(cfg)
    else:
        if args.group is None:
            raise ConfigError("zeta needs --group or --config")
        group = GroupId.torus(args.dim or 1) if args.group == "torus" else GroupId.su2()
        h = config_hash({"group": args.group, "dim": args.dim, "s": args.s, "max_norm": args.max_norm})
    if args.max_norm < 1:
        raise ConfigError("--max-norm must be >= 1")
    z = sugiura_zeta(group, args.s, args.max_norm)
    return _json(_clean(dict(
        group=str(group), s=args.s, max_norm=args.max_norm, partial_sum=z.partial_sum,
        convergent=z.convergent, n_terms=z.n_terms, tail_estimate=z.tail_estimate
        if np.isfinite(z.tail_estimate) else None, config_hash=h,
    )))


COMMANDS = {
    "symbol": cmd_symbol,
    "apply": cmd_apply,
    "evolve": cmd_evolve,
    "simulate": cmd_simulate,
    "verify-pmp": cmd_verify_pmp,
    "extract": cmd_extract,
    "decay": cmd_decay,
    "zeta": cmd_zeta,
}


def _vector_arg(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lieflow", description="Levy-type operators on the torus and SU(2).")
    p.add_argument("--version", action="version", version=f"lieflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", "-c", help="JSON run configuration ('-' for stdin)")
        sp.add_argument("--out", "-o", help="write the result here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")
        sp.add_argument("--seed", type=int, default=None)
        if name == "evolve":
            sp.add_argument("--t", type=float, default=None)
        if name == "simulate":
            sp.add_argument("--t", type=float, default=None)
            sp.add_argument("--steps", type=int, default=None)
            sp.add_argument("--paths", type=int, default=None)
            sp.add_argument("--start", type=_vector_arg, default=None)
            sp.add_argument("--endpoints", help="also write endpoints as CSV")
        if name == "verify-pmp":
            sp.add_argument("--corpus-seed", type=int, default=None)
            sp.add_argument("--tol", type=float, default=None)
            sp.add_argument("--grid", type=int, default=None, help="Haar grid resolution for maxima")
            sp.add_argument("--n", type=int, default=None, help="number of test functions")
        if name == "extract":
            sp.add_argument("--delta", type=float, default=None)
            sp.add_argument("--resolution", type=int, default=None)
        if name == "zeta":
            sp.add_argument("--group", choices=["torus", "su2"])
            sp.add_argument("--dim", type=int, default=None)
            sp.add_argument("--s", type=float, required=True)
            sp.add_argument("--max-norm", type=float, required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "zeta" and not args.config:
            cfg = None
        else:
            cfg = _read_config(args)
        text = COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (LieflowError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
