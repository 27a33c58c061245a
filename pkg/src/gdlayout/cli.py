"""Command-line interface: generate / layout / eval / compare / serve.

Exit codes: 0 success, 2 usage or invalid input, 3 numerical failure,
4 file/format error. argparse handles unknown flags (exiting 2 itself).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io_formats
from .criteria import CriterionId, Hyper, NpConfig, quality, quality_report
from .errors import (FormatError, GdLayoutError, NumericalDivergence)
from .graph_model import FAMILIES, Graph, generate, shortest_paths
from .io_formats import QualityReport
from .optimizer import (OptimizerConfig, WeightSchedule, random_layout, run)


class UsageError(GdLayoutError):
    """Bad flag combination or value; maps to exit code 2."""


def parse_weights(text: str) -> dict[str, float]:
    """Parse 'ST=1,CN=0.5' into a weight map; empty input means no criteria."""
    out: dict[str, float] = {}
    known = {c.value for c in CriterionId}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise UsageError(f"bad weight {chunk!r}; expected NAME=VALUE")
        name, _, val = chunk.partition("=")
        name = name.strip()
        if name not in known:
            raise UsageError(f"unknown criterion {name!r}; known: "
                             f"{', '.join(c.value for c in CriterionId)}")
        try:
            w = float(val)
        except ValueError:
            raise UsageError(f"weight for {name} is not a number: {val!r}")
        if w < 0 or not np.isfinite(w):
            raise UsageError(f"weight for {name} must be finite and >= 0")
        out[name] = w
    return out


def _load_schedule(args) -> WeightSchedule:
    if getattr(args, "schedule", None):
        return io_formats.read_schedule(Path(args.schedule).read_bytes())
    if getattr(args, "weights", None) is not None:
        weights = parse_weights(args.weights)
        active = {k: v for k, v in weights.items() if v > 0}
        if not active:
            raise UsageError("no active criteria (all weights zero or empty)")
        return WeightSchedule.constant(active)
    raise UsageError("either --weights or --schedule is required")


def _config_from_args(args) -> OptimizerConfig:
    return OptimizerConfig(
        lr=args.lr,
        iters=args.iters,
        mode=args.mode,
        batch=args.batch,
        seed=args.seed,
        lr_decay=args.lr_decay,
        snapshot_every=args.snapshot_every,
        np_k=args.np_k,
        hyper=Hyper(),
    )


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--weights", help="constant weights, e.g. 'ST=1,CN=0.5'")
    p.add_argument("--schedule", help="JSON schedule file "
                                      "{criterion: [[iter, weight], ...]}")
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--lr-decay", type=float, default=0.999, dest="lr_decay")
    p.add_argument("--mode", choices=["full", "stochastic"], default="full")
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snapshot-every", type=int, default=50,
                   dest="snapshot_every")
    p.add_argument("--np-k", type=int, default=None, dest="np_k",
                   help="global kNN size override for NP")


def _write_out(path, data: bytes):
    if path:
        Path(path).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    params = {}
    for name in ("n", "w", "h", "branching", "depth", "a", "b"):
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    g = generate(args.family, **params)
    _write_out(args.out, io_formats.write_graph(g))
    return 0


def _initial_layout(g: Graph, init: str, seed: int) -> np.ndarray:
    if init == "random":
        return random_layout(g.n, seed)
    X, _ = io_formats.read_layout(Path(init).read_bytes(), expected_n=g.n)
    return X


def cmd_layout(args) -> int:
    g = io_formats.read_graph(Path(args.graph).read_bytes())
    schedule = _load_schedule(args)
    config = _config_from_args(args)
    X0 = _initial_layout(g, args.init, args.seed)
    X, trace = run(g, X0, schedule, config)
    meta = {
        "seed": args.seed,
        "init": args.init,
        "iterations": trace.entries[-1].iteration if trace.entries else 0,
        "converged_at": trace.converged_at,
        "schedule": schedule.to_dict(),
    }
    _write_out(args.out, io_formats.write_layout(X, meta))
    if args.svg:
        Path(args.svg).write_bytes(
            io_formats.export_svg(g, X, edge_color_by_length=True))
    if args.trace:
        Path(args.trace).write_bytes(io_formats.write_trace(trace))
    return 0


def cmd_eval(args) -> int:
    g = io_formats.read_graph(Path(args.graph).read_bytes())
    X, _ = io_formats.read_layout(Path(args.layout).read_bytes(),
                                  expected_n=g.n)
    dist = shortest_paths(g)
    values = quality_report(g, dist, X, np_cfg=NpConfig(args.np_k))
    rep = QualityReport(graph=Path(args.graph).stem,
                        source=Path(args.layout).stem, values=values)
    if args.out and args.out.endswith(".csv"):
        data = io_formats.write_report_csv([rep])
    else:
        data = io_formats.write_report_json([rep])
    _write_out(args.out, data)
    return 0


def _read_init_spec(path: Path, g: Graph) -> np.ndarray:
    obj = io_formats._loads(path.read_bytes())
    if isinstance(obj, dict) and "positions" in obj:
        X, _ = io_formats.layout_from_obj(obj, expected_n=g.n)
        return X
    if isinstance(obj, dict) and obj.get("init") == "random":
        return random_layout(g.n, int(obj.get("seed", 0)))
    raise FormatError(f"{path.name}: init spec must be a layout file or "
                      f'{{"init": "random", "seed": k}}')


def cmd_compare(args) -> int:
    graph_files = sorted(Path(args.graphs).glob("*.json"))
    init_files = sorted(Path(args.inits).glob("*.json"))
    config = _config_from_args(args)
    schedule = None
    if not args.per_criterion:
        schedule = _load_schedule(args)
    reports = []
    for gf in graph_files:
        g = io_formats.read_graph(gf.read_bytes())
        dist = shortest_paths(g)
        for inf in init_files:
            X0 = _read_init_spec(inf, g)
            baseline = quality_report(g, dist, X0)
            if args.per_criterion:
                values = {}
                for cid in CriterionId:
                    final, _ = run(g, X0, WeightSchedule.constant({cid: 1.0}),
                                   config, dist=dist)
                    values[cid] = quality(cid, g, dist, final)
            else:
                final, _ = run(g, X0, schedule, config, dist=dist)
                values = quality_report(g, dist, final)
            reports.append(QualityReport(graph=gf.stem, source=inf.stem,
                                         values=values, baseline=baseline))
    if args.out and args.out.endswith(".json"):
        data = io_formats.write_report_json(reports)
    else:
        data = io_formats.write_report_csv(reports)
    _write_out(args.out, data)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .session_service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdlayout",
        description="Multi-criteria graph layout by gradient descent")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph family")
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--n", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--branching", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("layout", help="optimize a layout")
    p.add_argument("--graph", required=True)
    p.add_argument("--init", default="random",
                   help="'random' or a layout file path")
    _add_run_flags(p)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("eval", help="evaluate all nine qualities")
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--np-k", type=int, default=None, dest="np_k")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="batch layout+eval over graphs x inits")
    p.add_argument("--graphs", required=True, help="directory of graph files")
    p.add_argument("--inits", required=True, help="directory of init specs")
    p.add_argument("--per-criterion", action="store_true",
                   dest="per_criterion",
                   help="run nine single-criterion optimizations per cell")
    _add_run_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8050)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalDivergence as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except GdLayoutError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
