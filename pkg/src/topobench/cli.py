"""Command-line front end: generate topologies and traffic, solve flow
instances, evaluate bounds, and run experiment presets.

Exit status is 0 on success and 1 on any fatal error (bad arguments,
infeasible generation, solver failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bounds as bounds_mod
from .experiments import ExperimentSpec, PRESETS, export, export_summary, run_experiment, vl2_compare
from .flow import decompose, formulate, solve, utilization_by_class
from .generators import (
    GenerationError,
    LineSpeedOverlayConfig,
    RewiredVl2Config,
    TwoClassConfig,
    attach_uniform_servers,
    gen_linespeed_overlay,
    gen_random_from_ports,
    gen_rewired_vl2,
    gen_rrg,
    gen_two_cluster_biased,
    gen_vl2,
    server_distribution_two_class,
)
from .topology import load_topology, save_topology, validate
from .traffic import all_to_all, chunky, load_traffic, random_permutation, save_traffic


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _cmd_gen(args) -> int:
    if args.family == "rrg":
        topo = gen_rrg(args.n, args.r, args.seed)
        if args.servers:
            topo = attach_uniform_servers(topo, args.servers, args.access)
    elif args.family == "vl2":
        topo = gen_vl2(args.da, args.di, args.tors)
    elif args.family == "rewired-vl2":
        topo = gen_rewired_vl2(RewiredVl2Config(args.da, args.di, args.tors), args.seed)
    elif args.family == "twoclass":
        cfg = TwoClassConfig(args.n_large, args.n_small, args.ports_large,
                             args.ports_small, args.servers)
        counts = server_distribution_two_class(cfg, args.x_server)
        if args.x_cross is None:
            clusters = {i: (0 if i < cfg.n_large else 1)
                        for i in range(cfg.n_large + cfg.n_small)}
            topo = gen_random_from_ports(cfg.port_counts, counts, args.seed,
                                         cluster_of=clusters)
        else:
            topo = gen_two_cluster_biased(cfg, counts, args.x_cross, args.seed)
    elif args.family == "overlay":
        base = TwoClassConfig(args.n_large, args.n_small, args.ports_large,
                              args.ports_small, args.servers)
        cfg = LineSpeedOverlayConfig(base, args.high_ports, args.high_speed)
        counts = server_distribution_two_class(base, args.x_server)
        topo = gen_linespeed_overlay(cfg, counts, 1.0 if args.x_cross is None else args.x_cross,
                                     args.seed)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    report = validate(topo)
    if not report.ok:
        print("warning: generated topology fails validation:", file=sys.stderr)
        for v in report.violations:
            print(f"  {v}", file=sys.stderr)
    save_topology(topo, args.out)
    print(f"wrote {args.out}: {len(topo.switches)} switches, "
          f"{len(topo.servers)} servers, {len(topo.links)} links")
    return 0


def _cmd_traffic(args) -> int:
    topo = load_topology(args.topology)
    if args.pattern == "permutation":
        tm = random_permutation(topo, args.seed)
    elif args.pattern == "all-to-all":
        tm = all_to_all(topo, aggregate=args.aggregate)
    elif args.pattern == "chunky":
        tm = chunky(topo, args.x, args.seed)
    else:
        raise ValueError(f"unknown pattern {args.pattern!r}")
    save_traffic(tm, args.out)
    print(f"wrote {args.out}: {len(tm.commodities)} commodities "
          f"({tm.aggregation}-level)")
    return 0


def _cmd_solve(args) -> int:
    topo = load_topology(args.topology)
    tm = load_traffic(args.traffic)
    model = formulate(topo, tm)
    if args.export_lp:
        model.export_lp(args.export_lp)
    sol = solve(model, backend=args.backend, time_limit=args.time_limit)
    out = {"throughput": sol.throughput, "status": sol.solver_status}
    try:
        dec = decompose(topo, tm, sol)
        out.update({"C": dec.C, "U": dec.U, "D_flows": dec.D_flows, "AS": dec.AS,
                    "f_effective": dec.f_effective,
                    "identity_residual": dec.identity_residual})
    except Exception:
        pass
    if args.utilization:
        out["utilization_by_class"] = utilization_by_class(topo, sol)
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_bound(args) -> int:
    out: dict = {}
    if args.n is not None and args.r is not None:
        out["d_star"] = bounds_mod.aspl_lower_bound(args.n, args.r)
        if args.f:
            out["homog_bound"] = bounds_mod.homog_throughput_bound(
                args.n, args.r, args.f, args.aspl
            )
    if args.c is not None:
        if None in (args.c_bar, args.n1, args.n2, args.d):
            raise ValueError("cut bound needs --c-bar, --n1, --n2 and --d")
        path_b, cut_b, mn = bounds_mod.hetero_throughput_bound(
            args.c, args.c_bar, args.n1, args.n2, args.d
        )
        out.update({"path_bound": path_b, "cut_bound": cut_b, "hetero_bound": mn})
    if args.t_star is not None:
        if None in (args.n1, args.n2):
            raise ValueError("drop threshold needs --n1 and --n2")
        out["c_bar_star"] = bounds_mod.drop_threshold(args.t_star, args.n1, args.n2)
    if not out:
        raise ValueError("nothing to compute: pass --n/--r, --c..., or --t-star")
    print(json.dumps(out, indent=2))
    return 0


def _cmd_exp(args) -> int:
    if args.spec:
        with open(args.spec) as fh:
            spec = ExperimentSpec.from_json(fh.read())
    else:
        if not args.preset:
            raise ValueError("pass --preset NAME or --spec FILE")
        params = {}
        for item in args.param or []:
            key, _, value = item.partition("=")
            if "," in value:
                params[key] = _float_list(value)
            else:
                try:
                    params[key] = float(value)
                except ValueError:
                    params[key] = value
        spec = ExperimentSpec(
            preset=args.preset,
            sweep=tuple(_float_list(args.sweep)) if args.sweep else None,
            runs=args.runs,
            master_seed=args.seed,
            params=params,
            eps=args.eps,
            timing=args.timing,
            threads=args.threads,
        )
    table, summary = run_experiment(spec)
    if args.out:
        export(table, "csv", args.out)
        export_summary(summary, args.out + ".summary.csv")
        print(f"wrote {args.out} ({len(table)} rows) and {args.out}.summary.csv")
    else:
        print(export(table, "csv"), end="")
    return 0


def _cmd_vl2(args) -> int:
    result = vl2_compare(args.da, args.di, runs=args.runs, eps=args.eps,
                         master_seed=args.seed)
    print(json.dumps(result, indent=2))
    return 0


def _cmd_presets(_args) -> int:
    for name, preset in sorted(PRESETS.items()):
        print(f"{name}: {preset.description}")
        print(f"  sweep: {list(preset.default_sweep)}")
        if preset.required:
            print(f"  required params: {', '.join(preset.required)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topobench",
        description="Topology throughput workbench: generators, exact "
        "concurrent-flow measurement, bounds, experiment presets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a topology file")
    p.add_argument("--family", required=True,
                   choices=["rrg", "vl2", "rewired-vl2", "twoclass", "overlay"])
    p.add_argument("--n", type=int, help="switch count (rrg)")
    p.add_argument("--r", type=int, help="switch-switch degree (rrg)")
    p.add_argument("--servers", type=int, default=0,
                   help="servers per switch (rrg) or total servers (twoclass)")
    p.add_argument("--access", type=float, default=1.0)
    p.add_argument("--da", type=int, help="aggregation ports (vl2)")
    p.add_argument("--di", type=int, help="core ports (vl2)")
    p.add_argument("--tors", type=int, default=None, help="ToR count override")
    p.add_argument("--n-large", type=int, default=20)
    p.add_argument("--n-small", type=int, default=40)
    p.add_argument("--ports-large", type=int, default=30)
    p.add_argument("--ports-small", type=int, default=10)
    p.add_argument("--x-server", type=float, default=1.0,
                   help="large-class server share multiplier")
    p.add_argument("--x-cross", type=float, default=None,
                   help="cross-cluster connectivity multiplier (omit: unbiased)")
    p.add_argument("--high-ports", type=int, default=3)
    p.add_argument("--high-speed", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("traffic", help="generate a traffic-matrix file")
    p.add_argument("--pattern", required=True,
                   choices=["permutation", "all-to-all", "chunky"])
    p.add_argument("--topology", required=True)
    p.add_argument("--aggregate", choices=["server", "switch"], default="server")
    p.add_argument("--x", type=float, default=100.0, help="chunky percentage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_traffic)

    p = sub.add_parser("solve", help="solve max concurrent flow on files")
    p.add_argument("--topology", required=True)
    p.add_argument("--traffic", required=True)
    p.add_argument("--backend", choices=["highs", "simplex"], default="highs")
    p.add_argument("--export-lp", default=None, help="write the LP text model")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--utilization", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bound", help="closed-form bounds")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--f", type=float, help="flow count for the throughput bound")
    p.add_argument("--aspl", type=float, default=None, help="measured ASPL")
    p.add_argument("--c", type=float, help="total capacity")
    p.add_argument("--c-bar", type=float, help="cut capacity")
    p.add_argument("--n1", type=float)
    p.add_argument("--n2", type=float)
    p.add_argument("--d", type=float, help="mean shortest path length")
    p.add_argument("--t-star", type=float, help="peak throughput for C-bar*")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("exp", help="run an experiment preset")
    p.add_argument("--preset", default=None)
    p.add_argument("--spec", default=None, help="JSON spec file")
    p.add_argument("--sweep", default=None, help="comma-separated sweep override")
    p.add_argument("--param", action="append", help="key=value preset parameter")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds (breaks byte-identical reruns)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_exp)

    p = sub.add_parser("vl2", help="VL2 versus rewired-VL2 supported ToRs")
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--di", type=int, required=True)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_vl2)

    p = sub.add_parser("presets", help="list experiment presets")
    p.set_defaults(func=_cmd_presets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GenerationError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
