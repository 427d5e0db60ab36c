"""Command-line interface: sweeps, single realizations, SIR runs, and charts."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .epidemic import EpidemicParams, simulate_sir, trace_summary, write_trace_csv
from .firewalls import POLICY_KINDS, FirewallPolicy, apply_secured_zones, select_firewalls
from .graph import build_rgg, dump_edges
from .harness import ExperimentConfig, default_config, load_config
from .percolation import detect_spanning
from .seeds import derive_seed
from .torus import TorusRegion, sample_ppp


def _config_from_args(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        config = load_config(args.config)
    else:
        config = default_config()
    overrides = {}
    if getattr(args, "policies", None):
        kinds = [k.strip() for k in args.policies.split(",") if k.strip()]
        data = harness.config_to_dict(config)
        data["policies"] = kinds
        config = harness.config_from_dict(data)
    if getattr(args, "runs", None) is not None:
        overrides["runs_per_point"] = args.runs
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        config = harness.config_from_dict({**harness.config_to_dict(config), **overrides})
    return config


def _policy_from_config(config: ExperimentConfig, kind: str) -> FirewallPolicy:
    for policy in config.policies:
        if policy.kind == kind:
            return policy
    min_distance = 2.0 * config.zone_radius if kind.endswith("-dc") else None
    return FirewallPolicy(kind, min_distance)


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    result = harness.run_sweep(config, workers=args.workers, progress=not args.quiet)
    formats = ["csv", "json"]
    if args.svg:
        formats.append("svg")
    paths = harness.emit_results(result, args.out, formats=formats)
    for kind, estimate in result.critical.items():
        if estimate.reached:
            print(f"critical percentage [{kind}]: {100 * estimate.grid_fraction:.1f}% "
                  f"(refined {100 * estimate.refined_fraction:.2f}%)")
        else:
            print(f"critical percentage [{kind}]: not reached on grid")
    for label, path in paths.items():
        print(f"wrote {label}: {path}")
    return 0


def cmd_single(args) -> int:
    config = _config_from_args(args)
    policy = _policy_from_config(config, args.policy)
    outcome, summary = harness.run_single(config, policy, args.fraction, args.seed)
    report = outcome.cluster_report
    payload = {
        "policy": policy.kind,
        "fraction": args.fraction,
        "seed": args.seed,
        "devices": summary.device_count,
        "firewalls": summary.firewall_count,
        "protected": summary.protected_count,
        "susceptible": summary.susceptible_count,
        "dc_relaxed": summary.dc_relaxed,
        "wraps_x": outcome.wraps_x,
        "wraps_y": outcome.wraps_y,
        "percolates": outcome.percolates,
        "num_clusters": report.num_clusters,
        "max_cluster_size": report.max_cluster_size,
    }
    if args.dump_graph or args.dump_layout:
        region = TorusRegion(config.side_length)
        devices = sample_ppp(region, config.intensity, derive_seed(args.seed, 0))
        graph = build_rgg(devices, config.comm_range)
        if args.dump_graph:
            dump_edges(graph, args.dump_graph)
            payload["graph_dump"] = str(args.dump_graph)
        if args.dump_layout:
            ids, relaxed = select_firewalls(
                graph, devices, policy, args.fraction, derive_seed(args.seed, 1)
            )
            layout = apply_secured_zones(devices, ids, config.zone_radius, dc_relaxed=relaxed)
            with open(args.dump_layout, "w", encoding="utf-8") as fh:
                json.dump({
                    "firewall_ids": layout.firewall_ids,
                    "protected_ids": np.flatnonzero(layout.protected).tolist(),
                    "zone_radius": layout.zone_radius,
                    "dc_relaxed": layout.dc_relaxed,
                }, fh, indent=2)
                fh.write("\n")
            payload["layout_dump"] = str(args.dump_layout)
    print(json.dumps(payload, indent=2))
    return 0


def cmd_sir(args) -> int:
    config = _config_from_args(args)
    policy = _policy_from_config(config, args.policy)
    region = TorusRegion(config.side_length)
    devices = sample_ppp(region, config.intensity, derive_seed(args.seed, 0))
    graph = build_rgg(devices, config.comm_range)
    ids, relaxed = select_firewalls(graph, devices, policy, args.fraction,
                                    derive_seed(args.seed, 1))
    layout = apply_secured_zones(devices, ids, config.zone_radius, dc_relaxed=relaxed)
    susceptible_ids = np.flatnonzero(layout.susceptible)
    if susceptible_ids.size == 0:
        raise ValueError("no susceptible devices left to seed the infection")
    if args.seed_device is not None:
        seed_device = args.seed_device
    else:
        rng = np.random.default_rng(derive_seed(args.seed, 2))
        seed_device = int(susceptible_ids[rng.integers(susceptible_ids.size)])
    params = EpidemicParams(beta=args.beta, delta=args.delta, t_max=args.t_max)
    trace = simulate_sir(graph, layout.susceptible, seed_device, params,
                         derive_seed(args.seed, 3))
    if args.trace:
        write_trace_csv(trace, args.trace)
    summary = trace_summary(trace)
    summary["susceptible"] = int(susceptible_ids.size)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_plot(args) -> int:
    from .plotting import plot_cluster_curves, plot_outbreak_curves

    rows = harness.read_results_csv(args.input)
    if args.kind == "outbreak":
        plot_outbreak_curves(rows, args.out)
    else:
        plot_cluster_curves(rows, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatialfw",
        description="Quantify malware quarantine by spatial firewalls in wireless networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a Monte Carlo sweep over firewall fractions")
    p_sweep.add_argument("--config", type=Path, help="JSON config file")
    p_sweep.add_argument("--policies", help="comma-separated policy list, e.g. random,degree-dc")
    p_sweep.add_argument("--runs", type=int, help="runs per sweep point")
    p_sweep.add_argument("--seed", type=int, help="master seed")
    p_sweep.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p_sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p_sweep.add_argument("--svg", action="store_true", help="also write SVG charts")
    p_sweep.add_argument("--quiet", action="store_true", help="suppress progress lines")
    p_sweep.set_defaults(func=cmd_sweep)

    p_single = sub.add_parser("single", help="run one realization and report the outcome")
    p_single.add_argument("--config", type=Path)
    p_single.add_argument("--fraction", type=float, required=True)
    p_single.add_argument("--policy", choices=POLICY_KINDS, required=True)
    p_single.add_argument("--seed", type=int, required=True)
    p_single.add_argument("--dump-graph", type=Path, help="write the edge list to this file")
    p_single.add_argument("--dump-layout", type=Path, help="write the layout JSON to this file")
    p_single.set_defaults(func=cmd_single)

    p_sir = sub.add_parser("sir", help="simulate a malware outbreak on one realization")
    p_sir.add_argument("--config", type=Path)
    p_sir.add_argument("--fraction", type=float, required=True)
    p_sir.add_argument("--policy", choices=POLICY_KINDS, required=True)
    p_sir.add_argument("--beta", type=float, required=True, help="per-edge infection rate")
    p_sir.add_argument("--delta", type=float, required=True, help="per-device recovery rate")
    p_sir.add_argument("--seed", type=int, required=True)
    p_sir.add_argument("--seed-device", type=int, help="device to infect first")
    p_sir.add_argument("--t-max", type=float, help="time horizon (default: run to absorption)")
    p_sir.add_argument("--trace", type=Path, help="write the event trace CSV to this file")
    p_sir.set_defaults(func=cmd_sir)

    p_plot = sub.add_parser("plot", help="render charts from a results CSV")
    p_plot.add_argument("--in", dest="input", type=Path, required=True)
    p_plot.add_argument("--out", type=Path, required=True)
    p_plot.add_argument("--kind", choices=("outbreak", "clusters"), default="outbreak")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
