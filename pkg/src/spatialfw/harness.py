"""Monte Carlo sweeps over firewall percentages: scheduling, aggregation, output.

A sweep runs `runs_per_point` independent network realizations for every
(policy, fraction) pair, counts how often the susceptible subgraph
percolates, and aggregates cluster statistics. Every run's seed is derived
from (master_seed, policy index, fraction index, run index) alone, and
aggregation follows run-index order, so results are identical no matter how
many workers execute the runs.
"""
from __future__ import annotations

import csv
import json
import math
import multiprocessing
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .firewalls import FirewallPolicy, apply_secured_zones, select_firewalls
from .graph import build_rgg
from .percolation import SPANNING_RULES, PercolationOutcome, detect_spanning
from .seeds import derive_seed
from .torus import TorusRegion, sample_ppp

CSV_HEADER = (
    "policy,fraction,runs,outbreaks,outbreak_probability,ci95_halfwidth,"
    "mean_num_clusters,mean_max_cluster_size,mean_susceptible_count,dc_relaxed_rate"
)

DEFAULT_SIDE_LENGTH = 4000.0
DEFAULT_INTENSITY = 80.0
DEFAULT_COMM_RANGE = 200.0
DEFAULT_ZONE_RADIUS = 200.0
DEFAULT_RUNS_PER_POINT = 500
DEFAULT_MASTER_SEED = 1
DEFAULT_SPANNING_RULE = "both"
DEFAULT_CRITICAL_THRESHOLD = 0.05
DEFAULT_FRACTION_GRID = tuple(i / 100 for i in range(13))
DEFAULT_POLICY_KINDS = ("random", "degree", "random-dc", "degree-dc")


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one sweep. Lengths in meters, intensity per km^2."""

    side_length: float = DEFAULT_SIDE_LENGTH
    intensity: float = DEFAULT_INTENSITY
    comm_range: float = DEFAULT_COMM_RANGE
    zone_radius: float = DEFAULT_ZONE_RADIUS
    policies: tuple[FirewallPolicy, ...] = ()
    fraction_grid: tuple[float, ...] = DEFAULT_FRACTION_GRID
    runs_per_point: int = DEFAULT_RUNS_PER_POINT
    master_seed: int = DEFAULT_MASTER_SEED
    spanning_rule: str = DEFAULT_SPANNING_RULE
    critical_threshold: float = DEFAULT_CRITICAL_THRESHOLD

    def validate(self) -> None:
        for name in ("side_length", "intensity", "comm_range", "zone_radius"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.comm_range > self.side_length / 2:
            raise ValueError("comm_range must not exceed side_length/2")
        if self.zone_radius > self.side_length / 2:
            raise ValueError("zone_radius must not exceed side_length/2")
        if not self.policies:
            raise ValueError("at least one policy is required")
        kinds = [p.kind for p in self.policies]
        if len(set(kinds)) != len(kinds):
            raise ValueError("duplicate policy kinds in config")
        if not self.fraction_grid:
            raise ValueError("fraction_grid must not be empty")
        grid = list(self.fraction_grid)
        if any(not (0.0 <= f <= 1.0) for f in grid):
            raise ValueError("fraction_grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("fraction_grid must be strictly increasing")
        if self.runs_per_point < 1:
            raise ValueError("runs_per_point must be >= 1")
        if self.spanning_rule not in SPANNING_RULES:
            raise ValueError(f"spanning_rule must be one of {SPANNING_RULES}")
        if not 0.0 < self.critical_threshold < 1.0:
            raise ValueError("critical_threshold must lie in (0, 1)")


def default_policies(zone_radius: float = DEFAULT_ZONE_RADIUS,
                     min_distance: float | None = None) -> tuple[FirewallPolicy, ...]:
    """The four built-in policies; DC spacing defaults to tangent zones (2R)."""
    if min_distance is None:
        min_distance = 2.0 * zone_radius
    return tuple(
        FirewallPolicy(kind, min_distance if kind.endswith("-dc") else None)
        for kind in DEFAULT_POLICY_KINDS
    )


def default_config(**overrides) -> ExperimentConfig:
    config = ExperimentConfig(policies=default_policies(), **overrides)
    config.validate()
    return config


def config_to_dict(config: ExperimentConfig) -> dict:
    min_distance = next(
        (p.min_distance for p in config.policies if p.distance_constrained), None
    )
    return {
        "side_length": config.side_length,
        "intensity": config.intensity,
        "comm_range": config.comm_range,
        "zone_radius": config.zone_radius,
        "policies": [p.kind for p in config.policies],
        "min_distance": min_distance,
        "fraction_grid": list(config.fraction_grid),
        "runs_per_point": config.runs_per_point,
        "master_seed": config.master_seed,
        "spanning_rule": config.spanning_rule,
        "critical_threshold": config.critical_threshold,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a JSON-style dict; omitted keys take defaults."""
    known = {
        "side_length", "intensity", "comm_range", "zone_radius", "policies",
        "min_distance", "fraction_grid", "runs_per_point", "master_seed",
        "spanning_rule", "critical_threshold",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    zone_radius = float(data.get("zone_radius", DEFAULT_ZONE_RADIUS))
    min_distance = data.get("min_distance")
    if min_distance is None:
        min_distance = 2.0 * zone_radius
    kinds = data.get("policies", list(DEFAULT_POLICY_KINDS))
    policies = tuple(
        FirewallPolicy(kind, float(min_distance) if kind.endswith("-dc") else None)
        for kind in kinds
    )
    config = ExperimentConfig(
        side_length=float(data.get("side_length", DEFAULT_SIDE_LENGTH)),
        intensity=float(data.get("intensity", DEFAULT_INTENSITY)),
        comm_range=float(data.get("comm_range", DEFAULT_COMM_RANGE)),
        zone_radius=zone_radius,
        policies=policies,
        fraction_grid=tuple(float(f) for f in data.get("fraction_grid", DEFAULT_FRACTION_GRID)),
        runs_per_point=int(data.get("runs_per_point", DEFAULT_RUNS_PER_POINT)),
        master_seed=int(data.get("master_seed", DEFAULT_MASTER_SEED)),
        spanning_rule=str(data.get("spanning_rule", DEFAULT_SPANNING_RULE)),
        critical_threshold=float(data.get("critical_threshold", DEFAULT_CRITICAL_THRESHOLD)),
    )
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


@dataclass(frozen=True)
class LayoutSummary:
    """Scalar view of one realization's quarantine layout."""

    device_count: int
    firewall_count: int
    protected_count: int
    susceptible_count: int
    dc_relaxed: bool


@dataclass(frozen=True)
class SweepRow:
    """Aggregated statistics of one (policy, fraction) sweep point."""

    policy: str
    fraction: float
    runs: int
    outbreaks: int
    outbreak_probability: float
    ci95_halfwidth: float
    mean_num_clusters: float
    mean_max_cluster_size: float
    mean_susceptible_count: float
    dc_relaxed_rate: float

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "fraction": self.fraction,
            "runs": self.runs,
            "outbreaks": self.outbreaks,
            "outbreak_probability": self.outbreak_probability,
            "ci95_halfwidth": self.ci95_halfwidth,
            "mean_num_clusters": self.mean_num_clusters,
            "mean_max_cluster_size": self.mean_max_cluster_size,
            "mean_susceptible_count": self.mean_susceptible_count,
            "dc_relaxed_rate": self.dc_relaxed_rate,
        }


@dataclass(frozen=True)
class CriticalEstimate:
    """Smallest grid fraction from which outbreaks stay at or below threshold.

    grid_fraction is None when the threshold is never reached on the grid;
    refined_fraction linearly interpolates the crossing between the
    bracketing grid points.
    """

    grid_fraction: float | None
    refined_fraction: float | None
    reached: bool

    def as_dict(self) -> dict:
        return {
            "grid_fraction": self.grid_fraction,
            "refined_fraction": self.refined_fraction,
            "reached": self.reached,
        }


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    rows: list[SweepRow] = field(default_factory=list)
    critical: dict[str, CriticalEstimate] = field(default_factory=dict)

    def rows_for_policy(self, kind: str) -> list[SweepRow]:
        return [row for row in self.rows if row.policy == kind]


def run_single(
    config: ExperimentConfig,
    policy: FirewallPolicy,
    fraction: float,
    run_seed: int,
) -> tuple[PercolationOutcome, LayoutSummary]:
    """One full realization: sample, connect, select, remove zones, test spanning."""
    region = TorusRegion(config.side_length)
    devices = sample_ppp(region, config.intensity, derive_seed(run_seed, 0))
    graph = build_rgg(devices, config.comm_range)
    ids, relaxed = select_firewalls(graph, devices, policy, fraction, derive_seed(run_seed, 1))
    layout = apply_secured_zones(devices, ids, config.zone_radius, dc_relaxed=relaxed)
    outcome = detect_spanning(graph, layout.susceptible, rule=config.spanning_rule)
    summary = LayoutSummary(
        device_count=devices.count,
        firewall_count=len(ids),
        protected_count=layout.protected_count,
        susceptible_count=layout.susceptible_count,
        dc_relaxed=relaxed,
    )
    return outcome, summary


_worker_config: ExperimentConfig | None = None


def _init_worker(config: ExperimentConfig) -> None:
    global _worker_config
    _worker_config = config


def _run_task(task: tuple[int, int, int]) -> tuple[int, int, int, int, int]:
    policy_idx, fraction_idx, run_idx = task
    config = _worker_config
    policy = config.policies[policy_idx]
    fraction = config.fraction_grid[fraction_idx]
    run_seed = derive_seed(config.master_seed, policy_idx, fraction_idx, run_idx)
    outcome, summary = run_single(config, policy, fraction, run_seed)
    return (
        int(outcome.percolates),
        outcome.cluster_report.num_clusters,
        outcome.cluster_report.max_cluster_size,
        summary.susceptible_count,
        int(summary.dc_relaxed),
    )


def _aggregate_point(policy: FirewallPolicy, fraction: float, records) -> SweepRow:
    runs = len(records)
    outbreaks = sum(r[0] for r in records)
    p = outbreaks / runs
    half = 1.96 * math.sqrt(p * (1.0 - p) / runs)
    return SweepRow(
        policy=policy.kind,
        fraction=float(fraction),
        runs=runs,
        outbreaks=outbreaks,
        outbreak_probability=p,
        ci95_halfwidth=half,
        mean_num_clusters=sum(r[1] for r in records) / runs,
        mean_max_cluster_size=sum(r[2] for r in records) / runs,
        mean_susceptible_count=sum(r[3] for r in records) / runs,
        dc_relaxed_rate=sum(r[4] for r in records) / runs,
    )


def run_sweep(config: ExperimentConfig, workers: int = 1, progress: bool = False) -> SweepResult:
    """Execute the full sweep and aggregate per point.

    The outcome is independent of `workers`: seeds are positional and
    aggregation follows run-index order, so parallel scheduling cannot
    change any output byte.
    """
    config.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    rows: list[SweepRow] = []
    points = [
        (pi, fi)
        for pi in range(len(config.policies))
        for fi in range(len(config.fraction_grid))
    ]

    def point_tasks(pi: int, fi: int):
        return [(pi, fi, run) for run in range(config.runs_per_point)]

    if workers == 1:
        _init_worker(config)
        for pi, fi in points:
            records = [_run_task(t) for t in point_tasks(pi, fi)]
            rows.append(_aggregate_point(config.policies[pi], config.fraction_grid[fi], records))
            if progress:
                _print_progress(rows[-1])
    else:
        chunk = max(1, config.runs_per_point // (workers * 4))
        with multiprocessing.Pool(workers, initializer=_init_worker, initargs=(config,)) as pool:
            for pi, fi in points:
                records = pool.map(_run_task, point_tasks(pi, fi), chunksize=chunk)
                rows.append(
                    _aggregate_point(config.policies[pi], config.fraction_grid[fi], records)
                )
                if progress:
                    _print_progress(rows[-1])

    critical = {
        policy.kind: estimate_critical_percentage(
            [row for row in rows if row.policy == policy.kind], config.critical_threshold
        )
        for policy in config.policies
    }
    return SweepResult(config=config, rows=rows, critical=critical)


def _print_progress(row: SweepRow) -> None:
    print(
        f"[sweep] {row.policy:>9} fraction={row.fraction:.2f} "
        f"outbreak_p={row.outbreak_probability:.3f} "
        f"clusters={row.mean_num_clusters:.1f} max={row.mean_max_cluster_size:.1f}",
        file=sys.stderr,
        flush=True,
    )


def estimate_critical_percentage(rows, threshold: float) -> CriticalEstimate:
    """Find the smallest grid fraction at which outbreaks stop for good.

    The estimate is the first grid fraction whose outbreak probability is at
    or below `threshold` with every larger grid fraction also at or below
    it. A refined value interpolates the threshold crossing between the two
    bracketing grid points.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to estimate from")
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    fracs = [row.fraction for row in rows]
    if any(b <= a for a, b in zip(fracs, fracs[1:])):
        raise ValueError("rows must be sorted by strictly increasing fraction")
    probs = [row.outbreak_probability for row in rows]
    first = len(probs)
    for i in range(len(probs) - 1, -1, -1):
        if probs[i] > threshold:
            break
        first = i
    if first == len(probs):
        return CriticalEstimate(grid_fraction=None, refined_fraction=None, reached=False)
    if first == 0:
        return CriticalEstimate(grid_fraction=fracs[0], refined_fraction=fracs[0], reached=True)
    p_hi, p_lo = probs[first - 1], probs[first]
    f_hi, f_lo = fracs[first - 1], fracs[first]
    refined = f_hi + (p_hi - threshold) / (p_hi - p_lo) * (f_lo - f_hi)
    return CriticalEstimate(grid_fraction=fracs[first], refined_fraction=refined, reached=True)


def version_string() -> str:
    """Package version, extended with the git description when available."""
    try:
        proc = subprocess.run(
            ["git", "describe", "--tags", "--always"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if proc.returncode == 0 and proc.stdout.strip():
            return f"spatialfw-{__version__}+g{proc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"spatialfw-{__version__}"


def result_to_dict(result: SweepResult) -> dict:
    return {
        "version": version_string(),
        "config": config_to_dict(result.config),
        "rows": [row.as_dict() for row in result.rows],
        "critical_percentage": {
            kind: estimate.as_dict() for kind, estimate in result.critical.items()
        },
    }


def write_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for row in result.rows:
            writer.writerow([
                row.policy,
                repr(row.fraction),
                row.runs,
                row.outbreaks,
                repr(row.outbreak_probability),
                repr(row.ci95_halfwidth),
                repr(row.mean_num_clusters),
                repr(row.mean_max_cluster_size),
                repr(row.mean_susceptible_count),
                repr(row.dc_relaxed_rate),
            ])


def write_json(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result_to_dict(result), fh, indent=2)
        fh.write("\n")


def read_results_csv(path) -> list[SweepRow]:
    """Parse a results CSV back into rows (used by plotting and tests)."""
    rows: list[SweepRow] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ValueError(f"unexpected CSV header in {path}")
        for rec in reader:
            rows.append(SweepRow(
                policy=rec["policy"],
                fraction=float(rec["fraction"]),
                runs=int(rec["runs"]),
                outbreaks=int(rec["outbreaks"]),
                outbreak_probability=float(rec["outbreak_probability"]),
                ci95_halfwidth=float(rec["ci95_halfwidth"]),
                mean_num_clusters=float(rec["mean_num_clusters"]),
                mean_max_cluster_size=float(rec["mean_max_cluster_size"]),
                mean_susceptible_count=float(rec["mean_susceptible_count"]),
                dc_relaxed_rate=float(rec["dc_relaxed_rate"]),
            ))
    return rows


def emit_results(
    result: SweepResult,
    out_dir,
    formats=("csv", "json"),
    basename: str = "results",
) -> dict[str, Path]:
    """Write the sweep outputs; returns the path written per format."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise ValueError(f"unknown output formats: {sorted(unknown)}")
    paths: dict[str, Path] = {}
    if "csv" in formats:
        paths["csv"] = out / f"{basename}.csv"
        write_csv(result, paths["csv"])
    if "json" in formats:
        paths["json"] = out / f"{basename}.json"
        write_json(result, paths["json"])
    if "svg" in formats:
        from .plotting import plot_cluster_curves, plot_outbreak_curves

        paths["svg_outbreak"] = out / f"{basename}_outbreak.svg"
        plot_outbreak_curves(result.rows, paths["svg_outbreak"])
        paths["svg_clusters"] = out / f"{basename}_clusters.svg"
        plot_cluster_curves(result.rows, paths["svg_clusters"])
    return paths
