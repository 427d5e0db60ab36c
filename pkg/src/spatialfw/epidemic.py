"""Continuous-time SIR malware propagation on the susceptible subgraph.

The network simulation is event-driven and statistically exact for
exponential waiting times: when a device becomes infected it draws its
recovery time at rate `delta`, and one candidate transmission time at rate
`beta` toward each susceptible neighbor; a transmission only counts if it
lands before the infector recovers, and a device is infected by the earliest
candidate that finds it still susceptible. Protected devices never
participate. A fully mixed mean-field integrator is included as a
comparison baseline.
"""
from __future__ import annotations

import csv
import heapq
import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import AdjacencyGraph

S_TO_I = "S->I"
I_TO_R = "I->R"

_S, _I, _R = 0, 1, 2


@dataclass(frozen=True)
class EpidemicParams:
    """Rates of the malware process: per-edge infection and per-device recovery.

    t_max of None means run to absorption (no infected devices left).
    """

    beta: float
    delta: float
    t_max: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise ValueError(f"delta must be finite and >= 0, got {self.delta}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError(f"t_max must be positive or None, got {self.t_max}")


@dataclass(frozen=True, eq=False)
class EpidemicTrace:
    """Event log and aggregate counts of one simulated outbreak.

    counts_over_time rows are (time, S, I, R); the first row is the initial
    state at t=0 with the seed device already infected, and one row follows
    per event. ever_infected holds every device that was infected at any
    point, including the seed.
    """

    events: list[tuple[float, int, str]]
    counts_over_time: np.ndarray
    ever_infected: frozenset[int]
    seed_device: int

    @property
    def final_counts(self) -> tuple[int, int, int]:
        s, i, r = self.counts_over_time[-1, 1:]
        return int(s), int(i), int(r)


def simulate_sir(
    graph: AdjacencyGraph,
    susceptible_mask: np.ndarray,
    seed_device: int,
    params: EpidemicParams,
    rng_seed: int,
) -> EpidemicTrace:
    """Run one exact stochastic SIR realization from a single seed device.

    Only devices with a True entry in susceptible_mask take part; the rest
    are invisible to the process. The run stops when no device is infected
    or the horizon t_max is reached. Identical arguments (including
    rng_seed) reproduce the identical trace.
    """
    mask = np.asarray(susceptible_mask, dtype=bool)
    if mask.shape != (graph.vertex_count,):
        raise ValueError(
            f"susceptible_mask must have length {graph.vertex_count}, got {mask.shape}"
        )
    if not (0 <= seed_device < graph.vertex_count):
        raise ValueError(f"seed_device {seed_device} out of range")
    if not mask[seed_device]:
        raise ValueError(f"seed_device {seed_device} is protected and cannot be infected")

    beta = params.beta
    delta = params.delta
    horizon = math.inf if params.t_max is None else params.t_max
    rng = np.random.default_rng(rng_seed)

    status = np.zeros(graph.vertex_count, dtype=np.int8)
    events: list[tuple[float, int, str]] = []
    heap: list[tuple[float, int, int, int]] = []  # (time, tiebreak, kind, device)
    counter = 0
    RECOVERY, INFECTION = 0, 1

    def schedule_infection_of_neighbors(u: int, t: float, recovery_at: float) -> None:
        nonlocal counter
        if beta <= 0:
            return
        for v in graph.neighbors(u).tolist():
            if mask[v] and status[v] == _S:
                attempt = t + rng.exponential(1.0 / beta)
                if attempt < recovery_at and attempt < horizon:
                    counter += 1
                    heapq.heappush(heap, (attempt, counter, INFECTION, v))

    def infect(u: int, t: float) -> None:
        nonlocal counter
        status[u] = _I
        recovery_at = t + rng.exponential(1.0 / delta) if delta > 0 else math.inf
        if recovery_at < horizon:
            counter += 1
            heapq.heappush(heap, (recovery_at, counter, RECOVERY, u))
        schedule_infection_of_neighbors(u, t, recovery_at)

    infect(seed_device, 0.0)
    ever_infected = {seed_device}

    while heap:
        t, _, kind, device = heapq.heappop(heap)
        if kind == RECOVERY:
            status[device] = _R
            events.append((t, device, I_TO_R))
        elif status[device] == _S:
            infect(device, t)
            ever_infected.add(device)
            events.append((t, device, S_TO_I))

    n_active = int(mask.sum())
    counts = np.empty((len(events) + 1, 4), dtype=np.float64)
    s, i, r = n_active - 1, 1, 0
    counts[0] = (0.0, s, i, r)
    for row, (t, _, transition) in enumerate(events, start=1):
        if transition == S_TO_I:
            s -= 1
            i += 1
        else:
            i -= 1
            r += 1
        counts[row] = (t, s, i, r)

    return EpidemicTrace(
        events=events,
        counts_over_time=counts,
        ever_infected=frozenset(ever_infected),
        seed_device=seed_device,
    )


def write_trace_csv(trace: EpidemicTrace, path) -> None:
    """Write the event log as CSV with columns time, device, transition."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "device", "transition"])
        for t, device, transition in trace.events:
            writer.writerow([repr(float(t)), device, transition])


def trace_summary(trace: EpidemicTrace) -> dict:
    """Compact summary of an outbreak: ever-infected size and final totals."""
    s, i, r = trace.final_counts
    return {
        "seed_device": trace.seed_device,
        "ever_infected": len(trace.ever_infected),
        "events": len(trace.events),
        "final_s": s,
        "final_i": i,
        "final_r": r,
        "end_time": float(trace.counts_over_time[-1, 0]),
    }


def write_trace_summary_json(trace: EpidemicTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_summary(trace), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True, eq=False)
class MeanFieldTrajectory:
    """Fixed-step trajectory of the fully mixed SIR compartments."""

    times: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray


def solve_mean_field_sir(
    population: int,
    contact_rate: float,
    delta: float,
    initial_infected: int,
    t_max: float,
    dt: float,
) -> MeanFieldTrajectory:
    """Integrate the fully mixed SIR rate equations with classic RK4.

    dS/dt = -(contact_rate/N) S I, dI/dt = (contact_rate/N) S I - delta I,
    dR/dt = delta I. The step count is ceil(t_max / dt) with a shortened
    final step so the trajectory ends exactly at t_max.
    """
    for name, value in (("contact_rate", contact_rate), ("delta", delta),
                        ("t_max", t_max), ("dt", dt)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if not 0 <= initial_infected <= population:
        raise ValueError("initial_infected must be between 0 and population")

    n = float(population)
    rate = contact_rate / n if n > 0 else 0.0

    def deriv(state):
        s, i, _ = state
        flow = rate * s * i
        return np.array([-flow, flow - delta * i, delta * i])

    steps = int(math.ceil(t_max / dt))
    times = np.empty(steps + 1)
    out = np.empty((steps + 1, 3))
    state = np.array([n - initial_infected, float(initial_infected), 0.0])
    t = 0.0
    times[0] = t
    out[0] = state
    for step in range(1, steps + 1):
        h = min(dt, t_max - t)
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * h * k1)
        k3 = deriv(state + 0.5 * h * k2)
        k4 = deriv(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = min(t + h, t_max)
        times[step] = t
        out[step] = state
    return MeanFieldTrajectory(times=times, s=out[:, 0], i=out[:, 1], r=out[:, 2])
