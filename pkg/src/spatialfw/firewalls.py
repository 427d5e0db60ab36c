"""Firewall selection strategies and secured-zone removal.

Four selection strategies are supported, addressed by the strings used in
configs and on the command line:

- ``random``: a uniform draw of devices.
- ``degree``: the highest-degree devices of the full connectivity graph.
- ``random-dc``: a uniform scan that only accepts devices at least
  ``min_distance`` away from every firewall accepted so far.
- ``degree-dc``: the same greedy acceptance over devices ordered by
  descending degree.

Every firewall enforces a circular secured zone; devices inside any zone are
protected and drop out of the susceptible network.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gridindex import CellGrid
from .graph import AdjacencyGraph
from .torus import DeviceSet

POLICY_KINDS = ("random", "degree", "random-dc", "degree-dc")
_DC_KINDS = ("random-dc", "degree-dc")


@dataclass(frozen=True)
class FirewallPolicy:
    """A selection strategy plus the spacing floor used by the DC variants."""

    kind: str
    min_distance: float | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}")
        if self.distance_constrained:
            md = self.min_distance
            if md is None or not (math.isfinite(md) and md > 0):
                raise ValueError(f"policy {self.kind!r} requires min_distance > 0, got {md}")

    @property
    def distance_constrained(self) -> bool:
        return self.kind in _DC_KINDS

    @property
    def degree_aware(self) -> bool:
        return self.kind in ("degree", "degree-dc")


@dataclass(frozen=True, eq=False)
class QuarantineLayout:
    """Partition of a device set into protected and susceptible devices."""

    firewall_ids: list[int]
    protected: np.ndarray    # bool per device: firewall or inside any secured zone
    susceptible: np.ndarray  # bool per device, complement of protected
    zone_radius: float
    dc_relaxed: bool

    def __post_init__(self):
        self.protected.setflags(write=False)
        self.susceptible.setflags(write=False)

    @property
    def protected_count(self) -> int:
        return int(self.protected.sum())

    @property
    def susceptible_count(self) -> int:
        return int(self.susceptible.sum())


def _target_count(fraction: float, n: int) -> int:
    # round half up, per realization
    return int(math.floor(fraction * n + 0.5))


def _scan_order(policy: FirewallPolicy, graph: AdjacencyGraph, n: int, seed: int) -> np.ndarray:
    if policy.degree_aware:
        # stable sort keeps lower indices first among equal degrees
        return np.argsort(-graph.degrees, kind="stable")
    rng = np.random.default_rng(seed)
    return rng.permutation(n)


def select_firewalls(
    graph: AdjacencyGraph,
    devices: DeviceSet,
    policy: FirewallPolicy,
    fraction: float,
    seed: int,
) -> tuple[list[int], bool]:
    """Choose round(fraction * count) firewall devices under the given policy.

    Degrees are taken from the full graph as built, never recomputed during
    selection. For the DC variants the scan greedily accepts devices whose
    torus distance to every already-accepted firewall is at least
    ``min_distance``; if the scan runs out of devices short of the target,
    the remaining slots are filled from the rejected devices in scan order
    and the returned flag is True.

    Returns (firewall id list, dc_relaxed flag).
    """
    if not (0.0 <= fraction <= 1.0):
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    n = devices.count
    if graph.vertex_count != n:
        raise ValueError("graph and devices disagree on device count")
    k = _target_count(fraction, n)
    if k == 0:
        return [], False
    order = _scan_order(policy, graph, n, seed)

    if not policy.distance_constrained:
        return order[:k].tolist(), False

    accepted_ids, rejected_ids = _greedy_distance_scan(
        order, devices.positions, devices.region.side_length, float(policy.min_distance), k
    )
    relaxed = False
    if len(accepted_ids) < k:
        relaxed = True
        accepted_ids.extend(rejected_ids[: k - len(accepted_ids)])
    return accepted_ids, relaxed


def _greedy_distance_scan(order, positions, L, min_d, k):
    """Scan devices in `order`, accepting those >= min_d from all accepted so far.

    Accepted firewalls are bucketed on a cell grid at least min_d wide, so a
    candidate only has to be checked against the 3x3 block around its cell;
    decisions are identical to checking against every accepted firewall.
    Stops after k acceptances. Returns (accepted_ids, rejected_ids).
    """
    half = L / 2.0
    md2 = min_d * min_d
    accepted_ids: list[int] = []
    rejected_ids: list[int] = []
    xs = positions[:, 0].tolist()
    ys = positions[:, 1].tolist()

    # cells only need to be at least min_d wide; cap the resolution so tiny
    # floors cannot blow up the grid
    ncells = min(int(L // min_d), 1024) if min_d > 0 else 1024
    while ncells >= 3 and L / ncells < min_d:  # guard against float undershoot
        ncells -= 1

    if ncells >= 3:
        cell = L / ncells
        buckets: dict[int, list[tuple[float, float]]] = {}
        for idx in order.tolist():
            if len(accepted_ids) >= k:
                break
            x = xs[idx]
            y = ys[idx]
            cx = min(int(x / cell), ncells - 1)
            cy = min(int(y / cell), ncells - 1)
            ok = True
            for dy in (-1, 0, 1):
                base = ((cy + dy) % ncells) * ncells
                for dx in (-1, 0, 1):
                    bucket = buckets.get(base + (cx + dx) % ncells)
                    if not bucket:
                        continue
                    for ax, ay in bucket:
                        ddx = ax - x
                        if ddx < 0.0:
                            ddx = -ddx
                        if ddx > half:
                            ddx = L - ddx
                        ddy = ay - y
                        if ddy < 0.0:
                            ddy = -ddy
                        if ddy > half:
                            ddy = L - ddy
                        if ddx * ddx + ddy * ddy < md2:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                accepted_ids.append(idx)
                buckets.setdefault(cy * ncells + cx, []).append((x, y))
            else:
                rejected_ids.append(idx)
        return accepted_ids, rejected_ids

    # spacing beyond a third of the region: few acceptances fit, check directly
    accepted_pos: list[tuple[float, float]] = []
    for idx in order.tolist():
        if len(accepted_ids) >= k:
            break
        x = xs[idx]
        y = ys[idx]
        ok = True
        for ax, ay in accepted_pos:
            ddx = ax - x
            if ddx < 0.0:
                ddx = -ddx
            if ddx > half:
                ddx = L - ddx
            ddy = ay - y
            if ddy < 0.0:
                ddy = -ddy
            if ddy > half:
                ddy = L - ddy
            if ddx * ddx + ddy * ddy < md2:
                ok = False
                break
        if ok:
            accepted_ids.append(idx)
            accepted_pos.append((x, y))
        else:
            rejected_ids.append(idx)
    return accepted_ids, rejected_ids


def apply_secured_zones(
    devices: DeviceSet,
    firewall_ids,
    zone_radius: float,
    dc_relaxed: bool = False,
) -> QuarantineLayout:
    """Mark every device within `zone_radius` of any firewall as protected.

    Zone membership is resolved through the cell grid rather than an
    all-pairs scan. The susceptible mask is the exact complement.
    """
    n = devices.count
    L = devices.region.side_length
    if not (math.isfinite(zone_radius) and 0 < zone_radius <= L / 2):
        raise ValueError(f"zone_radius must be in (0, side_length/2], got {zone_radius}")
    ids = np.asarray(list(firewall_ids), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise ValueError("firewall id out of range")
    protected = np.zeros(n, dtype=bool)
    if ids.size:
        grid = CellGrid(devices.positions, devices.region, zone_radius)
        owner, member = grid.neighborhood_candidates(ids)
        d = np.abs(devices.positions[member] - devices.positions[ids[owner]])
        d = np.minimum(d, L - d)
        within = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= zone_radius * zone_radius
        protected[member[within]] = True
    return QuarantineLayout(
        firewall_ids=[int(i) for i in ids.tolist()],
        protected=protected,
        susceptible=~protected,
        zone_radius=zone_radius,
        dc_relaxed=dc_relaxed,
    )
