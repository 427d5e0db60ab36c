"""Range-based random geometric graph over a device set, plus component labeling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gridindex import CellGrid
from .torus import DeviceSet, TorusRegion
from .unionfind import UnionFind

INACTIVE = -1


@dataclass(frozen=True, eq=False)
class AdjacencyGraph:
    """Undirected graph linking devices within communication range on the torus.

    Neighbor lists are stored in compressed sparse form (`indptr`, `indices`)
    sorted by neighbor id, which makes traversal order reproducible. `edges`
    holds each undirected edge once as (u, v) with u < v, sorted
    lexicographically, and `edge_disp` carries the matching minimal-image
    displacement vector position(v) - position(u).
    """

    vertex_count: int
    region: TorusRegion
    comm_range: float
    edges: np.ndarray      # (E, 2) int64, u < v, lexicographically sorted
    edge_disp: np.ndarray  # (E, 2) float64, components in (-L/2, L/2]
    indptr: np.ndarray     # (vertex_count + 1,) int64
    indices: np.ndarray    # (2E,) int64, neighbors sorted by id per vertex
    degrees: np.ndarray    # (vertex_count,) int64

    def __post_init__(self):
        for name in ("edges", "edge_disp", "indptr", "indices", "degrees"):
            getattr(self, name).setflags(write=False)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def neighbors(self, v: int) -> np.ndarray:
        """Neighbor ids of v in ascending order."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        """Materialize per-vertex neighbor lists (mainly for tests and dumps)."""
        return [self.neighbors(v).tolist() for v in range(self.vertex_count)]


@dataclass(frozen=True, eq=False)
class ClusterReport:
    """Connected-component statistics of an induced subgraph.

    labels[v] is the cluster id of an active vertex (ids assigned by first
    occurrence in vertex order) or INACTIVE for masked-out vertices. sizes
    is sorted descending.
    """

    labels: np.ndarray
    num_clusters: int
    sizes: np.ndarray
    max_cluster_size: int

    def __post_init__(self):
        self.labels.setflags(write=False)
        self.sizes.setflags(write=False)


def build_rgg(devices: DeviceSet, comm_range: float) -> AdjacencyGraph:
    """Connect every pair of devices within `comm_range` meters on the torus.

    Edge discovery goes through a uniform grid with cells at least
    `comm_range` wide and inspects only the 3x3 cell neighborhood, so the
    expected cost is linear in the device count at bounded density.
    """
    L = devices.region.side_length
    if not (math.isfinite(comm_range) and comm_range > 0):
        raise ValueError(f"comm_range must be positive and finite, got {comm_range}")
    if comm_range > L / 2:
        raise ValueError(
            f"comm_range {comm_range} exceeds side_length/2 = {L / 2} (wrap ambiguity)"
        )
    n = devices.count
    positions = devices.positions
    if n == 0:
        return AdjacencyGraph(
            vertex_count=0,
            region=devices.region,
            comm_range=comm_range,
            edges=np.empty((0, 2), np.int64),
            edge_disp=np.empty((0, 2), np.float64),
            indptr=np.zeros(1, np.int64),
            indices=np.empty(0, np.int64),
            degrees=np.empty(0, np.int64),
        )

    grid = CellGrid(positions, devices.region, comm_range)
    u, v = grid.candidate_pairs()
    d = np.abs(positions[v] - positions[u])
    d = np.minimum(d, L - d)
    keep = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= comm_range * comm_range
    u, v = u[keep], v[keep]

    raw = positions[v] - positions[u]
    disp = raw - L * np.round(raw / L)
    disp = np.where(disp <= -0.5 * L, disp + L, disp)

    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    indices = dst[order]
    degrees = np.bincount(src, minlength=n).astype(np.int64)
    indptr = np.concatenate(([0], np.cumsum(degrees))).astype(np.int64)

    return AdjacencyGraph(
        vertex_count=n,
        region=devices.region,
        comm_range=comm_range,
        edges=np.column_stack([u, v]).astype(np.int64),
        edge_disp=disp,
        indptr=indptr,
        indices=indices.astype(np.int64),
        degrees=degrees,
    )


def connected_components(graph: AdjacencyGraph, active: np.ndarray) -> ClusterReport:
    """Components of the subgraph induced on the active vertices.

    Inactive vertices get label INACTIVE and do not contribute to sizes.
    """
    active = np.asarray(active, dtype=bool)
    if active.shape != (graph.vertex_count,):
        raise ValueError(
            f"active mask must have length {graph.vertex_count}, got shape {active.shape}"
        )
    n = graph.vertex_count
    uf = UnionFind(n)
    if graph.edge_count:
        eu = graph.edges[:, 0]
        ev = graph.edges[:, 1]
        both = active[eu] & active[ev]
        for a, b in zip(eu[both].tolist(), ev[both].tolist()):
            uf.union(a, b)
    labels = np.full(n, INACTIVE, dtype=np.int64)
    compact: dict[int, int] = {}
    sizes_list: list[int] = []
    find = uf.find
    for v in np.flatnonzero(active).tolist():
        root = find(v)
        cid = compact.get(root)
        if cid is None:
            cid = len(compact)
            compact[root] = cid
            sizes_list.append(0)
        labels[v] = cid
        sizes_list[cid] += 1
    sizes = np.sort(np.asarray(sizes_list, dtype=np.int64))[::-1]
    return ClusterReport(
        labels=labels,
        num_clusters=len(sizes_list),
        sizes=sizes,
        max_cluster_size=int(sizes[0]) if sizes.size else 0,
    )


def dump_edges(graph: AdjacencyGraph, path) -> None:
    """Write the edge list as text, one `u v` pair per line, 0-based ids."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in graph.edges.tolist():
            fh.write(f"{a} {b}\n")
