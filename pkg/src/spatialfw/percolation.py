"""Spanning detection on the torus and cluster statistics of the susceptible subgraph.

A cluster "spans" the wrap-around region when it winds all the way around an
axis. Bounding-box extent is meaningless on a torus, so winding is detected
with a displacement-augmented union-find: every edge contributes its
minimal-image displacement, and a cycle whose displacements do not cancel
has gone around the region. The verdict and the cluster statistics come out
of the same union-find pass.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import INACTIVE, AdjacencyGraph, ClusterReport, connected_components
from .torus import TorusRegion
from .unionfind import DisplacementUnionFind

SPANNING_RULES = ("both", "either")

# relative slack for deciding a net cycle displacement is nonzero; true
# windings are whole multiples of the region side
WRAP_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class PercolationOutcome:
    """Wrap verdicts per axis plus the induced-subgraph cluster statistics."""

    wraps_x: bool
    wraps_y: bool
    percolates: bool
    cluster_report: ClusterReport


def _percolates(wraps_x: bool, wraps_y: bool, rule: str) -> bool:
    if rule == "both":
        return wraps_x and wraps_y
    if rule == "either":
        return wraps_x or wraps_y
    raise ValueError(f"unknown spanning rule {rule!r}; expected one of {SPANNING_RULES}")


def _wind_union(
    n: int,
    eu,
    ev,
    disp_x,
    disp_y,
    tol: float,
) -> DisplacementUnionFind:
    """Run the displacement union-find over the given edges."""
    uf = DisplacementUnionFind(n, tol)
    union = uf.union
    for u, v, dx, dy in zip(eu, ev, disp_x, disp_y):
        union(u, v, dx, dy)
    return uf


def detect_spanning(
    graph: AdjacencyGraph,
    susceptible: np.ndarray,
    region: TorusRegion | None = None,
    rule: str = "both",
) -> PercolationOutcome:
    """Decide whether the susceptible subgraph wraps around the region.

    Under rule "both" the subgraph percolates when some susceptible cluster
    winds in x and some cluster winds in y; under "either" one axis is
    enough. The attached ClusterReport matches connected_components on the
    same mask.
    """
    if region is None:
        region = graph.region
    elif region.side_length != graph.region.side_length:
        raise ValueError("region disagrees with the graph region")
    _percolates(False, False, rule)  # validate rule up front
    susceptible = np.asarray(susceptible, dtype=bool)
    if susceptible.shape != (graph.vertex_count,):
        raise ValueError(
            f"susceptible mask must have length {graph.vertex_count}, got {susceptible.shape}"
        )
    n = graph.vertex_count
    tol = WRAP_TOLERANCE * region.side_length
    if graph.edge_count:
        eu = graph.edges[:, 0]
        ev = graph.edges[:, 1]
        both = susceptible[eu] & susceptible[ev]
        uf = _wind_union(
            n,
            eu[both].tolist(),
            ev[both].tolist(),
            graph.edge_disp[both, 0].tolist(),
            graph.edge_disp[both, 1].tolist(),
            tol,
        )
    else:
        uf = DisplacementUnionFind(n, tol)

    labels = np.full(n, INACTIVE, dtype=np.int64)
    compact: dict[int, int] = {}
    sizes_list: list[int] = []
    wraps_x = False
    wraps_y = False
    find = uf.find
    for v in np.flatnonzero(susceptible).tolist():
        root = find(v)
        cid = compact.get(root)
        if cid is None:
            cid = len(compact)
            compact[root] = cid
            sizes_list.append(0)
            if uf.wrap_x[root]:
                wraps_x = True
            if uf.wrap_y[root]:
                wraps_y = True
        labels[v] = cid
        sizes_list[cid] += 1
    sizes = np.sort(np.asarray(sizes_list, dtype=np.int64))[::-1]
    report = ClusterReport(
        labels=labels,
        num_clusters=len(sizes_list),
        sizes=sizes,
        max_cluster_size=int(sizes[0]) if sizes.size else 0,
    )
    return PercolationOutcome(
        wraps_x=wraps_x,
        wraps_y=wraps_y,
        percolates=_percolates(wraps_x, wraps_y, rule),
        cluster_report=report,
    )


def cluster_stats(graph: AdjacencyGraph, susceptible: np.ndarray) -> ClusterReport:
    """Cluster count and sizes of the susceptible subgraph."""
    return connected_components(graph, susceptible)
