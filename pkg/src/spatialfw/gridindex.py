"""Uniform cell grid over the torus for fixed-radius neighbor discovery.

Cells are at least as wide as the query radius, so every point within the
radius of a query point lies in the 3x3 block of cells around it (with
modular wrap at the region boundary). Queries therefore touch at most nine
cells and run in expected O(1) per point at bounded density.
"""
from __future__ import annotations

import math

import numpy as np

from .torus import TorusRegion

_OFFSETS = [(dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]


class CellGrid:
    """Bucket positions into an ncells x ncells modular grid."""

    def __init__(self, positions: np.ndarray, region: TorusRegion, radius: float):
        L = region.side_length
        if not (math.isfinite(radius) and radius > 0):
            raise ValueError(f"radius must be positive and finite, got {radius}")
        if radius > L / 2:
            raise ValueError(f"radius {radius} exceeds side_length/2 = {L / 2} (wrap ambiguity)")
        ncells = int(L // radius)
        while L / ncells < radius:  # guard against float undershoot
            ncells -= 1
        self.region = region
        self.radius = radius
        self.ncells = ncells
        self.cell_size = L / ncells
        positions = np.asarray(positions, dtype=np.float64)
        self.n_points = positions.shape[0]
        cx = np.minimum((positions[:, 0] // self.cell_size).astype(np.int64), ncells - 1)
        cy = np.minimum((positions[:, 1] // self.cell_size).astype(np.int64), ncells - 1)
        self.cell_x = cx
        self.cell_y = cy
        cells = cy * ncells + cx
        self.order = np.argsort(cells, kind="stable").astype(np.int64)
        self.counts = np.bincount(cells, minlength=ncells * ncells).astype(np.int64)
        starts = np.cumsum(self.counts) - self.counts
        self.starts = starts

    def _members_of(self, cells: np.ndarray):
        """Points bucketed in each requested cell.

        Returns (owner, member): parallel arrays where owner[i] indexes into
        `cells` and member[i] is a point id stored in that cell.
        """
        m = self.counts[cells]
        total = int(m.sum())
        if total == 0:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        owner = np.repeat(np.arange(len(cells), dtype=np.int64), m)
        run_offsets = np.cumsum(m) - m
        within = np.arange(total, dtype=np.int64) - np.repeat(run_offsets, m)
        member = self.order[np.repeat(self.starts[cells], m) + within]
        return owner, member

    def candidate_pairs(self):
        """All unordered point pairs (u < v) whose cells are 3x3-adjacent.

        Every pair within `radius` of each other is included; the caller
        filters by exact distance. Output is deduplicated and sorted by
        (u, v), so it does not depend on bucket iteration order.
        """
        n = self.ncells
        us, vs = [], []
        for dx, dy in _OFFSETS:
            nb = ((self.cell_y + dy) % n) * n + ((self.cell_x + dx) % n)
            owner, member = self._members_of(nb)
            us.append(owner)
            vs.append(member)
        u = np.concatenate(us)
        v = np.concatenate(vs)
        keep = u < v
        u, v = u[keep], v[keep]
        keys = u * np.int64(self.n_points) + v
        keys = np.unique(keys)  # dedupes wrapped duplicates when ncells < 3
        return keys // self.n_points, keys % self.n_points

    def neighborhood_candidates(self, point_ids: np.ndarray):
        """Candidate points in the 3x3 cell block around each given point.

        Returns (owner, member) as in _members_of, with owner indexing into
        point_ids. May contain duplicates when ncells < 3.
        """
        point_ids = np.asarray(point_ids, dtype=np.int64)
        n = self.ncells
        qx = self.cell_x[point_ids]
        qy = self.cell_y[point_ids]
        owners, members = [], []
        for dx, dy in _OFFSETS:
            nb = ((qy + dy) % n) * n + ((qx + dx) % n)
            owner, member = self._members_of(nb)
            owners.append(owner)
            members.append(member)
        return np.concatenate(owners), np.concatenate(members)
