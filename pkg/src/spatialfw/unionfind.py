"""Disjoint-set engines: a plain variant for component labeling and a
displacement-augmented variant that detects clusters winding around the torus.
"""
from __future__ import annotations


class UnionFind:
    """Union by size with full path compression over vertices 0..n-1."""

    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, v: int) -> int:
        parent = self.parent
        p = parent[v]
        if p == v:
            return v
        g = parent[p]
        if g == p:
            return p
        root = g
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def union(self, a: int, b: int) -> bool:
        ra = self.find(a)
        rb = self.find(b)
        if ra == rb:
            return False
        size = self.size
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        size[ra] += size[rb]
        return True


class DisplacementUnionFind:
    """Union-find whose nodes carry a 2-D offset to their parent.

    Offsets chain up to the root, so each node knows its position in the
    "unrolled" plane relative to its set root. Edges are merged together
    with their minimal-image displacement; when an edge closes a cycle, the
    net cycle displacement is the winding vector times the region side. A
    net component larger than `tol` in x (or y) marks the merged cluster as
    wrapping around that axis, and wrap flags follow the surviving root.
    """

    __slots__ = ("parent", "size", "off_x", "off_y", "wrap_x", "wrap_y", "tol")

    def __init__(self, n: int, tol: float):
        self.parent = list(range(n))
        self.size = [1] * n
        self.off_x = [0.0] * n
        self.off_y = [0.0] * n
        self.wrap_x = [False] * n
        self.wrap_y = [False] * n
        self.tol = tol

    def find(self, v: int) -> int:
        """Find the root of v, compressing the path and re-basing offsets."""
        parent = self.parent
        p = parent[v]
        if p == v:
            return v
        g = parent[p]
        if g == p:
            return p
        path = [v, p]
        root = g
        while parent[root] != root:
            path.append(root)
            root = parent[root]
        off_x, off_y = self.off_x, self.off_y
        # nodes nearest the root first, so parent offsets are already re-based
        for node in reversed(path):
            pp = parent[node]
            if pp != root:
                off_x[node] += off_x[pp]
                off_y[node] += off_y[pp]
                parent[node] = root
        return root

    def union(self, u: int, v: int, dx: float, dy: float) -> None:
        """Merge the sets of u and v given displacement (dx, dy) = pos(v) - pos(u)."""
        ru = self.find(u)
        rv = self.find(v)
        off_x, off_y = self.off_x, self.off_y
        if ru == rv:
            net_x = off_x[v] - off_x[u] - dx
            net_y = off_y[v] - off_y[u] - dy
            if net_x > self.tol or net_x < -self.tol:
                self.wrap_x[ru] = True
            if net_y > self.tol or net_y < -self.tol:
                self.wrap_y[ru] = True
            return
        size = self.size
        if size[ru] < size[rv]:
            # attach ru under rv
            self.parent[ru] = rv
            off_x[ru] = off_x[v] - off_x[u] - dx
            off_y[ru] = off_y[v] - off_y[u] - dy
            size[rv] += size[ru]
            if self.wrap_x[ru]:
                self.wrap_x[rv] = True
            if self.wrap_y[ru]:
                self.wrap_y[rv] = True
        else:
            self.parent[rv] = ru
            off_x[rv] = off_x[u] + dx - off_x[v]
            off_y[rv] = off_y[u] + dy - off_y[v]
            size[ru] += size[rv]
            if self.wrap_x[rv]:
                self.wrap_x[ru] = True
            if self.wrap_y[rv]:
                self.wrap_y[ru] = True
