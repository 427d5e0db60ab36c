"""Wrap-around square region, device sampling, and toroidal geometry.

All geometry is carried in meters. Point-process intensities are accepted
per km^2 and converted once at this boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

M2_PER_KM2 = 1.0e6


@dataclass(frozen=True)
class TorusRegion:
    """Square simulation region with wrap-around boundaries.

    side_length is in meters; all coordinates live in [0, side_length).
    """

    side_length: float

    def __post_init__(self):
        if not (math.isfinite(self.side_length) and self.side_length > 0):
            raise ValueError(f"side_length must be positive and finite, got {self.side_length}")

    @property
    def area_km2(self) -> float:
        return self.side_length * self.side_length / M2_PER_KM2

    def normalize(self, points: np.ndarray) -> np.ndarray:
        """Map coordinates into [0, side_length) by modular wrap."""
        return np.mod(np.asarray(points, dtype=float), self.side_length)


@dataclass(frozen=True, eq=False)
class DeviceSet:
    """One realization of device positions on the torus.

    Device identity is the row index into `positions`; it is stable for the
    lifetime of the realization and used as the join key everywhere else.
    """

    region: TorusRegion
    positions: np.ndarray  # (count, 2) float64, meters, in [0, side_length)^2

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64, copy=True)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        L = self.region.side_length
        if pos.size and (pos.min() < 0 or pos.max() >= L):
            raise ValueError("positions must lie in [0, side_length)^2")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def count(self) -> int:
        return self.positions.shape[0]


def sample_ppp(region: TorusRegion, intensity: float, seed: int) -> DeviceSet:
    """Sample a homogeneous Poisson point process on the torus.

    Parameters
    ----------
    region : TorusRegion
        Wrap-around square to populate.
    intensity : float
        Expected devices per km^2.
    seed : int
        64-bit seed; identical (region, intensity, seed) gives an identical
        DeviceSet bit-for-bit.

    Returns
    -------
    DeviceSet
        Poisson-distributed count of independently uniform positions.
    """
    if not (math.isfinite(intensity) and intensity >= 0):
        raise ValueError(f"intensity must be finite and >= 0, got {intensity}")
    rng = np.random.default_rng(seed)
    mean_count = intensity * region.area_km2
    n = int(rng.poisson(mean_count))
    # random() is in [0, 1), so scaled positions stay strictly below side_length
    positions = rng.random((n, 2)) * region.side_length
    return DeviceSet(region=region, positions=positions)


def torus_distance(p, q, region: TorusRegion):
    """Minimal-image distance between points on the torus.

    Accepts single points or broadcastable arrays of points (last axis = 2).
    Inputs must already be normalized into [0, side_length).
    """
    L = region.side_length
    d = np.abs(np.asarray(q, dtype=float) - np.asarray(p, dtype=float))
    d = np.minimum(d, L - d)
    out = np.hypot(d[..., 0], d[..., 1])
    return float(out) if out.ndim == 0 else out


def torus_displacement(p, q, region: TorusRegion) -> np.ndarray:
    """Minimal-image displacement q - p with components in (-L/2, L/2]."""
    L = region.side_length
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    d = d - L * np.round(d / L)
    # round() ties-to-even leaves an exact -L/2 unfolded; canonicalize to +L/2
    return np.where(d <= -0.5 * L, d + L, d)
