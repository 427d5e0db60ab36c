from __future__ import annotations

import numpy as np
import pytest

from spatialfw import DeviceSet, TorusRegion, build_rgg


@pytest.fixture
def region():
    return TorusRegion(4000.0)


def make_devices(positions, side_length=4000.0) -> DeviceSet:
    return DeviceSet(
        region=TorusRegion(side_length),
        positions=np.asarray(positions, dtype=float),
    )


def random_instance(seed, n_max=400, side_length=1000.0, radius_range=(60.0, 160.0)):
    """A reproducible random device layout plus graph for oracle comparisons."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    positions = rng.random((n, 2)) * side_length
    radius = float(rng.uniform(*radius_range))
    devices = make_devices(positions, side_length)
    graph = build_rgg(devices, radius)
    return devices, graph, radius
