import numpy as np
import pytest

from spatialfw import INACTIVE, build_rgg, connected_components, dump_edges

from conftest import make_devices, random_instance
from oracles import bfs_components, brute_force_edges


def test_two_devices_within_range_connect():
    devices = make_devices([[1000.0, 1000.0], [1150.0, 1000.0]])
    graph = build_rgg(devices, 200.0)
    assert graph.edge_count == 1
    assert graph.edges.tolist() == [[0, 1]]
    assert graph.degrees.tolist() == [1, 1]


def test_edge_across_wrap_boundary():
    devices = make_devices([[100.0, 100.0], [3950.0, 100.0]])
    graph = build_rgg(devices, 200.0)
    assert graph.edge_count == 1  # wrap distance is 150
    # displacement points the short way around
    assert graph.edge_disp[0].tolist() == [-150.0, 0.0]


def test_threshold_is_inclusive():
    devices = make_devices([[0.0, 0.0], [200.0, 0.0], [0.0, 200.000001]])
    graph = build_rgg(devices, 200.0)
    assert graph.edges.tolist() == [[0, 1]]


def test_rejects_bad_range():
    devices = make_devices([[0.0, 0.0]])
    for bad in (0.0, -5.0, float("nan")):
        with pytest.raises(ValueError):
            build_rgg(devices, bad)
    with pytest.raises(ValueError):
        build_rgg(devices, 2000.1)  # beyond side_length / 2


def test_empty_device_set():
    devices = make_devices(np.empty((0, 2)))
    graph = build_rgg(devices, 200.0)
    assert graph.vertex_count == 0
    assert graph.edge_count == 0


def test_matches_brute_force_oracle():
    for seed in range(10):
        devices, graph, radius = random_instance(seed, n_max=300)
        expected = brute_force_edges(devices.positions, devices.region.side_length, radius)
        got = {tuple(edge) for edge in graph.edges.tolist()}
        assert got == expected


def test_adjacency_structure_invariants():
    devices, graph, _ = random_instance(42, n_max=300)
    n = graph.vertex_count
    seen = set()
    for v in range(n):
        nbrs = graph.neighbors(v).tolist()
        assert v not in nbrs
        assert nbrs == sorted(nbrs)
        assert len(nbrs) == len(set(nbrs)) == graph.degrees[v]
        for u in nbrs:
            seen.add((min(u, v), max(u, v)))
            assert v in graph.neighbors(u)
    assert seen == {tuple(e) for e in graph.edges.tolist()}


def test_build_is_deterministic():
    devices, graph_a, radius = random_instance(5)
    graph_b = build_rgg(devices, radius)
    assert np.array_equal(graph_a.edges, graph_b.edges)
    assert np.array_equal(graph_a.indices, graph_b.indices)
    assert np.array_equal(graph_a.edge_disp, graph_b.edge_disp)


def test_small_grid_still_correct():
    # ranges close to side_length/2 force a 2x2 cell grid with wrapped duplicates
    rng = np.random.default_rng(8)
    positions = rng.random((60, 2)) * 1000.0
    devices = make_devices(positions, 1000.0)
    for radius in (340.0, 480.0, 500.0):
        graph = build_rgg(devices, radius)
        expected = brute_force_edges(positions, 1000.0, radius)
        assert {tuple(e) for e in graph.edges.tolist()} == expected


def test_components_all_inactive():
    devices, graph, _ = random_instance(3, n_max=50)
    report = connected_components(graph, np.zeros(graph.vertex_count, bool))
    assert report.num_clusters == 0
    assert report.max_cluster_size == 0
    assert report.sizes.size == 0
    assert np.all(report.labels == INACTIVE)


def test_components_path_with_inactive_middle():
    devices = make_devices([[0.0, 0.0], [150.0, 0.0], [300.0, 0.0]])
    graph = build_rgg(devices, 200.0)
    assert graph.edge_count == 2
    active = np.array([True, False, True])
    report = connected_components(graph, active)
    assert report.num_clusters == 2
    assert report.sizes.tolist() == [1, 1]
    assert report.labels.tolist() == [0, INACTIVE, 1]


def test_components_match_bfs_oracle():
    rng = np.random.default_rng(100)
    for seed in range(25):
        devices, graph, _ = random_instance(seed + 1000, n_max=250)
        n = graph.vertex_count
        active = rng.random(n) < rng.uniform(0.2, 1.0)
        report = connected_components(graph, active)
        labels, sizes = bfs_components(n, graph.edges.tolist(), active)
        assert np.array_equal(report.labels, labels)
        assert np.array_equal(report.sizes, sizes)
        assert report.num_clusters == len(sizes)
        assert report.sizes.sum() == active.sum()


def test_max_cluster_size_shrinks_with_nested_masks():
    rng = np.random.default_rng(200)
    devices, graph, _ = random_instance(77, n_max=300)
    n = graph.vertex_count
    mask = np.ones(n, bool)
    last = n + 1
    for _ in range(6):
        report = connected_components(graph, mask)
        assert report.max_cluster_size <= last
        last = report.max_cluster_size
        drop = rng.random(n) < 0.2
        mask = mask & ~drop


def test_dump_edges_format(tmp_path):
    devices = make_devices([[0.0, 0.0], [150.0, 0.0], [300.0, 0.0]])
    graph = build_rgg(devices, 200.0)
    out = tmp_path / "edges.txt"
    dump_edges(graph, out)
    lines = out.read_text().splitlines()
    assert lines == ["0 1", "1 2"]
