import numpy as np
import pytest

from spatialfw import (
    FirewallPolicy,
    apply_secured_zones,
    build_rgg,
    select_firewalls,
    torus_distance,
)

from conftest import make_devices, random_instance
from oracles import zone_mask_oracle


def test_policy_validation():
    FirewallPolicy("random")
    FirewallPolicy("degree")
    FirewallPolicy("random-dc", 400.0)
    FirewallPolicy("degree-dc", 400.0)
    with pytest.raises(ValueError):
        FirewallPolicy("greedy")
    with pytest.raises(ValueError):
        FirewallPolicy("random-dc")  # DC without a spacing floor
    with pytest.raises(ValueError):
        FirewallPolicy("degree-dc", 0.0)


def test_fraction_zero_selects_nothing():
    devices, graph, _ = random_instance(1, n_max=100)
    for policy in (FirewallPolicy("random"), FirewallPolicy("degree-dc", 100.0)):
        ids, relaxed = select_firewalls(graph, devices, policy, 0.0, seed=9)
        assert ids == []
        assert relaxed is False


def test_fraction_one_selects_everything():
    devices, graph, _ = random_instance(2, n_max=80)
    ids, relaxed = select_firewalls(graph, devices, FirewallPolicy("random"), 1.0, seed=9)
    assert sorted(ids) == list(range(devices.count))
    assert relaxed is False


def test_fraction_out_of_range_rejected():
    devices, graph, _ = random_instance(3, n_max=50)
    for bad in (-0.01, 1.01):
        with pytest.raises(ValueError):
            select_firewalls(graph, devices, FirewallPolicy("random"), bad, seed=1)


def test_target_count_rounds_half_up():
    devices, graph, _ = random_instance(4, n_max=0 + 50)
    n = devices.count
    ids, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.5 / n, seed=3)
    assert len(ids) == 1  # 0.5 devices rounds up
    ids, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.49 / n, seed=3)
    assert len(ids) == 0


def test_selection_count_for_every_policy():
    devices, graph, _ = random_instance(5, n_max=200)
    n = devices.count
    policies = [
        FirewallPolicy("random"),
        FirewallPolicy("degree"),
        FirewallPolicy("random-dc", 50.0),
        FirewallPolicy("degree-dc", 50.0),
    ]
    for fraction in (0.0, 0.05, 0.31, 0.77, 1.0):
        k = int(np.floor(fraction * n + 0.5))
        for policy in policies:
            ids, _ = select_firewalls(graph, devices, policy, fraction, seed=11)
            assert len(ids) == k
            assert len(set(ids)) == len(ids)


def test_degree_aware_takes_highest_degrees():
    devices, graph, _ = random_instance(6, n_max=150)
    ids, relaxed = select_firewalls(graph, devices, FirewallPolicy("degree"), 0.2, seed=1)
    assert relaxed is False
    selected = np.zeros(devices.count, bool)
    selected[ids] = True
    if selected.any() and (~selected).any():
        assert graph.degrees[selected].min() >= graph.degrees[~selected].max()


def test_degree_aware_breaks_ties_by_lower_index():
    # a square of four devices all within range: all degrees equal
    devices = make_devices([[0.0, 0.0], [100.0, 0.0], [0.0, 100.0], [100.0, 100.0]])
    graph = build_rgg(devices, 200.0)
    assert len(set(graph.degrees.tolist())) == 1
    ids, _ = select_firewalls(graph, devices, FirewallPolicy("degree"), 0.5, seed=0)
    assert ids == [0, 1]


def test_random_is_uniform_permutation_prefix():
    devices, graph, _ = random_instance(7, n_max=100)
    ids_a, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.3, seed=77)
    ids_b, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.3, seed=77)
    assert ids_a == ids_b
    ids_c, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.3, seed=78)
    assert ids_a != ids_c


def test_dc_respects_min_distance_when_not_relaxed():
    devices, graph, _ = random_instance(8, n_max=200)
    min_d = 120.0
    for kind in ("random-dc", "degree-dc"):
        ids, relaxed = select_firewalls(
            graph, devices, FirewallPolicy(kind, min_d), 0.05, seed=5
        )
        if relaxed:
            continue
        pos = devices.positions[ids]
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                assert torus_distance(pos[i], pos[j], devices.region) >= min_d


def test_dc_scan_equals_unconstrained_when_floor_is_tiny():
    devices, graph, _ = random_instance(9, n_max=120)
    ids_random, _ = select_firewalls(graph, devices, FirewallPolicy("random"), 0.25, seed=13)
    ids_dc, relaxed = select_firewalls(
        graph, devices, FirewallPolicy("random-dc", 1e-9), 0.25, seed=13
    )
    assert relaxed is False
    assert ids_dc == ids_random


def test_dc_relaxation_with_impossible_spacing():
    # spacing above the torus diameter: only the first scanned device can be
    # accepted, the rest must be filled back in scan order
    rng = np.random.default_rng(50)
    positions = rng.random((50, 2)) * 1000.0
    devices = make_devices(positions, 1000.0)
    graph = build_rgg(devices, 250.0)
    min_d = 2000.0  # region diameter is ~707
    ids, relaxed = select_firewalls(
        graph, devices, FirewallPolicy("degree-dc", min_d), 0.3, seed=3
    )
    assert relaxed is True
    assert len(ids) == 15
    by_degree = np.argsort(-graph.degrees, kind="stable")
    # greedy pass accepts exactly the top-degree device, then fills in scan order
    assert ids == by_degree[:15].tolist()
    assert ids[0] == by_degree[0]


def test_degree_selection_invariant_under_relabeling():
    # instance chosen so the degree ranking has a strict gap at the boundary
    rng = np.random.default_rng(0)
    positions = rng.random((60, 2)) * 1000.0
    devices = make_devices(positions, 1000.0)
    graph = build_rgg(devices, 200.0)
    k = 9
    ranked = np.sort(graph.degrees)[::-1]
    assert ranked[k - 1] > ranked[k]  # tie-free boundary
    ids, _ = select_firewalls(graph, devices, FirewallPolicy("degree"), k / 60, seed=0)

    perm = np.random.default_rng(1).permutation(60)
    devices_p = make_devices(positions[perm], 1000.0)
    graph_p = build_rgg(devices_p, 200.0)
    ids_p, _ = select_firewalls(graph_p, devices_p, FirewallPolicy("degree"), k / 60, seed=0)
    assert {perm[i] for i in ids_p} == set(ids)


def test_zones_empty_firewalls_leave_all_susceptible():
    devices, _, _ = random_instance(10, n_max=60)
    layout = apply_secured_zones(devices, [], 100.0)
    assert layout.protected_count == 0
    assert layout.susceptible_count == devices.count
    assert layout.firewall_ids == []


def test_zone_covers_only_the_isolated_firewall():
    devices = make_devices([[500.0, 500.0], [900.0, 900.0], [1500.0, 500.0]])
    layout = apply_secured_zones(devices, [0], 200.0)
    assert layout.protected.tolist() == [True, False, False]
    assert layout.susceptible.tolist() == [False, True, True]


def test_firewalls_are_always_protected():
    devices, graph, _ = random_instance(11, n_max=200)
    ids, relaxed = select_firewalls(graph, devices, FirewallPolicy("random"), 0.2, seed=2)
    layout = apply_secured_zones(devices, ids, 60.0, dc_relaxed=relaxed)
    assert layout.protected[ids].all()
    assert not np.any(layout.protected & layout.susceptible)
    assert np.all(layout.protected | layout.susceptible)


def test_zone_mask_matches_brute_force():
    for seed in range(8):
        devices, graph, _ = random_instance(seed + 30, n_max=300)
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, max(2, devices.count // 10)))
        ids = rng.choice(devices.count, size=k, replace=False).tolist()
        zone_radius = float(rng.uniform(40.0, 220.0))
        layout = apply_secured_zones(devices, ids, zone_radius)
        expected = zone_mask_oracle(
            devices.positions, devices.region.side_length, ids, zone_radius
        )
        assert np.array_equal(layout.protected, expected)


def test_zones_reject_bad_input():
    devices, _, _ = random_instance(12, n_max=40)
    with pytest.raises(ValueError):
        apply_secured_zones(devices, [0], 0.0)
    with pytest.raises(ValueError):
        apply_secured_zones(devices, [0], devices.region.side_length)
    with pytest.raises(ValueError):
        apply_secured_zones(devices, [devices.count], 100.0)
