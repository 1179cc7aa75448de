import math

import numpy as np
import pytest

from swarmtopo.geodesic import (
    FreeSpaceGraph,
    SpaceTimePoint,
    estimate_deltas,
    geodesic_distance,
    pairwise_geodesics,
    reference_point_cloud,
    space_time_distance,
)
from swarmtopo.geometry import Domain
from swarmtopo.simulate import EncounterEvent, LandmarkCommunity

from oracles import lattice_space_time_distance, octile_grid_distance

OBSTACLE_DOMAIN = Domain(10, 10, [[[3, 3], [7, 3], [7, 7], [3, 7]]])


def test_straight_line_in_empty_square():
    dom = Domain(1, 1)
    assert geodesic_distance(dom, (0, 0), (1, 1)) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_zero_for_identical_points():
    assert geodesic_distance(OBSTACLE_DOMAIN, (1, 1), (1, 1)) == 0.0


def test_around_centered_obstacle():
    # (0,5) to (10,5) bends at two obstacle corners: 2 sqrt(3^2+2^2) + 4
    expect = 2 * math.hypot(3, 2) + 4
    assert geodesic_distance(OBSTACLE_DOMAIN, (0, 5), (10, 5)) == pytest.approx(expect, abs=1e-9)


def test_rejects_points_in_obstacle():
    with pytest.raises(ValueError):
        geodesic_distance(OBSTACLE_DOMAIN, (5, 5), (1, 1))
    with pytest.raises(ValueError):
        geodesic_distance(OBSTACLE_DOMAIN, (1, 1), (11, 1))


def test_geodesic_dominates_euclidean():
    rng = np.random.default_rng(8)
    pts = []
    while len(pts) < 12:
        cand = rng.uniform(0, 10, size=2)
        if OBSTACLE_DOMAIN.contains_point(cand):
            pts.append(cand)
    pts = np.asarray(pts)
    d = pairwise_geodesics(OBSTACLE_DOMAIN, pts)
    euclid = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    assert np.all(d >= euclid - 1e-9)
    # metric axioms
    assert np.allclose(d, d.T)
    assert np.allclose(np.diag(d), 0.0)
    n = len(pts)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                assert d[i, j] <= d[i, k] + d[k, j] + 1e-9


def test_octile_grid_sandwich():
    # an 8-neighbour grid metric overestimates geodesics by at most
    # sec(pi/8) and never underestimates (up to discretization slack)
    rng = np.random.default_rng(5)
    pairs = []
    while len(pairs) < 4:
        cand = rng.uniform(0.5, 9.5, size=(2, 2))
        if OBSTACLE_DOMAIN.in_free_space(cand).all():
            pairs.append(cand)
    for p, q in pairs:
        exact = geodesic_distance(OBSTACLE_DOMAIN, p, q)
        octile = octile_grid_distance(OBSTACLE_DOMAIN, p, q, resolution=0.05)
        slack = 4 * 0.05
        assert exact <= octile + slack
        assert octile <= 1.0824 * exact + slack


def test_monotone_refinement():
    pairs = [((0, 5), (10, 5)), ((1, 1), (9, 9)), ((0.5, 8), (9.5, 2))]
    for p, q in pairs:
        coarse = geodesic_distance(OBSTACLE_DOMAIN, p, q, resolution=0.1)
        fine = geodesic_distance(OBSTACLE_DOMAIN, p, q, resolution=0.05)
        assert fine <= coarse + 2 * 0.1


# -- space-time metric -----------------------------------------------------------


def test_space_time_reduces_to_max():
    dom = Domain(20, 1)
    a = SpaceTimePoint((1.0, 0.5), 0.0)
    b = SpaceTimePoint((4.0, 0.5), 5.0)
    assert space_time_distance(dom, a, b) == pytest.approx(5.0)
    c = SpaceTimePoint((4.0, 0.5), 3.0)
    assert space_time_distance(dom, a, c) == pytest.approx(3.0)
    assert space_time_distance(dom, a, a) == 0.0


def test_space_time_against_lattice_search():
    # discretized unit-rate trajectory search realizes max(d, |dt|)
    for d_space, dt in ((3.0, 5.0), (3.0, 3.0), (2.0, 0.0), (0.0, 4.0)):
        expect = max(d_space, abs(dt))
        found = lattice_space_time_distance(d_space, dt, h=0.5)
        assert found == pytest.approx(expect, abs=1e-9)


# -- reference clouds and deltas ----------------------------------------------------


def test_reference_cloud_grid_count():
    pts, dist = reference_point_cloud(Domain(10, 10), spacing=1.0)
    assert len(pts) == 121
    assert dist.shape == (121, 121)
    assert np.allclose(dist, dist.T)


def test_reference_cloud_covering_radius_halves():
    dom = OBSTACLE_DOMAIN
    rng = np.random.default_rng(3)
    probes = []
    while len(probes) < 200:
        cand = rng.uniform(0, 10, size=2)
        if dom.contains_point(cand):
            probes.append(cand)
    probes = np.asarray(probes)

    def covering(spacing):
        pts, _ = reference_point_cloud(dom, spacing)
        d = np.linalg.norm(probes[:, None] - pts[None, :], axis=-1)
        return d.min(axis=1).max()

    assert covering(1.0) <= 1.0 * math.sqrt(2) / 2 + 1e-9
    assert covering(0.5) <= 0.5 * math.sqrt(2) / 2 + 1e-9


def test_reference_cloud_annulus_has_hole():
    from swarmtopo.persistence import rips_diagram

    pts, dist = reference_point_cloud(OBSTACLE_DOMAIN, spacing=1.0)
    diagram = rips_diagram(dist)
    lengths = diagram.interval_lengths(1)
    assert len(lengths) >= 1
    # the obstacle hole has far more persistence than any noise feature
    top = np.sort(lengths)[::-1]
    assert top[0] > 3 * (top[1] if len(top) > 1 else 0.1)


def test_reference_cloud_validates_spacing():
    with pytest.raises(ValueError):
        reference_point_cloud(Domain(5, 5), spacing=-1)
    with pytest.raises(ValueError):
        reference_point_cloud(Domain(5, 5), spacing=20)


def _event(x, y, t=1.0, ids=(1, 2)):
    return EncounterEvent(t, t, ids[0], ids[1], (float(x), float(y)))


def test_estimate_deltas_dense_events():
    dom = Domain(10, 10)
    events = []
    k = 0
    for x in range(11):
        for y in range(11):
            events.append(_event(x, y, t=float(k), ids=(1, 2 + k)))
            k += 1
    comms = [
        LandmarkCommunity(1, {0}, (0.0, 0.0)),
        LandmarkCommunity(2, {1}, (3.0, 4.0)),
    ]
    delta_e, delta_l = estimate_deltas(events, comms, dom, spacing=1.0)
    assert delta_e <= 1.0 + 1e-9
    assert delta_l == pytest.approx(5.0, abs=1e-9)


def test_estimate_deltas_landmark_pair_distance():
    dom = Domain(10, 10)
    events = [_event(1, 1, ids=(1, 3)), _event(8.27, 1, t=2.0, ids=(2, 3))]
    comms = [
        LandmarkCommunity(1, {0}, (1.0, 1.0)),
        LandmarkCommunity(2, {1}, (8.27, 1.0)),
    ]
    _, delta_l = estimate_deltas(events, comms, dom, spacing=1.0)
    assert delta_l == pytest.approx(7.27, abs=1e-9)


def test_estimate_deltas_single_event_brute_force():
    dom = Domain(10, 10)
    events = [_event(2.0, 3.0)]
    comms = [
        LandmarkCommunity(1, {0}, (2.0, 3.0)),
        LandmarkCommunity(2, {0}, (2.5, 3.0)),
    ]
    delta_e, _ = estimate_deltas(events, comms, dom, spacing=1.0)
    # brute force over the same grid: farthest free grid point from the event
    xs = np.arange(0, 10.0 + 1e-9, 1.0)
    grid = np.array([(x, y) for x in xs for y in xs])
    expect = np.linalg.norm(grid - np.array([2.0, 3.0]), axis=1).max()
    assert delta_e == pytest.approx(expect, rel=1e-6)


def test_estimate_deltas_validates():
    dom = Domain(10, 10)
    with pytest.raises(ValueError):
        estimate_deltas([EncounterEvent(0, 0, 1, 2, None)], [], dom, 1.0)
    with pytest.raises(ValueError):
        estimate_deltas([_event(1, 1)], [LandmarkCommunity(1, {0}, (1.0, 1.0))], dom, 1.0)


def test_free_space_graph_components():
    fsg = FreeSpaceGraph(OBSTACLE_DOMAIN, resolution=0.5)
    assert fsg.component_count() == 1
    assert OBSTACLE_DOMAIN.in_free_space(fsg.grid_points).all()
