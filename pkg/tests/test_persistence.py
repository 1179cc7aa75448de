import math

import numpy as np
import pytest

from swarmtopo.persistence import (
    PersistenceDiagram,
    betti_at_scale,
    build_rips_filtration,
    compute_persistence,
    rips_diagram,
)

from oracles import gf2_betti, mst_dim0_bars, naive_persistence


def euclidean_matrix(points):
    p = np.asarray(points, dtype=float)
    return np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)


def circle_points(n, radius=1.0):
    a = 2 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(a), np.sin(a)])


def dim0_bars(diagram):
    return sorted((b, d) for dim, b, d in diagram.features if dim == 0)


# -- filtration construction ----------------------------------------------------


def test_filtration_triangle():
    d = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
    filt = build_rips_filtration(d, max_scale=1.0)
    assert filt.n_vertices == 3
    assert len(filt.edges) == 3
    assert len(filt.triangles) == 1
    assert filt.tri_values[0] == 1.0
    ordered = filt.ordered_simplices()
    positions = {s: i for i, (s, _) in enumerate(ordered)}
    for simplex, value in ordered:
        if len(simplex) > 1:
            import itertools

            for face in itertools.combinations(simplex, len(simplex) - 1):
                assert positions[face] < positions[simplex]


def test_filtration_below_min_distance():
    d = euclidean_matrix([[0, 0], [3, 0], [0, 4]])
    filt = build_rips_filtration(d, max_scale=1.0)
    assert len(filt.edges) == 0
    assert len(filt.triangles) == 0


def test_filtration_complete_at_diameter():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, size=(10, 2))
    d = euclidean_matrix(pts)
    filt = build_rips_filtration(d, max_scale=float(d.max()))
    assert len(filt.edges) == 45
    assert len(filt.triangles) == 120  # C(10, 3)


def test_filtration_inf_entries_skipped():
    d = np.array([[0, 1, np.inf], [1, 0, np.inf], [np.inf, np.inf, 0]])
    filt = build_rips_filtration(d, max_scale=10.0)
    assert len(filt.edges) == 1


def test_missing_face_raises():
    from swarmtopo.persistence import Filtration

    bad = Filtration(
        n_vertices=3,
        edges=np.array([[0, 1]]),
        edge_values=np.array([1.0]),
        triangles=np.array([[0, 1, 2]]),
        tri_values=np.array([1.0]),
    )
    with pytest.raises(ValueError):
        compute_persistence(bad)


# -- dim-0 against the MST oracle -------------------------------------------------


def test_two_points():
    d = np.array([[0.0, 1.0], [1.0, 0.0]])
    diagram = rips_diagram(d, max_scale=2.0)
    assert dim0_bars(diagram) == [(0.0, 1.0), (0.0, math.inf)]


def test_dim0_matches_mst_oracle_on_random_clouds():
    rng = np.random.default_rng(42)
    for trial in range(50):
        n = int(rng.integers(3, 31))
        pts = rng.uniform(0, 10, size=(n, 2))
        d = euclidean_matrix(pts)
        diagram = rips_diagram(d, max_scale=float(d.max()), max_dim=1)
        assert dim0_bars(diagram) == pytest.approx(mst_dim0_bars(d))


# -- circle-20 --------------------------------------------------------------------


def test_circle20_single_loop():
    pts = circle_points(20)
    d = euclidean_matrix(pts)
    diagram = rips_diagram(d, max_scale=2.0)
    ones = [(b, dd) for dim, b, dd in diagram.features if dim == 1]
    assert len(ones) == 1
    birth, death = ones[0]
    assert birth == pytest.approx(2 * math.sin(math.pi / 20), abs=1e-9)
    assert 1.6 <= death <= 1.8
    # cross-check the whole diagram against the naive dense reduction
    assert sorted(diagram.features) == pytest.approx(naive_persistence(d, 2.0))
    counts = betti_at_scale(diagram, 1.0)
    assert (counts.beta0, counts.beta1) == (1, 1)


def test_betti_at_scale_extremes():
    pts = circle_points(12)
    d = euclidean_matrix(pts)
    diagram = rips_diagram(d)
    at_zero = betti_at_scale(diagram, 0.0)
    assert (at_zero.beta0, at_zero.beta1) == (12, 0)
    big = betti_at_scale(diagram, float(d.max()) * 1.01)
    assert (big.beta0, big.beta1) == (1, 0)
    with pytest.raises(ValueError):
        betti_at_scale(diagram, -1.0)


# -- equivalence with the naive reduction -------------------------------------------


def test_matches_naive_reduction_random():
    rng = np.random.default_rng(9)
    for trial in range(12):
        n = int(rng.integers(4, 12))
        pts = rng.uniform(0, 5, size=(n, 2))
        d = euclidean_matrix(pts)
        scale = float(d.max()) * rng.uniform(0.5, 1.0)
        ours = sorted(rips_diagram(d, max_scale=scale).features)
        naive = naive_persistence(d, scale)
        assert ours == pytest.approx(naive)


def test_permutation_invariance():
    rng = np.random.default_rng(13)
    pts = rng.uniform(0, 3, size=(16, 2))
    d = euclidean_matrix(pts)
    perm = rng.permutation(16)
    a = sorted(rips_diagram(d).features)
    b = sorted(rips_diagram(d[np.ix_(perm, perm)]).features)
    assert a == pytest.approx(b)


def test_betti_matches_gf2_ranks():
    rng = np.random.default_rng(17)
    for trial in range(10):
        n = int(rng.integers(4, 9))
        pts = rng.uniform(0, 2, size=(n, 2))
        d = euclidean_matrix(pts)
        diagram = rips_diagram(d, max_scale=float(d.max()))
        for scale in np.linspace(0.1, float(d.max()), 5):
            counts = betti_at_scale(diagram, float(scale))
            b0, b1 = gf2_betti(d, float(scale))
            assert (counts.beta0, counts.beta1) == (b0, b1)


def test_dim1_deaths_bounded_by_diameter():
    rng = np.random.default_rng(23)
    pts = rng.uniform(0, 4, size=(25, 2))
    d = euclidean_matrix(pts)
    diagram = rips_diagram(d)
    diameter = float(d.max())
    for dim, _, death in diagram.features:
        if dim == 1:
            assert math.isfinite(death) and death <= diameter + 1e-12


def test_diagram_helpers():
    diagram = PersistenceDiagram([(0, 0.0, math.inf), (1, 0.5, 2.0), (1, 0.1, 0.4)])
    assert diagram.essential_births(0).tolist() == [0.0]
    assert sorted(diagram.interval_lengths(1).tolist()) == pytest.approx([0.3, 1.5])
    assert len(diagram.restricted(1).features) == 2
