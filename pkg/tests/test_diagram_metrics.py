import math

import numpy as np
import pytest

from swarmtopo.diagram_metrics import bottleneck_distance, hausdorff_distance
from swarmtopo.persistence import PersistenceDiagram

from oracles import brute_force_bottleneck, brute_force_hausdorff


def diagram(points, dim=1, essential=()):
    feats = [(dim, float(b), float(d)) for b, d in points]
    feats += [(dim, float(b), math.inf) for b in essential]
    return PersistenceDiagram(feats)


def test_single_point_to_empty():
    result = bottleneck_distance(diagram([(0, 1)]), diagram([]), dim=1)
    assert result.distance == pytest.approx(0.5)
    assert (0, None) in result.matching


def test_one_against_one():
    # direct match costs 1; sending both to the diagonal costs max(1, 0.5)
    result = bottleneck_distance(diagram([(0, 2)]), diagram([(0, 1)]), dim=1)
    assert result.distance == pytest.approx(1.0)


def test_identity():
    d = diagram([(0.1, 0.9), (0.3, 2.0), (1.0, 1.5)])
    result = bottleneck_distance(d, d, dim=1)
    assert result.distance == 0.0
    matched = {(a, b) for a, b in result.matching if a is not None and b is not None}
    assert matched == {(0, 0), (1, 1), (2, 2)}


def test_mismatched_essential_counts():
    a = diagram([], essential=[0.0])
    b = diagram([])
    assert bottleneck_distance(a, b, dim=1).distance == math.inf


def test_essential_features_match_by_birth():
    a = diagram([], essential=[0.0, 3.0])
    b = diagram([], essential=[0.5, 2.0])
    result = bottleneck_distance(a, b, dim=1)
    assert result.distance == pytest.approx(1.0)  # |3.0 - 2.0|


def test_brute_force_agreement_random():
    rng = np.random.default_rng(99)
    for trial in range(100):
        na = int(rng.integers(0, 6))
        nb = int(rng.integers(0, 6))
        pa = []
        for _ in range(na):
            b = rng.uniform(0, 5)
            pa.append((b, b + rng.uniform(0.01, 4)))
        pb = []
        for _ in range(nb):
            b = rng.uniform(0, 5)
            pb.append((b, b + rng.uniform(0.01, 4)))
        ours = bottleneck_distance(diagram(pa), diagram(pb), dim=1).distance
        expect = brute_force_bottleneck(pa, pb)
        assert abs(ours - expect) <= 1e-12


def test_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(7)
    diagrams = []
    for _ in range(9):
        pts = []
        for _ in range(int(rng.integers(1, 10))):
            b = rng.uniform(0, 3)
            pts.append((b, b + rng.uniform(0.01, 3)))
        diagrams.append(diagram(pts))
    for i in range(0, 9, 3):
        a, b, c = diagrams[i], diagrams[i + 1], diagrams[i + 2]
        dab = bottleneck_distance(a, b, 1).distance
        dba = bottleneck_distance(b, a, 1).distance
        dbc = bottleneck_distance(b, c, 1).distance
        dac = bottleneck_distance(a, c, 1).distance
        assert abs(dab - dba) <= 1e-12
        assert dac <= dab + dbc + 1e-12


def test_perturbation_stability():
    rng = np.random.default_rng(31)
    pts = [(rng.uniform(0, 2), 0) for _ in range(8)]
    pts = [(b, b + rng.uniform(0.05, 2)) for b, _ in pts]
    base = diagram(pts)
    for eta in (0.01, 0.1):
        noisy = diagram(
            [
                (b + rng.uniform(-eta, eta), d + rng.uniform(-eta, eta))
                for b, d in pts
            ]
        )
        assert bottleneck_distance(base, noisy, 1).distance <= eta + 1e-12


def test_matching_is_perfect_cover():
    rng = np.random.default_rng(4)
    pa = [(b, b + rng.uniform(0.1, 2)) for b in rng.uniform(0, 3, 7)]
    pb = [(b, b + rng.uniform(0.1, 2)) for b in rng.uniform(0, 3, 5)]
    result = bottleneck_distance(diagram(pa), diagram(pb), dim=1)
    covered_a = {a for a, _ in result.matching if a is not None}
    covered_b = {b for _, b in result.matching if b is not None}
    assert covered_a == set(range(7))
    assert covered_b == set(range(5))


# -- Hausdorff ---------------------------------------------------------------


def test_hausdorff_identical():
    pts = np.random.default_rng(0).uniform(0, 1, size=(10, 2))
    assert hausdorff_distance(pts, pts) == 0.0


def test_hausdorff_line_example():
    assert hausdorff_distance(np.array([[0.0, 0.0]]), np.array([[0.0, 0.0], [5.0, 0.0]])) == 5.0


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(12)
    for trial in range(20):
        x = rng.uniform(0, 10, size=(int(rng.integers(1, 15)), 2))
        y = rng.uniform(0, 10, size=(int(rng.integers(1, 15)), 2))
        ours = hausdorff_distance(x, y)
        assert ours == pytest.approx(brute_force_hausdorff(x.tolist(), y.tolist()))


def test_hausdorff_with_matrix_and_callback():
    x = np.array([[0.0, 0.0], [1.0, 0.0]])
    y = np.array([[0.0, 3.0]])
    cross = np.linalg.norm(x[:, None] - y[None, :], axis=-1)
    direct = hausdorff_distance(x, y)
    assert hausdorff_distance(x, y, metric=cross) == pytest.approx(direct)
    assert hausdorff_distance(
        x, y, metric=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q)))
    ) == pytest.approx(direct)


def test_hausdorff_empty_raises():
    with pytest.raises(ValueError):
        hausdorff_distance(np.zeros((0, 2)), np.zeros((1, 2)))
