"""Loss values on hand-checked layouts, quality ranges, and failure modes."""

import numpy as np
import pytest

from gdlayout import criteria
from gdlayout.criteria import (HIGHER_BETTER, CriterionId, CrossingSeparators,
                               Hyper, NpConfig, fit_separators,
                               loss_aspect_ratio, loss_crossing_angle,
                               loss_crossings, loss_gabriel,
                               loss_ideal_edge_length, loss_neighborhood,
                               loss_stress, loss_vertex_resolution,
                               neighborhood_sizes, quality, quality_report)
from gdlayout.errors import (CoincidentNodes, DegenerateLayout, GraphError,
                             MissingSeparator, ZeroLengthEdge)
from gdlayout.geometry import detect_crossings
from gdlayout.graph_model import (complete, cycle, grid, make_graph, path,
                                  shortest_paths)


def _polygon(n, radius=1.0):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return radius * np.stack([np.cos(t), np.sin(t)], axis=1)


# -- stress ------------------------------------------------------------------

def test_stress_two_nodes():
    g = path(2)
    D = shortest_paths(g)
    X = np.array([[0.0, 0.0], [2.0, 0.0]])
    res = loss_stress(g, D, X)
    assert res.value == pytest.approx(1.0)        # (2-1)^2 / 1^2
    # pulling the far node back toward ideal reduces the loss
    assert res.grad[1, 0] > 0 and res.grad[0, 0] < 0
    X[1, 0] = 1.0
    assert loss_stress(g, D, X).value == pytest.approx(0.0)


def test_stress_path3_hand_value():
    g = path(3)
    D = shortest_paths(g)
    X = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert loss_stress(g, D, X).value == pytest.approx(0.0)
    X[2, 0] = 3.0   # pairs: (0,1) exact, (1,2): (2-1)^2, (0,2): (3-2)^2/4
    assert loss_stress(g, D, X).value == pytest.approx(1.0 + 0.25)


def test_stress_coincident_nodes_raise():
    g = path(2)
    D = shortest_paths(g)
    with pytest.raises(CoincidentNodes):
        loss_stress(g, D, np.zeros((2, 2)))


# -- ideal edge length -------------------------------------------------------

def test_ideal_length_uniform_is_zero():
    X = _polygon(8, radius=3.0)
    res = loss_ideal_edge_length(cycle(8), X)
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(res.grad, 0.0, atol=1e-9)


def test_ideal_length_hand_value():
    g = path(3)
    X = np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 0.0]])
    # lengths 1 and 3, mean 2, relative deviations -1/2 and +1/2
    assert loss_ideal_edge_length(g, X).value == pytest.approx(0.5)
    # explicit targets instead of the mean
    res = loss_ideal_edge_length(g, X, ideal=np.array([1.0, 3.0]))
    assert res.value == pytest.approx(0.0)


def test_ideal_length_uses_graph_targets():
    g = make_graph(3, [(0, 1), (1, 2)], ideal_lengths=[1.0, 3.0])
    X = np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 0.0]])
    assert loss_ideal_edge_length(g, X).value == pytest.approx(0.0)
    assert criteria.quality_ideal_edge_length(g, X) == pytest.approx(0.0)


def test_zero_length_edge_raises():
    g = path(2)
    with pytest.raises(ZeroLengthEdge):
        loss_ideal_edge_length(g, np.zeros((2, 2)))


# -- neighborhood preservation -----------------------------------------------

def test_neighborhood_perfect_polygon():
    g = cycle(10)
    X = _polygon(10, radius=10.0)
    assert criteria.quality_neighborhood(g, X) == pytest.approx(1.0)
    # at this scale every margin clears the hinge: zero loss
    assert loss_neighborhood(g, X).value == pytest.approx(0.0)


def test_neighborhood_quality_detects_shuffle():
    g = cycle(10)
    rng = np.random.default_rng(2)
    X = rng.random((10, 2))
    q = criteria.quality_neighborhood(g, X)
    assert 0.0 <= q < 1.0


def test_neighborhood_sizes_and_k_override():
    g = cycle(6)
    assert neighborhood_sizes(g).tolist() == [2] * 6
    assert neighborhood_sizes(g, NpConfig(k=3)).tolist() == [3] * 6
    star = make_graph(5, [(0, i) for i in range(1, 5)])
    assert neighborhood_sizes(star).tolist() == [3, 1, 1, 1, 1]  # clamped


def test_neighborhood_k_validation():
    g = cycle(6)
    with pytest.raises(GraphError):
        neighborhood_sizes(g, NpConfig(k=5))     # > n - 2
    with pytest.raises(GraphError):
        neighborhood_sizes(g, NpConfig(k=0))
    with pytest.raises(GraphError):
        loss_neighborhood(path(2), np.array([[0.0, 0.0], [1.0, 0.0]]))


# -- crossings ---------------------------------------------------------------

K4_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def test_separator_initial_sides():
    # asymmetric crossing, so the midpoints of the two edges differ
    g = make_graph(4, [(0, 1), (2, 3)])
    X = np.array([[0.0, 0.0], [2.0, 2.0], [0.0, 1.0], [1.0, 0.0]])
    pairs = detect_crossings(g, X)
    assert len(pairs) == 1
    seps = fit_separators(g, X, pairs=pairs, steps=0)
    sep = seps.get(pairs[0])
    m1 = 0.5 * (X[0] + X[1])
    m2 = 0.5 * (X[2] + X[3])
    assert m1 @ sep.w + sep.b > 0          # first edge's side is positive
    assert m2 @ sep.w + sep.b < 0
    assert np.linalg.norm(sep.w) == pytest.approx(1.0)


def test_fitting_reduces_separator_objective():
    g = complete(4)
    pairs = detect_crossings(g, K4_SQUARE)

    def objective(seps):
        total = 0.0
        for pair in pairs:
            sep = seps.get(pair)
            sides = K4_SQUARE[list(pair.nodes)] @ sep.w + sep.b
            t = np.array([1.0, 1.0, -1.0, -1.0])
            total += np.maximum(0.0, 1.0 - t * sides).sum() + sep.w @ sep.w
        return total

    init = fit_separators(g, K4_SQUARE, pairs=pairs, steps=0)
    fitted = fit_separators(g, K4_SQUARE, pairs=pairs)
    assert objective(fitted) <= objective(init) + 1e-12


def test_crossing_loss_positive_then_resolved():
    g = complete(4)
    pairs = detect_crossings(g, K4_SQUARE)
    seps = fit_separators(g, K4_SQUARE, pairs=pairs)
    assert loss_crossings(g, K4_SQUARE, seps, pairs).value > 0.0
    assert criteria.quality_crossing_number(g, K4_SQUARE) == 1.0
    # planar embedding of K4: no crossings
    Y = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 3.0], [2.0, 1.0]])
    assert criteria.quality_crossing_number(g, Y) == 0.0


def test_missing_separator_raises():
    g = complete(4)
    pairs = detect_crossings(g, K4_SQUARE)
    with pytest.raises(MissingSeparator):
        loss_crossings(g, K4_SQUARE, CrossingSeparators({}), pairs)


def test_separator_warm_start_drops_stale_pairs():
    g = complete(4)
    pairs = detect_crossings(g, K4_SQUARE)
    seps = fit_separators(g, K4_SQUARE, pairs=pairs)
    refit = fit_separators(g, K4_SQUARE, prev=seps, pairs=[])
    assert len(refit) == 0


# -- crossing angle ----------------------------------------------------------

def test_crossing_angle_perpendicular_is_zero():
    g = complete(4)
    pairs = detect_crossings(g, K4_SQUARE)
    res = loss_crossing_angle(g, K4_SQUARE, pairs)
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert criteria.quality_crossing_angle(g, K4_SQUARE) == pytest.approx(0.0)


def test_crossing_angle_known_cosine():
    # two segments crossing at 45 degrees: loss = cos^2 = 1/2
    g = make_graph(4, [(0, 1), (2, 3)])
    X = np.array([[-1.0, 0.0], [1.0, 0.0], [-1.0, -1.0], [1.0, 1.0]])
    pairs = detect_crossings(g, X)
    assert len(pairs) == 1
    assert loss_crossing_angle(g, X, pairs).value == pytest.approx(0.5)
    assert criteria.quality_crossing_angle(g, X) == pytest.approx(0.5)


def test_crossing_angle_no_crossings():
    g = path(3)
    X = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    assert loss_crossing_angle(g, X).value == 0.0
    assert criteria.quality_crossing_angle(g, X) == 0.0


# -- aspect ratio ------------------------------------------------------------

def test_aspect_ratio_square_is_minimal():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    hyper = Hyper()
    base = loss_aspect_ratio(square, hyper).value
    # a square's rotated bounding box is square at every angle
    assert base == pytest.approx(hyper.rotation_samples * np.log(2.0))
    stretched = square * np.array([5.0, 1.0])
    assert loss_aspect_ratio(stretched, hyper).value > base
    assert criteria.quality_aspect_ratio(square) == pytest.approx(1.0)
    assert criteria.quality_aspect_ratio(stretched) < 0.5


def test_aspect_ratio_quality_range():
    rng = np.random.default_rng(5)
    for _ in range(20):
        q = criteria.quality_aspect_ratio(rng.random((15, 2)))
        assert 0.0 < q <= 1.0


def test_aspect_ratio_degenerate_raises():
    X = np.zeros((4, 2))
    X[:, 0] = np.arange(4.0)              # exactly collinear, zero height
    with pytest.raises(DegenerateLayout):
        loss_aspect_ratio(X)


# -- angular resolution ------------------------------------------------------

def test_angular_resolution_right_angle():
    g = path(3)
    X = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    res = criteria.loss_angular_resolution(g, X)
    assert res.value == pytest.approx(np.exp(-np.pi / 2.0))
    # max degree 2, ideal angle pi: quality = (pi/2) / pi
    assert criteria.quality_angular_resolution(g, X) == pytest.approx(0.5)


def test_angular_resolution_sensitivity():
    g = path(3)
    X = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    sharp = criteria.loss_angular_resolution(g, X, Hyper(angle_sensitivity=4.0))
    assert sharp.value == pytest.approx(np.exp(-4.0 * np.pi / 2.0))


def test_angular_resolution_no_triples():
    g = path(2)
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert criteria.loss_angular_resolution(g, X).value == 0.0
    assert criteria.quality_angular_resolution(g, X) == 1.0


# -- vertex resolution -------------------------------------------------------

def test_vertex_resolution_spread_pair():
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    # target is dmax/sqrt(2) < 1: the single pair clears it
    assert loss_vertex_resolution(X).value == pytest.approx(0.0)
    assert criteria.quality_vertex_resolution(X) == 1.0


def test_vertex_resolution_hand_value():
    X = np.array([[0.0, 0.0], [4.0, 0.0], [0.1, 0.0]])
    # dmax 4, target 4/sqrt(3) ~ 2.31; only pair (0,2) is closer than that
    tau = 4.0 / np.sqrt(3.0)
    got = loss_vertex_resolution(X)
    assert got.value == pytest.approx((1.0 - 0.1 / tau) ** 2)
    assert criteria.quality_vertex_resolution(X) == pytest.approx(0.1 / tau)


def test_vertex_resolution_degenerate_and_small():
    with pytest.raises(DegenerateLayout):
        loss_vertex_resolution(np.zeros((3, 2)))
    assert loss_vertex_resolution(np.zeros((1, 2))).value == 0.0


def test_vertex_resolution_custom_target():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    res = loss_vertex_resolution(X, Hyper(target_resolution=0.1))
    assert res.value == pytest.approx(0.0)     # all pairs beyond 0.1*sqrt(2)


# -- crossing-free edge neighborhoods (Gabriel condition) ---------------------

def test_gabriel_clean_path():
    g = path(3)
    X = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert loss_gabriel(g, X).value == pytest.approx(0.0)
    assert criteria.quality_gabriel(g, X) == 1.0


def test_gabriel_hand_value():
    g = path(3)
    X = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.1]])
    # node 2 sits 0.1 from the midpoint of edge (0,1), radius 1
    assert loss_gabriel(g, X).value == pytest.approx(0.81)
    assert criteria.quality_gabriel(g, X) == pytest.approx(0.1)


def test_gabriel_no_outside_nodes():
    g = path(2)
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert loss_gabriel(g, X).value == 0.0
    assert criteria.quality_gabriel(g, X) == 1.0


# -- dispatcher ---------------------------------------------------------------

def test_quality_report_covers_all_criteria():
    g = grid(3, 3)
    D = shortest_paths(g)
    X = np.random.default_rng(0).random((g.n, 2))
    rep = quality_report(g, D, X)
    assert list(rep) == list(CriterionId)
    bounded = set(CriterionId) - {CriterionId.ST, CriterionId.CN}
    for cid in bounded:
        assert 0.0 <= rep[cid] <= 1.0, cid
    assert rep[CriterionId.CN] == float(round(rep[CriterionId.CN]))
    for cid in CriterionId:
        assert quality(cid, g, D, X) == rep[cid]
        assert quality(cid.value, g, D, X) == rep[cid]


def test_higher_better_partition():
    assert HIGHER_BETTER == {CriterionId.NP, CriterionId.AR, CriterionId.ANR,
                             CriterionId.VR, CriterionId.GA}
