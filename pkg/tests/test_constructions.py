"""Tests for the combiners, net transfer, diameter-realizing separated
sets and the telescoping scheduler, including postcondition
re-verification and hypothesis-driven randomized instances."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covlab import (Ball, CertificationError, CombinerInput, Ellipsoid,
                    IterationSequence, PaperConstants, VPolytope,
                    covering_bounds, diameter_realizing_separated,
                    dual_combine, dual_combine_inputs, greedy_separated,
                    intersect_with_ball, mixed_gauge_body, net_transfer_polar,
                    primal_combine, primal_sequence, telescope_schedule)
from covlab.constructions import combiner_to_json
from covlab.geometry import Polar


def _primal_input(dim, a, b, A, B, seed, budget=800):
    K = Ball(A, dim)
    D = Ball(1.0, dim)
    xset = greedy_separated(intersect_with_ball(K, A), D, a, budget, seed)
    yset = greedy_separated(intersect_with_ball(K, B), D, b, budget, seed + 1)
    return CombinerInput(xset=xset, yset=yset, a=a, b=b, A=A, B=B)


# ---------------------------------------------------------------------------
# primal combiner


def test_primal_combine_product_size():
    inp = _primal_input(2, a=4.0, b=1.0, A=5.0, B=1.2, seed=0)
    out = primal_combine(inp)
    assert len(out) == len(inp.xset) * len(inp.yset)
    assert out.separation == pytest.approx(0.5)
    out.verify()


def test_primal_combine_weighted():
    inp = _primal_input(2, a=4.0, b=1.0, A=5.0, B=1.2, seed=1)
    out = primal_combine(inp, eps=0.6)
    assert out.separation == pytest.approx(0.4)
    with pytest.raises(ValueError):
        # eps small makes the strengthened hypothesis fail.
        primal_combine(inp, eps=0.2)
    with pytest.raises(ValueError):
        primal_combine(inp, eps=1.5)


def test_combiner_input_validation():
    with pytest.raises(ValueError):
        _primal_input(2, a=3.0, b=1.0, A=5.0, B=1.2, seed=2)  # a <= 3B
    # Declared separation above what the sets deliver must be rejected.
    K = Ball(5.0, 2)
    D = Ball(1.0, 2)
    xset = greedy_separated(K, D, 4.0, 800, seed=3)
    yset = greedy_separated(Ball(1.2, 2), D, 1.0, 800, seed=4)
    with pytest.raises(ValueError):
        CombinerInput(xset=xset, yset=yset, a=4.5, b=1.0, A=5.0, B=1.2)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_primal_combine_random_instances(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 3))
    b = 1.0
    B = float(rng.uniform(1.05, 1.4))
    a = 3.0 * B + float(rng.uniform(0.1, 1.0))
    A = a + float(rng.uniform(0.5, 2.0))
    inp = _primal_input(dim, a, b, A, B, seed=seed, budget=400)
    out = primal_combine(inp)
    assert len(out) == len(inp.xset) * len(inp.yset)
    out.verify()


# ---------------------------------------------------------------------------
# dual combiner


def test_mixed_gauge_body_inside_polar_of_intersection(square):
    # Boundary points of the mixed body must pair to at most 1 with
    # every point of K cap B*D; that is exactly the claimed inclusion
    # in (K cap B*D)°, checked on samples of both bodies.
    from covlab.covering import sample_in_body

    a, b, B = 4.0, 1.0, 1.2
    M = mixed_gauge_body(square, a, b, B)
    KB = intersect_with_ball(square, B)
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((40, 2))
    X = Z / M.gauge_batch(Z)[:, None]          # boundary of M
    Y = sample_in_body(KB, 300, rng)
    assert np.max(X @ Y.T) <= 1.0 + 1e-6


def test_dual_combine_square(square):
    inp = dual_combine_inputs(square, a=4.0, b=1.0, A=5.0, B=1.2,
                              budget=1500, seed=0)
    out = dual_combine(inp, square)
    assert len(out) == len(inp.xset) * len(inp.yset)
    assert out.separation == pytest.approx(0.5)
    # All points stay in the euclidean unit ball.
    assert np.all(np.linalg.norm(out.points, axis=1) <= 1.0 + 1e-9)
    out.verify()


def test_dual_combine_json_round(square):
    inp = dual_combine_inputs(square, a=4.0, b=1.0, A=5.0, B=1.2,
                              budget=800, seed=1)
    out = dual_combine(inp, square)
    doc = combiner_to_json(out)
    assert len(doc["points"]) == len(out)
    assert doc["separation"] == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# net transfer


def test_net_transfer_square():
    K = VPolytope([[1.5, 1.5], [1.5, -1.5]])
    net_est = covering_bounds(Ball(1.0, 2), Polar(VPolytope(K.vertices)),
                              1.0, budget=3000, seed=2)
    moved = net_transfer_polar(K.vertices, K, 1.0, net_est.centers, seed=3)
    assert len(moved) == len(net_est.centers)
    assert np.all(np.linalg.norm(moved, axis=1) <= 1.0 + 1e-6)


def test_net_transfer_interval():
    K = VPolytope([[2.0]])
    net_est = covering_bounds(Ball(1.0, 1), Polar(K), 1.0, budget=1000, seed=2)
    moved = net_transfer_polar(K.vertices, K, 1.0, net_est.centers, seed=3)
    assert np.all(np.abs(moved) <= 1.0 + 1e-6)


def test_net_transfer_rejects_bad_inputs():
    K = VPolytope([[1.5, 1.5], [1.5, -1.5]])
    with pytest.raises(ValueError):
        net_transfer_polar(K.vertices, K, -1.0, np.zeros((1, 2)))
    with pytest.raises(ValueError):
        # S escaping K.
        net_transfer_polar(np.array([[9.0, 0.0]]), K, 1.0, np.zeros((1, 2)))
    with pytest.raises(ValueError):
        # A net that obviously fails to cover D.
        net_transfer_polar(K.vertices, K, 0.05, np.array([[20.0, 20.0]]))


# ---------------------------------------------------------------------------
# diameter-realizing separated sets


def test_diameter_realizing_interval():
    s = diameter_realizing_separated(VPolytope([[5.0]]), budget=2000, seed=1)
    pts = s.points[:, 0]
    assert np.any(np.isclose(pts, 5.0, atol=1e-9))
    assert np.any(np.isclose(pts, -5.0, atol=1e-9))
    est = covering_bounds(VPolytope([[5.0]]), Ball(1.0, 1), 1.0, 2000, seed=1)
    assert len(s) >= est.lower


def test_diameter_realizing_ellipse():
    s = diameter_realizing_separated(Ellipsoid([3.0, 1.0]), budget=3000, seed=1)
    r = np.linalg.norm(s.points, axis=1)
    assert r.max() == pytest.approx(3.0, abs=1e-6)
    s.verify()


def test_diameter_realizing_trivial_rejected():
    with pytest.raises(ValueError):
        diameter_realizing_separated(Ball(0.4, 2), budget=1000, seed=0)


# ---------------------------------------------------------------------------
# telescoping scheduler


def test_telescope_schedule_passes_at_good_constants():
    cs = PaperConstants(C0=0.07, C2=0.07, R0=1e6)
    rep = telescope_schedule(primal_sequence(cs, 1e4))
    assert rep.failing_indices == []
    assert rep.first_failing is None
    groups = dict(rep.schedule)
    assert set(groups) == {"odd", "even"}


def test_telescope_schedule_reports_failures():
    seq = IterationSequence.from_values([16.0, 20.0, 30.0])
    rep = telescope_schedule(seq)
    # (sqrt(20)/4)/(16/2) and (sqrt(30)/4)/(20/2) are far below 3.
    assert rep.failing_indices == [1, 2]
    assert rep.first_failing == 1
    assert rep.condition_values[1] == pytest.approx(
        (math.sqrt(20.0) / 4.0) / 8.0)
