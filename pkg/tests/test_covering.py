"""Tests for covering bounds, separated sets, staircases and entropy
numbers: closed-form 1-d and disk oracles, bracket-safety invariants,
and property tests for the behavior under scaling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covlab import (Ball, BudgetError, Ellipsoid, Scale, VPolytope,
                    covering_bounds, entropy_numbers, greedy_separated,
                    staircase, staircase_to_csv)


# ---------------------------------------------------------------------------
# greedy separated sets


def test_greedy_separated_interval():
    # [-5, 5] holds at most 5 points with pairwise gaps strictly above 2
    # (m - 1 gaps > 2 forces m <= 5), and the greedy build reaches that.
    K = VPolytope([[5.0]])
    s = greedy_separated(K, Ball(1.0, 1), 2.0, 2000, seed=0)
    assert len(s) == 5
    s.verify()


def test_greedy_separated_is_maximal():
    K = Ball(2.0, 2)
    T = Ball(1.0, 2)
    s = greedy_separated(K, T, 0.8, 3000, seed=1)
    s.verify()
    # Maximality against its own stream: every fresh sample point is
    # within the separation of some chosen point.
    rng = np.random.default_rng(2)
    from covlab.covering import sample_in_body

    X = sample_in_body(K, 500, rng)
    d = np.stack([T.gauge_batch(X - p) for p in s.points]).min(axis=0)
    # Fresh points may fall in small gaps, but nearly all must be close.
    assert np.mean(d <= 0.8 + 1e-9) > 0.95


def test_mandatory_points_kept():
    K = Ball(3.0, 2)
    mand = np.array([[2.9, 0.0], [-2.9, 0.0]])
    s = greedy_separated(K, Ball(1.0, 2), 1.0, 2000, seed=3, mandatory=mand)
    assert any(np.allclose(p, mand[0]) for p in s.points)
    assert any(np.allclose(p, mand[1]) for p in s.points)


def test_budget_validation():
    with pytest.raises(BudgetError):
        greedy_separated(Ball(1.0, 2), Ball(1.0, 2), 0.5, 10)
    with pytest.raises(ValueError):
        greedy_separated(Ball(1.0, 2), Ball(1.0, 2), -1.0, 2000)


# ---------------------------------------------------------------------------
# covering bounds


def test_covering_interval_exact():
    # N([-R, R], [-t, t]) = ceil(R / t) exactly.
    for R, t in [(5.0, 1.0), (7.0, 2.0), (4.0, 2.0), (9.0, 4.5)]:
        est = covering_bounds(VPolytope([[R]]), Ball(1.0, 1), t, 4000, seed=0)
        want = math.ceil(R / t - 1e-12)
        assert est.lower == est.upper == want


def test_covering_single_translate():
    est = covering_bounds(Ball(0.9, 2), Ball(1.0, 2), 1.0, 2000, seed=0)
    assert est.lower == est.upper == 1


def test_covering_bracket_and_certification():
    est = covering_bounds(Ellipsoid([3.0, 1.0]), Ball(1.0, 2), 1.0, 5000, seed=0)
    assert 1 <= est.lower <= est.upper
    assert est.certification.kind == "sample_certified"
    assert est.certification.grid_pitch > 0
    assert len(est.centers) == est.upper
    # The reported centers must cover a fresh sample at the inflated
    # resolution the certification declares.
    eta = est.certification.inflation
    rng = np.random.default_rng(4)
    from covlab.covering import sample_in_body

    X = sample_in_body(Ellipsoid([3.0, 1.0]), 400, rng)
    d = np.stack([np.linalg.norm(X - c, axis=1) for c in est.centers]).min(axis=0)
    assert np.all(d <= est.t * (1.0 + eta) + 1e-9)


def test_covering_seed_determinism():
    a = covering_bounds(Ellipsoid([2.0, 1.0]), Ball(1.0, 2), 0.7, 3000, seed=5)
    b = covering_bounds(Ellipsoid([2.0, 1.0]), Ball(1.0, 2), 0.7, 3000, seed=5)
    assert (a.lower, a.upper) == (b.lower, b.upper)
    np.testing.assert_array_equal(a.centers, b.centers)


@given(c=st.floats(0.3, 3.0))
@settings(max_examples=10, deadline=None)
def test_covering_scale_invariance(c):
    # N(cK, t(cT)) = N(K, tT): scaling both bodies changes nothing.
    K, T, t = Ellipsoid([2.0, 1.0]), Ball(1.0, 2), 0.8
    base = covering_bounds(K, T, t, 2000, seed=6)
    scaled = covering_bounds(Scale(c, K), Scale(c, T), t, 2000, seed=6)
    assert (scaled.lower, scaled.upper) == (base.lower, base.upper)


def test_covering_monotone_in_t():
    ests = [covering_bounds(Ball(3.0, 2), Ball(1.0, 2), t, 3000, seed=7)
            for t in (0.5, 1.0, 2.0)]
    for a, b in zip(ests, ests[1:]):
        assert a.lower >= b.lower
        assert a.upper >= b.upper


# ---------------------------------------------------------------------------
# staircases


def test_staircase_monotone_and_csv(tmp_path):
    grid = [0.4, 0.7, 1.0, 1.5, 2.2]
    st_ = staircase(Ellipsoid([3.0, 1.0]), Ball(1.0, 2), grid, 3000, seed=8)
    lows = [e.lower_bits for e in st_.entries]
    ups = [e.upper_bits for e in st_.entries]
    assert all(a >= b for a, b in zip(lows, lows[1:]))
    assert all(a >= b for a, b in zip(ups, ups[1:]))
    assert all(l <= u + 1e-12 for l, u in zip(lows, ups))
    path = tmp_path / "stair.csv"
    staircase_to_csv(st_, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t,lower_bits,upper_bits,certification,pitch"
    assert len(rows) == 1 + len(grid)


def test_staircase_rejects_bad_grid():
    with pytest.raises(ValueError):
        staircase(Ball(1.0, 2), Ball(1.0, 2), [1.0, 0.5], 2000)
    with pytest.raises(ValueError):
        staircase(Ball(1.0, 2), Ball(1.0, 2), [], 2000)


def test_staircase_lookup():
    st_ = staircase(Ball(2.0, 2), Ball(1.0, 2), [0.5, 1.0], 2000, seed=9)
    assert st_.lower_bits_at(0.5) >= st_.lower_bits_at(1.0)
    with pytest.raises(KeyError):
        st_.lower_bits_at(0.75)


# ---------------------------------------------------------------------------
# entropy numbers


def test_entropy_numbers_interval():
    # K = [-4, 4], T = [-1, 1]: N(K, tT) = ceil(4/t), so e_1 in (2, 4],
    # e_2 = 2 bracket, e_3 <= 4/3.
    K = VPolytope([[4.0]])
    grid = [0.5, 1.0, 4.0 / 3.0, 2.0, 4.0]
    st_ = staircase(K, Ball(1.0, 1), grid, 4000, seed=0)
    ek = entropy_numbers(st_, 3, e1_cap=4.0)
    k1, lo1, hi1 = ek[0]
    assert k1 == 1 and hi1 == 4.0 and lo1 == 2.0
    k2, lo2, hi2 = ek[1]
    assert hi2 == pytest.approx(2.0)
    k3, lo3, hi3 = ek[2]
    assert lo3 <= hi3 <= 4.0 / 3.0 + 1e-9


def test_entropy_numbers_brackets_nested():
    st_ = staircase(Ellipsoid([3.0, 1.0]), Ball(1.0, 2),
                    list(np.geomspace(0.3, 3.0, 8)), 3000, seed=1)
    ek = entropy_numbers(st_, 6)
    for (k, lo, hi), (k2, lo2, hi2) in zip(ek, ek[1:]):
        assert lo <= hi
        assert hi2 <= hi  # entropy numbers decrease in k
