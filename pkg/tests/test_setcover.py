"""Tests for the exact lattice set-cover solver."""

import math

import numpy as np
import pytest

from covlab import Ball, VPolytope, exact_cover_small, symmetric_lattice
from covlab.setcover import greedy_cover


def test_symmetric_lattice_interval():
    pts = symmetric_lattice(VPolytope([[2.0]]), 0.5)
    np.testing.assert_allclose(pts[:, 0], np.arange(-2.0, 2.5, 0.5))


def test_symmetric_lattice_disk_count():
    pts = symmetric_lattice(Ball(1.0, 2), 0.5)
    # Points of 0.5Z^2 with norm <= 1: 13.
    assert len(pts) == 13
    assert np.all(np.linalg.norm(pts, axis=1) <= 1.0 + 1e-9)


def test_greedy_cover_simple():
    cover = np.array([[True, True, False],
                      [False, True, True],
                      [True, True, True]])
    assert greedy_cover(cover) == [2]
    with pytest.raises(ValueError):
        greedy_cover(np.zeros((2, 2), dtype=bool))


def test_exact_cover_interval():
    # N([-2, 2], [-1, 1]) = 2 on any symmetric lattice fine enough.
    est = exact_cover_small(VPolytope([[2.0]]), Ball(1.0, 1), 1.0, pitch=0.25)
    assert est.lower == est.upper == 2
    assert est.certification.kind == "exact"


def test_exact_cover_single():
    est = exact_cover_small(Ball(0.8, 2), Ball(1.0, 2), 1.0, pitch=0.2)
    assert est.lower == est.upper == 1


def test_exact_cover_matches_greedy_bound():
    est = exact_cover_small(Ball(1.5, 2), Ball(1.0, 2), 1.0, pitch=0.25)
    assert est.certification.kind == "exact"
    # Exact count can never exceed a greedy solution, and the disk of
    # radius 1.5 needs more than one unit disk but at most 7.
    assert 2 <= est.lower == est.upper <= 7
    # Chosen centers must cover the whole lattice.
    lat = symmetric_lattice(Ball(1.5, 2), 0.25)
    d = np.stack([np.linalg.norm(lat - c, axis=1) for c in est.centers]).min(axis=0)
    assert np.all(d <= 1.0 + 1e-9)


def test_exact_cover_explicit_candidates():
    cands = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
    est = exact_cover_small(Ball(1.2, 2), Ball(1.0, 2), 1.0,
                            candidates=cands, samples=cands)
    assert est.lower == est.upper >= 1
    with pytest.raises(ValueError):
        exact_cover_small(Ball(1.0, 2), Ball(1.0, 2), 1.0,
                          candidates=np.array([[5.0, 0.0]]))


def test_exact_cover_input_validation():
    with pytest.raises(ValueError):
        exact_cover_small(Ball(1.0, 2), Ball(1.0, 2), -1.0)
    with pytest.raises(ValueError):
        symmetric_lattice(Ball(1.0, 2), 0.0)
