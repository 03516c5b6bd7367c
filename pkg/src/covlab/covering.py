"""Covering-number bounds, staircases and entropy numbers.

Lower bounds come from greedy separated sets (points pairwise farther
than 2t in the gauge of T cannot share a translate of tT); upper bounds
from maximal t-separated nets over the same candidate stream, refined by
a greedy set cover of the stream when the stream is small enough to make
that affordable.  Upper bounds are sample-certified, never claimed exact
in continuous space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Body, OracleTolerance, DEFAULT_TOL, _mat

_SEP_GUARD = 1e-12


class BudgetError(ValueError):
    pass


def default_budget(dim: int) -> int:
    return 200_000 if dim <= 3 else 1_000_000


def sample_in_body(K: Body, count: int, rng: np.random.Generator,
                   tol: OracleTolerance = DEFAULT_TOL,
                   max_draw_factor: int = 200) -> np.ndarray:
    """Uniform rejection samples from K (box proposal on the circumradius)."""
    R = K.circumradius_bound()
    n = K.dim
    out = []
    got = 0
    draws = 0
    while got < count and draws < max_draw_factor * count:
        chunk = max(count, 1024)
        X = R * rng.uniform(-1.0, 1.0, size=(chunk, n))
        draws += chunk
        X = X[K.contains_batch(X, tol)]
        if len(X):
            out.append(X)
            got += len(X)
    if not out:
        return np.zeros((0, n))
    return np.concatenate(out)[:count]


def _lattice(K: Body, pitch: float, cap: int,
             tol: OracleTolerance) -> tuple[np.ndarray, float]:
    """Deterministic lattice candidates inside K; the pitch is coarsened
    if needed so the full grid stays under cap points."""
    R = K.circumradius_bound()
    n = K.dim
    pitch = float(pitch)
    while True:
        half = int(math.floor(R / pitch))
        total = (2 * half + 1) ** n
        if total <= cap or total <= 1:
            break
        pitch *= (total / cap) ** (1.0 / n) * 1.0000001
    axis = pitch * np.arange(-half, half + 1, dtype=float)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    pts = pts[K.contains_batch(pts, tol)]
    if len(pts) == 0:
        pts = np.zeros((1, n))
    return pts, pitch


def _default_pitch(eps: float, T: Body, dim: int) -> float:
    # Finer lattices in dimension 1 so that the per-step pitch waste does
    # not cost a separated point on long intervals.
    base = eps * T.inradius_bound()
    return base / 32.0 if dim == 1 else base / 8.0


@dataclass
class SeparatedSet:
    """A finite set with certified pairwise separation in a body's gauge."""

    points: np.ndarray
    separation: float
    ambient: Body          # the gauge body T
    container: Body        # the set K holding the points
    pitch: float = 0.0
    stream_size: int = 0

    def __len__(self):
        return len(self.points)

    def verify(self, tol: OracleTolerance = DEFAULT_TOL,
               max_pairs: int = 100_000, rng: np.random.Generator | None = None):
        """Re-check containment and pairwise separation; raises on failure."""
        pts = self.points
        if not np.all(self.container.contains_batch(pts, tol)):
            raise AssertionError("separated-set point outside its container")
        m = len(pts)
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        if len(pairs) > max_pairs:
            rng = rng or np.random.default_rng(0)
            idx = rng.choice(len(pairs), size=max_pairs, replace=False)
            pairs = [pairs[k] for k in idx]
        if pairs:
            diffs = np.array([pts[i] - pts[j] for i, j in pairs])
            d = self.ambient.gauge_batch(diffs, tol)
            if not np.all(d > self.separation):
                raise AssertionError("pairwise separation violated")


def _greedy_insert(cands: np.ndarray, T: Body, eps: float,
                   tol: OracleTolerance, mandatory: np.ndarray) -> np.ndarray:
    chosen = [m for m in mandatory]
    thresh = eps + _SEP_GUARD
    # Only the threshold question matters for greedy insertion, and only
    # for candidates not yet within threshold of a pick, so viability is
    # tracked as a boolean and refreshed just where it still holds.
    viable = np.ones(len(cands), dtype=bool)
    for x in chosen:
        sel = np.where(viable)[0]
        viable[sel] = T.gauge_exceeds(cands[sel] - x, thresh, tol)
    start = 0
    while start < len(cands):
        mask = viable[start:]
        if not mask.any():
            break
        i = start + int(np.argmax(mask))
        x = cands[i]
        chosen.append(x)
        sel = i + np.where(viable[i:])[0]
        viable[sel] = T.gauge_exceeds(cands[sel] - x, thresh, tol)
        start = i + 1
    return np.array(chosen) if chosen else np.zeros((0, cands.shape[1]))


def greedy_separated(K: Body, T: Body, eps: float,
                     sample_budget: int | None = None, seed: int = 0,
                     mandatory=None, pitch: float | None = None,
                     tol: OracleTolerance = DEFAULT_TOL) -> SeparatedSet:
    """Greedy eps-separated set in K (gauge of T), maximal against a
    candidate stream of lattice points followed by seeded uniform samples.

    Candidates are taken in stream order; ties in the classic
    farthest-point formulation are thus broken by smallest candidate
    index, which makes the construction reproducible.  Mandatory points
    are inserted first, unconditionally.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if T.dim != K.dim:
        raise ValueError("K and T must share a dimension")
    n = K.dim
    budget = default_budget(n) if sample_budget is None else int(sample_budget)
    if budget < 32:
        raise BudgetError("sample budget too small to be meaningful")
    pitch = _default_pitch(eps, T, n) if pitch is None else float(pitch)
    lattice, pitch = _lattice(K, pitch, cap=budget, tol=tol)
    rng = np.random.default_rng(seed)
    n_random = max(0, budget - len(lattice))
    rand = sample_in_body(K, n_random, rng, tol) if n_random else np.zeros((0, n))
    stream = np.concatenate([lattice, rand]) if len(rand) else lattice
    mand = np.zeros((0, n)) if mandatory is None else _mat(np.asarray(mandatory, float), n)
    pts = _greedy_insert(stream, T, eps, tol, mand)
    return SeparatedSet(points=pts, separation=eps, ambient=T, container=K,
                        pitch=pitch, stream_size=len(stream))


@dataclass(frozen=True)
class Certification:
    kind: str                      # "exact" | "sample_certified"
    grid_pitch: float = 0.0
    inflation: float = 0.0         # eta: centers cover K at t*(1+eta)

    def __post_init__(self):
        if self.kind not in ("exact", "sample_certified"):
            raise ValueError(f"unknown certification kind {self.kind!r}")


@dataclass
class CoverEstimate:
    lower: int
    upper: int
    centers: np.ndarray
    certification: Certification
    t: float
    flagged: bool = False          # set when a node/iteration budget ran out

    def __post_init__(self):
        if not (1 <= self.lower <= self.upper):
            raise ValueError("cover estimate must satisfy 1 <= lower <= upper")
        if self.certification.kind == "exact" and self.lower != self.upper:
            raise ValueError("exact certification requires lower == upper")


def _greedy_cover_count(stream: np.ndarray, T: Body, t: float,
                        tol: OracleTolerance):
    """Greedy set cover of the candidate stream by translates c + tT with
    centers drawn from the stream itself.  Ties go to the smallest index."""
    C = len(stream)
    thresh = t + _SEP_GUARD
    covered_by = []
    chunk = max(1, int(4e6 // max(C, 1)))
    cover = np.zeros((C, C), dtype=bool)
    for j0 in range(0, C, chunk):
        block = stream[j0:j0 + chunk]
        diffs = stream[None, :, :] - block[:, None, :]
        far = T.gauge_exceeds(diffs.reshape(-1, stream.shape[1]), thresh, tol)
        cover[j0:j0 + chunk] = ~far.reshape(len(block), C)
    uncovered = np.ones(C, dtype=bool)
    picks = []
    while uncovered.any():
        counts = (cover & uncovered[None, :]).sum(axis=1)
        j = int(np.argmax(counts))
        if counts[j] == 0:
            break  # stream point not even self-covered; numerically impossible
        picks.append(j)
        uncovered &= ~cover[j]
    return len(picks), stream[picks]


def covering_bounds(K: Body, T: Body, t: float,
                    budget: int | None = None, seed: int = 0,
                    tol: OracleTolerance = DEFAULT_TOL,
                    cover_refine_cap: int = 4000) -> CoverEstimate:
    """Two-sided bounds on N(K, tT).

    lower: size of a greedy 2t-separated set (two points at gauge
    distance > 2t never share a translate of tT).  upper: size of a
    maximal t-separated set of the stream (its points form a t-net of
    the stream), improved by a greedy set cover of the stream when the
    stream is small; certification records the stream pitch and the
    inflated resolution at which the centers provably cover all of K.
    """
    if t <= 0:
        raise ValueError("resolution t must be positive")
    budget = default_budget(K.dim) if budget is None else int(budget)
    lo_set = greedy_separated(K, T, 2.0 * t, budget, seed, tol=tol)
    up_set = greedy_separated(K, T, t, budget, seed, tol=tol)
    lower = max(1, len(lo_set))
    upper = len(up_set)
    centers = up_set.points
    # Refine the upper bound by a greedy set cover of the deterministic
    # lattice when that is affordable; the pitch-based certification only
    # ever speaks about the lattice, so random candidates are not needed
    # here and would only blur the greedy tie-breaking.
    lattice, _ = _lattice(K, up_set.pitch, cap=budget, tol=tol)
    if len(lattice) <= cover_refine_cap:
        cnt, picks = _greedy_cover_count(lattice, T, t, tol)
        if lower <= cnt < upper:
            upper, centers = cnt, picks
    upper = max(upper, lower)
    if len(centers) == 0:
        centers = np.zeros((1, K.dim))
    inr_t = T.inradius_bound()
    eta = up_set.pitch * math.sqrt(K.dim) / (t * inr_t) if inr_t > 0 else np.inf
    cert = Certification("sample_certified", grid_pitch=up_set.pitch, inflation=eta)
    return CoverEstimate(lower=lower, upper=upper, centers=centers,
                         certification=cert, t=t)


# ---------------------------------------------------------------------------
# staircases


@dataclass
class StaircaseEntry:
    t: float
    lower_bits: float
    upper_bits: float
    certification: Certification


@dataclass
class Staircase:
    """Monotone map t -> (lower_bits, upper_bits) of log2 N(K, tT)."""

    grid: list
    entries: list
    repairs: int = 0               # grid points touched by monotonicity repair

    def lower_bits_at(self, t: float) -> float:
        return self._entry(t).lower_bits

    def upper_bits_at(self, t: float) -> float:
        return self._entry(t).upper_bits

    def _entry(self, t: float) -> StaircaseEntry:
        for e in self.entries:
            if abs(e.t - t) <= 1e-12 * max(1.0, abs(t)):
                return e
        raise KeyError(f"t={t} not on the staircase grid")

    def to_rows(self):
        return [(e.t, e.lower_bits, e.upper_bits, e.certification.kind,
                 e.certification.grid_pitch) for e in self.entries]


def staircase(K: Body, T: Body, grid, budget: int | None = None,
              seed: int = 0, tol: OracleTolerance = DEFAULT_TOL) -> Staircase:
    """covering_bounds at each grid t with explicit monotonicity repair:
    greedy noise can break monotonicity by a point, so lower_bits is
    replaced by its running max from the right and upper_bits by its
    running min from the left."""
    grid = [float(t) for t in grid]
    if not grid or any(t <= 0 for t in grid) or sorted(grid) != grid:
        raise ValueError("grid must be ascending and positive")
    ests = [covering_bounds(K, T, t, budget, seed, tol) for t in grid]
    lo = np.array([math.log2(e.lower) for e in ests])
    up = np.array([math.log2(e.upper) for e in ests])
    lo_fix = np.maximum.accumulate(lo[::-1])[::-1]
    up_fix = np.minimum.accumulate(up)
    repairs = int(np.sum(lo_fix != lo) + np.sum(up_fix != up))
    entries = [StaircaseEntry(t, float(l), float(u), e.certification)
               for t, l, u, e in zip(grid, lo_fix, up_fix, ests)]
    return Staircase(grid=grid, entries=entries, repairs=repairs)


def staircase_to_csv(st: Staircase, path):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "lower_bits", "upper_bits", "certification", "pitch"])
        for row in st.to_rows():
            w.writerow(row)


def entropy_numbers(st: Staircase, k_max: int,
                    e1_cap: float = np.inf) -> list:
    """Brackets for the entropy numbers e_k = inf{eps : N <= 2^(k-1)},
    obtained by inverting the staircase's bit curves.  e1_cap carries
    circumradius information (one translate surely suffices beyond it)."""
    if not st.entries:
        raise ValueError("empty staircase")
    out = []
    for k in range(1, k_max + 1):
        level = k - 1
        uppers = [e.t for e in st.entries if e.upper_bits <= level + 1e-12]
        lowers = [e.t for e in st.entries if e.lower_bits > level + 1e-12]
        hi = min(uppers) if uppers else np.inf
        if k == 1:
            hi = min(hi, e1_cap)
        lo = max(lowers) if lowers else 0.0
        out.append((k, lo, hi))
    return out
