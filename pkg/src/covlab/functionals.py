"""Scalar functionals and iteration sequences.

Mean width (Monte Carlo over the sphere), the gamma parameters built
from mean width and covering bits, the psi majorant, and the two
iteration sequences defined implicitly through psi.  All logarithms are
base 2; the sequences are generated by solving their defining relation
with monotone bisection (performed in log space so terms near the
overflow guard stay accurate), with a natural-exponential closed form
exposed only as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import covering
from .geometry import (Ball, Body, Intersect, Polar, DEFAULT_TOL,
                       OracleTolerance, intersect_with_ball)

OVERFLOW_GUARD = 1e300


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class PaperConstants:
    """Configurable stand-ins for the universal constants; they have no
    canonical numeric values, so the defaults simply make every formula
    concrete and are echoed in all reports."""

    C0: float = 1.0
    C2: float = 1.0
    eps: float = 1.0
    R0: float = 100.0
    c2: float = 1.0

    def __post_init__(self):
        if min(self.C0, self.C2, self.eps, self.c2) <= 0:
            raise ValueError("constants must be positive")
        if self.R0 < 16:
            raise ValueError("R0 must be at least 16")

    def key(self) -> str:
        import hashlib

        s = f"{self.C0}:{self.C2}:{self.eps}:{self.R0}:{self.c2}"
        return hashlib.sha256(s.encode()).hexdigest()[:8]


@dataclass
class MeanWidth:
    estimate: float
    stderr: float
    method: str                    # "exact" | "gauge_ray"
    upper_estimate: float = None   # min-of-supports fallback when non-exact


def _sphere_dirs(n: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((samples, n))
    norms = np.linalg.norm(G, axis=1)
    norms[norms == 0] = 1.0
    return G / norms[:, None]


def _support_point_batch(p: Body, U: np.ndarray):
    """Vectorized supporting points for the common leaf types."""
    from . import geometry as g

    if isinstance(p, g.Ball):
        norms = np.linalg.norm(U, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return p.radius * U / norms
    if isinstance(p, g.Ellipsoid):
        h = p.support_batch(U)
        h[h == 0] = 1.0
        return p.semiaxes**2 * U / h[:, None]
    if isinstance(p, g.VPolytope):
        return p.vertices[np.argmax(U @ p.vertices.T, axis=1)]
    if isinstance(p, g.Scale):
        inner = _support_point_batch(p.of, U)
        return None if inner is None else p.factor * inner
    if isinstance(p, g.Minkowski):
        pts = [_support_point_batch(q, U) for q in p.parts]
        if any(q is None for q in pts):
            return None
        return np.sum(pts, axis=0)
    return None


def _intersection_supports(A: Intersect, U: np.ndarray,
                           tol: OracleTolerance) -> tuple[np.ndarray, np.ndarray]:
    """(attained lower estimates, certified upper bounds) for sup over
    the intersection of <u, y>: the upper bound is the min of the parts'
    supports; the lower estimate evaluates <u, z>/gauge(z) on the
    boundary ray through each part's supporting point."""
    upper = A.support_batch(U)
    best = np.zeros(len(U))
    cands = [U] + [c for c in (_support_point_batch(p, U) for p in A.parts)
                   if c is not None]
    for Z in cands:
        g = A.gauge_batch(Z, tol)
        ok = (g > 0) & np.isfinite(g)
        vals = np.where(ok, np.einsum("ij,ij->i", U, Z) / np.where(ok, g, 1.0), 0.0)
        best = np.maximum(best, vals)
    return best, upper


def mean_width(A: Body, samples: int = 100_000, seed: int = 0,
               tol: OracleTolerance = DEFAULT_TOL) -> MeanWidth:
    """Monte Carlo half mean width: the spherical average of the support
    function over uniform unit directions (normalized Gaussians)."""
    if samples < 100:
        raise ValueError("mean_width needs at least 100 samples")
    U = _sphere_dirs(A.dim, samples, seed)
    if A.support_is_exact:
        vals = A.support_batch(U)
        method, upper_est = "exact", None
    elif isinstance(A, Intersect):
        vals, uppers = _intersection_supports(A, U, tol)
        method, upper_est = "gauge_ray", float(uppers.mean())
    else:
        vals = A.support_batch(U)
        method, upper_est = "upper_bound_fallback", float(vals.mean())
    est = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MeanWidth(estimate=est, stderr=stderr, method=method,
                     upper_estimate=upper_est)


@dataclass
class GammaValue:
    value: float
    mstar: float
    mstar_stderr: float
    k_bits: float
    which: str                     # "gamma" | "gamma_prime"
    flagged_low_k: bool = False    # k < 1: the defining formula is undefined
    mean_width_method: str = "exact"

    def __post_init__(self):
        if self.value < 1.0:
            raise ValueError("gamma values are at least 1 by definition")


def _gamma_common(K: Body, k_bits: float, which: str, samples: int,
                  seed: int, tol: OracleTolerance) -> GammaValue:
    n = K.dim
    KD = intersect_with_ball(K, 1.0)
    mw = mean_width(KD, samples, seed, tol)
    if k_bits < 1.0:
        value = max(1.0, mw.estimate * math.sqrt(n))
        flagged = True
    else:
        value = max(1.0, mw.estimate * math.sqrt(n / k_bits))
        flagged = False
    return GammaValue(value=value, mstar=mw.estimate, mstar_stderr=mw.stderr,
                      k_bits=k_bits, which=which, flagged_low_k=flagged,
                      mean_width_method=mw.method)


def gamma(K: Body, consts: PaperConstants = PaperConstants(),
          budget: int | None = None, seed: int = 0,
          samples: int = 20_000, tol: OracleTolerance = DEFAULT_TOL) -> GammaValue:
    """max(1, M*(K cap D) sqrt(n/k)) with k the lower covering bits of
    N(K, D); the lower bound keeps the estimate conservative for the
    duality probes.  k < 1 is flagged, not silently clamped."""
    est = covering.covering_bounds(K, Ball(1.0, K.dim), 1.0, budget, seed, tol)
    return _gamma_common(K, math.log2(est.lower), "gamma", samples, seed, tol)


def gamma_prime(K: Body, consts: PaperConstants = PaperConstants(),
                budget: int | None = None, seed: int = 0,
                samples: int = 20_000, tol: OracleTolerance = DEFAULT_TOL) -> GammaValue:
    """The dual variant: k comes from the covering bits of N(D, K°)."""
    est = covering.covering_bounds(Ball(1.0, K.dim), Polar(K), 1.0, budget, seed, tol)
    return _gamma_common(K, math.log2(est.lower), "gamma_prime", samples, seed, tol)


def psi(x: float, consts: PaperConstants = PaperConstants()) -> float:
    """2 C2 (C0 log^3 x + 1) + 2 with base-2 logs."""
    if x < 1.0:
        raise ValueError("psi is defined for x >= 1")
    return 2.0 * consts.C2 * (consts.C0 * math.log2(x) ** 3 + 1.0) + 2.0


def _psi_of_logratio(L: float, consts: PaperConstants) -> float:
    return 2.0 * consts.C2 * (consts.C0 * L**3 + 1.0) + 2.0


def _invert_psi_log(target: float, consts: PaperConstants) -> float:
    """Solve psi(2^L) = target for L >= 0 by monotone bisection."""
    if target < _psi_of_logratio(0.0, consts):
        raise SequenceError("psi target below psi(1); R0 too small")
    lo, hi = 0.0, 1.0
    while _psi_of_logratio(hi, consts) < target:
        hi *= 2.0
        if hi > 1e6:
            raise SequenceError("psi inversion out of range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _psi_of_logratio(mid, consts) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass
class IterationSequence:
    values: list
    kind: str                      # "primal" | "dual"
    s: int

    def __post_init__(self):
        if self.kind not in ("primal", "dual"):
            raise ValueError("kind must be primal or dual")
        v = self.values
        if any(v[i + 1] <= v[i] for i in range(len(v) - 1)):
            raise SequenceError("iteration sequence must be strictly increasing")
        if not (0 < self.s < len(v)):
            raise SequenceError("stopping index out of range")

    @classmethod
    def from_values(cls, values, kind="primal"):
        values = [float(v) for v in values]
        s = len(values) - 1
        if s % 2 == 1:
            s -= 1
        return cls(values=values, kind=kind, s=max(s, 2) if len(values) > 2 else s)


def _generate(consts: PaperConstants, diameter: float, kind: str) -> IterationSequence:
    values = [float(consts.R0)]
    while True:
        R = values[-1]
        target = math.sqrt(R) / 2.0
        L = _invert_psi_log(target, consts)      # raises when R0 is too small
        if kind == "primal":
            log_next = 0.5 * math.log2(R) + L
        else:
            log_next = math.log2(R) + L
        if log_next >= math.log2(OVERFLOW_GUARD):
            raise SequenceError("overflow guard tripped before the stopping index")
        nxt = 2.0**log_next
        if nxt <= R:
            raise SequenceError(
                f"sequence not increasing at R={R:g}; R0 too small for these constants"
            )
        values.append(nxt)
        j = len(values) - 1
        if j >= 2 and j % 2 == 0 and values[j] > diameter:
            return IterationSequence(values=values, kind=kind, s=j)
        if j > 200:
            raise SequenceError("stopping index not reached within 200 terms")


def primal_sequence(consts: PaperConstants, diameter: float) -> IterationSequence:
    """R_{j+1} solving sqrt(R_j)/2 = psi(R_{j+1}/sqrt(R_j)), stopped at
    the smallest positive even s with R_s above the diameter."""
    return _generate(consts, diameter, "primal")


def dual_sequence(consts: PaperConstants, diameter: float) -> IterationSequence:
    """R'_{j+1} solving psi(R'_{j+1}/R'_j) = sqrt(R'_j)/2."""
    return _generate(consts, diameter, "dual")


def closed_form_next(R: float, kind: str, consts: PaperConstants) -> float:
    """Natural-exponential closed form of the recurrence; kept as a
    cross-check only, since it matches natural logs inside psi rather
    than the base-2 convention used everywhere else here."""
    inner = (math.sqrt(R) - 4.0 - 4.0 * consts.C2) / (4.0 * consts.C2 * consts.C0)
    if inner <= 0:
        raise SequenceError("closed form undefined: R too small")
    factor = math.exp(inner ** (1.0 / 3.0))
    return math.sqrt(R) * factor if kind == "primal" else R * factor


def relation_residual(seq: IterationSequence, consts: PaperConstants) -> float:
    """Max relative error of the defining psi-relation over the sequence."""
    worst = 0.0
    for j in range(len(seq.values) - 1):
        R, nxt = seq.values[j], seq.values[j + 1]
        ratio = nxt / math.sqrt(R) if seq.kind == "primal" else nxt / R
        lhs = psi(ratio, consts)
        rhs = math.sqrt(R) / 2.0
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst
