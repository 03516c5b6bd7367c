"""Executable constructive procedures with machine-checkable postconditions.

Two product combiners turn a coarse and a fine separated set into one
large separated set (the primal one by midpoints, the dual one by a
convex combination measured in a mixed gauge), a net-transfer step moves
a net of the euclidean ball into the ball at a controlled loss of
resolution, and a telescoping scheduler books the odd/even collapse
order for an iteration sequence.  Every construction re-verifies its
own output; a certification failure on valid input signals a bug and is
raised, never swallowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import covering
from .covering import SeparatedSet, _SEP_GUARD
from .functionals import IterationSequence
from .geometry import (Ball, Body, DEFAULT_TOL, Minkowski, OracleTolerance,
                       Polar, Scale, VPolytope, polar_polytope)


class CertificationError(RuntimeError):
    """A construction's re-verified postcondition failed."""


@dataclass
class CombinerInput:
    """A coarse a-separated set in K cap A*D and a fine b-separated set in
    K cap B*D, with A > a > 3B > 3b."""

    xset: SeparatedSet
    yset: SeparatedSet
    a: float
    b: float
    A: float
    B: float

    def __post_init__(self):
        if not (self.A > self.a > 3.0 * self.B > 3.0 * self.b > 0.0):
            raise ValueError("combiner hypothesis A > a > 3B > 3b violated")
        if self.xset.separation < self.a - 1e-12:
            raise ValueError("xset separation below the declared a")
        if self.yset.separation < self.b - 1e-12:
            raise ValueError("yset separation below the declared b")


def _pairwise_check(points: np.ndarray, gauge_body: Body, threshold: float,
                    tol: OracleTolerance, exhaustive_cap: int = 10_000,
                    sample_pairs: int = 200_000, seed: int = 0) -> float:
    """Minimum pairwise gauge distance, exhaustive for up to
    exhaustive_cap points and over sampled pairs beyond that."""
    m = len(points)
    if m < 2:
        return math.inf
    best = math.inf
    if m <= exhaustive_cap:
        chunk = max(1, int(2e6 // m))
        for i0 in range(0, m, chunk):
            block = points[i0:i0 + chunk]
            diffs = (block[:, None, :] - points[None, :, :]).reshape(-1, points.shape[1])
            d = gauge_body.gauge_batch(diffs, tol).reshape(len(block), m)
            for r, i in enumerate(range(i0, i0 + len(block))):
                row = d[r, i + 1:]
                if row.size:
                    best = min(best, float(row.min()))
    else:
        rng = np.random.default_rng(seed)
        i = rng.integers(0, m, size=sample_pairs)
        j = rng.integers(0, m, size=sample_pairs)
        keep = i != j
        d = gauge_body.gauge_batch(points[i[keep]] - points[j[keep]], tol)
        best = float(d.min())
    return best


def primal_combine(inp: CombinerInput, eps: float = 0.5,
                   container: Body | None = None,
                   tol: OracleTolerance = DEFAULT_TOL) -> SeparatedSet:
    """All weighted midpoints eps*x_i + (1-eps)*y_j, certified
    (1-eps)*b-separated in the shared ambient gauge (eps = 1/2 gives the
    standard b/2 separation).  The strengthened weighting demands the
    stronger hypothesis a > 3((1-eps)/eps)B."""
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if not (inp.a > 3.0 * ((1.0 - eps) / eps) * inp.B):
        raise ValueError(
            f"strengthened hypothesis a > 3((1-eps)/eps)B fails: "
            f"a={inp.a:g}, B={inp.B:g}, eps={eps:g}"
        )
    X, Y = inp.xset.points, inp.yset.points
    Z = (eps * X)[:, None, :] + ((1.0 - eps) * Y)[None, :, :]
    Z = Z.reshape(-1, X.shape[1])
    target = (1.0 - eps) * inp.b
    cont = inp.xset.container if container is None else container
    if not np.all(cont.contains_batch(Z, tol)):
        raise CertificationError("combined point escaped the container")
    dmin = _pairwise_check(Z, inp.xset.ambient, target, tol)
    if not dmin > target - _SEP_GUARD:
        raise CertificationError(
            f"combined separation {dmin:g} not above target {target:g}"
        )
    return SeparatedSet(points=Z, separation=target, ambient=inp.xset.ambient,
                        container=cont)


def _polar_of(K: Body) -> Body:
    """Polar with a fast explicit form for polytopes."""
    if isinstance(K, VPolytope):
        return polar_polytope(K)
    return Polar(K)


def mixed_gauge_body(K: Body, a: float, b: float, B: float) -> Body:
    """alpha*K° + ((1-alpha)/B)*D with alpha = a/(2a - b); this body sits
    inside (K cap B*D)°, which is what makes the dual combiner work."""
    if not (a > b > 0):
        raise ValueError("need a > b > 0")
    alpha = a / (2.0 * a - b)
    return Minkowski(Scale(alpha, _polar_of(K)),
                     Ball((1.0 - alpha) / B, K.dim))


def dual_combine_inputs(K: Body, a: float, b: float, A: float, B: float,
                        budget: int | None = None, seed: int = 0,
                        tol: OracleTolerance = DEFAULT_TOL) -> CombinerInput:
    """Greedily build the two separated sets the dual combiner consumes:
    an a-separated set of D in the K°-gauge and a b-separated set of D
    in the mixed gauge."""
    D = Ball(1.0, K.dim)
    xset = covering.greedy_separated(D, _polar_of(K), a, budget, seed, tol=tol)
    yset = covering.greedy_separated(D, mixed_gauge_body(K, a, b, B), b,
                                     budget, seed + 1, tol=tol)
    return CombinerInput(xset=xset, yset=yset, a=a, b=b, A=A, B=B)


def dual_combine(inp: CombinerInput, K: Body,
                 tol: OracleTolerance = DEFAULT_TOL) -> SeparatedSet:
    """(b/2a)x_i + (1 - b/2a)y_j for the dual direction: the output lies
    in D and is certified (b/2)-separated in the K°-gauge."""
    a, b, B = inp.a, inp.b, inp.B
    alpha = a / (2.0 * a - b)
    lam = b / (2.0 * a)
    # The hypothesis a > 3B > 2B + b must make the mixed ball small
    # enough; this is the inequality the construction actually uses.
    if not (1.0 / a) / (1.0 - lam) < (1.0 - alpha) / B:
        raise ValueError("derived mixed-gauge condition fails; "
                         "check A > a > 3B > 3b")
    X, Y = inp.xset.points, inp.yset.points
    Z = (lam * X)[:, None, :] + ((1.0 - lam) * Y)[None, :, :]
    Z = Z.reshape(-1, X.shape[1])
    D = Ball(1.0, K.dim)
    if not np.all(D.contains_batch(Z, tol)):
        raise CertificationError("dual combined point escaped D")
    Kpol = _polar_of(K)
    target = b / 2.0
    dmin = _pairwise_check(Z, Kpol, target, tol)
    if not dmin > target - _SEP_GUARD:
        raise CertificationError(
            f"dual combined separation {dmin:g} not above {target:g}"
        )
    return SeparatedSet(points=Z, separation=target, ambient=Kpol, container=D)


def net_transfer_polar(S, K: Body, rho: float, net,
                       check_samples: int = 2000, seed: int = 0,
                       net_slack: float = 0.25,
                       tol: OracleTolerance = DEFAULT_TOL) -> np.ndarray:
    """Move a rho*T°-net of D (T = conv of the separated set S) into D,
    landing a (2rho+2)K°-net of D of the same cardinality.

    Each net point outside D slides toward its euclidean projection
    until it enters D, staying within rho in the T°-gauge; a small
    norm-minimization fallback handles points the segment move cannot
    place.  Pre-conditions (S inside K, K inside conv(S) + D, net
    coverage) are sample-checked, and the output is re-certified as a
    (2rho+2)K°-net on a fresh sample of D.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    net = np.atleast_2d(np.asarray(net, dtype=float))
    if rho <= 0:
        raise ValueError("rho must be positive")
    n = K.dim
    T = VPolytope(S)
    rng = np.random.default_rng(seed)
    D = Ball(1.0, n)

    if not np.all(K.contains_batch(S, tol)):
        raise ValueError("S is not contained in K")
    sampleK = covering.sample_in_body(K, check_samples, rng, tol)
    dT = T.dist_euclid_batch(sampleK)
    if dT is not None and not np.all(dT <= 1.0 + tol.membership_slack):
        raise ValueError("K is not contained in conv(S) + D on the sample")
    sampleD = covering.sample_in_body(D, check_samples, rng, tol)
    # T°-gauge of w is the support function of T.
    cov = np.min(
        np.stack([T.support_batch(sampleD - y) for y in net]), axis=0
    )
    # Sample-certified nets only cover at a pitch-inflated resolution, so
    # the sanity check accepts a declared relative slack.
    if not np.all(cov <= rho * (1.0 + net_slack) + _SEP_GUARD):
        raise ValueError("given net does not rho*T°-cover the sample of D")

    out = np.empty_like(net)
    for i, y in enumerate(net):
        r = float(np.linalg.norm(y))
        if r <= 1.0 + tol.membership_slack:
            out[i] = y
            continue
        d = y / r - y                      # direction toward the projection
        hT = float(T.support(d))
        s = min(1.0, rho / hT) if hT > 0 else 1.0
        z = y + s * d
        if np.linalg.norm(z) <= 1.0 + tol.membership_slack:
            out[i] = z
            continue
        from scipy.optimize import minimize

        res = minimize(
            lambda w: float(np.dot(y + w, y + w)),
            x0=s * d,
            constraints=[{"type": "ineq",
                          "fun": lambda w: rho - float(T.support(w))}],
            method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-12},
        )
        z = y + res.x
        if np.linalg.norm(z) > 1.0 + 1e-6:
            raise CertificationError(
                "net point could not be moved into D within rho in T°-gauge"
            )
        out[i] = z / max(1.0, float(np.linalg.norm(z)))

    # Certify the output: every sampled point of D is within 2rho+2 of
    # some output point in the K°-gauge (= support function of K).
    bound = 2.0 * rho + 2.0
    dK = np.min(
        np.stack([K.support_batch(sampleD - z) for z in out]), axis=0
    )
    if not np.all(dK <= bound * (1.0 + 1e-6) + _SEP_GUARD):
        raise CertificationError(
            "transferred points are not a (2rho+2)K°-net on the sample"
        )
    return out


def diameter_realizing_separated(K: Body, budget: int | None = None,
                                 seed: int = 0, n_dirs: int = 512,
                                 tol: OracleTolerance = DEFAULT_TOL) -> SeparatedSet:
    """1-separated set containing a sample-best diameter pair of K,
    completed greedily; its size is at least the covering lower bound."""
    n = K.dim
    D = Ball(1.0, n)
    est = covering.covering_bounds(K, D, 1.0, budget, seed, tol)
    if est.lower < 2:
        raise ValueError("N(K, D) = 1: no nontrivial separated set to build")
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_dirs, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, np.eye(n)])
    best, best_pt = -np.inf, None
    for u in dirs:
        p = K.support_point(u)
        if p is None:
            continue
        r = float(np.linalg.norm(p))
        if r > best:
            best, best_pt = r, p
    if best_pt is None:
        sample = covering.sample_in_body(K, 4096, rng, tol)
        idx = int(np.argmax(np.linalg.norm(sample, axis=1)))
        best_pt = sample[idx]
        best = float(np.linalg.norm(best_pt))
    if 2.0 * best <= 1.0 + _SEP_GUARD:
        raise ValueError("sample-best diameter pair is not 1-separated")
    mandatory = np.vstack([best_pt, -best_pt])
    sset = covering.greedy_separated(K, D, 1.0, budget, seed,
                                     mandatory=mandatory, tol=tol)
    if len(sset) < est.lower:
        raise CertificationError(
            "separated set smaller than the covering lower bound"
        )
    return sset


@dataclass
class ScheduleReport:
    """Odd/even collapse schedule with per-index hypothesis checks."""

    schedule: list                  # [(group, [(j_lo, j_hi), ...]), ...]
    condition_values: dict          # j -> (sqrt(R_j)/4) / (R_{j-1}/2)
    failing_indices: list
    first_failing: int | None


def telescope_schedule(seq: IterationSequence) -> ScheduleReport:
    """Group the telescoping factors by parity and verify, for every
    index, the combiner hypothesis ratio (sqrt(R_j)/4)/(R_{j-1}/2) >= 3.
    Failures are reported, not raised: they indict the chosen R0."""
    s = seq.s
    odd = list(range(1, s, 2))
    even = list(range(0 if s % 2 == 0 else 1, s + 1, 2))
    schedule = [
        ("odd", [(odd[i], odd[i + 1]) for i in range(len(odd) - 1)]),
        ("even", [(even[i], even[i + 1]) for i in range(len(even) - 1)]),
    ]
    vals, failing = {}, []
    for j in range(1, s + 1):
        ratio = (math.sqrt(seq.values[j]) / 4.0) / (seq.values[j - 1] / 2.0)
        vals[j] = ratio
        if not ratio >= 3.0:
            failing.append(j)
    return ScheduleReport(schedule=schedule, condition_values=vals,
                          failing_indices=failing,
                          first_failing=failing[0] if failing else None)


def combiner_to_json(sset: SeparatedSet) -> dict:
    from .geometry import body_to_json

    return {
        "points": sset.points.tolist(),
        "separation": sset.separation,
        "ambient": body_to_json(sset.ambient),
        "container": body_to_json(sset.container),
    }
