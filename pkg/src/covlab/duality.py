"""Experiment orchestration: paired staircases, duality-ratio reports,
numeric inequality shadows for the first-step and iteration lemmas, and
conjecture probes over random body families.

Every inequality check here is bracket-safe: the side that must be
smaller is evaluated at its certified lower bound and the side that must
be larger at its certified upper bound, so "violated" cannot be caused
by estimation error on exactly-certified instances; a violation indicts
the configured constants, never the estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import covering, functionals
from .covering import Staircase, staircase
from .functionals import PaperConstants, gamma, gamma_prime, mean_width
from .geometry import (Ball, Body, DegenerateBody, DEFAULT_TOL, Ellipsoid,
                       Minkowski, OracleTolerance, Polar, Scale, VPolytope,
                       body_to_json, intersect_with_ball)

_BITS_TOL = 1e-9


def _polar_of(K: Body) -> Body:
    from .constructions import _polar_of as p

    return p(K)


# ---------------------------------------------------------------------------
# duality reports


@dataclass
class DualityReport:
    body_spec: dict
    grid: list
    alpha_grid: list
    primal: Staircase              # K vs tD
    dual: Staircase                # D vs tK° on the alpha-extended grid
    ratio_table: list              # per (t, alpha) directed ratios
    beta_per_alpha: dict           # alpha -> minimal empirical beta
    constants: PaperConstants
    seed: int = 0
    budget: int | None = None

    def to_json(self) -> dict:
        return {
            "body": self.body_spec,
            "grid": list(self.grid),
            "alpha_grid": list(self.alpha_grid),
            "primal": [list(r) for r in self.primal.to_rows()],
            "dual": [list(r) for r in self.dual.to_rows()],
            "ratio_table": self.ratio_table,
            "beta_per_alpha": {str(a): b for a, b in self.beta_per_alpha.items()},
            "constants": vars(self.constants) if not hasattr(self.constants, "__dataclass_fields__")
            else {f: getattr(self.constants, f) for f in ("C0", "C2", "eps", "R0", "c2")},
            "seed": self.seed,
            "budget": self.budget,
        }


def duality_report(K: Body, grid, alpha_grid=(1.0, 2.0, 4.0, 8.0),
                   consts: PaperConstants = PaperConstants(),
                   budget: int | None = None, seed: int = 0,
                   tol: OracleTolerance = DEFAULT_TOL) -> DualityReport:
    """Paired staircases of (K, tD) and (D, tK°) with, per (t, alpha),
    the two directed bit ratios, and per alpha the minimal empirical
    beta making both directions of the two-sided comparison hold across
    the grid (bracket-safe: upper bits of the bounded side over lower
    bits of the bounding side, clamped at 1)."""
    grid = [float(t) for t in grid]
    alpha_grid = [float(a) for a in alpha_grid]
    if not grid or not alpha_grid:
        raise ValueError("grids must be nonempty")
    D = Ball(1.0, K.dim)
    Kpol = _polar_of(K)
    dual_ts = sorted({round(v, 15) for t in grid for a in alpha_grid
                      for v in (t / a, t, t * a)})
    primal = staircase(K, D, grid, budget, seed, tol)
    dual = staircase(D, Kpol, dual_ts, budget, seed, tol)

    table = []
    beta_per_alpha = {}
    for a in alpha_grid:
        worst = 1.0
        for t in grid:
            up_p = primal.upper_bits_at(t)
            lo_p = primal.lower_bits_at(t)
            up_d = dual.upper_bits_at(round(t / a, 15))
            lo_d = dual.lower_bits_at(round(t * a, 15))
            # N(K,tD) <= N(D, a t K°)^beta  and  N(D, t/a K°) <= N(K,tD)^beta
            b1 = up_p / max(1.0, lo_d)
            b2 = up_d / max(1.0, lo_p)
            table.append({"t": t, "alpha": a, "beta_primal_vs_dual": b1,
                          "beta_dual_vs_primal": b2})
            worst = max(worst, b1, b2)
        beta_per_alpha[a] = worst
    return DualityReport(body_spec=body_to_json(K), grid=grid,
                         alpha_grid=alpha_grid, primal=primal, dual=dual,
                         ratio_table=table, beta_per_alpha=beta_per_alpha,
                         constants=consts, seed=seed, budget=budget)


def brackets_intersect(primal: Staircase, dual: Staircase, t: float,
                       tol_bits: float = _BITS_TOL) -> bool:
    """Do the two staircases' [lower, upper] bit brackets overlap at t?"""
    return (primal.lower_bits_at(t) <= dual.upper_bits_at(t) + tol_bits
            and dual.lower_bits_at(t) <= primal.upper_bits_at(t) + tol_bits)


def beta_summary(reports, alpha: float) -> dict:
    """Max and median of the empirical beta at one alpha over a batch of
    reports (both summaries are emitted; neither is canonical)."""
    vals = [r.beta_per_alpha[alpha] for r in reports]
    return {"max": float(np.max(vals)), "median": float(np.median(vals)),
            "count": len(vals)}


# ---------------------------------------------------------------------------
# first-step inequality shadows


def _bits(est_side: int) -> float:
    return math.log2(max(1, est_side))


def check_first_step(K: Body, consts: PaperConstants = PaperConstants(),
                     budget: int | None = None, seed: int = 0,
                     tol: OracleTolerance = DEFAULT_TOL) -> dict:
    """Numeric shadows of the first-step inequalities at the configured
    constants: N(K,D) <= N(D,(c2/g)K°)^3, N(D, C2*g*K°) <= N(K,D)^(1+eps)
    and the dual-parameter variant N(K, C2*g'*D) <= N(D,K°)^(1+eps)."""
    n = K.dim
    D = Ball(1.0, n)
    Kpol = _polar_of(K)
    g = gamma(K, consts, budget, seed, tol=tol)
    record = {"gamma": vars(g), "checks": [], "skipped": False}
    if g.flagged_low_k:
        record["skipped"] = True
        record["reason"] = "k < 1: gamma undefined for this body"
        return record

    kd = covering.covering_bounds(K, D, 1.0, budget, seed, tol)

    def add(name, lhs_bits, rhs_bits):
        record["checks"].append({
            "name": name, "lhs_lower_bits": lhs_bits,
            "rhs_upper_bits": rhs_bits, "margin": rhs_bits - lhs_bits,
            "consistent": lhs_bits <= rhs_bits + _BITS_TOL,
        })

    rhs4 = covering.covering_bounds(
        D, Scale(consts.c2 / g.value, Kpol), 1.0, budget, seed, tol)
    add("N(K,D) <= N(D,(c2/gamma)K°)^3", _bits(kd.lower), 3.0 * _bits(rhs4.upper))

    lhs5 = covering.covering_bounds(
        D, Scale(consts.C2 * g.value, Kpol), 1.0, budget, seed, tol)
    add("N(D,C2*gamma*K°) <= N(K,D)^(1+eps)",
        _bits(lhs5.lower), (1.0 + consts.eps) * _bits(kd.upper))

    gp = gamma_prime(K, consts, budget, seed, tol=tol)
    record["gamma_prime"] = vars(gp)
    if not gp.flagged_low_k:
        lhs13 = covering.covering_bounds(
            K, D, consts.C2 * gp.value, budget, seed, tol)
        rhs13 = covering.covering_bounds(D, Kpol, 1.0, budget, seed, tol)
        add("N(K,C2*gamma'*D) <= N(D,K°)^(1+eps)",
            _bits(lhs13.lower), (1.0 + consts.eps) * _bits(rhs13.upper))
    record["consistent"] = all(c["consistent"] for c in record["checks"])
    return record


# ---------------------------------------------------------------------------
# iteration inequality shadows


def check_iteration(K: Body, kind: str,
                    consts: PaperConstants = PaperConstants(),
                    budget: int | None = None, seed: int = 0,
                    tol: OracleTolerance = DEFAULT_TOL) -> dict:
    """Bracket-safe shadows of the telescoped iteration inequalities.

    primal kind: lower bits of N(D, R0 K°) against the summed upper bits
    of N(D, R_s K°) * prod N(D, (R_j/2)(K cap R_{j+1}D)°) and of the
    squared-factor variant prod N(K cap R_{j+1}D, sqrt(R_j) D)^2.
    dual kind: lower bits of N(K, R0 D) against N(K, R_s D) * prod
    N(2K cap R_{j+1}D, R_j D) and the cubed-factor variant
    prod N(D, sqrt(R_j)(K cap (R_{j+1}/2)D)°)^3.  Also verifies that the
    stopping-index factor has bracket exactly 1.
    """
    if kind not in ("primal", "dual"):
        raise ValueError("kind must be primal or dual")
    n = K.dim
    D = Ball(1.0, n)
    diam = 2.0 * K.circumradius_bound()
    if kind == "primal":
        seq = functionals.primal_sequence(consts, diam)
    else:
        seq = functionals.dual_sequence(consts, diam)
    Rs = seq.values
    s = seq.s

    def nb(Kb, Tb, t):
        return covering.covering_bounds(Kb, Tb, t, budget, seed, tol)

    record = {"kind": kind, "sequence": [float(v) for v in Rs[:s + 1]],
              "s": s, "per_j": [], "checks": []}

    if kind == "primal":
        Kpol = _polar_of(K)
        lhs = nb(D, Scale(Rs[0], Kpol), 1.0)
        stop = nb(D, Scale(Rs[s], Kpol), 1.0)
        lhs_bits = _bits(lhs.lower)
        base_bits = _bits(stop.upper)
        sum_plain, sum_sq = 0.0, 0.0
        for j in range(s):
            KJ = intersect_with_ball(K, Rs[j + 1])
            plain = nb(D, Scale(Rs[j] / 2.0, _polar_of(KJ)), 1.0)
            sq = nb(KJ, D, math.sqrt(Rs[j]))
            pb, qb = _bits(plain.upper), 2.0 * _bits(sq.upper)
            sum_plain += pb
            sum_sq += qb
            record["per_j"].append({"j": j, "plain_factor_bits": pb,
                                    "squared_factor_bits": qb})
        names = ("N(D,R0K°) <= N(D,RsK°)*prod N(D,(Rj/2)(K∩R_{j+1}D)°)",
                 "N(D,R0K°) <= N(D,RsK°)*prod N(K∩R_{j+1}D,√Rj D)^2")
        totals = (base_bits + sum_plain, base_bits + sum_sq)
    else:
        lhs = nb(K, D, Rs[0])
        stop = nb(K, D, Rs[s])
        lhs_bits = _bits(lhs.lower)
        base_bits = _bits(stop.upper)
        sum_plain, sum_cu = 0.0, 0.0
        for j in range(s):
            K2J = intersect_with_ball(Scale(2.0, K), Rs[j + 1])
            plain = nb(K2J, D, Rs[j])
            KH = intersect_with_ball(K, Rs[j + 1] / 2.0)
            cu = nb(D, Scale(math.sqrt(Rs[j]), _polar_of(KH)), 1.0)
            pb, cb = _bits(plain.upper), 3.0 * _bits(cu.upper)
            sum_plain += pb
            sum_cu += cb
            record["per_j"].append({"j": j, "plain_factor_bits": pb,
                                    "cubed_factor_bits": cb})
        names = ("N(K,R0D) <= N(K,RsD)*prod N(2K∩R_{j+1}D,Rj D)",
                 "N(K,R0D) <= N(K,RsD)*prod N(D,√Rj(K∩(R_{j+1}/2)D)°)^3")
        totals = (base_bits + sum_plain, base_bits + sum_cu)

    for name, total in zip(names, totals):
        record["checks"].append({
            "name": name, "lhs_lower_bits": lhs_bits,
            "rhs_upper_bits": total, "margin": total - lhs_bits,
            "consistent": lhs_bits <= total + _BITS_TOL,
        })
    record["stop_bracket"] = (stop.lower, stop.upper)
    record["stop_is_one"] = stop.lower == stop.upper == 1
    record["consistent"] = (all(c["consistent"] for c in record["checks"])
                            and record["stop_is_one"])
    return record


# ---------------------------------------------------------------------------
# random body families and conjecture probes


def random_symmetric_hull(rng: np.random.Generator, dim: int, m: int,
                          R: float, max_tries: int = 64) -> VPolytope:
    """Symmetric hull of m uniform sphere points scaled to radius R;
    degenerate draws are rejected and resampled."""
    for _ in range(max_tries):
        pts = rng.standard_normal((m, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        try:
            return VPolytope(R * pts)
        except DegenerateBody:
            continue
    raise DegenerateBody("could not sample a full-dimensional hull")


def random_diag_ellipsoid(rng: np.random.Generator, dim: int,
                          lo: float = 0.5, hi: float = 8.0) -> Ellipsoid:
    return Ellipsoid(rng.uniform(lo, hi, size=dim))


def random_zonotope(rng: np.random.Generator, dim: int, segments: int = 3,
                    ball_radius: float = 0.1, max_tries: int = 64) -> Body:
    """Minkowski sum of random segments, fattened by a small ball so the
    body always has interior; the segment hull is materialized as the
    polytope of all sign combinations."""
    segments = min(segments, 4)
    for _ in range(max_tries):
        dirs = rng.standard_normal((segments, dim))
        dirs *= rng.uniform(0.5, 2.0, size=(segments, 1))
        signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * segments),
                                     indexing="ij")).reshape(segments, -1).T
        verts = signs @ dirs
        try:
            return Minkowski(VPolytope(verts), Ball(ball_radius, dim))
        except DegenerateBody:
            continue
    raise DegenerateBody("could not sample a full-dimensional zonotope")


def random_hexagon(rng: np.random.Generator, r_lo: float = 0.5,
                   r_hi: float = 2.0, max_tries: int = 64) -> VPolytope:
    """Random symmetric hexagon: three vertices at random angles in
    [0, pi) and radii in [r_lo, r_hi], symmetrized."""
    for _ in range(max_tries):
        ang = np.sort(rng.uniform(0.0, math.pi, size=3))
        rad = rng.uniform(r_lo, r_hi, size=3)
        verts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
        try:
            hexa = VPolytope(verts)
            if len(hexa.vertices) == 6:
                return hexa
        except DegenerateBody:
            continue
    raise DegenerateBody("could not sample a hexagon")


@dataclass(frozen=True)
class FamilySpec:
    kind: str                      # sphere_hull | ellipsoid | zonotope | hexagon
    dim: int = 2
    R: float = 8.0                 # scale for sphere hulls
    m: int = 16                    # points per hull

    def sample(self, rng: np.random.Generator) -> Body:
        if self.kind == "sphere_hull":
            return random_symmetric_hull(rng, self.dim, self.m, self.R)
        if self.kind == "ellipsoid":
            return random_diag_ellipsoid(rng, self.dim)
        if self.kind == "zonotope":
            return random_zonotope(rng, self.dim)
        if self.kind == "hexagon":
            return random_hexagon(rng)
        raise ValueError(f"unknown family kind {self.kind!r}")


@dataclass
class ConjectureProbe:
    family: FamilySpec
    records: list                  # per body: R, k_bits, mstar, ratios, flag
    max_ratio: float               # conjecture-form ratio M*sqrt(n/k)
    mean_ratio: float
    max_ratio_logR: float | None   # Prop-form ratio with (log2 R)^3 normalizer
    histogram: tuple               # (counts, bin_edges) of the conjecture ratio
    excluded: int                  # bodies flagged with k < 1

    def to_json(self) -> dict:
        return {
            "family": vars(self.family),
            "records": self.records,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "max_ratio_logR": self.max_ratio_logR,
            "histogram_counts": list(map(int, self.histogram[0])),
            "histogram_edges": list(map(float, self.histogram[1])),
            "excluded": self.excluded,
        }


def geometric_lemma_probe(family: FamilySpec, count: int,
                          consts: PaperConstants = PaperConstants(),
                          budget: int | None = None, seed: int = 0,
                          mw_samples: int = 4000,
                          tol: OracleTolerance = DEFAULT_TOL) -> ConjectureProbe:
    """Statistics of M*(K∩D)·sqrt(n/k) over a random family (the
    conjectured universally bounded quantity) and of the same with the
    (log2 R)^3 normalizer.  Report-only: no pass/fail on constants."""
    rng = np.random.default_rng(seed)
    n = family.dim
    D = Ball(1.0, n)
    records, ratios, ratios_logr = [], [], []
    excluded = 0
    for i in range(count):
        K = family.sample(rng)
        sub_seed = seed + 1000 * (i + 1)
        est = covering.covering_bounds(K, D, 1.0, budget, sub_seed, tol)
        k_bits = math.log2(est.lower)
        R = K.circumradius_bound()
        rec = {"index": i, "R": R, "k_bits": k_bits}
        if k_bits < 1.0:
            rec["flagged_low_k"] = True
            excluded += 1
            records.append(rec)
            continue
        mw = mean_width(intersect_with_ball(K, 1.0), mw_samples, sub_seed, tol)
        ratio = mw.estimate * math.sqrt(n / k_bits)
        rec.update({"flagged_low_k": False, "mstar": mw.estimate,
                    "mstar_stderr": mw.stderr, "ratio": ratio})
        ratios.append(ratio)
        if R > 1.0:
            rl = mw.estimate / (math.log2(R) ** 3 * math.sqrt(k_bits / n))
            rec["ratio_logR"] = rl
            ratios_logr.append(rl)
        else:
            rec["ratio_logR"] = None
        records.append(rec)
    if not ratios:
        raise ValueError("every sampled body was excluded (k < 1)")
    counts, edges = np.histogram(ratios, bins=10)
    return ConjectureProbe(
        family=family, records=records,
        max_ratio=float(np.max(ratios)), mean_ratio=float(np.mean(ratios)),
        max_ratio_logR=float(np.max(ratios_logr)) if ratios_logr else None,
        histogram=(counts, edges), excluded=excluded,
    )
