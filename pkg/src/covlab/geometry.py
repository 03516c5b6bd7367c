"""Symmetric convex bodies as composable oracle trees.

A body is one of Ball / Ellipsoid / VPolytope / Polar / Intersect / Scale /
Minkowski.  Every body answers support-function, gauge (Minkowski
functional), membership and radius queries; polarity needs no explicit
conversion because support and gauge swap under it.  All bodies are
origin-symmetric, bounded and (unless explicitly degenerate) have the
origin in their interior, certified at construction through a positive
inradius lower bound.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from scipy.spatial import ConvexHull, QhullError

from . import simplex


class BodyError(ValueError):
    pass


class DimensionMismatch(BodyError):
    pass


class DegenerateBody(BodyError):
    pass


@dataclass(frozen=True)
class OracleTolerance:
    """Relative membership slack and bisection tolerance for oracle calls."""

    membership_slack: float = 1e-9
    bisection_tol: float = 1e-10

    def __post_init__(self):
        if self.membership_slack <= 0 or self.bisection_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.bisection_tol > self.membership_slack:
            raise ValueError("bisection_tol must not exceed membership_slack")


DEFAULT_TOL = OracleTolerance()


def _vec(x, dim=None):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise BodyError("expected a 1-d coordinate vector")
    if not np.all(np.isfinite(v)):
        raise BodyError("coordinates must be finite")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    return v


def _mat(X, dim):
    M = np.atleast_2d(np.asarray(X, dtype=float))
    if M.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {M.shape[1]}")
    return M


class Body:
    """Base class; subclasses fill in the oracle methods."""

    dim: int
    support_is_exact: bool = True

    # -- scalar oracles -------------------------------------------------
    def support(self, u) -> float:
        return float(self.support_batch(_vec(u, self.dim)[None, :])[0])

    def gauge(self, z, tol: OracleTolerance = DEFAULT_TOL) -> float:
        return float(self.gauge_batch(_vec(z, self.dim)[None, :], tol)[0])

    def contains(self, x, tol: OracleTolerance = DEFAULT_TOL) -> bool:
        return self.gauge(x, tol) <= 1.0 + tol.membership_slack

    # -- batch oracles --------------------------------------------------
    def support_batch(self, U) -> np.ndarray:
        raise NotImplementedError

    def gauge_batch(self, Z, tol: OracleTolerance = DEFAULT_TOL) -> np.ndarray:
        raise NotImplementedError

    def contains_batch(self, X, tol: OracleTolerance = DEFAULT_TOL) -> np.ndarray:
        return self.gauge_batch(_mat(X, self.dim), tol) <= 1.0 + tol.membership_slack

    def gauge_exceeds(self, Z, t: float,
                      tol: OracleTolerance = DEFAULT_TOL) -> np.ndarray:
        """Boolean gauge(z) > t per row; subclasses may answer this
        threshold question cheaper than a full gauge evaluation."""
        return self.gauge_batch(Z, tol) > t

    # -- radii ----------------------------------------------------------
    def circumradius_bound(self) -> float:
        raise NotImplementedError

    def inradius_bound(self) -> float:
        raise NotImplementedError

    # -- optional helpers ------------------------------------------------
    def support_point(self, u):
        """A point of the body attaining (or approaching) the support in
        direction u, or None when no cheap witness is available."""
        return None

    def dist_euclid_batch(self, X):
        """Euclidean distances from rows of X to the body, or None."""
        return None

    def _check_interior(self):
        if not self.inradius_bound() > 0.0:
            raise DegenerateBody(
                f"{type(self).__name__} does not contain the origin in its interior"
            )


class Ball(Body):
    def __init__(self, radius: float, dim: int = 2):
        if radius <= 0:
            raise BodyError("ball radius must be positive")
        if dim < 1:
            raise BodyError("dimension must be >= 1")
        self.radius = float(radius)
        self.dim = int(dim)

    def support_batch(self, U):
        return self.radius * np.linalg.norm(_mat(U, self.dim), axis=1)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        return np.linalg.norm(_mat(Z, self.dim), axis=1) / self.radius

    def circumradius_bound(self):
        return self.radius

    def inradius_bound(self):
        return self.radius

    def support_point(self, u):
        u = _vec(u, self.dim)
        n = np.linalg.norm(u)
        return np.zeros(self.dim) if n == 0 else self.radius * u / n

    def dist_euclid_batch(self, X):
        return np.maximum(0.0, np.linalg.norm(_mat(X, self.dim), axis=1) - self.radius)

    def __repr__(self):
        return f"Ball({self.radius}, dim={self.dim})"


class Ellipsoid(Body):
    def __init__(self, semiaxes):
        a = np.asarray(semiaxes, dtype=float)
        if a.ndim != 1 or a.size < 1 or np.any(a <= 0):
            raise BodyError("semiaxes must be a list of positive reals")
        self.semiaxes = a
        self.dim = a.size

    def support_batch(self, U):
        U = _mat(U, self.dim)
        return np.sqrt(((U * self.semiaxes) ** 2).sum(axis=1))

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        Z = _mat(Z, self.dim)
        return np.sqrt(((Z / self.semiaxes) ** 2).sum(axis=1))

    def circumradius_bound(self):
        return float(self.semiaxes.max())

    def inradius_bound(self):
        return float(self.semiaxes.min())

    def support_point(self, u):
        u = _vec(u, self.dim)
        h = self.support(u)
        return np.zeros(self.dim) if h == 0 else self.semiaxes**2 * u / h

    def dist_euclid_batch(self, X):
        # Euclidean distance via the standard Lagrange parameter: the
        # closest boundary point of a diagonal ellipsoid to x has
        # components a_i^2 x_i / (lam + a_i^2) with f(lam) = 0, f
        # decreasing; solved by vectorized bisection on lam.
        X = _mat(X, self.dim)
        out = np.zeros(len(X))
        outside = self.gauge_batch(X) > 1.0
        if not outside.any():
            return out
        Xo = X[outside]
        a2 = self.semiaxes**2
        amax = float(self.semiaxes.max())
        norms = np.linalg.norm(Xo, axis=1)
        lo = np.zeros(len(Xo))
        hi = amax * norms + 1e-300

        def f(lam):
            return (a2 * Xo**2 / (lam[:, None] + a2) ** 2).sum(axis=1) - 1.0

        for _ in range(100):
            mid = 0.5 * (lo + hi)
            pos = f(mid) > 0.0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        lam = 0.5 * (lo + hi)
        d = lam * np.sqrt((Xo**2 / (lam[:, None] + a2) ** 2).sum(axis=1))
        out[outside] = d
        return out

    def __repr__(self):
        return f"Ellipsoid({list(self.semiaxes)})"


class VPolytope(Body):
    """Symmetric polytope conv(V u -V).

    The facet description is recovered once at construction (qhull) so
    that gauge evaluation is an exact vectorized max over facets; the
    convex-combination LP remains available for membership and as an
    independent cross-check of the gauge.  A degenerate (lower
    dimensional) polytope is rejected unless allow_degenerate is set, in
    which case only support-type queries and LP-based gauge/membership
    restricted to its span are served.
    """

    def __init__(self, vertices, allow_degenerate: bool = False):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.size == 0:
            raise BodyError("vertex list must be nonempty")
        if not np.all(np.isfinite(V)):
            raise BodyError("vertices must be finite")
        self.dim = V.shape[1]
        W = np.vstack([V, -V])
        # Deduplicate symmetrized vertices for stable hulls.
        order = np.lexsort(W.T[::-1])
        W = W[order]
        keep = np.ones(len(W), dtype=bool)
        for i in range(1, len(W)):
            if np.allclose(W[i], W[i - 1], atol=1e-14):
                keep[i] = False
        self.vertices = W[keep]
        self.degenerate = False
        self._facets = None
        self._hull_order = None

        if self.dim == 1:
            a = float(np.abs(self.vertices).max())
            if a <= 0:
                raise DegenerateBody("1-d polytope degenerate at the origin")
            self._half_length = a
            self._inr = a
            return

        try:
            hull = ConvexHull(self.vertices)
        except QhullError:
            if allow_degenerate:
                self.degenerate = True
                self._inr = 0.0
                return
            raise DegenerateBody(
                "symmetrized vertex hull has empty interior"
            ) from None
        # hull.equations rows are [normal, offset] with normal@x + offset <= 0;
        # offset < 0 because the origin is interior.
        normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
        if np.any(offsets >= -1e-13):
            if allow_degenerate:
                self.degenerate = True
                self._inr = 0.0
                return
            raise DegenerateBody("origin not in the interior of the hull")
        self._facets = normals / (-offsets)[:, None]
        self._inr = float(1.0 / np.linalg.norm(self._facets, axis=1).max())
        if self.dim == 2:
            self._hull_order = hull.vertices  # ccw boundary walk

    def support_batch(self, U):
        U = _mat(U, self.dim)
        return (U @ self.vertices.T).max(axis=1)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        Z = _mat(Z, self.dim)
        if self.dim == 1:
            return np.abs(Z[:, 0]) / self._half_length
        if self.degenerate:
            return np.array([self.gauge_lp(z) for z in Z])
        return np.maximum((Z @ self._facets.T).max(axis=1), 0.0)

    def gauge_lp(self, z):
        """Gauge via the atomic-norm LP min sum(mu), V^T mu = z, mu >= 0."""
        z = _vec(z, self.dim)
        if np.allclose(z, 0.0):
            return 0.0
        try:
            _, obj = simplex.solve_lp(
                np.ones(len(self.vertices)), self.vertices.T, z
            )
            return max(obj, 0.0)
        except simplex.Infeasible:
            return np.inf

    def contains(self, x, tol=DEFAULT_TOL):
        # Convex-combination feasibility, with the slack applied as a dilation.
        x = _vec(x, self.dim)
        V = self.vertices * (1.0 + tol.membership_slack)
        A = np.vstack([V.T, np.ones(len(V))])
        b = np.concatenate([x, [1.0]])
        return simplex.feasible(A, b)

    def circumradius_bound(self):
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def inradius_bound(self):
        return self._inr

    def support_point(self, u):
        u = _vec(u, self.dim)
        return self.vertices[int(np.argmax(self.vertices @ u))]

    def dist_euclid_batch(self, X):
        X = _mat(X, self.dim)
        if self.dim == 1:
            return np.maximum(0.0, np.abs(X[:, 0]) - self._half_length)
        if self.dim == 2 and self._hull_order is not None:
            return self._dist2d(X)
        return np.array([self._dist_frank_wolfe(x) for x in X])

    def _dist2d(self, X):
        if not hasattr(self, "_edge_a"):
            P = self.vertices[self._hull_order]
            self._edge_a = P
            self._edge_ab = np.roll(P, -1, axis=0) - P
            self._edge_den = np.einsum("ij,ij->i", self._edge_ab, self._edge_ab)
        a, ab, den = self._edge_a, self._edge_ab, self._edge_den
        rel = X[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("mej,ej->me", rel, ab) / den, 0.0, 1.0)
        diff = rel - t[:, :, None] * ab[None, :, :]
        best = np.sqrt(np.einsum("mej,mej->me", diff, diff).min(axis=1))
        best[(X @ self._facets.T).max(axis=1) <= 1.0] = 0.0
        return best

    def _dist_frank_wolfe(self, x, iters=600):
        y = self.vertices[0].astype(float).copy()
        for k in range(iters):
            g = y - x
            v = self.vertices[int(np.argmin(self.vertices @ g))]
            d = v - y
            gap = -(g @ d)
            if gap <= 1e-14:
                break
            step = min(1.0, gap / max(d @ d, 1e-300))
            y += step * d
        return float(np.linalg.norm(x - y))

    def __repr__(self):
        return f"VPolytope({len(self.vertices)} vertices, dim={self.dim})"


class Polar(Body):
    """Polar dual; support and gauge swap with the primal body."""

    def __init__(self, of: Body):
        if isinstance(of, VPolytope) and of.degenerate:
            raise DegenerateBody("polar of a degenerate polytope is unbounded")
        self.of = of
        self.dim = of.dim
        self._check_interior()

    @property
    def support_is_exact(self):
        return True

    def support_batch(self, U):
        return self.of.gauge_batch(U)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        return self.of.support_batch(Z)

    def contains(self, x, tol=DEFAULT_TOL):
        return self.of.support(x) <= 1.0 + tol.membership_slack

    def circumradius_bound(self):
        return 1.0 / self.of.inradius_bound()

    def inradius_bound(self):
        return 1.0 / self.of.circumradius_bound()

    def __repr__(self):
        return f"Polar({self.of!r})"


class Scale(Body):
    def __init__(self, factor: float, of: Body):
        if factor <= 0:
            raise BodyError("scale factor must be positive")
        self.factor = float(factor)
        self.of = of
        self.dim = of.dim

    @property
    def support_is_exact(self):
        return self.of.support_is_exact

    def support_batch(self, U):
        return self.factor * self.of.support_batch(U)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        return self.of.gauge_batch(_mat(Z, self.dim) / self.factor, tol)

    def circumradius_bound(self):
        return self.factor * self.of.circumradius_bound()

    def inradius_bound(self):
        return self.factor * self.of.inradius_bound()

    def support_point(self, u):
        p = self.of.support_point(u)
        return None if p is None else self.factor * p

    def dist_euclid_batch(self, X):
        d = self.of.dist_euclid_batch(_mat(X, self.dim) / self.factor)
        return None if d is None else self.factor * d

    def __repr__(self):
        return f"Scale({self.factor}, {self.of!r})"


class Intersect(Body):
    """Intersection of parts.  Gauge and membership compose exactly;
    the support function is only the certified upper bound min over
    parts, marked non-exact."""

    def __init__(self, *parts):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise BodyError("intersection needs at least one part")
        self.parts = list(parts)
        self.dim = parts[0].dim
        for p in parts[1:]:
            if p.dim != self.dim:
                raise DimensionMismatch("intersection parts must share dimension")
        self._check_interior()

    support_is_exact = False

    def support_batch(self, U):
        vals = np.stack([p.support_batch(U) for p in self.parts])
        return vals.min(axis=0)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        vals = np.stack([p.gauge_batch(Z, tol) for p in self.parts])
        return vals.max(axis=0)

    def circumradius_bound(self):
        return min(p.circumradius_bound() for p in self.parts)

    def inradius_bound(self):
        return min(p.inradius_bound() for p in self.parts)

    def __repr__(self):
        return f"Intersect({', '.join(repr(p) for p in self.parts)})"


class Minkowski(Body):
    """Minkowski sum of parts; support functions add exactly.

    Gauge is evaluated by monotone bisection on the scale t, deciding
    membership of z in t*(X + rD) through the euclidean distance from
    z/t to X whenever the non-ball parts expose a distance oracle; a
    generic convex split minimization covers the remaining cases.
    """

    def __init__(self, *parts):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise BodyError("minkowski sum needs at least one part")
        flat = []
        for p in parts:
            if isinstance(p, Minkowski):
                flat.extend(p.parts)
            else:
                flat.append(p)
        self.parts = flat
        self.dim = flat[0].dim
        for p in flat[1:]:
            if p.dim != self.dim:
                raise DimensionMismatch("minkowski parts must share dimension")
        self._ball_radius = sum(p.radius for p in flat if isinstance(p, Ball))
        self._rest = [p for p in flat if not isinstance(p, Ball)]
        self._check_interior()

    @property
    def support_is_exact(self):
        return all(p.support_is_exact for p in self.parts)

    def support_batch(self, U):
        return np.sum([p.support_batch(U) for p in self.parts], axis=0)

    def gauge_batch(self, Z, tol=DEFAULT_TOL):
        Z = _mat(Z, self.dim)
        r = self._ball_radius
        if not self._rest:
            return np.linalg.norm(Z, axis=1) / r
        if len(self._rest) == 1 and self._rest[0].dist_euclid_batch(Z[:1]) is not None:
            return self._gauge_bisect(Z, self._rest[0], r, tol)
        return np.array([self._gauge_generic(z, tol) for z in Z])

    def _gauge_bisect(self, Z, X, r, tol):
        norms = np.linalg.norm(Z, axis=1)
        out = np.zeros(len(Z))
        idx = np.where(norms > 0)[0]
        if idx.size == 0:
            return out
        Za = Z[idx]
        lo = norms[idx] / self.circumradius_bound()
        hi = norms[idx] / self.inradius_bound() * (1.0 + 1e-6) + 1e-300
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            inside = X.dist_euclid_batch(Za / mid[:, None]) <= r + 1e-15
            hi = np.where(inside, mid, hi)
            lo = np.where(inside, lo, mid)
            done = (hi - lo) <= tol.bisection_tol * hi
            if done.any():
                out[idx[done]] = hi[done]
                keep = ~done
                if not keep.any():
                    return out
                idx, Za, lo, hi = idx[keep], Za[keep], lo[keep], hi[keep]
        out[idx] = hi
        return out

    def contains_batch(self, X, tol=DEFAULT_TOL):
        return ~self.gauge_exceeds(_mat(X, self.dim), 1.0 + tol.membership_slack, tol)

    def gauge_exceeds(self, Z, t, tol=DEFAULT_TOL):
        # z in t(X + rD) iff dist(z/t, X) <= tr; one distance query
        # replaces the whole gauge bisection for threshold tests.
        Z = _mat(Z, self.dim)
        if t <= 0:
            return np.linalg.norm(Z, axis=1) > 0
        if not self._rest:
            return np.linalg.norm(Z, axis=1) > t * self._ball_radius
        if len(self._rest) == 1:
            d = self._rest[0].dist_euclid_batch(Z / t)
            if d is not None:
                return d > self._ball_radius + 1e-15
        return self.gauge_batch(Z, tol) > t

    def _gauge_generic(self, z, tol):
        # Infimal convolution: gauge(z) = min over splits z = sum y_i of
        # max_i gauge_i(y_i).  Desk-scale Nelder-Mead on the split.
        from scipy.optimize import minimize

        z = np.asarray(z, dtype=float)
        if np.allclose(z, 0):
            return 0.0
        parts = self.parts
        k = len(parts)
        circ = np.array([p.circumradius_bound() for p in parts])
        w = circ / circ.sum()

        def f(flat):
            ys = flat.reshape(k - 1, self.dim)
            y0 = z - ys.sum(axis=0)
            vals = [parts[0].gauge(y0, tol)]
            vals += [parts[i + 1].gauge(ys[i], tol) for i in range(k - 1)]
            return max(vals)

        x0 = np.concatenate([w[i + 1] * z for i in range(k - 1)])
        best = f(x0)
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-12})
        return float(min(best, res.fun))

    def circumradius_bound(self):
        return sum(p.circumradius_bound() for p in self.parts)

    def inradius_bound(self):
        return sum(p.inradius_bound() for p in self.parts)

    def support_point(self, u):
        pts = [p.support_point(u) for p in self.parts]
        if any(p is None for p in pts):
            return None
        return np.sum(pts, axis=0)

    def dist_euclid_batch(self, X):
        if not self._rest:
            return np.maximum(
                0.0, np.linalg.norm(_mat(X, self.dim), axis=1) - self._ball_radius
            )
        if len(self._rest) == 1:
            d = self._rest[0].dist_euclid_batch(X)
            if d is not None:
                return np.maximum(0.0, d - self._ball_radius)
        return None

    def __repr__(self):
        return f"Minkowski({', '.join(repr(p) for p in self.parts)})"


# ---------------------------------------------------------------------------
# module-level operations (thin wrappers with dimension checks)


def support(K: Body, u) -> float:
    return K.support(_vec(u, K.dim))


def contains(K: Body, x, tol: OracleTolerance = DEFAULT_TOL) -> bool:
    return K.contains(_vec(x, K.dim), tol)


def gauge(K: Body, z, tol: OracleTolerance = DEFAULT_TOL) -> float:
    return K.gauge(_vec(z, K.dim), tol)


def circumradius_bound(K: Body) -> float:
    return K.circumradius_bound()


def polar(K: Body) -> Body:
    return Polar(K)


def polar_polytope(K: VPolytope) -> VPolytope:
    """Explicit polar of a full-dimensional symmetric polytope: the
    normalized facet normals of K are the vertices of K°."""
    if K.dim == 1:
        return VPolytope(np.array([[1.0 / K._half_length]]))
    if K._facets is None:
        raise DegenerateBody("polar polytope needs a full-dimensional primal")
    return VPolytope(K._facets)


def intersect_with_ball(K: Body, R: float) -> Body:
    """K ∩ R·D with nesting shortcuts so oracles stay exact when one
    side contains the other."""
    if R >= K.circumradius_bound():
        return K
    if R <= K.inradius_bound():
        return Ball(R, K.dim)
    return Intersect(K, Ball(R, K.dim))


def support_refined(K: Body, u, tol: OracleTolerance = DEFAULT_TOL):
    """Support value with a certified bracket for non-exact trees.

    Returns (estimate, upper_bound, method).  For exact bodies both
    numbers coincide.  For intersections the estimate is the best value
    of <u, z/gauge(z)> over the boundary rays through each part's
    supporting point (always attainable, hence a lower bound), while the
    min of the parts' supports is the certified upper bound.
    """
    u = _vec(u, K.dim)
    if K.support_is_exact:
        h = K.support(u)
        return h, h, "exact"
    upper = K.support(u)
    cands = [u]
    if isinstance(K, Intersect):
        for p in K.parts:
            sp = p.support_point(u)
            if sp is not None:
                cands.append(sp)
    best = 0.0
    for z in cands:
        g = K.gauge(z, tol)
        if g > 0 and np.isfinite(g):
            best = max(best, float(u @ z) / g)
    return best, upper, "gauge_ray"


# ---------------------------------------------------------------------------
# JSON (de)serialization


def body_to_json(K: Body) -> dict:
    if isinstance(K, Ball):
        return {"type": "ball", "radius": K.radius, "dim": K.dim}
    if isinstance(K, Ellipsoid):
        return {"type": "ellipsoid", "semiaxes": [float(a) for a in K.semiaxes]}
    if isinstance(K, VPolytope):
        return {"type": "vpolytope", "vertices": K.vertices.tolist()}
    if isinstance(K, Polar):
        return {"type": "polar", "of": body_to_json(K.of)}
    if isinstance(K, Intersect):
        return {"type": "intersect", "parts": [body_to_json(p) for p in K.parts]}
    if isinstance(K, Scale):
        return {"type": "scale", "factor": K.factor, "of": body_to_json(K.of)}
    if isinstance(K, Minkowski):
        return {"type": "minkowski", "parts": [body_to_json(p) for p in K.parts]}
    raise BodyError(f"unknown body {type(K).__name__}")


def body_from_json(spec: dict) -> Body:
    if not isinstance(spec, dict) or "type" not in spec:
        raise BodyError("body spec must be an object with a 'type' field")
    t = spec["type"]
    try:
        if t == "ball":
            return Ball(spec["radius"], spec.get("dim", 2))
        if t == "ellipsoid":
            return Ellipsoid(spec["semiaxes"])
        if t == "vpolytope":
            return VPolytope(spec["vertices"],
                             allow_degenerate=spec.get("allow_degenerate", False))
        if t == "polar":
            return Polar(body_from_json(spec["of"]))
        if t == "intersect":
            return Intersect([body_from_json(p) for p in spec["parts"]])
        if t == "scale":
            return Scale(spec["factor"], body_from_json(spec["of"]))
        if t == "minkowski":
            return Minkowski([body_from_json(p) for p in spec["parts"]])
    except KeyError as e:
        raise BodyError(f"body spec of type '{t}' missing field {e}") from None
    raise BodyError(f"unknown body type '{t}'")
