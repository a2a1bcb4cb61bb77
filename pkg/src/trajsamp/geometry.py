"""Convex spectral supports and the geometric predicates the certification checks reduce to.

A body is either an exact ball or a convex polytope held canonically in
H-form (normalized outward normals, offsets).  V-polytopes are converted on
construction via facet enumeration; balls are kept exact so that disc
thresholds stay closed-form.  All predicates report a three-way verdict with
an explicit boundary band instead of guessing on ties.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateBody, EmptySlice, InvalidBody, UnboundedBody

# Absolute slack band (in the units of the body) inside which a fit verdict is
# reported as Boundary rather than resolved either way.  Overridable through
# the environment for exploratory runs; leaving it alone is recommended.
BOUNDARY_TOL = float(os.environ.get("TRAJSAMP_BOUNDARY_TOL", "1e-9"))

_PROBE_RNG_SEED = 20240917


def unit(v) -> np.ndarray:
    """Normalize a nonzero vector."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= 0.0 or not np.isfinite(n):
        raise InvalidBody("direction must be nonzero and finite")
    return v / n


@dataclass(frozen=True)
class Direction:
    """A nonzero direction, normalized on construction."""

    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", unit(self.u))
        self.u.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def _as_dir(u) -> np.ndarray:
    return u.u if isinstance(u, Direction) else np.asarray(u, dtype=float)


def _dedupe_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    if len(rows) == 0:
        return rows
    kept: list[np.ndarray] = []
    for r in rows:
        if not any(np.linalg.norm(r - k) <= tol for k in kept):
            kept.append(r)
    return np.array(kept)


class ConvexBody:
    """Compact convex set in R^d: Ball(center, radius) or polytope {x: Ax <= b}.

    Polytope rows are normalized (unit outward normals) so constraint slacks
    are Euclidean distances.  Vertices are enumerated and cached for polytopes
    at construction; they back exact support evaluation at desk scale.
    """

    def __init__(self, dim, kind, center=None, radius=None, halfspaces=None,
                 vertices=None, symmetric=False, _validate=True):
        self.dim = int(dim)
        self.kind = kind  # "ball" | "polytope"
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.radius = None if radius is None else float(radius)
        if halfspaces is not None:
            A, b = halfspaces
            self.A = np.asarray(A, dtype=float)
            self.b = np.asarray(b, dtype=float)
        else:
            self.A = None
            self.b = None
        self.vertices = None if vertices is None else np.asarray(vertices, dtype=float)
        self.symmetric = bool(symmetric)
        if _validate:
            self._validate()
        for arr in (self.center, self.A, self.b, self.vertices):
            if arr is not None:
                arr.setflags(write=False)

    # ---------------------------------------------------------------- build

    @classmethod
    def ball(cls, center, radius, symmetric=None) -> "ConvexBody":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if symmetric is None:
            symmetric = bool(np.allclose(center, 0.0))
        return cls(center.shape[0], "ball", center=center, radius=radius,
                   symmetric=symmetric)

    @classmethod
    def from_vertices(cls, vertices, symmetric=False) -> "ConvexBody":
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        dim = V.shape[1]
        if dim < 1 or dim > 4:
            raise InvalidBody("polytope dimension must be between 1 and 4")
        if len(V) > 64:
            raise InvalidBody("vertex input capped at 64 points")
        if len(V) < dim + 1:
            raise InvalidBody("need at least d+1 vertices for a solid body")
        if dim == 1:
            lo, hi = float(V.min()), float(V.max())
            if hi - lo <= BOUNDARY_TOL:
                raise InvalidBody("vertices do not span a 1-d interval")
            A = np.array([[1.0], [-1.0]])
            b = np.array([hi, -lo])
            return cls(1, "polytope", halfspaces=(A, b),
                       vertices=np.array([[lo], [hi]]), symmetric=symmetric)
        try:
            hull = ConvexHull(V)
        except QhullError as exc:
            raise InvalidBody(f"vertices are affinely degenerate: {exc}") from exc
        # Qhull equations are [normal, offset] with normal*x + offset <= 0.
        eq = hull.equations
        A = eq[:, :-1]
        b = -eq[:, -1]
        norms = np.linalg.norm(A, axis=1)
        A, b = A / norms[:, None], b / norms
        keep = _dedupe_rows(np.column_stack([A, b]), 1e-12)
        A, b = keep[:, :-1], keep[:, -1]
        return cls(dim, "polytope", halfspaces=(A, b),
                   vertices=V[hull.vertices], symmetric=symmetric)

    @classmethod
    def from_halfspaces(cls, A, b, symmetric=False) -> "ConvexBody":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        dim = A.shape[1]
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms <= 0):
            raise InvalidBody("zero normal in halfspace list")
        A, b = A / norms[:, None], b / norms
        body = cls(dim, "polytope", halfspaces=(A, b), symmetric=symmetric,
                   _validate=False)
        body._check_h_form()
        body.vertices = body._enumerate_vertices()
        body.vertices.setflags(write=False)
        body._validate()
        return body

    # ------------------------------------------------------------- validate

    def _check_h_form(self):
        # Nonempty and bounded: finite support along every +-e_i.  A recession
        # ray has a nonzero component, so these probes catch unboundedness.
        for i in range(self.dim):
            for sgn in (1.0, -1.0):
                e = np.zeros(self.dim)
                e[i] = sgn
                res = linprog(-e, A_ub=self.A, b_ub=self.b,
                              bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 2:
                    raise InvalidBody("halfspace system is infeasible")
                if res.status == 3:
                    raise UnboundedBody(
                        f"body unbounded along axis {i} (sign {sgn:+.0f})")
                if res.status != 0:
                    raise InvalidBody(f"LP failure during validation: {res.message}")

    def _enumerate_vertices(self) -> np.ndarray:
        m, d = self.A.shape
        n_comb = 1
        for k in range(d):
            n_comb = n_comb * (m - k) // (k + 1)
        if n_comb > 200_000:
            raise InvalidBody("too many facets for desk-scale vertex enumeration")
        verts = []
        for idx in itertools.combinations(range(m), d):
            Asub = self.A[list(idx)]
            if abs(np.linalg.det(Asub)) < 1e-12:
                continue
            x = np.linalg.solve(Asub, self.b[list(idx)])
            if np.all(self.A @ x <= self.b + 1e-9):
                verts.append(x)
        if not verts:
            raise InvalidBody("halfspace system has no vertices (empty or degenerate)")
        scale = max(1.0, max(np.linalg.norm(v) for v in verts))
        V = _dedupe_rows(np.array(verts), 1e-9 * scale)
        if len(V) < d + 1:
            raise DegenerateBody("body is lower-dimensional (fewer than d+1 vertices)")
        return V

    def _validate(self):
        if self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise InvalidBody("ball radius must be positive")
            if self.center.shape != (self.dim,):
                raise InvalidBody("ball center/dim mismatch")
            if self.symmetric and np.linalg.norm(self.center) > BOUNDARY_TOL:
                raise InvalidBody("ball flagged symmetric but center is off origin")
            return
        if self.A is None or self.vertices is None:
            raise InvalidBody("polytope needs halfspaces and vertices")
        scale = max(1.0, float(np.abs(self.vertices).max()))
        # H- and V-forms must tell the same support story.
        for u in self._probe_directions():
            hv = float(np.max(self.vertices @ u))
            hh = self._support_lp(u)
            if abs(hv - hh) > 1e-7 * scale:
                raise InvalidBody("V- and H-forms disagree on support function")
        if self.symmetric:
            for u in self._probe_directions():
                s_plus = float(np.max(self.vertices @ u))
                s_minus = float(np.max(self.vertices @ -u))
                if abs(s_plus - s_minus) > 1e-7 * scale:
                    raise InvalidBody("body flagged symmetric fails support symmetry")

    def _probe_directions(self) -> np.ndarray:
        dirs = [np.eye(self.dim)[i] for i in range(self.dim)]
        if self.A is not None:
            dirs.extend(self.A[:16])
        rng = np.random.default_rng(_PROBE_RNG_SEED)
        extra = rng.normal(size=(8, self.dim))
        dirs.extend(extra / np.linalg.norm(extra, axis=1)[:, None])
        return np.array(dirs)

    # ------------------------------------------------------------ queries

    def _support_lp(self, u: np.ndarray) -> float:
        res = linprog(-u, A_ub=self.A, b_ub=self.b,
                      bounds=[(None, None)] * self.dim, method="highs")
        if res.status == 3:
            raise UnboundedBody("support is infinite in the probed direction")
        if res.status != 0:
            raise InvalidBody(f"support LP failed: {res.message}")
        return float(-res.fun)

    def boundary_slack(self, x) -> float:
        """Signed distance-like slack: <=0 inside, 0 on the boundary, >0 outside."""
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return float(np.linalg.norm(x - self.center) - self.radius)
        return float(np.max(self.A @ x - self.b))

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return self.boundary_slack(x) <= tol

    def circumradius(self) -> float:
        if self.kind == "ball":
            return float(np.linalg.norm(self.center) + self.radius)
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        V = self.vertices
        d2 = np.sum((V[:, None, :] - V[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def scaled(self, alpha: float) -> "ConvexBody":
        """Body scaled about the origin by alpha > 0."""
        if alpha <= 0:
            raise InvalidBody("scale factor must be positive")
        if self.kind == "ball":
            return ConvexBody.ball(self.center * alpha, self.radius * alpha,
                                   symmetric=self.symmetric)
        return ConvexBody(self.dim, "polytope",
                          halfspaces=(self.A.copy(), self.b * alpha),
                          vertices=self.vertices * alpha, symmetric=self.symmetric,
                          _validate=False)

    def __repr__(self):
        if self.kind == "ball":
            return f"ConvexBody.ball(dim={self.dim}, r={self.radius:g})"
        return f"ConvexBody.polytope(dim={self.dim}, facets={len(self.A)})"


def support(body: ConvexBody, u) -> float:
    """Support value h(u) = max over the body of <x, u>; homogeneous in u."""
    u = _as_dir(u)
    if body.kind == "ball":
        return float(body.center @ u + body.radius * np.linalg.norm(u))
    if body.vertices is not None:
        return float(np.max(body.vertices @ u))
    return body._support_lp(u)


def breadth(body: ConvexBody, u) -> float:
    """Distance between the two supporting hyperplanes orthogonal to unit u."""
    u = unit(_as_dir(u))
    return support(body, u) + support(body, -u)


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * i
    return np.column_stack([np.sin(phi) * np.cos(theta),
                            np.sin(phi) * np.sin(theta),
                            np.cos(phi)])


def _width_candidates(body: ConvexBody) -> np.ndarray:
    dirs = [body.A]
    if body.dim == 3:
        try:
            hull = ConvexHull(body.vertices)
            edges = set()
            for simplex in hull.simplices:
                for a, b in itertools.combinations(simplex, 2):
                    edges.add((min(a, b), max(a, b)))
            evecs = np.array([body.vertices[b] - body.vertices[a] for a, b in edges])
            crosses = []
            for i in range(len(evecs)):
                c = np.cross(evecs[i], evecs[i + 1:])
                crosses.append(c)
            if crosses:
                C = np.vstack(crosses)
                norms = np.linalg.norm(C, axis=1)
                C = C[norms > 1e-12] / norms[norms > 1e-12][:, None]
                dirs.append(C)
        except QhullError:
            pass
        dirs.append(_fibonacci_sphere(2048))
    else:
        rng = np.random.default_rng(_PROBE_RNG_SEED)
        G = rng.normal(size=(2048, body.dim))
        dirs.append(G / np.linalg.norm(G, axis=1)[:, None])
    return np.vstack(dirs)


def _refine_width(body: ConvexBody, u0: np.ndarray) -> tuple[float, np.ndarray]:
    d = body.dim
    # Tangent chart around u0; Nelder-Mead on the normalized direction.
    basis = np.linalg.svd(u0[None, :])[2][1:]

    def f(z):
        u = u0 + basis.T @ z
        return breadth(body, u / np.linalg.norm(u))

    res = minimize(f, np.zeros(d - 1), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 4000})
    u = u0 + basis.T @ res.x
    u = u / np.linalg.norm(u)
    return float(res.fun), u


def width_direction(body: ConvexBody) -> tuple[float, np.ndarray]:
    """Minimum breadth of the body and a unit direction attaining it.

    2D polytopes: exact minimum over edge normals.  d >= 3: facet/edge
    candidates plus sphere sampling with local refinement (approximate,
    relative tolerance ~1e-9).  Balls are closed-form.
    """
    if body.kind == "ball":
        e = np.zeros(body.dim)
        e[0] = 1.0
        return 2.0 * body.radius, e
    scale = max(1.0, body.circumradius())
    if body.dim == 1:
        w = breadth(body, np.array([1.0]))
        if w <= BOUNDARY_TOL * scale:
            raise DegenerateBody("interval width below tolerance")
        return w, np.array([1.0])
    if body.dim == 2:
        # Minimum breadth of a polygon is attained on an edge normal.
        V = body.vertices
        order = np.argsort(np.arctan2(V[:, 1] - V[:, 1].mean(),
                                      V[:, 0] - V[:, 0].mean()))
        V = V[order]
        normals = []
        for i in range(len(V)):
            e = V[(i + 1) % len(V)] - V[i]
            n = np.array([e[1], -e[0]])
            ln = np.linalg.norm(n)
            if ln > 1e-14:
                normals.append(n / ln)
        cand = np.array(normals)
    else:
        cand = _width_candidates(body)
    widths = np.array([breadth(body, u) for u in cand])
    best = np.argsort(widths)[:8]
    w_hat, u_hat = widths[best[0]], cand[best[0]]
    if body.dim >= 3:
        for i in best:
            w, u = _refine_width(body, cand[i])
            if w < w_hat - 1e-15:
                w_hat, u_hat = w, u
    if w_hat <= BOUNDARY_TOL * scale:
        raise DegenerateBody("body width below tolerance")
    # Deterministic orientation of the reported direction.
    lead = np.nonzero(np.abs(u_hat) > 1e-12)[0][0]
    if u_hat[lead] < 0:
        u_hat = -u_hat
    return float(w_hat), u_hat


# ------------------------------------------------------------------ fitting


FITS = "fits"
NO_FIT = "no_fit"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class FitResult:
    """Outcome of the shifted-containment test with its witness shift and slack."""

    status: str
    shift: np.ndarray | None
    slack: float

    def __bool__(self):
        return self.status == FITS


def _min_enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact smallest enclosing ball (Welzl, move-to-front)."""
    pts = [np.asarray(p, dtype=float) for p in points]
    rng = np.random.default_rng(_PROBE_RNG_SEED)
    rng.shuffle(pts)
    d = pts[0].shape[0]

    def ball_from(support_pts):
        if not support_pts:
            return np.zeros(d), 0.0
        p0 = support_pts[0]
        if len(support_pts) == 1:
            return p0, 0.0
        B = np.array([p - p0 for p in support_pts[1:]])
        G = B @ B.T
        rhs = 0.5 * np.einsum("ij,ij->i", B, B)
        lam, *_ = np.linalg.lstsq(G, rhs, rcond=None)
        center = p0 + B.T @ lam
        return center, float(np.linalg.norm(center - p0))

    def welzl(n, boundary):
        if n == 0 or len(boundary) == d + 1:
            return ball_from(boundary)
        p = pts[n - 1]
        c, r = welzl(n - 1, boundary)
        if np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-14:
            return c, r
        return welzl(n - 1, boundary + [p])

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(pts) + 100))
    try:
        return welzl(len(pts), [])
    finally:
        sys.setrecursionlimit(old)


def fits_in_translate(points, body: ConvexBody, mode: str = "closed") -> FitResult:
    """Decide whether some translate of the body covers all the points.

    The maximal Euclidean slack t* over translates is computed exactly (LP
    for polytopes, smallest enclosing ball for balls).  t* > tol means the
    points fit strictly inside; t* < -tol means no closed translate works;
    in between the verdict is Boundary.  The closed and open readings only
    differ inside that band, so `mode` does not change the outcome beyond it.
    """
    if mode not in ("closed", "open"):
        raise ValueError("mode must be 'closed' or 'open'")
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise InvalidBody("need at least one point")
    if P.shape[1] != body.dim:
        raise InvalidBody("point/body dimension mismatch")

    if body.kind == "ball":
        center, r = _min_enclosing_ball(P)
        slack = body.radius - r
        shift = center - body.center
    else:
        m = body.A @ P.T  # (facets, points)
        mk = m.max(axis=1)
        # max t  s.t.  <a_k, s> - t >= mk - b_k   for all facets k
        nfac, d = body.A.shape
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.column_stack([-body.A, np.ones(nfac)])
        b_ub = body.b - mk
        res = linprog(c, A_ub=A_ub, b_ub=b_ub,
                      bounds=[(None, None)] * (d + 1), method="highs")
        if res.status != 0:
            raise InvalidBody(f"fit LP failed: {res.message}")
        slack = float(res.x[-1])
        shift = res.x[:-1]

    if slack > BOUNDARY_TOL:
        return FitResult(FITS, shift, slack)
    if slack < -BOUNDARY_TOL:
        return FitResult(NO_FIT, None, slack)
    return FitResult(BOUNDARY, shift, slack)


# ------------------------------------------------------------ cross-section


def cross_section(body: ConvexBody, U) -> ConvexBody:
    """Slice of the rotated body at last coordinate zero, as a body in R^(d-1).

    Returns {s in R^(d-1): U^-1 (s, 0) in body}.  U must be orthonormal.
    """
    U = np.asarray(U, dtype=float)
    d = body.dim
    if U.shape != (d, d) or np.abs(U @ U.T - np.eye(d)).max() > 1e-12:
        raise InvalidBody("U must be an orthonormal d x d matrix")
    if d < 2:
        raise InvalidBody("cross-section needs dim >= 2")

    if body.kind == "ball":
        c_rot = U @ body.center
        h = abs(c_rot[-1])
        if h > body.radius + BOUNDARY_TOL:
            raise EmptySlice("slice plane misses the ball")
        r = float(np.sqrt(max(body.radius ** 2 - h ** 2, 0.0)))
        if r <= BOUNDARY_TOL:
            raise EmptySlice("slice is a single tangency point")
        return ConvexBody.ball(c_rot[:-1], r, symmetric=None)

    # x = U^T (s, 0): substitute into A x <= b and drop the last coordinate.
    AU = body.A @ U.T
    A_new, b_new = AU[:, :-1], body.b.copy()
    norms = np.linalg.norm(A_new, axis=1)
    degenerate = norms <= 1e-12
    if np.any(degenerate & (b_new < -BOUNDARY_TOL)):
        raise EmptySlice("slice plane violates a parallel facet")
    A_new, b_new = A_new[~degenerate], b_new[~degenerate]
    try:
        # The slice plane passes through the origin, so origin symmetry survives.
        return ConvexBody.from_halfspaces(A_new, b_new, symmetric=body.symmetric)
    except (InvalidBody, DegenerateBody) as exc:
        raise EmptySlice(f"slice is empty or degenerate: {exc}") from exc
