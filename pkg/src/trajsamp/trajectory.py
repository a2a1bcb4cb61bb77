"""Trajectory and manifold set types, their reciprocal-space data, densities, and point generation.

The sets are infinite families; every generator here is windowed to a ball so
index ranges stay finite.  Point generation is deterministic and order-stable
(sorted by part, then parameter), and along-path parameters are aligned
across parallel members so unions of samples form shifted lattices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .errors import SingularBasis, WindowTooSmall
from .geometry import unit


@dataclass(frozen=True)
class Window:
    """Spherical observation window B(center, radius)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("window radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


def perp(v) -> np.ndarray:
    """Unit vector orthogonal to a 2-d vector (counterclockwise)."""
    v = unit(v)
    return np.array([-v[1], v[0]])


# ----------------------------------------------------------------- set types


@dataclass(frozen=True)
class UniformLines2D:
    """Equispaced parallel lines in the plane: p_j(t) = w + j*delta*perp(v) + t*unit(v)."""

    w: np.ndarray
    v: np.ndarray
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.delta <= 0:
            raise ValueError("line spacing must be positive")
        if np.linalg.norm(self.v) == 0:
            raise ValueError("line direction must be nonzero")

    @property
    def dim(self) -> int:
        return 2

    def reciprocal(self) -> np.ndarray:
        return 2.0 * np.pi * perp(self.v) / self.delta


@dataclass(frozen=True)
class UnionUniform2D:
    """Union of N uniform line sets in the plane."""

    parts: tuple[UniformLines2D, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 1:
            raise ValueError("union needs at least one part")

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class UniformLinesD:
    """Periodic family of parallel lines in R^d.

    basis rows v_1..v_d with <v_i, v_d> = delta_id: the first d-1 vectors span
    the transverse lattice inside the hyperplane orthogonal to the unit line
    direction v_d.
    """

    basis: np.ndarray  # (d, d), row i is v_i
    w: np.ndarray | None = None

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", B)
        d = B.shape[0]
        if B.shape != (d, d) or d < 2:
            raise ValueError("basis must be a square d x d array, d >= 2")
        if self.w is not None:
            object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        vd = B[-1]
        if abs(np.linalg.norm(vd) - 1.0) > 1e-12:
            raise ValueError("line direction v_d must be a unit vector")
        if np.max(np.abs(B[:-1] @ vd)) > 1e-12:
            raise ValueError("transverse vectors must be orthogonal to v_d")
        if abs(np.linalg.det(B)) < 1e-12:
            raise SingularBasis("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def direction(self) -> np.ndarray:
        return self.basis[-1]

    @property
    def transverse(self) -> np.ndarray:
        return self.basis[:-1]

    def offset(self) -> np.ndarray:
        return np.zeros(self.dim) if self.w is None else self.w

    def reciprocal(self) -> np.ndarray:
        """Rows u_1..u_{d-1} with <u_i, v_j> = 2 pi delta_ij for all j <= d."""
        U_full = 2.0 * np.pi * np.linalg.inv(self.basis).T  # row i solves against all v_j
        return U_full[:-1]


@dataclass(frozen=True)
class CircleSet:
    """Concentric circles of radii 0, delta, 2*delta, ... about the origin."""

    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("radial spacing must be positive")

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class SpiralSet:
    """N interleaved constant-pitch spirals sp_i(t) = c*t*(cos, sin)(2 pi (t - i/N))."""

    c: float
    n: int

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("spiral pitch scale must be positive")
        if self.n < 1:
            raise ValueError("need at least one spiral")

    @property
    def dim(self) -> int:
        return 2

    def point(self, i: int, t) -> np.ndarray:
        ph = 2.0 * np.pi * (np.asarray(t) - i / self.n)
        return np.stack([self.c * t * np.cos(ph), self.c * t * np.sin(ph)], axis=-1)

    def arc_length(self, t) -> np.ndarray:
        """Arc length along one spiral from parameter 0 to t (closed form)."""
        t = np.asarray(t, dtype=float)
        tp = 2.0 * np.pi * t
        return self.c * (0.5 * t * np.sqrt(1.0 + tp ** 2)
                         + np.arcsinh(tp) / (4.0 * np.pi))

    def speed(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.c * np.sqrt(1.0 + (2.0 * np.pi * t) ** 2)

    def param_at_arc_length(self, s) -> np.ndarray:
        """Invert the arc-length map by Newton from a linear first guess."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = s / self.c
        for _ in range(60):
            f = self.arc_length(t) - s
            t = np.maximum(t - f / np.maximum(self.speed(t), 1e-300), 0.0)
            if np.max(np.abs(f)) < 1e-13 * max(1.0, np.max(s, initial=1.0)):
                break
        return t


@dataclass(frozen=True)
class HyperplaneSet:
    """Equispaced parallel hyperplanes: p_j = w + j*delta*h + {r: <r, h> = 0}."""

    w: np.ndarray
    h: np.ndarray
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        h = np.asarray(self.h, dtype=float)
        n = np.linalg.norm(h)
        if n == 0:
            raise ValueError("hyperplane normal must be nonzero")
        object.__setattr__(self, "h", h / n)
        if self.delta <= 0:
            raise ValueError("hyperplane spacing must be positive")

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def reciprocal(self) -> np.ndarray:
        return 2.0 * np.pi * self.h / self.delta

    def frame(self) -> np.ndarray:
        """Deterministic orthonormal in-plane frame, greedily aligned with the axes."""
        d = self.dim
        axes = np.argsort(np.abs(self.h))  # most orthogonal axes first
        frame = []
        for ax in axes:
            e = np.zeros(d)
            e[ax] = 1.0
            v = e - (e @ self.h) * self.h
            for f in frame:
                v = v - (v @ f) * f
            ln = np.linalg.norm(v)
            if ln > 1e-9:
                frame.append(v / ln)
            if len(frame) == d - 1:
                break
        return np.array(frame)


@dataclass(frozen=True)
class UnionHyperplanes:
    """Union of N uniform hyperplane sets."""

    parts: tuple[HyperplaneSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 1:
            raise ValueError("union needs at least one part")
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise ValueError("all parts must share one dimension")

    @property
    def dim(self) -> int:
        return self.parts[0].dim


TrajectorySet = (UniformLines2D, UnionUniform2D, UniformLinesD, CircleSet,
                 SpiralSet, HyperplaneSet, UnionHyperplanes)


def as_union(s):
    """View a single-family set as a one-part union where that makes sense."""
    if isinstance(s, UniformLines2D):
        return UnionUniform2D((s,))
    if isinstance(s, HyperplaneSet):
        return UnionHyperplanes((s,))
    return s


# ----------------------------------------------------- reciprocal data and Q


def reciprocal_and_qset(s) -> tuple[np.ndarray, np.ndarray]:
    """Reciprocal vectors u_i (columns) and the 2^N half-sum sign set Q.

    Lines contribute u_i = 2 pi perp(v_i)/delta_i, hyperplanes
    u_i = 2 pi h_i/delta_i.  Q keeps all 2^N sign patterns as a multiset.
    """
    s = as_union(s)
    if isinstance(s, UnionUniform2D):
        cols = [p.reciprocal() for p in s.parts]
    elif isinstance(s, UnionHyperplanes):
        cols = [p.reciprocal() for p in s.parts]
    else:
        raise TypeError(f"no reciprocal data for {type(s).__name__}")
    U = np.column_stack(cols)
    n = U.shape[1]
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    Q = 0.5 * signs @ U.T
    return U, Q


# ------------------------------------------------------------------ density


def density(s) -> float:
    """Path density (lines, circles, spirals) or manifold density (hyperplanes)."""
    if isinstance(s, UniformLines2D):
        return 1.0 / s.delta
    if isinstance(s, UnionUniform2D):
        return sum(1.0 / p.delta for p in s.parts)
    if isinstance(s, UniformLinesD):
        T = s.transverse
        G = T @ T.T
        det = np.linalg.det(G)
        if det <= 1e-300:
            raise SingularBasis("transverse Gram matrix is singular")
        return 1.0 / math.sqrt(det)
    if isinstance(s, CircleSet):
        return 1.0 / s.delta
    if isinstance(s, SpiralSet):
        return s.n / s.c
    if isinstance(s, HyperplaneSet):
        return 1.0 / s.delta
    if isinstance(s, UnionHyperplanes):
        return sum(1.0 / p.delta for p in s.parts)
    raise TypeError(f"unknown set type {type(s).__name__}")


def spacing_scale(s) -> float:
    """Largest spacing parameter of the set (used for window sizing)."""
    if isinstance(s, UniformLines2D):
        return s.delta
    if isinstance(s, UnionUniform2D):
        return max(p.delta for p in s.parts)
    if isinstance(s, UniformLinesD):
        return float(max(np.linalg.norm(v) for v in s.transverse))
    if isinstance(s, CircleSet):
        return s.delta
    if isinstance(s, SpiralSet):
        return s.c / s.n
    if isinstance(s, HyperplaneSet):
        return s.delta
    if isinstance(s, UnionHyperplanes):
        return max(p.delta for p in s.parts)
    raise TypeError(f"unknown set type {type(s).__name__}")


# ------------------------------------------------------------ sample batches


@dataclass
class SampleBatch:
    """Uniformly discrete sample skeleton with provenance, optionally carrying values."""

    dim: int
    part: np.ndarray     # int family / trajectory index
    param: np.ndarray    # along-path parameter
    points: np.ndarray   # (n, dim)
    eps: float
    set_descriptor: object = None
    values: np.ndarray | None = None

    def __len__(self):
        return len(self.points)

    def sorted(self) -> "SampleBatch":
        key = np.lexsort(tuple(self.points.T[::-1]) + (self.param, self.part))
        return SampleBatch(self.dim, self.part[key], self.param[key],
                           self.points[key], self.eps, self.set_descriptor,
                           None if self.values is None else self.values[key])


def _lines_2d_points(part_idx, ls: UniformLines2D, window: Window, eps: float):
    vhat, nhat = unit(ls.v), perp(ls.v)
    rel = ls.w - window.center
    h0, c0 = rel @ nhat, rel @ vhat
    a = window.radius
    j_lo = math.ceil((-a - h0) / ls.delta - 1e-12)
    j_hi = math.floor((a - h0) / ls.delta + 1e-12)
    rows = []
    for j in range(j_lo, j_hi + 1):
        hj = h0 + j * ls.delta
        if abs(hj) > a:
            continue
        L = math.sqrt(max(a * a - hj * hj, 0.0))
        k_lo = math.ceil((-c0 - L) / eps - 1e-12)
        k_hi = math.floor((-c0 + L) / eps + 1e-12)
        for k in range(k_lo, k_hi + 1):
            t = k * eps
            p = ls.w + j * ls.delta * nhat + t * vhat
            if np.linalg.norm(p - window.center) <= a + 1e-12:
                rows.append((part_idx, t, p))
    return rows


def _hyperplane_points(part_idx, hs: HyperplaneSet, window: Window, eps: float):
    a = window.radius
    frame = hs.frame()  # (d-1, d)
    h0 = (hs.w - window.center) @ hs.h
    j_lo = math.ceil((-a - h0) / hs.delta - 1e-12)
    j_hi = math.floor((a - h0) / hs.delta + 1e-12)
    rows = []
    for j in range(j_lo, j_hi + 1):
        hj = h0 + j * hs.delta
        if abs(hj) > a:
            continue
        L = math.sqrt(max(a * a - hj * hj, 0.0))
        base = hs.w + j * hs.delta * hs.h
        ctr = frame @ (window.center - base)  # in-plane coordinates of the window center
        ranges = [range(math.ceil((c - L) / eps - 1e-12),
                        math.floor((c + L) / eps + 1e-12) + 1) for c in ctr]
        for n in itertools.product(*ranges):
            coords = np.array(n, dtype=float) * eps
            p = base + frame.T @ coords
            if np.linalg.norm(p - window.center) <= a + 1e-12:
                rows.append((part_idx, coords[0], p))
    return rows


def sample_points(s, window: Window, eps: float) -> SampleBatch:
    """Points p_i(k*eps) of the set inside the window, tagged with provenance.

    eps is an along-path arc-length pitch (hyperplanes: in-plane grid pitch).
    The result is uniformly discrete and sorted by (part, parameter).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if window.dim != s.dim:
        raise ValueError("window/set dimension mismatch")
    rows: list[tuple[int, float, np.ndarray]] = []
    a = window.radius

    if isinstance(s, UniformLines2D):
        rows = _lines_2d_points(0, s, window, eps)
    elif isinstance(s, UnionUniform2D):
        for i, p in enumerate(s.parts):
            rows.extend(_lines_2d_points(i, p, window, eps))
    elif isinstance(s, HyperplaneSet):
        rows = _hyperplane_points(0, s, window, eps)
    elif isinstance(s, UnionHyperplanes):
        for i, p in enumerate(s.parts):
            rows.extend(_hyperplane_points(i, p, window, eps))
    elif isinstance(s, CircleSet):
        D = float(np.linalg.norm(window.center))
        i_hi = math.floor((D + a) / s.delta + 1e-12)
        for i in range(0, i_hi + 1):
            r = i * s.delta
            if abs(D - r) > a:
                continue
            if i == 0:
                rows.append((0, 0.0, np.zeros(2)))
                continue
            n_pts = max(1, math.ceil(2.0 * np.pi * r / eps))
            for k in range(n_pts):
                th = 2.0 * np.pi * k / n_pts
                p = r * np.array([math.cos(th), math.sin(th)])
                if np.linalg.norm(p - window.center) <= a + 1e-12:
                    rows.append((i, th, p))
    elif isinstance(s, UniformLinesD):
        rows = _lines_d_points(s, window, eps)
    elif isinstance(s, SpiralSet):
        D = float(np.linalg.norm(window.center))
        t_max = (D + a) / s.c
        s_max = float(s.arc_length(t_max))
        ks = np.arange(0, math.floor(s_max / eps + 1e-12) + 1)
        ts = s.param_at_arc_length(ks * eps)
        seen_origin = False
        for i in range(s.n):
            pts = s.point(i, ts)
            keep = np.linalg.norm(pts - window.center, axis=1) <= a + 1e-12
            for t, p, ok in zip(ts, pts, keep):
                if not ok:
                    continue
                if t == 0.0:
                    if seen_origin:
                        continue  # all spirals share the origin point
                    seen_origin = True
                rows.append((i, float(t), p))
    else:
        raise TypeError(f"unknown set type {type(s).__name__}")

    if not rows:
        raise WindowTooSmall("no trajectory of the set meets the window")
    part = np.array([r[0] for r in rows], dtype=int)
    param = np.array([r[1] for r in rows], dtype=float)
    pts = np.array([r[2] for r in rows], dtype=float)
    batch = SampleBatch(s.dim, part, param, pts, eps, s).sorted()
    # Union members cross; keep one copy of each shared location.
    keep = np.ones(len(batch), dtype=bool)
    for i, j in cKDTree(batch.points).query_pairs(1e-9):
        keep[max(i, j)] = False
    return SampleBatch(s.dim, batch.part[keep], batch.param[keep],
                       batch.points[keep], eps, s,
                       None if batch.values is None else batch.values[keep])


def _lines_d_points(s: UniformLinesD, window: Window, eps: float):
    d = s.dim
    T, vd, w = s.transverse, s.direction, s.offset()
    a = window.radius
    G = T @ T.T
    Ginv = np.linalg.inv(G)
    x_rel = window.center - w
    x_perp = x_rel - (x_rel @ vd) * vd
    m_center = Ginv @ (T @ x_perp)
    bounds = np.sqrt(np.diag(Ginv)) * a
    ranges = [range(math.ceil(c - bo - 1), math.floor(c + bo + 1) + 1)
              for c, bo in zip(m_center, bounds)]
    rows = []
    for flat, m in enumerate(itertools.product(*ranges)):
        base = w + np.array(m, dtype=float) @ T
        dist = np.linalg.norm(base - w - x_perp)
        if dist > a:
            continue
        c0 = (base - window.center) @ vd
        L = math.sqrt(max(a * a - dist * dist, 0.0))
        k_lo = math.ceil((-c0 - L) / eps - 1e-12)
        k_hi = math.floor((-c0 + L) / eps + 1e-12)
        for k in range(k_lo, k_hi + 1):
            t = k * eps
            p = base + t * vd
            if np.linalg.norm(p - window.center) <= a + 1e-12:
                rows.append((flat, t, p))
    return rows


# --------------------------------------------------------- covering estimate


@dataclass(frozen=True)
class CoveringEstimate:
    """Grid-probed covering radius; the true value lies within one pitch above."""

    value: float
    pitch: float

    def __float__(self):
        return self.value


def covering_radius(points, window: Window, pitch: float | None = None,
                    margin: float = 0.0) -> CoveringEstimate:
    """Largest distance from the (shrunken) window to the nearest sample point.

    Probes a dense grid of the given pitch; the window is shrunk by `margin`
    so boundary probes are not starved of neighbors outside the window.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise ValueError("need at least one point")
    d = pts.shape[1]
    if pitch is None:
        tree = cKDTree(pts)
        nn, _ = tree.query(pts, k=2)
        pitch = max(float(np.min(nn[:, 1])) / 4.0, 1e-6)
    r_eff = window.radius - margin
    if r_eff <= 0:
        raise ValueError("margin swallows the whole window")
    axes = [np.arange(-r_eff, r_eff + pitch / 2, pitch) + c
            for c in window.center]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    inside = np.linalg.norm(grid - window.center, axis=1) <= r_eff
    grid = grid[inside]
    tree = cKDTree(pts)
    dists, _ = tree.query(grid, workers=-1)
    return CoveringEstimate(float(np.max(dists)), float(pitch))


# ------------------------------------------------------- windowed arc length


def _ball_volume(d: int, a: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * a ** d


def arc_length_in_ball(s, a: float, x=None) -> float:
    """Total trajectory length (hyperplanes: surface volume) inside B(x, a).

    Lines and circles use exact chord/arc formulas; spirals integrate the
    speed over the parameter intervals that meet the ball.
    """
    if a <= 0:
        raise ValueError("radius must be positive")
    if x is None:
        x = np.zeros(s.dim)
    x = np.asarray(x, dtype=float)

    if isinstance(s, UniformLines2D):
        nhat = perp(s.v)
        h0 = (s.w - x) @ nhat
        j_lo = math.ceil((-a - h0) / s.delta)
        j_hi = math.floor((a - h0) / s.delta)
        total = 0.0
        for j in range(j_lo, j_hi + 1):
            hj = h0 + j * s.delta
            if abs(hj) <= a:
                total += 2.0 * math.sqrt(max(a * a - hj * hj, 0.0))
        return total
    if isinstance(s, UnionUniform2D):
        return sum(arc_length_in_ball(p, a, x) for p in s.parts)
    if isinstance(s, UniformLinesD):
        T, vd, w = s.transverse, s.direction, s.offset()
        G = T @ T.T
        Ginv = np.linalg.inv(G)
        x_rel = x - w
        x_perp = x_rel - (x_rel @ vd) * vd
        m_center = Ginv @ (T @ x_perp)
        bounds = np.sqrt(np.diag(Ginv)) * a
        total = 0.0
        ranges = [range(math.ceil(c - bo - 1), math.floor(c + bo + 1) + 1)
                  for c, bo in zip(m_center, bounds)]
        for m in itertools.product(*ranges):
            dist = np.linalg.norm(np.array(m, dtype=float) @ T - x_perp)
            if dist <= a:
                total += 2.0 * math.sqrt(max(a * a - dist * dist, 0.0))
        return total
    if isinstance(s, CircleSet):
        D = float(np.linalg.norm(x))
        total = 0.0
        i_hi = math.floor((D + a) / s.delta)
        for i in range(1, i_hi + 1):
            r = i * s.delta
            if D <= 1e-15:
                total += 2.0 * math.pi * r if r <= a else 0.0
                continue
            if r >= D + a or r <= D - a:
                continue
            if r <= a - D:
                total += 2.0 * math.pi * r
                continue
            cosphi = (D * D + r * r - a * a) / (2.0 * D * r)
            total += 2.0 * r * math.acos(np.clip(cosphi, -1.0, 1.0))
        return total
    if isinstance(s, SpiralSet):
        D = float(np.linalg.norm(x))
        t_hi = (D + a) / s.c
        total = 0.0
        for i in range(s.n):
            for lo, hi in _spiral_window_intervals(s, i, x, a, t_hi):
                val, _ = quad(lambda t: float(s.speed(t)), lo, hi, limit=200)
                total += val
        return total
    if isinstance(s, HyperplaneSet):
        h0 = (s.w - x) @ s.h
        j_lo = math.ceil((-a - h0) / s.delta)
        j_hi = math.floor((a - h0) / s.delta)
        total = 0.0
        for j in range(j_lo, j_hi + 1):
            hj = h0 + j * s.delta
            if abs(hj) <= a:
                rad = math.sqrt(max(a * a - hj * hj, 0.0))
                total += _ball_volume(s.dim - 1, rad)
        return total
    if isinstance(s, UnionHyperplanes):
        return sum(arc_length_in_ball(p, a, x) for p in s.parts)
    raise TypeError(f"unknown set type {type(s).__name__}")


def _spiral_window_intervals(s: SpiralSet, i: int, x: np.ndarray, a: float,
                             t_hi: float):
    """Parameter intervals of spiral i lying inside B(x, a), by sign scanning."""
    def g(t):
        return float(np.sum((s.point(i, t) - x) ** 2) - a * a)

    n_scan = max(200, int(50 * t_hi) + 1)
    ts = np.linspace(0.0, t_hi, n_scan)
    vals = np.array([g(t) for t in ts])
    intervals = []
    inside = vals[0] <= 0
    start = 0.0 if inside else None
    for k in range(1, n_scan):
        if (vals[k] <= 0) != inside:
            root = brentq(g, ts[k - 1], ts[k], xtol=1e-12)
            if inside:
                intervals.append((start, root))
            else:
                start = root
            inside = not inside
    if inside:
        intervals.append((start, t_hi))
    return intervals
