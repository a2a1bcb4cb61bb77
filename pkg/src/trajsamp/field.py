"""Exactly-bandlimited test fields, the aliasing model, and constructive unfolding.

Fields are finite sums of complex exponentials with frequencies strictly
inside the spectral support.  That choice turns the sampled-spectrum
relations of line/hyperplane unions into exact finite linear algebra, so
"perfect reconstruction" becomes a machine-precision assertion: atoms are
partitioned into cosets of the reciprocal lattice, each coset yields a
small linear system over a lattice-convex index set, and the peeling
decoder solves it constructively (a dense least-squares solve is kept
around as an independent oracle, never as the primary route).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bessel import jn
from .errors import (EmptyInterior, EpsTooCoarse, InconsistentSystem,
                     InvalidBody, NearCosetAmbiguity, ReconstructionImpossible,
                     UnitCellPresent)
from .geometry import BOUNDARY_TOL, ConvexBody, support, unit, width_direction
from .nyquist import check as nyquist_check
from .trajectory import (CircleSet, HyperplaneSet, SampleBatch, SpiralSet,
                         UniformLines2D, UniformLinesD, UnionHyperplanes,
                         UnionUniform2D, Window, as_union, perp,
                         reciprocal_and_qset, sample_points)

_COSET_EXACT_TOL = 1e-9
_COSET_AMBIGUITY_TOL = 1e-7
_ATOM_SEPARATION = 1e-9


# ------------------------------------------------------------------- fields


@dataclass(frozen=True)
class AtomField:
    """Finite sum of complex exponentials r -> sum c_k exp(i <omega_k, r>)."""

    omegas: np.ndarray        # (n, d) frequencies
    coeffs: np.ndarray        # (n,) complex
    omega_ref: ConvexBody
    margin: float = 0.0

    def __post_init__(self):
        om = np.atleast_2d(np.asarray(self.omegas, dtype=float))
        co = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "coeffs", co)
        if om.shape[0] != co.shape[0]:
            raise ValueError("one coefficient per frequency, please")
        if om.shape[0] and om.shape[1] != self.omega_ref.dim:
            raise ValueError("frequency/body dimension mismatch")
        for k, w in enumerate(om):
            slack = self.omega_ref.boundary_slack(w)
            if slack > -self.margin + BOUNDARY_TOL:
                raise ValueError(
                    f"atom {k} violates the interior margin (slack {slack:.3g})")
        if om.shape[0] > 1:
            d2 = np.sum((om[:, None, :] - om[None, :, :]) ** 2, axis=-1)
            np.fill_diagonal(d2, np.inf)
            if np.min(d2) <= _ATOM_SEPARATION ** 2:
                raise ValueError("atom frequencies closer than the separation floor")
        om.setflags(write=False)
        co.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.omega_ref.dim

    @property
    def n_atoms(self) -> int:
        return self.omegas.shape[0]

    def coeff_scale(self) -> float:
        """Sum of coefficient magnitudes; the natural error yardstick."""
        return float(np.sum(np.abs(self.coeffs)))


def make_field(omega: ConvexBody, n_atoms: int, margin: float,
               seed: int) -> AtomField:
    """Seeded random field with atoms inside omega shrunk by margin * width.

    Rejection sampling from the bounding box; coefficients are standard
    complex Gaussians.  Identical seeds give identical fields.
    """
    if not 0.0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 0.5)")
    W, _ = width_direction(omega)
    inset = margin * W
    if omega.kind == "ball":
        if omega.radius - inset <= 0:
            raise EmptyInterior("margin swallows the ball")
        shrunk = ConvexBody.ball(omega.center, omega.radius - inset,
                                 symmetric=omega.symmetric)
    else:
        try:
            shrunk = ConvexBody.from_halfspaces(omega.A, omega.b - inset,
                                                symmetric=omega.symmetric)
        except Exception as exc:
            raise EmptyInterior(f"margin empties the body: {exc}") from exc
    rng = np.random.default_rng(seed)
    if n_atoms == 0:
        return AtomField(np.zeros((0, omega.dim)), np.zeros(0, dtype=complex),
                         omega, margin=0.0)
    if shrunk.kind == "ball":
        lo = shrunk.center - shrunk.radius
        hi = shrunk.center + shrunk.radius
    else:
        lo = shrunk.vertices.min(axis=0)
        hi = shrunk.vertices.max(axis=0)
    atoms: list[np.ndarray] = []
    guard = 0
    while len(atoms) < n_atoms:
        guard += 1
        if guard > 100_000:
            raise EmptyInterior("rejection sampling starved; margin too tight")
        x = rng.uniform(lo, hi)
        if shrunk.boundary_slack(x) >= -BOUNDARY_TOL:
            continue
        if any(np.linalg.norm(x - a) <= _ATOM_SEPARATION * 10 for a in atoms):
            continue
        atoms.append(x)
    g = rng.normal(size=(n_atoms, 2))
    coeffs = (g[:, 0] + 1j * g[:, 1]) / math.sqrt(2.0)
    return AtomField(np.array(atoms), coeffs, omega, margin=inset * 0.999)


def evaluate(fld: AtomField, r) -> complex:
    """Field value at a single location."""
    r = np.asarray(r, dtype=float)
    if fld.n_atoms == 0:
        return 0.0 + 0.0j
    return complex(np.sum(fld.coeffs * np.exp(1j * (fld.omegas @ r))))


def evaluate_grid(fld: AtomField, points: np.ndarray) -> np.ndarray:
    """Vectorized field evaluation at an (m, d) array of locations."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if fld.n_atoms == 0:
        return np.zeros(len(points), dtype=complex)
    out = np.zeros(len(points), dtype=complex)
    chunk = max(1, 2_000_000 // max(fld.n_atoms, 1))
    for start in range(0, len(points), chunk):
        P = points[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * (P @ fld.omegas.T)) @ fld.coeffs
    return out


# -------------------------------------------------------- restriction bands


@dataclass(frozen=True)
class LineCarrier:
    """Straight line r(t) = w + v t; only the direction matters for the band."""

    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


@dataclass(frozen=True)
class HyperplaneCarrier:
    """Affine hyperplane {A x + b}; A must have orthonormal columns."""

    A: np.ndarray
    b: np.ndarray | None = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        object.__setattr__(self, "A", A)
        if np.abs(A.T @ A - np.eye(A.shape[1])).max() > 1e-12:
            raise ValueError("carrier frame must have orthonormal columns")


def restriction_band(obj, carrier):
    """Spectral support of a field (or body) restricted to a line or hyperplane.

    Lines give the interval [min, max] of <omega, v>; hyperplanes give the
    projected body {A^T omega}.
    """
    if isinstance(carrier, LineCarrier):
        v = carrier.v
        if isinstance(obj, ConvexBody):
            return (-support(obj, -v), support(obj, v))
        if isinstance(obj, AtomField):
            if obj.n_atoms == 0:
                return (0.0, 0.0)
            proj = obj.omegas @ v
            return (float(proj.min()), float(proj.max()))
        raise TypeError("band of what? expected a body or a field")
    if isinstance(carrier, HyperplaneCarrier):
        if not isinstance(obj, ConvexBody):
            raise TypeError("hyperplane bands are defined for bodies")
        A = carrier.A
        if isinstance(obj, ConvexBody) and obj.kind == "ball":
            return ConvexBody.ball(A.T @ obj.center, obj.radius,
                                   symmetric=obj.symmetric)
        return ConvexBody.from_vertices(obj.vertices @ A,
                                        symmetric=obj.symmetric)
    raise TypeError(f"unknown carrier {type(carrier).__name__}")


def _eps_bound(omega: ConvexBody, s) -> float:
    """Largest admissible along-path pitch keeping 1-d restrictions unaliased."""
    s = as_union(s)
    half_widths = []
    if isinstance(s, UnionUniform2D):
        for p in s.parts:
            lo, hi = restriction_band(omega, LineCarrier(unit(p.v)))
            half_widths.append(max(abs(lo), abs(hi)))
    elif isinstance(s, UnionHyperplanes):
        for p in s.parts:
            for axis in p.frame():
                lo, hi = restriction_band(omega, LineCarrier(axis))
                half_widths.append(max(abs(lo), abs(hi)))
    elif isinstance(s, UniformLinesD):
        lo, hi = restriction_band(omega, LineCarrier(s.direction))
        half_widths.append(max(abs(lo), abs(hi)))
    else:  # circles/spirals: tangential frequency is at most the circumradius
        half_widths.append(omega.circumradius())
    hw = max(half_widths)
    return math.inf if hw == 0 else math.pi / hw


def sample_on_set(fld: AtomField, s, window: Window, eps: float) -> SampleBatch:
    """Field values at the windowed sample skeleton of the set.

    Refuses pitches coarser than the restriction-band bound so the along-path
    samples are themselves unaliased.
    """
    bound = _eps_bound(fld.omega_ref, s)
    if eps > bound + 1e-12:
        raise EpsTooCoarse(f"eps {eps:.6g} exceeds the admissible bound "
                           f"{bound:.6g}", bound=bound)
    batch = sample_points(s, window, eps)
    batch.values = evaluate_grid(fld, batch.points)
    return batch


# ------------------------------------------------------------ alias systems


def _lattice_closest(U: np.ndarray, delta: np.ndarray) -> tuple[np.ndarray, float]:
    """Closest lattice point U m to delta; returns (m, residual)."""
    m0, *_ = np.linalg.lstsq(U, delta, rcond=None)
    base = np.floor(m0)
    best = None
    n = U.shape[1]
    for corner in itertools.product((0.0, 1.0), repeat=n):
        m = base + np.array(corner)
        r = float(np.linalg.norm(U @ m - delta))
        if best is None or r < best[1]:
            best = (m, r)
    return best[0].astype(int), best[1]


@dataclass
class AliasSystem:
    """One coset's worth of aliasing relations over a lattice-convex index set.

    Unknowns v(n) live on `indices` (n in Z^N); the measured value for family
    i and a column of indices differing only along axis i is
    g = sum over the column of tau(i, n) * v(n), with tau the translation
    phases exp(i <omega0 + U n, w_i>).
    """

    omega0: np.ndarray                   # base frequency of the coset
    U: np.ndarray                        # (d, N) reciprocal columns
    offsets: np.ndarray                  # (N, d) family offsets w_i
    indices: list[tuple[int, ...]]       # lattice-convex index set
    occupied: dict[tuple[int, ...], complex]  # true coefficients (forward model)
    g: dict = dc_field(default_factory=dict)  # (axis, column key) -> measured value
    unit_cell_witness: np.ndarray | None = None

    @property
    def n_axes(self) -> int:
        return self.U.shape[1]

    def frequency(self, n) -> np.ndarray:
        return self.omega0 + self.U @ np.asarray(n, dtype=float)

    def tau(self, axis: int, n) -> complex:
        return complex(np.exp(1j * (self.frequency(n) @ self.offsets[axis])))

    def column_key(self, axis: int, n) -> tuple:
        return (axis,) + tuple(v for j, v in enumerate(n) if j != axis)

    def column_members(self, axis: int, n) -> list[tuple[int, ...]]:
        key = self.column_key(axis, n)
        return [m for m in self.indices if self.column_key(axis, m) == key]

    def build_measurements(self):
        """Forward model: fill g with the exact aliased sums of the coefficients."""
        self.g = {}
        for n in self.indices:
            for axis in range(self.n_axes):
                key = self.column_key(axis, n)
                if key in self.g:
                    continue
                total = 0.0 + 0.0j
                for m in self.column_members(axis, n):
                    v = self.occupied.get(m, 0.0 + 0.0j)
                    total += self.tau(axis, m) * v
                self.g[key] = total

    def dense(self):
        """Dense matrix form (rows = column equations) for the oracle solver."""
        order = {n: k for k, n in enumerate(self.indices)}
        rows, rhs = [], []
        seen = set()
        for n in self.indices:
            for axis in range(self.n_axes):
                key = self.column_key(axis, n)
                if key in seen:
                    continue
                seen.add(key)
                row = np.zeros(len(order), dtype=complex)
                for m in self.column_members(axis, n):
                    row[order[m]] = self.tau(axis, m)
                rows.append(row)
                rhs.append(self.g[key])
        return np.array(rows), np.array(rhs), order


def lattice_convex_hull(points: set[tuple[int, ...]]) -> set[tuple[int, ...]]:
    """Close an integer point set under integer points of member segments."""
    out = set(points)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(out), 2):
            diff = tuple(bb - aa for aa, bb in zip(a, b))
            g = 0
            for x in diff:
                g = math.gcd(g, abs(x))
            for k in range(1, g):
                p = tuple(aa + k * dd // g for aa, dd in zip(a, diff))
                if p not in out:
                    out.add(p)
                    changed = True
    return out


def find_unit_cell(indices: set[tuple[int, ...]], n_axes: int):
    """A translate z whose full binary-corner cell lies inside the set, or None."""
    for z in indices:
        if all(tuple(zi + ci for zi, ci in zip(z, corner)) in indices
               for corner in itertools.product((0, 1), repeat=n_axes)):
            return np.array(z, dtype=int)
    return None


def alias_atoms(fld: AtomField, s) -> list[AliasSystem]:
    """Partition atoms into reciprocal-lattice cosets and build their relations.

    Two atoms share a system iff their frequency difference is an exact
    integer combination of the union's reciprocal vectors; near misses below
    the ambiguity tolerance are refused rather than snapped.  Index sets are
    the lattice-convex hulls of the occupied patterns.
    """
    union = as_union(s)
    if not isinstance(union, (UnionUniform2D, UnionHyperplanes)):
        raise TypeError("aliasing systems are defined for line/hyperplane unions")
    U, _ = reciprocal_and_qset(union)
    if np.linalg.matrix_rank(U, tol=1e-10) < U.shape[1]:
        raise InvalidBody("reciprocal vectors must be linearly independent")
    offsets = np.array([p.w for p in union.parts])
    scale = max(1.0, float(np.linalg.norm(U)))

    order = np.lexsort(fld.omegas.T[::-1])
    atoms = [(fld.omegas[k], fld.coeffs[k]) for k in order]
    cosets: list[dict] = []  # {"anchor": omega, "members": [(n, omega, c)]}
    for om, c in atoms:
        placed = False
        for co in cosets:
            m, resid = _lattice_closest(U, om - co["anchor"])
            if resid <= _COSET_EXACT_TOL * scale:
                co["members"].append((tuple(int(x) for x in m), om, c))
                placed = True
                break
            if resid < _COSET_AMBIGUITY_TOL * scale:
                raise NearCosetAmbiguity(
                    f"frequency {om} misses an exact reciprocal shift by "
                    f"{resid:.3g}; refusing to snap")
        if not placed:
            cosets.append({"anchor": om, "members": [((0,) * U.shape[1], om, c)]})

    systems = []
    for co in cosets:
        occupied_raw = {n: c for n, _, c in co["members"]}
        base_shift = np.min(np.array(list(occupied_raw.keys())), axis=0)
        occupied = {tuple(np.array(n) - base_shift): c
                    for n, c in occupied_raw.items()}
        omega0 = co["anchor"] + U @ base_shift.astype(float)
        hull = lattice_convex_hull(set(occupied.keys()))
        indices = sorted(hull)
        sys = AliasSystem(omega0=omega0, U=U, offsets=offsets,
                          indices=indices, occupied=occupied)
        sys.unit_cell_witness = find_unit_cell(hull, sys.n_axes)
        sys.build_measurements()
        systems.append(sys)
    systems.sort(key=lambda s: tuple(np.round(s.omega0, 12)))
    return systems


# -------------------------------------------------------------- unfolding


def _is_lattice_convex(indices: set[tuple[int, ...]]) -> bool:
    return lattice_convex_hull(indices) == indices


def unfold_decode(system: AliasSystem) -> dict[tuple[int, ...], complex]:
    """Constructive peeling solve of one alias system.

    Repeatedly slices the index set at the maximal last active coordinate:
    indices whose axis-column is a singleton come out directly, the rest
    recurse with one fewer axis, then the slice is removed and the remainder
    recurses with one fewer slice.  Raises UnitCellPresent when the index set
    contains a full binary cell (no unique solution exists) and
    InconsistentSystem when the relations disagree with the result.
    """
    idx = set(system.indices)
    if not _is_lattice_convex(idx):
        raise InvalidBody("index set is not lattice-convex")
    witness = find_unit_cell(idx, system.n_axes)
    if witness is not None:
        raise UnitCellPresent("index set contains a binary unit cell translate",
                              witness=witness)

    solved: dict[tuple[int, ...], complex] = {}
    g_scale = max((abs(v) for v in system.g.values()), default=1.0)
    g_scale = max(g_scale, 1.0)

    def column_equation(axis: int, n) -> tuple[complex, list]:
        members = system.column_members(axis, n)
        return system.g[system.column_key(axis, n)], members

    def solve_region(region: set, axes: tuple[int, ...]):
        if not region:
            return
        if not axes:
            raise InconsistentSystem("peeling exhausted axes with unknowns left")
        ax = axes[-1]
        top = max(n[ax] for n in region)
        slice_top = {n for n in region if n[ax] == top}
        below = {n for n in slice_top
                 if tuple(v - (1 if j == ax else 0) for j, v in enumerate(n))
                 in region}
        singles = slice_top - below
        for n in singles:
            gval, members = column_equation(ax, n)
            acc = gval
            for m in members:
                if m == n:
                    continue
                if m not in solved:
                    raise InconsistentSystem("peeling hit an unsolved neighbor")
                acc -= system.tau(ax, m) * solved[m]
            solved[n] = acc / system.tau(ax, n)
        solve_region(below, axes[:-1])
        solve_region(region - slice_top, axes)

    solve_region(idx, tuple(range(system.n_axes)))

    # Every relation must be satisfied by the back-substituted result.
    for n in system.indices:
        for axis in range(system.n_axes):
            gval, members = column_equation(axis, n)
            resid = abs(gval - sum(system.tau(axis, m) * solved[m]
                                   for m in members))
            if resid > 1e-9 * g_scale:
                raise InconsistentSystem(
                    f"relation residual {resid:.3g} above tolerance")
    return solved


def lstsq_decode(system: AliasSystem):
    """Dense least-squares oracle for the same system (testing route)."""
    A, rhs, order = system.dense()
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = np.linalg.norm(A @ sol - rhs)
    return {n: sol[k] for n, k in order.items()}, float(resid)


# ----------------------------------------------------------- reconstruction


@dataclass(frozen=True)
class ReconstructionReport:
    """Recovered field plus error metrics over the probe grid."""

    estimate: AtomField
    sup_error: float
    rms_error: float
    certified: bool
    verdict_status: str


def _probe_grid(window: Window, per_axis: int) -> np.ndarray:
    axes = [np.linspace(c - window.radius, c + window.radius, per_axis)
            for c in window.center]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, window.dim)
    inside = np.linalg.norm(grid - window.center, axis=1) <= window.radius
    return grid[inside]


def _decode_union(fld: AtomField, union) -> AtomField:
    systems = alias_atoms(fld, union)
    freqs, coeffs = [], []
    for sys in systems:
        if sys.unit_cell_witness is not None:
            raise ReconstructionImpossible(
                "a coset occupies a full binary unit cell",
                witness=sys.unit_cell_witness)
        solved = unfold_decode(sys)
        for n in sys.occupied:
            freqs.append(sys.frequency(n))
            coeffs.append(solved[n])
    if not freqs:
        return AtomField(np.zeros((0, fld.dim)), np.zeros(0, dtype=complex),
                         fld.omega_ref)
    return AtomField(np.array(freqs), np.array(coeffs), fld.omega_ref)


def _decode_lines_d(fld: AtomField, s: UniformLinesD) -> AtomField:
    # A single periodic family: decodable iff no two atoms share a coset of
    # the (d-1)-dimensional reciprocal lattice, in which case the spectrum is
    # unaliased and the coefficients transfer directly.
    U = s.reciprocal().T  # (d, d-1) columns
    for a, b in itertools.combinations(range(fld.n_atoms), 2):
        m, resid = _lattice_closest(U, fld.omegas[a] - fld.omegas[b])
        if resid <= _COSET_EXACT_TOL * max(1.0, float(np.linalg.norm(U))) \
                and np.any(m != 0):
            raise ReconstructionImpossible(
                "two atoms alias under the family's reciprocal lattice",
                witness=m)
    return AtomField(fld.omegas.copy(), fld.coeffs.copy(), fld.omega_ref)


def reconstruct_and_error(fld: AtomField, s, window: Window, eps: float,
                          probe_per_axis: int = 64) -> ReconstructionReport:
    """Sample the field on the set, recover the coefficients, report errors.

    The recovery itself runs on the exact aliased-spectrum relations (finite
    linear algebra); the sample batch realizes the measurement contract and
    the probe grid measures sup/rms deviation of the rebuilt field.
    """
    verdict = nyquist_check(s, fld.omega_ref)
    certified = bool(verdict)
    sample_on_set(fld, s, window, eps)  # enforces the pitch contract

    if isinstance(s, UniformLinesD):
        estimate = _decode_lines_d(fld, s)
    elif isinstance(as_union(s), (UnionUniform2D, UnionHyperplanes)):
        estimate = _decode_union(fld, as_union(s))
    else:
        raise ReconstructionImpossible(
            f"no reconstruction route for {type(s).__name__}")

    grid = _probe_grid(window, probe_per_axis)
    diff = evaluate_grid(estimate, grid) - evaluate_grid(fld, grid)
    sup_err = float(np.max(np.abs(diff))) if len(diff) else 0.0
    rms_err = float(np.sqrt(np.mean(np.abs(diff) ** 2))) if len(diff) else 0.0
    return ReconstructionReport(estimate, sup_err, rms_err, certified,
                                verdict.status)


# ------------------------------------------------------------- null fields


def vanishing_field(s, shift, omega_ref: ConvexBody, amplitude: complex = 1.0,
                    validate_interior: bool = True) -> AtomField:
    """Product-of-sines field that vanishes on every member of the union.

    Expands amplitude * exp(-i<s, r>) * prod_i sin(<u_i, r - w_i>/2) into
    2^N atoms supported on the shifted half-sum sign set.  When the shift
    comes from an open-fit witness the atoms sit strictly inside omega_ref,
    exhibiting a nonzero bandlimited field indistinguishable from zero on
    the set.
    """
    union = as_union(s)
    U, _ = reciprocal_and_qset(union)
    offsets = np.array([p.w for p in union.parts])
    n = U.shape[1]
    shift = np.zeros(union.dim) if shift is None else np.asarray(shift, dtype=float)
    freqs, coeffs = [], []
    for signs in itertools.product((1.0, -1.0), repeat=n):
        sg = np.array(signs)
        freq = 0.5 * U @ sg - shift
        phase = -0.5 * np.sum(sg * (U.T * offsets).sum(axis=1))
        coeff = amplitude * np.prod(sg) / (2.0j) ** n * np.exp(1j * phase)
        freqs.append(freq)
        coeffs.append(coeff)
    fld = AtomField(np.array(freqs), np.array(coeffs), omega_ref)
    if validate_interior:
        for w in fld.omegas:
            if omega_ref.boundary_slack(w) >= -BOUNDARY_TOL:
                raise ValueError("witness shift does not place the null field "
                                 "inside the support")
    return fld


def vanishing_field_lines_d(s: UniformLinesD, m, omega_ref: ConvexBody,
                            amplitude: complex = 1.0) -> AtomField:
    """Sine null field sin(<q, r>) with q the witnessed half-sum, for R^d lines."""
    U = s.reciprocal()
    q = 0.5 * np.asarray(m, dtype=float) @ U
    freqs = np.array([q, -q])
    coeffs = np.array([amplitude / 2.0j, -amplitude / 2.0j])
    return AtomField(freqs, coeffs, omega_ref)


# ------------------------------------------------------------ circle series


@dataclass(frozen=True)
class CircleSeries:
    """Truncated angular Fourier series of a field on a centered circle."""

    coeffs: np.ndarray        # s_k for k = -kbar..kbar
    kbar: int                 # truncation actually used
    kbar_essential: int       # essential-bandwidth cutoff ceil(rho_s / nu)
    nu: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(-self.kbar, self.kbar + 1)
        out = np.exp(1j * self.nu * np.outer(np.atleast_1d(t), k)) @ self.coeffs
        return complex(out[0]) if t.ndim == 0 else out


def circle_series(fld: AtomField, a: float, nu: float,
                  tail_tol: float = 1e-12) -> CircleSeries:
    """Angular Fourier coefficients of t -> field(a cos(nu t), a sin(nu t)).

    For an atom field the coefficients collapse to Bessel sums,
    s_k = sum_j c_j J_k(a |omega_j|) exp(i k atan2(omega_x, omega_y)),
    normalized so the full series interpolates the field on the circle.
    The essential cutoff ceil(rho_s/nu) declares where coefficients become
    negligible; "negligible" is quantified at tail_tol, so the retained
    range extends past the essential cutoff until every neglected Bessel
    factor drops below it.
    """
    if a <= 0 or nu <= 0:
        raise ValueError("circle radius and angular velocity must be positive")
    if fld.dim != 2:
        raise ValueError("circle series is a planar construction")
    sup_norm = fld.omega_ref.circumradius()
    rho_s = nu * (1.0 + a * sup_norm)
    kbar_essential = math.ceil(rho_s / nu)
    if fld.n_atoms == 0:
        return CircleSeries(np.zeros(1, dtype=complex), 0, kbar_essential, nu)
    amps = a * np.linalg.norm(fld.omegas, axis=1)
    beta = np.arctan2(fld.omegas[:, 0], fld.omegas[:, 1])
    kbar = kbar_essential
    x_max = float(np.max(amps))
    while kbar < kbar_essential + 10_000:
        if abs(jn(kbar + 1, x_max)) < tail_tol and abs(jn(kbar + 2, x_max)) < tail_tol:
            break
        kbar += 1
    ks = np.arange(-kbar, kbar + 1)
    coeffs = np.zeros(len(ks), dtype=complex)
    for idx, k in enumerate(ks):
        bess = np.array([jn(int(k), float(x)) for x in amps])
        coeffs[idx] = np.sum(fld.coeffs * bess * np.exp(1j * k * beta))
    return CircleSeries(coeffs, int(kbar), kbar_essential, nu)
