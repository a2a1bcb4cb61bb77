"""Verdict engines deciding whether a sampling set determines every bandlimited field.

Each check reduces to a geometric predicate on the reciprocal data of the
set: translate-containment of the half-sum sign set for unions, lattice
half-sum exclusion for parallel lines in R^d, and a covering-radius
sufficiency test for circles and spirals.  Verdicts are deliberately
multi-state: the sufficient and necessary directions differ exactly on the
boundary of the support, and that gap is surfaced as Critical instead of
being resolved by fiat.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (CollinearParts, EnumerationOverflow, NonIsotropicOmega,
                     SymmetryRequired)
from .geometry import BOUNDARY_TOL, BOUNDARY, FITS, NO_FIT, ConvexBody, fits_in_translate
from .trajectory import (CircleSet, HyperplaneSet, SpiralSet, UniformLines2D,
                         UniformLinesD, UnionHyperplanes, UnionUniform2D,
                         Window, as_union, covering_radius, reciprocal_and_qset,
                         sample_points)

NYQUIST = "nyquist"
NOT_NYQUIST = "not_nyquist"
CRITICAL = "critical"
SUFFICIENT_ONLY = "sufficient_only"
UNKNOWN = "unknown"

_C2_NOTE = ("connectivity condition certified analytically for built-in set "
            "types only")


@dataclass(frozen=True)
class NyquistVerdict:
    """Outcome of a reconstruction-condition check.

    status: one of nyquist / not_nyquist / critical / sufficient_only / unknown.
    witness: for not_nyquist, the offending shift s or lattice index m;
             for critical, the boundary-contact witness.
    basis: short name of the criterion that produced the verdict.
    """

    status: str
    basis: str
    witness: np.ndarray | None = None
    notes: tuple[str, ...] = field(default=(_C2_NOTE,))

    def __bool__(self):
        return self.status in (NYQUIST, SUFFICIENT_ONLY)

    @property
    def exit_code(self) -> int:
        if self.status in (NYQUIST, SUFFICIENT_ONLY):
            return 0
        if self.status == NOT_NYQUIST:
            return 2
        return 3


def _qset_verdict(union, omega: ConvexBody, full_criterion: bool,
                  basis_full: str, basis_nec: str) -> NyquistVerdict:
    _, Q = reciprocal_and_qset(union)
    fit = fits_in_translate(Q, omega, mode="closed")
    if fit.status == FITS:
        return NyquistVerdict(NOT_NYQUIST, basis_nec, witness=fit.shift)
    if not full_criterion:
        return NyquistVerdict(UNKNOWN, basis_nec + "; sufficiency not covered "
                              "for this configuration")
    if fit.status == NO_FIT:
        return NyquistVerdict(NYQUIST, basis_full)
    return NyquistVerdict(CRITICAL, basis_full, witness=fit.shift)


def check_union_uniform_2d(s, omega: ConvexBody) -> NyquistVerdict:
    """Necessary-and-sufficient check for unions of N <= 2 uniform line sets.

    The union determines every field with spectrum in omega iff no translate
    of omega covers the half-sum sign set Q of the reciprocal vectors.  For
    N >= 3 only the necessary direction is known, so a passing Q test yields
    Unknown rather than a certificate.
    """
    union = as_union(s)
    if not isinstance(union, UnionUniform2D):
        raise TypeError("expected a union of uniform line sets in the plane")
    if omega.dim != 2:
        raise ValueError("omega must be two-dimensional")
    n = len(union.parts)
    if n == 2:
        v1, v2 = (p.v for p in union.parts)
        cross = v1[0] * v2[1] - v1[1] * v2[0]
        if abs(cross) <= 1e-12 * np.linalg.norm(v1) * np.linalg.norm(v2):
            raise CollinearParts("two-part criterion needs non-collinear directions")
    return _qset_verdict(union, omega, full_criterion=(n <= 2),
                         basis_full="qset-translate-exclusion (union of <=2 "
                                    "uniform line sets)",
                         basis_nec="qset-open-fit necessary condition")


def check_hyperplane_union(s, omega: ConvexBody) -> NyquistVerdict:
    """Same Q-set criterion for unions of uniform hyperplane sets in R^d.

    The full criterion needs linearly independent family normals (which
    forces N <= d); otherwise only the necessary direction applies.
    """
    union = as_union(s)
    if not isinstance(union, UnionHyperplanes):
        raise TypeError("expected a union of uniform hyperplane sets")
    if omega.dim != union.dim:
        raise ValueError("omega/set dimension mismatch")
    H = np.array([p.h for p in union.parts])
    independent = np.linalg.matrix_rank(H, tol=1e-10) == len(union.parts)
    return _qset_verdict(union, omega, full_criterion=independent,
                         basis_full="qset-translate-exclusion (independent "
                                    "hyperplane normals)",
                         basis_nec="qset-open-fit necessary condition")


def check_uniform_d(s: UniformLinesD, omega: ConvexBody) -> NyquistVerdict:
    """Half-sum lattice exclusion for periodic parallel lines in R^d.

    Requires omega symmetric about the origin.  Enumerates the reciprocal
    lattice indices m whose half-sums could possibly land in omega and tests
    membership; an interior hit is a NotNyquist witness, a boundary contact
    is Critical.
    """
    if not isinstance(s, UniformLinesD):
        raise TypeError("expected a periodic parallel-line set in R^d")
    if omega.dim != s.dim:
        raise ValueError("omega/set dimension mismatch")
    if not omega.symmetric:
        raise SymmetryRequired("criterion needs omega symmetric about the origin")
    U = s.reciprocal()  # rows u_1..u_{d-1}
    R = omega.circumradius() + 10 * BOUNDARY_TOL
    G = U @ U.T
    M = 2.0 * np.linalg.inv(G) @ U  # maps a half-sum back to its index vector
    bounds = [int(math.floor(np.linalg.norm(M[i]) * R + 1e-9)) for i in range(len(U))]
    count = 1
    for b in bounds:
        count *= 2 * b + 1
    if count > 10_000_000:
        raise EnumerationOverflow(f"{count} candidate indices exceed the budget")
    worst_slack = np.inf
    worst_m = None
    for m in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if all(mi == 0 for mi in m):
            continue
        y = 0.5 * np.asarray(m, dtype=float) @ U
        if np.linalg.norm(y) > R:
            continue
        slack = omega.boundary_slack(y)
        if slack < worst_slack:
            worst_m = np.array(m, dtype=int)
            lead = np.nonzero(worst_m)[0][0]
            if worst_m[lead] < 0:  # +-m are equivalent witnesses; report one sign
                worst_m = -worst_m
            worst_slack = slack
    basis = "half-sum reciprocal-lattice exclusion"
    if worst_m is None or worst_slack > BOUNDARY_TOL:
        return NyquistVerdict(NYQUIST, basis)
    if worst_slack < -BOUNDARY_TOL:
        return NyquistVerdict(NOT_NYQUIST, basis, witness=worst_m)
    return NyquistVerdict(CRITICAL, basis, witness=worst_m)


def _ball_radius(omega: ConvexBody) -> float:
    if omega.kind != "ball" or np.linalg.norm(omega.center) > BOUNDARY_TOL:
        raise NonIsotropicOmega("covering criterion needs a ball centered at "
                                "the origin")
    return omega.radius


def check_nonaffine(s, omega: ConvexBody) -> NyquistVerdict:
    """Covering-radius sufficiency check for circles and spirals (ball spectra only).

    Certifies SufficientOnly when the spacing condition holds and an
    empirical covering probe of an actual sample construction confirms the
    covering bound; anything else is Unknown because the criterion has no
    necessary direction.
    """
    rho = _ball_radius(omega)
    ceiling = math.pi / (2.0 * rho)

    if isinstance(s, CircleSet):
        gap, label = s.delta, "circle spacing"
    elif isinstance(s, SpiralSet):
        gap, label = s.c / s.n, "spiral pitch per arm"
    else:
        raise TypeError("expected a circle or spiral set")

    basis = "covering-radius sufficiency (ball spectrum)"
    if gap >= math.pi / rho - BOUNDARY_TOL:
        return NyquistVerdict(
            UNKNOWN, basis,
            notes=(f"{label} {gap:.6g} not below pi/rho = {math.pi / rho:.6g}; "
                   "the sufficiency criterion is silent beyond its hypothesis",))

    eps = (ceiling - gap / 2.0) / 2.0
    a = 3.0 * max(gap, math.pi / rho)
    window = Window(np.zeros(2), a + 2.0 * gap)
    batch = sample_points(s, window, eps)
    est = covering_radius(batch.points, window, pitch=eps / 4.0,
                          margin=2.0 * gap)
    if est.value >= ceiling + est.pitch:
        return NyquistVerdict(
            UNKNOWN, basis,
            notes=(f"empirical covering radius {est.value:.6g} (+/- {est.pitch:.2g}) "
                   f"fails the bound {ceiling:.6g}",))
    return NyquistVerdict(SUFFICIENT_ONLY, basis,
                          notes=(_C2_NOTE,
                                 f"covering radius {est.value:.6g} "
                                 f"(pitch {est.pitch:.2g}) below {ceiling:.6g}"))


def check(s, omega: ConvexBody) -> NyquistVerdict:
    """Dispatch to the matching verdict engine for the set type."""
    if isinstance(s, (UniformLines2D, UnionUniform2D)):
        return check_union_uniform_2d(s, omega)
    if isinstance(s, (HyperplaneSet, UnionHyperplanes)):
        return check_hyperplane_union(s, omega)
    if isinstance(s, UniformLinesD):
        return check_uniform_d(s, omega)
    if isinstance(s, (CircleSet, SpiralSet)):
        return check_nonaffine(s, omega)
    raise TypeError(f"no verdict engine for {type(s).__name__}")
