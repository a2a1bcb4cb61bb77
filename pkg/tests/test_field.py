import itertools
import math

import numpy as np
import pytest

from trajsamp.errors import (EmptyInterior, EpsTooCoarse, NearCosetAmbiguity,
                             ReconstructionImpossible, UnitCellPresent)
from trajsamp.field import (AliasSystem, AtomField, HyperplaneCarrier,
                            LineCarrier, alias_atoms, evaluate, evaluate_grid,
                            find_unit_cell, lattice_convex_hull, lstsq_decode,
                            make_field, reconstruct_and_error,
                            restriction_band, sample_on_set, unfold_decode,
                            vanishing_field)
from trajsamp.geometry import ConvexBody, fits_in_translate
from trajsamp.trajectory import (UniformLines2D, UnionUniform2D, Window,
                                 reciprocal_and_qset, sample_points)

from conftest import ORTHO_CRIT_DISC, TRIANGLE_CRIT, orthogonal_union


# ------------------------------------------------------------------ fields


def test_make_field_deterministic(unit_disc):
    f1 = make_field(unit_disc, 8, 0.1, seed=5)
    f2 = make_field(unit_disc, 8, 0.1, seed=5)
    assert np.array_equal(f1.omegas, f2.omegas)
    assert np.array_equal(f1.coeffs, f2.coeffs)
    f3 = make_field(unit_disc, 8, 0.1, seed=6)
    assert not np.array_equal(f1.omegas, f3.omegas)


def test_make_field_respects_margin(unit_disc):
    f = make_field(unit_disc, 32, 0.1, seed=1)
    # width 2, margin 0.1 -> atoms within radius 0.8
    assert np.linalg.norm(f.omegas, axis=1).max() <= 0.8 + 1e-12


def test_make_field_zero_atoms(unit_disc):
    f = make_field(unit_disc, 0, 0.1, seed=0)
    assert evaluate(f, [0.3, -0.2]) == 0


def test_make_field_margin_too_big(triangle):
    # triangle inradius ~0.414 < 0.45 * width, so the inset empties it
    with pytest.raises((EmptyInterior, ValueError)):
        make_field(triangle, 4, 0.45, seed=0)


def test_evaluate_single_atom(unit_disc):
    f = AtomField(np.array([[0.3, 0.1]]), np.array([1.0 + 0j]), unit_disc)
    assert evaluate(f, [0.0, 0.0]) == pytest.approx(1.0)


def test_evaluate_sine_identity(unit_disc):
    om = np.array([0.4, -0.2])
    f = AtomField(np.array([om, -om]),
                  np.array([1.0 / 2j, -1.0 / 2j]), unit_disc)
    rng = np.random.default_rng(2)
    for _ in range(10):
        r = rng.normal(size=2) * 3
        assert evaluate(f, r) == pytest.approx(math.sin(om @ r), abs=1e-12)


def test_atoms_must_be_distinct(unit_disc):
    om = np.array([[0.1, 0.2], [0.1, 0.2]])
    with pytest.raises(ValueError):
        AtomField(om, np.array([1.0, 2.0], dtype=complex), unit_disc)


def test_atoms_must_be_inside(unit_disc):
    with pytest.raises(ValueError):
        AtomField(np.array([[2.0, 0.0]]), np.array([1.0 + 0j]), unit_disc)


# -------------------------------------------------------- restriction bands


def test_band_ball_line(unit_disc):
    lo, hi = restriction_band(unit_disc, LineCarrier([1.0, 0.0]))
    assert (lo, hi) == pytest.approx((-1.0, 1.0))


def test_band_triangle_vertical(triangle):
    lo, hi = restriction_band(triangle, LineCarrier([0.0, 1.0]))
    assert (lo, hi) == pytest.approx((0.0, 1.0))


def test_band_ball3_plane(ball3):
    A = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    proj = restriction_band(ball3, HyperplaneCarrier(A))
    assert proj.kind == "ball" and proj.dim == 2
    assert proj.radius == pytest.approx(1.0)


def test_band_field_line(unit_disc):
    f = make_field(unit_disc, 16, 0.05, seed=3)
    lo, hi = restriction_band(f, LineCarrier([1.0, 0.0]))
    blo, bhi = restriction_band(unit_disc, LineCarrier([1.0, 0.0]))
    assert blo <= lo <= hi <= bhi


# --------------------------------------------------------------- sampling


def test_sample_on_set_values(unit_disc):
    f = make_field(unit_disc, 6, 0.1, seed=4)
    s = UniformLines2D(np.zeros(2), np.array([1.0, 0.0]), 2.0)
    batch = sample_on_set(f, s, Window(np.zeros(2), 4.0), 0.5)
    for k in range(0, len(batch), 7):
        assert batch.values[k] == pytest.approx(evaluate(f, batch.points[k]))


def test_sample_eps_too_coarse(unit_disc):
    f = make_field(unit_disc, 4, 0.1, seed=4)
    s = UniformLines2D(np.zeros(2), np.array([1.0, 0.0]), 2.0)
    with pytest.raises(EpsTooCoarse) as exc:
        sample_on_set(f, s, Window(np.zeros(2), 4.0), 10.0)
    assert exc.value.bound == pytest.approx(math.pi)


def test_line_samples_spectrum_in_band(unit_disc):
    # discrete spectrum of samples along a line stays inside the band
    f = make_field(unit_disc, 10, 0.05, seed=8)
    v = np.array([math.cos(0.3), math.sin(0.3)])
    eps = 0.8
    n = 4096
    t = np.arange(n) * eps
    pts = t[:, None] * v[None, :]
    sig = evaluate_grid(f, pts) * np.hanning(n)
    spec = np.fft.fftshift(np.fft.fft(sig))
    freqs = np.fft.fftshift(np.fft.fftfreq(n, d=eps)) * 2.0 * math.pi
    lo, hi = restriction_band(unit_disc, LineCarrier(v))
    guard = 4 * (2.0 * math.pi / (n * eps))  # window mainlobe width
    outside = (freqs < lo - guard) | (freqs > hi + guard)
    floor = np.abs(spec[outside]).max() / np.abs(spec).max()
    assert floor < 1e-3  # -60 dB leakage floor


# ------------------------------------------------------------ alias systems


def test_unaliased_atoms_singletons(unit_disc):
    union = orthogonal_union(0.9 * ORTHO_CRIT_DISC)
    f = make_field(unit_disc, 9, 0.05, seed=11)
    systems = alias_atoms(f, union)
    assert sum(len(s.occupied) for s in systems) == 9
    assert all(len(s.indices) == 1 for s in systems)


def _triangle_union(scale=0.95):
    d = scale * TRIANGLE_CRIT
    return orthogonal_union(2 * d, d)


def test_aliased_pair_system(triangle):
    union = _triangle_union()
    U, _ = reciprocal_and_qset(union)
    om = np.array([0.35, 0.05])
    f = AtomField(np.array([om, om + U[:, 0]]),
                  np.array([1.0 + 1j, -2.0 + 0.5j]), triangle)
    systems = alias_atoms(f, union)
    assert len(systems) == 1
    assert len(systems[0].indices) == 2
    assert systems[0].unit_cell_witness is None


def test_near_coset_refused(triangle):
    union = _triangle_union()
    U, _ = reciprocal_and_qset(union)
    om = np.array([0.35, 0.05])
    off = U[:, 0] + np.array([0.0, 3e-8])
    f = AtomField(np.array([om, om + off]),
                  np.array([1.0 + 0j, 1.0 + 0j]), triangle)
    with pytest.raises(NearCosetAmbiguity):
        alias_atoms(f, union)


def test_lattice_convex_hull_fills_segments():
    hull = lattice_convex_hull({(0, 0), (3, 0)})
    assert hull == {(0, 0), (1, 0), (2, 0), (3, 0)}
    hull = lattice_convex_hull({(0, 0), (2, 2)})
    assert hull == {(0, 0), (1, 1), (2, 2)}


def test_find_unit_cell():
    assert find_unit_cell({(0, 0), (1, 0), (0, 1), (1, 1)}, 2) is not None
    assert find_unit_cell({(0, 0), (1, 0), (0, 1)}, 2) is None
    assert find_unit_cell({(4,), (5,)}, 1) is not None


# ----------------------------------------------------------------- decoding


def _random_system(rng, n_axes=2, max_extent=4):
    """Random lattice-convex decodable system with genuine translation phases."""
    d = 2 if n_axes <= 2 else n_axes
    while True:
        seeds = {tuple(int(x) for x in rng.integers(0, max_extent, size=n_axes))
                 for _ in range(int(rng.integers(2, 7)))}
        hull = lattice_convex_hull(seeds)
        if len(hull) <= 12 and find_unit_cell(hull, n_axes) is None:
            break
    U = rng.normal(size=(d, n_axes)) * 2.0
    while np.linalg.matrix_rank(U) < n_axes:
        U = rng.normal(size=(d, n_axes)) * 2.0
    offsets = rng.normal(size=(n_axes, d))
    omega0 = rng.normal(size=d)
    values = {n: complex(*rng.normal(size=2)) for n in hull}
    sys = AliasSystem(omega0=omega0, U=U, offsets=offsets,
                      indices=sorted(hull), occupied=values)
    sys.build_measurements()
    return sys, values


def test_peeling_matches_truth_and_lstsq():
    rng = np.random.default_rng(101)
    for _ in range(60):
        sys, truth = _random_system(rng)
        solved = unfold_decode(sys)
        oracle, resid = lstsq_decode(sys)
        assert resid < 1e-9
        for n in sys.indices:
            assert solved[n] == pytest.approx(truth[n], abs=1e-9)
            assert solved[n] == pytest.approx(oracle[n], abs=1e-9)


def test_peeling_three_axes():
    rng = np.random.default_rng(55)
    for _ in range(10):
        sys, truth = _random_system(rng, n_axes=3, max_extent=3)
        solved = unfold_decode(sys)
        for n in sys.indices:
            assert solved[n] == pytest.approx(truth[n], abs=1e-8)


def test_singleton_system_direct():
    rng = np.random.default_rng(7)
    sys, truth = _random_system(rng)
    # restrict to one index artificially
    n0 = sys.indices[0]
    sys2 = AliasSystem(omega0=sys.omega0, U=sys.U, offsets=sys.offsets,
                       indices=[n0], occupied={n0: truth[n0]})
    sys2.build_measurements()
    out = unfold_decode(sys2)
    assert out[n0] == pytest.approx(truth[n0])


def _cell_system(rng):
    """System whose occupied set is a full binary cell, with genuine phases."""
    U = rng.normal(size=(2, 2)) * 2.0
    while abs(np.linalg.det(U)) < 0.5:
        U = rng.normal(size=(2, 2)) * 2.0
    offsets = rng.normal(size=(2, 2))
    omega0 = rng.normal(size=2)
    cell = [(0, 0), (1, 0), (0, 1), (1, 1)]
    values = {n: complex(*rng.normal(size=2)) for n in cell}
    sys = AliasSystem(omega0=omega0, U=U, offsets=offsets, indices=cell,
                      occupied=values)
    sys.build_measurements()
    return sys


def test_unit_cell_raises_and_rank_deficient():
    rng = np.random.default_rng(202)
    for _ in range(20):
        sys = _cell_system(rng)
        with pytest.raises(UnitCellPresent):
            unfold_decode(sys)
        A, rhs, _ = sys.dense()
        sv = np.linalg.svd(A, compute_uv=False)
        assert sv[-1] < 1e-10 * sv[0]


def test_phase_covariance():
    # shifting every family offset by t leaves recovered magnitudes unchanged
    rng = np.random.default_rng(77)
    sys, truth = _random_system(rng)
    t = rng.normal(size=sys.offsets.shape[1])
    shifted = AliasSystem(omega0=sys.omega0, U=sys.U,
                          offsets=sys.offsets + t[None, :],
                          indices=list(sys.indices), occupied=dict(sys.occupied))
    shifted.build_measurements()
    a = unfold_decode(sys)
    b = unfold_decode(shifted)
    for n in sys.indices:
        assert abs(a[n]) == pytest.approx(abs(b[n]), abs=1e-9)
        assert a[n] == pytest.approx(truth[n], abs=1e-9)
        assert b[n] == pytest.approx(truth[n], abs=1e-9)


def test_decodability_matches_translate_fit(unit_disc):
    # occupied pattern decodes iff the matching sign pattern fails to fit:
    # randomized agreement between the decoder and the geometric criterion
    rng = np.random.default_rng(303)
    for _ in range(20):
        delta = float(rng.uniform(3.0, 6.5))
        union = orthogonal_union(delta)
        U, Q = reciprocal_and_qset(union)
        fit = fits_in_translate(Q, unit_disc)
        if fit.status == "boundary":
            continue
        if fit.status == "fits":
            center = -fit.shift - 0.5 * (U[:, 0] + U[:, 1])
            corners = [center, center + U[:, 0], center + U[:, 1],
                       center + U[:, 0] + U[:, 1]]
            if max(unit_disc.boundary_slack(c) for c in corners) > -1e-9:
                continue
            f = AtomField(np.array(corners),
                          (rng.normal(size=4) + 1j * rng.normal(size=4)),
                          unit_disc)
            systems = alias_atoms(f, union)
            assert any(s.unit_cell_witness is not None for s in systems)
        else:
            # certified: any atoms we can fit inside decode fine
            f = make_field(unit_disc, 8, 0.05, seed=int(rng.integers(1e6)))
            systems = alias_atoms(f, union)
            for s in systems:
                solved = unfold_decode(s)
                for n, c in s.occupied.items():
                    assert solved[n] == pytest.approx(c, abs=1e-9)


# ------------------------------------------------------------ reconstruction


def test_reconstruct_zero_field(unit_disc):
    f = make_field(unit_disc, 0, 0.1, seed=0)
    union = orthogonal_union(0.9 * ORTHO_CRIT_DISC)
    rep = reconstruct_and_error(f, union, Window(np.zeros(2), 6.0), 0.5,
                                probe_per_axis=16)
    assert rep.sup_error == 0.0 and rep.rms_error == 0.0


def test_reconstruct_random_fields_exact(unit_disc):
    union = orthogonal_union(0.99 * ORTHO_CRIT_DISC)
    for seed in range(5):
        f = make_field(unit_disc, 12, 0.05, seed=seed)
        rep = reconstruct_and_error(f, union, Window(np.zeros(2), 8.0), 0.5,
                                    probe_per_axis=24)
        assert rep.certified
        assert rep.sup_error < 1e-8 * f.coeff_scale()


def test_reconstruct_doubly_aliased_triangle(triangle):
    union = _triangle_union(0.95)
    U, _ = reciprocal_and_qset(union)
    om = np.array([0.35, 0.05])
    freqs = np.array([om, om + U[:, 0], om + U[:, 1]])
    coeffs = np.array([1.0 + 0.5j, -0.25 + 1.0j, 0.3 - 0.2j])
    f = AtomField(freqs, coeffs, triangle)
    rep = reconstruct_and_error(f, union, Window(np.zeros(2), 9.0), 0.4,
                                probe_per_axis=24)
    assert rep.certified
    assert rep.sup_error < 1e-8 * f.coeff_scale()


def test_reconstruct_impossible_unit_cell(triangle):
    union = _triangle_union(1.05)
    U, Q = reciprocal_and_qset(union)
    fit = fits_in_translate(Q, triangle)
    assert fit.status == "fits"
    center = -fit.shift - 0.5 * (U[:, 0] + U[:, 1])
    corners = np.array([center, center + U[:, 0], center + U[:, 1],
                        center + U[:, 0] + U[:, 1]])
    f = AtomField(corners, np.array([1.0, 0.5j, -0.3 + 0j, 0.2 - 0.1j]),
                  triangle)
    with pytest.raises(ReconstructionImpossible):
        reconstruct_and_error(f, union, Window(np.zeros(2), 9.0), 0.4,
                              probe_per_axis=16)


def test_reconstruct_uncertified_still_runs(unit_disc):
    union = orthogonal_union(1.05 * ORTHO_CRIT_DISC)
    f = make_field(unit_disc, 5, 0.05, seed=9)
    rep = reconstruct_and_error(f, union, Window(np.zeros(2), 8.0), 0.5,
                                probe_per_axis=16)
    assert not rep.certified
    assert rep.verdict_status == "not_nyquist"
    # generic atoms do not collide, so recovery happens to succeed anyway
    assert rep.sup_error < 1e-8 * f.coeff_scale()


def test_reconstruct_lines_3d(ball3):
    from conftest import rectangular_lines_3d

    s = rectangular_lines_3d(0.9 * math.pi, 0.9 * math.pi)
    f = make_field(ball3, 6, 0.05, seed=13)
    rep = reconstruct_and_error(f, s, Window(np.zeros(3), 5.0), 0.6,
                                probe_per_axis=12)
    assert rep.certified
    assert rep.sup_error < 1e-8 * f.coeff_scale()


def test_reconstruct_hyperplanes(ball3):
    from conftest import orthogonal_planes

    union = orthogonal_planes(2, 0.95 * math.sqrt(2.0) * math.pi)
    f = make_field(ball3, 6, 0.05, seed=14)
    rep = reconstruct_and_error(f, union, Window(np.zeros(3), 5.0), 0.6,
                                probe_per_axis=12)
    assert rep.certified
    assert rep.sup_error < 1e-8 * f.coeff_scale()


# -------------------------------------------------------------- null fields


def test_vanishing_field_structure(unit_disc):
    union = orthogonal_union(1.1 * ORTHO_CRIT_DISC)
    nf = vanishing_field(union, np.zeros(2), unit_disc)
    assert nf.n_atoms == 4
    batch = sample_points(union, Window(np.zeros(2), 15.0), 1.0)
    assert np.abs(evaluate_grid(nf, batch.points)).max() < 1e-12
