from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projdim.geometry import (
    ConvexPolytope,
    Simplex,
    hyperplane_basis,
    image_simplex,
    inner_neighborhood_volume,
    inner_neighborhood_volume_upper,
    standard_simplex,
    to_plane,
    volume_ratio,
)


def _random_simplex(rng: np.random.Generator, d: int, min_inradius: float = 0.02) -> Simplex:
    """Random d-simplex on the unit-sum hyperplane, re-drawn while too thin."""
    basis = hyperplane_basis(d + 1)
    while True:
        planar = rng.normal(size=(d + 1, d))
        s = Simplex(planar @ basis.T + 1.0 / (d + 1))
        if not s.is_degenerate and s.inradius >= min_inradius:
            return s


def test_standard_simplex_measures_match_closed_forms():
    for d in (2, 3, 4):
        s = standard_simplex(d)
        assert abs(s.volume - math.sqrt(d + 1) / math.factorial(d)) < 1e-12
    tri = standard_simplex(2)
    assert abs(tri.perimeter - 3.0 * math.sqrt(2.0)) < 1e-12
    assert abs(tri.inradius - 1.0 / math.sqrt(6.0)) < 1e-12
    assert np.allclose(tri.incentre, [1 / 3, 1 / 3, 1 / 3], atol=1e-14)


def test_inradius_is_dim_times_volume_over_surface():
    rng = np.random.default_rng(7)
    for d in (2, 3, 4):
        s = _random_simplex(rng, d)
        assert math.isclose(s.inradius, d * s.volume / s.perimeter, rel_tol=1e-12)


def test_halfspace_distance_vanishes_on_vertices_and_peaks_at_incentre():
    rng = np.random.default_rng(11)
    s = _random_simplex(rng, 3)
    dist = s.distance_to_boundary(s.vertices)
    assert np.abs(dist).max() < 1e-9
    assert math.isclose(s.distance_to_boundary(s.incentre[None, :])[0], s.inradius,
                        rel_tol=1e-9)


def test_barycentric_coordinates_partition_unity():
    rng = np.random.default_rng(3)
    s = _random_simplex(rng, 2)
    pts = s.sample_uniform(200, rng)
    bary = s.barycentric(pts)
    assert np.allclose(bary.sum(axis=1), 1.0, atol=1e-9)
    assert (bary > -1e-9).all()
    assert s.contains(pts).all()


def test_uniform_samples_fill_the_simplex():
    rng = np.random.default_rng(5)
    s = standard_simplex(2)
    pts = s.sample_uniform(20_000, rng)
    # mean of a uniform draw is the centroid
    assert np.abs(pts.mean(axis=0) - 1.0 / 3.0).max() < 5e-3


def test_scaling_about_incentre_scales_volume_and_inradius():
    rng = np.random.default_rng(9)
    s = _random_simplex(rng, 3)
    t = s.scaled_about_incentre(0.5)
    assert math.isclose(t.volume, s.volume * 0.5 ** 3, rel_tol=1e-12)
    assert math.isclose(t.inradius, s.inradius * 0.5, rel_tol=1e-12)
    assert np.allclose(t.incentre, s.incentre, atol=1e-12)


def test_inner_band_volume_matches_shrunk_complement():
    rng = np.random.default_rng(13)
    for d in (2, 3):
        s = _random_simplex(rng, d)
        eps = 0.4 * s.inradius
        band = inner_neighborhood_volume(s, eps)
        shrunk = s.scaled_about_incentre(1.0 - eps / s.inradius)
        assert math.isclose(band, s.volume - shrunk.volume, rel_tol=1e-12)


def test_inner_band_volume_edge_cases():
    s = standard_simplex(2)
    assert inner_neighborhood_volume(s, 0.0) == 0.0
    assert math.isclose(inner_neighborhood_volume(s, s.inradius), s.volume,
                        rel_tol=1e-12)
    assert math.isclose(inner_neighborhood_volume(s, 10.0), s.volume, rel_tol=1e-12)


def test_inner_band_volume_is_concave_in_eps():
    s = standard_simplex(3)
    eps = np.linspace(0.0, s.inradius, 20)
    vals = np.array([inner_neighborhood_volume(s, e) for e in eps])
    diffs = np.diff(vals)
    assert (diffs >= -1e-15).all()
    assert (np.diff(diffs) <= 1e-12).all()


@given(st.floats(min_value=0.01, max_value=0.99))
@settings(max_examples=40, deadline=None)
def test_inner_band_fraction_depends_only_on_eps_over_inradius(frac):
    s2 = standard_simplex(2).scaled_about_incentre(0.37)
    band = inner_neighborhood_volume(s2, frac * s2.inradius)
    assert math.isclose(band / s2.volume, 1.0 - (1.0 - frac) ** 2, rel_tol=1e-10)


def test_image_simplex_volume_agrees_with_ratio(rauzy):
    s = standard_simplex(2)
    n = rauzy.generators[0]
    img = image_simplex(n, s)
    ratio = volume_ratio(n, s)
    assert math.isclose(img.volume, ratio * s.volume, rel_tol=1e-12)
    assert abs(img.vertices.sum(axis=1) - 1.0).max() < 1e-12


def test_degenerate_simplex_is_flagged():
    v = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.5, 0.5, 0.0]])
    s = Simplex(v)
    assert s.is_degenerate


def test_to_plane_preserves_distances():
    rng = np.random.default_rng(21)
    basis = hyperplane_basis(4)
    planar = rng.normal(size=(6, 3))
    ambient = planar @ basis.T + 0.25
    back = to_plane(ambient)
    assert np.allclose(back, planar, atol=1e-12)
    d_amb = np.linalg.norm(ambient[0] - ambient[1])
    d_pl = np.linalg.norm(back[0] - back[1])
    assert math.isclose(d_amb, d_pl, rel_tol=1e-12)


def test_polytope_volume_and_containment_on_a_square():
    basis = hyperplane_basis(3)
    planar = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]])
    poly = ConvexPolytope(planar @ basis.T + 1.0 / 3.0)
    assert math.isclose(poly.volume, 2.0, rel_tol=1e-12)
    assert math.isclose(poly.surface_measure, 6.0, rel_tol=1e-12)
    inside = np.array([[1.0, 0.5]]) @ basis.T + 1.0 / 3.0
    outside = np.array([[3.0, 0.5]]) @ basis.T + 1.0 / 3.0
    assert poly.contains(inside).all()
    assert not poly.contains(outside).any()


def test_polytope_sampling_stays_inside():
    rng = np.random.default_rng(2)
    s = standard_simplex(2)
    poly = ConvexPolytope(s.vertices)
    pts = poly.sample_uniform(500, rng)
    assert poly.contains(pts).all()
    assert math.isclose(poly.volume, s.volume, rel_tol=1e-12)


def test_upper_band_volume_matches_simplex_band_on_simplices():
    s = standard_simplex(2)
    poly = ConvexPolytope(s.vertices)
    eps = 0.2
    upper = inner_neighborhood_volume_upper(poly, eps)
    exact = inner_neighborhood_volume(s, eps)
    assert math.isclose(upper, exact, rel_tol=1e-8)
    assert inner_neighborhood_volume_upper(s, eps) == exact
