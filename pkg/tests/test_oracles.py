from __future__ import annotations

import math

import numpy as np
import pytest

from projdim.geometry import (
    ConvexPolytope,
    Simplex,
    hyperplane_basis,
    inner_neighborhood_volume,
    standard_simplex,
)
from projdim.oracles import (
    chebyshev_center,
    grid_box_count,
    mc_inner_volume,
    projective_orbit_cloud,
    quadrature_laplace,
    sierpinski_cloud,
    to_equilateral,
)


def _random_simplex(rng: np.random.Generator, d: int) -> Simplex:
    basis = hyperplane_basis(d + 1)
    while True:
        planar = rng.normal(size=(d + 1, d))
        s = Simplex(planar @ basis.T + 1.0 / (d + 1))
        if not s.is_degenerate and s.inradius >= 0.02:
            return s


def test_chebyshev_center_of_the_standard_triangle():
    point, radius = chebyshev_center(standard_simplex(2))
    assert np.allclose(point, [1 / 3, 1 / 3, 1 / 3], atol=1e-9)
    assert abs(radius - 1.0 / math.sqrt(6.0)) < 1e-9


def test_chebyshev_radius_matches_heron_inradius_on_random_simplices():
    rng = np.random.default_rng(17)
    for d in (2, 3, 4):
        for _ in range(25):
            s = _random_simplex(rng, d)
            point, radius = chebyshev_center(s)
            assert abs(radius - s.inradius) <= 1e-8 * s.inradius
            assert s.contains(point[None, :]).all()
            gap = s.distance_to_boundary(point[None, :])[0]
            assert abs(gap - radius) <= 1e-8 * radius


def test_chebyshev_radius_of_a_rectangle_is_half_the_short_side():
    basis = hyperplane_basis(3)
    planar = np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [0.0, 1.0]])
    poly = ConvexPolytope(planar @ basis.T + 1.0 / 3.0)
    point, radius = chebyshev_center(poly)
    assert abs(radius - 0.5) < 1e-9
    assert poly.contains(point[None, :]).all()


def test_mc_inner_volume_matches_the_closed_form():
    s = standard_simplex(2)
    eps = s.inradius / 2.0
    est = mc_inner_volume(s, eps, samples=400_000, seed=3)
    exact = inner_neighborhood_volume(s, eps)
    assert math.isclose(exact, 0.75 * s.volume, rel_tol=1e-12)
    assert abs(est.value - exact) <= 3.0 * est.standard_error
    assert est.standard_error < 0.01 * s.volume


def test_mc_inner_volume_edge_cases():
    s = standard_simplex(2)
    zero = mc_inner_volume(s, 0.0, samples=20_000, seed=0)
    assert zero.value == 0.0
    assert zero.standard_error == 0.0
    full = mc_inner_volume(s, s.inradius * 1.01, samples=20_000, seed=0)
    assert math.isclose(full.value, s.volume, rel_tol=1e-12)
    with pytest.raises(ValueError):
        mc_inner_volume(s, -0.1, samples=20_000)
    with pytest.raises(ValueError):
        mc_inner_volume(s, 0.1, samples=999)


def test_mc_inner_volume_is_reproducible_under_a_seed():
    s = standard_simplex(3)
    a = mc_inner_volume(s, 0.1, samples=50_000, seed=11)
    b = mc_inner_volume(s, 0.1, samples=50_000, seed=11)
    c = mc_inner_volume(s, 0.1, samples=50_000, seed=12)
    assert a.value == b.value
    assert a.standard_error == b.standard_error
    assert a.value != c.value


def test_mc_inner_volume_rejects_degenerate_regions():
    flat = Simplex(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.5, 0.5, 0.0]]))
    with pytest.raises(ValueError):
        mc_inner_volume(flat, 0.1, samples=20_000)


def test_grid_box_count_recovers_plane_and_line_dimensions():
    rng = np.random.default_rng(8)
    eps = [2.0 ** -k for k in range(4, 9)]
    square = rng.random((150_000, 2))
    rep = grid_box_count(square, eps)
    assert abs(rep.slope - 2.0) < 0.1
    line = np.column_stack([np.linspace(0, 1, 150_000), np.zeros(150_000)])
    rep = grid_box_count(line, eps)
    assert abs(rep.slope - 1.0) < 0.05
    assert all(a <= b for a, b in zip(rep.counts, rep.counts[1:]))


def test_grid_box_count_validates_inputs():
    pts = np.random.default_rng(0).random((150_000, 2))
    with pytest.raises(ValueError):
        grid_box_count(pts[:500], [0.5, 0.25, 0.125, 0.0625])
    with pytest.raises(ValueError):
        grid_box_count(pts, [0.5, 0.25, 0.125])
    with pytest.raises(ValueError):
        grid_box_count(pts, [0.5, 0.25, 0.125, 1.5])


def test_quadrature_laplace_tracks_the_closed_form(rauzy):
    from projdim.series import laplace_transform_closed
    from projdim.words import MaxDepth

    value, err = quadrature_laplace(rauzy, 1.0, 5)
    closed = laplace_transform_closed(rauzy, 1.0, MaxDepth(5))
    assert err < 1e-7
    assert abs(value - closed) <= max(1e-8 * abs(closed), 10.0 * err)
    with pytest.raises(ValueError):
        quadrature_laplace(rauzy, 0.0, 4)


def test_sierpinski_cloud_is_deterministic_and_in_range():
    a = sierpinski_cloud(50_000, seed=5)
    b = sierpinski_cloud(50_000, seed=5)
    assert np.array_equal(a, b)
    assert a.shape == (50_000, 2)
    assert a.min() >= 0.0
    assert a.max() <= 1.0


def test_projective_orbit_cloud_stays_on_the_simplex(rauzy):
    cloud = projective_orbit_cloud(rauzy, 50_000, seed=7)
    assert cloud.shape == (50_000, 3)
    assert np.abs(cloud.sum(axis=1) - 1.0).max() < 1e-9
    assert cloud.min() >= 0.0
    again = projective_orbit_cloud(rauzy, 50_000, seed=7)
    assert np.array_equal(cloud, again)


def test_to_equilateral_maps_vertices_to_triangle_corners():
    corners = to_equilateral(np.eye(3))
    expected = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    order = np.lexsort((corners[:, 1], corners[:, 0]))
    assert np.allclose(corners[order], expected[np.lexsort((expected[:, 1],
                                                            expected[:, 0]))],
                       atol=1e-12)
