import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radpoly.geometry import (
    Box,
    PointSet,
    Star,
    box_perimeter_points,
    distance_matrix,
    distances,
    grid_boundary_count,
    halton,
    halton_points,
    halton_with_boundary,
    normalization_radii,
    radical_inverse,
    random_points,
    regular_grid,
    star_points,
)


class TestRegularGrid:
    def test_1d_31_points(self):
        ps = regular_grid(31, Box.unit(1))
        np.testing.assert_allclose(ps.points[:, 0], np.arange(31) / 30, atol=1e-15)
        assert ps.n_boundary == 2

    def test_2d_441_has_80_boundary_points(self):
        ps = regular_grid(21, Box.unit(2))
        assert len(ps) == 441
        assert ps.n_boundary == 80 == 4 * 21 - 4
        assert np.all(Box.unit(2).on_boundary(ps.boundary))
        assert not np.any(Box.unit(2).on_boundary(ps.interior))

    def test_two_points_are_both_boundary(self):
        ps = regular_grid(2, Box.unit(1))
        np.testing.assert_array_equal(ps.points[:, 0], [0.0, 1.0])
        assert ps.boundary_mask.all()

    def test_cube(self):
        ps = regular_grid(5, Box.unit(3))
        assert len(ps) == 125
        assert ps.n_boundary == 125 - 27

    def test_rejects_single_point(self):
        with pytest.raises(ValueError):
            regular_grid(1, Box.unit(2))


class TestHalton:
    def test_base2(self):
        np.testing.assert_allclose(halton(3, 1)[:, 0], [0.5, 0.25, 0.75])

    def test_first_points(self):
        np.testing.assert_allclose(halton(1, 2)[0], [1 / 2, 1 / 3])
        np.testing.assert_allclose(halton(1, 3)[0], [1 / 2, 1 / 3, 1 / 5])

    def test_skip_continues_the_stream(self):
        np.testing.assert_array_equal(halton(10, 2)[4:], halton(6, 2, skip=4))

    @given(st.integers(min_value=1, max_value=5000), st.sampled_from([2, 3, 5]))
    def test_radical_inverse_matches_digit_reversal(self, k, base):
        digits = []
        m = k
        while m:
            m, r = divmod(m, base)
            digits.append(r)
        ref = sum(dig * base ** -(i + 1) for i, dig in enumerate(digits))
        assert radical_inverse(k, base) == pytest.approx(ref, rel=1e-14)

    def test_points_strictly_inside_unit_cube(self):
        h = halton(500, 3)
        assert np.all((h > 0) & (h < 1))
        assert len(np.unique(h, axis=0)) == 500

    def test_halton_points_have_no_boundary(self):
        assert halton_points(441, Box.unit(2)).n_boundary == 0

    def test_pde_ring_matches_grid_count(self):
        ps = halton_with_boundary(441, Box.unit(2))
        assert len(ps) == 441
        assert ps.n_boundary == 80 == grid_boundary_count(441, 2)
        assert np.all(Box.unit(2).on_boundary(ps.boundary))
        assert np.all(Box.unit(2).contains(ps.interior, tol=0.0))

    def test_dimension_limit(self):
        with pytest.raises(ValueError):
            halton(4, 4)


def test_perimeter_ring_is_equally_spaced():
    ring = box_perimeter_points(80, Box.unit(2))
    step = np.linalg.norm(np.diff(np.vstack([ring, ring[:1]]), axis=0), axis=1)
    # consecutive points on one side are 4/80 apart; corner hops are shorter diagonals
    assert np.isclose(step.max(), 0.05)
    assert np.all(Box.unit(2).on_boundary(ring))


class TestStar:
    def test_circle_special_case(self):
        ps = star_points(1, Star(base=0.8, amplitude=0.0))
        assert len(ps) == 1
        assert np.hypot(*ps.points[0]) <= 0.8

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=1, max_value=300))
    def test_membership(self, N):
        star = Star()
        ps = star_points(N, star)
        assert len(ps) == N
        r = np.hypot(ps.points[:, 0], ps.points[:, 1])
        th = np.arctan2(ps.points[:, 1], ps.points[:, 0])
        assert np.all(r <= star.radius(th) + 1e-12)
        assert np.all(star.on_boundary(ps.boundary))

    def test_121_deterministic(self):
        a = star_points(121, Star(base=0.8, amplitude=0.2, lobes=5))
        b = star_points(121, Star(base=0.8, amplitude=0.2, lobes=5))
        assert len(a) == 121
        assert a.n_boundary == 40
        np.testing.assert_array_equal(a.points, b.points)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Star(base=0.2, amplitude=0.5)


class TestDistances:
    def test_zero(self):
        np.testing.assert_array_equal(distances([[0.0]], [0.0]), [0.0])

    def test_345(self):
        np.testing.assert_allclose(distances([[0.0, 0.0]], [3.0, 4.0]), [5.0])

    def test_two_centers(self):
        np.testing.assert_allclose(distances([[0.0], [1.0]], [0.25]), [0.25, 0.75])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            distances([[0.0, 0.0]], [1.0, 2.0, 3.0])

    def test_matrix_against_scipy(self, rng):
        from scipy.spatial.distance import cdist

        a, b = rng.random((17, 3)), rng.random((11, 3))
        np.testing.assert_allclose(distance_matrix(a, b), cdist(a, b), rtol=1e-13, atol=1e-15)


class TestNormalizationRadius:
    def test_1d_endpoint(self):
        np.testing.assert_allclose(normalization_radii([[0.0]], Box.unit(1)), [1.0])

    def test_2d_corner(self):
        np.testing.assert_allclose(normalization_radii([[0.0, 0.0]], Box.unit(2)), [math.sqrt(2)])

    def test_1d_midpoint(self):
        np.testing.assert_allclose(normalization_radii([[0.5]], Box.unit(1)), [0.5])

    def test_star_radius_dominates_every_point(self, rng):
        star = Star()
        c = random_points(20, star, rng)
        R = normalization_radii(c, star)
        probe = random_points(2000, star, rng)
        assert np.all(distance_matrix(probe, c).max(axis=0) <= R + 1e-12)


class TestPointSet:
    def test_readonly(self):
        ps = regular_grid(3, Box.unit(2))
        with pytest.raises(ValueError):
            ps.points[0, 0] = 5.0

    def test_mask_length_checked(self):
        with pytest.raises(ValueError):
            PointSet(np.zeros((3, 2)), [True, False], Box.unit(2))

    def test_csv_roundtrip(self, tmp_path):
        ps = halton_with_boundary(441, Box.unit(2))
        path = tmp_path / "pts.csv"
        ps.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(data[:, :2], ps.points)
        np.testing.assert_array_equal(data[:, 2].astype(bool), ps.boundary_mask)


def test_random_points_inside(rng):
    for dom in (Box.unit(3), Star()):
        p = random_points(300, dom, rng)
        assert len(p) == 300
        assert np.all(dom.contains(p))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), st.integers(1, 3))
def test_grid_boundary_count_formula(m, d):
    ps = regular_grid(m, Box.unit(d))
    assert ps.n_boundary == m**d - (m - 2) ** d == grid_boundary_count(m**d, d)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_halton_has_no_collisions(d):
    x = halton(10_000, d)
    assert len(np.unique(x, axis=0)) == 10_000


def test_distances_symmetric(rng):
    a = random_points(30, Box.unit(3), rng)
    b = random_points(20, Box.unit(3), rng)
    np.testing.assert_array_equal(distance_matrix(a, b), distance_matrix(b, a).T)
