import math

import mpmath
import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from radpoly.basis import make_monomial_basis
from radpoly.geometry import Box, PointSet, random_points
from radpoly.linalg import (
    SingularMatrixError,
    cond2,
    gauss_legendre,
    lstsq_qr,
    numerical_rank,
    solve_dense,
    tensor_rule,
)


class TestSolveDense:
    def test_identity(self, rng):
        b = rng.standard_normal(6)
        x, res = solve_dense(np.eye(6), b)
        np.testing.assert_array_equal(x, b)
        assert res == 0.0

    def test_diagonal(self):
        x, _ = solve_dense(np.diag([2.0, 4.0]), np.array([2.0, 8.0]))
        np.testing.assert_allclose(x, [1.0, 2.0])

    def test_random_well_conditioned(self, rng):
        A = rng.standard_normal((50, 50)) + 50 * np.eye(50)
        x_true = rng.standard_normal(50)
        x, res = solve_dense(A, A @ x_true)
        assert res < 1e-10
        np.testing.assert_allclose(x, x_true, rtol=1e-10)

    def test_exactly_singular(self):
        with pytest.raises(SingularMatrixError):
            solve_dense(np.zeros((3, 3)), np.ones(3))

    def test_rcond_threshold(self):
        A = np.diag([1.0, 1e-17])
        with pytest.raises(SingularMatrixError):
            solve_dense(A, np.ones(2), rcond_min=np.finfo(float).eps)

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            solve_dense(np.zeros((2, 3)), np.ones(2))
        with pytest.raises(ValueError):
            solve_dense(np.eye(2), np.ones(3))


class TestLstsq:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=40), st.integers(min_value=0, max_value=2**31))
    def test_matches_lu_on_nonsingular_squares(self, n, seed):
        r = np.random.default_rng(seed)
        A = r.standard_normal((n, n)) + n * np.eye(n)
        b = r.standard_normal(n)
        x_qr, rank = lstsq_qr(A, b)
        x_lu, _ = solve_dense(A, b)
        assert rank == n
        np.testing.assert_allclose(x_qr, x_lu, rtol=1e-10, atol=1e-10)

    def test_duplicated_column_gives_min_norm(self, rng):
        a = rng.standard_normal(10)
        B = rng.standard_normal((10, 2))
        A = np.column_stack([a, a, B])
        b = rng.standard_normal(10)
        x, rank = lstsq_qr(A, b)
        assert rank == 3
        assert np.all(np.isfinite(x))
        assert x[0] == pytest.approx(x[1], rel=1e-10)
        np.testing.assert_allclose(x, np.linalg.pinv(A) @ b, rtol=1e-9)

    def test_overdetermined_consistent(self, rng):
        A = rng.standard_normal((80, 12))
        x_true = rng.standard_normal(12)
        x, _ = lstsq_qr(A, A @ x_true)
        assert np.linalg.norm(A @ x - A @ x_true) / np.linalg.norm(A @ x_true) < 1e-12

    def test_underdetermined_rejected(self):
        with pytest.raises(ValueError):
            lstsq_qr(np.zeros((2, 3)), np.zeros(2))


class TestConditioning:
    def test_identity(self):
        assert cond2(np.eye(7)) == 1.0

    def test_diagonal(self):
        assert cond2(np.diag([10.0, 0.1])) == pytest.approx(100.0)

    def test_hilbert5_against_high_precision_svd(self):
        mpmath.mp.dps = 40
        H = mpmath.hilbert(5)
        s = mpmath.svd_r(H, compute_uv=False)
        ref = float(max(s) / min(s))
        got = cond2(sla.hilbert(5))
        assert got == pytest.approx(ref, rel=1e-2)
        assert got == pytest.approx(4.766e5, rel=1e-3)

    def test_singular_is_infinite(self):
        assert cond2(np.zeros((3, 3))) == math.inf

    def test_rank_identity_and_outer(self, rng):
        assert numerical_rank(np.eye(6)) == 6
        u, v = rng.standard_normal(8), rng.standard_normal(5)
        assert numerical_rank(np.outer(u, v)) == 1

    def test_rank_of_h2_generators(self, rng):
        box = Box((-1.0, -1.0), (1.0, 1.0))
        c = random_points(30, box, rng)
        fam = make_monomial_basis(PointSet(c, np.zeros(30, bool), box), 2, radii=1.0)
        assert numerical_rank(fam.matrix(random_points(200, box, rng))) == 9

    def test_rank_tolerance_range(self):
        with pytest.raises(ValueError):
            numerical_rank(np.eye(2), rel_tol=0.0)


class TestGaussLegendre:
    def test_m1(self):
        r = gauss_legendre(1)
        np.testing.assert_allclose(r.nodes, [0.0], atol=1e-16)
        np.testing.assert_allclose(r.weights, [2.0])

    def test_m2(self):
        r = gauss_legendre(2)
        np.testing.assert_allclose(np.sort(r.nodes), [-1 / math.sqrt(3), 1 / math.sqrt(3)])
        np.testing.assert_allclose(r.weights, [1.0, 1.0])

    def test_m3(self):
        r = gauss_legendre(3)
        order = np.argsort(r.nodes)
        np.testing.assert_allclose(r.nodes[order], [-math.sqrt(0.6), 0.0, math.sqrt(0.6)], atol=1e-15)
        np.testing.assert_allclose(r.weights[order], [5 / 9, 8 / 9, 5 / 9])

    @pytest.mark.parametrize("m", range(1, 31))
    def test_exact_through_degree_2m_minus_1(self, m):
        r = gauss_legendre(m)
        for k in range(2 * m):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert np.dot(r.weights, r.nodes**k) == pytest.approx(exact, abs=1e-13)

    def test_not_exact_at_degree_2m(self):
        r = gauss_legendre(4)
        assert abs(np.dot(r.weights, r.nodes**8) - 2 / 9) > 1e-6

    def test_scaled_interval(self):
        r = gauss_legendre(5).scaled(0.0, 3.0)
        assert np.dot(r.weights, r.nodes**4) == pytest.approx(3.0**5 / 5)

    def test_tensor_rule_volume_and_moment(self):
        nodes, w = tensor_rule((0.0, -1.0), (2.0, 1.0), 6)
        assert nodes.shape == (36, 2)
        assert w.sum() == pytest.approx(4.0)
        assert np.dot(w, nodes[:, 0] ** 3 * nodes[:, 1] ** 2) == pytest.approx(4.0 * 2.0 / 3.0)

    def test_range(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)


def test_cond2_of_orthogonal_factor(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((60, 60)))
    assert cond2(Q) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("log_cond", [0, 2, 4, 6, 8])
def test_solve_dense_backward_accurate(log_cond, rng):
    # A = U diag(sigma) V^T with prescribed condition number
    n = 50
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = U @ np.diag(np.logspace(0, -log_cond, n)) @ V.T
    b = rng.standard_normal(n)
    x, _ = solve_dense(A, b)
    assert np.linalg.norm(A @ x - b) <= 1e-8 * np.linalg.norm(b)
