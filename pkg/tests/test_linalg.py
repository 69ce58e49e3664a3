import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import random_spd, seeds, spd_matrices
from ttbc import linalg
from ttbc.errors import (
    ConvergenceFailure,
    NonPositiveSpectrum,
    NotPositiveDefinite,
    NotSymmetric,
    SingularMatrix,
    SpectraOverlap,
)
from ttbc.tolerance import ToleranceConfig


class TestEigSym:
    def test_identity(self):
        dec = linalg.eig_sym(np.eye(3))
        assert_allclose(dec.eigenvalues, [1, 1, 1])
        assert_allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        assert_allclose(linalg.eig_sym(np.diag([5.0, 2.0])).eigenvalues, [2, 5])

    def test_hand_solved(self):
        # lambda^2 - 10 lambda + 9 = 0
        assert_allclose(linalg.eig_sym([[5, 4], [4, 5]]).eigenvalues, [1, 9], rtol=1e-14)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            linalg.eig_sym([[1.0, 2.0], [0.0, 1.0]])

    def test_tolerates_roundoff_asymmetry(self):
        m = np.array([[2.0, 1.0], [1.0 + 1e-14, 3.0]])
        dec = linalg.eig_sym(m)
        assert_allclose(dec.reconstruct(), 0.5 * (m + m.T), atol=1e-13)

    def test_convergence_failure_is_mapped(self, monkeypatch):
        def boom(_):
            raise np.linalg.LinAlgError("no convergence")

        monkeypatch.setattr(np.linalg, "eigh", boom)
        with pytest.raises(ConvergenceFailure):
            linalg.eig_sym(np.eye(2))

    def test_scalar_promoted(self):
        assert linalg.eig_sym(4.0).eigenvalues.shape == (1,)

    def test_rejects_non_square_and_non_finite(self):
        with pytest.raises(ValueError):
            linalg.eig_sym(np.ones((2, 3)))
        with pytest.raises(ValueError):
            linalg.eig_sym([[np.nan]])

    @settings(max_examples=50, deadline=None)
    @given(spd_matrices())
    def test_orthonormal_and_ascending(self, m):
        dec = linalg.eig_sym(m)
        v = dec.eigenvectors
        assert_allclose(v.T @ v, np.eye(len(m)), atol=1e-12)
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.linalg.norm(dec.reconstruct() - m) <= 1e-12 * np.linalg.norm(m) * len(m)


class TestSpdRoots:
    def test_identity(self):
        assert_allclose(linalg.spd_sqrt(np.eye(3)), np.eye(3))
        assert_allclose(linalg.spd_inv_sqrt(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        assert_allclose(linalg.spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), rtol=1e-15)
        assert_allclose(linalg.spd_inv_sqrt([[4.0]]), [[0.5]], rtol=1e-15)

    def test_hand_solved(self):
        m = np.array([[5.0, 4.0], [4.0, 5.0]])
        assert_allclose(linalg.spd_sqrt(m), [[2, 1], [1, 2]], rtol=1e-14)
        assert_allclose(linalg.spd_inv_sqrt(m), np.array([[2, -1], [-1, 2]]) / 3, rtol=1e-14)

    def test_not_positive_definite_reports_eigenvalue(self):
        with pytest.raises(NotPositiveDefinite) as err:
            linalg.spd_sqrt(np.diag([1.0, -2.0]))
        assert err.value.eigenvalue == pytest.approx(-2.0)

    def test_nearly_singular_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.spd_inv_sqrt(np.diag([1.0, 1e-14]))

    @settings(max_examples=100, deadline=None)
    @given(spd_matrices())
    def test_residuals(self, m):
        s = linalg.spd_sqrt(m)
        r = linalg.spd_inv_sqrt(m)
        assert np.linalg.norm(s @ s - m) <= 1e-10 * np.linalg.norm(m)
        assert np.linalg.norm(r @ r @ m - np.eye(len(m))) <= 1e-10 * np.sqrt(len(m))
        assert_allclose(s, s.T, atol=1e-12 * np.linalg.norm(s))
        assert np.all(np.linalg.eigvalsh(s) > 0)

    @settings(max_examples=30, deadline=None)
    @given(spd_matrices(cond=100.0))
    def test_matches_scipy(self, m):
        assert_allclose(linalg.spd_sqrt(m), np.real(scipy.linalg.sqrtm(m)), rtol=1e-9, atol=1e-10)


class TestInverse:
    def test_singular(self):
        with pytest.raises(SingularMatrix):
            linalg.inverse(np.zeros((2, 2)))

    def test_regular(self):
        assert_allclose(linalg.inverse([[2.0, 0.0], [0.0, 4.0]]), np.diag([0.5, 0.25]))


class TestSylvesterSym:
    def test_identity_halves(self, rng):
        r = rng.standard_normal((2, 2))
        assert_allclose(linalg.solve_sylvester_sym(np.eye(2), r), r / 2, rtol=1e-15)

    def test_componentwise_oracles(self):
        assert_allclose(linalg.solve_sylvester_sym(np.diag([1.0, 2.0]), [[2, 3], [3, 8]]), [[1, 1], [1, 2]], rtol=1e-15)
        assert_allclose(
            linalg.solve_sylvester_sym(np.diag([2.0, 3.0]), [[0, 1], [1, 0]]), [[0, 0.2], [0.2, 0]], atol=1e-16
        )

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.solve_sylvester_sym(np.diag([1.0, -1.0]), np.eye(2))

    @settings(max_examples=100, deadline=None)
    @given(spd_matrices(), seeds())
    def test_residual_and_scipy(self, l, rng):
        n = len(l)
        r = rng.standard_normal((n, n))
        x = linalg.solve_sylvester_sym(l, r)
        resid = np.linalg.norm(l @ x + x @ l - r)
        assert resid <= 1e-10 * (np.linalg.norm(l) * np.linalg.norm(x) + np.linalg.norm(r))
        assert_allclose(x, scipy.linalg.solve_sylvester(l, l, r), rtol=1e-8, atol=1e-10 * np.abs(x).max())


class TestSylvesterGeneral:
    def test_identity(self, rng):
        c = rng.standard_normal((3, 3))
        assert_allclose(linalg.solve_sylvester_general(np.eye(3), np.eye(3), c), c / 2, rtol=1e-14)

    def test_diagonal_oracle(self):
        x = linalg.solve_sylvester_general(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]), np.ones((2, 2)))
        assert_allclose(x, [[0.25, 0.2], [0.2, 1 / 6]], rtol=1e-14)

    def test_overlap(self):
        with pytest.raises(SpectraOverlap):
            linalg.solve_sylvester_general(np.diag([1.0, 2.0]), np.diag([-1.0, 5.0]), np.ones((2, 2)))

    def test_rectangular_rhs(self, rng):
        a = random_spd(rng, 3)
        b = random_spd(rng, 2)
        c = rng.standard_normal((3, 2))
        x = linalg.solve_sylvester_general(a, b, c)
        assert linalg.sylvester_residual(a, b, x, c) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8), seeds())
    def test_nonsymmetric_residual_and_scipy(self, n, rng):
        # Well separated: spectra of a and b in the right half plane.
        a = rng.standard_normal((n, n)) + (n + 2.0) * np.eye(n)
        b = rng.standard_normal((n, n)) + (n + 2.0) * np.eye(n)
        c = rng.standard_normal((n, n))
        x = linalg.solve_sylvester_general(a, b, c)
        assert linalg.sylvester_residual(a, b, x, c) <= 1e-10
        assert_allclose(x, scipy.linalg.solve_sylvester(a, b, c), rtol=1e-8, atol=1e-10)


class TestWeightedRoots:
    def test_identity_mass_reduces_to_spd(self, rng):
        m = random_spd(rng, 4)
        assert_allclose(linalg.j_weighted_sqrt(np.eye(4), m), linalg.spd_sqrt(m), rtol=1e-12, atol=1e-13)

    def test_diagonal(self):
        assert_allclose(linalg.j_weighted_sqrt(np.diag([1.0, 4.0]), np.diag([4.0, 4.0])), np.diag([2.0, 1.0]), rtol=1e-14)

    def test_indefinite_mass(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.j_weighted_sqrt(np.diag([1.0, -1.0]), np.eye(2))

    def test_non_positive_spectrum(self):
        with pytest.raises(NonPositiveSpectrum):
            linalg.j_weighted_sqrt(np.eye(2), np.diag([1.0, -3.0]))

    def test_biot_reduced_instance(self):
        from ttbc import BiotCartesian, build_biot, reduce_degenerate

        coeffs, _ = reduce_degenerate(build_biot(BiotCartesian(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 2.0)))
        r = linalg.j_weighted_sqrt(coeffs.j, coeffs.a)
        target = np.linalg.solve(coeffs.j, coeffs.a)
        assert np.linalg.norm(r @ r - target) <= 1e-10 * np.linalg.norm(target)

    @settings(max_examples=100, deadline=None)
    @given(spd_matrices(), seeds())
    def test_residuals(self, s, rng):
        n = len(s)
        j = random_spd(rng, n, cond=10.0)
        target = np.linalg.solve(j, s)
        r = linalg.j_weighted_sqrt(j, s)
        ri = linalg.j_weighted_inv_sqrt(j, s)
        assert np.linalg.norm(r @ r - target) <= 1e-10 * np.linalg.norm(target)
        assert_allclose(ri @ r, np.eye(n), atol=1e-9)


class TestGeneralRoots:
    def test_diagonalizable_positive(self, rng):
        v = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        m = v @ np.diag([1.0, 4.0, 9.0]) @ np.linalg.inv(v)
        r = linalg.general_sqrt(m)
        assert np.linalg.norm(r @ r - m) <= 1e-10 * np.linalg.norm(m)
        assert_allclose(linalg.general_inv_sqrt(m) @ r, np.eye(3), atol=1e-10)

    def test_complex_spectrum_rejected(self):
        with pytest.raises(NonPositiveSpectrum):
            linalg.general_sqrt([[0.0, -1.0], [1.0, 0.0]])


def test_tolerance_scaling_only_touches_residuals():
    t = ToleranceConfig().scaled(10.0)
    assert t.operator_residual == pytest.approx(1e-8)
    assert t.symmetry == ToleranceConfig().symmetry
    with pytest.raises(ValueError):
        ToleranceConfig().scaled(0.0)
    assert ToleranceConfig.from_env({"TTBC_TOLERANCE_SCALE": "2"}).sylvester_residual == pytest.approx(2e-10)
    with pytest.raises(ValueError):
        ToleranceConfig.from_env({"TTBC_TOLERANCE_SCALE": "abc"})
