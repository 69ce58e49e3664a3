"""Dense linear-algebra kernels for small coefficient matrices.

Everything here works on real ``(n, n)`` float arrays with ``n`` of order ten,
so robustness wins over speed: square roots go through a symmetric
eigendecomposition, and Sylvester equations are solved either in the
eigenbasis of a symmetric coefficient or by a complex Schur (Bartels-Stewart)
sweep.  Solvability and definiteness are always checked rather than assumed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg as spla

from .errors import (
    ConvergenceFailure,
    NonPositiveSpectrum,
    NotPositiveDefinite,
    NotSymmetric,
    SingularMatrix,
    SpectraOverlap,
)
from .tolerance import DEFAULT, ToleranceConfig

__all__ = [
    "SpectralDecomposition",
    "as_matrix",
    "eig_sym",
    "spd_sqrt",
    "spd_inv_sqrt",
    "solve_sylvester_sym",
    "solve_sylvester_general",
    "j_weighted_sqrt",
    "j_weighted_inv_sqrt",
    "general_sqrt",
    "general_inv_sqrt",
    "inverse",
    "sylvester_residual",
]


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite square float64 array.

    Scalars are promoted to ``1x1`` matrices.
    """
    arr = np.array(m, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _check_symmetric(m: np.ndarray, tol: float, name: str) -> None:
    scale = np.linalg.norm(m)
    asym = np.linalg.norm(m - m.T)
    if asym > tol * scale:
        raise NotSymmetric(f"{name} is not symmetric: |m - m^T| = {asym:.3e} > {tol:.1e} * |m| = {tol * scale:.3e}")


def eig_sym(m, tol: ToleranceConfig = DEFAULT) -> SpectralDecomposition:
    """Full spectral decomposition of a symmetric matrix.

    Parameters
    ----------
    m
        Symmetric matrix; symmetry is checked to ``tol.symmetry`` relative to
        the Frobenius norm and the symmetric part is decomposed.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending, orthonormal eigenvectors as columns.

    Raises
    ------
    NotSymmetric
        If ``m`` is not symmetric to tolerance.
    ConvergenceFailure
        If LAPACK's divide-and-conquer solver fails to converge.
    """
    m = as_matrix(m)
    _check_symmetric(m, tol.symmetry, "matrix")
    sym = 0.5 * (m + m.T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(f"symmetric eigensolver did not converge: {exc}") from exc
    return SpectralDecomposition(w, v)


def _positive_spectrum(dec: SpectralDecomposition, tol: ToleranceConfig, name: str, exc=NotPositiveDefinite):
    w = dec.eigenvalues
    lmax, lmin = w[-1], w[0]
    if not (lmax > 0 and lmin > tol.positive_definite * lmax):
        raise exc(
            f"{name} is not positive definite: smallest eigenvalue {lmin:.6g}, largest {lmax:.6g}",
            eigenvalue=float(lmin),
        )
    return w


def _spd_power(m, power: float, tol: ToleranceConfig, name: str = "matrix") -> np.ndarray:
    dec = eig_sym(m, tol)
    w = _positive_spectrum(dec, tol, name)
    v = dec.eigenvectors
    out = (v * w**power) @ v.T
    return 0.5 * (out + out.T)


def spd_sqrt(m, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Principal (symmetric positive definite) square root of an SPD matrix."""
    return _spd_power(m, 0.5, tol)


def spd_inv_sqrt(m, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Inverse of the principal square root, ``S`` with ``S @ S @ m = I``."""
    return _spd_power(m, -0.5, tol)


def inverse(m) -> np.ndarray:
    m = as_matrix(m)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"matrix is singular: {exc}") from exc
    if not np.all(np.isfinite(inv)):
        raise SingularMatrix("matrix inverse has non-finite entries")
    return inv


def solve_sylvester_sym(l, r, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Solve ``l X + X l = r`` for symmetric positive definite ``l``.

    Works in the eigenbasis of ``l``: with ``l = V diag(w) V^T`` the
    transformed unknown is ``(V^T r V)_ij / (w_i + w_j)``.
    """
    l = as_matrix(l, "l")
    r = as_matrix(r, "r")
    if r.shape != l.shape:
        raise ValueError(f"shape mismatch: l {l.shape}, r {r.shape}")
    dec = eig_sym(l, tol)
    w = _positive_spectrum(dec, tol, "Sylvester coefficient")
    v = dec.eigenvectors
    rt = v.T @ r @ v
    xt = rt / (w[:, None] + w[None, :])
    return v @ xt @ v.T


def solve_sylvester_general(a, b, c, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Solve ``a X + X b = c`` for general real square ``a``, ``b``.

    Bartels-Stewart on complex Schur forms ``a = U T U^H`` and ``b = V S V^H``:
    the transformed system ``T Y + Y S = U^H c V`` is swept column by column,
    each column being an upper triangular solve.

    Raises
    ------
    SpectraOverlap
        If some eigenvalue of ``a`` is within
        ``tol.spectra_separation * (|a| + |b|)`` of an eigenvalue of ``-b``.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    c = np.array(c, dtype=float)
    if c.ndim != 2 or c.shape != (a.shape[0], b.shape[0]):
        raise ValueError(f"c must have shape {(a.shape[0], b.shape[0])}, got {c.shape}")

    t, u = spla.schur(a, output="complex")
    s, v = spla.schur(b, output="complex")
    ta, sb = np.diag(t), np.diag(s)
    gaps = np.abs(ta[:, None] + sb[None, :])
    threshold = tol.spectra_separation * (np.linalg.norm(a) + np.linalg.norm(b))
    if gaps.min() <= threshold:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise SpectraOverlap(
            f"spectra of a and -b are not disjoint: eig(a) {ta[i]:.6g} vs eig(-b) {-sb[j]:.6g}"
        )

    f = u.conj().T @ c @ v
    n, m = f.shape
    y = np.zeros((n, m), dtype=complex)
    eye = np.eye(n)
    for k in range(m):
        rhs = f[:, k] - y[:, :k] @ s[:k, k]
        y[:, k] = spla.solve_triangular(t + s[k, k] * eye, rhs)
    x = u @ y @ v.conj().T
    return x.real.copy()


def sylvester_residual(a, b, x, c) -> float:
    """Relative residual ``|aX + Xb - c| / (|a||X| + |b||X| + |c|)`` (Frobenius norms)."""
    a, b, x, c = (np.asarray(z, dtype=float) for z in (a, b, x, c))
    num = np.linalg.norm(a @ x + x @ b - c)
    den = (np.linalg.norm(a) + np.linalg.norm(b)) * np.linalg.norm(x) + np.linalg.norm(c)
    return float(num / den) if den > 0 else float(num)


def _congruence(j, s, tol: ToleranceConfig):
    """Cholesky factor ``G`` of ``j`` and the symmetric pencil ``G^{-1} s G^{-T}``."""
    j = as_matrix(j, "j")
    s = as_matrix(s, "s")
    if j.shape != s.shape:
        raise ValueError(f"shape mismatch: j {j.shape}, s {s.shape}")
    _positive_spectrum(eig_sym(j, tol), tol, "mass matrix j")
    _check_symmetric(s, tol.symmetry, "s")
    g = np.linalg.cholesky(0.5 * (j + j.T))
    tmp = spla.solve_triangular(g, 0.5 * (s + s.T), lower=True)
    pencil = spla.solve_triangular(g, tmp.T, lower=True)
    return g, 0.5 * (pencil + pencil.T)


def _weighted_power(j, s, power: float, tol: ToleranceConfig) -> np.ndarray:
    g, pencil = _congruence(j, s, tol)
    dec = eig_sym(pencil, tol)
    w = _positive_spectrum(dec, tol, "j^{-1} s", exc=NonPositiveSpectrum)
    v = dec.eigenvectors
    root = (v * w**power) @ v.T
    # j^{-1} s = G^{-T} (pencil) G^T, so any function of it is conjugated the same way
    left = spla.solve_triangular(g, root, lower=True, trans="T")
    return left @ g.T


def j_weighted_sqrt(j, s, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Principal square root ``R`` of ``j^{-1} s``, so that ``R @ R = j^{-1} s``.

    ``j`` must be SPD and ``s`` symmetric; ``j^{-1} s`` is similar to the
    symmetric matrix ``G^{-1} s G^{-T}`` (``j = G G^T``), whose SPD root is
    transformed back.  The result is generally not symmetric.

    Raises
    ------
    NotPositiveDefinite
        If ``j`` is not SPD.
    NonPositiveSpectrum
        If ``j^{-1} s`` has a non-positive eigenvalue.
    """
    return _weighted_power(j, s, 0.5, tol)


def j_weighted_inv_sqrt(j, s, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """``(j^{-1} s)^{-1/2}``, computed by the same congruence as :func:`j_weighted_sqrt`."""
    return _weighted_power(j, s, -0.5, tol)


def _general_power(m, power: float, tol: ToleranceConfig) -> np.ndarray:
    m = as_matrix(m)
    w, v = np.linalg.eig(m)
    scale = np.abs(w).max()
    if scale == 0 or np.any(np.abs(w.imag) > tol.symmetry * scale):
        raise NonPositiveSpectrum("matrix spectrum is not real", eigenvalue=None)
    wr = w.real
    if wr.min() <= tol.positive_definite * wr.max():
        raise NonPositiveSpectrum(
            f"matrix spectrum is not strictly positive: smallest eigenvalue {wr.min():.6g}",
            eigenvalue=float(wr.min()),
        )
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularMatrix(f"matrix is not diagonalizable to working accuracy (eigenvector condition {cond:.2e})")
    out = (v * wr**power) @ np.linalg.inv(v)
    return out.real.copy()


def general_sqrt(m, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Principal square root of a diagonalizable matrix with real positive spectrum."""
    return _general_power(m, 0.5, tol)


def general_inv_sqrt(m, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    return _general_power(m, -0.5, tol)
