"""Truncated transparent boundary operators for second-order hyperbolic systems.

A boundary point is described by :class:`SystemCoefficients`, the coefficients
of

    -J u_tt + A u_nn + sum_i B_i d/dtau_i u_n + C0 u_n + (tangential terms) = 0

with outward normal ``n``.  The local boundary operator is

    P1 u_t - u_n + (p + sum_i q_i d/dtau_i) u = 0

where ``P1 = -(J^{-1} A)^{-1/2}`` and ``p``, ``q_i`` solve Sylvester equations
whose coefficient is ``L = (J^{-1} A)^{-1/2}``:

    L q_i + q_i L = -A^{-1} B_i L
    L p + p L     = -A^{-1} (C0 L + sum_i B_i D_i) - sum_i q_i D_i

``D_i`` is the tangential derivative of ``L`` at the point.  With ``J = I`` and
symmetric ``A`` everything stays symmetric and the eigenbasis Sylvester solver
is used; otherwise ``L`` is non-symmetric and the Schur solver takes over.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import NonPositiveSpectrum, NotPositiveDefinite, NotSymmetric, TtbcError
from .tolerance import DEFAULT, ToleranceConfig

__all__ = [
    "SystemCoefficients",
    "TtbcOperator",
    "HyperbolicityReport",
    "validate_hyperbolicity",
    "sylvester_coefficient",
    "derive_p1",
    "derive_q",
    "derive_p",
    "derive_operator",
    "to_resolved_form",
    "evaluate_symbol",
    "tangential_derivative",
    "operator_residuals",
]


def _tuple_of_matrices(items, n: int, count: int, name: str):
    if items is None:
        return tuple(np.zeros((n, n)) for _ in range(count))
    items = tuple(items)
    if len(items) != count:
        raise ValueError(f"{name} needs {count} matrices (one per tangential direction), got {len(items)}")
    out = []
    for k, m in enumerate(items):
        arr = linalg.as_matrix(m, f"{name}[{k}]")
        if arr.shape != (n, n):
            raise ValueError(f"{name}[{k}] must be {n}x{n}, got {arr.shape}")
        out.append(arr)
    return tuple(out)


@dataclass(frozen=True)
class SystemCoefficients:
    """Coefficients of one boundary point of a second-order hyperbolic system.

    Attributes
    ----------
    a : ndarray (N, N)
        Coefficient of the second normal derivative.
    b : tuple of ndarray
        Mixed-derivative coefficients ``B_i``, one per tangential direction.
    c0 : ndarray (N, N)
        Coefficient of the first normal derivative at the point.
    j : ndarray (N, N) or None
        Mass matrix at ``u_tt``; ``None`` means identity.
    d_tau : tuple of ndarray
        Tangential derivatives of ``(J^{-1} A)^{-1/2}`` at the point; zero for
        uniform coefficients.
    tangential_dims : int
        1 for problems in the plane, 2 in space.
    """

    a: np.ndarray
    b: tuple = None
    c0: np.ndarray = None
    j: Optional[np.ndarray] = None
    d_tau: tuple = None
    tangential_dims: int = 2

    def __post_init__(self):
        if self.tangential_dims not in (1, 2):
            raise ValueError(f"tangential_dims must be 1 or 2, got {self.tangential_dims}")
        a = linalg.as_matrix(self.a, "a")
        n = a.shape[0]
        c0 = np.zeros((n, n)) if self.c0 is None else linalg.as_matrix(self.c0, "c0")
        if c0.shape != (n, n):
            raise ValueError(f"c0 must be {n}x{n}, got {c0.shape}")
        j = None
        if self.j is not None:
            j = linalg.as_matrix(self.j, "j")
            if j.shape != (n, n):
                raise ValueError(f"j must be {n}x{n}, got {j.shape}")
            if np.linalg.norm(j - j.T) > 1e-10 * np.linalg.norm(j):
                raise NotSymmetric("mass matrix j must be symmetric")
        b = _tuple_of_matrices(self.b, n, self.tangential_dims, "b")
        d_tau = _tuple_of_matrices(self.d_tau, n, self.tangential_dims, "d_tau")
        if j is None and np.allclose(a, a.T, rtol=0, atol=1e-10 * np.linalg.norm(a)):
            for k, d in enumerate(d_tau):
                if np.linalg.norm(d - d.T) > 1e-10 * max(np.linalg.norm(d), 1e-300):
                    raise NotSymmetric(f"d_tau[{k}] must be symmetric (derivative of a symmetric field)")
        for name, value in (("a", a), ("c0", c0), ("j", j), ("b", b), ("d_tau", d_tau)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def mass(self) -> np.ndarray:
        return np.eye(self.n) if self.j is None else self.j

    @property
    def has_mass(self) -> bool:
        return self.j is not None and not np.array_equal(self.j, np.eye(self.n))

    @property
    def a_symmetric(self) -> bool:
        return bool(np.linalg.norm(self.a - self.a.T) <= 1e-10 * np.linalg.norm(self.a))

    @property
    def standard(self) -> bool:
        """True when ``J = I`` and ``A`` is symmetric, so ``L`` is symmetric."""
        return not self.has_mass and self.a_symmetric

    def effective_a(self) -> np.ndarray:
        """``J^{-1} A``, the matrix whose principal root defines the operator."""
        if not self.has_mass:
            return self.a.copy()
        return np.linalg.solve(self.j, self.a)


@dataclass(frozen=True)
class TtbcOperator:
    """Local boundary operator ``P1 d/dt - d/dn + p + sum_i q_i d/dtau_i``.

    The ``resolved_*`` fields hold the form solved for the time derivative,
    ``u_t = resolved_p1 u_n - (resolved_p_alg + sum_i resolved_q_i d/dtau_i) u``;
    they are ``None`` until :func:`to_resolved_form` has run.
    """

    p1: np.ndarray
    p_alg: np.ndarray
    q: tuple
    resolved_p1: Optional[np.ndarray] = None
    resolved_p_alg: Optional[np.ndarray] = None
    resolved_q: Optional[tuple] = None

    @property
    def n(self) -> int:
        return self.p1.shape[0]

    @property
    def is_resolved(self) -> bool:
        return self.resolved_p1 is not None

    def characteristic_only(self) -> "TtbcOperator":
        """Same ``P1`` with the zero-order and tangential parts dropped."""
        zero = np.zeros_like(self.p1)
        return to_resolved_form(TtbcOperator(self.p1.copy(), zero, tuple(zero.copy() for _ in self.q)))

    def matrices(self) -> dict:
        out = {"p1": self.p1, "p_alg": self.p_alg}
        for k, qk in enumerate(self.q, start=1):
            out[f"q{k}"] = qk
        if self.is_resolved:
            out["resolved_p1"] = self.resolved_p1
            out["resolved_p_alg"] = self.resolved_p_alg
            for k, qk in enumerate(self.resolved_q, start=1):
                out[f"resolved_q{k}"] = qk
        return out


@dataclass
class HyperbolicityReport:
    ok: bool
    eigenvalues: list
    message: str
    degenerate_indices: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def validate_hyperbolicity(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT) -> HyperbolicityReport:
    """Check that ``J^{-1} A`` has a strictly positive real spectrum.

    Never raises on bad coefficients; problems are reported in the returned
    :class:`HyperbolicityReport`, including the indices of components whose
    whole row and column of ``A`` vanish.
    """
    a = coeffs.a
    scale = np.linalg.norm(a)
    row = np.abs(a).max(axis=1)
    col = np.abs(a).max(axis=0)
    degenerate = [int(i) for i in np.flatnonzero(np.maximum(row, col) <= tol.degenerate_row * scale)]

    try:
        if coeffs.has_mass and coeffs.a_symmetric:
            _, pencil = linalg._congruence(coeffs.j, a, tol)
            eig = linalg.eig_sym(pencil, tol).eigenvalues
        elif coeffs.a_symmetric:
            eig = linalg.eig_sym(a, tol).eigenvalues
        else:
            w = np.linalg.eigvals(coeffs.effective_a())
            if np.any(np.abs(w.imag) > tol.symmetry * max(np.abs(w).max(), 1e-300)):
                return HyperbolicityReport(
                    False,
                    sorted(w.real.tolist()),
                    "J^{-1}A has complex eigenvalues; the system is not hyperbolic in the normal direction",
                    degenerate,
                )
            eig = np.sort(w.real)
    except (NotPositiveDefinite, NotSymmetric, np.linalg.LinAlgError) as exc:
        return HyperbolicityReport(False, [], f"cannot form the normal-direction pencil: {exc}", degenerate)

    eigenvalues = [float(x) for x in eig]
    lmax = eig[-1]
    ok = bool(lmax > 0 and eig[0] > tol.positive_definite * lmax)
    if ok:
        message = f"hyperbolic: eigenvalues in [{eig[0]:.6g}, {lmax:.6g}]"
    else:
        message = f"not hyperbolic: smallest eigenvalue {eig[0]:.6g} is not positive relative to {lmax:.6g}"
        if degenerate:
            message += f"; degenerate components {degenerate}"
    return HyperbolicityReport(ok, eigenvalues, message, degenerate)


def sylvester_coefficient(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """``L = (J^{-1} A)^{-1/2}``, the principal inverse square root."""
    if coeffs.standard:
        return linalg.spd_inv_sqrt(coeffs.a, tol)
    if coeffs.a_symmetric:
        return linalg.j_weighted_inv_sqrt(coeffs.mass, coeffs.a, tol)
    return linalg.general_inv_sqrt(coeffs.effective_a(), tol)


def _solve(coeffs: SystemCoefficients, l: np.ndarray, rhs: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    if coeffs.standard:
        return linalg.solve_sylvester_sym(l, rhs, tol)
    return linalg.solve_sylvester_general(l, l, rhs, tol)


def _require_hyperbolic(coeffs: SystemCoefficients, tol: ToleranceConfig) -> None:
    report = validate_hyperbolicity(coeffs, tol)
    if not report.ok:
        smallest = report.eigenvalues[0] if report.eigenvalues else None
        raise NonPositiveSpectrum(report.message, eigenvalue=smallest)


def derive_p1(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """``P1 = -(J^{-1} A)^{-1/2}``; for ``J = I`` this is ``-A^{-1/2}``."""
    return -sylvester_coefficient(coeffs, tol)


def _q_rhs(coeffs: SystemCoefficients, l: np.ndarray) -> list:
    return [-np.linalg.solve(coeffs.a, bk @ l) for bk in coeffs.b]


def _p_rhs(coeffs: SystemCoefficients, l: np.ndarray, q: Sequence[np.ndarray]) -> np.ndarray:
    inner = coeffs.c0 @ l
    for bk, dk in zip(coeffs.b, coeffs.d_tau):
        inner = inner + bk @ dk
    rhs = -np.linalg.solve(coeffs.a, inner)
    for qk, dk in zip(q, coeffs.d_tau):
        rhs = rhs - qk @ dk
    return rhs


def derive_q(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT, l: Optional[np.ndarray] = None) -> tuple:
    """Tangential-gradient parts ``q_i`` of the zero-order operator."""
    if l is None:
        _require_hyperbolic(coeffs, tol)
        l = sylvester_coefficient(coeffs, tol)
    return tuple(_solve(coeffs, l, rhs, tol) for rhs in _q_rhs(coeffs, l))


def derive_p(
    coeffs: SystemCoefficients,
    q: Sequence[np.ndarray],
    tol: ToleranceConfig = DEFAULT,
    l: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Algebraic part ``p`` of the zero-order operator, given the already solved ``q``."""
    if l is None:
        _require_hyperbolic(coeffs, tol)
        l = sylvester_coefficient(coeffs, tol)
    q = tuple(q)
    if len(q) != coeffs.tangential_dims:
        raise ValueError(f"expected {coeffs.tangential_dims} q matrices, got {len(q)}")
    return _solve(coeffs, l, _p_rhs(coeffs, l, q), tol)


def to_resolved_form(op: TtbcOperator) -> TtbcOperator:
    """Fill the time-derivative-resolved fields by multiplying through with ``P1^{-1}``."""
    inv = linalg.inverse(op.p1)
    return dataclasses.replace(
        op,
        resolved_p1=inv,
        resolved_p_alg=inv @ op.p_alg,
        resolved_q=tuple(inv @ qk for qk in op.q),
    )


def derive_operator(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT) -> TtbcOperator:
    """Run the whole pipeline: ``P1``, then ``q``, then ``p``, then the resolved form.

    Raises
    ------
    NonPositiveSpectrum
        If the coefficients fail :func:`validate_hyperbolicity`.
    """
    _require_hyperbolic(coeffs, tol)
    l = sylvester_coefficient(coeffs, tol)
    q = derive_q(coeffs, tol, l=l)
    p = derive_p(coeffs, q, tol, l=l)
    return to_resolved_form(TtbcOperator(-l, p, q))


def evaluate_symbol(op: TtbcOperator, s: float, xi: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    """``s P1 + p + sum_i xi_i q_i`` for time frequency ``s`` and tangential wavenumbers ``xi``.

    Wavenumbers beyond the operator's tangential dimension are ignored.
    """
    out = s * op.p1 + op.p_alg
    for xk, qk in zip(xi, op.q):
        out = out + xk * qk
    return out


def tangential_derivative(a_minus, a_plus, delta: float, j_minus=None, j_plus=None, tol: ToleranceConfig = DEFAULT):
    """Central difference of ``(J^{-1} A)^{-1/2}`` between samples at ``tau -/+ delta``.

    Use it to fill ``SystemCoefficients.d_tau`` when the coefficients vary
    along the boundary.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    lo = SystemCoefficients(a_minus, j=j_minus, tangential_dims=1)
    hi = SystemCoefficients(a_plus, j=j_plus, tangential_dims=1)
    return (sylvester_coefficient(hi, tol) - sylvester_coefficient(lo, tol)) / (2.0 * delta)


def _rel(num: np.ndarray, *scales: np.ndarray) -> float:
    den = sum(np.linalg.norm(s) for s in scales)
    n = np.linalg.norm(num)
    return float(n / den) if den > 0 else float(n)


def operator_residuals(coeffs: SystemCoefficients, op: TtbcOperator, tol: ToleranceConfig = DEFAULT) -> dict:
    """Relative residuals of every defining equation of ``op`` for ``coeffs``.

    Keys: ``p1_square`` (``P1 P1 J^{-1}A = I``), ``q1``/``q2`` and ``p``
    (the two Sylvester equations), and ``resolved`` (``resolved_p1 P1 = I``)
    when the resolved form is present.
    """
    l = -op.p1
    eye = np.eye(coeffs.n)
    out = {"p1_square": _rel(op.p1 @ op.p1 @ coeffs.effective_a() - eye, eye)}
    for k, (qk, rhs) in enumerate(zip(op.q, _q_rhs(coeffs, l)), start=1):
        out[f"q{k}"] = linalg.sylvester_residual(l, l, qk, rhs)
    out["p"] = linalg.sylvester_residual(l, l, op.p_alg, _p_rhs(coeffs, l, op.q))
    if op.is_resolved:
        out["resolved"] = _rel(op.resolved_p1 @ op.p1 - eye, eye)
    return out


def check_operator(coeffs: SystemCoefficients, op: TtbcOperator, tol: ToleranceConfig = DEFAULT) -> dict:
    """Like :func:`operator_residuals` but raises if any residual exceeds ``tol.operator_residual``."""
    res = operator_residuals(coeffs, op, tol)
    bad = {k: v for k, v in res.items() if not v <= tol.operator_residual}
    if bad:
        raise TtbcError(f"operator residuals above {tol.operator_residual:.1e}: {bad}")
    return res
