"""Coefficient builders for the built-in physical models.

* :class:`ScalarWave` -- ``u_tt = c^2 Laplace u`` at a plane, circle or sphere.
* :class:`OrthoCylElastic` -- cylindrically orthotropic elasticity at the side
  surface ``r = const``, with the closed-form operator used as an oracle.
* :class:`BiotCartesian` -- inviscid isotropic Biot poroelasticity at a plane
  ``x_k = const``; the two tangential fluid components carry no second normal
  derivative, so :func:`reduce_degenerate` must be applied before derivation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .errors import InvalidModuli, InvalidStiffness, MissingRadius
from .operator import SystemCoefficients, TtbcOperator, validate_hyperbolicity
from .tolerance import DEFAULT, ToleranceConfig

__all__ = [
    "Geometry",
    "ScalarWave",
    "OrthoCylElastic",
    "BiotCartesian",
    "ModelSpec",
    "MODEL_KINDS",
    "build_scalar_wave",
    "build_ortho_cyl",
    "closed_form_ortho_operator",
    "build_biot",
    "biot_component_names",
    "reduce_degenerate",
    "build",
]


class Geometry(str, enum.Enum):
    PLANE = "plane"
    CIRCLE = "circle"
    SPHERE = "sphere"


@dataclass(frozen=True)
class ScalarWave:
    c: float
    dim: int = 2
    geometry: Geometry = Geometry.PLANE
    r: float = None

    kind: ClassVar[str] = "scalar_wave"

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        if not self.c > 0:
            raise ValueError(f"wave speed must be positive, got {self.c}")
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        expected = {Geometry.CIRCLE: 2, Geometry.SPHERE: 3}.get(self.geometry)
        if expected is not None and self.dim != expected:
            raise ValueError(f"{self.geometry.value} boundary needs dim={expected}, got {self.dim}")


@dataclass(frozen=True)
class OrthoCylElastic:
    rho: float
    a11: float
    a12: float
    a13: float
    a22: float
    a23: float
    a33: float
    a44: float
    a55: float
    a66: float
    r: float
    vti: bool = False

    kind: ClassVar[str] = "ortho_cyl"

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidStiffness(f"density must be positive, got {self.rho}")
        for name in ("a11", "a55", "a66"):
            if not getattr(self, name) > 0:
                raise InvalidStiffness(f"{name} must be positive, got {getattr(self, name)}")
        if not self.r > 0:
            raise InvalidStiffness(f"cylinder radius must be positive, got {self.r}")
        if self.vti:
            expected = 0.5 * (self.a11 - self.a12)
            if not math.isclose(self.a66, expected, rel_tol=1e-9, abs_tol=1e-12 * abs(self.a11)):
                raise InvalidStiffness(
                    f"VTI constraint a66 = (a11 - a12)/2 violated: a66 = {self.a66}, (a11 - a12)/2 = {expected}"
                )

    @classmethod
    def vti_medium(cls, rho, a11, a12, a13, a33, a55, r):
        """VTI material: ``a66`` follows from ``a11, a12``; ``a22 = a11``, ``a23 = a13``, ``a44 = a55``."""
        return cls(rho, a11, a12, a13, a11, a13, a33, a55, a55, 0.5 * (a11 - a12), r, vti=True)


@dataclass(frozen=True)
class BiotCartesian:
    lam: float
    mu: float
    alpha: float
    m_biot: float
    rho: float
    rho_f: float
    m_eff: float
    normal_axis: int = 1

    kind: ClassVar[str] = "biot"

    def __post_init__(self):
        if self.normal_axis not in (1, 2, 3):
            raise InvalidModuli(f"normal_axis must be 1, 2 or 3, got {self.normal_axis}")
        if not (self.mu > 0 and self.m_biot > 0 and self.lam + 2 * self.mu > 0):
            raise InvalidModuli(
                f"need mu > 0, M > 0 and lambda + 2 mu > 0; got lambda={self.lam}, mu={self.mu}, M={self.m_biot}"
            )
        if self.alpha < 0:
            raise InvalidModuli(f"Biot coefficient must be non-negative, got {self.alpha}")
        if not (self.rho > 0 and self.rho_f >= 0):
            raise InvalidModuli(f"densities must be positive, got rho={self.rho}, rho_f={self.rho_f}")
        if not self.m_eff > self.rho_f**2 / self.rho:
            raise InvalidModuli(
                f"mass matrix not positive definite: m_eff = {self.m_eff} <= rho_f^2/rho = {self.rho_f**2 / self.rho}"
            )


ModelSpec = Union[ScalarWave, OrthoCylElastic, BiotCartesian]
MODEL_KINDS = {cls.kind: cls for cls in (ScalarWave, OrthoCylElastic, BiotCartesian)}


def build_scalar_wave(spec: ScalarWave) -> SystemCoefficients:
    """Single-component system ``a = [c^2]`` with the curvature term of the radial Laplacian.

    ``c0`` is ``c^2 (d - 1) / r``: zero at a plane, ``c^2/r`` on a circle and
    ``2 c^2/r`` on a sphere.
    """
    if spec.geometry is Geometry.PLANE:
        c0 = 0.0
    else:
        if spec.r is None or not spec.r > 0:
            raise MissingRadius(f"{spec.geometry.value} boundary needs a positive radius r")
        c0 = spec.c**2 * (spec.dim - 1) / spec.r
    return SystemCoefficients(
        a=[[spec.c**2]],
        c0=[[c0]],
        tangential_dims=spec.dim - 1,
    )


def build_ortho_cyl(spec: OrthoCylElastic) -> SystemCoefficients:
    """Coefficients at ``r = const`` for ``U = (u_r, u_theta, u_z)`` and ``tau = (theta, z)``."""
    rho, r = spec.rho, spec.r
    diag = np.diag([spec.a11, spec.a66, spec.a55])
    b_theta = np.zeros((3, 3))
    b_theta[0, 1] = b_theta[1, 0] = spec.a12 + spec.a66
    b_z = np.zeros((3, 3))
    b_z[0, 2] = b_z[2, 0] = spec.a13 + spec.a55
    return SystemCoefficients(
        a=diag / rho,
        b=(b_theta / (rho * r), b_z / rho),
        c0=diag / (rho * r),
        tangential_dims=2,
    )


def closed_form_ortho_operator(spec: OrthoCylElastic) -> TtbcOperator:
    """Operator of the orthotropic cylinder written out entry by entry.

    Independent of the numerical pipeline: nothing here calls a square root
    or Sylvester solver, so it serves as the oracle for
    ``derive_operator(build_ortho_cyl(spec))``.
    """
    rho, r = spec.rho, spec.r
    a11, a55, a66 = spec.a11, spec.a55, spec.a66
    s11, s55, s66 = math.sqrt(a11), math.sqrt(a55), math.sqrt(a66)
    num_theta = spec.a12 + a66
    num_z = spec.a13 + a55

    p1 = -math.sqrt(rho) * np.diag([1 / s11, 1 / s66, 1 / s55])
    p_alg = -np.eye(3) / (2 * r)
    q_theta = np.zeros((3, 3))
    q_theta[0, 1] = -num_theta / (s11 * s66 + a11) / r
    q_theta[1, 0] = -num_theta / (s11 * s66 + a66) / r
    q_z = np.zeros((3, 3))
    q_z[0, 2] = -num_z / (s11 * s55 + a11)
    q_z[2, 0] = -num_z / (s11 * s55 + a55)

    sr = math.sqrt(rho)
    resolved_p1 = -np.diag([s11, s66, s55]) / sr
    resolved_p = np.diag([s11, s66, s55]) / (2 * r * sr)
    rq_theta = np.zeros((3, 3))
    rq_theta[0, 1] = rq_theta[1, 0] = num_theta / (s11 + s66) / (r * sr)
    rq_z = np.zeros((3, 3))
    rq_z[0, 2] = rq_z[2, 0] = num_z / (s11 + s55) / sr
    return TtbcOperator(p1, p_alg, (q_theta, q_z), resolved_p1, resolved_p, (rq_theta, rq_z))


def biot_component_names() -> list:
    return [f"u{i}" for i in (1, 2, 3)] + [f"w{i}" for i in (1, 2, 3)]


def _sym_add(g, row, col, p, q, value):
    g[row, col, p, q] += 0.5 * value
    g[row, col, q, p] += 0.5 * value


def _biot_second_order(spec: BiotCartesian) -> np.ndarray:
    """Coefficients ``G[row, col, p, q]`` of ``d_p d_q U_col`` in equation ``row``.

    Symmetric in ``(p, q)``.  Rows 0-2 are the solid momentum equations and
    rows 3-5 the fluid ones, both with the inertia moved to the left.
    """
    lam, mu, alpha, m = spec.lam, spec.mu, spec.alpha, spec.m_biot
    g = np.zeros((6, 6, 3, 3))
    for i in range(3):
        for k in range(3):
            # solid: (lam + alpha^2 M) grad div u + mu (Laplace u + grad div u) - alpha M grad div w
            _sym_add(g, i, k, i, k, lam + alpha**2 * m + mu)
            _sym_add(g, i, i, k, k, mu)
            _sym_add(g, i, 3 + k, i, k, -alpha * m)
            # fluid: -grad(alpha M div u - M div w)
            _sym_add(g, 3 + i, k, i, k, -alpha * m)
            _sym_add(g, 3 + i, 3 + k, i, k, m)
    return g


def build_biot(spec: BiotCartesian) -> SystemCoefficients:
    """Six-component system ``(u1, u2, u3, w1, w2, w3)`` at a plane normal to ``x_{normal_axis}``.

    Tangential directions are the two remaining axes in increasing order.
    The rows and columns of ``a`` for the two tangential fluid components are
    zero.
    """
    g = _biot_second_order(spec)
    nrm = spec.normal_axis - 1
    tang = [k for k in range(3) if k != nrm]
    a = g[:, :, nrm, nrm].copy()
    b = tuple(g[:, :, nrm, t] + g[:, :, t, nrm] for t in tang)
    eye = np.eye(3)
    j = np.block([[spec.rho * eye, spec.rho_f * eye], [spec.rho_f * eye, spec.m_eff * eye]])
    return SystemCoefficients(a=a, b=b, c0=np.zeros((6, 6)), j=j, tangential_dims=2)


def reduce_degenerate(coeffs: SystemCoefficients, tol: ToleranceConfig = DEFAULT):
    """Drop components whose whole row and column of ``a`` vanish.

    Returns
    -------
    reduced : SystemCoefficients
        The subsystem on the remaining components (``a``, ``b``, ``c0``,
        ``j`` and ``d_tau`` restricted alike).  If every component is
        degenerate the input is returned unchanged, so that
        :func:`validate_hyperbolicity` reports the failure downstream.
    excluded : list of int
        Indices of the removed components, in the original numbering.
    """
    excluded = validate_hyperbolicity(coeffs, tol).degenerate_indices
    if not excluded:
        return coeffs, []
    keep = [i for i in range(coeffs.n) if i not in excluded]
    if not keep:
        return coeffs, list(excluded)
    ix = np.ix_(keep, keep)
    reduced = SystemCoefficients(
        a=coeffs.a[ix],
        b=tuple(bk[ix] for bk in coeffs.b),
        c0=coeffs.c0[ix],
        j=None if coeffs.j is None else coeffs.j[ix],
        d_tau=tuple(dk[ix] for dk in coeffs.d_tau),
        tangential_dims=coeffs.tangential_dims,
    )
    return reduced, list(excluded)


def build(spec: ModelSpec) -> SystemCoefficients:
    """Dispatch to the builder matching ``spec``'s type."""
    if isinstance(spec, ScalarWave):
        return build_scalar_wave(spec)
    if isinstance(spec, OrthoCylElastic):
        return build_ortho_cyl(spec)
    if isinstance(spec, BiotCartesian):
        return build_biot(spec)
    raise TypeError(f"unknown model spec {type(spec).__name__}")
