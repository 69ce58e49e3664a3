"""Configuration and result records for the finite-difference harness."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..operator import TtbcOperator


class Domain(str, enum.Enum):
    INTERVAL = "interval"
    RECTANGLE = "rectangle"
    DISK = "disk"


class BoundaryKind(str, enum.Enum):
    TTBC = "ttbc"
    DIRICHLET = "dirichlet"
    CHARACTERISTIC_ONLY = "characteristic_only"


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian initial displacement ``amplitude * exp(-|x - center|^2 / (2 width^2))``.

    ``direction`` only matters on an interval: ``+1``/``-1`` launch a pulse
    travelling right/left, ``0`` starts it at rest (it then splits in two).
    Pulses in 2D always start at rest.
    """

    center: Union[float, Sequence[float]]
    width: float
    amplitude: float = 1.0
    direction: int = 1

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("pulse width must be positive")
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0 or 1")


@dataclass(frozen=True)
class PlaneWave:
    """Tone burst at angular frequency ``omega`` hitting the face at ``angle`` (radians, from the normal).

    The tangential wavenumber is snapped to the periodic box, so the carrier
    frequency actually used can differ slightly from ``omega``; the angle is
    kept exact.  ``cycles`` sets the Gaussian envelope width in carrier
    periods and ``source_x`` the position of the line source.
    """

    angle: float
    omega: float
    cycles: float = 2.0
    source_x: float = 0.1

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.cycles > 0:
            raise ValueError("cycles must be positive")


@dataclass(frozen=True)
class Boundary:
    kind: BoundaryKind = BoundaryKind.TTBC
    operator: Optional[TtbcOperator] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind(self.kind))
        if self.kind is not BoundaryKind.DIRICHLET:
            if self.operator is None:
                raise ValueError(f"{self.kind.value} boundary needs an operator")
            if self.operator.n != 1:
                raise ValueError("the harness only closes scalar problems (1x1 operators)")

    def resolved(self):
        """Scalar ``(p1, p, q)`` of ``u_t = p1 u_n - p u - q u_tau``; ``None`` for Dirichlet."""
        if self.kind is BoundaryKind.DIRICHLET:
            return None
        op = self.operator
        if self.kind is BoundaryKind.CHARACTERISTIC_ONLY:
            op = op.characteristic_only()
        elif not op.is_resolved:
            from ..operator import to_resolved_form

            op = to_resolved_form(op)
        q = float(op.resolved_q[0][0, 0]) if op.resolved_q else 0.0
        return float(op.resolved_p1[0, 0]), float(op.resolved_p_alg[0, 0]), q


@dataclass(frozen=True)
class SimulationConfig:
    """One harness run.

    ``lengths`` is ``(L,)`` for an interval, ``(Lx, Ly)`` for a rectangle
    (periodic in ``y``) and ``(R,)`` for a disk.  ``dt = cfl * h / c``.
    ``duration = None`` lets the runner pick a time that suits the geometry.
    """

    domain: Domain
    lengths: tuple
    h: float
    source: Union[GaussianPulse, PlaneWave, None]
    boundary: Boundary
    c: float = 1.0
    cfl: Optional[float] = None
    duration: Optional[float] = None
    n_theta: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        if self.cfl is None:
            object.__setattr__(self, "cfl", 0.9 if self.domain is Domain.INTERVAL else 0.45)
        if not self.h > 0:
            raise ValueError("grid spacing h must be positive")
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.c > 0:
            raise ValueError("wave speed must be positive")
        limit = 1.0 if self.domain is Domain.INTERVAL else 1.0 / math.sqrt(2.0)
        if self.cfl > limit:
            raise ValueError(f"cfl {self.cfl} exceeds the leapfrog stability bound {limit:.4f} in this geometry")
        expected = {Domain.INTERVAL: 1, Domain.RECTANGLE: 2, Domain.DISK: 1}[self.domain]
        if len(self.lengths) != expected or min(self.lengths) <= 0:
            raise ValueError(f"{self.domain.value} needs {expected} positive length(s), got {self.lengths}")
        if self.duration is not None and not self.duration >= 0:
            raise ValueError("duration must be non-negative")

    @property
    def dt(self) -> float:
        return self.cfl * self.h / self.c


@dataclass
class EnergyTrace:
    times: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.times.shape != self.energies.shape:
            raise ValueError("times and energies must have the same length")

    @property
    def final(self) -> float:
        return float(self.energies[-1]) if len(self.energies) else 0.0


@dataclass
class ReflectionReport:
    angle: float
    incident_amplitude: float
    reflected_amplitude: float
    measured_ratio: float
    analytic_ratio: float
    relative_error: float
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_amplitudes(cls, angle, incident, reflected, analytic, **extras):
        measured = reflected / incident if incident > 0 else 0.0
        return cls(angle, incident, reflected, measured, analytic, relative_error(measured, analytic), extras)


def relative_error(measured: float, analytic: float) -> float:
    """``|measured - analytic| / analytic``; absolute error when ``analytic`` is zero."""
    diff = abs(measured - analytic)
    return diff / abs(analytic) if analytic != 0 else diff


def analytic_plane_reflection(angle: float) -> float:
    """Reflection coefficient of ``u_t + c u_n = 0`` for a plane wave at ``angle`` from the normal."""
    ct = math.cos(angle)
    return abs(ct - 1.0) / abs(ct + 1.0)
