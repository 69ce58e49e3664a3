"""Scalar wave on a disk, closed at ``r = R`` with and without the curvature term.

The solver is finite-difference in ``r`` and Fourier in ``theta``.  Both the
interior operator and the scalar boundary closure act on each angular
Fourier mode separately, so the coefficients ``u_m(r)`` are stepped directly
and no transform is needed inside the time loop.

Radial grid: rings at ``r_j = (j + 1/2) h`` for ``j = 0 .. Nr - 1``; the
outermost ring is the boundary ``R``.  The pole is excluded and the flux
through ``r = 0`` is zero, which keeps the radial stencil conservative.
Mode ``m`` is kept on ring ``j`` only while ``|m| h / r_j <= 2``: finer
angular structure near the pole is below the grid resolution and would
otherwise force a tiny time step.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import PoleSingularity, UnstableRun
from .config import Boundary, BoundaryKind, Domain, EnergyTrace, GaussianPulse, SimulationConfig
from .wave1d import GROWTH_LIMIT, boundary_update

ANGULAR_RESOLUTION = 2.0


class _PolarGrid:
    def __init__(self, radius, h, n_theta):
        self.nr = max(3, int(round(radius / h + 0.5)))
        self.h = radius / (self.nr - 0.5)
        self.r = (np.arange(self.nr) + 0.5) * self.h
        self.r_face = np.arange(1, self.nr) * self.h  # r_{j+1/2}, j = 0 .. nr-2
        if n_theta is None:
            n_theta = 2 * int(math.ceil(math.pi * radius / self.h))
        if n_theta < 4 or n_theta % 2:
            raise ValueError("n_theta must be an even number >= 4")
        self.n_theta = n_theta
        self.theta = 2 * math.pi * np.arange(n_theta) / n_theta
        self.m = np.arange(n_theta // 2 + 1)
        self.mask = (self.m[None, :] * self.h / self.r[:, None]) <= ANGULAR_RESOLUTION
        self.m2_over_r2 = np.where(self.mask, (self.m[None, :] / self.r[:, None]) ** 2, 0.0)
        # rfft coefficient weights for Parseval: modes other than 0 and N/2 appear twice.
        w = np.full(len(self.m), 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        self.parseval = w / n_theta**2

    def to_modes(self, field):
        return np.fft.rfft(field, axis=1) * self.mask

    def laplacian(self, u):
        """Discrete Laplacian of the mode coefficients on rings ``0 .. nr-2``."""
        h, r = self.h, self.r
        flux = self.r_face[:, None] * (u[1:] - u[:-1])  # r_{j+1/2} (u_{j+1} - u_j)
        radial = np.zeros_like(u[:-1])
        radial += flux
        radial[1:] -= flux[:-1]
        radial /= r[:-1, None] * h * h
        return radial - self.m2_over_r2[:-1] * u[:-1]

    def energy(self, u, u_old, dt, c):
        """Leapfrog energy between two levels; the boundary ring carries half a cell of kinetic energy."""
        h, r = self.h, self.r
        ut = (u - u_old) / dt
        kin_w = r * h
        kin_w[-1] *= 0.5
        kin = np.sum(kin_w[:, None] * np.abs(ut) ** 2 * self.parseval)
        grad_r = np.real((u[1:] - u[:-1]) * np.conj(u_old[1:] - u_old[:-1]))
        pot_r = np.sum(self.r_face[:, None] / h * grad_r * self.parseval)
        ang = np.real(u * np.conj(u_old)) * self.m2_over_r2
        pot_t = np.sum(kin_w[:, None] * ang * self.parseval)
        return float(0.5 * 2 * math.pi * (kin + c**2 * (pot_r + pot_t)))


def _initial_field(grid: _PolarGrid, pulse):
    if pulse is None:
        return np.zeros((grid.nr, grid.n_theta))
    cx, cy = pulse.center
    x = grid.r[:, None] * np.cos(grid.theta)[None, :]
    y = grid.r[:, None] * np.sin(grid.theta)[None, :]
    return pulse.amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * pulse.width**2))


def _run_disk(grid, u0_modes, coeffs, c, dt, nsteps):
    h = grid.h
    courant2 = (c * dt) ** 2
    u_old = u0_modes.copy()
    u = u_old.copy()
    u[:-1] += 0.5 * courant2 * grid.laplacian(u_old)
    u[-1] = boundary_update(u_old[-1], u[-2], u[-3], u_old[-2], u_old[-3], coeffs, h, dt)
    u *= grid.mask
    times = [0.5 * dt]
    energies = [grid.energy(u, u_old, dt, c)]
    e_ref = energies[0]
    for step in range(1, nsteps):
        new = np.empty_like(u)
        new[:-1] = 2 * u[:-1] - u_old[:-1] + courant2 * grid.laplacian(u)
        new[-1] = boundary_update(u[-1], new[-2], new[-3], u[-2], u[-3], coeffs, h, dt)
        u_old, u = u, new
        e = grid.energy(u, u_old, dt, c)
        if not math.isfinite(e):
            if not np.all(np.isfinite(u[0])):
                raise PoleSingularity(f"innermost ring diverged at step {step}")
            raise UnstableRun(f"energy became non-finite at step {step}")
        if e_ref > 0 and e > GROWTH_LIMIT * e_ref:
            raise UnstableRun(f"energy grew from {e_ref:.3e} to {e:.3e} at step {step}")
        times.append((step + 0.5) * dt)
        energies.append(e)
    return EnergyTrace(times, energies)


def run_2d_disk(config: SimulationConfig):
    """Run the same initial pulse twice: full boundary operator and characteristic-only.

    The pulse starts at rest.  ``config.boundary.operator`` must be the scalar
    operator of the circle of radius ``R``; the second run drops its
    zeroth-order (curvature) term.  ``duration`` defaults to ``3 R / c``.

    Returns
    -------
    (EnergyTrace, EnergyTrace)
        Energy with the full operator, and with the characteristic-only one.
        The last entry of each trace is the residual energy left in the disk.

    Raises
    ------
    PoleSingularity
        If the innermost ring diverges.
    UnstableRun
        If the energy grows more than tenfold or turns non-finite elsewhere.
    """
    if config.domain is not Domain.DISK:
        raise ValueError("run_2d_disk needs a disk domain")
    if config.boundary.kind is BoundaryKind.DIRICHLET:
        raise ValueError("the disk comparison needs an absorbing boundary operator")
    pulse = config.source
    if pulse is not None and not isinstance(pulse, GaussianPulse):
        raise ValueError("run_2d_disk needs a GaussianPulse source")
    if pulse is not None and len(np.atleast_1d(pulse.center)) != 2:
        raise ValueError("a disk pulse needs a 2D center (x, y)")
    (radius,) = config.lengths
    grid = _PolarGrid(radius, config.h, config.n_theta)
    c = config.c
    dt = config.cfl * grid.h / c
    duration = config.duration if config.duration is not None else 3.0 * radius / c
    nsteps = max(1, int(math.ceil(duration / dt - 1e-9)))

    modes = grid.to_modes(_initial_field(grid, pulse))
    full = Boundary(BoundaryKind.TTBC, config.boundary.operator).resolved()
    bare = Boundary(BoundaryKind.CHARACTERISTIC_ONLY, config.boundary.operator).resolved()
    return (
        _run_disk(grid, modes, full, c, dt, nsteps),
        _run_disk(grid, modes, bare, c, dt, nsteps),
    )
