"""Oblique plane-wave reflection off a boundary face of a rectangle.

The rectangle ``[0, Lx] x [0, Ly)`` is periodic in ``y`` and closed by the
boundary operator at ``x = 0`` and ``x = Lx`` (for a Dirichlet far face the
``x = 0`` face keeps the characteristic closure).  A line source at
``x = source_x`` radiates a short tone burst with tangential profile
``cos(ky y)``; that profile is a pair of plane waves at angles ``+-theta``,
both reflecting with the same coefficient.

Measurement: the probe line is the segment between the source and the face
at ``x = Lx``.  Its ``cos(ky y)`` component is Fourier transformed in time at
the carrier frequency while the run proceeds.  On the source-free segment that
transform is exactly ``A xi^j + B xi^-j`` with ``xi = exp(i kx h)`` the
discrete wavenumber of the carrier, so a two-term least-squares fit gives the
incident and reflected amplitudes, and ``|B / A|`` is the reflection
coefficient of the face at the carrier's angle.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import FitFailure, UnstableRun
from .config import (
    BoundaryKind,
    Domain,
    PlaneWave,
    ReflectionReport,
    SimulationConfig,
    analytic_plane_reflection,
)
from .wave1d import GROWTH_LIMIT, boundary_update

FIT_TOLERANCE = 0.1
DECAY_STOP = 1e-8
PROBE_MARGIN_CELLS = 10
TRANSITS = 6.0


def discrete_omega(kx, ky, h, dt, c):
    """Frequency of the mode ``exp(i(kx x + ky y - omega t))`` under the 5-point leapfrog scheme."""
    s = np.sqrt(np.sin(kx * h / 2) ** 2 + np.sin(ky * h / 2) ** 2)
    return (2.0 / dt) * np.arcsin(np.clip(c * dt / h * s, 0.0, 1.0))


def discrete_kx(omega, ky, h, dt, c):
    """Inverse of :func:`discrete_omega` in ``kx``; ``nan`` if the mode is evanescent or unresolvable."""
    s2 = (h / (c * dt) * math.sin(omega * dt / 2)) ** 2 - math.sin(ky * h / 2) ** 2
    if not 0 < s2 < 1:
        return float("nan")
    return 2.0 / h * math.asin(math.sqrt(s2))


def snap_tangential_wavenumber(angle: float, omega: float, ly: float, c: float):
    """Nearest periodic tangential wavenumber ``2 pi m / Ly`` and the frequency that keeps ``angle`` exact."""
    if angle == 0:
        return 0.0, omega
    m = max(1, int(round(omega / c * math.sin(angle) * ly / (2 * math.pi))))
    ky = 2 * math.pi * m / ly
    return ky, c * ky / math.sin(angle)


def tone_burst(t, omega, tau, t0):
    return np.exp(-0.5 * ((t - t0) / tau) ** 2) * np.sin(omega * (t - t0))


def fit_two_waves(phi, kx, h):
    """Least-squares ``phi_j = A xi^j + B xi^-j``; returns ``(A, B, relative residual)``."""
    j = np.arange(len(phi))
    basis = np.stack([np.exp(1j * kx * h * j), np.exp(-1j * kx * h * j)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, phi, rcond=None)
    resid = np.linalg.norm(basis @ coef - phi) / max(np.linalg.norm(phi), 1e-300)
    return coef[0], coef[1], float(resid)


def _leapfrog_periodic_y(u, u_old, courant2, out, scratch):
    """Interior leapfrog update of the 5-point scheme, periodic in the second axis, written into ``out``."""
    mid = out[1:-1]
    centre = u[1:-1]
    np.add(u[2:], u[:-2], out=mid)
    mid[:, 1:-1] += centre[:, 2:]
    mid[:, 1:-1] += centre[:, :-2]
    mid[:, 0] += centre[:, 1] + centre[:, -1]
    mid[:, -1] += centre[:, 0] + centre[:, -2]
    mid *= courant2
    np.multiply(centre, 2.0 - 4.0 * courant2, out=scratch)
    mid += scratch
    mid -= u_old[1:-1]
    return out


def _tangential_term(ub, ub_old, q, h):
    """``-q d/dy u`` at the half step, extrapolated from two levels (zero when ``q`` is)."""
    if q == 0.0:
        return 0.0
    mid = 1.5 * ub - 0.5 * ub_old
    return -q * (np.roll(mid, -1) - np.roll(mid, 1)) / (2 * h)


def run_2d_plane_reflection(config: SimulationConfig, return_fit: bool = False):
    """Measure the reflection coefficient of the ``x = Lx`` face for one incidence angle.

    Returns
    -------
    ReflectionReport
        ``incident_amplitude`` and ``reflected_amplitude`` are ``|A|`` and
        ``|B|`` of the two-wave fit; ``analytic_ratio`` is
        ``(1 - cos theta) / (1 + cos theta)`` (1 for a Dirichlet face).

    Raises
    ------
    UnstableRun
        If the discrete energy grows more than tenfold over its running peak.
    FitFailure
        If the carrier cannot propagate on the grid, or the probe data deviate
        from the ``cos(ky y)`` profile or the two-wave form by more than 10 %.
    """
    if config.domain is not Domain.RECTANGLE:
        raise ValueError("run_2d_plane_reflection needs a rectangle")
    wave = config.source
    if not isinstance(wave, PlaneWave):
        raise ValueError("run_2d_plane_reflection needs a PlaneWave source")
    if not 0 <= wave.angle < math.pi / 2:
        raise ValueError("angle must lie in [0, pi/2)")

    lx, ly = config.lengths
    nx = int(round(lx / config.h))
    ny = int(round(ly / config.h))
    h = lx / nx
    if not math.isclose(ly / ny, h, rel_tol=1e-9):
        raise ValueError("Lx and Ly must both be multiples of h")
    c = config.c
    dt = config.cfl * h / c
    y = np.arange(ny) * h

    ky, omega0 = snap_tangential_wavenumber(wave.angle, wave.omega, ly, c)
    kx = discrete_kx(omega0, ky, h, dt, c)
    if not math.isfinite(kx) or kx * h > 0.5 * math.pi:
        raise FitFailure(f"carrier omega={omega0:.4g}, ky={ky:.4g} does not propagate resolvably on this grid")
    tau = wave.cycles * 2 * math.pi / omega0
    t0 = 4.0 * tau
    t_off = t0 + 4.0 * tau
    cos_t = max(math.cos(wave.angle), 0.25)
    t_max = config.duration if config.duration is not None else t_off + TRANSITS * lx / (c * cos_t)
    nsteps = int(math.ceil(t_max / dt - 1e-9))

    i_src = int(round(wave.source_x / h))
    i_lo = i_src + 2
    i_hi = nx - PROBE_MARGIN_CELLS
    if not (1 <= i_src and i_hi - i_lo >= 8):
        raise FitFailure("probe segment between source and face is too short")
    mode = np.cos(ky * y)
    mode_norm = float(mode @ mode)

    dirichlet = config.boundary.kind is BoundaryKind.DIRICHLET
    bc = config.boundary.resolved()
    # The x = 0 face only has to let the back-going half of the source's
    # radiation out; with a hard far wall it falls back to the characteristic
    # closure so the box does not become a lossless cavity.
    bc_lo = (-c, 0.0, 0.0) if dirichlet else bc
    courant2 = (c * dt / h) ** 2
    u_old = np.zeros((nx + 1, ny))
    u = np.zeros((nx + 1, ny))

    def energy(a, b):
        ut = (a - b) / dt
        gx = np.diff(a, axis=0) * np.diff(b, axis=0)
        gy = (np.roll(a, -1, axis=1) - a) * (np.roll(b, -1, axis=1) - b)
        return 0.5 * h * h * (np.sum(ut**2) + c**2 * (gx.sum() + gy.sum()) / h**2)

    phi = np.zeros(i_hi - i_lo, dtype=complex)
    line_resid = 0.0
    line_sig = 0.0
    e_peak = 0.0
    steps_run = 1
    src_scale = (c * dt) ** 2 / h
    new = np.empty_like(u)
    scratch = np.empty((nx - 1, ny))
    for step in range(1, nsteps):
        t = step * dt
        _leapfrog_periodic_y(u, u_old, courant2, new, scratch)
        if t < t_off + tau:
            new[i_src] += src_scale * tone_burst(t, omega0, tau, t0) * mode
        if dirichlet:
            new[-1] = 0.0
        else:
            extra_hi = _tangential_term(u[-1], u_old[-1], bc[2], h)
            new[-1] = boundary_update(u[-1], new[-2], new[-3], u[-2], u[-3], bc, h, dt, extra_hi)
        extra_lo = _tangential_term(u[0], u_old[0], bc_lo[2], h)
        new[0] = boundary_update(u[0], new[1], new[2], u[1], u[2], bc_lo, h, dt, extra_lo)
        u_old, u, new = u, new, u_old
        steps_run = step + 1

        seg = u[i_lo:i_hi]
        amp = seg @ mode / mode_norm
        phi += amp * np.exp(1j * omega0 * (step + 1) * dt)
        sig = float(np.vdot(seg, seg))
        line_sig += sig
        line_resid += max(sig - mode_norm * float(amp @ amp), 0.0)

        if step % 25 == 0:
            e = energy(u, u_old)
            if not math.isfinite(e) or (e_peak > 0 and e > GROWTH_LIMIT * e_peak and t > t_off):
                raise UnstableRun(f"energy grew from {e_peak:.3e} to {e:.3e} at step {step}")
            e_peak = max(e_peak, e)
            if t > t_off and e < DECAY_STOP * e_peak:
                break

    profile_residual = math.sqrt(line_resid / max(line_sig, 1e-300))
    if profile_residual > FIT_TOLERANCE:
        raise FitFailure(f"probe line deviates from the cos(ky y) profile by {profile_residual:.1%}")
    a, b, fit_residual = fit_two_waves(phi * dt, kx, h)
    if fit_residual > FIT_TOLERANCE:
        raise FitFailure(f"two-wave fit leaves {fit_residual:.1%} of the probe signal unexplained")

    analytic = 1.0 if dirichlet else analytic_plane_reflection(wave.angle)
    report = ReflectionReport.from_amplitudes(
        wave.angle,
        float(abs(a)),
        float(abs(b)),
        analytic,
        omega=omega0,
        ky=ky,
        kx=kx,
        points_per_wavelength=2 * math.pi / (math.hypot(kx, ky) * h),
        fit_residual=fit_residual,
        profile_residual=profile_residual,
        final_time=steps_run * dt,
        grid=(nx + 1, ny),
    )
    if return_fit:
        return report, phi * dt
    return report
