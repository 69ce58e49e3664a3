"""Finite-difference harness: scalar waves closed by derived boundary operators."""

from .config import (
    Boundary,
    BoundaryKind,
    Domain,
    EnergyTrace,
    GaussianPulse,
    PlaneWave,
    ReflectionReport,
    SimulationConfig,
    analytic_plane_reflection,
)
from .measure import measure_reflection, write_csv, write_metadata
from .wave1d import run_1d
from .plane2d import run_2d_plane_reflection
from .disk import run_2d_disk
