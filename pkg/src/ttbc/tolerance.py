"""Numerical tolerances used across the package.

Every threshold is relative to an input norm.  A single :class:`ToleranceConfig`
record carries them so callers can tighten or loosen checks in one place; the
``TTBC_TOLERANCE_SCALE`` environment variable multiplies the residual
tolerances (not the definiteness or symmetry thresholds).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_SCALE = "TTBC_TOLERANCE_SCALE"


@dataclass(frozen=True)
class ToleranceConfig:
    symmetry: float = 1e-10
    positive_definite: float = 1e-12
    sqrt_residual: float = 1e-10
    sylvester_residual: float = 1e-10
    spectra_separation: float = 1e-10
    degenerate_row: float = 1e-12
    operator_residual: float = 1e-9

    def scaled(self, factor: float) -> "ToleranceConfig":
        if not factor > 0:
            raise ValueError(f"tolerance scale must be positive, got {factor!r}")
        return replace(
            self,
            sqrt_residual=self.sqrt_residual * factor,
            sylvester_residual=self.sylvester_residual * factor,
            operator_residual=self.operator_residual * factor,
        )

    @classmethod
    def from_env(cls, environ=None) -> "ToleranceConfig":
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_SCALE)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            factor = float(raw)
        except ValueError:
            raise ValueError(f"{ENV_SCALE} must be a number, got {raw!r}") from None
        return cls().scaled(factor)


DEFAULT = ToleranceConfig()
