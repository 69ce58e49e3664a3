"""Truncated transparent boundary conditions for second-order hyperbolic systems."""

from .errors import *  # noqa: F401,F403
from .linalg import (
    eig_sym,
    j_weighted_sqrt,
    solve_sylvester_general,
    solve_sylvester_sym,
    spd_inv_sqrt,
    spd_sqrt,
)
from .models import (
    BiotCartesian,
    Geometry,
    OrthoCylElastic,
    ScalarWave,
    build,
    build_biot,
    build_ortho_cyl,
    build_scalar_wave,
    closed_form_ortho_operator,
    reduce_degenerate,
)
from .operator import (
    HyperbolicityReport,
    SystemCoefficients,
    TtbcOperator,
    derive_operator,
    derive_p,
    derive_p1,
    derive_q,
    evaluate_symbol,
    operator_residuals,
    to_resolved_form,
    validate_hyperbolicity,
)
from .tolerance import ToleranceConfig

from ._version import __version__
