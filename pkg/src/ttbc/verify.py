"""Oracle and residual checks run by ``ttbc verify``.

Three suites, each driven by entries of a fixture document:

``oracle``
    The numerical pipeline on an orthotropic cylinder against the stored
    closed-form operator, entry by entry (absolute, ``1e-10``).
``curvature``
    Scalar waves on circles and spheres: the resolved boundary condition must
    read ``u_t + c u_n + (d - 1)/2 * c/r * u = 0`` (relative, ``1e-12``).
``residuals``
    Every defining equation of the derived operator (square root and both
    Sylvester equations) against ``ToleranceConfig.operator_residual``.

The shipped fixtures live in ``ttbc/data/fixtures.json``; they are produced
by :func:`build_fixture_document`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import TtbcError
from .models import BiotCartesian, OrthoCylElastic, ScalarWave, build, closed_form_ortho_operator, reduce_degenerate
from .operator import SystemCoefficients, derive_operator, operator_residuals
from .serialize import (
    SCHEMA_VERSION,
    SchemaError,
    _check_keys,
    check_version,
    coefficients_from_dict,
    coefficients_to_dict,
    loads,
    model_from_dict,
    model_to_dict,
    operator_from_dict,
    operator_to_dict,
)
from .tolerance import DEFAULT, ToleranceConfig

SUITES = ("oracle", "curvature", "residuals")
ORACLE_TOLERANCE = 1e-10
CURVATURE_TOLERANCE = 1e-12


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "error": self.error,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


# -- fixtures -------------------------------------------------------------

ORACLE_MODELS = {
    "ortho_unit": OrthoCylElastic(
        rho=1.0, a11=4.0, a12=1.0, a13=1.0, a22=4.0, a23=1.0, a33=4.0, a44=1.0, a55=1.0, a66=1.0, r=1.0
    ),
    "ortho_general": OrthoCylElastic(
        rho=2.5, a11=10.0, a12=3.0, a13=2.5, a22=9.0, a23=2.0, a33=8.0, a44=3.0, a55=2.5, a66=3.5, r=2.0
    ),
    "ortho_vti": OrthoCylElastic.vti_medium(rho=2.0, a11=12.0, a12=4.0, a13=3.0, a33=9.0, a55=2.5, r=0.5),
}

CURVATURE_SPEEDS = (1.0, 2.0, 340.0)
CURVATURE_RADII = (0.5, 1.0, 10.0)

BIOT_EXAMPLE = BiotCartesian(lam=1.0, mu=1.0, alpha=1.0, m_biot=1.0, rho=1.0, rho_f=0.5, m_eff=2.0)


def _raw_mass_case() -> SystemCoefficients:
    return SystemCoefficients(
        a=[[4.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 2.0]],
        b=([[0.0, 1.0, 0.0], [1.0, 0.0, 0.2], [0.0, 0.2, 0.0]], [[0.3, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.1]]),
        c0=[[1.0, 0.2, 0.0], [0.0, 0.5, 0.0], [0.1, 0.0, 0.7]],
        j=[[2.0, 0.3, 0.0], [0.3, 1.5, 0.0], [0.0, 0.0, 1.0]],
    )


def build_fixture_document() -> dict:
    """The fixture document shipped with the package, computed from the closed forms."""
    oracle = [
        {"name": name, "model": model_to_dict(spec), "expected": operator_to_dict(closed_form_ortho_operator(spec))}
        for name, spec in ORACLE_MODELS.items()
    ]
    curvature = []
    for geometry, dim in (("circle", 2), ("sphere", 3)):
        for c in CURVATURE_SPEEDS:
            for r in CURVATURE_RADII:
                curvature.append(
                    {
                        "name": f"{geometry}_c{c:g}_r{r:g}",
                        "model": model_to_dict(ScalarWave(c=c, dim=dim, geometry=geometry, r=r)),
                        "expected": {"speed": c, "curvature": (dim - 1) / 2 * c / r},
                    }
                )
    residuals = [{"name": name, "model": model_to_dict(spec)} for name, spec in ORACLE_MODELS.items()]
    residuals.append({"name": "biot_unit_reduced", "model": model_to_dict(BIOT_EXAMPLE)})
    residuals.append({"name": "raw_mass_matrix", "coefficients": coefficients_to_dict(_raw_mass_case())})
    return {"schema_version": SCHEMA_VERSION, "oracle": oracle, "curvature": curvature, "residuals": residuals}


def load_fixtures(text: str = None) -> dict:
    """Parse a fixture document; the shipped one when ``text`` is ``None``."""
    if text is None:
        text = resources.files("ttbc").joinpath("data/fixtures.json").read_text()
    doc = loads(text)
    check_version(doc, "fixture document")
    _check_keys(doc, {"schema_version", *SUITES}, "fixture document")
    return doc


# -- checks ---------------------------------------------------------------

def _source(entry, where):
    if ("model" in entry) == ("coefficients" in entry):
        raise SchemaError(f"{where} needs exactly one of \"model\" or \"coefficients\"")
    if "model" in entry:
        return build(model_from_dict(entry["model"]))
    return coefficients_from_dict(entry["coefficients"])


def _oracle_check(entry, tol):
    _check_keys(entry, {"name", "model", "expected"}, "oracle fixture", required=("name", "model", "expected"))
    spec = model_from_dict(entry["model"])
    expected = operator_from_dict(entry["expected"]).matrices()
    derived = derive_operator(build(spec), tol).matrices()
    worst_key, worst = None, 0.0
    for key, ref in expected.items():
        err = float(np.max(np.abs(derived[key] - ref)))
        if not err <= worst:
            worst_key, worst = key, err
    passed = worst <= ORACLE_TOLERANCE
    detail = "" if passed else f"largest deviation in {worst_key}"
    return CheckResult("oracle", entry["name"], passed, worst, ORACLE_TOLERANCE, detail)


def _curvature_check(entry, tol):
    _check_keys(entry, {"name", "model", "expected"}, "curvature fixture", required=("name", "model", "expected"))
    _check_keys(entry["expected"], {"speed", "curvature"}, "curvature expectation", required=("speed", "curvature"))
    op = derive_operator(build(model_from_dict(entry["model"])), tol)
    speed = -float(op.resolved_p1[0, 0])
    curvature = float(op.resolved_p_alg[0, 0])
    exp = entry["expected"]
    err = max(
        abs(speed - exp["speed"]) / max(1.0, abs(exp["speed"])),
        abs(curvature - exp["curvature"]) / max(1.0, abs(exp["curvature"])),
    )
    passed = err <= CURVATURE_TOLERANCE
    detail = "" if passed else f"got speed {speed!r}, curvature {curvature!r}"
    return CheckResult("curvature", entry["name"], passed, err, CURVATURE_TOLERANCE, detail)


def _residual_check(entry, tol):
    _check_keys(entry, {"name", "model", "coefficients"}, "residual fixture", required=("name",))
    coeffs, _ = reduce_degenerate(_source(entry, f"residual fixture {entry['name']!r}"), tol)
    res = operator_residuals(coeffs, derive_operator(coeffs, tol), tol)
    worst_key = max(res, key=res.get)
    err = res[worst_key]
    passed = err <= tol.operator_residual
    detail = "" if passed else f"largest residual in {worst_key}"
    return CheckResult("residuals", entry["name"], passed, err, tol.operator_residual, detail)


_CHECKS = {"oracle": _oracle_check, "curvature": _curvature_check, "residuals": _residual_check}


def run_suites(suites=SUITES, fixtures: dict = None, tol: ToleranceConfig = DEFAULT) -> list:
    """Run the named suites over ``fixtures`` (the shipped ones by default).

    Returns a list of :class:`CheckResult`.  A check whose derivation raises
    a package error is recorded as failed with the message as detail.

    Raises
    ------
    ValueError
        If no suite is selected, a suite name is unknown, or the selected
        suites contain no fixtures.
    """
    suites = list(suites)
    if not suites:
        raise ValueError("no suite selected; nothing to verify")
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; known: {', '.join(SUITES)}")
    fixtures = load_fixtures() if fixtures is None else fixtures
    results = []
    for suite in suites:
        for entry in fixtures.get(suite, []):
            try:
                results.append(_CHECKS[suite](entry, tol))
            except (TtbcError, np.linalg.LinAlgError) as exc:
                name = entry.get("name", "?") if isinstance(entry, dict) else "?"
                results.append(CheckResult(suite, name, False, math.inf, 0.0, f"{type(exc).__name__}: {exc}"))
    if not results:
        raise ValueError(f"suites {suites} contain no fixtures; nothing to verify")
    return results
