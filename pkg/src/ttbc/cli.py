"""Command-line front end: ``ttbc derive | verify | simulate | reflection | list-models``.

Exit codes
----------
0  success
1  malformed input or configuration (unknown key, invalid model, empty selection, unreadable file)
2  the coefficients are not hyperbolic in the normal direction (report on stderr)
3  ``verify`` found a failing check (the first one is named on stderr)
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import sys
from pathlib import Path

from ._version import __version__
from .errors import NonPositiveSpectrum, TtbcError
from .harness import (
    Boundary,
    BoundaryKind,
    Domain,
    GaussianPulse,
    PlaneWave,
    SimulationConfig,
    analytic_plane_reflection,
    run_1d,
    run_2d_disk,
    run_2d_plane_reflection,
    write_csv,
    write_metadata,
)
from .models import MODEL_KINDS, Geometry, ScalarWave, build, reduce_degenerate
from .operator import SystemCoefficients, derive_operator, validate_hyperbolicity
from .serialize import (
    SCHEMA_VERSION,
    SchemaError,
    _check_keys,
    check_version,
    dumps,
    loads,
    operator_document,
    parse_derive_input,
    provenance,
    read_operator_document,
)
from .tolerance import ToleranceConfig
from .verify import SUITES, load_fixtures, run_suites

EXIT_OK, EXIT_INPUT, EXIT_HYPERBOLICITY, EXIT_VERIFY = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


# -- helpers ----------------------------------------------------------------

def _read_input(path):
    p = Path(path)
    if not p.is_file():
        raise CliError(f"input file {path} does not exist")
    return p.read_bytes()


def _check_output(path):
    if path is None:
        return None
    p = Path(path)
    if not p.parent.exists():
        raise CliError(f"output directory {p.parent} does not exist")
    return p


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _tolerance(args):
    tol = ToleranceConfig.from_env()
    if args.tolerance_scale is not None:
        tol = tol.scaled(args.tolerance_scale)
    return tol


# -- derive -----------------------------------------------------------------

def cmd_derive(args):
    out = _check_output(args.output)
    raw = _read_input(args.input)
    tol = _tolerance(args)
    source, reduce = parse_derive_input(loads(raw.decode()))
    coeffs = source if isinstance(source, SystemCoefficients) else build(source)
    excluded = []
    if reduce:
        coeffs, excluded = reduce_degenerate(coeffs, tol)
    report = validate_hyperbolicity(coeffs, tol)
    if not report.ok:
        sys.stderr.write(json.dumps({"hyperbolicity": report.as_dict()}, indent=2) + "\n")
        raise CliError(report.message, EXIT_HYPERBOLICITY)
    op = derive_operator(coeffs, tol)
    _emit(dumps(operator_document(op, report, raw, excluded)), out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _suite_selection(values):
    if values is None:
        return list(SUITES)
    names = [s.strip() for v in values for s in v.split(",") if s.strip()]
    if not names:
        raise CliError("empty suite selection; nothing to verify")
    return names


def cmd_verify(args):
    out = _check_output(args.output)
    suites = _suite_selection(args.suite)
    tol = _tolerance(args)
    if args.fixtures is not None:
        raw = _read_input(args.fixtures)
        fixtures = load_fixtures(raw.decode())
    else:
        fixtures = load_fixtures()
        raw = dumps(fixtures).encode()
    try:
        results = run_suites(suites, fixtures, tol)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    passed = all(r.passed for r in results)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "passed": passed,
        "suites": suites,
        "checks": [r.as_dict() for r in results],
        "provenance": provenance(raw),
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)
    if not passed:
        first = next(r for r in results if not r.passed)
        raise CliError(
            f"check {first.suite}/{first.name} failed: error {first.error:.3e} > {first.tolerance:.1e}"
            + (f" ({first.detail})" if first.detail else ""),
            EXIT_VERIFY,
        )
    return EXIT_OK


# -- simulation configs -----------------------------------------------------

_SIM_KEYS = {"schema_version", "domain", "lengths", "h", "c", "cfl", "duration", "n_theta", "source", "boundary"}
_BOUNDARY_KEYS = {"kind", "operator_file"}


def _number(doc, key, where, default=None, required=False):
    if key not in doc or doc[key] is None:
        if required:
            raise SchemaError(f"missing key {key!r} in {where}")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}.{key} must be a finite number, got {v!r}")
    return v


def _parse_source(doc):
    if doc is None:
        return None
    kind = doc.get("type") if isinstance(doc, dict) else None
    if kind == "gaussian":
        _check_keys(doc, {"type", "center", "width", "amplitude", "direction"}, "source", required=("center", "width"))
        center = doc["center"]
        if isinstance(center, list):
            center = tuple(float(x) for x in center)
        else:
            center = _number(doc, "center", "source")
        return GaussianPulse(center, _number(doc, "width", "source"), _number(doc, "amplitude", "source", 1.0),
                             int(_number(doc, "direction", "source", 1)))
    if kind == "plane_wave":
        keys = {"type", "angle_deg", "omega", "cycles", "source_x"}
        _check_keys(doc, keys, "source", required=("angle_deg", "omega"))
        return PlaneWave(math.radians(_number(doc, "angle_deg", "source")), _number(doc, "omega", "source"),
                         _number(doc, "cycles", "source", 2.0), _number(doc, "source_x", "source", 0.1))
    raise SchemaError("source.type must be \"gaussian\" or \"plane_wave\"")


def _boundary(doc, domain, lengths, c, base_dir):
    doc = {"kind": "ttbc"} if doc is None else doc
    _check_keys(doc, _BOUNDARY_KEYS, "boundary")
    kind = BoundaryKind(doc.get("kind", "ttbc"))
    if kind is BoundaryKind.DIRICHLET:
        return Boundary(kind)
    if doc.get("operator_file"):
        path = Path(doc["operator_file"])
        if not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise CliError(f"operator file {path} does not exist")
        op = read_operator_document(path)
    elif domain is Domain.DISK:
        op = derive_operator(build(ScalarWave(c=c, dim=2, geometry=Geometry.CIRCLE, r=lengths[0])))
    else:
        op = derive_operator(build(ScalarWave(c=c, dim=2, geometry=Geometry.PLANE)))
    return Boundary(kind, op)


def parse_simulation(doc, base_dir=Path(".")) -> SimulationConfig:
    """Simulation config from its JSON form; the boundary operator defaults to the scalar wave's own."""
    _check_keys(doc, _SIM_KEYS, "simulation config", required=("domain", "lengths", "h"))
    check_version(doc, "simulation config")
    try:
        domain = Domain(doc["domain"])
    except ValueError:
        raise SchemaError(f"unknown domain {doc['domain']!r}") from None
    lengths = doc["lengths"]
    if not isinstance(lengths, list) or not all(isinstance(x, (int, float)) for x in lengths):
        raise SchemaError("lengths must be a list of numbers")
    c = _number(doc, "c", "simulation config", 1.0)
    n_theta = doc.get("n_theta")
    if n_theta is not None and (isinstance(n_theta, bool) or not isinstance(n_theta, int)):
        raise SchemaError("n_theta must be an integer")
    return SimulationConfig(
        domain=domain,
        lengths=tuple(lengths),
        h=_number(doc, "h", "simulation config", required=True),
        source=_parse_source(doc.get("source")),
        boundary=_boundary(doc.get("boundary"), domain, tuple(lengths), c, base_dir),
        c=c,
        cfl=_number(doc, "cfl", "simulation config"),
        duration=_number(doc, "duration", "simulation config"),
        n_theta=n_theta,
    )


def _config_meta(config):
    meta = dataclasses.asdict(config)
    meta["boundary"] = {"kind": config.boundary.kind.value, "resolved": config.boundary.resolved()}
    return meta


def cmd_simulate(args):
    out = _check_output(args.output)
    raw = _read_input(args.input)
    config = parse_simulation(loads(raw.decode()), Path(args.input).parent)
    meta = {"config": _config_meta(config), "provenance": provenance(raw)}
    if config.domain is Domain.INTERVAL:
        trace, report = run_1d(config)
        columns = {"t": trace.times, "energy": trace.energies}
        meta["report"] = dataclasses.asdict(report)
    elif config.domain is Domain.DISK:
        full, bare = run_2d_disk(config)
        columns = {"t": full.times, "energy_full": full.energies, "energy_characteristic": bare.energies}
        meta["terminal_energy"] = {"full": full.final, "characteristic_only": bare.final}
    else:
        report = run_2d_plane_reflection(config)
        columns = {
            "theta_deg": [math.degrees(report.angle)],
            "measured": [report.measured_ratio],
            "analytic": [report.analytic_ratio],
            "rel_error": [report.relative_error],
        }
        meta["report"] = dataclasses.asdict(report)
    if out is None:
        raise CliError("simulate needs --output")
    write_csv(out, columns)
    write_metadata(args.metadata or out.with_suffix(".meta.json"), meta)
    return EXIT_OK


# -- reflection sweep -------------------------------------------------------

_SWEEP_KEYS = {"schema_version", "angles_deg", "lengths", "h", "c", "cfl", "omega", "cycles", "source_x",
               "duration", "boundary"}


def parse_sweep(doc, base_dir=Path(".")):
    """Return ``(angles_deg, [SimulationConfig per angle])`` for a reflection sweep."""
    _check_keys(doc, _SWEEP_KEYS, "reflection config", required=("angles_deg", "h", "omega"))
    check_version(doc, "reflection config")
    angles = doc["angles_deg"]
    if not isinstance(angles, list) or not all(isinstance(a, (int, float)) for a in angles):
        raise SchemaError("angles_deg must be a list of numbers")
    if not angles:
        raise CliError("empty angle list; nothing to sweep")
    lengths = tuple(doc.get("lengths", [1.0, 1.0]))
    c = _number(doc, "c", "reflection config", 1.0)
    boundary = _boundary(doc.get("boundary"), Domain.RECTANGLE, lengths, c, base_dir)
    configs = []
    for a in angles:
        wave = PlaneWave(math.radians(a), _number(doc, "omega", "reflection config"),
                         _number(doc, "cycles", "reflection config", 2.0),
                         _number(doc, "source_x", "reflection config", 0.1))
        configs.append(SimulationConfig(Domain.RECTANGLE, lengths, _number(doc, "h", "reflection config"), wave,
                                        boundary, c=c, cfl=_number(doc, "cfl", "reflection config"),
                                        duration=_number(doc, "duration", "reflection config")))
    return [float(a) for a in angles], configs


def _reflection_row(config):
    try:
        r = run_2d_plane_reflection(config)
        return r.measured_ratio, r.relative_error, ""
    except TtbcError as exc:
        return math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def cmd_reflection(args):
    out = _check_output(args.output)
    raw = _read_input(args.input)
    angles, configs = parse_sweep(loads(raw.decode()), Path(args.input).parent)
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_reflection_row, configs))
    else:
        rows = [_reflection_row(c) for c in configs]
    dirichlet = configs[0].boundary.kind is BoundaryKind.DIRICHLET
    analytic = [1.0 if dirichlet else analytic_plane_reflection(math.radians(a)) for a in angles]
    columns = {
        "theta_deg": angles,
        "measured": [r[0] for r in rows],
        "analytic": analytic,
        "rel_error": [r[1] for r in rows],
        "error": [r[2] for r in rows],
    }
    if out is None:
        raise CliError("reflection needs --output")
    write_csv(out, columns)
    failed = [a for a, r in zip(angles, rows) if r[2]]
    for a, r in zip(angles, rows):
        if r[2]:
            sys.stderr.write(f"theta={a:g}: {r[2]}\n")
    if len(failed) == len(angles):
        raise CliError("every angle failed")
    return EXIT_OK


# -- list-models ------------------------------------------------------------

def model_catalogue() -> dict:
    out = {}
    for kind, cls in MODEL_KINDS.items():
        fields = {}
        for f in dataclasses.fields(cls):
            if f.default is dataclasses.MISSING:
                fields[f.name] = "required"
            else:
                d = f.default
                fields[f.name] = d.value if hasattr(d, "value") else d
        out[kind] = {"fields": fields, "doc": (cls.__doc__ or "").strip().splitlines()[0] if cls.__doc__ else ""}
    return out


def cmd_list_models(args):
    cat = model_catalogue()
    if args.format == "json":
        sys.stdout.write(json.dumps(cat, indent=2) + "\n")
    else:
        for kind, info in cat.items():
            parts = [k if v == "required" else f"{k}={v}" for k, v in info["fields"].items()]
            sys.stdout.write(f"{kind}: {', '.join(parts)}\n")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="ttbc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tolerance-scale", type=float, default=None,
                        help="multiply residual tolerances (overrides TTBC_TOLERANCE_SCALE)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="derive the boundary operator of a model or coefficient set")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", help="operator JSON (stdout if omitted)")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("verify", help="run the oracle and residual suites")
    p.add_argument("--suite", action="append", help=f"suite(s) to run, comma separated; default all of {SUITES}")
    p.add_argument("--fixtures", help="fixture document (default: the shipped one)")
    p.add_argument("--output", "-o", help="report JSON (stdout if omitted)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="run one finite-difference simulation")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True, help="CSV of the energy trace or reflection report")
    p.add_argument("--metadata", help="run metadata JSON (default: <output>.meta.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reflection", help="sweep oblique plane-wave reflection over angles")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--jobs", "-j", type=int, default=1, help="angles simulated in parallel")
    p.set_defaults(func=cmd_reflection)

    p = sub.add_parser("list-models", help="list the built-in models and their parameters")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_list_models)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"ttbc {args.command}: {exc}\n")
        return exc.code
    except NonPositiveSpectrum as exc:
        sys.stderr.write(f"ttbc {args.command}: not hyperbolic: {exc}\n")
        return EXIT_HYPERBOLICITY
    except (SchemaError, TtbcError, ValueError, OSError, UnicodeDecodeError) as exc:
        sys.stderr.write(f"ttbc {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
