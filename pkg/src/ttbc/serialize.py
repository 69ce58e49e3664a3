"""JSON documents for models, coefficient sets and derived operators.

Every document carries ``"schema_version": 1``.  Matrices are row-major
nested lists.  Floats are written with Python's shortest round-trip
representation, so reading a written operator gives back the identical
binary values.  Parsing is strict: unknown keys raise :class:`SchemaError`
naming the key.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from ._version import __version__
from .models import MODEL_KINDS, ModelSpec
from .operator import HyperbolicityReport, SystemCoefficients, TtbcOperator

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """A JSON document does not follow the expected layout."""


def _check_keys(doc, allowed, where, required=()):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where} must be a JSON object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise SchemaError(f"unknown key {unknown[0]!r} in {where}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise SchemaError(f"missing key {missing[0]!r} in {where}")


def check_version(doc, where="document"):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where} must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{where} needs \"schema_version\": {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")


def matrix_to_list(m):
    return [[float(x) for x in row] for row in np.atleast_2d(np.asarray(m, dtype=float))]


def matrix_from_list(value, name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{name} is not a numeric matrix") from None
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise SchemaError(f"{name} must be a nested list of rows, got {arr.ndim} dimension(s)")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{name} contains non-finite entries")
    return arr


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(f"{name} must be a finite number, got {value!r}")
    return value


# -- models ---------------------------------------------------------------

def model_to_dict(spec: ModelSpec) -> dict:
    out = {"kind": spec.kind}
    for f in dataclasses.fields(spec):
        v = getattr(spec, f.name)
        out[f.name] = v.value if hasattr(v, "value") else v
    return out


def model_from_dict(doc) -> ModelSpec:
    """Build a model spec from ``{"kind": ..., <fields>}``; unknown kinds and fields are rejected."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError("model needs a \"kind\" key")
    kind = doc["kind"]
    if kind not in MODEL_KINDS:
        raise SchemaError(f"unknown model kind {kind!r}; known: {sorted(MODEL_KINDS)}")
    cls = MODEL_KINDS[kind]
    fields = {f.name: f for f in dataclasses.fields(cls)}
    _check_keys(doc, set(fields) | {"kind"}, f"model {kind!r}")
    kwargs = {k: v for k, v in doc.items() if k != "kind"}
    for k, v in kwargs.items():
        if k not in ("geometry", "vti", "dim", "normal_axis") and v is not None:
            _number(v, f"model.{k}")
    missing = [k for k, f in fields.items() if k not in kwargs and f.default is dataclasses.MISSING]
    if missing:
        raise SchemaError(f"missing key {missing[0]!r} in model {kind!r}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise SchemaError(str(exc)) from None


# -- coefficient sets -------------------------------------------------------

_COEFF_KEYS = {"a", "b", "c0", "j", "d_tau", "tangential_dims"}
# Tangential second-order, tangential first-order and zero-order coefficients
# of the full system: accepted so complete system descriptions validate, but
# the boundary operator does not depend on them.
_UNUSED_COEFF_KEYS = {"a_tangential", "c_tangential", "d"}


def coefficients_to_dict(coeffs: SystemCoefficients) -> dict:
    return {
        "a": matrix_to_list(coeffs.a),
        "b": [matrix_to_list(m) for m in coeffs.b],
        "c0": matrix_to_list(coeffs.c0),
        "j": None if coeffs.j is None else matrix_to_list(coeffs.j),
        "d_tau": [matrix_to_list(m) for m in coeffs.d_tau],
        "tangential_dims": coeffs.tangential_dims,
    }


def coefficients_from_dict(doc) -> SystemCoefficients:
    _check_keys(doc, _COEFF_KEYS | _UNUSED_COEFF_KEYS, "coefficients", required=("a",))
    kwargs = {"a": matrix_from_list(doc["a"], "coefficients.a")}
    for key in ("c0", "j"):
        if doc.get(key) is not None:
            kwargs[key] = matrix_from_list(doc[key], f"coefficients.{key}")
    for key in ("b", "d_tau"):
        if doc.get(key) is not None:
            if not isinstance(doc[key], list):
                raise SchemaError(f"coefficients.{key} must be a list of matrices")
            kwargs[key] = tuple(matrix_from_list(m, f"coefficients.{key}[{i}]") for i, m in enumerate(doc[key]))
    if "tangential_dims" in doc:
        kwargs["tangential_dims"] = doc["tangential_dims"]
    return SystemCoefficients(**kwargs)


# -- derive input -----------------------------------------------------------

_DERIVE_KEYS = {"schema_version", "model", "coefficients", "reduce_degenerate"}


def parse_derive_input(doc):
    """Return ``(source, reduce)`` where ``source`` is a model spec or :class:`SystemCoefficients`."""
    _check_keys(doc, _DERIVE_KEYS, "derive input")
    check_version(doc, "derive input")
    has_model, has_coeffs = "model" in doc, "coefficients" in doc
    if has_model == has_coeffs:
        raise SchemaError("derive input needs exactly one of \"model\" or \"coefficients\"")
    reduce = doc.get("reduce_degenerate", True)
    if not isinstance(reduce, bool):
        raise SchemaError("reduce_degenerate must be true or false")
    if has_model:
        return model_from_dict(doc["model"]), reduce
    return coefficients_from_dict(doc["coefficients"]), reduce


# -- operators --------------------------------------------------------------

def operator_to_dict(op: TtbcOperator) -> dict:
    out = {
        "p1": matrix_to_list(op.p1),
        "p_alg": matrix_to_list(op.p_alg),
        "q": [matrix_to_list(m) for m in op.q],
    }
    if op.is_resolved:
        out["resolved_p1"] = matrix_to_list(op.resolved_p1)
        out["resolved_p_alg"] = matrix_to_list(op.resolved_p_alg)
        out["resolved_q"] = [matrix_to_list(m) for m in op.resolved_q]
    return out


def operator_from_dict(doc) -> TtbcOperator:
    keys = {"p1", "p_alg", "q", "resolved_p1", "resolved_p_alg", "resolved_q"}
    _check_keys(doc, keys, "operator", required=("p1", "p_alg", "q"))
    kwargs = {
        "p1": matrix_from_list(doc["p1"], "operator.p1"),
        "p_alg": matrix_from_list(doc["p_alg"], "operator.p_alg"),
        "q": tuple(matrix_from_list(m, f"operator.q[{i}]") for i, m in enumerate(doc["q"])),
    }
    resolved = [k for k in ("resolved_p1", "resolved_p_alg", "resolved_q") if k in doc]
    if resolved and len(resolved) != 3:
        raise SchemaError("operator resolved form needs resolved_p1, resolved_p_alg and resolved_q together")
    if resolved:
        kwargs["resolved_p1"] = matrix_from_list(doc["resolved_p1"], "operator.resolved_p1")
        kwargs["resolved_p_alg"] = matrix_from_list(doc["resolved_p_alg"], "operator.resolved_p_alg")
        kwargs["resolved_q"] = tuple(
            matrix_from_list(m, f"operator.resolved_q[{i}]") for i, m in enumerate(doc["resolved_q"])
        )
    n = kwargs["p1"].shape
    for name, m in kwargs.items():
        for arr in m if isinstance(m, tuple) else (m,):
            if arr.shape != n:
                raise SchemaError(f"operator.{name} has shape {arr.shape}, expected {n}")
    return TtbcOperator(**kwargs)


def operator_document(op: TtbcOperator, report: HyperbolicityReport, input_bytes: bytes, excluded=(), extra=None):
    """Full output of ``derive``: operator, hyperbolicity report and provenance."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "operator": operator_to_dict(op),
        "hyperbolicity": report.as_dict(),
        "excluded_components": [int(i) for i in excluded],
        "provenance": provenance(input_bytes),
    }
    if extra:
        doc.update(extra)
    return doc


def read_operator_document(path) -> TtbcOperator:
    """Operator stored in a file written by ``derive``."""
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise SchemaError("operator file must hold a JSON object")
    check_version(doc, "operator file")
    if "operator" not in doc:
        raise SchemaError("missing key 'operator' in operator file")
    return operator_from_dict(doc["operator"])


# -- files ------------------------------------------------------------------

def provenance(input_bytes: bytes) -> dict:
    return {"tool": "ttbc", "tool_version": __version__, "input_sha256": hashlib.sha256(input_bytes).hexdigest()}


def dumps(doc) -> str:
    """Deterministic JSON text (sorted keys, round-trip floats); NaN and infinity are refused."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str):
    def reject(token):
        raise SchemaError(f"non-finite number {token} is not allowed")

    try:
        return json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def load_json(path):
    return loads(Path(path).read_text())
