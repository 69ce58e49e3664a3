"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one ``PASS``/``FAIL`` line to the terminal, also
under pytest's output capture. Run the file directly for the summary alone::

    python3 tests/test_acceptance.py
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import random_system  # noqa: E402
from ttbc import (  # noqa: E402
    BiotCartesian,
    ScalarWave,
    build,
    build_biot,
    closed_form_ortho_operator,
    derive_operator,
    linalg,
    operator_residuals,
    reduce_degenerate,
    validate_hyperbolicity,
)
from ttbc.cli import EXIT_OK, EXIT_VERIFY, main  # noqa: E402
from ttbc.harness import (  # noqa: E402
    Boundary,
    BoundaryKind,
    Domain,
    GaussianPulse,
    PlaneWave,
    SimulationConfig,
    run_1d,
    run_2d_disk,
    run_2d_plane_reflection,
)
from ttbc.operator import sylvester_coefficient  # noqa: E402
from ttbc.serialize import dumps, loads, model_to_dict, operator_from_dict  # noqa: E402
from ttbc.verify import CURVATURE_RADII, CURVATURE_SPEEDS, ORACLE_MODELS, build_fixture_document  # noqa: E402

PLANE = derive_operator(build(ScalarWave(c=1.0, geometry="plane")))
CIRCLE = derive_operator(build(ScalarWave(c=1.0, geometry="circle", r=1.0)))


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny)


def criterion_oracle():
    worst = 0.0
    for spec in ORACLE_MODELS.values():
        got = derive_operator(build(spec)).matrices()
        for key, ref in closed_form_ortho_operator(spec).matrices().items():
            worst = max(worst, float(np.max(np.abs(got[key] - ref))))
    return worst <= 1e-10, f"{len(ORACLE_MODELS)} parameter sets, max abs deviation {worst:.2e} (<= 1e-10)", 1.0


def criterion_curvature():
    worst = 0.0
    count = 0
    for geometry, d in (("circle", 2), ("sphere", 3)):
        for c in CURVATURE_SPEEDS:
            for r in CURVATURE_RADII:
                op = derive_operator(build(ScalarWave(c=c, dim=d, geometry=geometry, r=r)))
                speed, curv = -op.resolved_p1[0, 0], op.resolved_p_alg[0, 0]
                worst = max(worst, abs(speed - c) / c, abs(curv - (d - 1) / 2 * c / r) / ((d - 1) / 2 * c / r))
                count += 1
    return worst <= 1e-12, f"{count} circle/sphere cases, max rel deviation {worst:.2e} (<= 1e-12)", 1.0


def criterion_linalg():
    rng = np.random.default_rng(12345)
    root, sylv, resolved = 0.0, 0.0, 0.0
    for i in range(100):
        n = 1 + i % 8
        coeffs = random_system(rng, n)
        a = coeffs.a
        s = linalg.spd_sqrt(a)
        root = max(root, np.linalg.norm(s @ s - a) / np.linalg.norm(a))
        op = derive_operator(coeffs)
        res = operator_residuals(coeffs, op)
        sylv = max(sylv, res["q1"], res["q2"], res["p"], res["p1_square"])
        l = sylvester_coefficient(coeffs)
        for bk, xi in zip(coeffs.b, op.resolved_q):
            resolved = max(resolved, _rel(xi, scipy.linalg.solve_sylvester(l, l, l @ bk @ l)))
        rhs = l @ (coeffs.c0 @ l + sum(bk @ dk for bk, dk in zip(coeffs.b, coeffs.d_tau)))
        rhs = rhs + np.linalg.solve(l, sum(qk @ dk for qk, dk in zip(op.q, coeffs.d_tau)))
        resolved = max(resolved, _rel(op.resolved_p_alg, scipy.linalg.solve_sylvester(l, l, rhs)))
    ok = root <= 1e-10 and sylv <= 1e-10 and resolved <= 1e-8
    return ok, (f"100 systems n<=8: sqrt {root:.2e}, sylvester {sylv:.2e} (<= 1e-10), "
                f"resolved form {resolved:.2e} (<= 1e-8)"), 5.0


def criterion_biot():
    spec = BiotCartesian(lam=1.0, mu=1.0, alpha=1.0, m_biot=1.0, rho=1.0, rho_f=0.5, m_eff=2.0)
    coeffs, excluded = reduce_degenerate(build_biot(spec))
    report = validate_hyperbolicity(coeffs)
    op = derive_operator(coeffs)
    p1_err = float(np.max(np.abs(op.p1 @ op.p1 @ coeffs.effective_a() - np.eye(coeffs.n))))
    res = operator_residuals(coeffs, op)
    sylv = max(res["q1"], res["q2"], res["p"])
    lam_min = min(report.eigenvalues)
    ok = coeffs.n == 4 and report.ok and lam_min > 0 and p1_err <= 1e-9 and sylv <= 1e-9
    return ok, (f"reduced n={coeffs.n} (dropped {excluded}), min eigenvalue {lam_min:.3f}, "
                f"P1 P1 J^-1 C - I {p1_err:.2e}, sylvester {sylv:.2e} (<= 1e-9)"), 1.0


def _interval(n):
    return SimulationConfig(Domain.INTERVAL, (1.0,), 1.0 / n, GaussianPulse(0.5, 0.05),
                            Boundary(BoundaryKind.TTBC, PLANE))


def criterion_1d():
    ratios = [run_1d(_interval(n))[1].measured_ratio for n in (1000, 2000, 4000)]
    orders = [math.log2(ratios[i] / ratios[i + 1]) for i in range(2)]
    ok = ratios[0] <= 1e-3 and min(orders) >= 1.8
    return ok, (f"ratio at 1000 cells {ratios[0]:.2e} (<= 1e-3), "
                f"observed orders {orders[0]:.2f}, {orders[1]:.2f} (>= 1.8)"), 10.0


def criterion_2d():
    h, omega = 1.0 / 400, 2 * math.pi * 8
    parts, ok = [], True
    for angle in (0, 30, 45):
        cfg = SimulationConfig(Domain.RECTANGLE, (1.0, 1.0), h, PlaneWave(math.radians(angle), omega),
                               Boundary(BoundaryKind.TTBC, PLANE))
        r = run_2d_plane_reflection(cfg)
        if angle == 0:
            ok &= r.measured_ratio <= 5e-3
            parts.append(f"0deg {r.measured_ratio:.2e} (<= 5e-3)")
        else:
            ok &= r.relative_error <= 0.1
            parts.append(f"{angle}deg {r.measured_ratio:.4f} vs {r.analytic_ratio:.4f} ({100 * r.relative_error:.1f}%)")
    return ok, "400x400: " + ", ".join(parts), 120.0


def criterion_disk():
    margins = []
    for center in ((0.3, 0.0), (-0.2, 0.4), (0.0, -0.5)):
        cfg = SimulationConfig(Domain.DISK, (1.0,), 0.01, GaussianPulse(center, 0.1),
                               Boundary(BoundaryKind.TTBC, CIRCLE))
        full, bare = run_2d_disk(cfg)
        margins.append((bare.final - full.final) / bare.final)
    ok = min(margins) >= 0.1
    return ok, "margins over characteristic-only " + ", ".join(f"{100 * m:.0f}%" for m in margins) + " (>= 10%)", 60.0


def criterion_cli(tmp_path):
    model = model_to_dict(ORACLE_MODELS["ortho_vti"])
    inp, out = tmp_path / "in.json", tmp_path / "op.json"
    inp.write_text(dumps({"schema_version": 1, "model": model}))
    code = main(["derive", "-i", str(inp), "-o", str(out)])
    text = out.read_text()
    doc = loads(text)
    op = operator_from_dict(doc["operator"])
    again = operator_from_dict(loads(dumps(doc))["operator"])
    stable = code == EXIT_OK and dumps(doc) == text and all(
        np.array_equal(m, again.matrices()[k]) for k, m in op.matrices().items())
    fixtures = build_fixture_document()
    fixtures["oracle"][0]["expected"]["p1"][0][0] += 1e-3
    bad = tmp_path / "fx.json"
    bad.write_text(dumps(fixtures))
    fault = main(["verify", "--fixtures", str(bad), "-o", str(tmp_path / "r.json")])
    return stable and fault == EXIT_VERIFY, f"round trip bit-stable {stable}, perturbed fixture exit {fault} (3)", 1.0


CRITERIA = [
    (1, "closed-form oracle equivalence", criterion_oracle),
    (2, "curved scalar-wave cross-check", criterion_curvature),
    (3, "linear-algebra property suite", criterion_linalg),
    (4, "Biot operator validity", criterion_biot),
    (5, "1D absorption", criterion_1d),
    (6, "2D oblique reflection", criterion_2d),
    (7, "curvature-term benefit on the disk", criterion_disk),
    (8, "CLI round trip and fault injection", criterion_cli),
]


def evaluate(func, *args):
    """Run one criterion; returns ``(passed, summary line)`` including the runtime budget."""
    start = time.perf_counter()
    try:
        ok, detail, budget = func(*args)
    except Exception as exc:  # a crash is reported as a failure line, then re-raised by the test
        return False, f"raised {type(exc).__name__}: {exc}", exc
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    return ok and in_time, f"{detail}; {elapsed:.2f} s (< {budget:g} s)", None


@pytest.mark.parametrize("number,title,func", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, func, tmp_path, capsys):
    args = (tmp_path,) if func is criterion_cli else ()
    ok, line, exc = evaluate(func, *args)
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {line}")
    if exc is not None:
        raise exc
    assert ok, line


if __name__ == "__main__":
    import tempfile

    failures = 0
    for number, title, func in CRITERIA:
        with tempfile.TemporaryDirectory() as tmp:
            args = (Path(tmp),) if func is criterion_cli else ()
            ok, line, _ = evaluate(func, *args)
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {line}", flush=True)
    sys.exit(1 if failures else 0)
