"""Absorb a travelling Gaussian pulse at the end of an interval.

The 1D wave equation closed with the derived boundary operator is the
characteristic condition, so reflection comes only from discretisation
error and must fall at second order as the grid is refined. A hard wall
is run alongside for contrast.

Run with ``python3 demos/absorption_1d.py``.
"""

import math

from ttbc import ScalarWave, build, derive_operator
from ttbc.harness import Boundary, BoundaryKind, Domain, GaussianPulse, SimulationConfig, run_1d


def config(cells, boundary):
    return SimulationConfig(Domain.INTERVAL, (1.0,), 1.0 / cells, GaussianPulse(0.5, 0.05), boundary)


if __name__ == "__main__":
    ttbc = Boundary(BoundaryKind.TTBC, derive_operator(build(ScalarWave(c=1.0))))
    _, wall = run_1d(config(400, Boundary(BoundaryKind.DIRICHLET)))
    print(f"hard wall, 400 cells: reflected / incident = {wall.measured_ratio:.4f}")
    previous = None
    for cells in (250, 500, 1000, 2000, 4000):
        trace, report = run_1d(config(cells, ttbc))
        order = "" if previous is None else f"  order {math.log2(previous / report.measured_ratio):.2f}"
        print(f"TTBC, {cells:5d} cells: ratio {report.measured_ratio:.3e}, "
              f"energy left {trace.final / trace.energies[0]:.1e}{order}")
        previous = report.measured_ratio
