#!/usr/bin/env python3
"""Desk-scale solver comparison across the three model cases.

Runs the full protocol (x0 = 0, stop at relative residual 1e-12, 250
iteration cap) on:
  * a damped mechanical system (positive definite E),
  * a stabilized Stokes-type system (index one, H positive definite but
    ill-conditioned, where unpreconditioned GMRES stalls),
  * an unstabilized Stokes-type system (index two, singular H, routed
    through the Schur-complement path).

Outputs land under runs/desk-bench/: comparison tables plus one residual
CSV per (solver, tau) cell, ready for overlay plots against the bound
curves from `dhkrylov bounds`.
"""

import json
import sys
from pathlib import Path

from dhkrylov.cli import Scenario, run_scenario

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("runs") / "desk-bench"

SCENARIOS = [
    Scenario(
        name="mechanical",
        model={"name": "mechanical", "params": {"n": 60, "seed": 3, "damping": 1.0}},
        tau_list=[1e-3, 1e-4],
        solvers=["widlund", "rapoport", "lgmres", "gmres", "hss"],
        rhs={"kind": "random", "seed": 11},
    ),
    Scenario(
        name="stokes-stabilized",
        model={"name": "stokes", "params": {"grid_n": 12, "viscosity": 100.0,
                                            "stabilization": 0.005}},
        tau_list=[1e-3, 1e-4],
        solvers=["widlund", "rapoport", "lgmres", "gmres"],
        rhs={"kind": "random", "seed": 11},
    ),
    Scenario(
        name="stokes-schur",
        model={"name": "stokes", "params": {"grid_n": 6, "viscosity": 1.0,
                                            "stabilization": 0.0}},
        tau_list=[1e-3, 1e-4],
        solvers=["widlund", "rapoport", "lgmres", "gmres"],
        tol=1e-10,
        rhs={"kind": "random", "seed": 11},
    ),
]


def main():
    for scenario in SCENARIOS:
        out = OUT / scenario.name
        table = run_scenario(scenario, out)
        print(f"== {scenario.name} ==")
        print(table.to_text())
        print()
    print(f"artifacts under {OUT}")


if __name__ == "__main__":
    main()
