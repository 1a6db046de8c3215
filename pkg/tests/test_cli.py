import csv
import json

import numpy as np
import pytest

import dhkrylov as dk
from dhkrylov.cli import Scenario, audit_staircase, main, run_scenario

from support import random_hs_system


@pytest.fixture
def mech_scenario(tmp_path):
    scn = {
        "name": "mech-test",
        "model": {"name": "mechanical", "params": {"n": 10, "seed": 3, "damping": 1.0}},
        "tau_list": [1e-3],
        "solvers": ["widlund", "rapoport", "gmres"],
        "tol": 1e-12,
        "maxit": 250,
        "rhs": {"kind": "random", "seed": 7},
    }
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(scn))
    return path


def test_models_list(capsys):
    assert main(["models", "list"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"mechanical", "rlc", "stokes", "poroelastic"}
    assert "params" in payload["rlc"]


def test_models_export_matrix_market(tmp_path):
    out = tmp_path / "rlc"
    assert main(["models", "export", "--model", "rlc", "--out", str(out)]) == 0
    sys = dk.assemble_rlc(1, 1, 1, 1, 1, 1)
    assert np.array_equal(dk.read_matrix(out / "e.mtx"), sys.e)
    assert np.array_equal(dk.read_matrix(out / "j.mtx"), sys.j)
    assert np.array_equal(dk.read_matrix(out / "r.mtx"), sys.r)


def test_bench_widlund_rapoport_iterations_nonincreasing_in_tau(tmp_path):
    # desk-scale analogue of the reported trend: smaller tau, fewer steps
    scn = Scenario(
        model={"name": "mechanical", "params": {"n": 20, "seed": 3, "damping": 1.0}},
        tau_list=[1e-3, 1e-4],
        solvers=["widlund", "rapoport"],
        rhs={"kind": "random", "seed": 7},
    )
    table = run_scenario(scn, tmp_path / "run")
    iters = {(r["solver"], r["tau"]): r["iterations"] for r in table.rows}
    for solver in ("widlund", "rapoport"):
        assert iters[(solver, 1e-4)] <= iters[(solver, 1e-3)]


def test_bench_rhs_from_file(tmp_path):
    b = np.arange(1.0, 41.0)
    bpath = tmp_path / "b.mtx"
    dk.write_matrix(bpath, b.reshape(-1, 1))
    scn = Scenario(
        model={"name": "mechanical", "params": {"n": 20, "seed": 3}},
        tau_list=[1e-3],
        solvers=["rapoport"],
        rhs={"kind": "file", "path": str(bpath)},
    )
    table = run_scenario(scn, tmp_path / "run")
    assert table.rows[0]["converged"]


def test_bench_run_table_and_artifacts(mech_scenario, tmp_path):
    out = tmp_path / "run"
    assert main(["bench", "--scenario", str(mech_scenario), "--out", str(out)]) == 0
    table = json.loads((out / "table.json").read_text())
    assert len(table) == 3  # full (solver, tau) cross product
    for row in table:
        assert set(row) >= {"model", "tau", "solver", "iterations", "final_rel_res",
                            "converged", "lambda", "wall_time_s"}
        if row["converged"]:
            assert row["final_rel_res"] <= 1e-12 * (1 + 1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["rhs_metadata"]["rhs_seed"] == 7
    for name in manifest["artifacts"]:
        assert (out / name).exists()


def test_bench_rerun_identical_csv_bodies(mech_scenario, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(["bench", "--scenario", str(mech_scenario), "--out", str(out_a)])
    main(["bench", "--scenario", str(mech_scenario), "--out", str(out_b)])
    csvs = sorted(p.name for p in out_a.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_bench_schur_routing_for_index_two_model(tmp_path):
    scn = {
        "name": "stokes-schur",
        "model": {"name": "stokes", "params": {"grid_n": 3, "stabilization": 0.0}},
        "tau_list": [1e-3],
        "solvers": ["rapoport"],
        "tol": 1e-11,
        "rhs": {"kind": "random", "seed": 1},
    }
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(scn))
    out = tmp_path / "run"
    assert main(["bench", "--scenario", str(path), "--out", str(out)]) == 0
    table = json.loads((out / "table.json").read_text())
    assert table[0]["converged"]
    assert table[0]["final_rel_res"] <= 1e-11


def test_bench_incompatible_solver_reported_per_row(tmp_path):
    # Widlund cannot run on the singular-H system when the Schur path is off
    scn = {
        "name": "bad",
        "model": {"name": "stokes", "params": {"grid_n": 3, "stabilization": 0.0}},
        "tau_list": [1e-3],
        "solvers": ["widlund", "gmres"],
        "schur": "never",
        "rhs": {"kind": "random", "seed": 1},
    }
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(scn))
    out = tmp_path / "run"
    assert main(["bench", "--scenario", str(path), "--out", str(out)]) == 0
    table = json.loads((out / "table.json").read_text())
    errors = [r for r in table if "error" in r]
    assert len(errors) == 1 and errors[0]["solver"] == "widlund"
    assert len(table) == 2  # the run continued


def test_solve_subcommand_with_matrix_file(tmp_path, capsys):
    rng = np.random.default_rng(2)
    sysm = random_hs_system(rng, 12, cond_h=20.0, lam=0.5)
    amtx = tmp_path / "a.mtx"
    dk.write_matrix(amtx, sysm.a)
    out = tmp_path / "out"
    code = main(["solve", "--matrix", str(amtx), "--solver", "rapoport",
                 "--seed", "5", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"]
    with open(out / "residuals.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["k", "res_2norm", "res_hinv_norm", "err_hnorm",
                      "bound_widlund", "bound_rapoport"]
    x = dk.read_matrix(out / "solution.mtx").reshape(-1)
    b = np.random.default_rng(5).standard_normal(12)
    assert np.linalg.norm(sysm.a @ x - b) <= 1e-11 * np.linalg.norm(b)


def test_integrate_subcommand(tmp_path):
    out = tmp_path / "out"
    code = main(["integrate", "--model", "mechanical", "--param", "n=4",
                 "--param", "damping=0.5", "--tau", "0.05", "--steps", "10",
                 "--out", str(out)])
    assert code == 0
    with open(out / "trajectory.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "t" and rows[0][-2:] == ["hamiltonian", "dissipation"]
    assert len(rows) == 12


def test_staircase_subcommand_identity(tmp_path, capsys):
    amtx = tmp_path / "eye.mtx"
    dk.write_matrix(amtx, np.eye(6))
    out = tmp_path / "out"
    assert main(["staircase", "--matrix", str(amtx), "--out", str(out)]) == 0
    report = json.loads((out / "staircase.json").read_text())
    assert report["r"] == 2
    assert report["block_sizes"] == [6, 0]


def test_audit_staircase_stokes_midpoint_structure():
    # unstabilized Stokes midpoint matrix is already a 3-stage staircase
    sys = dk.assemble_stokes_like(3, stabilization=0.0)
    a = dk.midpoint_system(sys, 1e-3).sys.a
    report = audit_staircase(a)
    assert report["r"] == 3
    nv = sys.blocks[0][1]
    n_p = sys.blocks[1][1]
    assert report["block_sizes"] == [nv, n_p, 0]
    assert report["reconstruction_residual_relative"] <= 1e-10
    assert report["schur"]["block_orders"] == [nv, n_p]
    assert all(v > 0 for v in report["schur"]["hermitian_part_min_eigenvalues"])


def test_audit_staircase_random_psd_instance():
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
    h = (q * np.concatenate([rng.uniform(0.5, 2.0, 6), np.zeros(4)])) @ q.T
    g = rng.standard_normal((10, 10))
    report = audit_staircase((h + h.T) / 2 + (g - g.T) / 2)
    assert report["reconstruction_residual_relative"] <= 1e-10
    json.dumps(report)


def test_bounds_subcommand(tmp_path):
    out = tmp_path / "out"
    code = main(["bounds", "--model", "mechanical", "--param", "n=6",
                 "--tau", "0.001", "--kmax", "10", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["lambda"] > 0
    assert report["max_real_part"] <= 1e-10 * report["lambda"]
    with open(out / "bounds.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "bound_widlund", "bound_rapoport", "bound_lgmres_estimate"]
    assert len(rows) == 12


def test_unknown_solver_is_usage_error(mech_scenario, tmp_path):
    code = main(["bench", "--scenario", str(mech_scenario),
                 "--solvers", "jacobi", "--out", str(tmp_path / "x")])
    assert code == 2


def test_unreadable_matrix_is_io_error(tmp_path):
    code = main(["solve", "--matrix", str(tmp_path / "missing.mtx")])
    assert code == 2


def test_from_model_rhs_requires_forcing(tmp_path):
    scn = Scenario(
        model={"name": "mechanical", "params": {"n": 4}},
        tau_list=[1e-2],
        solvers=["rapoport"],
        rhs={"kind": "from-model"},
    )
    table = run_scenario(scn, tmp_path / "run")
    assert "error" in table.rows[0]

    scn2 = Scenario(
        model={"name": "rlc", "params": {"eg": {"kind": "constant", "amplitude": 2.0}}},
        tau_list=[1e-2],
        solvers=["rapoport"],
        rhs={"kind": "from-model"},
    )
    table2 = run_scenario(scn2, tmp_path / "run2")
    assert table2.rows[0]["converged"]
