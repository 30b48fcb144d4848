"""Command-line front end: exit codes, artifacts, determinism."""
import json
import subprocess

import numpy as np
import pytest

from fhartree.cli import (
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_VALIDATION,
    EXIT_VERIFY,
    PREDICTIONS,
    SWEEP_COLUMNS,
    main,
    run_sweep,
)
from fhartree.config import ConfigError, SweepSpec, load_config
from fhartree.snapshots import read_snapshot, write_snapshot
from fhartree.spectral import CONVENTION_TAG, field_from_values, make_grid

# Warnings that are expected at the canonical desk-scale resolution: the
# soliton tail is truncated at 1.8e-4 of peak on the L=32 box, and |x|u is
# meaningless near the box edge.  Both are in-band caveats, not failures.
pytestmark = [
    pytest.mark.filterwarnings("ignore:ground-state tail"),
    pytest.mark.filterwarnings("ignore:weighted_virial"),
]

_RUN_CSV_HEADER = (
    "time,mass,energy,hs,hsc,v,lpc,me_ratio,grad_ratio,membership,"
    "tail_fraction,strichartz_accum,soliton_deviation,dt_eff"
)


# ----------------------------------------------------------- ground-state


def test_ground_state_command(tmp_path):
    rc = main(["ground-state", "--out", str(tmp_path)])
    assert rc == EXIT_OK

    report = json.loads((tmp_path / "ground_state.json").read_text())
    assert report["converged"] is True
    assert report["config"]["convention"] == CONVENTION_TAG
    assert report["config"]["grid"] == {"n": 128, "L": 32.0, "kernel_mode": "exact"}
    assert report["summary"]["l2"] > 0
    assert report["thresholds"]["me_discrepancy"] < 1e-2

    q, p, side = read_snapshot(tmp_path / "q.bin")
    assert q.is_physical and q.grid.n == 128
    assert (p.s, p.gamma) == (0.7, 1.6)
    assert side["kind"] == "ground-state"
    assert side["iterations"] == report["summary"]["iterations"]


def test_ground_state_nonconvergence_exit_code(tmp_path):
    rc = main(["ground-state", "--out", str(tmp_path), "solver.max_iter=2"])
    assert rc == EXIT_NONCONVERGENCE
    report = json.loads((tmp_path / "ground_state.json").read_text())
    assert report["converged"] is False
    assert report["summary"]["iterations"] == 2
    assert not (tmp_path / "q.bin").exists()  # no snapshot for a bad profile


# --------------------------------------------------------------- classify


def test_classify_subcritical_amplitude(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "--c", "0.9"])
    assert rc == EXIT_OK
    data = json.loads((tmp_path / "classify.json").read_text())
    assert data["membership"] == "K1"
    assert data["prediction"] == PREDICTIONS["K1"]
    assert data["me_ratio"] < 1.0 and data["grad_ratio"] < 1.0
    assert data["u0"] == {"source": "scaled-ground-state", "c": 0.9}
    assert data["u0_scalars"]["mass"] > 0


def test_classify_supercritical_amplitude(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "--c", "1.1"])
    assert rc == EXIT_OK
    data = json.loads((tmp_path / "classify.json").read_text())
    assert data["membership"] == "K2"
    assert data["prediction"] == PREDICTIONS["K2"]
    assert data["grad_ratio"] > 1.0


def test_classify_gaussian_carrier_snaps_to_grid(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "--gaussian", "0.6,1.0,3.9"])
    assert rc == EXIT_OK
    data = json.loads((tmp_path / "classify.json").read_text())
    assert data["u0"]["source"] == "gaussian"
    carrier = data["u0"]["carrier"]
    dk = 2.0 * np.pi / 32.0
    assert carrier != 3.9  # snapped to the nearest box frequency
    assert abs(carrier / dk - round(carrier / dk)) < 1e-12
    assert data["membership"] in PREDICTIONS


@pytest.mark.parametrize(
    "spec", ["0.4", "a,b", "0.4,1.0,2.0,3.0", "0.4,-1.0", "0.4,0.0"]
)
def test_gaussian_parse_errors(tmp_path, spec):
    rc = main(["classify", "--out", str(tmp_path), "--gaussian", spec])
    assert rc == EXIT_VALIDATION


def test_nonpositive_amplitude_rejected(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "--c", "-1.0"])
    assert rc == EXIT_VALIDATION


def test_unknown_override_rejected(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "grid.resolution=64"])
    assert rc == EXIT_VALIDATION


def test_missing_config_file_rejected(tmp_path):
    rc = main(["classify", "--out", str(tmp_path), "--config",
               str(tmp_path / "nope.ini")])
    assert rc == EXIT_VALIDATION


# ----------------------------------------------------------------- evolve


def test_evolve_soliton_artifacts(tmp_path):
    rc = main([
        "evolve", "--out", str(tmp_path),
        "stepper.t_end=0.05", "stepper.adaptive=no", "stepper.record_every=5",
        "io.snapshot_every=5",  # every 5th sample = every 25th step
    ])
    assert rc == EXIT_OK

    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == _RUN_CSV_HEADER
    assert len(lines) == 1 + 11  # header + steps 0,5,...,50

    run = json.loads((tmp_path / "run.json").read_text())
    assert run["membership"] == "Boundary"
    assert run["run"]["verdict"] == "Soliton"
    assert run["agreement"] == "yes"
    assert run["invariance"]["applicable"] is False  # Boundary data, no K_i to preserve

    snaps = sorted(tmp_path.glob("snap_*.bin"))
    assert [s.name for s in snaps] == ["snap_0000.bin", "snap_0001.bin", "snap_0002.bin"]
    u, _, side = read_snapshot(snaps[0])
    assert u.is_physical and side["time"] == 0.0
    _, _, side_last = read_snapshot(snaps[-1])
    assert abs(side_last["time"] - 0.05) < 1e-12  # final state is the last kept sample


def test_evolve_is_deterministic(tmp_path):
    argv = ["evolve", "stepper.t_end=0.05", "stepper.adaptive=no"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(argv + ["--out", str(tmp_path / "b")]) == EXIT_OK
    a = (tmp_path / "a" / "run.csv").read_bytes()
    b = (tmp_path / "b" / "run.csv").read_bytes()
    assert a == b  # byte-identical reruns


def test_evolve_from_snapshot(tmp_path):
    gs_dir, run_dir = tmp_path / "gs", tmp_path / "run"
    assert main(["ground-state", "--out", str(gs_dir)]) == EXIT_OK
    rc = main([
        "evolve", "--out", str(run_dir), "--u0", str(gs_dir / "q.bin"),
        "stepper.t_end=0.02", "stepper.adaptive=no",
    ])
    assert rc == EXIT_OK
    run = json.loads((run_dir / "run.json").read_text())
    assert run["u0"]["source"] == "snapshot"
    assert run["run"]["verdict"] == "Soliton"


def test_evolve_snapshot_grid_mismatch(tmp_path, params):
    grid = make_grid(N=2, n=16, L=8.0)
    u = field_from_values(grid, np.exp(-grid.r_mesh**2).astype(np.complex128))
    snap = write_snapshot(tmp_path / "u0.bin", u, params)
    rc = main(["evolve", "--out", str(tmp_path), "--u0", str(snap)])
    assert rc == EXIT_VALIDATION


def test_evolve_snapshot_physics_mismatch(tmp_path):
    gs_dir = tmp_path / "gs"
    assert main(["ground-state", "--out", str(gs_dir)]) == EXIT_OK
    rc = main([
        "evolve", "--out", str(tmp_path), "--u0", str(gs_dir / "q.bin"),
        "physics.s=0.6", "physics.gamma=1.4",
    ])
    assert rc == EXIT_VALIDATION


def test_evolve_corrupted_snapshot(tmp_path, params):
    grid = make_grid(N=2, n=16, L=8.0)
    u = field_from_values(grid, np.exp(-grid.r_mesh**2).astype(np.complex128))
    snap = write_snapshot(tmp_path / "u0.bin", u, params)
    raw = bytearray(snap.read_bytes())
    raw[:8] = b"XXXXXXXX"
    snap.write_bytes(bytes(raw))
    rc = main(["evolve", "--out", str(tmp_path), "--u0", str(snap)])
    assert rc == EXIT_VALIDATION


# ------------------------------------------------------------------ sweep


def test_sweep_artifacts(tmp_path):
    rc = main([
        "sweep", "--out", str(tmp_path),
        "--c-lo", "0.9", "--c-hi", "1.1", "--count", "2",
        "stepper.t_end=0.05", "stepper.adaptive=no",
    ])
    assert rc == EXIT_OK

    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == SWEEP_COLUMNS
    assert len(lines) == 3  # header + two amplitudes
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[1]) == 0.9 and float(first[2]) == 0.7
    assert first[6] == "K1"
    second = lines[2].split(",")
    assert float(second[1]) == 1.1 and second[6] == "K2"

    data = json.loads((tmp_path / "sweep.json").read_text())
    assert len(data["rows"]) == 2
    for row in data["rows"]:
        assert row["prediction"] == PREDICTIONS[row["membership"]]
        assert row["agreement"] in ("yes", "no", "n/a")


def test_run_sweep_rejects_bad_amplitudes():
    cfg = load_config(overrides=["stepper.t_end=0.02"])
    spec = SweepSpec(c_lo=0.9, c_hi=1.1, k=2)
    with pytest.raises(ConfigError, match="empty"):
        run_sweep(cfg, spec, amplitudes=())
    with pytest.raises(ConfigError, match="positive"):
        run_sweep(cfg, spec, amplitudes=(0.9, -1.1))


def test_sweep_bad_sg_pair(tmp_path):
    rc = main(["sweep", "--out", str(tmp_path), "--sg", "0.6"])
    assert rc == EXIT_VALIDATION


# ----------------------------------------------------------------- verify


def test_verify_passes_at_canonical(tmp_path):
    rc = main(["verify", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] is True
    names = {c["name"] for c in report["checks"]}
    assert {
        "euler_lagrange_residual", "pohozaev_r2", "cgn_two_route",
        "gn_ratio_ground_state", "threshold_me_two_route",
        "balakrishnan_gaussian", "mass_drift", "energy_drift",
        "comparability_margins", "virial_surrogate", "weighted_virial_min",
    } <= names
    assert all(c["passed"] for c in report["checks"])


def test_verify_warm_start_from_certified_profile(tmp_path):
    gs_dir, v_dir = tmp_path / "gs", tmp_path / "v"
    assert main(["ground-state", "--out", str(gs_dir)]) == EXIT_OK
    rc = main(["verify", "--out", str(v_dir), "--q", str(gs_dir / "q.bin")])
    assert rc == EXIT_OK
    report = json.loads((v_dir / "verify.json").read_text())
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["warm_start_iterations"]["measured"] <= 3


def test_verify_coarse_dt_fails(tmp_path):
    rc = main(["verify", "--out", str(tmp_path), "stepper.dt=0.05"])
    assert rc == EXIT_VERIFY
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] is False
    failed = {c["name"] for c in report["checks"] if not c["passed"]}
    assert "energy_drift" in failed


# ------------------------------------------------------------ entry point


def test_console_script_help():
    out = subprocess.run(
        ["fhartree", "--help"], capture_output=True, text=True, timeout=60
    )
    assert out.returncode == 0
    for sub in ("ground-state", "classify", "evolve", "sweep", "verify"):
        assert sub in out.stdout
