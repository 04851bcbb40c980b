"""End-to-end tests of the command-line harness."""

import subprocess
import sys

import numpy as np
import pytest

from sonicvacuum.cli import main
from sonicvacuum.presets import PRESETS, get_preset, preset_names


# ---------------------------------------------------------------------------
# configuration errors exit with code 2
# ---------------------------------------------------------------------------


def test_no_configuration_is_a_usage_error(capsys):
    assert main(["simulate"]) == 2
    assert "no configuration" in capsys.readouterr().err


def test_unknown_preset_is_a_usage_error(capsys):
    assert main(["simulate", "--preset", "demo-9000hz"]) == 2
    err = capsys.readouterr().err
    assert "demo-9000hz" in err
    assert "demo-340hz" in err  # the message lists valid names


@pytest.mark.parametrize(
    "override", ["mystery=1", "drive_frequency_hz", "n_beads=several"]
)
def test_bad_set_overrides_are_usage_errors(override, capsys):
    rc = main(["simulate", "--preset", "demo-340hz", "--set", override])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_missing_config_file_is_reported(tmp_path, capsys):
    rc = main(["simulate", "--config", str(tmp_path / "absent.cfg")])
    assert rc == 2
    assert "absent.cfg" in capsys.readouterr().err


def test_sweep_requires_grid_keys(capsys):
    rc = main(["sweep", "--preset", "demo-340hz"])
    assert rc == 2
    assert "sweep_f_min_hz" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# numerical failures exit with code 3
# ---------------------------------------------------------------------------


def test_diverging_run_exits_with_numerics_code(capsys):
    # a nonsensical observer offset overflows the contact force within a
    # few steps; the harness reports which chain went non-finite
    rc = main(
        [
            "assimilate",
            "--preset",
            "observer-k0",
            "--set",
            "observer_offset=1e150",
            "--set",
            "transient_periods=1",
            "--set",
            "measure_periods=1",
        ]
    )
    assert rc == 3
    err = capsys.readouterr().err
    assert "non-finite" in err
    assert "observer" in err


# ---------------------------------------------------------------------------
# the five subcommands, end to end on small runs
# ---------------------------------------------------------------------------


def test_simulate_writes_deterministic_trajectory(tmp_path, capsys):
    args = [
        "simulate",
        "--preset",
        "demo-340hz",
        "--set",
        "transient_periods=3",
        "--set",
        "measure_periods=2",
    ]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    text = capsys.readouterr().out
    assert "peak transmitted force" in text
    assert (out_a / "trajectory.csv").read_bytes() == (
        out_b / "trajectory.csv"
    ).read_bytes()
    table = np.loadtxt(str(out_a / "trajectory.csv"), delimiter=",", skiprows=1)
    assert table.shape[1] == 2 * 11 + 3
    assert np.isfinite(table).all()


def test_classify_reports_fundamental_order(tmp_path, capsys):
    rc = main(
        [
            "classify",
            "--preset",
            "demo-340hz",
            "--set",
            "transient_periods=120",
            "--set",
            "measure_periods=8",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    assert "1:1 resonance" in capsys.readouterr().out
    lines = (tmp_path / "classification.csv").read_text().splitlines()
    assert lines[0] == "frequency_hz,order"
    assert lines[1] == "340,1"


def test_sweep_writes_labelled_grid(tmp_path, capsys):
    rc = main(
        [
            "sweep",
            "--preset",
            "demo-sweep",
            "--set",
            "sweep_f_min_hz=300",
            "--set",
            "sweep_f_max_hz=380",
            "--set",
            "sweep_points=3",
            "--set",
            "transient_periods=120",
            "--set",
            "measure_periods=10",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    assert "3 points" in capsys.readouterr().out
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "frequency_hz,max_force_N,label"
    assert len(lines) == 4


def test_floquet_reports_unstable_twin_without_foundation(tmp_path, capsys):
    # the coupled pair at the 340 Hz resonance with the foundation omitted:
    # the orbit converges but carries one multiplier outside the unit circle
    rc = main(
        [
            "floquet",
            "--preset",
            "demo-340hz",
            "--set",
            "foundation_scaled=0",
            "--set",
            "transient_periods=150",
            "--set",
            "measure_periods=1",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "verdict: unstable" in out
    spectrum = np.loadtxt(
        str(tmp_path / "spectrum.csv"), delimiter=",", skiprows=1
    )
    assert spectrum[0, 2] > 1.0 + 1e-3  # sorted by modulus, largest first
    history = np.loadtxt(
        str(tmp_path / "residual_history.csv"), delimiter=",", skiprows=1, ndmin=2
    )
    assert history[-1, 1] < 1e-10
    orbit = np.loadtxt(str(tmp_path / "orbit.csv"), delimiter=",", skiprows=1)
    assert orbit.shape[1] == 2 * 22 + 3


def test_floquet_nonconverged_newton_exits_with_numerics_code(tmp_path, capsys):
    # against the rigid-plane wall the stationary contact pattern is not
    # grid-stable at the default step, so Newton stalls above tolerance: the
    # harness must say so, leave the residual history behind, and exit 3
    rc = main(
        [
            "floquet",
            "--preset",
            "demo-340hz",
            "--set",
            "wall_model=rigid_plane",
            "--set",
            "foundation_scaled=0",
            "--set",
            "transient_periods=150",
            "--set",
            "measure_periods=1",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 3
    assert "did not converge" in capsys.readouterr().err
    history = np.loadtxt(
        str(tmp_path / "residual_history.csv"), delimiter=",", skiprows=1, ndmin=2
    )
    assert history.shape[0] >= 1
    assert not (tmp_path / "spectrum.csv").exists()


def test_assimilate_writes_pair_and_sync(tmp_path, capsys):
    rc = main(
        [
            "assimilate",
            "--preset",
            "observer-k0",
            "--set",
            "transient_periods=2",
            "--set",
            "measure_periods=2",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    assert "synchronized" in capsys.readouterr().out
    sync = np.loadtxt(str(tmp_path / "sync.csv"), delimiter=",", skiprows=1)
    assert sync[0, 1] == pytest.approx(1e-3)  # the preset's observer offset
    for name in ("driver.csv", "observer.csv"):
        table = np.loadtxt(str(tmp_path / name), delimiter=",", skiprows=1)
        assert table.shape[0] == sync.shape[0]
        assert table.shape[1] == 2 * 11 + 3


def test_plot_flag_writes_svg(tmp_path):
    rc = main(
        [
            "simulate",
            "--preset",
            "demo-340hz",
            "--set",
            "transient_periods=3",
            "--set",
            "measure_periods=2",
            "--out",
            str(tmp_path),
            "--plot",
        ]
    )
    assert rc == 0
    svg = (tmp_path / "forces.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


# ---------------------------------------------------------------------------
# presets and process wiring
# ---------------------------------------------------------------------------


def test_presets_have_descriptions_and_copy_semantics():
    assert set(preset_names()) == set(PRESETS)
    for name, (description, _) in PRESETS.items():
        assert description
    cfg = get_preset("demo-340hz")
    cfg["n_beads"] = 99
    assert get_preset("demo-340hz")["n_beads"] == 11


def test_module_entry_point_runs_as_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "sonicvacuum.cli", "simulate"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "no configuration" in proc.stderr
