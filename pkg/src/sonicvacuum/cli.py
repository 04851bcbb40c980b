"""Command-line harness for reproducible batch runs.

Five subcommands cover the package's capabilities::

    sonicvacuum simulate   --preset demo-340hz --out results
    sonicvacuum sweep      --preset demo-sweep --out results --plot
    sonicvacuum classify   --preset demo-1130hz
    sonicvacuum floquet    --preset observer-k001 --out results
    sonicvacuum assimilate --preset observer-k001 --out results

Every command takes ``--config FILE`` and/or ``--preset NAME`` plus any
number of ``--set key=value`` overrides (applied in that order), writes
its CSV artifacts under ``--out`` (default: current directory), and adds
SVG plots with ``--plot``.  Runs are deterministic: the same inputs give
byte-identical CSV files.

Exit status: 0 on success, 2 on configuration or validation errors, 3 on
numerical failures (divergence, non-converged orbit solves, unclassifiable
signals).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import Optional

import numpy as np

from . import fileio
from .assimilation import _heuristic_dt, run_extended, run_recorded, run_prescribed_zeroth
from .chain import ChainModel, nondimensionalize
from .fileio import CONFIG_KEYS, ConfigError
from .integrate import DivergenceError, IntegrationPlan, integrate, integrate_to_stationary
from .orbits import ShootingError, floquet, newton_periodic
from .presets import PRESETS, get_preset
from .sweep import UnclassifiableSignalError, classify_extrema, classify_resonance, detect_extrema, frequency_sweep

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sonicvacuum",
        description="Simulate harmonically driven granular chains without "
        "static precompression and analyse their transmission, periodic "
        "orbits, and observer synchronization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "simulate": "integrate one run and write its trajectory CSV",
        "sweep": "max transmitted force vs drive frequency, with extrema",
        "classify": "report the 1:n resonance order at one drive frequency",
        "floquet": "converge a periodic orbit of the twin-chain system and "
        "compute its Floquet multipliers",
        "assimilate": "run the driver-observer pair (or a recorded-force "
        "observer) and report synchronization",
    }
    for name, help_text in descriptions.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to a key=value run configuration")
        cmd.add_argument(
            "--preset",
            help=f"built-in configuration; one of: {', '.join(PRESETS)}",
        )
        cmd.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one configuration key (repeatable)",
        )
        cmd.add_argument("--out", default=".", help="output directory (default: .)")
        cmd.add_argument(
            "--plot", action="store_true", help="also write SVG plots"
        )
    return parser


def _gather_config(args) -> dict:
    """Merge preset, config file, and --set overrides, in that order."""
    cfg: dict = {}
    base_dir = "."
    if args.preset:
        try:
            cfg.update(get_preset(args.preset))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from exc
    if args.config:
        cfg.update(fileio.load_config(args.config))
        base_dir = os.path.dirname(os.path.abspath(args.config))
    if not args.preset and not args.config and not args.overrides:
        raise ConfigError("no configuration given; use --config, --preset or --set")
    for item in args.overrides:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"--set: unknown key {key!r}")
        try:
            cfg[key] = CONFIG_KEYS[key][0](value.strip())
        except ValueError as exc:
            raise ConfigError(f"--set: bad value for {key!r}: {exc}") from exc
    cfg["_base_dir"] = base_dir
    return cfg


def _ensure_outdir(args) -> str:
    out = args.out
    os.makedirs(out, exist_ok=True)
    return out


def _auto_stride(cfg, plan, config, drive):
    """Default the record stride to ~512 samples per drive period.

    Recording every step of a long stationary run is pointlessly heavy;
    an explicit ``record_stride`` in the configuration always wins.
    """
    if "record_stride" in cfg:
        return plan
    if drive.record is not None:
        dt = plan.dt if plan.dt is not None else _heuristic_dt(config, drive.record)
        steps = round(plan.t_end / dt) if plan.t_end else 0
        stride = max(1, steps // 20000)
    else:
        model = ChainModel.physical(config, drive)
        stride = max(1, round(model.period / model.natural_dt / 512))
    return replace(plan, record_stride=stride)


def _extended_model(cfg, config, drive):
    """Twin-chain model with the dimensionless foundation override applied."""
    ss = nondimensionalize(config, drive)
    k_nd = cfg.get("foundation_scaled", ss.k_nd)
    model = ChainModel.extended(config.n_beads, ss.beta, ss.lam, k_nd, config.wall_model)
    return model, ss, k_nd


def _cmd_simulate(args) -> int:
    cfg = _gather_config(args)
    config = fileio.chain_config_from(cfg)
    drive = fileio.drive_spec_from(cfg, cfg["_base_dir"])
    plan = _auto_stride(cfg, fileio.plan_from(cfg), config, drive)
    out = _ensure_outdir(args)
    if drive.record is not None:
        traj = run_recorded(config, drive.record, plan)
    else:
        traj = run_prescribed_zeroth(
            config, drive.displacement_amplitude(), drive.frequency, plan
        )
    path = os.path.join(out, "trajectory.csv")
    fileio.write_trajectory_csv(path, traj)
    print(f"wrote {path} ({traj.n_samples} samples)")
    print(f"peak transmitted force: {traj.peak_transmitted_force:.6g} N")
    if args.plot:
        from . import plotting

        svg = os.path.join(out, "forces.svg")
        plotting.plot_forces(svg, traj)
        print(f"wrote {svg}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _gather_config(args)
    config = fileio.chain_config_from(cfg)
    plan = fileio.plan_from(cfg)
    amplitude = fileio.amplitude_profile_from(cfg)
    f_min = cfg.get("sweep_f_min_hz")
    f_max = cfg.get("sweep_f_max_hz")
    n_points = cfg.get("sweep_points")
    if f_min is None or f_max is None or n_points is None:
        raise ConfigError("sweeps need sweep_f_min_hz, sweep_f_max_hz, sweep_points")
    out = _ensure_outdir(args)
    sweep = frequency_sweep(config, amplitude, f_min, f_max, n_points, plan)
    sweep = replace(sweep, extrema=detect_extrema(sweep))
    sweep = replace(sweep, extrema=classify_extrema(sweep, config, amplitude, plan))
    path = os.path.join(out, "sweep.csv")
    fileio.write_sweep_csv(path, sweep)
    print(f"wrote {path} ({len(sweep.frequencies)} points)")
    for ext in sweep.extrema:
        print(f"  {ext.frequency:g} Hz: {fileio._extremum_label(ext)}")
    if args.plot:
        from . import plotting

        svg = os.path.join(out, "sweep.svg")
        plotting.plot_sweep(svg, sweep)
        print(f"wrote {svg}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    cfg = _gather_config(args)
    config = fileio.chain_config_from(cfg)
    drive = fileio.drive_spec_from(cfg, cfg["_base_dir"])
    if drive.record is not None:
        raise ConfigError("classify needs a harmonic drive")
    plan = _auto_stride(cfg, fileio.plan_from(cfg), config, drive)
    out = _ensure_outdir(args)
    traj = run_prescribed_zeroth(
        config, drive.displacement_amplitude(), drive.frequency, plan
    )
    order = classify_resonance(traj, drive.frequency)
    path = os.path.join(out, "classification.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_hz,order\n")
        fh.write(f"{drive.frequency:g},{order}\n")
    print(f"{drive.frequency:g} Hz responds as a 1:{order} resonance")
    print(f"wrote {path}")
    if args.plot:
        from . import plotting

        svg = os.path.join(out, "forces.svg")
        plotting.plot_forces(svg, traj)
        print(f"wrote {svg}")
    return EXIT_OK


def _orbit_trajectory(model, orbit, dt=None):
    """One period of the converged orbit, sampled for export."""
    dt = dt if dt is not None else model.natural_dt
    n_steps = max(1, round(orbit.period / dt))
    stride = max(1, n_steps // 2000)
    plan = IntegrationPlan(dt=orbit.period / n_steps, t_end=orbit.period,
                           record_stride=stride)
    return integrate(model, orbit.anchor_state, plan)


def _cmd_floquet(args) -> int:
    cfg = _gather_config(args)
    config = fileio.chain_config_from(cfg)
    drive = fileio.drive_spec_from(cfg, cfg["_base_dir"])
    plan = fileio.plan_from(cfg)
    if drive.record is not None:
        raise ConfigError("orbit continuation needs a harmonic drive")
    out = _ensure_outdir(args)
    model, _, k_nd = _extended_model(cfg, config, drive)
    seed = integrate_to_stationary(model, replace(plan, record_stride=10**9))
    period = cfg.get("orbit_periods", 1) * model.period
    orbit = newton_periodic(seed.final_state, model, period, dt=plan.dt)
    hist_path = os.path.join(out, "residual_history.csv")
    np.savetxt(
        hist_path,
        np.column_stack([np.arange(len(orbit.residual_history)),
                         orbit.residual_history]),
        fmt="%.12g",
        delimiter=",",
        comments="",
        header="iteration,residual",
    )
    if not orbit.converged:
        print(
            f"Newton did not converge (residual {orbit.residual:.3e}); "
            f"history in {hist_path}",
            file=sys.stderr,
        )
        return EXIT_NUMERICS
    spectrum = floquet(orbit, model, dt=plan.dt)
    orbit_path = os.path.join(out, "orbit.csv")
    fileio.write_trajectory_csv(orbit_path, _orbit_trajectory(model, orbit, plan.dt))
    spec_path = os.path.join(out, "spectrum.csv")
    fileio.write_spectrum_csv(spec_path, spectrum)
    print(f"orbit converged, residual {orbit.residual:.3e} (k_nd = {k_nd:g})")
    print(
        f"verdict: {spectrum.verdict.name.lower()}, "
        f"max |multiplier| = {spectrum.max_modulus:.9g}"
    )
    print(f"wrote {orbit_path}, {spec_path}")
    if args.plot:
        from . import plotting

        svg = os.path.join(out, "spectrum.svg")
        plotting.plot_spectrum(svg, spectrum)
        print(f"wrote {svg}")
    return EXIT_OK


def _cmd_assimilate(args) -> int:
    cfg = _gather_config(args)
    config = fileio.chain_config_from(cfg)
    plan = fileio.plan_from(cfg)
    out = _ensure_outdir(args)
    if "force_record_csv" in cfg:
        drive = fileio.drive_spec_from(cfg, cfg["_base_dir"])
        traj = run_recorded(config, drive.record, plan)
        path = os.path.join(out, "observer.csv")
        fileio.write_trajectory_csv(path, traj)
        print(f"wrote {path}")
        print(f"peak transmitted force: {traj.peak_transmitted_force:.6g} N")
        if args.plot:
            from . import plotting

            svg = os.path.join(out, "forces.svg")
            plotting.plot_forces(svg, traj)
            print(f"wrote {svg}")
        return EXIT_OK
    drive = fileio.drive_spec_from(cfg, cfg["_base_dir"])
    model, ss, k_nd = _extended_model(cfg, config, drive)
    if "record_stride" not in cfg:
        stride = max(1, round(model.period / model.natural_dt / 512))
        plan = replace(plan, record_stride=stride)
    run = run_extended(
        config,
        ss.beta,
        ss.lam,
        k_nd,
        plan,
        observer_offset=cfg.get("observer_offset", 0.0),
    )
    driver_path = os.path.join(out, "driver.csv")
    observer_path = os.path.join(out, "observer.csv")
    sync_path = os.path.join(out, "sync.csv")
    fileio.write_trajectory_csv(driver_path, run.driver_trajectory)
    fileio.write_trajectory_csv(observer_path, run.observer_trajectory)
    fileio.write_sync_csv(sync_path, run.run.times, run.sync_error)
    status = "synchronized" if run.synchronized else "not synchronized"
    print(f"observer {status} (k_nd = {k_nd:g}); final error "
          f"{run.sync_error[-1]:.3e}")
    print(f"wrote {driver_path}, {observer_path}, {sync_path}")
    if args.plot:
        from . import plotting

        svg = os.path.join(out, "sync.svg")
        plotting.plot_sync_error(svg, run.run.times, run.sync_error)
        print(f"wrote {svg}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "classify": _cmd_classify,
    "floquet": _cmd_floquet,
    "assimilate": _cmd_assimilate,
}


def main(argv: Optional[list] = None) -> int:
    """Entry point; returns the process exit code."""
    args = _parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, ShootingError, UnclassifiableSignalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
