"""Flat key-value run configuration and CSV artifact files.

Run configurations are plain text, one ``key = value`` pair per line, with
``#`` comments.  Every key carries its SI unit in its name, so a file is
readable without consulting anything else:

.. code-block:: text

    # steel chain, harmonically driven
    n_beads            = 11
    bead_radius_m      = 12.7e-3
    elastic_modulus_pa = 210e9
    poisson_ratio      = 0.3
    density_kg_m3      = 7850
    damping_ns_m       = 35.4
    wall_model         = rigid_plane
    drive_kind         = harmonic
    drive_amplitude_m  = 8e-6
    drive_frequency_hz = 60

Only the keys documented in :data:`CONFIG_KEYS` are accepted; anything
else is a :class:`ConfigError`.  All CSV output is written with ``%.12g``
formatting so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import math
import os
from typing import Callable, Optional, Union

import numpy as np

from .chain import (
    ChainConfig,
    DriveKind,
    DriveSpec,
    ForceRecord,
    MaterialSpec,
    WallModel,
    contact_coefficients,
)
from .integrate import IntegrationPlan, Trajectory
from .orbits import FloquetSpectrum
from .sweep import ExtremumKind, SweepResult

__all__ = [
    "CONFIG_KEYS",
    "ConfigError",
    "parse_config",
    "load_config",
    "dump_config",
    "chain_config_from",
    "drive_spec_from",
    "plan_from",
    "amplitude_profile_from",
    "load_force_record",
    "write_force_record_csv",
    "write_trajectory_csv",
    "write_sweep_csv",
    "write_spectrum_csv",
    "write_sync_csv",
]

_FMT = "%.12g"


class ConfigError(ValueError):
    """A run configuration is malformed, incomplete, or inconsistent."""


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


#: Accepted configuration keys: name -> (converter, documentation).
CONFIG_KEYS: dict = {
    # -- chain geometry and material -------------------------------------
    "n_beads": (int, "number of beads in the chain (>= 2)"),
    "bead_radius_m": (float, "sphere radius R in m"),
    "elastic_modulus_pa": (float, "Young's modulus E in Pa"),
    "poisson_ratio": (float, "Poisson's ratio (dimensionless)"),
    "density_kg_m3": (float, "bead material density in kg/m^3"),
    "bead_mass_kg": (float, "bead mass in kg; overrides the density-derived value"),
    "damping_ns_m": (float, "contact viscous coefficient D in N s/m"),
    "foundation_stiffness_n_m": (float, "per-bead grounding stiffness k in N/m"),
    "foundation_scaled": (
        float,
        "dimensionless foundation stiffness; overrides the rescaled "
        "foundation_stiffness_n_m in dimensionless work (orbit stability, "
        "twin-chain runs)",
    ),
    "wall_model": (str, "right-wall contact: identical_sphere or rigid_plane"),
    # -- excitation -------------------------------------------------------
    "drive_kind": (str, "harmonic or recorded"),
    "drive_amplitude_m": (float, "boundary displacement amplitude A0 in m"),
    "drive_velocity_m_s": (float, "boundary velocity amplitude V0 in m/s"),
    "drive_frequency_hz": (float, "drive frequency f in Hz"),
    "force_record_csv": (str, "path to a recorded-force CSV (time_s, force_N)"),
    # -- integration protocol ---------------------------------------------
    "dt_scaled": (float, "dimensionless integrator step (default 1e-3)"),
    "t_end_s": (float, "horizon in s for recorded-force runs"),
    "transient_periods": (int, "drive periods discarded before measuring"),
    "measure_periods": (int, "drive periods retained in the measurement window"),
    "record_stride": (int, "keep every k-th integration step"),
    # -- frequency sweeps ---------------------------------------------------
    "sweep_f_min_hz": (float, "sweep start frequency in Hz"),
    "sweep_f_max_hz": (float, "sweep end frequency in Hz"),
    "sweep_points": (int, "number of sweep grid points (>= 2)"),
    "sweep_amplitudes_m": (
        str,
        "drive amplitude over the sweep: a single value in m, or "
        "'f1:a1,f2:a2,...' anchor pairs interpolated linearly in frequency",
    ),
    # -- orbit analysis and twin-chain runs --------------------------------
    "orbit_periods": (int, "orbit period as a multiple of the drive period"),
    "observer_offset": (float, "initial observer displacement offset (dimensionless)"),
}


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` configuration text into a typed dict.

    Parameters
    ----------
    text : str
        Configuration file content.
    source : str, optional
        Name used in error messages.

    Returns
    -------
    dict
        Parsed values, converted per :data:`CONFIG_KEYS`.

    Raises
    ------
    ConfigError
        On unknown keys, duplicate keys, malformed lines, or values that
        fail conversion.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        conv = CONFIG_KEYS[key][0]
        try:
            out[key] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    return out


def load_config(path: str) -> dict:
    """Read and parse a configuration file.

    Raises
    ------
    ConfigError
        If the file does not exist or fails to parse.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config(text, source=path)


def dump_config(cfg: dict) -> str:
    """Serialize a configuration dict back to file text.

    Keys are emitted in the documented :data:`CONFIG_KEYS` order so that
    dumping is deterministic.
    """
    lines = []
    for key in CONFIG_KEYS:
        if key not in cfg:
            continue
        value = cfg[key]
        if isinstance(value, float):
            lines.append(f"{key} = {_FMT % value}")
        else:
            lines.append(f"{key} = {value}")
    extra = set(cfg) - set(CONFIG_KEYS)
    if extra:
        raise ConfigError(f"unknown keys in config dict: {sorted(extra)}")
    return "\n".join(lines) + "\n"


_WALLS = {
    "identical_sphere": WallModel.IDENTICAL_SPHERE,
    "rigid_plane": WallModel.RIGID_PLANE,
}


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    return cfg[key]


def chain_config_from(cfg: dict) -> ChainConfig:
    """Build a :class:`ChainConfig` from parsed configuration values.

    ``density_kg_m3`` may be omitted when ``bead_mass_kg`` is given; the
    density is then back-computed so the two stay consistent.
    """
    radius = _require(cfg, "bead_radius_m")
    mass = cfg.get("bead_mass_kg")
    density = cfg.get("density_kg_m3")
    if density is None:
        if mass is None:
            raise ConfigError("need density_kg_m3 or bead_mass_kg")
        density = mass / (4.0 / 3.0 * math.pi * radius**3)
    wall_name = cfg.get("wall_model", "rigid_plane")
    if wall_name not in _WALLS:
        raise ConfigError(
            f"wall_model must be one of {sorted(_WALLS)}, got {wall_name!r}"
        )
    try:
        material = MaterialSpec(
            elastic_modulus=_require(cfg, "elastic_modulus_pa"),
            poisson_ratio=_require(cfg, "poisson_ratio"),
            density=density,
        )
        return ChainConfig(
            n_beads=_require(cfg, "n_beads"),
            bead_radius=radius,
            material=material,
            damping=_require(cfg, "damping_ns_m"),
            foundation_stiffness=cfg.get("foundation_stiffness_n_m", 0.0),
            wall_model=_WALLS[wall_name],
            bead_mass=mass,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def drive_spec_from(cfg: dict, base_dir: Optional[str] = None) -> DriveSpec:
    """Build a :class:`DriveSpec` from parsed configuration values.

    Recorded drives load their CSV relative to ``base_dir`` (the config
    file's directory) when the recorded path is not absolute.
    """
    kind = cfg.get("drive_kind", "harmonic")
    try:
        if kind == "harmonic":
            return DriveSpec(
                kind=DriveKind.HARMONIC_DISPLACEMENT,
                frequency=cfg.get("drive_frequency_hz"),
                amplitude=cfg.get("drive_amplitude_m"),
                velocity_amplitude=cfg.get("drive_velocity_m_s"),
            )
        if kind == "recorded":
            path = _require(cfg, "force_record_csv")
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            return DriveSpec(
                kind=DriveKind.RECORDED_FORCE,
                frequency=cfg.get("drive_frequency_hz"),
                record=load_force_record(path),
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"drive_kind must be 'harmonic' or 'recorded', got {kind!r}")


def plan_from(cfg: dict) -> IntegrationPlan:
    """Build an :class:`IntegrationPlan` from parsed configuration values.

    ``dt_scaled`` is the step in the model's own time units (dimensionless
    for rescaled runs); recorded-force runs choose their own dimensional
    step and use ``t_end_s`` as the horizon.
    """
    try:
        return IntegrationPlan(
            dt=cfg.get("dt_scaled"),
            t_end=cfg.get("t_end_s"),
            record_stride=cfg.get("record_stride", 1),
            transient_periods=cfg.get("transient_periods", 200),
            measure_periods=cfg.get("measure_periods", 50),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def amplitude_profile_from(cfg: dict) -> Union[float, Callable[[float], float]]:
    """Resolve the sweep drive amplitude from configuration values.

    ``sweep_amplitudes_m`` may be a single amplitude (``"8e-6"``) or
    comma-separated ``frequency:amplitude`` anchors
    (``"20:6e-6,60:8e-6,160:1.2e-5"``) interpolated linearly in frequency
    and clamped outside the anchor range.  Falls back to
    ``drive_amplitude_m`` when absent.
    """
    spec = cfg.get("sweep_amplitudes_m")
    if spec is None:
        amp = cfg.get("drive_amplitude_m")
        if amp is None:
            raise ConfigError("need sweep_amplitudes_m or drive_amplitude_m")
        return amp
    if ":" not in spec:
        try:
            return float(spec)
        except ValueError as exc:
            raise ConfigError(f"bad sweep_amplitudes_m: {exc}") from exc
    freqs = []
    amps = []
    for part in spec.split(","):
        f_txt, _, a_txt = part.partition(":")
        if not a_txt:
            raise ConfigError(f"bad sweep_amplitudes_m anchor {part!r}")
        try:
            freqs.append(float(f_txt))
            amps.append(float(a_txt))
        except ValueError as exc:
            raise ConfigError(f"bad sweep_amplitudes_m anchor {part!r}: {exc}") from exc
    fa = np.asarray(freqs)
    aa = np.asarray(amps)
    if np.any(np.diff(fa) <= 0):
        raise ConfigError("sweep_amplitudes_m anchors must be strictly increasing in f")
    if np.any(aa <= 0):
        raise ConfigError("sweep amplitudes must be positive")

    def profile(f: float) -> float:
        return float(np.interp(f, fa, aa))

    return profile


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------


def load_force_record(path: str) -> ForceRecord:
    """Read a two-column force record CSV with a ``time_s,force_N`` header.

    Raises
    ------
    ConfigError
        On a missing file, wrong header, or malformed samples.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if [c.strip() for c in header.split(",")] != ["time_s", "force_N"]:
                raise ConfigError(
                    f"{path}: expected header 'time_s,force_N', got {header!r}"
                )
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read force record {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed force record: {exc}") from exc
    if data.shape[1] != 2:
        raise ConfigError(f"{path}: expected 2 columns, got {data.shape[1]}")
    try:
        return ForceRecord.from_samples(data[:, 0], data[:, 1])
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def write_force_record_csv(path: str, record: ForceRecord) -> None:
    """Write a force record as a ``time_s,force_N`` CSV."""
    np.savetxt(
        path,
        np.column_stack([record.times, record.forces]),
        fmt=_FMT,
        delimiter=",",
        comments="",
        header="time_s,force_N",
    )


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    """Write a trajectory as CSV: time, u_1..u_N, v_1..v_N, F_in, F_out."""
    u = traj.displacements
    v = traj.velocities
    n = u.shape[1]
    cols = ["time"]
    cols += [f"u_{i}" for i in range(1, n + 1)]
    cols += [f"v_{i}" for i in range(1, n + 1)]
    cols += ["F_in", "F_out"]
    table = np.column_stack(
        [traj.times, u, v, traj.input_force(), traj.transmitted_force()]
    )
    np.savetxt(
        path, table, fmt=_FMT, delimiter=",", comments="", header=",".join(cols)
    )


def _extremum_label(ext) -> str:
    if ext.kind is ExtremumKind.ANTIRESONANCE:
        return "antiresonance"
    if ext.order is None:
        return "resonance:?"
    return f"resonance:{ext.order}"


def write_sweep_csv(path: str, sweep: SweepResult) -> None:
    """Write a sweep as CSV: frequency_hz, max_force_N, label.

    The label is ``-`` for ordinary grid points, ``resonance:n`` at
    resonances of classified order n (``resonance:?`` when the order could
    not be established), and ``antiresonance`` at transmission dips.
    """
    labels = {}
    for ext in sweep.extrema:
        labels[ext.frequency] = _extremum_label(ext)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_hz,max_force_N,label\n")
        for f, force in zip(sweep.frequencies, sweep.forces):
            label = labels.get(float(f), "-")
            fh.write(f"{_FMT % f},{_FMT % force},{label}\n")


def write_spectrum_csv(path: str, spectrum: FloquetSpectrum) -> None:
    """Write Floquet multipliers as CSV: re, im, modulus."""
    mults = spectrum.multipliers
    table = np.column_stack([mults.real, mults.imag, np.abs(mults)])
    np.savetxt(
        path, table, fmt=_FMT, delimiter=",", comments="", header="re,im,modulus"
    )


def write_sync_csv(path: str, times: np.ndarray, errors: np.ndarray) -> None:
    """Write a synchronization-error time series as CSV: time, error."""
    np.savetxt(
        path,
        np.column_stack([times, errors]),
        fmt=_FMT,
        delimiter=",",
        comments="",
        header="time,error",
    )
