"""Frequency-response harness: transmitted-force spectra and 1:n orders.

Sweeps integrate the chain to its stationary response at every frequency of
a uniform grid and record the maximum force the last bead exerts on the
wall.  The resulting curve carries the chain's strongly nonlinear resonance
structure: local peaks where travelling pulses synchronize with the source
(one strong boundary pulse every n drive periods, a "1:n resonance"), and
dips where counter-propagating pulses cancel at the wall (anti-resonances).

Grid points are independent, so the sweep fans them out over a thread pool;
the compiled integration kernels release the GIL.  Results are always
emitted in frequency order and are bit-reproducible run to run.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.signal import find_peaks

from .chain import ChainConfig, ChainModel, DriveKind, DriveSpec
from .integrate import DivergenceError, IntegrationPlan, Trajectory, integrate_to_stationary

__all__ = [
    "UnclassifiableSignalError",
    "ExtremumKind",
    "Extremum",
    "SweepResult",
    "frequency_sweep",
    "detect_extrema",
    "classify_resonance",
    "classify_extrema",
]

DEFAULT_PROMINENCE_FRACTION = 0.02
PULSE_THRESHOLD_FRACTION = 0.5


class UnclassifiableSignalError(RuntimeError):
    """The input-force signal has no usable pulse train to classify."""


class ExtremumKind(enum.Enum):
    RESONANCE = "resonance"
    ANTIRESONANCE = "antiresonance"


@dataclass(frozen=True)
class Extremum:
    """One sweep extremum; ``order`` is filled in by classification."""

    frequency: float
    kind: ExtremumKind
    order: Optional[int] = None


@dataclass(eq=False)
class SweepResult:
    """Transmitted-force response over a frequency grid.

    ``frequencies`` (Hz) are strictly increasing grid points; ``forces`` (N)
    are the per-window maxima of the wall force; ``extrema`` is filled by
    :func:`detect_extrema` / :func:`classify_extrema`.
    """

    frequencies: np.ndarray
    forces: np.ndarray
    extrema: list = field(default_factory=list)

    @property
    def points(self):
        return list(zip(self.frequencies.tolist(), self.forces.tolist()))

    def force_at(self, frequency: float) -> float:
        i = int(np.argmin(np.abs(self.frequencies - frequency)))
        return float(self.forces[i])


AmplitudeSpec = Union[float, Callable[[float], float]]


def _amplitude_at(amplitude: AmplitudeSpec, f: float) -> float:
    return float(amplitude(f)) if callable(amplitude) else float(amplitude)


def _peak_force(config: ChainConfig, amplitude: AmplitudeSpec, f: float,
                plan: IntegrationPlan) -> float:
    """Stationary peak wall force (N) at one drive frequency.

    Runs in rescaled units: the rescaling property guarantees the same
    dynamics as the dimensional system, at a uniform step cost across the
    grid, and the force scale converts the window maximum back to Newtons.
    """
    drive = DriveSpec(
        DriveKind.HARMONIC_DISPLACEMENT,
        frequency=f,
        amplitude=_amplitude_at(amplitude, f),
    )
    model = ChainModel.scaled(config, drive)
    try:
        traj = integrate_to_stationary(model, plan, record=False)
    except DivergenceError as err:
        raise DivergenceError(err.time, err.chain, context=f"sweep point {f:g} Hz")
    return traj.peak_transmitted_force


def frequency_sweep(
    config: ChainConfig,
    amplitude: AmplitudeSpec,
    f_min: float,
    f_max: float,
    n_points: int,
    plan: IntegrationPlan,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """Maximum transmitted force over a uniform frequency grid.

    ``amplitude`` is the boundary displacement amplitude in m, either a
    constant or a callable of frequency (per-frequency drive calibration).
    Each grid point settles through ``plan.transient_periods`` drive periods
    and is measured over the next ``plan.measure_periods``.  Points are
    evaluated concurrently but reported in grid order with deterministic
    content.
    """
    if not f_min < f_max:
        raise ValueError("need f_min < f_max")
    if n_points < 2:
        raise ValueError("need at least 2 grid points")
    freqs = np.linspace(f_min, f_max, n_points)
    workers = max_workers or min(32, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            forces = list(pool.map(
                lambda f: _peak_force(config, amplitude, f, plan), freqs
            ))
    else:
        forces = [_peak_force(config, amplitude, f, plan) for f in freqs]
    return SweepResult(frequencies=freqs, forces=np.array(forces))


def detect_extrema(sweep: SweepResult, prominence: Optional[float] = None) -> list:
    """Locate resonances (peaks) and anti-resonances (dips) of a sweep.

    A grid point counts as a resonance when it is strictly higher than both
    neighbours and rises at least ``prominence`` above both flanking minima;
    anti-resonances are found the same way on the negated curve.  Endpoints
    are never extrema.  ``prominence`` defaults to 2% of the sweep's global
    maximum, enough to suppress grid noise without hiding genuine dips.
    """
    if sweep.frequencies.size < 3:
        raise ValueError("extrema detection needs at least 3 sweep points")
    if prominence is None:
        prominence = DEFAULT_PROMINENCE_FRACTION * float(np.max(sweep.forces))
    peaks, _ = find_peaks(sweep.forces, prominence=prominence)
    dips, _ = find_peaks(-sweep.forces, prominence=prominence)
    found = [
        Extremum(float(sweep.frequencies[i]), ExtremumKind.RESONANCE) for i in peaks
    ] + [
        Extremum(float(sweep.frequencies[i]), ExtremumKind.ANTIRESONANCE) for i in dips
    ]
    found.sort(key=lambda e: e.frequency)
    return found


def classify_resonance(trajectory: Trajectory, frequency: Optional[float] = None) -> int:
    """Order n of a 1:n resonance from the input-force pulse train.

    Strong boundary pulses are the samples exceeding half the window's peak
    input force; the response order is the median spacing between strong
    pulses expressed in drive periods.  ``frequency`` is in cycles per model
    time unit and defaults to the trajectory's own drive.

    Raises
    ------
    UnclassifiableSignalError
        If no pulses rise above threshold, fewer than two pulses fit the
        window, or the pulse train is too irregular to assign an integer
        order (spacing error over n periods above 10% of one period).
    """
    period = 1.0 / frequency if frequency is not None else trajectory.model.period
    window = float(trajectory.times[-1] - trajectory.times[0])
    if window < 6.0 * period - 1e-9:
        raise ValueError("classification needs at least 6 drive periods of data")
    f_in = trajectory.input_force()
    peak = float(np.max(f_in)) if f_in.size else 0.0
    if peak <= 0.0:
        raise UnclassifiableSignalError("no input force pulses above threshold")
    sample_dt = trajectory.sample_dt
    spacing = max(1, round(PULSE_THRESHOLD_FRACTION * period / sample_dt))
    idx, _ = find_peaks(
        f_in, height=PULSE_THRESHOLD_FRACTION * peak, distance=spacing
    )
    if idx.size < 2:
        raise UnclassifiableSignalError(
            "fewer than two strong pulses in the measurement window"
        )
    interval = float(np.median(np.diff(trajectory.times[idx])))
    n = round(interval / period)
    if n < 1 or n * abs(interval - n * period) >= 0.1 * period:
        raise UnclassifiableSignalError(
            f"pulse spacing {interval:.6g} is not an integer number of periods"
        )
    return n


def classify_extrema(
    sweep: SweepResult,
    config: ChainConfig,
    amplitude: AmplitudeSpec,
    plan: IntegrationPlan,
) -> list:
    """Re-run the resonance frequencies of a sweep and attach their orders.

    Returns a new extrema list in which every classifiable resonance carries
    its 1:n order; anti-resonances and unclassifiable points pass through
    unchanged.
    """
    out = []
    for ext in sweep.extrema:
        if ext.kind is not ExtremumKind.RESONANCE:
            out.append(ext)
            continue
        drive = DriveSpec(
            DriveKind.HARMONIC_DISPLACEMENT,
            frequency=ext.frequency,
            amplitude=_amplitude_at(amplitude, ext.frequency),
        )
        model = ChainModel.scaled(config, drive)
        stride = max(1, round(model.period / model.natural_dt / 2048))
        window = replace(plan, record_stride=stride)
        traj = integrate_to_stationary(model, window)
        try:
            order = classify_resonance(traj)
        except UnclassifiableSignalError:
            out.append(ext)
            continue
        out.append(replace(ext, order=order))
    return out
