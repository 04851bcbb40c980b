"""Driver-observer runs: chains forced by another chain or by recorded data.

The observer idea: feed a model chain the same input force a source system
received, and dissipation pulls the model's state onto the source's, making
the simulated beads nonlinear observers of states that were never measured.
Three entry points cover the use cases:

* :func:`run_extended` couples two identical dimensionless chains into one
  system; the first is boundary-driven, the second receives the first's
  boundary contact force.  Synchronization of the pair is the computable
  proxy for observer convergence.
* :func:`run_recorded` drives a dimensional chain with a sampled force
  record (e.g. a measured input force), applied to bead 1 as an external
  force.
* :func:`run_prescribed_zeroth` drives a dimensional chain by a harmonically
  moving boundary bead, the stand-in used when only the shaker amplitude of
  an experiment is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import _kernels
from .chain import (
    DEFAULT_SCALED_DT,
    ChainConfig,
    ChainModel,
    DriveKind,
    DriveSpec,
    ForceRecord,
    State,
    Variant,
    contact_coefficients,
)
from .integrate import IntegrationPlan, Trajectory, integrate, integrate_to_stationary

__all__ = [
    "SYNC_TOL",
    "AssimilationRun",
    "run_extended",
    "run_recorded",
    "run_prescribed_zeroth",
]

SYNC_TOL = 1e-6
SYNC_WINDOW_PERIODS = 10


@dataclass(eq=False)
class AssimilationRun:
    """Result of a twin-chain run: the coupled trajectory plus diagnostics.

    ``sync_error`` is the max absolute displacement mismatch between the two
    chains per sample; the run counts as synchronized when it stays below
    ``sync_tol`` throughout the final ten drive periods.
    """

    run: Trajectory
    drive_period: float
    sync_tol: float = SYNC_TOL

    @property
    def sync_error(self) -> np.ndarray:
        return self.run.sync_error()

    @property
    def synchronized(self) -> bool:
        times = self.run.times
        start = times[-1] - SYNC_WINDOW_PERIODS * self.drive_period
        tail = self.sync_error[times >= start - 1e-12]
        return bool(np.max(tail) < self.sync_tol)

    @property
    def driver_trajectory(self) -> Trajectory:
        """The boundary-driven chain's half of the run, as its own trajectory."""
        model = self.run.model
        n = model.n_beads
        view = ChainModel(
            variant=Variant.SCALED,
            n_beads=n,
            inv_mass=1.0,
            c_bead=model.c_bead,
            c_wall=model.c_wall,
            damping=model.damping,
            foundation=model.foundation,
            drive_kind=_kernels.DRIVE_HARMONIC,
            amplitude=model.amplitude,
            omega=model.omega,
            natural_dt=model.natural_dt,
        )
        return Trajectory(
            model=view,
            times=self.run.times,
            states=self.run.states[:, : 2 * n],
            wall_peak_raw=self.run.wall_peak_driver_raw,
        )

    @property
    def observer_trajectory(self) -> Trajectory:
        """The force-coupled chain's half; its input channel holds the
        coupling force sampled on the trajectory grid."""
        model = self.run.model
        n = model.n_beads
        driver = self.driver_trajectory
        coupling = driver.input_force()
        dt = float(self.run.times[1] - self.run.times[0])
        view = ChainModel(
            variant=Variant.SCALED,
            n_beads=n,
            inv_mass=1.0,
            c_bead=model.c_bead,
            c_wall=model.c_wall,
            damping=model.damping,
            foundation=model.foundation,
            drive_kind=_kernels.DRIVE_FORCE,
            record_t0=float(self.run.times[0]),
            record_dt=dt,
            record_values=coupling,
            natural_dt=model.natural_dt,
        )
        return Trajectory(
            model=view,
            times=self.run.times,
            states=self.run.states[:, 2 * n :],
            wall_peak_raw=self.run.wall_peak_raw,
        )


def run_extended(
    config: ChainConfig,
    beta: float,
    lam: float,
    k_nd: float,
    plan: IntegrationPlan,
    observer_offset: Union[float, np.ndarray] = 0.0,
    initial: Optional[State] = None,
) -> AssimilationRun:
    """Integrate the coupled driver-observer pair in rescaled units.

    Both chains take ``config``'s bead count and wall model and share
    ``lam`` and ``k_nd``.  The run starts from rest (or ``initial``), with
    ``observer_offset`` added to the observer displacements to probe
    synchronization; it covers ``plan.t_end`` or, when that is unset,
    ``plan.transient_periods + plan.measure_periods`` drive periods.

    Raises
    ------
    DivergenceError
        When either chain blows up; the message names which one went
        non-finite first.
    """
    model = ChainModel.extended(config.n_beads, beta, lam, k_nd, config.wall_model)
    period = model.period
    t_end = plan.t_end
    if t_end is None:
        t_end = (plan.transient_periods + plan.measure_periods) * period
        plan = replace(plan, t_end=t_end)
    n = config.n_beads
    y0 = np.zeros(model.dim) if initial is None else model.pack(initial)
    y0[2 * n : 3 * n] += observer_offset
    traj = integrate(model, y0, plan)
    return AssimilationRun(run=traj, drive_period=period)


def _heuristic_dt(config: ChainConfig, record: ForceRecord) -> float:
    """Step estimate for recorded drives: resolve the contact time scale
    implied by the record's peak force with the usual step-per-scale ratio."""
    c_bead, _ = contact_coefficients(config)
    peak = float(np.max(np.abs(record.forces)))
    if peak <= 0.0:
        raise ValueError(
            "cannot infer dt from an all-zero force record; set plan.dt"
        )
    overlap = (peak / c_bead) ** (2.0 / 3.0)
    phi = math.sqrt(c_bead * math.sqrt(overlap) / config.mass)
    return DEFAULT_SCALED_DT / phi


def run_recorded(
    config: ChainConfig,
    force_record: ForceRecord,
    plan: IntegrationPlan,
    initial: Optional[State] = None,
) -> Trajectory:
    """Integrate a dimensional chain driven by a sampled input force.

    The record is linearly interpolated onto the integrator's stage times,
    so it must cover the whole horizon ``plan.t_end``.  When ``plan.dt`` is
    unset, a step is inferred from the record's peak force via the contact
    time scale.
    """
    if plan.t_end is None:
        raise ValueError("recorded-force runs need plan.t_end")
    t_start = initial.time if initial is not None else 0.0
    lo, hi = force_record.span
    if lo > t_start + 1e-12 or hi < t_start + plan.t_end - 1e-12:
        raise ValueError(
            f"force record spans [{lo:g}, {hi:g}] s but the run needs "
            f"[{t_start:g}, {t_start + plan.t_end:g}] s"
        )
    if plan.dt is None:
        plan = replace(plan, dt=_heuristic_dt(config, force_record))
    drive = DriveSpec(DriveKind.RECORDED_FORCE, record=force_record)
    model = ChainModel.physical(config, drive)
    return integrate(model, initial, plan)


def run_prescribed_zeroth(
    config: ChainConfig,
    amplitude: float,
    frequency: float,
    plan: IntegrationPlan,
    initial: Optional[State] = None,
    capture_drive_force: bool = False,
) -> Trajectory:
    """Integrate a dimensional chain whose boundary bead moves harmonically.

    With ``plan.t_end`` set this integrates straight from ``initial``
    (default: rest) and can capture the boundary contact force for replay
    under :func:`run_recorded`; without it, the stationary window after the
    plan's transient periods is returned.
    """
    drive = DriveSpec(
        DriveKind.HARMONIC_DISPLACEMENT, frequency=frequency, amplitude=amplitude
    )
    model = ChainModel.physical(config, drive)
    if plan.t_end is None:
        if initial is not None or capture_drive_force:
            raise ValueError(
                "stationary windows start from rest and cannot capture the "
                "drive force; set plan.t_end for a direct run"
            )
        return integrate_to_stationary(model, plan)
    return integrate(model, initial, plan, capture_drive_force=capture_drive_force)
