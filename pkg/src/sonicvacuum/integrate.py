"""Fixed-step time integration of chain models.

The stepper is classical fourth-order Runge-Kutta with a constant step.  The
contact law is once-differentiable, so no event localization is needed for
the elastic term; the velocity-gated damping does switch discontinuously, and
a small fixed step keeps that error controlled without the chatter an
adaptive controller produces at contact events.  Runs are deterministic:
identical inputs give bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels
from .chain import ChainModel, ForceRecord, State

__all__ = [
    "DivergenceError",
    "IntegrationPlan",
    "Trajectory",
    "integrate",
    "integrate_to_stationary",
]


class DivergenceError(RuntimeError):
    """The state became non-finite during integration.

    Attributes
    ----------
    time : float
        Model time at which the failure was detected.
    chain : str or None
        For twin-chain runs, whether the ``"driver"`` or ``"observer"`` block
        lost finiteness first (None for single chains).
    """

    def __init__(self, time: float, chain: Optional[str] = None, context: str = ""):
        where = f" in the {chain} chain" if chain else ""
        tail = f" ({context})" if context else ""
        super().__init__(f"state became non-finite at t = {time:.6g}{where}{tail}")
        self.time = time
        self.chain = chain
        self.context = context


@dataclass(frozen=True)
class IntegrationPlan:
    """How long and how finely to integrate.

    Parameters
    ----------
    dt : float, optional
        Step in model time units; defaults to the model's natural step.
    t_end : float, optional
        Horizon for :func:`integrate` (ignored by the stationary driver).
    record_stride : int
        Keep every k-th step in the trajectory (1 keeps all).
    transient_periods : int
        Drive periods integrated and discarded before measuring.
    measure_periods : int
        Drive periods retained as the stationary measurement window.

    The transient/measure defaults are deliberately generous; halving either
    must not change stationary force maxima by more than a fraction of a
    percent, which the test suite checks on representative configurations.
    """

    dt: Optional[float] = None
    t_end: Optional[float] = None
    record_stride: int = 1
    transient_periods: int = 200
    measure_periods: int = 50

    def __post_init__(self):
        if self.dt is not None and not (self.dt > 0):
            raise ValueError("dt must be positive")
        if self.t_end is not None and not (self.t_end > 0):
            raise ValueError("t_end must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.transient_periods < 0:
            raise ValueError("transient_periods must be >= 0")
        if self.measure_periods < 1:
            raise ValueError("measure_periods must be >= 1")

    def resolve_dt(self, model: ChainModel) -> float:
        if self.dt is not None:
            return self.dt
        if model.natural_dt > 0:
            return model.natural_dt
        raise ValueError(
            "plan gives no dt and the model has no natural step (recorded-"
            "force drives and fixed-boundary chains need an explicit dt)"
        )


@dataclass(eq=False)
class Trajectory:
    """Sampled solution of one integration run.

    ``states`` holds flat kernel-layout vectors, one row per sample; use the
    channel helpers (or :meth:`state_at`) rather than indexing into it.
    Force channels are converted to Newtons whenever the model carries a
    force scale (always, except for bare dimensionless models where the unit
    is the rescaled force).
    """

    model: ChainModel
    times: np.ndarray
    states: np.ndarray
    div_integral: float = 0.0
    wall_peak_raw: float = 0.0
    wall_peak_driver_raw: float = 0.0
    drive_record: Optional[ForceRecord] = None

    @property
    def n_samples(self) -> int:
        return self.times.size

    @property
    def sample_dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def displacements(self) -> np.ndarray:
        """(samples, entries) displacement array in State ordering."""
        n = self.model.n_beads
        if not self.model.extended_system:
            return self.states[:, :n]
        return np.hstack([self.states[:, :n], self.states[:, 2 * n : 3 * n]])

    @property
    def velocities(self) -> np.ndarray:
        n = self.model.n_beads
        if not self.model.extended_system:
            return self.states[:, n:]
        return np.hstack([self.states[:, n : 2 * n], self.states[:, 3 * n :]])

    def state_at(self, i: int) -> State:
        return self.model.unpack(self.states[i], float(self.times[i]))

    @property
    def final_state(self) -> State:
        return self.state_at(self.n_samples - 1)

    def transmitted_force(self) -> np.ndarray:
        """Wall contact force per sample (N when a force scale is known)."""
        return self.model.wall_force(self.states) * self.model.force_scale

    def input_force(self) -> np.ndarray:
        """Force entering at the left boundary per sample."""
        return (
            self.model.input_force(self.states, self.times) * self.model.force_scale
        )

    @property
    def peak_transmitted_force(self) -> float:
        """Max wall force over every step of the run, not just kept samples."""
        return self.wall_peak_raw * self.model.force_scale

    def kinetic_energy(self) -> np.ndarray:
        """(samples, entries) kinetic energy per bead (J for physical runs)."""
        return 0.5 / self.model.inv_mass * self.velocities**2

    def sync_error(self) -> np.ndarray:
        """Max |driver - observer| displacement per sample (twin runs only)."""
        if not self.model.extended_system:
            raise ValueError("sync_error is defined for twin-chain runs only")
        n = self.model.n_beads
        return np.max(
            np.abs(self.states[:, :n] - self.states[:, 2 * n : 3 * n]), axis=1
        )


def _pack_initial(model: ChainModel, initial: Union[State, np.ndarray, None]):
    if initial is None:
        return np.zeros(model.dim), 0.0
    if isinstance(initial, State):
        return model.pack(initial), float(initial.time)
    y = np.array(initial, dtype=float)
    if y.size != model.dim:
        raise ValueError(f"initial vector has size {y.size}, expected {model.dim}")
    return y, 0.0


def _raise_divergence(model: ChainModel, y: np.ndarray, time: float):
    chain = None
    if model.extended_system:
        n = model.n_beads
        driver_bad = not np.isfinite(y[: 2 * n]).all()
        observer_bad = not np.isfinite(y[2 * n :]).all()
        if driver_bad and not observer_bad:
            chain = "driver"
        elif observer_bad and not driver_bad:
            chain = "observer"
    raise DivergenceError(time, chain)


def _run(model, y, t0, dt, n_steps, stride, rows, capture):
    """Dispatch one kernel call; returns (out, fd, divint) or raises."""
    out = np.empty((rows, model.dim))
    fd = np.empty(2 * n_steps + 1 if capture else 0)
    if capture:
        fd[:] = 0.0
    if model.extended_system:
        n, _, c_bb, c_w, damp, kf, _, amp, omega, _, _, _ = model.kernel_args()
        done, divint, wx, wy = _kernels.rk4_extended(
            y, t0, dt, n_steps, stride, n, c_bb, c_w, damp, kf, amp, omega, out
        )
        peaks = (wy, wx)
    else:
        done, divint, wmax = _kernels.rk4_chain(
            y, t0, dt, n_steps, stride, *model.kernel_args(), out, fd
        )
        peaks = (wmax, 0.0)
    if done < n_steps:
        _raise_divergence(model, y, t0 + done * dt)
    return out, fd, divint, peaks


def integrate(
    model: ChainModel,
    initial: Union[State, np.ndarray, None],
    plan: IntegrationPlan,
    capture_drive_force: bool = False,
) -> Trajectory:
    """Integrate ``model`` from ``initial`` over ``plan.t_end``.

    The step count is rounded up so the horizon is covered and the last
    recorded sample falls on a stride boundary.  With
    ``capture_drive_force=True`` the boundary contact force is additionally
    sampled on the half-step grid and attached as ``drive_record``, suitable
    for replaying the run under a recorded-force drive.
    """
    if plan.t_end is None:
        raise ValueError("plan.t_end is required for integrate()")
    dt = plan.resolve_dt(model)
    n_steps = max(1, math.ceil(plan.t_end / dt - 1e-12))
    stride = min(plan.record_stride, n_steps)
    n_steps = ((n_steps + stride - 1) // stride) * stride
    y, t0 = _pack_initial(model, initial)
    rows = n_steps // stride + 1
    out, fd, divint, peaks = _run(
        model, y, t0, dt, n_steps, stride, rows, capture_drive_force
    )
    record = None
    if capture_drive_force:
        half = 0.5 * dt
        rec_t = t0 + half * np.arange(2 * n_steps + 1)
        record = ForceRecord(times=rec_t, forces=fd, sample_rate=1.0 / half)
    return Trajectory(
        model=model,
        times=t0 + dt * stride * np.arange(rows),
        states=out,
        div_integral=divint,
        wall_peak_raw=peaks[0],
        wall_peak_driver_raw=peaks[1],
        drive_record=record,
    )


def integrate_to_stationary(
    model: ChainModel,
    plan: IntegrationPlan,
    frequency: Optional[float] = None,
    record: bool = True,
) -> Trajectory:
    """Settle onto the stationary response, then record a measurement window.

    Starts from zero initial conditions, integrates ``plan.transient_periods``
    drive periods so dissipation kills the transient, discards them, and
    returns the following ``plan.measure_periods`` periods.  ``frequency`` is
    in cycles per model time unit and defaults to the model's own drive.

    The step is snapped to an integer divisor of the period so windows hold a
    whole number of steps; the record stride is reduced if necessary to keep
    the window end on a recorded sample.  ``record=False`` skips state
    storage entirely (the returned trajectory then only carries the peak
    wall force and divergence integral), which is what sweeps use.
    """
    period = 1.0 / frequency if frequency is not None else model.period
    dt0 = plan.resolve_dt(model)
    steps_per_period = max(1, round(period / dt0))
    dt = period / steps_per_period
    n_measure = plan.measure_periods * steps_per_period
    stride = min(plan.record_stride, n_measure)
    while n_measure % stride:
        stride -= 1

    y = np.zeros(model.dim)
    t0 = 0.0
    if plan.transient_periods > 0:
        n_trans = plan.transient_periods * steps_per_period
        _, _, _, _ = _run(model, y, t0, dt, n_trans, n_trans, 0, False)
        t0 = n_trans * dt

    rows = n_measure // stride + 1 if record else 0
    out, _, divint, peaks = _run(model, y, t0, dt, n_measure, stride, rows, False)
    return Trajectory(
        model=model,
        times=t0 + dt * stride * np.arange(rows),
        states=out,
        div_integral=divint,
        wall_peak_raw=peaks[0],
        wall_peak_driver_raw=peaks[1],
    )
