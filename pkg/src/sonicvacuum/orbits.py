"""Periodic orbits of driven chains: shooting, stability, volume balance.

A time-periodic response of a chain driven at frequency f is a fixed point
of the stroboscopic map (the flow sampled once per period; subharmonics use
an integer multiple of the drive period).  Fixed points are found by Newton
iteration on the map displacement, with the map Jacobian obtained by forward
finite differences: the right-hand side switches non-smoothly when contacts
open and close, so differentiating the discrete fixed-step flow is the
consistent choice, while variational equations would be ill-defined across
the switches.

Stability comes from the Floquet multipliers, the eigenvalues of that same
finite-difference monodromy matrix.  As an independent cross-check,
``liouville_check`` compares |det M| with the exponential of the divergence
integral accumulated along the orbit: each closed contact's damping drains
phase-space volume at a known rate, so the two must agree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels
from .chain import ChainModel, State

__all__ = [
    "ShootingError",
    "StabilityVerdict",
    "PeriodicOrbit",
    "FloquetSpectrum",
    "AlignedStep",
    "stroboscopic_map",
    "monodromy",
    "newton_periodic",
    "floquet",
    "liouville_check",
    "aligned_step",
]

NEWTON_TOL = 1e-10
TOL_MARGIN = 1e-3
FD_STEP = 1e-7
MAX_HALVINGS = 8
# condition number of (J - I) beyond which the Newton step is meaningless:
# a multiplier is pinned to +1 and the fixed point is not isolated
SINGULAR_COND = 1e12


class ShootingError(RuntimeError):
    """Newton shooting hit a singular (J - I); the orbit is near-marginal."""


class StabilityVerdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass
class PeriodicOrbit:
    """A (candidate) fixed point of the stroboscopic map.

    ``anchor_state`` is the state at zero drive phase; flowing it for
    ``period`` returns to it up to ``residual`` (sup norm).  ``converged``
    records whether the Newton iteration met its tolerance;
    ``residual_history`` holds the residual after each accepted step,
    starting with the seed's.
    """

    anchor_state: State
    period: float
    residual: float
    converged: bool
    residual_history: list = field(default_factory=list)

    def order(self, drive_period: float) -> int:
        """Subharmonic order n with period = n * drive_period."""
        return round(self.period / drive_period)


@dataclass
class FloquetSpectrum:
    """Multipliers of a periodic orbit, sorted by decreasing modulus."""

    multipliers: np.ndarray
    max_modulus: float
    verdict: StabilityVerdict


@dataclass
class AlignedStep:
    """A shooting step chosen to keep contact events inside grid cells.

    ``margin`` is the smallest distance, in units of one step, from any
    recorded contact opening or closing to a step boundary; ``event_times``
    holds the event times relative to the anchor phase.
    """

    dt: float
    n_steps: int
    margin: float
    event_times: np.ndarray


def _steps_for(model: ChainModel, period: float, dt: Optional[float]) -> tuple:
    dt0 = dt if dt is not None else model.natural_dt
    if not dt0 or dt0 <= 0:
        raise ValueError("model has no natural dt; pass one explicitly")
    n_steps = max(1, round(period / dt0))
    return n_steps, period / n_steps


def _as_vector(model: ChainModel, state: Union[State, np.ndarray]) -> np.ndarray:
    if isinstance(state, State):
        return model.pack(state)
    y = np.array(state, dtype=float)
    if y.size != model.dim:
        raise ValueError(f"state vector has size {y.size}, expected {model.dim}")
    return y


def _flow(model, y, t0, dt, n_steps) -> np.ndarray:
    out = y.copy()
    kind = 1 if model.extended_system else 0
    _kernels.flow(kind, out, t0, dt, n_steps, *model.kernel_args())
    if not np.isfinite(out).all():
        raise ShootingError(f"flow diverged from anchor t = {t0:.6g}")
    return out


def stroboscopic_map(
    state: Union[State, np.ndarray],
    model: ChainModel,
    period: float,
    dt: Optional[float] = None,
) -> State:
    """Advance a state by exactly one period of the drive-synchronized flow.

    The step is snapped to an integer divisor of ``period``.  The input's
    time is kept as the anchor phase (a State input) or taken as 0 (a bare
    vector).
    """
    t0 = state.time if isinstance(state, State) else 0.0
    y = _as_vector(model, state)
    n_steps, dt_eff = _steps_for(model, period, dt)
    out = _flow(model, y, t0, dt_eff, n_steps)
    return model.unpack(out, t0 + period)


def monodromy(
    model: ChainModel,
    anchor: Union[State, np.ndarray],
    period: float,
    dt: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Finite-difference Jacobian of the period map at ``anchor``.

    Perturbs each component by 1e-7 * max(1, |s_i|) and differences the
    flowed results against the unperturbed flow; columns run as independent
    flows.  Returns (M, mapped anchor vector, divergence integral along the
    unperturbed flow).
    """
    y = _as_vector(model, anchor)
    n_steps, dt_eff = _steps_for(model, period, dt)
    h = FD_STEP * np.maximum(1.0, np.abs(y))
    kind = 1 if model.extended_system else 0
    m, mapped, divint = _kernels.monodromy(
        kind, y, 0.0, dt_eff, n_steps, *model.kernel_args(), h
    )
    if not np.isfinite(m).all():
        raise ShootingError("monodromy columns diverged; orbit is not flowable")
    return m, mapped, divint


def newton_periodic(
    guess: Union[State, np.ndarray],
    model: ChainModel,
    period: float,
    newton_tol: float = NEWTON_TOL,
    max_iter: int = 25,
    dt: Optional[float] = None,
) -> PeriodicOrbit:
    """Solve P(s) = s by Newton iteration from ``guess``.

    Each iteration solves (J - I) delta = -(P(s) - s) with the
    finite-difference map Jacobian J, then applies a step-halving line
    search (up to 8 halvings) if the full step increases the residual.
    Orbits are anchored at zero drive phase, so seeds should be snapshots
    taken an integer number of drive periods after a zero-phase start.

    Returns a converged orbit, or the best iterate found with
    ``converged=False`` when the iteration stalls or ``max_iter`` runs out.

    Raises
    ------
    ShootingError
        If (J - I) is numerically singular, which happens when a multiplier
        sits on +1 (near-marginal orbit), or if a flow diverges.
    """
    s = _as_vector(model, guess)
    n_steps, dt_eff = _steps_for(model, period, dt)

    def residual_of(vec):
        mapped = _flow(model, vec, 0.0, dt_eff, n_steps)
        return mapped, float(np.max(np.abs(mapped - vec)))

    mapped, res = residual_of(s)
    history = [res]
    best_s, best_res = s.copy(), res
    identity = np.eye(model.dim)

    for _ in range(max_iter):
        if res < newton_tol:
            return PeriodicOrbit(
                model.unpack(best_s, 0.0), period, best_res, True, history
            )
        m, mapped, _ = monodromy(model, s, period, dt=dt_eff)
        jmi = m - identity
        cond = np.linalg.cond(jmi)
        if not np.isfinite(cond) or cond > SINGULAR_COND:
            raise ShootingError(
                "(J - I) is numerically singular: a multiplier sits at +1, "
                "the candidate is not an isolated fixed point"
            )
        try:
            delta = np.linalg.solve(jmi, -(mapped - s))
        except np.linalg.LinAlgError as err:
            raise ShootingError(
                "(J - I) is singular: a multiplier sits at +1, "
                "the orbit is near-marginal"
            ) from err
        step = 1.0
        for _halve in range(MAX_HALVINGS + 1):
            trial = s + step * delta
            _, trial_res = residual_of(trial)
            if trial_res < res:
                break
            step *= 0.5
        else:
            break
        s = trial
        res = trial_res
        history.append(res)
        if res < best_res:
            best_s, best_res = s.copy(), res

    converged = best_res < newton_tol
    return PeriodicOrbit(
        model.unpack(best_s, 0.0), period, best_res, converged, history
    )


def floquet(
    orbit: PeriodicOrbit, model: ChainModel, dt: Optional[float] = None
) -> FloquetSpectrum:
    """Floquet multipliers of a converged orbit.

    Eigenvalues of the finite-difference monodromy at the orbit's anchor;
    the verdict compares the largest modulus against 1 with a +-1e-3 margin
    (inside: stable, outside: unstable, within the margin: marginal).
    """
    if not orbit.converged:
        raise ValueError("floquet analysis needs a converged orbit")
    m, _, _ = monodromy(model, orbit.anchor_state, orbit.period, dt=dt)
    mult = np.linalg.eigvals(m)
    order = np.lexsort((np.angle(mult), -np.abs(mult)))
    mult = mult[order]
    max_mod = float(np.abs(mult[0]))
    if max_mod < 1.0 - TOL_MARGIN:
        verdict = StabilityVerdict.STABLE
    elif max_mod > 1.0 + TOL_MARGIN:
        verdict = StabilityVerdict.UNSTABLE
    else:
        verdict = StabilityVerdict.MARGINAL
    return FloquetSpectrum(multipliers=mult, max_modulus=max_mod, verdict=verdict)


def liouville_check(
    model: ChainModel,
    anchor: Union[State, np.ndarray],
    period: float,
    dt: Optional[float] = None,
) -> tuple[float, float]:
    """Compare |det M| with exp of the divergence integral over one period.

    The gated damping terms are the only divergence sources, so the phase
    volume contracts by exp(integral of -damping * active contact count);
    the finite-difference monodromy determinant must match.  Returns
    (|det M|, predicted) for the caller to compare.
    """
    m, _, divint = monodromy(model, anchor, period, dt=dt)
    return float(abs(np.linalg.det(m))), math.exp(divint)


_EVENT_CHUNK = 1 << 16


def _gap_signals(model: ChainModel, times: np.ndarray, states: np.ndarray):
    """Force-gating gap signals along recorded rows, one signal per column.

    Every force term in the flow switches on a sign change of one of these:
    the moving-boundary gap of a harmonically driven block, the neighbor
    overlaps, and the far-wall overlap.  (The twin system's observer block
    is force-driven through the driver's boundary gap, which is already
    included, so it contributes no gap of its own.)
    """
    n = model.n_beads
    cols = []
    blocks = (0, 2 * n) if model.extended_system else (0,)
    for off in blocks:
        u = states[:, off : off + n]
        if off == 0 and model.drive_kind == _kernels.DRIVE_HARMONIC:
            cols.append(model.amplitude * np.sin(model.omega * times) - u[:, 0])
        if n > 1:
            cols.append(u[:, :-1] - u[:, 1:])
        if model.c_wall != 0.0:
            cols.append(u[:, -1])
    return np.column_stack(cols)


def _contact_event_times(
    model: ChainModel, anchor_vec: np.ndarray, period: float, probe_dt: float
) -> np.ndarray:
    """Times in (0, period) where a gating gap of the flow changes sign.

    Integrates one period from the anchor recording every step (in bounded
    chunks), then locates each sign change by linear interpolation within
    its step.  Resolution is far below the step sizes the times are used
    to choose, since the gaps vary on the O(1) contact time scale.
    """
    n_steps = max(1, round(period / probe_dt))
    dt = period / n_steps
    kind = 1 if model.extended_system else 0
    y = anchor_vec.copy()
    events = []
    carry_t = None
    carry_row = None
    done = 0
    while done < n_steps:
        chunk = min(_EVENT_CHUNK, n_steps - done)
        out = np.empty((chunk + 1, model.dim))
        if kind == 1:
            (n, _, c_bb, c_w, damp, kf, _, amp, omega, _, _, _) = model.kernel_args()
            stepped, _, _, _ = _kernels.rk4_extended(
                y, done * dt, dt, chunk, 1, n, c_bb, c_w, damp, kf, amp, omega, out
            )
        else:
            stepped, _, _ = _kernels.rk4_chain(
                y, done * dt, dt, chunk, 1, *model.kernel_args(), out, np.empty(0)
            )
        if stepped < chunk:
            raise ShootingError(
                f"flow diverged at t = {(done + stepped) * dt:.6g} while "
                "recording contact events"
            )
        times = (done + np.arange(chunk + 1)) * dt
        if carry_row is not None:
            rows = np.vstack([carry_row, out])
            ts = np.concatenate([[carry_t], times])
        else:
            rows, ts = out, times
        sig = _gap_signals(model, ts, rows)
        lo, hi = sig[:-1], sig[1:]
        rows_i, cols_j = np.nonzero(lo * hi < 0.0)
        if rows_i.size:
            a = lo[rows_i, cols_j]
            b = hi[rows_i, cols_j]
            events.append(ts[rows_i] + dt * a / (a - b))
        carry_t = times[-1]
        carry_row = out[-1]
        done += chunk
    if not events:
        return np.empty(0)
    return np.sort(np.concatenate(events))


def aligned_step(
    model: ChainModel,
    anchor: Union[State, np.ndarray],
    period: float,
    dt_min: float,
    dt_max: float,
    probe_dt: Optional[float] = None,
) -> AlignedStep:
    """Choose a shooting step whose grid keeps contact events interior.

    The gated damping makes the one-period map piecewise smooth in the
    anchor: when a contact opening or closing drifts across an integration
    step boundary, the map jumps by the damping impulse mismatch of one
    step, and Newton stalls at that scale instead of converging.  This
    records the event times of one period flowed from ``anchor``, then
    scans every integer step count between ``period/dt_max`` and
    ``period/dt_min`` for the one that keeps all events farthest from step
    boundaries (largest ``margin``, in units of one step).

    The events of a stalled iterate can sit a few steps away from the
    converged orbit's; if Newton still stalls at the returned step,
    realign from the improved anchor it produced.

    A contact-free flow has no events; any step works, and the coarsest
    one is returned with infinite margin.
    """
    y = _as_vector(model, anchor)
    if not (0.0 < dt_min <= dt_max):
        raise ValueError("need 0 < dt_min <= dt_max")
    probe = probe_dt if probe_dt is not None else model.natural_dt
    events = _contact_event_times(model, y, period, probe)
    n_lo = max(1, math.ceil(period / dt_max))
    n_hi = max(n_lo, math.floor(period / dt_min))
    if n_hi - n_lo > 20_000_000:
        raise ValueError("step range too wide to scan; narrow [dt_min, dt_max]")
    if events.size == 0:
        return AlignedStep(period / n_lo, n_lo, math.inf, events)
    phases = events / period
    best_n, best_margin = n_lo, -1.0
    block = 200_000
    for start in range(n_lo, n_hi + 1, block):
        ns = np.arange(start, min(start + block, n_hi + 1), dtype=float)
        frac = np.outer(ns, phases) % 1.0
        margin = np.minimum(frac, 1.0 - frac).min(axis=1)
        j = int(np.argmax(margin))
        if margin[j] > best_margin:
            best_margin, best_n = float(margin[j]), int(ns[j])
    return AlignedStep(period / best_n, best_n, best_margin, events)
