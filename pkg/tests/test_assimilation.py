"""Tests for driver-observer runs and recorded-force assimilation."""

import numpy as np
import pytest

from sonicvacuum.chain import (
    ChainConfig,
    ChainModel,
    DriveKind,
    DriveSpec,
    ForceRecord,
    MaterialSpec,
    WallModel,
)
from sonicvacuum.integrate import IntegrationPlan, integrate
from sonicvacuum.assimilation import (
    run_extended,
    run_prescribed_zeroth,
    run_recorded,
)
from sonicvacuum import _kernels

# rescaled drive frequency and contact damping of the benchmark chain
# (28.84 g beads, 193 GPa) driven at 340 Hz with a 0.5 um boundary stroke,
# frozen from the scaling formulas
BENCH_BETA = 0.13811563241816827
BENCH_LAM = 0.2241758343968213


def bench_config(wall_model=WallModel.IDENTICAL_SPHERE):
    return ChainConfig(
        n_beads=11,
        bead_radius=9.525e-3,
        material=MaterialSpec(193e9, 0.3, 7930.0),
        damping=100.0,
        wall_model=wall_model,
        bead_mass=28.84e-3,
    )


def twin_plan(n_periods, stride=256):
    period = 2.0 * np.pi / BENCH_BETA
    return IntegrationPlan(t_end=n_periods * period, record_stride=stride)


# ---------------------------------------------------------------------------
# the coupled driver-observer pair
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("k_nd", [0.0, 0.001])
def test_diagonal_twin_stays_diagonal_exactly(k_nd):
    # both chains see the identical boundary force and identical equations,
    # so a run started on the diagonal must stay there to the last bit
    run = run_extended(
        bench_config(WallModel.RIGID_PLANE),
        BENCH_BETA,
        BENCH_LAM,
        k_nd,
        twin_plan(12),
    )
    assert run.sync_error.max() == 0.0
    assert run.synchronized


def test_observer_desynchronizes_without_foundation():
    # with no grounding stiffness the force-coupled chain has free flight
    # phases, and a small observer offset grows to order one
    run = run_extended(
        bench_config(WallModel.RIGID_PLANE),
        BENCH_BETA,
        BENCH_LAM,
        0.0,
        twin_plan(50),
        observer_offset=1e-3,
    )
    err = run.sync_error
    assert err[0] == pytest.approx(1e-3)
    assert err.max() > 1e-2
    assert not run.synchronized


def test_twin_views_split_the_run():
    run = run_extended(
        bench_config(WallModel.RIGID_PLANE), BENCH_BETA, BENCH_LAM, 0.001, twin_plan(3)
    )
    driver = run.driver_trajectory
    observer = run.observer_trajectory
    assert np.array_equal(driver.displacements, run.run.displacements[:, :11])
    assert np.array_equal(observer.displacements, run.run.displacements[:, 11:])
    assert observer.model.drive_kind == _kernels.DRIVE_FORCE
    # the observer view's input channel replays the coupling force the
    # driver emitted, on the shared sample grid
    assert np.allclose(
        observer.input_force(), driver.input_force(), rtol=0, atol=1e-12
    )


def test_sync_error_is_twin_only():
    model = ChainModel.extended(11, BENCH_BETA, BENCH_LAM, 0.0)
    single = ChainModel.scaled(
        bench_config(),
        DriveSpec(DriveKind.HARMONIC_DISPLACEMENT, frequency=340.0, amplitude=5e-7),
    )
    plan = IntegrationPlan(t_end=0.05, record_stride=10)
    assert integrate(model, None, plan).sync_error().shape[0] > 0
    with pytest.raises(ValueError):
        integrate(single, None, plan).sync_error()


# ---------------------------------------------------------------------------
# recorded-force runs
# ---------------------------------------------------------------------------


def test_replay_of_captured_boundary_force_matches_source():
    # capturing the boundary contact force at every half step and replaying
    # it through the recorded-force path must reproduce the source run; the
    # capture grid coincides with the scheme's stage times, so the only
    # mismatch left is the sub-step force difference between the two
    # midpoint stages
    config = bench_config()
    model = ChainModel.physical(
        config,
        DriveSpec(DriveKind.HARMONIC_DISPLACEMENT, frequency=340.0, amplitude=5e-7),
    )
    dt = model.natural_dt
    plan = IntegrationPlan(dt=dt, t_end=12.0 / 340.0, record_stride=500)
    source = run_prescribed_zeroth(
        config, 5e-7, 340.0, plan, capture_drive_force=True
    )
    record = source.drive_record
    assert record.times[0] == 0.0
    assert record.forces[0] == 0.0
    assert record.sample_rate == pytest.approx(2.0 / dt, rel=1e-12)

    replay = run_recorded(config, record, plan)
    scale = np.max(np.abs(source.displacements))
    assert np.max(np.abs(replay.displacements - source.displacements)) < 1e-9 * scale
    peak_src = source.transmitted_force().max()
    peak_rep = replay.transmitted_force().max()
    assert peak_rep == pytest.approx(peak_src, rel=1e-9)


def test_recorded_run_infers_step_from_peak_force():
    config = bench_config()
    t_end = 4.0 / 340.0
    capture_plan = IntegrationPlan(t_end=t_end, record_stride=500)
    source = run_prescribed_zeroth(
        config, 5e-7, 340.0, capture_plan, capture_drive_force=True
    )
    replay = run_recorded(
        config, source.drive_record, IntegrationPlan(t_end=t_end, record_stride=200)
    )
    assert np.isfinite(replay.states).all()
    assert replay.times[-1] >= t_end - 1e-6


def test_recorded_run_requires_covering_span():
    config = bench_config()
    times = np.linspace(0.0, 0.5, 51)
    record = ForceRecord.from_samples(times, np.ones_like(times))
    plan = IntegrationPlan(dt=1e-5, t_end=1.0)
    with pytest.raises(ValueError, match="spans"):
        run_recorded(config, record, plan)


def test_zero_record_needs_explicit_dt():
    config = bench_config()
    times = np.linspace(0.0, 1.0, 101)
    record = ForceRecord.from_samples(times, np.zeros_like(times))
    with pytest.raises(ValueError, match="all-zero"):
        run_recorded(config, record, IntegrationPlan(t_end=0.5))


def test_zero_record_keeps_chain_at_rest():
    config = bench_config()
    times = np.linspace(0.0, 1e-3, 101)
    record = ForceRecord.from_samples(times, np.zeros_like(times))
    plan = IntegrationPlan(dt=1e-6, t_end=5e-4, record_stride=50)
    traj = run_recorded(config, record, plan)
    assert np.all(traj.states == 0.0)


def test_prescribed_stationary_run_cannot_capture():
    plan = IntegrationPlan(transient_periods=5, measure_periods=2)
    with pytest.raises(ValueError, match="capture"):
        run_prescribed_zeroth(
            bench_config(), 5e-7, 340.0, plan, capture_drive_force=True
        )
