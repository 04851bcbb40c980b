"""Periodic-orbit machinery: Newton shooting, Floquet spectra, Liouville."""

import math

import numpy as np
import pytest

from sonicvacuum import _kernels
from sonicvacuum.chain import (
    ChainConfig,
    ChainModel,
    DriveKind,
    DriveSpec,
    MaterialSpec,
    State,
    Variant,
    WallModel,
)
from sonicvacuum.integrate import IntegrationPlan, integrate, integrate_to_stationary
from sonicvacuum.orbits import (
    PeriodicOrbit,
    ShootingError,
    StabilityVerdict,
    floquet,
    liouville_check,
    newton_periodic,
    stroboscopic_map,
)

# The orbit fixtures pin dt = 3.2e-4.  The gated damping makes the flow's
# right-hand side jump at contact events, so the stroboscopic map acquires
# O(dt * lam * dv) discontinuities on a dt-dependent mesh; a step at which
# the stationary contact pattern is grid-stable lets the transient settle
# onto an exact fixed point of the discrete map, and this one was verified
# to do so for this configuration (nearby steps stall at ~1e-6).
ORBIT_DT = 3.2e-4


def linear_chain(n=4, k=0.04, lam=0.1, c_bead=1.0):
    # with c_bead = 0 and lam = 0 the contact terms vanish identically and
    # the chain is exactly n independent grounded oscillators
    return ChainModel(
        variant=Variant.SCALED,
        n_beads=n,
        inv_mass=1.0,
        c_bead=c_bead,
        c_wall=0.0,
        damping=lam,
        foundation=k,
        drive_kind=_kernels.DRIVE_FREE,
        natural_dt=1e-3,
    )


def resonant_model(k_nd=0.0):
    config = ChainConfig(
        n_beads=11,
        bead_radius=9.525e-3,
        material=MaterialSpec(193e9, 0.3, 7930.0),
        damping=100.0,
        wall_model=WallModel.RIGID_PLANE,
        bead_mass=28.84e-3,
    )
    drive = DriveSpec(
        DriveKind.HARMONIC_DISPLACEMENT, frequency=340.0, amplitude=5e-7
    )
    return ChainModel.scaled(config, drive, k_nd=k_nd)


@pytest.fixture(scope="module")
def resonant_orbit():
    model = resonant_model()
    plan = IntegrationPlan(
        dt=ORBIT_DT, record_stride=10**9, transient_periods=300, measure_periods=1
    )
    seed = integrate_to_stationary(model, plan).states[-1]
    orbit = newton_periodic(seed, model, model.period, dt=ORBIT_DT)
    assert orbit.converged
    return model, orbit


@pytest.fixture(scope="module")
def twin_orbit(resonant_orbit):
    model, orbit = resonant_orbit
    u, v = orbit.anchor_state.displacements, orbit.anchor_state.velocities
    diag = State(np.concatenate([u, u]), np.concatenate([v, v]))
    twin = ChainModel.extended(11, beta=model.omega, lam=model.damping, k_nd=0.0)
    ext_orbit = newton_periodic(diag, twin, twin.period, dt=ORBIT_DT)
    assert ext_orbit.converged
    return twin, ext_orbit


# ---------------------------------------------------------------------------
# Newton shooting on exactly solvable chains
# ---------------------------------------------------------------------------


def test_newton_collapses_linear_chain_onto_origin():
    # over half a foundation period the flow is an exact rotation by pi, so
    # the map Jacobian is -I up to finite-difference roundoff: the first
    # Newton step lands within that roundoff of the origin and at most one
    # polish step is needed to reach the tolerance
    model = linear_chain(lam=0.0, c_bead=0.0)
    period = math.pi / math.sqrt(0.04)
    seed = State(np.array([-0.04, -0.03, -0.02, -0.01]), np.zeros(4))
    orbit = newton_periodic(seed, model, period, newton_tol=1e-13)
    assert orbit.converged
    assert orbit.residual < 1e-12
    assert len(orbit.residual_history) <= 4
    assert np.max(np.abs(orbit.anchor_state.displacements)) < 1e-8


def test_conservative_linear_orbit_is_marginal_with_unit_determinant():
    model = linear_chain(lam=0.0, c_bead=0.0)
    period = 2.0 * math.pi / math.sqrt(0.04)
    anchor = State(np.array([-0.04, -0.03, -0.02, -0.01]), np.zeros(4))
    orbit = newton_periodic(anchor, model, period)
    assert orbit.converged  # any point of a linear center is periodic
    spectrum = floquet(orbit, model)
    assert spectrum.verdict is StabilityVerdict.MARGINAL
    assert np.max(np.abs(np.abs(spectrum.multipliers) - 1.0)) < 1e-6
    det, predicted = liouville_check(model, orbit.anchor_state, period)
    assert predicted == pytest.approx(1.0, abs=1e-12)
    assert det == pytest.approx(1.0, rel=1e-5)


def test_singular_map_jacobian_raises_shooting_error():
    # a free drifting bead: the period map shears, (J - I) is singular
    model = ChainModel(
        variant=Variant.SCALED,
        n_beads=1,
        inv_mass=1.0,
        c_bead=0.0,
        c_wall=0.0,
        damping=0.0,
        foundation=0.0,
        drive_kind=_kernels.DRIVE_FREE,
        natural_dt=1e-3,
    )
    seed = State(np.array([-1.0]), np.array([0.1]))
    with pytest.raises(ShootingError):
        newton_periodic(seed, model, 2.0)


def test_orbit_order_counts_drive_periods():
    orbit = PeriodicOrbit(State.zero(1), period=0.02, residual=0.0, converged=True)
    assert orbit.order(0.01) == 2


def test_stroboscopic_map_advances_exactly_one_period():
    model = linear_chain(lam=0.0, c_bead=0.0)
    period = 2.0 * math.pi / math.sqrt(0.04)
    s0 = State(np.array([-0.04, -0.03, -0.02, -0.01]), np.zeros(4))
    mapped = stroboscopic_map(s0, model, period)
    assert mapped.time == pytest.approx(period)
    assert np.max(np.abs(mapped.displacements - s0.displacements)) < 1e-10
    assert np.max(np.abs(mapped.velocities - s0.velocities)) < 1e-10


# ---------------------------------------------------------------------------
# the driven resonant orbit
# ---------------------------------------------------------------------------


def test_resonant_orbit_converges_below_tolerance(resonant_orbit):
    _, orbit = resonant_orbit
    assert orbit.converged
    assert orbit.residual < 1e-10


def test_resonant_orbit_is_stable(resonant_orbit):
    model, orbit = resonant_orbit
    spectrum = floquet(orbit, model, dt=ORBIT_DT)
    assert spectrum.verdict is StabilityVerdict.STABLE
    assert spectrum.max_modulus < 1.0 - 1e-3

    # stable verdicts must be corroborated by the flow itself: a small
    # perturbation returns to the orbit within 50 periods.  The step is
    # snapped to divide the period so the run lands exactly on the anchor
    # phase of the discrete map the orbit is a fixed point of.
    dt_snap = model.period / round(model.period / ORBIT_DT)
    y0 = model.pack(orbit.anchor_state)
    y0[0] += 1e-6
    plan = IntegrationPlan(
        dt=dt_snap, t_end=50 * model.period, record_stride=10**9
    )
    final = integrate(model, y0, plan).states[-1]
    assert np.max(np.abs(final - model.pack(orbit.anchor_state))) < 1e-6


def test_newton_tail_is_superlinear(resonant_orbit):
    model, orbit = resonant_orbit
    y = model.pack(orbit.anchor_state).copy()
    y[3] += 1e-6
    rerun = newton_periodic(y, model, model.period, dt=ORBIT_DT)
    assert rerun.converged
    hist = rerun.residual_history
    for r_now, r_next in zip(hist, hist[1:]):
        if r_now < 1e-4:
            assert r_next <= 1.0 * r_now**1.5 + 1e-13
    assert any(r < 1e-4 for r in hist[:-1])


def test_liouville_volume_balance_on_resonant_orbit(resonant_orbit):
    model, orbit = resonant_orbit
    det, predicted = liouville_check(
        model, orbit.anchor_state, orbit.period, dt=ORBIT_DT
    )
    assert det == pytest.approx(predicted, rel=1e-3)
    assert det < 1.0  # damping contracts phase volume


# ---------------------------------------------------------------------------
# the twin system at the same point
# ---------------------------------------------------------------------------


def test_twin_newton_converges_on_the_diagonal(twin_orbit):
    twin, orbit = twin_orbit
    assert orbit.converged
    assert orbit.residual < 1e-10
    u = orbit.anchor_state.displacements
    assert np.array_equal(u[:11], u[11:])


def test_twin_spectrum_contains_the_driver_spectrum(resonant_orbit, twin_orbit):
    model, orbit = resonant_orbit
    twin, ext_orbit = twin_orbit
    single = floquet(orbit, model, dt=ORBIT_DT).multipliers
    combined = floquet(ext_orbit, twin, dt=ORBIT_DT).multipliers
    # the driver block is autonomous, so its multipliers survive verbatim
    for mu in single:
        assert np.min(np.abs(combined - mu)) < 1e-6


def test_unverdicted_orbit_is_rejected_by_floquet():
    bad = PeriodicOrbit(State.zero(1), period=1.0, residual=1.0, converged=False)
    model = linear_chain(n=1)
    with pytest.raises(ValueError):
        floquet(bad, model)


def test_unstable_twin_corroborated_by_observer_growth(twin_orbit):
    twin, orbit = twin_orbit
    spectrum = floquet(orbit, twin, dt=ORBIT_DT)
    assert spectrum.verdict is StabilityVerdict.UNSTABLE
    assert int(np.sum(np.abs(spectrum.multipliers) > 1.0 + 1e-3)) == 1

    y0 = twin.pack(orbit.anchor_state)
    y0[22] += 1e-6  # nudge the observer block only
    plan = IntegrationPlan(dt=ORBIT_DT, t_end=50 * twin.period, record_stride=10**9)
    final = integrate(twin, y0, plan).states[-1]
    deviation = np.max(np.abs(final - twin.pack(orbit.anchor_state)))
    assert deviation >= 10 * 1e-6
