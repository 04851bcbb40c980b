"""Contact law, configuration, and rescaling tests.

Expected numbers are frozen from independent hand evaluation of the
formulas (noted inline), not from running the package.
"""

import math

import numpy as np
import pytest

from sonicvacuum.chain import (
    ChainConfig,
    ChainModel,
    DegenerateScalingError,
    DriveKind,
    DriveSpec,
    ForceRecord,
    MaterialSpec,
    State,
    Variant,
    WallModel,
    contact_coefficients,
    damping_force,
    energies,
    hertz_force,
    nondimensionalize,
    rhs,
    transmitted_force,
)

# Stainless-steel demo chain: R = 9.525 mm, E = 193 GPa, nu = 0.3,
# bead mass 28.84 g, D = 100 N s/m, sphere-on-sphere wall, A0 = 0.5 um.
# Frozen oracles: c = E sqrt(2R) / (3 (1 - nu^2)) and
# phi = sqrt(sqrt(2 R A0) E / (3 (1 - nu^2) m)) evaluated by hand.
DEMO_COEFF = 9757580703.939766
DEMO_PHI = 15467.351284126215
DEMO_LAM = 0.2241758343968213
DEMO_BETA_340 = 0.13811563241816827

# Bearing-steel lab chain: R = 12.7 mm, E = 210 GPa, nu = 0.3,
# rho = 7850 kg/m^3, D = 35.4 N s/m, sphere-on-plane wall.
LAB_COEFF = 12259521115.776329
LAB_MASS = 0.06735493617150004


def demo_config(**overrides):
    kw = dict(
        n_beads=11,
        bead_radius=9.525e-3,
        material=MaterialSpec(193e9, 0.3, 7930.0),
        damping=100.0,
        wall_model=WallModel.IDENTICAL_SPHERE,
        bead_mass=28.84e-3,
    )
    kw.update(overrides)
    return ChainConfig(**kw)


def lab_config(**overrides):
    kw = dict(
        n_beads=11,
        bead_radius=12.7e-3,
        material=MaterialSpec(210e9, 0.3, 7850.0),
        damping=35.4,
        wall_model=WallModel.RIGID_PLANE,
    )
    kw.update(overrides)
    return ChainConfig(**kw)


def demo_drive(frequency=340.0, amplitude=5e-7):
    return DriveSpec(
        DriveKind.HARMONIC_DISPLACEMENT, frequency=frequency, amplitude=amplitude
    )


# ---------------------------------------------------------------------------
# configuration validation
# ---------------------------------------------------------------------------


def test_material_rejects_bad_values():
    with pytest.raises(ValueError):
        MaterialSpec(-1.0, 0.3, 7850.0)
    with pytest.raises(ValueError):
        MaterialSpec(210e9, 0.5, 7850.0)
    with pytest.raises(ValueError):
        MaterialSpec(210e9, 0.3, 0.0)


def test_chain_config_rejects_bad_values():
    with pytest.raises(ValueError):
        demo_config(n_beads=1)
    with pytest.raises(ValueError):
        demo_config(bead_radius=0.0)
    with pytest.raises(ValueError):
        demo_config(damping=-1.0)
    with pytest.raises(ValueError):
        demo_config(foundation_stiffness=-2.0)
    with pytest.raises(ValueError):
        demo_config(bead_mass=0.0)


def test_drive_spec_needs_exactly_one_amplitude():
    with pytest.raises(ValueError):
        DriveSpec(DriveKind.HARMONIC_DISPLACEMENT, frequency=60.0)
    with pytest.raises(ValueError):
        DriveSpec(
            DriveKind.HARMONIC_DISPLACEMENT,
            frequency=60.0,
            amplitude=1e-6,
            velocity_amplitude=1e-3,
        )
    with pytest.raises(ValueError):
        DriveSpec(DriveKind.HARMONIC_DISPLACEMENT, frequency=0.0, amplitude=1e-6)


def test_velocity_amplitude_converts_to_displacement():
    # A0 = V0 / (2 pi f)
    drive = DriveSpec(
        DriveKind.HARMONIC_DISPLACEMENT, frequency=60.0, velocity_amplitude=3e-3
    )
    assert drive.displacement_amplitude() == pytest.approx(
        3e-3 / (2.0 * math.pi * 60.0), rel=1e-14
    )


def test_mass_derived_from_density():
    config = lab_config()
    assert config.mass == pytest.approx(LAB_MASS, rel=1e-12)
    # explicit mass wins over the density-derived value
    assert demo_config().mass == 28.84e-3


# ---------------------------------------------------------------------------
# contact law
# ---------------------------------------------------------------------------


def test_contact_coefficient_demo_chain():
    bead_bead, bead_wall = contact_coefficients(demo_config())
    assert bead_bead == pytest.approx(DEMO_COEFF, rel=1e-12)
    assert bead_wall == pytest.approx(DEMO_COEFF, rel=1e-12)  # identical spheres


def test_contact_coefficient_lab_chain():
    bead_bead, bead_wall = contact_coefficients(lab_config())
    assert bead_bead == pytest.approx(LAB_COEFF, rel=1e-12)
    assert bead_wall == pytest.approx(math.sqrt(2.0) * LAB_COEFF, rel=1e-12)


def test_hertz_force_tension_free():
    assert hertz_force(-1e-6, DEMO_COEFF) == 0.0
    assert hertz_force(0.0, DEMO_COEFF) == 0.0
    overlaps = np.linspace(-3e-6, 0.0, 7)
    assert all(hertz_force(d, LAB_COEFF) == 0.0 for d in overlaps)


def test_hertz_force_power_law():
    f1 = hertz_force(1e-6, LAB_COEFF)
    f2 = hertz_force(2e-6, LAB_COEFF)
    assert f1 == pytest.approx(LAB_COEFF * 1e-9, rel=1e-12)
    assert f2 / f1 == pytest.approx(2.0**1.5, rel=1e-12)


def test_hertz_force_is_c1_at_zero():
    # |F(d) - F(0)| / d -> 0 from above: the slope vanishes at contact onset
    deltas = 10.0 ** np.arange(-6, -13, -1)
    slopes = [hertz_force(d, LAB_COEFF) / d for d in deltas]
    assert all(s2 < s1 for s1, s2 in zip(slopes, slopes[1:]))
    # slope ~ sqrt(delta): six decades of delta shed three decades of slope
    assert slopes[-1] == pytest.approx(1e-3 * slopes[0], rel=1e-9)


def test_damping_force_heaviside_gate():
    assert damping_force(0.5, False, 100.0) == 0.0
    assert damping_force(0.5, True, 100.0) == pytest.approx(50.0)
    assert damping_force(-0.25, True, 35.4) == pytest.approx(-8.85)


def test_transmitted_force_lab_value():
    # u_11 = 1 um against the plane wall: 2 E sqrt(R) u^{3/2} / (3(1-nu^2)),
    # evaluated by hand for the lab material.
    config = lab_config()
    u = np.zeros(11)
    u[-1] = 1e-6
    state = State(u, np.zeros(11))
    assert transmitted_force(state, config) == pytest.approx(17.33758103013022,
                                                             rel=1e-12)


def test_transmitted_force_homogeneity():
    config = lab_config()
    u1, u2 = np.zeros(11), np.zeros(11)
    u1[-1] = 0.7e-6
    u2[-1] = 1.4e-6
    f1 = transmitted_force(State(u1, np.zeros(11)), config)
    f2 = transmitted_force(State(u2, np.zeros(11)), config)
    assert f2 / f1 == pytest.approx(2.0**1.5, rel=1e-12)


def test_transmitted_force_zero_when_separated():
    config = lab_config()
    u = np.zeros(11)
    u[-1] = -1e-6
    assert transmitted_force(State(u, np.zeros(11)), config) == 0.0


# ---------------------------------------------------------------------------
# rescaling
# ---------------------------------------------------------------------------


def test_nondimensionalize_demo_chain():
    ss = nondimensionalize(demo_config(), demo_drive())
    assert ss.phi == pytest.approx(DEMO_PHI, rel=1e-12)
    assert ss.lam == pytest.approx(DEMO_LAM, rel=1e-12)
    assert ss.beta == pytest.approx(DEMO_BETA_340, rel=1e-12)
    assert ss.k_nd == 0.0
    assert ss.n_beads == 11


def test_rescaling_round_trip_recovers_inputs():
    # back through the scaling, every physical quantity must come back to
    # 12 significant digits
    config = lab_config(foundation_stiffness=12259521.115776328)
    drive = demo_drive(frequency=60.0, amplitude=8e-6)
    ss = nondimensionalize(config, drive)
    phys = ss.to_physical(config)
    assert phys["amplitude_m"] == pytest.approx(8e-6, rel=1e-12)
    assert phys["frequency_hz"] == pytest.approx(60.0, rel=1e-12)
    assert phys["damping_ns_m"] == pytest.approx(35.4, rel=1e-12)
    assert phys["foundation_n_m"] == pytest.approx(12259521.115776328, rel=1e-12)


def test_nondimensionalize_rejects_recorded_drive():
    record = ForceRecord.from_samples([0.0, 1.0], [0.0, 1.0])
    drive = DriveSpec(DriveKind.RECORDED_FORCE, record=record)
    with pytest.raises(ValueError):
        nondimensionalize(demo_config(), drive)


def test_nondimensionalize_rejects_zero_amplitude():
    with pytest.raises(DegenerateScalingError):
        nondimensionalize(demo_config(), demo_drive(amplitude=0.0))


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------


def test_rhs_zero_state_zero_drive_is_zero():
    config = demo_config()
    record = ForceRecord.from_samples([0.0, 1.0], [0.0, 0.0])
    drive = DriveSpec(DriveKind.RECORDED_FORCE, record=record)
    state = State.zero(11)
    out = rhs(state, 0.0, Variant.PHYSICAL, config, drive)
    assert np.all(out.displacements == 0.0)
    assert np.all(out.velocities == 0.0)


def test_rhs_zero_phase_drive_gate_is_shut():
    # at t = 0 the actuator sits at zero overlap against bead 1; the contact
    # gate is strict, so neither the elastic nor the damping term may leak
    config = demo_config()
    out = rhs(State.zero(11), 0.0, Variant.PHYSICAL, config, demo_drive())
    assert np.all(out.displacements == 0.0)
    assert np.all(out.velocities == 0.0)


def test_rhs_quarter_period_drive_only_touches_first_bead():
    config = demo_config()
    drive = demo_drive()
    t = 1.0 / (4.0 * 340.0)
    out = rhs(State.zero(11), t, Variant.PHYSICAL, config, drive)
    c_bead, _ = contact_coefficients(config)
    phase = 2.0 * math.pi * 340.0 * t
    gap = 5e-7 * math.sin(phase)
    v_d = 5e-7 * 2.0 * math.pi * 340.0 * math.cos(phase)
    expected = (c_bead * gap**1.5 + 100.0 * v_d) / 28.84e-3
    assert out.velocities[0] == pytest.approx(expected, rel=1e-12)
    assert np.all(out.velocities[1:] == 0.0)


def test_rhs_newtons_third_law():
    # compress one interior contact: the pair's reaction accelerations cancel
    config = demo_config(damping=0.0)
    u = np.zeros(11)
    u[4] = 1e-6  # presses into bead 6, pulls away from bead 4
    out = rhs(State(u, np.zeros(11)), 0.0, Variant.PHYSICAL, config, demo_drive())
    accel = out.velocities
    assert accel[4] == pytest.approx(-accel[5], rel=1e-12)
    assert np.sum(accel * config.mass) == pytest.approx(
        0.0, abs=1e-12 * abs(accel[4]) * config.mass
    )


def test_extended_diagonal_symmetry():
    # identical chain states make F_in reproduce the drive force exactly, so
    # both halves of the twin system step identically (bit-level)
    model = ChainModel.extended(5, beta=0.2, lam=0.1, k_nd=1e-3)
    rng = np.random.default_rng(7)
    block = rng.standard_normal(10) * 0.3
    y = np.concatenate([block, block])
    dy = model.rhs(y, 0.37)
    assert np.array_equal(dy[:10], dy[10:])


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------


def test_kinetic_energy_single_moving_bead():
    config = demo_config()
    v = np.zeros(11)
    v[2] = 1.0
    kinetic, _ = energies(State(np.zeros(11), v), config)
    assert kinetic[2] == pytest.approx(0.01442, rel=1e-12)  # m v^2 / 2 by hand
    assert np.all(kinetic[[0, 1, 3, 4, 5, 6, 7, 8, 9, 10]] == 0.0)


def test_zero_velocities_zero_kinetic():
    config = lab_config()
    kinetic, _ = energies(State.zero(11), config)
    assert np.all(kinetic == 0.0)


def test_potential_energy_hertz_pair():
    # single compressed pair: (2/5) c delta^{5/2}, by hand
    config = lab_config()
    u = np.zeros(11)
    u[0] = 1e-6
    _, potential = energies(State(u, np.zeros(11)), config)
    assert potential == pytest.approx(0.4 * LAB_COEFF * 1e-15, rel=1e-12)


def test_potential_energy_foundation_term():
    config = lab_config(foundation_stiffness=1e7)
    # translate the whole chain backwards: every pair gap and the wall gap
    # stay open, so the flexure springs are the only stored energy
    u = np.full(11, -2e-6)
    _, potential = energies(State(u, np.zeros(11)), config)
    assert potential == pytest.approx(11 * 0.5 * 1e7 * 4e-12, rel=1e-12)


# ---------------------------------------------------------------------------
# states and records
# ---------------------------------------------------------------------------


def test_state_pack_unpack_round_trip():
    model = ChainModel.extended(4, beta=0.3, lam=0.05, k_nd=0.0)
    rng = np.random.default_rng(3)
    y = rng.standard_normal(model.dim)
    state = model.unpack(y, 1.25)
    assert np.array_equal(model.pack(state), y)
    assert state.time == 1.25


def test_force_record_resamples_non_uniform_times():
    times = np.array([0.0, 0.1, 0.2, 0.35, 0.5])
    forces = np.array([0.0, 1.0, 0.0, 1.5, 3.0])
    record = ForceRecord.from_samples(times, forces)
    spacing = np.diff(record.times)
    assert np.allclose(spacing, spacing[0])
    assert record.span[0] == 0.0
    assert record.span[1] == pytest.approx(0.5, abs=1e-12)


def test_force_record_rejects_non_monotone_times():
    with pytest.raises(ValueError):
        ForceRecord.from_samples([0.0, 0.2, 0.1], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        ForceRecord.from_samples([0.0], [1.0])
    with pytest.raises(ValueError):
        ForceRecord.from_samples([0.0, np.nan], [1.0, 2.0])
