"""Model definitions for harmonically driven, uncompressed granular chains.

A chain of N identical elastic spheres rests between a driven boundary on the
left and a sensing wall on the right, with no static pre-compression.  Every
contact obeys the tension-free Hertz law (force proportional to overlap^{3/2},
zero on separation) plus a linear viscous term that acts only while the
contact is closed.  Because the medium carries no linear sound speed, the
response to a harmonic drive is essentially nonlinear ("sonic vacuum").

This module holds the physical description (materials, geometry, damping,
foundation, boundary models), the contact laws, the nondimensional rescaling,
and the right-hand sides of every model variant:

* a dimensional chain driven by a prescribed harmonic boundary displacement,
* its dimensionless counterpart,
* a dimensional chain driven by a recorded force applied to the first bead,
* a dimensionless twin-chain ("driver-observer") system in which the second
  chain is forced by the contact force the first chain receives,

optionally grounded by a weak per-bead foundation stiffness.  Integration
lives in :mod:`sonicvacuum.integrate`; this module only defines the vector
fields and derived observables.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels

__all__ = [
    "DegenerateScalingError",
    "WallModel",
    "DriveKind",
    "Variant",
    "MaterialSpec",
    "ChainConfig",
    "DriveSpec",
    "ScaledSystem",
    "State",
    "ForceRecord",
    "ChainModel",
    "hertz_force",
    "contact_coefficients",
    "damping_force",
    "nondimensionalize",
    "rhs",
    "transmitted_force",
    "energies",
]

_WALL_PLANE_FACTOR = math.sqrt(2.0)

# Default integrator step in rescaled time units; dimensional models scale it
# by their contact time scale 1/phi.
DEFAULT_SCALED_DT = 1e-3


class DegenerateScalingError(ValueError):
    """Requested a unit rescaling that is singular (zero drive amplitude)."""


class WallModel(enum.Enum):
    """Contact model for the fixed wall at the right end of the chain.

    ``IDENTICAL_SPHERE`` gives the wall the same contact coefficient as a
    bead-bead pair, as if the wall were a mirror-image bead.  ``RIGID_PLANE``
    uses the sphere-on-plane coefficient, which is larger by sqrt(2) because
    the effective contact radius doubles.  Both appear in the literature for
    the same physical setup, so both are kept available.
    """

    IDENTICAL_SPHERE = "identical_sphere"
    RIGID_PLANE = "rigid_plane"

    @property
    def factor(self) -> float:
        """Wall coefficient as a multiple of the bead-bead coefficient."""
        return _WALL_PLANE_FACTOR if self is WallModel.RIGID_PLANE else 1.0


class DriveKind(enum.Enum):
    """How the chain is excited from the left."""

    HARMONIC_DISPLACEMENT = "harmonic"
    RECORDED_FORCE = "recorded"


class Variant(enum.Enum):
    """Model-variant tag selecting a right-hand side.

    ``PHYSICAL``: dimensional equations in SI units.
    ``SCALED``: dimensionless equations after the amplitude/time rescaling.
    ``EXTENDED``: dimensionless twin-chain driver-observer system (state size
    doubles; the observer chain is forced by the driver's input contact force).
    """

    PHYSICAL = "physical"
    SCALED = "scaled"
    EXTENDED = "extended"


@dataclass(frozen=True)
class MaterialSpec:
    """Elastic properties of the bead material.

    Parameters
    ----------
    elastic_modulus : float
        Young's modulus E in Pa.
    poisson_ratio : float
        Poisson's ratio, dimensionless, in [0, 0.5).
    density : float
        Mass density in kg/m^3.
    """

    elastic_modulus: float
    poisson_ratio: float
    density: float

    def __post_init__(self):
        if not (self.elastic_modulus > 0):
            raise ValueError("elastic_modulus must be positive")
        if not (0.0 <= self.poisson_ratio < 0.5):
            raise ValueError("poisson_ratio must lie in [0, 0.5)")
        if not (self.density > 0):
            raise ValueError("density must be positive")


@dataclass(frozen=True)
class ChainConfig:
    """Full physical description of one chain variant.

    Parameters
    ----------
    n_beads : int
        Number of beads N (>= 2).
    bead_radius : float
        Sphere radius R in m.
    material : MaterialSpec
        Bead material.
    damping : float
        Contact viscous coefficient D in N s/m, applied to every closed
        contact (bead-bead, drive and wall).
    foundation_stiffness : float, optional
        Linear grounding stiffness k in N/m acting on every bead, modelling
        the supporting flexures.  Zero for a free-floating chain.
    wall_model : WallModel, optional
        Right-wall contact model; defaults to the sphere-on-plane coefficient.
    bead_mass : float, optional
        Bead mass in kg.  When omitted it is derived from the material
        density as (4/3) pi R^3 rho.
    """

    n_beads: int
    bead_radius: float
    material: MaterialSpec
    damping: float
    foundation_stiffness: float = 0.0
    wall_model: WallModel = WallModel.RIGID_PLANE
    bead_mass: Optional[float] = None

    def __post_init__(self):
        if self.n_beads < 2:
            raise ValueError("n_beads must be at least 2")
        if not (self.bead_radius > 0):
            raise ValueError("bead_radius must be positive")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")
        if self.foundation_stiffness < 0:
            raise ValueError("foundation_stiffness must be non-negative")
        if self.bead_mass is not None and not (self.bead_mass > 0):
            raise ValueError("bead_mass must be positive when given")

    @property
    def mass(self) -> float:
        """Bead mass in kg, derived from density unless given explicitly."""
        if self.bead_mass is not None:
            return self.bead_mass
        r = self.bead_radius
        return 4.0 / 3.0 * math.pi * r**3 * self.material.density


@dataclass(frozen=True)
class ForceRecord:
    """Uniformly sampled force time series driving the first bead.

    Attributes
    ----------
    times : ndarray
        Sample times in s, strictly increasing, uniformly spaced.
    forces : ndarray
        Force samples in N, same length as ``times``.
    sample_rate : float
        Samples per second (1 / spacing).
    """

    times: np.ndarray
    forces: np.ndarray
    sample_rate: float

    @classmethod
    def from_samples(cls, times, forces) -> "ForceRecord":
        """Build a record from (time, force) samples, resampling if needed.

        Times must be strictly increasing.  Non-uniform records are linearly
        resampled onto a uniform grid with the median original spacing.
        """
        t = np.asarray(times, dtype=float)
        f = np.asarray(forces, dtype=float)
        if t.ndim != 1 or t.shape != f.shape or t.size < 2:
            raise ValueError("need matching 1-D time/force arrays with >= 2 samples")
        if not (np.isfinite(t).all() and np.isfinite(f).all()):
            raise ValueError("force record contains non-finite samples")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValueError("record times must be strictly increasing")
        step = float(np.median(dt))
        if np.max(np.abs(dt - step)) > 1e-9 * step:
            n = int(round((t[-1] - t[0]) / step)) + 1
            tu = t[0] + step * np.arange(n)
            f = np.interp(tu, t, f)
            t = tu
        return cls(times=t, forces=f, sample_rate=1.0 / step)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])


@dataclass(frozen=True)
class DriveSpec:
    """Excitation applied at the left end of the chain.

    For ``HARMONIC_DISPLACEMENT`` the 0th (boundary) bead moves as
    ``A0 sin(2 pi f t)`` with zero initial phase; the amplitude may be given
    directly (``amplitude``, m) or as a velocity amplitude (``velocity_amplitude``,
    m/s) with A0 = V0 / (2 pi f).  For ``RECORDED_FORCE`` the sampled force in
    ``record`` is applied to bead 1 as an external force with no contact gating.
    """

    kind: DriveKind
    frequency: Optional[float] = None
    amplitude: Optional[float] = None
    velocity_amplitude: Optional[float] = None
    record: Optional[ForceRecord] = None

    def __post_init__(self):
        if self.kind is DriveKind.HARMONIC_DISPLACEMENT:
            if self.frequency is None or not (self.frequency > 0):
                raise ValueError("harmonic drive needs frequency > 0")
            given = (self.amplitude is not None) + (self.velocity_amplitude is not None)
            if given != 1:
                raise ValueError(
                    "harmonic drive needs exactly one of amplitude, velocity_amplitude"
                )
            if self.record is not None:
                raise ValueError("harmonic drive does not take a force record")
        else:
            if self.record is None:
                raise ValueError("recorded drive needs a ForceRecord")
            if self.amplitude is not None or self.velocity_amplitude is not None:
                raise ValueError("recorded drive does not take an amplitude")
            if self.frequency is not None and not (self.frequency > 0):
                raise ValueError("frequency must be positive when given")

    def displacement_amplitude(self) -> float:
        """Boundary displacement amplitude A0 in m (harmonic drives only)."""
        if self.kind is not DriveKind.HARMONIC_DISPLACEMENT:
            raise ValueError("amplitude is only defined for harmonic drives")
        if self.amplitude is not None:
            return self.amplitude
        return self.velocity_amplitude / (2.0 * math.pi * self.frequency)


@dataclass(frozen=True)
class ScaledSystem:
    """Dimensionless parameter set of the rescaled chain.

    The rescaling measures displacements in units of the drive amplitude A0
    and time in units of 1/phi, where ``phi`` is the contact frequency scale
    {sqrt(2 R A0) E / (3 (1 - nu^2) m)}^{1/2}.  What remains of the physics is
    the damping ratio ``lam`` = D/(m phi), the drive frequency ``beta`` =
    2 pi f / phi and the foundation stiffness ``k_nd`` = k/(m phi^2).
    """

    phi: float
    lam: float
    beta: float
    k_nd: float
    n_beads: int

    def __post_init__(self):
        if not (self.phi > 0):
            raise ValueError("phi must be positive")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if not (self.beta > 0):
            raise ValueError("beta must be positive")

    def to_physical(self, config: ChainConfig) -> dict:
        """Invert the rescaling against ``config``, returning SI quantities.

        Returns a dict with keys ``amplitude_m``, ``frequency_hz``,
        ``damping_ns_m`` and ``foundation_n_m``.
        """
        m = config.mass
        c_bead, _ = contact_coefficients(config)
        amplitude = (m * self.phi**2 / c_bead) ** 2
        return {
            "amplitude_m": amplitude,
            "frequency_hz": self.beta * self.phi / (2.0 * math.pi),
            "damping_ns_m": self.lam * m * self.phi,
            "foundation_n_m": self.k_nd * m * self.phi**2,
        }


@dataclass
class State:
    """Phase-space point: per-bead displacements and velocities at one time.

    For the twin-chain extended system the arrays hold the driver chain's
    entries followed by the observer chain's, so their length is twice the
    bead count.
    """

    displacements: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.displacements = np.asarray(self.displacements, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.displacements.shape != self.velocities.shape:
            raise ValueError("displacements and velocities must match in shape")

    @classmethod
    def zero(cls, n: int, time: float = 0.0) -> "State":
        return cls(np.zeros(n), np.zeros(n), time)

    def copy(self) -> "State":
        return State(self.displacements.copy(), self.velocities.copy(), self.time)


def hertz_force(overlap, coefficient):
    """Tension-free Hertz contact force.

    Parameters
    ----------
    overlap : float or ndarray
        Contact overlap in m (or dimensionless).  Non-positive values mean
        the contact is open.
    coefficient : float
        Contact coefficient in N m^{-3/2}, must be positive.

    Returns
    -------
    float or ndarray
        ``coefficient * overlap**1.5`` where overlap > 0, exactly 0 elsewhere.
        The law is continuous with continuous slope at zero overlap.
    """
    if not coefficient > 0:
        raise ValueError("coefficient must be positive")
    arr = np.asarray(overlap, dtype=float)
    if not np.isfinite(arr).all():
        raise ValueError("overlap must be finite")
    pos = np.clip(arr, 0.0, None)
    out = coefficient * pos * np.sqrt(pos)
    if np.isscalar(overlap) or arr.ndim == 0:
        return float(out)
    return out


def contact_coefficients(config: ChainConfig) -> tuple[float, float]:
    """Hertz coefficients (bead-bead, bead-wall) for a chain in N m^{-3/2}.

    The bead-bead value is E sqrt(2R) / (3 (1 - nu^2)); the wall value is the
    same times the wall model's factor (sqrt(2) for a rigid plane).
    """
    mat = config.material
    c = (
        mat.elastic_modulus
        * math.sqrt(2.0 * config.bead_radius)
        / (3.0 * (1.0 - mat.poisson_ratio**2))
    )
    return c, c * config.wall_model.factor


def damping_force(rel_velocity: float, in_contact: bool, damping: float) -> float:
    """Viscous contact force D * rel_velocity, active only while in contact."""
    if damping < 0:
        raise ValueError("damping must be non-negative")
    return damping * rel_velocity if in_contact else 0.0


def nondimensionalize(config: ChainConfig, drive: DriveSpec) -> ScaledSystem:
    """Rescale a harmonically driven chain to its dimensionless form.

    Raises
    ------
    DegenerateScalingError
        If the drive amplitude is zero (the rescaling divides by A0).
    ValueError
        If the drive is not a harmonic displacement (the time scale phi
        depends on A0, which a recorded-force drive does not define).
    """
    if drive.kind is not DriveKind.HARMONIC_DISPLACEMENT:
        raise ValueError("only harmonic displacement drives can be rescaled")
    a0 = drive.displacement_amplitude()
    if a0 <= 0:
        raise DegenerateScalingError("drive amplitude must be positive to rescale")
    m = config.mass
    c_bead, _ = contact_coefficients(config)
    phi = math.sqrt(c_bead * math.sqrt(a0) / m)
    return ScaledSystem(
        phi=phi,
        lam=config.damping / (m * phi),
        beta=2.0 * math.pi * drive.frequency / phi,
        k_nd=config.foundation_stiffness / (m * phi**2),
        n_beads=config.n_beads,
    )


@dataclass(frozen=True, eq=False)
class ChainModel:
    """Concrete right-hand side of one chain variant, ready to integrate.

    A model bundles the kernel-level coefficients (already reduced to the
    chosen unit system) with enough metadata to convert observables back to
    SI units.  Build one through the factory classmethods rather than the
    constructor; tests may construct directly to get degenerate setups such
    as a single bead with no wall.

    Attributes
    ----------
    variant : Variant
        Which unit system / topology this model uses.
    n_beads : int
        Beads per chain (the extended system has twice this many equations).
    inv_mass : float
        1/m in kernel units (1.0 for dimensionless variants).
    c_bead, c_wall : float
        Contact coefficients in kernel units; ``c_wall = 0`` removes the wall.
    damping : float
        Gated viscous coefficient in kernel units (D or lam).
    foundation : float
        Grounding stiffness in kernel units (k or k_nd).
    drive_kind : int
        Kernel drive selector (0 free, 1 harmonic, 2 recorded force).
    amplitude, omega : float
        Harmonic boundary motion ``amplitude * sin(omega * t)``.
    record_t0, record_dt : float
        Sampling grid of the recorded force (recorded drives only).
    record_values : ndarray
        Recorded force samples in kernel units.
    force_scale : float
        Newtons per kernel force unit (1.0 for physical models).
    time_scale : float
        Seconds per kernel time unit (1/phi for scaled models, 1.0 physical).
    length_scale : float
        Metres per kernel displacement unit (A0 for scaled models).
    natural_dt : float
        Recommended integrator step in model time units (0 when the model
        cannot suggest one, e.g. recorded drives with no amplitude scale).
    """

    variant: Variant
    n_beads: int
    inv_mass: float
    c_bead: float
    c_wall: float
    damping: float
    foundation: float
    drive_kind: int
    amplitude: float = 0.0
    omega: float = 0.0
    record_t0: float = 0.0
    record_dt: float = 0.0
    record_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    force_scale: float = 1.0
    time_scale: float = 1.0
    length_scale: float = 1.0
    natural_dt: float = 0.0

    # -- construction -----------------------------------------------------

    @classmethod
    def physical(cls, config: ChainConfig, drive: DriveSpec) -> "ChainModel":
        """Dimensional chain under the given drive, SI units throughout."""
        c_bead, c_wall = contact_coefficients(config)
        m = config.mass
        if drive.kind is DriveKind.HARMONIC_DISPLACEMENT:
            # an amplitude-0 boundary (fixed end) leaves no contact time
            # scale to suggest a step from, so natural_dt stays unset
            phi = math.sqrt(c_bead * math.sqrt(drive.displacement_amplitude()) / m)
            return cls(
                variant=Variant.PHYSICAL,
                n_beads=config.n_beads,
                inv_mass=1.0 / m,
                c_bead=c_bead,
                c_wall=c_wall,
                damping=config.damping,
                foundation=config.foundation_stiffness,
                drive_kind=_kernels.DRIVE_HARMONIC,
                amplitude=drive.displacement_amplitude(),
                omega=2.0 * math.pi * drive.frequency,
                natural_dt=DEFAULT_SCALED_DT / phi if phi > 0 else 0.0,
            )
        rec = drive.record
        return cls(
            variant=Variant.PHYSICAL,
            n_beads=config.n_beads,
            inv_mass=1.0 / m,
            c_bead=c_bead,
            c_wall=c_wall,
            damping=config.damping,
            foundation=config.foundation_stiffness,
            drive_kind=_kernels.DRIVE_FORCE,
            record_t0=float(rec.times[0]),
            record_dt=1.0 / rec.sample_rate,
            record_values=rec.forces,
        )

    @classmethod
    def scaled(
        cls, config: ChainConfig, drive: DriveSpec, k_nd: Optional[float] = None
    ) -> "ChainModel":
        """Dimensionless chain equivalent to ``physical(config, drive)``.

        ``k_nd`` overrides the foundation stiffness produced by the
        rescaling; pass an explicit published dimensionless value here when
        it is not meant to be derived from the dimensional one.
        """
        ss = nondimensionalize(config, drive)
        a0 = drive.displacement_amplitude()
        c_bead, _ = contact_coefficients(config)
        return cls(
            variant=Variant.SCALED,
            n_beads=config.n_beads,
            inv_mass=1.0,
            c_bead=1.0,
            c_wall=config.wall_model.factor,
            damping=ss.lam,
            foundation=ss.k_nd if k_nd is None else k_nd,
            drive_kind=_kernels.DRIVE_HARMONIC,
            amplitude=1.0,
            omega=ss.beta,
            force_scale=c_bead * a0**1.5,
            time_scale=1.0 / ss.phi,
            length_scale=a0,
            natural_dt=DEFAULT_SCALED_DT,
        )

    @classmethod
    def extended(
        cls,
        n_beads: int,
        beta: float,
        lam: float,
        k_nd: float = 0.0,
        wall_model: WallModel = WallModel.RIGID_PLANE,
    ) -> "ChainModel":
        """Dimensionless twin-chain driver-observer system.

        The driver chain sees the harmonic boundary ``sin(beta tau)``; the
        observer chain is forced on its first bead by the contact force the
        driver receives from that boundary.  Both chains share ``lam``,
        ``k_nd`` and the wall.
        """
        return cls(
            variant=Variant.EXTENDED,
            n_beads=n_beads,
            inv_mass=1.0,
            c_bead=1.0,
            c_wall=wall_model.factor,
            damping=lam,
            foundation=k_nd,
            drive_kind=_kernels.DRIVE_HARMONIC,
            amplitude=1.0,
            omega=beta,
            natural_dt=DEFAULT_SCALED_DT,
        )

    # -- structure ---------------------------------------------------------

    @property
    def extended_system(self) -> bool:
        return self.variant is Variant.EXTENDED

    @property
    def n_entries(self) -> int:
        """Entries in the displacement (or velocity) vector of a State."""
        return 2 * self.n_beads if self.extended_system else self.n_beads

    @property
    def dim(self) -> int:
        """Dimension of the flat phase-space vector."""
        return 2 * self.n_entries

    @property
    def period(self) -> float:
        """Drive period in model time units."""
        if self.drive_kind != _kernels.DRIVE_HARMONIC or self.omega == 0.0:
            raise ValueError("model has no harmonic drive period")
        return 2.0 * math.pi / self.omega

    def pack(self, state: State) -> np.ndarray:
        """Flatten a State into the kernel layout.

        Single chains use [u_1..u_N, v_1..v_N]; the extended system stores
        the driver block before the observer block, each in that layout.
        """
        u, v = state.displacements, state.velocities
        if u.size != self.n_entries:
            raise ValueError(
                f"state has {u.size} entries, model needs {self.n_entries}"
            )
        if not self.extended_system:
            return np.concatenate([u, v])
        n = self.n_beads
        return np.concatenate([u[:n], v[:n], u[n:], v[n:]])

    def unpack(self, y: np.ndarray, time: float = 0.0) -> State:
        """Inverse of :meth:`pack`."""
        n = self.n_beads
        if not self.extended_system:
            return State(y[:n].copy(), y[n:].copy(), time)
        u = np.concatenate([y[:n], y[2 * n : 3 * n]])
        v = np.concatenate([y[n : 2 * n], y[3 * n :]])
        return State(u, v, time)

    def kernel_args(self) -> tuple:
        """Parameter tuple shared by all kernel entry points.

        Order: (n, inv_mass, c_bead, c_wall, damping, foundation, drive_kind,
        amplitude, omega, record_t0, record_inv_dt, record_values).
        """
        return (
            self.n_beads,
            self.inv_mass,
            self.c_bead,
            self.c_wall,
            self.damping,
            self.foundation,
            self.drive_kind,
            self.amplitude,
            self.omega,
            self.record_t0,
            1.0 / self.record_dt if self.record_dt else 0.0,
            self.record_values,
        )

    # -- evaluation ---------------------------------------------------------

    def drive_displacement(self, t):
        """Boundary displacement at time t (harmonic drives)."""
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float))

    def drive_velocity(self, t):
        return self.amplitude * self.omega * np.cos(self.omega * np.asarray(t, dtype=float))

    def rhs(self, y: np.ndarray, t: float) -> np.ndarray:
        """Time derivative of the flat state vector at time t."""
        y = np.asarray(y, dtype=float)
        if y.size != self.dim:
            raise ValueError(f"state vector has size {y.size}, expected {self.dim}")
        dy = np.empty_like(y)
        _kernels.eval_rhs(
            1 if self.extended_system else 0, y, dy, float(t), *self.kernel_args()
        )
        return dy

    def input_force(self, y: np.ndarray, t) -> np.ndarray:
        """Force entering the chain at its left end, per sample.

        For harmonic drives this is the gated boundary contact force; for
        recorded drives it is the record interpolated at t.  ``y`` may be a
        single flat state or an array of them (one row per time).
        """
        y = np.atleast_2d(np.asarray(y, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = self.n_beads
        if self.drive_kind == _kernels.DRIVE_FORCE:
            grid = self.record_t0 + self.record_dt * np.arange(self.record_values.size)
            return np.interp(t, grid, self.record_values)
        if self.drive_kind == _kernels.DRIVE_FREE:
            return np.zeros(t.size)
        gap = self.drive_displacement(t) - y[:, 0]
        closed = gap > 0.0
        force = np.where(
            closed,
            self.c_bead * np.clip(gap, 0.0, None) ** 1.5
            + self.damping * (self.drive_velocity(t) - y[:, n]),
            0.0,
        )
        return force

    def wall_force(self, y: np.ndarray) -> np.ndarray:
        """Wall contact force in kernel units; observer chain for twins.

        ``y`` may be one flat state or an array of them.
        """
        y = np.atleast_2d(np.asarray(y, dtype=float))
        idx = 3 * self.n_beads - 1 if self.extended_system else self.n_beads - 1
        u_last = y[:, idx]
        pos = np.clip(u_last, 0.0, None)
        return self.c_wall * pos * np.sqrt(pos)


def rhs(state: State, time: float, variant: Variant, config: ChainConfig, drive: DriveSpec) -> State:
    """Evaluate the chosen variant's vector field at one state.

    Returns a State whose ``displacements`` hold the velocities and whose
    ``velocities`` hold the accelerations.  This is a one-shot convenience
    built on :class:`ChainModel`; construct a model directly for repeated
    evaluation or integration.
    """
    if variant is Variant.PHYSICAL:
        model = ChainModel.physical(config, drive)
    elif variant is Variant.SCALED:
        model = ChainModel.scaled(config, drive)
    else:
        ss = nondimensionalize(config, drive)
        model = ChainModel.extended(
            config.n_beads, ss.beta, ss.lam, ss.k_nd, config.wall_model
        )
    dy = model.rhs(model.pack(state), time)
    out = model.unpack(dy, time)
    return out


def transmitted_force(state: State, config: ChainConfig) -> float:
    """Hertz force on the right wall, in N, for a dimensional state.

    Zero whenever the last bead does not overlap the wall.  For twin-chain
    states the observer chain's wall force is reported.
    """
    _, c_wall = contact_coefficients(config)
    u_last = float(state.displacements[-1])
    if u_last <= 0.0:
        return 0.0
    return c_wall * u_last * math.sqrt(u_last)


def energies(
    state: State, config: ChainConfig, drive: Optional[DriveSpec] = None
) -> tuple[np.ndarray, float]:
    """Kinetic energy per bead and total potential energy, in J.

    The potential sums the Hertz pair potentials (2/5) c delta^{5/2} over all
    closed contacts, the wall contact, and the foundation terms k u^2 / 2.
    When a harmonic ``drive`` is given, the boundary contact's potential is
    included as well, evaluated at ``state.time``; by default the left end is
    treated as free.
    """
    u = state.displacements
    v = state.velocities
    m = config.mass
    c_bead, c_wall = contact_coefficients(config)
    kinetic = 0.5 * m * v**2
    overlaps = np.clip(u[:-1] - u[1:], 0.0, None)
    potential = 0.4 * c_bead * np.sum(overlaps**2.5)
    wall = max(float(u[-1]), 0.0)
    potential += 0.4 * c_wall * wall**2.5
    potential += 0.5 * config.foundation_stiffness * float(np.sum(u**2))
    if drive is not None and drive.kind is DriveKind.HARMONIC_DISPLACEMENT:
        a0 = drive.displacement_amplitude()
        gap = a0 * math.sin(2.0 * math.pi * drive.frequency * state.time) - float(u[0])
        if gap > 0.0:
            potential += 0.4 * c_bead * gap**2.5
    return kinetic, float(potential)
