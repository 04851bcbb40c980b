"""Driven granular chains without static precompression.

A 1-D chain of elastic spheres with no applied precompression carries no
linear sound: every interaction happens through tension-free Hertzian
contacts that engage only on compression.  This package simulates such
chains under harmonic boundary excitation and recorded force signals, and
provides the analysis tools the regime calls for:

- dimensional, rescaled (dimensionless), and twin-chain equation variants
  built from one contact law (:mod:`.chain`);
- fixed-step RK4 integration with transient/stationary protocols
  (:mod:`.integrate`);
- transmission spectra over drive frequency, resonance/anti-resonance
  detection, and 1:n response classification (:mod:`.sweep`);
- periodic-orbit solving via Newton shooting on the stroboscopic map and
  Floquet stability (:mod:`.orbits`);
- driver-observer synchronization studies with harmonic, prescribed, or
  recorded forcing (:mod:`.assimilation`);
- run configurations, CSV artifacts, presets, plots, and the
  ``sonicvacuum`` command-line harness (:mod:`.fileio`, :mod:`.presets`,
  :mod:`.plotting`, :mod:`.cli`).
"""

from .chain import (
    ChainConfig,
    ChainModel,
    DegenerateScalingError,
    DriveKind,
    DriveSpec,
    ForceRecord,
    MaterialSpec,
    ScaledSystem,
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
from .integrate import (
    DivergenceError,
    IntegrationPlan,
    Trajectory,
    integrate,
    integrate_to_stationary,
)
from .sweep import (
    Extremum,
    ExtremumKind,
    SweepResult,
    UnclassifiableSignalError,
    classify_extrema,
    classify_resonance,
    detect_extrema,
    frequency_sweep,
)
from .orbits import (
    FloquetSpectrum,
    PeriodicOrbit,
    ShootingError,
    StabilityVerdict,
    floquet,
    liouville_check,
    monodromy,
    newton_periodic,
    stroboscopic_map,
)
from .assimilation import (
    AssimilationRun,
    run_extended,
    run_prescribed_zeroth,
    run_recorded,
)
from .fileio import ConfigError

__version__ = "0.1.0"

__all__ = [
    "AssimilationRun",
    "ChainConfig",
    "ChainModel",
    "ConfigError",
    "DegenerateScalingError",
    "DivergenceError",
    "DriveKind",
    "DriveSpec",
    "Extremum",
    "ExtremumKind",
    "FloquetSpectrum",
    "ForceRecord",
    "IntegrationPlan",
    "MaterialSpec",
    "PeriodicOrbit",
    "ScaledSystem",
    "ShootingError",
    "StabilityVerdict",
    "State",
    "SweepResult",
    "Trajectory",
    "UnclassifiableSignalError",
    "Variant",
    "WallModel",
    "classify_extrema",
    "classify_resonance",
    "contact_coefficients",
    "damping_force",
    "detect_extrema",
    "energies",
    "floquet",
    "frequency_sweep",
    "hertz_force",
    "integrate",
    "integrate_to_stationary",
    "liouville_check",
    "monodromy",
    "newton_periodic",
    "nondimensionalize",
    "rhs",
    "run_extended",
    "run_prescribed_zeroth",
    "run_recorded",
    "stroboscopic_map",
    "transmitted_force",
]
