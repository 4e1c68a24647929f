//! Detector-stack builders, optimum searches, design targets and sweeps.

pub mod builders;
pub mod optimize;
pub mod sweep;
pub mod targets;
pub mod uniformity;

pub use builders::{build_distributed, build_salisbury};
pub use optimize::{
    optimal_thickness, optimal_thickness_with, solve_filling_factor, ThicknessObjective, ThicknessOptimum,
    ThicknessSearch,
};
pub use sweep::{
    deposition_sweep, spectrum, wavelength_grid, SpectrumMode, SpectrumPoint, SpectrumResponse, SweepSample,
    SweepTrajectory,
};
pub use targets::{target_coefficients, DesignTargets, SublayerGeometry};
pub use uniformity::{uniformity, UniformityReport};
