//! Transfer-matrix optics for stratified media at normal incidence.

pub mod coherent;
pub mod material;
pub mod stack;
pub mod tmm;

pub use coherent::{
    best_coherent_absorption, best_coherent_response, best_phase, coherent_response,
    per_layer_absorption, AbsorptionBudget, CoherentResponse, Illumination,
};
pub use material::{
    effective_permittivity, nbtin_permittivity, DispersionRow, DispersionTable, Material, MaterialKind,
    MeanderSpec, Permittivity,
};
pub use stack::{Layer, Stack, Termination};
pub use tmm::{stack_transfer_matrix, traveling_response, Matrix2, Scattering, TransferMatrix, TwoPortResponse};
