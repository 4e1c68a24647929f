//! Coherent-absorption photon-number-resolving detectors: thin-film optics,
//! stack design, photocounting statistics and fabrication-tolerance ensembles.

pub mod design;
pub mod error;
pub mod optics;
pub mod photon;
pub mod tolerance;

pub use error::{Error, Result};
