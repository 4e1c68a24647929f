use serde::Serialize;

use crate::error::{Error, Result};

/// Spread of absorption across detector layers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    /// RMS deviation of `A_i` from the uniform share `A/N`.
    pub delta: f64,
    /// Δ when all absorption sits in one layer: `(A/N)·√(N−1)`.
    pub delta_max: f64,
    pub delta_norm: f64,
    pub per_layer: Vec<f64>,
}

pub fn uniformity(per_layer: &[f64]) -> Result<UniformityReport> {
    let n = per_layer.len();
    if n < 2 {
        return Err(Error::domain("per_layer", "non-uniformity needs at least two layers"));
    }
    let total: f64 = per_layer.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("per_layer", "total absorption must be positive"));
    }
    let nf = n as f64;
    let share = total / nf;
    let delta = (per_layer.iter().map(|a| (a - share).powi(2)).sum::<f64>() / nf).sqrt();
    let delta_max = share * (nf - 1.0).sqrt();
    Ok(UniformityReport {
        delta,
        delta_max,
        delta_norm: delta / delta_max,
        per_layer: per_layer.to_vec(),
    })
}
