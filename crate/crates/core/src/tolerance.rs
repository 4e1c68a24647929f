//! Monte Carlo ensembles of stacks with randomly perturbed layer thicknesses.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::design::uniformity;
use crate::error::{Error, Result};
use crate::optics::{best_coherent_response, stack_transfer_matrix, Stack};

/// Absorption counted as near-perfect in ensemble summaries.
pub const HIGH_ABSORPTION: f64 = 0.99;
/// Non-uniformity counted as acceptable in ensemble summaries.
pub const LOW_NONUNIFORMITY: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbedLayers {
    DetectorsAndSpacers,
    DetectorsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationSpec {
    /// Each thickness is scaled by `1 + δ` with `δ` uniform on `[−b, b]`.
    pub fractional_bound: f64,
    pub layers: PerturbedLayers,
}

impl PerturbationSpec {
    pub fn new(fractional_bound: f64, layers: PerturbedLayers) -> Result<Self> {
        if !(fractional_bound.is_finite() && (0.0..1.0).contains(&fractional_bound)) {
            return Err(Error::domain(
                "fractional_bound",
                format!("must lie in [0, 1) (got {fractional_bound})"),
            ));
        }
        Ok(Self { fractional_bound, layers })
    }
}

/// Generator for one ensemble member. The stream is the sample index, so a
/// sample's draws do not depend on how the ensemble is scheduled.
fn sample_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}

/// Fractional thickness errors for every layer of `nominal`, zero for layers
/// left untouched. Layer `i` reads from its own block of the sample's stream.
pub fn thickness_errors(nominal: &Stack, spec: &PerturbationSpec, sample_index: u64, seed: u64) -> Vec<f64> {
    let b = spec.fractional_bound;
    let mut rng = sample_rng(seed, sample_index);
    nominal
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let touched = match spec.layers {
                PerturbedLayers::DetectorsAndSpacers => true,
                PerturbedLayers::DetectorsOnly => layer.is_detector(),
            };
            if !touched || b == 0.0 {
                return 0.0;
            }
            rng.set_word_pos(i as u128 * 16);
            rng.random_range(-b..=b)
        })
        .collect()
}

/// Copy of `nominal` with thicknesses scaled by [`thickness_errors`].
pub fn perturb_stack(nominal: &Stack, spec: &PerturbationSpec, sample_index: u64, seed: u64) -> Result<Stack> {
    if spec.fractional_bound == 0.0 {
        return Ok(nominal.clone());
    }
    let errors = thickness_errors(nominal, spec, sample_index, seed);
    let thicknesses: Vec<f64> = nominal
        .layers()
        .iter()
        .zip(&errors)
        .map(|(layer, e)| layer.thickness_nm() * (1.0 + e))
        .collect();
    nominal.with_thicknesses(&thicknesses)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: u64,
    /// Best-phase coherent absorption.
    pub absorption: f64,
    pub delta_norm: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub r_right: Complex64,
    /// Absorption of each detector layer, in stack order.
    pub detector_absorption: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFailure {
    pub index: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub samples: usize,
    pub failures: usize,
    pub fraction_high_absorption: f64,
    pub min_absorption: f64,
    pub mean_absorption: f64,
    pub delta_norm_median: f64,
    pub delta_norm_p95: f64,
    pub delta_norm_max: f64,
    pub fraction_low_nonuniformity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub seed: u64,
    pub wavelength_nm: f64,
    pub perturbation: PerturbationSpec,
    pub nominal: SampleRecord,
    pub records: Vec<SampleRecord>,
    pub failures: Vec<SampleFailure>,
    pub summary: EnsembleSummary,
}

/// Coherent figures of merit of one stack at its own best phase.
pub fn evaluate_sample(stack: &Stack, wavelength_nm: f64, index: u64) -> Result<SampleRecord> {
    if !stack.is_two_port() {
        return Err(Error::UnsupportedGeometry("coherent ensembles need a two-port stack"));
    }
    let s = stack_transfer_matrix(stack, wavelength_nm)?.scattering()?;
    let response = best_coherent_response(stack, wavelength_nm)?;
    let detector_absorption: Vec<f64> = stack
        .detector_indices()
        .into_iter()
        .map(|i| response.per_layer[i])
        .collect();
    let delta_norm = if detector_absorption.len() >= 2 {
        uniformity(&detector_absorption)?.delta_norm
    } else {
        0.0
    };
    Ok(SampleRecord {
        index,
        absorption: response.absorption,
        delta_norm,
        t: s.t,
        r: s.r,
        r_right: s.r_right,
        detector_absorption,
    })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summarize(records: &[SampleRecord], failures: usize) -> EnsembleSummary {
    let n = records.len();
    let nf = n.max(1) as f64;
    let mut deltas: Vec<f64> = records.iter().map(|r| r.delta_norm).collect();
    deltas.sort_by(f64::total_cmp);
    EnsembleSummary {
        samples: n,
        failures,
        fraction_high_absorption: records.iter().filter(|r| r.absorption >= HIGH_ABSORPTION).count() as f64 / nf,
        min_absorption: records.iter().map(|r| r.absorption).fold(f64::INFINITY, f64::min),
        mean_absorption: records.iter().map(|r| r.absorption).sum::<f64>() / nf,
        delta_norm_median: quantile(&deltas, 0.5),
        delta_norm_p95: quantile(&deltas, 0.95),
        delta_norm_max: deltas.last().copied().unwrap_or(f64::NAN),
        fraction_low_nonuniformity: deltas.iter().filter(|&&d| d < LOW_NONUNIFORMITY).count() as f64 / nf,
    }
}

/// Evaluate `samples` perturbed copies of `nominal`. Results are identical for
/// a given seed regardless of thread count.
pub fn run_ensemble(
    nominal: &Stack,
    spec: &PerturbationSpec,
    samples: usize,
    seed: u64,
    wavelength_nm: f64,
) -> Result<EnsembleReport> {
    if samples == 0 {
        return Err(Error::domain("samples", "at least one sample required"));
    }
    let nominal_record = evaluate_sample(nominal, wavelength_nm, u64::MAX)?;
    let outcomes: Vec<std::result::Result<SampleRecord, SampleFailure>> = (0..samples as u64)
        .into_par_iter()
        .map(|index| {
            perturb_stack(nominal, spec, index, seed)
                .and_then(|stack| evaluate_sample(&stack, wavelength_nm, index))
                .map_err(|e| SampleFailure {
                    index,
                    error: e.to_string(),
                })
        })
        .collect();
    let mut records = Vec::with_capacity(samples);
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    let summary = summarize(&records, failures.len());
    Ok(EnsembleReport {
        seed,
        wavelength_nm,
        perturbation: *spec,
        nominal: nominal_record,
        records,
        failures,
        summary,
    })
}
