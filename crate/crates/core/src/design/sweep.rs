//! Deposition trajectories and spectra.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optics::{
    best_coherent_absorption, best_coherent_response, coherent_response, traveling_response, CoherentResponse, Layer,
    Stack, TwoPortResponse,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSample {
    /// Deposited thickness so far, excluding pre-existing layers.
    pub thickness_nm: f64,
    /// Layer being deposited (`Det1`, `Sp1`, ...); empty for the starting point.
    pub label: String,
    pub t: Complex64,
    pub r: Complex64,
    pub transmittance: f64,
    pub reflectance: f64,
    pub absorptance: f64,
    /// Best-phase coherent absorption; `None` for mirror-terminated stacks.
    pub coherent_absorption: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrajectory {
    pub wavelength_nm: f64,
    pub samples: Vec<SweepSample>,
}

/// Spacers are swept on a coarser grid than detector layers.
pub const SPACER_STEP_NM: f64 = 1.0;

struct Partial {
    thickness_nm: f64,
    label: String,
    layers: Vec<Layer>,
}

fn thickness_points(total: f64, step: f64) -> Vec<f64> {
    let mut points = Vec::new();
    let mut k = 1;
    while (k as f64) * step < total - 1e-9 {
        points.push(k as f64 * step);
        k += 1;
    }
    if total > 0.0 {
        points.push(total);
    }
    points
}

fn labels(layers: &[Layer], order: &[usize]) -> Vec<String> {
    let (mut det, mut sp) = (0, 0);
    let mut out = vec![String::new(); layers.len()];
    for &i in order {
        out[i] = if layers[i].is_detector() {
            det += 1;
            format!("Det{det}")
        } else {
            sp += 1;
            format!("Sp{sp}")
        };
    }
    out
}

/// Response while the layers of `final_stack` are deposited one by one.
///
/// Two-port stacks grow from the first layer onwards. For mirror-terminated
/// stacks the spacers touching the mirror already exist and the remaining
/// layers are grown outward from the mirror.
pub fn deposition_sweep(final_stack: &Stack, wavelength_nm: f64, step_nm: f64) -> Result<SweepTrajectory> {
    if !(step_nm.is_finite() && step_nm > 0.0) {
        return Err(Error::domain("step", "must be positive"));
    }
    let layers = final_stack.layers();
    let spacer_step = step_nm.max(SPACER_STEP_NM);

    let mut partials = Vec::new();
    if final_stack.is_two_port() {
        let order: Vec<usize> = (0..layers.len()).collect();
        let names = labels(layers, &order);
        partials.push(Partial {
            thickness_nm: 0.0,
            label: String::new(),
            layers: Vec::new(),
        });
        let mut base = 0.0;
        for (i, layer) in layers.iter().enumerate() {
            let step = if layer.is_detector() { step_nm } else { spacer_step };
            for s in thickness_points(layer.thickness_nm(), step) {
                let mut partial = layers[..i].to_vec();
                partial.push(layer.with_thickness(s));
                partials.push(Partial {
                    thickness_nm: base + s,
                    label: names[i].clone(),
                    layers: partial,
                });
            }
            base += layer.thickness_nm();
        }
    } else {
        let preexisting = layers.iter().rev().take_while(|l| !l.is_detector()).count();
        let first_fixed = layers.len() - preexisting;
        let order: Vec<usize> = (0..first_fixed).rev().collect();
        let names = labels(layers, &order);
        partials.push(Partial {
            thickness_nm: 0.0,
            label: String::new(),
            layers: layers[first_fixed..].to_vec(),
        });
        let mut base = 0.0;
        for &i in &order {
            let layer = &layers[i];
            let step = if layer.is_detector() { step_nm } else { spacer_step };
            for s in thickness_points(layer.thickness_nm(), step) {
                let mut partial = vec![layer.with_thickness(s)];
                partial.extend_from_slice(&layers[i + 1..]);
                partials.push(Partial {
                    thickness_nm: base + s,
                    label: names[i].clone(),
                    layers: partial,
                });
            }
            base += layer.thickness_nm();
        }
    }

    let samples = partials
        .into_par_iter()
        .map(|p| {
            let stack = final_stack.with_layers(p.layers)?;
            let resp = traveling_response(&stack, wavelength_nm)?;
            let coherent_absorption = if stack.is_two_port() {
                Some(best_coherent_absorption(&stack, wavelength_nm)?)
            } else {
                None
            };
            Ok(SweepSample {
                thickness_nm: p.thickness_nm,
                label: p.label,
                t: resp.t,
                r: resp.r,
                transmittance: resp.transmittance,
                reflectance: resp.reflectance,
                absorptance: resp.absorptance,
                coherent_absorption,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTrajectory {
        wavelength_nm,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumMode {
    Traveling,
    /// Coherent illumination at a fixed phase, or the best phase at every
    /// wavelength when `theta` is `None`.
    Coherent { theta: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumResponse {
    Traveling(TwoPortResponse),
    Coherent(CoherentResponse),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub wavelength_nm: f64,
    pub response: SpectrumResponse,
}

pub fn wavelength_grid(min_nm: f64, max_nm: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::domain("points", "at least one point required"));
    }
    if !(min_nm.is_finite() && max_nm.is_finite() && min_nm > 0.0 && min_nm <= max_nm) {
        return Err(Error::domain("wavelength range", format!("need 0 < min <= max (got {min_nm}..{max_nm})")));
    }
    if points == 1 || min_nm == max_nm {
        return Ok(vec![min_nm]);
    }
    let step = (max_nm - min_nm) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { max_nm } else { min_nm + step * i as f64 })
        .collect())
}

pub fn spectrum(stack: &Stack, min_nm: f64, max_nm: f64, points: usize, mode: SpectrumMode) -> Result<Vec<SpectrumPoint>> {
    if matches!(mode, SpectrumMode::Coherent { .. }) && !stack.is_two_port() {
        return Err(Error::UnsupportedGeometry("coherent illumination needs a two-port stack"));
    }
    wavelength_grid(min_nm, max_nm, points)?
        .into_par_iter()
        .map(|wavelength_nm| {
            let response = match mode {
                SpectrumMode::Traveling => SpectrumResponse::Traveling(traveling_response(stack, wavelength_nm)?),
                SpectrumMode::Coherent { theta: Some(theta) } => {
                    SpectrumResponse::Coherent(coherent_response(stack, wavelength_nm, theta)?)
                }
                SpectrumMode::Coherent { theta: None } => {
                    SpectrumResponse::Coherent(best_coherent_response(stack, wavelength_nm)?)
                }
            };
            Ok(SpectrumPoint { wavelength_nm, response })
        })
        .collect()
}
