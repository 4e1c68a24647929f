//! One-dimensional optimum searches for detector thickness and filling factor.

use serde::Serialize;

use crate::design::builders::build_salisbury;
use crate::error::{Error, Result};
use crate::optics::{best_coherent_absorption, traveling_response, Layer, MeanderSpec, Stack};

/// What the thickness optimum maximises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThicknessObjective {
    /// Best-phase coherent absorption of a free-standing film.
    CounterPropagating,
    /// Absorption of the film on a quarter-wave spacer above a mirror.
    Salisbury { spacer_n: f64, mirror_reflectivity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessSearch {
    pub max_nm: f64,
    pub step_nm: f64,
}

impl Default for ThicknessSearch {
    fn default() -> Self {
        Self {
            max_nm: 100.0,
            step_nm: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThicknessOptimum {
    pub thickness_nm: f64,
    /// Objective value at the optimum (A_coh or Salisbury A).
    pub absorption: f64,
}

fn objective(meander: &MeanderSpec, wavelength_nm: f64, target: ThicknessObjective, d: f64) -> Result<f64> {
    let layer = meander.with_thickness(d);
    match target {
        ThicknessObjective::CounterPropagating => {
            best_coherent_absorption(&Stack::free_standing(vec![Layer::Detector(layer)])?, wavelength_nm)
        }
        ThicknessObjective::Salisbury {
            spacer_n,
            mirror_reflectivity,
        } => {
            let stack = build_salisbury(&layer, spacer_n, mirror_reflectivity, wavelength_nm)?;
            Ok(traveling_response(&stack, wavelength_nm)?.absorptance)
        }
    }
}

enum Scan {
    Interior(ThicknessOptimum),
    BelowRange,
    AboveRange,
}

fn scan(meander: &MeanderSpec, wavelength_nm: f64, target: ThicknessObjective, search: ThicknessSearch) -> Result<Scan> {
    if !(search.step_nm > 0.0 && search.max_nm > search.step_nm) {
        return Err(Error::domain("thickness search", "need 0 < step < max"));
    }
    let points = (search.max_nm / search.step_nm).round() as usize;
    let f = |d: f64| objective(meander, wavelength_nm, target, d);

    let mut best = (1usize, f64::NEG_INFINITY);
    for j in 1..=points {
        let v = f(j as f64 * search.step_nm)?;
        if v > best.1 {
            best = (j, v);
        }
    }
    if best.0 == 1 {
        return Ok(Scan::BelowRange);
    }
    if best.0 == points {
        return Ok(Scan::AboveRange);
    }

    // Successive three-point parabolas on a shrinking stencil.
    let mut center = best.0 as f64 * search.step_nm;
    let mut value = best.1;
    let mut h = search.step_nm;
    for _ in 0..3 {
        let (lo, hi) = (f(center - h)?, f(center + h)?);
        let curvature = lo - 2.0 * value + hi;
        if curvature >= 0.0 {
            break;
        }
        let shift = (0.5 * h * (lo - hi) / curvature).clamp(-h, h);
        let candidate = center + shift;
        let v = f(candidate)?;
        if v >= value {
            center = candidate;
            value = v;
        }
        h /= 10.0;
    }
    Ok(Scan::Interior(ThicknessOptimum {
        thickness_nm: center,
        absorption: value,
    }))
}

/// Thickness maximising the objective for a meander with the given film,
/// slit and filling factor. The `thickness_nm` of `meander` is ignored.
pub fn optimal_thickness(
    meander: &MeanderSpec,
    wavelength_nm: f64,
    target: ThicknessObjective,
) -> Result<ThicknessOptimum> {
    optimal_thickness_with(meander, wavelength_nm, target, ThicknessSearch::default())
}

pub fn optimal_thickness_with(
    meander: &MeanderSpec,
    wavelength_nm: f64,
    target: ThicknessObjective,
    search: ThicknessSearch,
) -> Result<ThicknessOptimum> {
    meander.validate()?;
    match scan(meander, wavelength_nm, target, search)? {
        Scan::Interior(opt) => Ok(opt),
        Scan::BelowRange => Err(Error::SearchFailure(format!(
            "maximum at the lower edge of the grid (f = {})",
            meander.filling_factor
        ))),
        Scan::AboveRange => Err(Error::SearchFailure(format!(
            "no interior maximum below {} nm (f = {})",
            search.max_nm, meander.filling_factor
        ))),
    }
}

const MIN_FILLING: f64 = 1e-3;
const FILLING_TOL: f64 = 1e-5;

/// Filling factor for which the single-layer optimum equals
/// `sublayer_nm × detectors`, found by bisection on the monotone map f ↦ D_opt(f).
/// Film and slit are taken from `template`.
pub fn solve_filling_factor(
    template: &MeanderSpec,
    sublayer_nm: f64,
    detectors: usize,
    wavelength_nm: f64,
    target: ThicknessObjective,
) -> Result<f64> {
    if !(sublayer_nm.is_finite() && sublayer_nm > 0.0) {
        return Err(Error::domain("sublayer_nm", "must be positive"));
    }
    if detectors == 0 {
        return Err(Error::domain("detectors", "at least one detector layer required"));
    }
    let total = sublayer_nm * detectors as f64;
    let search = ThicknessSearch {
        max_nm: ThicknessSearch::default().max_nm.max(1.5 * total),
        ..ThicknessSearch::default()
    };
    // > 0 when the optimum is thicker than the target.
    let excess = |f: f64| -> Result<f64> {
        Ok(match scan(&template.with_filling_factor(f), wavelength_nm, target, search)? {
            Scan::Interior(opt) => opt.thickness_nm - total,
            Scan::AboveRange => f64::INFINITY,
            Scan::BelowRange => f64::NEG_INFINITY,
        })
    };

    if excess(1.0)? > 0.0 {
        return Err(Error::InfeasibleDesign(format!(
            "{detectors} x {sublayer_nm} nm is thinner than the optimum even at f = 1"
        )));
    }
    if excess(MIN_FILLING)? <= 0.0 {
        return Err(Error::InfeasibleDesign(format!(
            "{detectors} x {sublayer_nm} nm exceeds the optimum at every filling factor"
        )));
    }
    let (mut lo, mut hi) = (MIN_FILLING, 1.0);
    while hi - lo > FILLING_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
