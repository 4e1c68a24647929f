//! Two-sided coherent illumination and per-layer absorption bookkeeping.
//!
//! Internal fields are rebuilt by walking the constituent matrices from the
//! exit medium back to the ambient. Layer absorption is the drop of the
//! Poynting flux `½·Re[E·H*]` across the layer, `H = n(A e^{iφ} − B e^{−iφ})`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::stack::Stack;
use crate::optics::tmm::{Matrix2, Resolved, Scattering, TransferMatrix};

/// Number of grid points in the best-phase scan over [0, 2π).
pub const PHASE_GRID: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Illumination {
    TravelingLeft,
    TravelingRight,
    /// Both faces driven with relative input phase `theta` (radians).
    Coherent { theta: f64 },
}

/// Power budget of one field solution, normalised to the incident power.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionBudget {
    /// One entry per stack layer, in stack order.
    pub per_layer: Vec<f64>,
    /// Power leaving through the ambient(s); for mirror stacks only the left side.
    pub outgoing: f64,
    /// Power transmitted into a terminal mirror.
    pub leakage: f64,
}

impl AbsorptionBudget {
    pub fn total_absorption(&self) -> f64 {
        self.per_layer.iter().sum()
    }

    /// `Σ A_i + outgoing + leakage`; equals 1 for passive stacks.
    pub fn balance(&self) -> f64 {
        self.total_absorption() + self.outgoing + self.leakage
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentResponse {
    pub theta: f64,
    pub a_left: Complex64,
    pub a_right: Complex64,
    pub b_left: Complex64,
    pub b_right: Complex64,
    /// Total fractional absorption `A_coh`.
    pub absorption: f64,
    /// `A_coh,i` for every layer in stack order (lossless layers give ~0).
    pub per_layer: Vec<f64>,
}

struct FieldSolution {
    b_left: Complex64,
    b_right: Complex64,
    input_power: f64,
    outgoing_left: f64,
    outgoing_right: f64,
    per_layer: Vec<f64>,
}

fn flux(n: Complex64, (a, b): (Complex64, Complex64)) -> f64 {
    let e = a + b;
    let h = n * (a - b);
    0.5 * (e * h.conj()).re
}

/// Solve the stack for incoming amplitudes `a_left` (right-going, in the
/// ambient) and `a_right` (left-going, in the exit medium).
fn solve(res: &Resolved, s: &Scattering, a_left: Complex64, a_right: Complex64) -> FieldSolution {
    let b_left = s.r * a_left + s.t_right * a_right;
    let b_right = s.t * a_left + s.r_right * a_right;

    let nl = res.n_left.re;
    let nr = res.n_right.re;
    let input_power = 0.5 * (nl * a_left.norm_sqr() + nr * a_right.norm_sqr());

    let mut per_layer = vec![0.0; res.layers.len()];
    let mut state = (b_right, a_right);
    let mut flux_right = flux(res.n_right, state);
    for i in (0..res.layers.len()).rev() {
        let (n, phi) = res.layers[i];
        state = Matrix2::interface(n, res.index_right_of(i)).apply(state);
        state = Matrix2::propagation(phi).apply(state);
        let flux_left = flux(n, state);
        per_layer[i] = (flux_left - flux_right) / input_power;
        flux_right = flux_left;
    }

    FieldSolution {
        b_left,
        b_right,
        input_power,
        outgoing_left: 0.5 * nl * b_left.norm_sqr(),
        outgoing_right: 0.5 * nr * b_right.norm_sqr(),
        per_layer,
    }
}

fn prepare(stack: &Stack, wavelength_nm: f64) -> Result<(Resolved, Scattering)> {
    let res = Resolved::new(stack, wavelength_nm)?;
    let s = TransferMatrix {
        matrix: res.matrix(),
        wavelength_nm,
    }
    .scattering()?;
    Ok((res, s))
}

/// Input amplitudes carrying half the power each, with relative phase `theta`.
fn coherent_inputs(res: &Resolved, theta: f64) -> (Complex64, Complex64) {
    let a_left = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let scale = (res.n_left.re / res.n_right.re).sqrt();
    let a_right = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2 * scale, theta);
    (a_left, a_right)
}

pub fn per_layer_absorption(
    stack: &Stack,
    wavelength_nm: f64,
    illumination: Illumination,
) -> Result<AbsorptionBudget> {
    let (res, s) = prepare(stack, wavelength_nm)?;
    let (a_left, a_right) = match illumination {
        Illumination::TravelingLeft => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        Illumination::TravelingRight => {
            if res.mirror {
                return Err(Error::UnsupportedGeometry("cannot illuminate through a terminal mirror"));
            }
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        }
        Illumination::Coherent { theta } => {
            if res.mirror {
                return Err(Error::UnsupportedGeometry(
                    "coherent illumination needs a two-port stack",
                ));
            }
            coherent_inputs(&res, theta)
        }
    };
    let sol = solve(&res, &s, a_left, a_right);
    let (outgoing, leakage) = if res.mirror {
        (sol.outgoing_left, sol.outgoing_right)
    } else {
        (sol.outgoing_left + sol.outgoing_right, 0.0)
    };
    Ok(AbsorptionBudget {
        per_layer: sol.per_layer,
        outgoing: outgoing / sol.input_power,
        leakage: leakage / sol.input_power,
    })
}

pub fn coherent_response(stack: &Stack, wavelength_nm: f64, theta: f64) -> Result<CoherentResponse> {
    if !stack.is_two_port() {
        return Err(Error::UnsupportedGeometry(
            "coherent illumination needs a two-port stack",
        ));
    }
    let (res, s) = prepare(stack, wavelength_nm)?;
    let (a_left, a_right) = coherent_inputs(&res, theta);
    let sol = solve(&res, &s, a_left, a_right);
    Ok(CoherentResponse {
        theta,
        a_left,
        a_right,
        b_left: sol.b_left,
        b_right: sol.b_right,
        absorption: 1.0 - (sol.outgoing_left + sol.outgoing_right) / sol.input_power,
        per_layer: sol.per_layer,
    })
}

/// Coherent absorption as a function of the input phase, from the scattering
/// coefficients alone.
fn absorption_at(s: &Scattering, nl: f64, nr: f64, theta: f64) -> f64 {
    let a_left = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let a_right = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2 * (nl / nr).sqrt(), theta);
    let b_left = s.r * a_left + s.t_right * a_right;
    let b_right = s.t * a_left + s.r_right * a_right;
    let input = nl * a_left.norm_sqr() + nr * a_right.norm_sqr();
    1.0 - (nl * b_left.norm_sqr() + nr * b_right.norm_sqr()) / input
}

/// Phase maximising coherent absorption: a 720-point scan followed by a
/// parabolic refinement around the best grid point. Returns `(θ, A_coh)`.
pub(crate) fn best_phase_from(s: &Scattering, nl: f64, nr: f64) -> (f64, f64) {
    let step = 2.0 * PI / PHASE_GRID as f64;
    let values: Vec<f64> = (0..PHASE_GRID)
        .map(|j| absorption_at(s, nl, nr, j as f64 * step))
        .collect();
    let (best, &peak) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let left = values[(best + PHASE_GRID - 1) % PHASE_GRID];
    let right = values[(best + 1) % PHASE_GRID];
    let curvature = left - 2.0 * peak + right;
    let theta_grid = best as f64 * step;
    if curvature < 0.0 {
        let offset = 0.5 * (left - right) / curvature;
        let theta = (theta_grid + offset * step).rem_euclid(2.0 * PI);
        let refined = absorption_at(s, nl, nr, theta);
        if refined >= peak {
            return (theta, refined);
        }
    }
    (theta_grid, peak)
}

/// Best-phase input phase for a two-port stack.
pub fn best_phase(stack: &Stack, wavelength_nm: f64) -> Result<f64> {
    if !stack.is_two_port() {
        return Err(Error::UnsupportedGeometry(
            "coherent illumination needs a two-port stack",
        ));
    }
    let (res, s) = prepare(stack, wavelength_nm)?;
    Ok(best_phase_from(&s, res.n_left.re, res.n_right.re).0)
}

/// Coherent response at the phase that maximises total absorption.
pub fn best_coherent_response(stack: &Stack, wavelength_nm: f64) -> Result<CoherentResponse> {
    let theta = best_phase(stack, wavelength_nm)?;
    coherent_response(stack, wavelength_nm, theta)
}

/// Maximal coherent absorption without the per-layer field walk.
pub fn best_coherent_absorption(stack: &Stack, wavelength_nm: f64) -> Result<f64> {
    if !stack.is_two_port() {
        return Err(Error::UnsupportedGeometry(
            "coherent illumination needs a two-port stack",
        ));
    }
    let (res, s) = prepare(stack, wavelength_nm)?;
    Ok(best_phase_from(&s, res.n_left.re, res.n_right.re).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::material::{Material, MeanderSpec};
    use crate::optics::stack::{Layer, Termination};
    use crate::optics::tmm::traveling_response;
    use approx::assert_abs_diff_eq;

    fn film(f: f64, d: f64) -> Stack {
        Stack::free_standing(vec![Layer::Detector(MeanderSpec::nbtin(f, d).unwrap())]).unwrap()
    }

    #[test]
    fn in_phase_film_absorbs_nearly_everything() {
        let resp = coherent_response(&film(0.5, 30.0), 1550.0, 0.0).unwrap();
        assert!(resp.absorption > 0.99, "A_coh = {}", resp.absorption);
        let best = best_coherent_response(&film(0.5, 30.0), 1550.0).unwrap();
        assert!(best.absorption >= resp.absorption - 1e-12);
    }

    #[test]
    fn out_of_phase_film_absorbs_almost_nothing() {
        let resp = coherent_response(&film(0.5, 30.0), 1550.0, PI).unwrap();
        assert!(resp.absorption < 0.01, "A_coh = {}", resp.absorption);
    }

    #[test]
    fn lossless_stack_never_absorbs() {
        let sp = Layer::spacer(Material::dielectric("sp", 1.7).unwrap(), 321.0);
        let stack = Stack::free_standing(vec![sp.clone(), sp]).unwrap();
        for theta in [0.0, 0.7, 2.0, PI] {
            let resp = coherent_response(&stack, 1550.0, theta).unwrap();
            assert_abs_diff_eq!(resp.absorption, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn per_layer_sums_to_total() {
        let resp = coherent_response(&film(0.3, 20.0), 1550.0, 0.4).unwrap();
        let sum: f64 = resp.per_layer.iter().sum();
        assert_abs_diff_eq!(sum, resp.absorption, epsilon = 1e-12);
    }

    #[test]
    fn single_layer_matches_traveling_absorption() {
        let stack = film(0.61, 5.0);
        let budget = per_layer_absorption(&stack, 1550.0, Illumination::TravelingLeft).unwrap();
        let resp = traveling_response(&stack, 1550.0).unwrap();
        assert_abs_diff_eq!(budget.per_layer[0], resp.absorptance, epsilon = 1e-12);
    }

    #[test]
    fn mirror_rejects_coherent_and_right_illumination() {
        let stack = Stack::new(
            Material::vacuum(),
            vec![Layer::Detector(MeanderSpec::nbtin(0.5, 15.0).unwrap())],
            Termination::mirror(0.999, 1.0).unwrap(),
        )
        .unwrap();
        assert!(coherent_response(&stack, 1550.0, 0.0).is_err());
        assert!(per_layer_absorption(&stack, 1550.0, Illumination::TravelingRight).is_err());
        let budget = per_layer_absorption(&stack, 1550.0, Illumination::TravelingLeft).unwrap();
        assert!(budget.leakage > 0.0);
        assert_abs_diff_eq!(budget.balance(), 1.0, epsilon = 1e-12);
    }

    /// Closed-form maximum over θ: with b = S·a, the extreme of the absorbed
    /// power over the relative phase is C ± 2|X|.
    #[test]
    fn best_phase_matches_closed_form() {
        let sp = Layer::spacer(Material::dielectric("sp", 1.5).unwrap(), 410.0);
        let det = |f, d| Layer::Detector(MeanderSpec::nbtin(f, d).unwrap());
        let stack = Stack::free_standing(vec![det(0.4, 8.0), sp, det(0.2, 13.0)]).unwrap();
        let m = crate::optics::tmm::stack_transfer_matrix(&stack, 1550.0).unwrap();
        let s = m.scattering().unwrap();
        let c = 0.5 * (s.r.norm_sqr() + s.t.norm_sqr() + s.t_right.norm_sqr() + s.r_right.norm_sqr());
        let x = 0.5 * (s.r.conj() * s.t_right + s.t.conj() * s.r_right);
        let expected = 1.0 - (c - 2.0 * x.norm());
        let got = best_coherent_absorption(&stack, 1550.0).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-9);
    }
}
