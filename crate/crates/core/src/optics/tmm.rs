//! Transfer matrices at normal incidence.
//!
//! In every medium the field is `E = A e^{iφ} + B e^{-iφ}` with `A` the
//! right-going amplitude. The stack matrix maps the amplitudes in the right
//! exit medium onto those in the left ambient: `(A₀, B₀) = M·(A_sub, B_sub)`.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::stack::Stack;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2 {
        m11: ONE,
        m12: ZERO,
        m21: ZERO,
        m22: ONE,
    };

    /// Field matching from medium `a` into medium `b`.
    pub fn interface(n_a: Complex64, n_b: Complex64) -> Self {
        let r = (n_a - n_b) / (n_a + n_b);
        let t = 2.0 * n_a / (n_a + n_b);
        Matrix2 {
            m11: ONE / t,
            m12: r / t,
            m21: r / t,
            m22: ONE / t,
        }
    }

    /// Propagation across a layer of phase thickness `phi`.
    pub fn propagation(phi: Complex64) -> Self {
        let i_phi = Complex64::i() * phi;
        Matrix2 {
            m11: (-i_phi).exp(),
            m12: ZERO,
            m21: ZERO,
            m22: i_phi.exp(),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.m11 * v.0 + self.m12 * v.1,
            self.m21 * v.0 + self.m22 * v.1,
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2 {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

/// Refractive indices and phase thicknesses of a stack at one wavelength.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub n_left: Complex64,
    pub n_right: Complex64,
    /// Per layer: (index, phase thickness 2π n d / λ).
    pub layers: Vec<(Complex64, Complex64)>,
    pub mirror: bool,
}

impl Resolved {
    pub fn new(stack: &Stack, wavelength_nm: f64) -> Result<Self> {
        if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
            return Err(Error::domain("wavelength_nm", format!("must be positive (got {wavelength_nm})")));
        }
        let k0 = 2.0 * PI / wavelength_nm;
        let layers = stack
            .layers()
            .iter()
            .map(|layer| {
                let n = layer.index(wavelength_nm)?;
                Ok((n, n * (k0 * layer.thickness_nm())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_left: stack.left_index(),
            n_right: stack.right_index(),
            layers,
            mirror: !stack.is_two_port(),
        })
    }

    /// Index of the medium on the right of layer `i`.
    pub fn index_right_of(&self, i: usize) -> Complex64 {
        self.layers.get(i + 1).map_or(self.n_right, |l| l.0)
    }

    pub fn matrix(&self) -> Matrix2 {
        let mut m = Matrix2::IDENTITY;
        let mut n_prev = self.n_left;
        for &(n, phi) in &self.layers {
            m = m * Matrix2::interface(n_prev, n) * Matrix2::propagation(phi);
            n_prev = n;
        }
        m * Matrix2::interface(n_prev, self.n_right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub matrix: Matrix2,
    pub wavelength_nm: f64,
}

pub fn stack_transfer_matrix(stack: &Stack, wavelength_nm: f64) -> Result<TransferMatrix> {
    Ok(TransferMatrix {
        matrix: Resolved::new(stack, wavelength_nm)?.matrix(),
        wavelength_nm,
    })
}

/// Amplitude scattering coefficients derived from a transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scattering {
    /// Transmission for incidence from the left.
    pub t: Complex64,
    /// Reflection for incidence from the left.
    pub r: Complex64,
    /// Reflection for incidence from the right.
    pub r_right: Complex64,
    /// Transmission for incidence from the right.
    pub t_right: Complex64,
}

impl TransferMatrix {
    pub fn scattering(&self) -> Result<Scattering> {
        let m = &self.matrix;
        if m.m11.norm() == 0.0 || !m.m11.is_finite() {
            return Err(Error::SingularStack {
                wavelength_nm: self.wavelength_nm,
            });
        }
        Ok(Scattering {
            t: ONE / m.m11,
            r: m.m21 / m.m11,
            r_right: -m.m12 / m.m11,
            t_right: m.det() / m.m11,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortResponse {
    pub t: Complex64,
    pub r: Complex64,
    pub r_right: Complex64,
    /// Power transmission; for mirror-terminated stacks this is leakage into the mirror.
    pub transmittance: f64,
    pub reflectance: f64,
    pub absorptance: f64,
}

/// Response to a plane wave incident from the left.
pub fn traveling_response(stack: &Stack, wavelength_nm: f64) -> Result<TwoPortResponse> {
    let resolved = Resolved::new(stack, wavelength_nm)?;
    let s = TransferMatrix {
        matrix: resolved.matrix(),
        wavelength_nm,
    }
    .scattering()?;
    let transmittance = resolved.n_right.re / resolved.n_left.re * s.t.norm_sqr();
    let reflectance = s.r.norm_sqr();
    Ok(TwoPortResponse {
        t: s.t,
        r: s.r,
        r_right: s.r_right,
        transmittance,
        reflectance,
        absorptance: 1.0 - transmittance - reflectance,
    })
}
