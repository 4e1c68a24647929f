//! Optical materials and the effective-medium description of nanowire meanders.
//!
//! Time dependence is `e^{-iωt}`, so absorbing media carry `Im ε > 0` and the
//! refractive index is the principal square root of the permittivity.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Permittivity of the NbTiN film at 1550 nm, `(4.21 + 3.87i)²`.
pub fn nbtin_permittivity() -> Complex64 {
    let n = Complex64::new(4.21, 3.87);
    n * n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaterialKind {
    Film,
    Dielectric,
    MirrorMedium,
}

/// One `(wavelength, n, k)` sample of a dispersion table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub wavelength_nm: f64,
    pub n: f64,
    pub k: f64,
}

/// Tabulated complex refractive index, linearly interpolated in `n` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    rows: Vec<DispersionRow>,
}

impl DispersionTable {
    pub fn new(rows: Vec<DispersionRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::domain("dispersion table", "at least 2 rows required"));
        }
        for (i, row) in rows.iter().enumerate() {
            if !(row.wavelength_nm.is_finite() && row.wavelength_nm > 0.0) {
                return Err(Error::domain(
                    "dispersion table",
                    format!("row {}: wavelength must be positive and finite", i + 1),
                ));
            }
            if !(row.n.is_finite() && row.n >= 0.0 && row.k.is_finite() && row.k >= 0.0) {
                return Err(Error::domain(
                    "dispersion table",
                    format!("row {}: n and k must be finite and non-negative", i + 1),
                ));
            }
            if i > 0 && row.wavelength_nm <= rows[i - 1].wavelength_nm {
                return Err(Error::domain(
                    "dispersion table",
                    format!("row {}: wavelengths must be strictly increasing", i + 1),
                ));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[DispersionRow] {
        &self.rows
    }

    pub fn range_nm(&self) -> (f64, f64) {
        (self.rows[0].wavelength_nm, self.rows[self.rows.len() - 1].wavelength_nm)
    }

    /// Interpolated `n + ik`, or `None` outside the tabulated range.
    pub fn index_at(&self, wavelength_nm: f64) -> Option<Complex64> {
        let (lo, hi) = self.range_nm();
        if !(wavelength_nm >= lo && wavelength_nm <= hi) {
            return None;
        }
        let upper = self
            .rows
            .partition_point(|row| row.wavelength_nm < wavelength_nm)
            .max(1);
        let a = &self.rows[upper - 1];
        let b = &self.rows[upper];
        let s = (wavelength_nm - a.wavelength_nm) / (b.wavelength_nm - a.wavelength_nm);
        Some(Complex64::new(a.n + s * (b.n - a.n), a.k + s * (b.k - a.k)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Permittivity {
    Constant(Complex64),
    Table(Arc<DispersionTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    name: String,
    kind: MaterialKind,
    permittivity: Permittivity,
}

impl Material {
    pub fn constant(name: impl Into<String>, kind: MaterialKind, eps: Complex64) -> Result<Self> {
        if !(eps.re.is_finite() && eps.im.is_finite()) {
            return Err(Error::domain("permittivity", "must be finite"));
        }
        if eps.im < 0.0 {
            return Err(Error::domain(
                "permittivity",
                format!("imaginary part must be >= 0 (got {})", eps.im),
            ));
        }
        Ok(Self {
            name: name.into(),
            kind,
            permittivity: Permittivity::Constant(eps),
        })
    }

    pub fn tabulated(name: impl Into<String>, kind: MaterialKind, table: DispersionTable) -> Self {
        Self {
            name: name.into(),
            kind,
            permittivity: Permittivity::Table(Arc::new(table)),
        }
    }

    pub fn vacuum() -> Self {
        Self {
            name: "vacuum".into(),
            kind: MaterialKind::Dielectric,
            permittivity: Permittivity::Constant(Complex64::new(1.0, 0.0)),
        }
    }

    /// Lossless dielectric with real refractive index `n`.
    pub fn dielectric(name: impl Into<String>, n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain("refractive index", format!("must be positive (got {n})")));
        }
        Self::constant(name, MaterialKind::Dielectric, Complex64::new(n * n, 0.0))
    }

    pub fn nbtin() -> Self {
        Self {
            name: "nbtin".into(),
            kind: MaterialKind::Film,
            permittivity: Permittivity::Constant(nbtin_permittivity()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MaterialKind {
        self.kind
    }

    pub fn permittivity_model(&self) -> &Permittivity {
        &self.permittivity
    }

    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64> {
        match &self.permittivity {
            Permittivity::Constant(eps) => Ok(*eps),
            Permittivity::Table(table) => {
                let n = table.index_at(wavelength_nm).ok_or_else(|| {
                    let (min_nm, max_nm) = table.range_nm();
                    Error::DispersionRange {
                        material: self.name.clone(),
                        wavelength_nm,
                        min_nm,
                        max_nm,
                    }
                })?;
                Ok(n * n)
            }
        }
    }

    pub fn index(&self, wavelength_nm: f64) -> Result<Complex64> {
        Ok(self.permittivity(wavelength_nm)?.sqrt())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.permittivity, Permittivity::Constant(_))
    }
}

/// `ε_film·f + ε_slit·(1 − f)`.
pub fn effective_permittivity(film: Complex64, slit: Complex64, filling_factor: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&filling_factor) {
        return Err(Error::domain(
            "filling_factor",
            format!("must lie in [0, 1] (got {filling_factor})"),
        ));
    }
    Ok(film * filling_factor + slit * (1.0 - filling_factor))
}

/// A nanowire meander layer treated as a uniform effective film.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanderSpec {
    pub film: Material,
    pub slit: Material,
    pub filling_factor: f64,
    pub thickness_nm: f64,
}

impl MeanderSpec {
    pub fn new(film: Material, slit: Material, filling_factor: f64, thickness_nm: f64) -> Result<Self> {
        let spec = Self {
            film,
            slit,
            filling_factor,
            thickness_nm,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// NbTiN meander with vacuum slits.
    pub fn nbtin(filling_factor: f64, thickness_nm: f64) -> Result<Self> {
        Self::new(Material::nbtin(), Material::vacuum(), filling_factor, thickness_nm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.filling_factor > 0.0 && self.filling_factor <= 1.0) {
            return Err(Error::domain(
                "filling_factor",
                format!("must lie in (0, 1] (got {})", self.filling_factor),
            ));
        }
        if !(self.thickness_nm.is_finite() && self.thickness_nm >= 0.0) {
            return Err(Error::domain(
                "thickness_nm",
                format!("must be finite and >= 0 (got {})", self.thickness_nm),
            ));
        }
        Ok(())
    }

    pub fn with_thickness(&self, thickness_nm: f64) -> Self {
        Self {
            thickness_nm,
            ..self.clone()
        }
    }

    pub fn with_filling_factor(&self, filling_factor: f64) -> Self {
        Self {
            filling_factor,
            ..self.clone()
        }
    }

    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64> {
        effective_permittivity(
            self.film.permittivity(wavelength_nm)?,
            self.slit.permittivity(wavelength_nm)?,
            self.filling_factor,
        )
    }
}
