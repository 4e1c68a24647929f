//! Stratified stacks: ambient media, an ordered list of layers and a termination.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::material::{Material, MeanderSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    /// Nanowire meander described by its effective permittivity.
    Detector(MeanderSpec),
    Spacer { material: Material, thickness_nm: f64 },
}

impl Layer {
    pub fn spacer(material: Material, thickness_nm: f64) -> Self {
        Layer::Spacer {
            material,
            thickness_nm,
        }
    }

    pub fn thickness_nm(&self) -> f64 {
        match self {
            Layer::Detector(m) => m.thickness_nm,
            Layer::Spacer { thickness_nm, .. } => *thickness_nm,
        }
    }

    pub fn with_thickness(&self, thickness_nm: f64) -> Self {
        match self {
            Layer::Detector(m) => Layer::Detector(m.with_thickness(thickness_nm)),
            Layer::Spacer { material, .. } => Layer::Spacer {
                material: material.clone(),
                thickness_nm,
            },
        }
    }

    pub fn is_detector(&self) -> bool {
        matches!(self, Layer::Detector(_))
    }

    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64> {
        match self {
            Layer::Detector(m) => m.permittivity(wavelength_nm),
            Layer::Spacer { material, .. } => material.permittivity(wavelength_nm),
        }
    }

    pub fn index(&self, wavelength_nm: f64) -> Result<Complex64> {
        Ok(self.permittivity(wavelength_nm)?.sqrt())
    }

    fn validate(&self) -> Result<()> {
        match self {
            Layer::Detector(m) => m.validate(),
            Layer::Spacer { thickness_nm, .. } => {
                if thickness_nm.is_finite() && *thickness_nm >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain(
                        "thickness_nm",
                        format!("must be finite and >= 0 (got {thickness_nm})"),
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Semi-infinite transmissive medium on the right.
    Open(Material),
    /// Semi-infinite real-index medium acting as a reflector.
    Mirror { reflectivity: f64, index: f64 },
}

impl Termination {
    /// Mirror whose interface with a medium of index `adjacent_index` has
    /// intensity reflectivity `reflectivity` and reflection phase π.
    pub fn mirror(reflectivity: f64, adjacent_index: f64) -> Result<Self> {
        if !(reflectivity > 0.0 && reflectivity < 1.0) {
            return Err(Error::domain(
                "reflectivity",
                format!("must lie in (0, 1) (got {reflectivity})"),
            ));
        }
        if !(adjacent_index.is_finite() && adjacent_index > 0.0) {
            return Err(Error::domain("mirror adjacent index", "must be positive"));
        }
        let rho = reflectivity.sqrt();
        Ok(Termination::Mirror {
            reflectivity,
            index: adjacent_index * (1.0 + rho) / (1.0 - rho),
        })
    }

    pub fn is_mirror(&self) -> bool {
        matches!(self, Termination::Mirror { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    ambient: Material,
    layers: Vec<Layer>,
    termination: Termination,
}

impl Stack {
    pub fn new(ambient: Material, layers: Vec<Layer>, termination: Termination) -> Result<Self> {
        if !ambient.is_constant() || ambient.permittivity(1.0)?.im != 0.0 || ambient.permittivity(1.0)?.re <= 0.0 {
            return Err(Error::domain("ambient", "ambient medium must be a constant lossless dielectric"));
        }
        if let Termination::Open(right) = &termination {
            if !right.is_constant() || right.permittivity(1.0)?.im != 0.0 || right.permittivity(1.0)?.re <= 0.0 {
                return Err(Error::domain(
                    "termination",
                    "exit medium must be a constant lossless dielectric",
                ));
            }
        }
        for layer in &layers {
            layer.validate()?;
        }
        Ok(Self {
            ambient,
            layers,
            termination,
        })
    }

    /// Vacuum on both sides.
    pub fn free_standing(layers: Vec<Layer>) -> Result<Self> {
        Self::new(Material::vacuum(), layers, Termination::Open(Material::vacuum()))
    }

    pub fn ambient(&self) -> &Material {
        &self.ambient
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn is_two_port(&self) -> bool {
        !self.termination.is_mirror()
    }

    pub fn detector_indices(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_detector())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_thickness_nm(&self) -> f64 {
        self.layers.iter().map(Layer::thickness_nm).sum()
    }

    /// Same stack with layer thicknesses replaced; lengths must match.
    pub fn with_thicknesses(&self, thicknesses: &[f64]) -> Result<Self> {
        if thicknesses.len() != self.layers.len() {
            return Err(Error::domain("thicknesses", "length must match the layer count"));
        }
        let layers = self
            .layers
            .iter()
            .zip(thicknesses)
            .map(|(l, &d)| l.with_thickness(d))
            .collect();
        Self::new(self.ambient.clone(), layers, self.termination.clone())
    }

    pub fn with_layers(&self, layers: Vec<Layer>) -> Result<Self> {
        Self::new(self.ambient.clone(), layers, self.termination.clone())
    }

    /// Stack with one more layer between the last layer and the termination.
    pub fn appended(&self, layer: Layer) -> Result<Self> {
        let mut layers = self.layers.clone();
        layers.push(layer);
        self.with_layers(layers)
    }

    pub(crate) fn left_index(&self) -> Complex64 {
        self.ambient
            .permittivity(1.0)
            .expect("ambient is constant")
            .sqrt()
    }

    pub(crate) fn right_index(&self) -> Complex64 {
        match &self.termination {
            Termination::Open(m) => m.permittivity(1.0).expect("exit medium is constant").sqrt(),
            Termination::Mirror { index, .. } => Complex64::new(*index, 0.0),
        }
    }
}
