use crate::error::{Error, Result};
use crate::optics::{Layer, Material, MeanderSpec, Stack, Termination};

fn spacer_material(spacer_n: f64) -> Result<Material> {
    if !(spacer_n.is_finite() && spacer_n >= 1.0) {
        return Err(Error::domain("spacer_n", format!("must be >= 1 (got {spacer_n})")));
    }
    Material::dielectric("spacer", spacer_n)
}

/// Detector above a quarter-wave spacer on a reflector:
/// `vacuum | meander | λ/(4 n_sp) spacer | mirror`.
pub fn build_salisbury(
    meander: &MeanderSpec,
    spacer_n: f64,
    mirror_reflectivity: f64,
    design_wavelength_nm: f64,
) -> Result<Stack> {
    meander.validate()?;
    let spacer = spacer_material(spacer_n)?;
    let termination = Termination::mirror(mirror_reflectivity, spacer_n)?;
    Stack::new(
        Material::vacuum(),
        vec![
            Layer::Detector(meander.clone()),
            Layer::spacer(spacer, design_wavelength_nm / (4.0 * spacer_n)),
        ],
        termination,
    )
}

/// `detectors` copies of `sublayer` separated by half-wave spacers, in vacuum.
pub fn build_distributed(
    sublayer: &MeanderSpec,
    detectors: usize,
    spacer_n: f64,
    design_wavelength_nm: f64,
) -> Result<Stack> {
    if detectors == 0 {
        return Err(Error::domain("detectors", "at least one detector layer required"));
    }
    sublayer.validate()?;
    let spacer = spacer_material(spacer_n)?;
    let half_wave = design_wavelength_nm / (2.0 * spacer_n);
    let mut layers = Vec::with_capacity(2 * detectors - 1);
    for i in 0..detectors {
        if i > 0 {
            layers.push(Layer::spacer(spacer.clone(), half_wave));
        }
        layers.push(Layer::Detector(sublayer.clone()));
    }
    Stack::free_standing(layers)
}
