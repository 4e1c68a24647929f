//! JSON stack description: ambient, layers, termination and named materials.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use standwave_core::optics::{
    DispersionRow, DispersionTable, Layer, Material, MaterialKind, MeanderSpec, Permittivity, Stack, Termination,
};

use crate::dispersion::read_dispersion_csv;
use crate::error::{read_file, CliError, CliResult};

const VACUUM: &str = "vacuum";
const NBTIN: &str = "nbtin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackSpecFile {
    pub ambient: String,
    pub layers: Vec<LayerEntry>,
    pub termination: TerminationEntry,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub materials: BTreeMap<String, MaterialEntry>,
    pub design_wavelength_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LayerEntry {
    Detector {
        material: String,
        thickness_nm: f64,
        filling_factor: f64,
        /// Medium between the wires; vacuum when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slit_material: Option<String>,
    },
    Spacer {
        material: String,
        thickness_nm: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TerminationEntry {
    Open {
        /// Exit medium; vacuum when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<String>,
    },
    /// Reflector matched to the index of the last layer at the design wavelength.
    Mirror { reflectivity: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialEntry {
    Constant(ConstantEntry),
    Csv(CsvEntry),
    Inline(InlineEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantEntry {
    pub epsilon_re: f64,
    pub epsilon_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MaterialKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvEntry {
    /// Relative paths are resolved against the spec file's directory.
    pub dispersion_csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MaterialKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineEntry {
    pub dispersion: Vec<DispersionRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MaterialKind>,
}

/// A validated stack and the wavelength it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedStack {
    pub stack: Stack,
    pub design_wavelength_nm: f64,
}

fn at(field: impl Into<String>) -> impl FnOnce(standwave_core::Error) -> CliError {
    let field = field.into();
    move |e| match e {
        standwave_core::Error::Domain { reason, .. } => CliError::Invariant { field, message: reason },
        other => CliError::Invariant {
            field,
            message: other.to_string(),
        },
    }
}

pub fn parse_stack_file(path: &Path) -> CliResult<LoadedStack> {
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_stack_str(&text, path, base)
}

/// Parse spec text; `path` labels errors and `base` anchors relative CSV paths.
pub fn parse_stack_str(text: &str, path: &Path, base: &Path) -> CliResult<LoadedStack> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: StackSpecFile = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        field: match e.path().to_string() {
            p if p == "." => "(document)".into(),
            p => p,
        },
        message: e.inner().to_string(),
    })?;
    spec.build(base)
}

impl StackSpecFile {
    pub fn build(&self, base: &Path) -> CliResult<LoadedStack> {
        let lambda = self.design_wavelength_nm;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(CliError::invariant("design_wavelength_nm", format!("must be positive (got {lambda})")));
        }

        let mut library: BTreeMap<&str, Material> = BTreeMap::new();
        library.insert(VACUUM, Material::vacuum());
        library.insert(NBTIN, Material::nbtin());
        for (name, entry) in &self.materials {
            let field = format!("materials.{name}");
            if library.contains_key(name.as_str()) {
                return Err(CliError::invariant(field, "redefines a built-in material"));
            }
            library.insert(name, entry.material(name, base, &field)?);
        }
        let lookup = |name: &str, field: String| -> CliResult<Material> {
            library
                .get(name)
                .cloned()
                .ok_or_else(|| CliError::invariant(field, format!("unknown material `{name}`")))
        };

        let ambient = lookup(&self.ambient, "ambient".into())?;
        require_lossless(&ambient, "ambient")?;

        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, entry) in self.layers.iter().enumerate() {
            let field = |name: &str| format!("layers[{i}].{name}");
            let layer = match entry {
                LayerEntry::Detector {
                    material,
                    thickness_nm,
                    filling_factor,
                    slit_material,
                } => {
                    let film = lookup(material, field("material"))?;
                    let slit = lookup(slit_material.as_deref().unwrap_or(VACUUM), field("slit_material"))?;
                    check_thickness(*thickness_nm, field("thickness_nm"))?;
                    if !(*filling_factor > 0.0 && *filling_factor <= 1.0) {
                        return Err(CliError::invariant(
                            field("filling_factor"),
                            format!("must lie in (0, 1] (got {filling_factor})"),
                        ));
                    }
                    Layer::Detector(
                        MeanderSpec::new(film, slit, *filling_factor, *thickness_nm).map_err(at(format!("layers[{i}]")))?,
                    )
                }
                LayerEntry::Spacer { material, thickness_nm } => {
                    let m = lookup(material, field("material"))?;
                    check_thickness(*thickness_nm, field("thickness_nm"))?;
                    Layer::spacer(m, *thickness_nm)
                }
            };
            layers.push(layer);
        }

        let termination = match &self.termination {
            TerminationEntry::Open { material } => {
                let exit = lookup(material.as_deref().unwrap_or(VACUUM), "termination.material".into())?;
                require_lossless(&exit, "termination.material")?;
                Termination::Open(exit)
            }
            TerminationEntry::Mirror { reflectivity } => {
                let adjacent = mirror_neighbour_index(&ambient, &layers, lambda)?;
                Termination::mirror(*reflectivity, adjacent).map_err(at("termination.reflectivity"))?
            }
        };

        let stack = Stack::new(ambient, layers, termination).map_err(at("stack"))?;
        Ok(LoadedStack {
            stack,
            design_wavelength_nm: lambda,
        })
    }

    /// Spec document describing `stack`. Tabulated materials are written inline.
    pub fn from_stack(stack: &Stack, design_wavelength_nm: f64) -> CliResult<Self> {
        let mut materials = BTreeMap::new();
        let ambient = reference(stack.ambient(), &mut materials)?;
        let mut layers = Vec::with_capacity(stack.layers().len());
        for layer in stack.layers() {
            layers.push(match layer {
                Layer::Detector(m) => LayerEntry::Detector {
                    material: reference(&m.film, &mut materials)?,
                    thickness_nm: m.thickness_nm,
                    filling_factor: m.filling_factor,
                    slit_material: match reference(&m.slit, &mut materials)? {
                        name if name == VACUUM => None,
                        name => Some(name),
                    },
                },
                Layer::Spacer { material, thickness_nm } => LayerEntry::Spacer {
                    material: reference(material, &mut materials)?,
                    thickness_nm: *thickness_nm,
                },
            });
        }
        let termination = match stack.termination() {
            Termination::Open(exit) => TerminationEntry::Open {
                material: Some(reference(exit, &mut materials)?),
            },
            Termination::Mirror { reflectivity, index } => {
                let adjacent = mirror_neighbour_index(stack.ambient(), stack.layers(), design_wavelength_nm)?;
                let expected = Termination::mirror(*reflectivity, adjacent).map_err(at("termination"))?;
                if expected != (Termination::Mirror { reflectivity: *reflectivity, index: *index }) {
                    return Err(CliError::invariant(
                        "termination",
                        "mirror is not matched to the adjacent layer at the design wavelength",
                    ));
                }
                TerminationEntry::Mirror {
                    reflectivity: *reflectivity,
                }
            }
        };
        Ok(Self {
            ambient,
            layers,
            termination,
            materials,
            design_wavelength_nm,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec documents serialize")
    }
}

impl MaterialEntry {
    fn material(&self, name: &str, base: &Path, field: &str) -> CliResult<Material> {
        match self {
            MaterialEntry::Constant(c) => Material::constant(
                name,
                c.kind.unwrap_or(MaterialKind::Dielectric),
                Complex64::new(c.epsilon_re, c.epsilon_im),
            )
            .map_err(at(field)),
            MaterialEntry::Csv(c) => {
                let path = if c.dispersion_csv.is_absolute() {
                    c.dispersion_csv.clone()
                } else {
                    base.join(&c.dispersion_csv)
                };
                let table = read_dispersion_csv(&path)?;
                Ok(Material::tabulated(name, c.kind.unwrap_or(MaterialKind::Dielectric), table))
            }
            MaterialEntry::Inline(c) => {
                let table = DispersionTable::new(c.dispersion.clone()).map_err(at(format!("{field}.dispersion")))?;
                Ok(Material::tabulated(name, c.kind.unwrap_or(MaterialKind::Dielectric), table))
            }
        }
    }
}

fn check_thickness(d: f64, field: String) -> CliResult<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(CliError::invariant(field, format!("must be finite and >= 0 (got {d})")))
    }
}

fn require_lossless(m: &Material, field: &str) -> CliResult<()> {
    let lossless = m.is_constant() && m.permittivity(1.0).is_ok_and(|e| e.im == 0.0 && e.re > 0.0);
    if lossless {
        Ok(())
    } else {
        Err(CliError::invariant(field, "must be a constant lossless dielectric"))
    }
}

/// Real part of the index next to the mirror: the last layer, or the ambient
/// for a bare reflector.
fn mirror_neighbour_index(ambient: &Material, layers: &[Layer], lambda: f64) -> CliResult<f64> {
    let n = match layers.last() {
        Some(layer) => layer.index(lambda),
        None => ambient.index(lambda),
    }
    .map_err(at("termination"))?;
    Ok(n.re)
}

fn reference(m: &Material, materials: &mut BTreeMap<String, MaterialEntry>) -> CliResult<String> {
    if *m == Material::vacuum() {
        return Ok(VACUUM.into());
    }
    if *m == Material::nbtin() {
        return Ok(NBTIN.into());
    }
    let name = m.name().to_string();
    if name == VACUUM || name == NBTIN {
        return Err(CliError::invariant(
            format!("materials.{name}"),
            "differs from the built-in material of the same name",
        ));
    }
    let kind = (m.kind() != MaterialKind::Dielectric).then_some(m.kind());
    let entry = match m.permittivity_model() {
        Permittivity::Constant(eps) => MaterialEntry::Constant(ConstantEntry {
            epsilon_re: eps.re,
            epsilon_im: eps.im,
            kind,
        }),
        Permittivity::Table(table) => MaterialEntry::Inline(InlineEntry {
            dispersion: table.rows().to_vec(),
            kind,
        }),
    };
    match materials.get(&name) {
        Some(existing) if *existing != entry => Err(CliError::invariant(
            format!("materials.{name}"),
            "two different materials share this name",
        )),
        _ => {
            materials.insert(name.clone(), entry);
            Ok(name)
        }
    }
}
