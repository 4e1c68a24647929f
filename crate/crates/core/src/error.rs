use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("{name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("material `{material}` has no data at {wavelength_nm} nm (table covers {min_nm}..={max_nm} nm)")]
    DispersionRange {
        material: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("transfer matrix has M11 = 0 at {wavelength_nm} nm")]
    SingularStack { wavelength_nm: f64 },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(&'static str),

    #[error("optimum search failed: {0}")]
    SearchFailure(String),

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("photon-number distribution truncated at n_max = {n_max}; residual tail {residual:e}")]
    Truncation { n_max: usize, residual: f64 },

    #[error("enumeration too large: {0}")]
    EnumerationSize(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable class of the error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::DispersionRange { .. } => "dispersion-range",
            Error::SingularStack { .. } => "singular-stack",
            Error::UnsupportedGeometry(_) => "unsupported-geometry",
            Error::SearchFailure(_) => "search-failure",
            Error::InfeasibleDesign(_) => "infeasible-design",
            Error::Truncation { .. } => "truncation",
            Error::EnumerationSize(_) => "enumeration-size",
        }
    }
}
