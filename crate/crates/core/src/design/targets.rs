use serde::Serialize;

use crate::error::{Error, Result};

/// Arrangement of identical sublayers around the standing wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SublayerGeometry {
    /// `M` sublayers between two counter-propagating beams.
    CounterPropagating { sublayers: u32 },
    /// `K` sublayers above a reflector.
    Salisbury { sublayers: u32 },
}

/// Per-sublayer amplitude and intensity coefficients that yield total absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignTargets {
    pub t: f64,
    pub r: f64,
    pub absorption: f64,
    pub geometry: SublayerGeometry,
}

pub fn target_coefficients(geometry: SublayerGeometry) -> Result<DesignTargets> {
    // Both geometries share the form t = q/(q+1), r = −1/(q+1), A = 2q/(q+1)²
    // with q = M (counter-propagating) or q = 2K (Salisbury).
    let q = match geometry {
        SublayerGeometry::CounterPropagating { sublayers } | SublayerGeometry::Salisbury { sublayers }
            if sublayers == 0 =>
        {
            return Err(Error::domain("sublayers", "at least one sublayer required"));
        }
        SublayerGeometry::CounterPropagating { sublayers } => f64::from(sublayers),
        SublayerGeometry::Salisbury { sublayers } => 2.0 * f64::from(sublayers),
    };
    Ok(DesignTargets {
        t: q / (q + 1.0),
        r: -1.0 / (q + 1.0),
        absorption: 2.0 * q / ((q + 1.0) * (q + 1.0)),
        geometry,
    })
}
