use serde::Serialize;

use crate::error::{Error, Result};
use crate::photon::clicks::{click_prob_given_fock, pairwise_sum};

/// Largest tail mass tolerated when truncating a photon-number distribution.
pub const MAX_TAIL: f64 = 1e-9;

/// Starting truncation for squeezed vacuum.
pub const DEFAULT_SQUEEZED_CUTOFF: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceKind {
    Fock { photons: usize },
    SqueezedVacuum { xi: f64, n_max: usize },
}

/// A light source through its photon-number distribution `P(n)`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonSource {
    pub kind: SourceKind,
    pub probabilities: Vec<f64>,
}

impl PhotonSource {
    pub fn fock(photons: usize) -> Self {
        let mut probabilities = vec![0.0; photons + 1];
        probabilities[photons] = 1.0;
        Self {
            kind: SourceKind::Fock { photons },
            probabilities,
        }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Squeezed vacuum with the truncation grown from the default until the
    /// tail drops below 1e−12.
    pub fn squeezed_vacuum(xi: f64) -> Result<Self> {
        check_squeezing(xi)?;
        let mut n_max = DEFAULT_SQUEEZED_CUTOFF;
        loop {
            let source = squeezed_unchecked(xi, n_max);
            if 1.0 - source.total() < 1e-12 {
                return Ok(source);
            }
            if n_max >= 20_000 {
                return Err(Error::Truncation {
                    n_max,
                    residual: 1.0 - source.total(),
                });
            }
            n_max *= 2;
        }
    }

    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probabilities)
    }
}

/// `P(n) = (1/cosh ξ)·(tanh ξ / 2)ⁿ·n!/((n/2)!)²` for even `n`, zero for odd `n`.
pub fn squeezed_vacuum_pn(xi: f64, n_max: usize) -> Result<PhotonSource> {
    check_squeezing(xi)?;
    if n_max % 2 != 0 {
        return Err(Error::domain("n_max", "truncation must be even"));
    }
    let source = squeezed_unchecked(xi, n_max);
    let residual = 1.0 - source.total();
    if residual > MAX_TAIL {
        return Err(Error::Truncation { n_max, residual });
    }
    Ok(source)
}

fn check_squeezing(xi: f64) -> Result<()> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::domain("xi", format!("squeezing must be finite and >= 0 (got {xi})")));
    }
    Ok(())
}

fn squeezed_unchecked(xi: f64, n_max: usize) -> PhotonSource {
    let ratio = (xi.tanh() / 2.0).powi(2);
    let mut probabilities = vec![0.0; n_max + 1];
    let mut p = 1.0 / xi.cosh();
    let mut n = 0;
    while n <= n_max {
        probabilities[n] = p;
        let half = (n / 2 + 1) as f64;
        p *= ratio * ((n + 1) * (n + 2)) as f64 / (half * half);
        n += 2;
    }
    PhotonSource {
        kind: SourceKind::SqueezedVacuum { xi, n_max },
        probabilities,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayMode {
    /// Detectors stacked in one standing wave: total absorption, efficiency 1.
    CoherentDistributed,
    /// Spatially or temporally multiplexed detectors with their own efficiency.
    IncoherentMultiplexed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorArraySpec {
    pub detectors: usize,
    /// Efficiency of each constituent detector.
    pub eta: f64,
    pub mode: ArrayMode,
}

impl DetectorArraySpec {
    pub fn new(detectors: usize, eta: f64, mode: ArrayMode) -> Result<Self> {
        if detectors == 0 {
            return Err(Error::domain("detectors", "at least one detector required"));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain("eta", format!("efficiency must lie in [0, 1] (got {eta})")));
        }
        Ok(Self { detectors, eta, mode })
    }

    /// Efficiency entering the click statistics.
    pub fn effective_eta(&self) -> f64 {
        match self.mode {
            ArrayMode::CoherentDistributed => 1.0,
            ArrayMode::IncoherentMultiplexed => self.eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickDistribution {
    /// `P(k)` for `k = 0..=N`.
    pub probabilities: Vec<f64>,
    pub array: DetectorArraySpec,
    pub source: SourceKind,
}

/// `P(k) = Σₙ P(k|n)·P_source(n)`.
pub fn source_click_distribution(source: &PhotonSource, array: &DetectorArraySpec) -> Result<ClickDistribution> {
    let eta = array.effective_eta();
    let probabilities = (0..=array.detectors)
        .map(|k| {
            let terms = source
                .probabilities
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(n, &p)| Ok(p * click_prob_given_fock(k, n, array.detectors, eta)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ClickDistribution {
        probabilities,
        array: *array,
        source: source.kind,
    })
}
