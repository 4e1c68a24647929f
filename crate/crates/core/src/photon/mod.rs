//! Photocounting statistics of detector arrays.

pub mod clicks;
pub mod oracle;
pub mod source;

pub use clicks::{click_distribution_given_fock, click_prob_given_fock, click_prob_series_fock, resolution_probability};
pub use oracle::oracle_click_prob;
pub use source::{
    source_click_distribution, squeezed_vacuum_pn, ArrayMode, ClickDistribution, DetectorArraySpec, PhotonSource,
    SourceKind,
};
