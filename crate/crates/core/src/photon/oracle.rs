//! Brute-force reference for click statistics, used to verify the closed form.

use crate::error::{Error, Result};

pub const MAX_ORACLE_PHOTONS: usize = 8;
pub const MAX_ORACLE_DETECTORS: usize = 8;

/// Exact `P(k|m)` by enumerating all `Nᵐ` photon-to-detector assignments and
/// all `2ᵐ` detected/undetected outcomes.
pub fn oracle_click_prob(k: usize, m: usize, detectors: usize, eta: f64) -> Result<f64> {
    if m > MAX_ORACLE_PHOTONS || detectors > MAX_ORACLE_DETECTORS {
        return Err(Error::EnumerationSize(format!(
            "m = {m}, N = {detectors} exceeds the {MAX_ORACLE_PHOTONS}x{MAX_ORACLE_DETECTORS} bound"
        )));
    }
    if detectors == 0 || k > detectors || !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("oracle", "need N >= 1, k <= N and 0 <= eta <= 1"));
    }

    // weight[j] = η^j (1−η)^(m−j)
    let weight: Vec<f64> = (0..=m)
        .map(|j| eta.powi(j as i32) * (1.0 - eta).powi((m - j) as i32))
        .collect();
    let assignments = detectors.pow(m as u32);
    let mut target = vec![0usize; m];
    let mut total = 0.0;
    for a in 0..assignments {
        let mut code = a;
        for slot in target.iter_mut() {
            *slot = code % detectors;
            code /= detectors;
        }
        for mask in 0u32..(1 << m) {
            let fired = (0..m)
                .filter(|&p| mask & (1 << p) != 0)
                .fold(0u32, |acc, p| acc | (1 << target[p]));
            if fired.count_ones() as usize == k {
                total += weight[mask.count_ones() as usize];
            }
        }
    }
    Ok(total / assignments as f64)
}
