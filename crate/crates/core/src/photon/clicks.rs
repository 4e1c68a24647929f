//! Conditional click probabilities of an array of on-off detectors sharing
//! one optical mode uniformly.

use crate::error::{Error, Result};

fn check(k: usize, detectors: usize, eta: f64) -> Result<()> {
    if detectors == 0 {
        return Err(Error::domain("detectors", "at least one detector required"));
    }
    if k > detectors {
        return Err(Error::domain("k", format!("{k} clicks exceed {detectors} detectors")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("eta", format!("efficiency must lie in [0, 1] (got {eta})")));
    }
    Ok(())
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

fn snap_unit(p: f64) -> f64 {
    if (-1e-12..0.0).contains(&p) {
        0.0
    } else if (1.0..=1.0 + 1e-12).contains(&p) {
        1.0
    } else {
        p
    }
}

/// Forward error bound of the alternating sum above which the occupancy
/// recurrence is used instead.
const CANCELLATION_LIMIT: f64 = 1e-13;

/// `P(k|m)`: probability that exactly `k` of `detectors` fire for an
/// `m`-photon Fock input, each detector having efficiency `eta`:
///
/// `P(k|m) = N⁻ᵐ C(N,k) Σₗ (−1)ˡ C(k,l) [N − (N−k+l)η]ᵐ`.
///
/// The alternating sum is evaluated directly when its cancellation error is
/// negligible; otherwise the same probability comes from
/// [`click_distribution_given_fock`].
pub fn click_prob_given_fock(k: usize, m: usize, detectors: usize, eta: f64) -> Result<f64> {
    check(k, detectors, eta)?;
    if k > m {
        return Ok(0.0);
    }
    let n = detectors as f64;
    let mut c_kl = 1.0;
    let mut terms = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let base = (n - (detectors - k + l) as f64 * eta) / n;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(sign * c_kl * base.max(0.0).powi(m as i32));
        c_kl = c_kl * (k - l) as f64 / (l + 1) as f64;
    }
    let prefactor = binomial(detectors, k);
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    let bound = prefactor * magnitude * f64::EPSILON * (m + k + 2) as f64;
    if bound > CANCELLATION_LIMIT {
        return Ok(click_distribution_given_fock(m, detectors, eta)?[k]);
    }
    Ok(snap_unit(prefactor * pairwise_sum(&terms)))
}

/// Full distribution `P(0..=N | m)` from the photon-by-photon occupancy
/// recurrence: each photon fires a new detector with probability `(N−j)η/N`
/// when `j` detectors have already fired. All terms are non-negative.
pub fn click_distribution_given_fock(m: usize, detectors: usize, eta: f64) -> Result<Vec<f64>> {
    check(0, detectors, eta)?;
    let n = detectors as f64;
    let mut p = vec![0.0; detectors + 1];
    p[0] = 1.0;
    for photon in 0..m {
        let reach = (photon + 1).min(detectors);
        for j in (0..reach).rev() {
            let advance = (detectors - j) as f64 * eta / n;
            p[j + 1] += p[j] * advance;
            p[j] *= 1.0 - advance;
        }
    }
    Ok(p)
}

/// Fock-basis series at unit efficiency:
/// `[N!/(N−k)!]·N⁻ⁿ·Σⱼ (−1)ʲ (k−j)ⁿ / (j!(k−j)!)`, zero for `n < k`.
pub fn click_prob_series_fock(k: usize, n: usize, detectors: usize) -> Result<f64> {
    check(k, detectors, 1.0)?;
    if n < k {
        return Ok(0.0);
    }
    let nd = detectors as f64;
    let falling: f64 = (0..k).map(|i| (detectors - i) as f64).product();
    let prefactor = falling / nd.powi(n as i32);

    let mut factorials = vec![1.0f64; k + 1];
    for i in 1..=k {
        factorials[i] = factorials[i - 1] * i as f64;
    }
    let terms: Vec<f64> = (0..=k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * ((k - j) as f64).powi(n as i32) / (factorials[j] * factorials[k - j])
        })
        .collect();
    Ok(snap_unit(prefactor * pairwise_sum(&terms)))
}

/// Probability of resolving an `m`-photon Fock state exactly, `P(m|m)`.
/// Zero when the array has fewer than `m` detectors.
pub fn resolution_probability(m: usize, detectors: usize, eta: f64) -> Result<f64> {
    if m > detectors {
        check(0, detectors, eta)?;
        return Ok(0.0);
    }
    click_prob_given_fock(m, m, detectors, eta)
}
