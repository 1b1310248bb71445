//! Pearson chi-square and total-variation comparisons of histograms against
//! reference laws.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{GasError, Result};

/// Bins whose expected count falls below this are pooled with neighbours.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub tv_distance: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub total: u64,
}

/// Compares observed counts with reference bin probabilities.
///
/// TV is computed on the unpooled bins. For the chi-square, consecutive bins
/// are pooled until the expected count reaches [`MIN_EXPECTED_COUNT`]; a
/// short remainder is folded into the last pooled bin.
pub fn goodness_of_fit(observed: &[u64], reference: &[f64]) -> Result<GofResult> {
    if observed.len() != reference.len() {
        return Err(GasError::BinMismatch(observed.len(), reference.len()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(GasError::EmptyInput);
    }
    let n = total as f64;
    let tv_distance = 0.5
        * observed
            .iter()
            .zip(reference)
            .map(|(&o, &r)| (o as f64 / n - r).abs())
            .sum::<f64>();

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (&o, &r) in observed.iter().zip(reference) {
        obs_acc += o as f64;
        exp_acc += r * n;
        if exp_acc >= MIN_EXPECTED_COUNT {
            pooled.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if obs_acc > 0.0 || exp_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += obs_acc;
                last.1 += exp_acc;
            }
            None => pooled.push((obs_acc, exp_acc)),
        }
    }
    let chi_square: f64 = pooled
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else if chi_square.is_infinite() {
        0.0
    } else {
        ChiSquared::new(dof as f64).expect("dof > 0").sf(chi_square)
    };
    Ok(GofResult {
        tv_distance,
        chi_square,
        dof,
        p_value,
        total,
    })
}
