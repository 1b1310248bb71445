//! Total progeny of the critical Galton–Watson process with `Bin(d, 1/d)`
//! offspring.

use crate::scalar::{complement, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct GwPmf<T> {
    pub d: u32,
    /// `pmf[k - 1] = P(T = k)` for `k = 1..=k_max`.
    pub pmf: Vec<T>,
    /// `P(T > k_max)`; the process dies out almost surely, so this is
    /// `1 − Σ pmf`.
    pub tail: T,
}

impl<T: Scalar> GwPmf<T> {
    pub fn k_max(&self) -> usize {
        self.pmf.len()
    }

    pub fn prob(&self, k: usize) -> T {
        if k == 0 || k > self.pmf.len() {
            T::zero()
        } else {
            self.pmf[k - 1].clone()
        }
    }

    /// Bin probabilities `P(T = 1), …, P(T = k_max), P(T > k_max)`.
    pub fn binned(&self) -> Vec<T> {
        let mut out = self.pmf.clone();
        out.push(self.tail.clone());
        out
    }

    fn with_tail(d: u32, pmf: Vec<T>) -> Self {
        let mass = pmf.iter().fold(T::zero(), |acc, x| acc + x.clone());
        Self {
            d,
            pmf,
            tail: complement(&mass),
        }
    }
}

/// Closed form `P(T = k) = (1/k)·C(dk, k − 1)·(1/d)^{k−1}·((d − 1)/d)^{dk − k + 1}`.
///
/// The binomial coefficient and the powers are multiplied in interleaved
/// order so that `f64` stays finite for `k_max` in the low thousands.
pub fn gw_total_progeny_pmf<T: Scalar>(d: u32, k_max: usize) -> GwPmf<T> {
    assert!(d >= 2, "branching factor must be at least 2");
    let dd = d as u64;
    let survive = T::ratio(dd - 1, dd);
    let per_step = survive.powu(d - 1);
    let pmf = (1..=k_max as u64)
        .map(|k| {
            // C(dk, k − 1) = Π_{i=1}^{k−1} (dk − k + 1 + i)/i
            let mut value = T::one() / T::from_count(k);
            for i in 1..k {
                value = value * T::ratio(dd * k - k + 1 + i, i * dd) * per_step.clone();
            }
            // Remaining exponent: dk − k + 1 − (d − 1)(k − 1) = d.
            value * survive.powu(d)
        })
        .collect();
    GwPmf::with_tail(d, pmf)
}

/// Independent route: `P(T = k) = Σ_j P(Bin(d, 1/d) = j)·P(T_1 + … + T_j = k − 1)`,
/// with the `j`-fold convolutions built up from the already known `P(T = s)`,
/// `s < k`.
pub fn gw_total_progeny_pmf_convolution<T: Scalar>(d: u32, k_max: usize) -> GwPmf<T> {
    assert!(d >= 2, "branching factor must be at least 2");
    let dd = d as u64;
    let offspring: Vec<T> = (0..=dd)
        .map(|j| T::from_count(binomial(dd, j)) * T::ratio(1, dd).powu(j as u32) * T::ratio(dd - 1, dd).powu((dd - j) as u32))
        .collect();
    // conv[j][s] = P(T_1 + … + T_j = s), filled for s < k at step k.
    let mut conv = vec![vec![T::zero(); k_max]; d as usize + 1];
    if k_max > 0 {
        conv[0][0] = T::one();
    }
    let mut t = vec![T::zero(); k_max + 1];
    for k in 1..=k_max {
        let s = k - 1;
        for j in 1..=d as usize {
            let mut acc = T::zero();
            for a in 1..=s {
                acc = acc + t[a].clone() * conv[j - 1][s - a].clone();
            }
            conv[j][s] = acc;
        }
        t[k] = (0..=d as usize).fold(T::zero(), |acc, j| acc + offspring[j].clone() * conv[j][s].clone());
    }
    GwPmf::with_tail(d, t.into_iter().skip(1).collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
