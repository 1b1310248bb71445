//! Turning samples into verdicts: cluster decomposition, survival frequency,
//! the critical Galton–Watson reference law and goodness-of-fit tests.

mod clusters;
mod gof;
mod gw;

pub use clusters::{
    components, finite_cluster_samples, finite_cluster_samples_up_to, one_ended_violations, root_reaches_boundary,
    spine_attachment_counts, survival_frequency, ClusterReport, ClusterSample, FiniteClusterCollector,
};
pub use gof::{goodness_of_fit, GofResult, MIN_EXPECTED_COUNT};
pub use gw::{gw_total_progeny_pmf, gw_total_progeny_pmf_convolution, GwPmf};

use crate::error::Result;

/// Default size cutoff for cluster histograms; larger clusters share a tail bin.
pub const DEFAULT_K_MAX: usize = 50;

/// Finite-cluster sizes binned as `1..=k_max` plus a tail bin `> k_max`.
///
/// A censored cluster whose observed size already exceeds `k_max` belongs to
/// the tail bin regardless of what lies outside the window. A censored
/// cluster with observed size `≤ k_max` has no determinable bin; it is counted
/// in `undetermined` and left out of the bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterHistogram {
    pub k_max: usize,
    pub counts: Vec<u64>,
    pub tail: u64,
    pub undetermined: u64,
    pub censored: u64,
    pub collected: u64,
}

impl ClusterHistogram {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            counts: vec![0; k_max],
            tail: 0,
            undetermined: 0,
            censored: 0,
            collected: 0,
        }
    }

    pub fn add(&mut self, sample: ClusterSample) {
        self.collected += 1;
        self.censored += sample.censored as u64;
        let size = sample.size as usize;
        if size > self.k_max {
            self.tail += 1;
        } else if sample.censored {
            self.undetermined += 1;
        } else {
            self.counts[size - 1] += 1;
        }
    }

    pub fn extend<I: IntoIterator<Item = ClusterSample>>(&mut self, samples: I) {
        for s in samples {
            self.add(s);
        }
    }

    /// Associative, commutative merge of two histograms with equal `k_max`.
    pub fn merge(&mut self, other: &ClusterHistogram) {
        assert_eq!(self.k_max, other.k_max, "histograms must share k_max");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.tail += other.tail;
        self.undetermined += other.undetermined;
        self.censored += other.censored;
        self.collected += other.collected;
    }

    /// Binned counts `1..=k_max` followed by the tail.
    pub fn binned(&self) -> Vec<u64> {
        let mut out = self.counts.clone();
        out.push(self.tail);
        out
    }

    pub fn binned_total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.tail
    }

    pub fn undetermined_fraction(&self) -> f64 {
        self.undetermined as f64 / self.collected.max(1) as f64
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.collected.max(1) as f64
    }

    /// Chi-square/TV comparison with the `Bin(d, 1/d)` total-progeny law.
    pub fn compare_to_gw(&self, d: u32) -> Result<GofResult> {
        let reference = gw_total_progeny_pmf::<f64>(d, self.k_max).binned();
        goodness_of_fit(&self.binned(), &reference)
    }
}
