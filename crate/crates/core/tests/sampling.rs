//! Statistical checks of the samplers against exact laws. Every run is
//! seeded, so each check is a deterministic pass/fail.

use std::collections::HashMap;
use std::convert::Infallible;

use arboreal::enumeration::{exact_measure, DEFAULT_ENUMERATION_CAP};
use arboreal::recursion::k_closed_form;
use arboreal::sampler::{phi_inverse, EdgeVisitor, Sampler, SamplerSpec, Walk};
use arboreal::statistics::{
    components, goodness_of_fit, gw_total_progeny_pmf, gw_total_progeny_pmf_convolution, one_ended_violations,
    root_reaches_boundary, spine_attachment_counts, survival_frequency, ClusterHistogram, FiniteClusterCollector,
};
use arboreal::{EdgeRef, EdgeState, ExactParams, FloatParams, Rational, Scalar, TreeShape, VertexRef};
use proptest::prelude::*;

fn spec(sampler: Sampler, master_seed: u64, replicas: u64) -> SamplerSpec {
    SamplerSpec {
        sampler,
        master_seed,
        replicas,
    }
}

#[test]
fn forest_law_matches_enumeration() {
    let shape = TreeShape::wired(2, 2).unwrap();
    let p = Rational::ratio(1, 2);
    let measure = exact_measure(shape, &p, DEFAULT_ENUMERATION_CAP).unwrap();
    let index: HashMap<String, usize> = measure.entries.iter().enumerate().map(|(i, e)| (e.0.bit_string(), i)).collect();
    let reference: Vec<f64> = measure.entries.iter().map(|e| Scalar::to_f64(&e.1)).collect();

    let sampler = Sampler::finite(shape, &ExactParams::new(2, p).unwrap()).unwrap();
    let mut counts = vec![0u64; reference.len()];
    for sc in spec(sampler, 11, 40_000).samples() {
        assert_eq!(one_ended_violations(&sc), 0);
        counts[index[&phi_inverse(&sc).unwrap().bit_string()]] += 1;
    }
    let gof = goodness_of_fit(&counts, &reference).unwrap();
    assert!(gof.tv_distance < 0.02, "{gof:?}");
    assert!(gof.p_value > 0.001, "{gof:?}");
}

#[test]
fn subcritical_window_is_bernoulli() {
    let sampler = Sampler::limit(8, &FloatParams::new(2, 0.4).unwrap()).unwrap();
    let (mut open, mut total) = (0u64, 0u64);
    for sc in spec(sampler, 1, 1_000).samples() {
        assert!(!sc.states().contains(&EdgeState::Spine));
        open += sc.states().iter().filter(|s| s.is_open()).count() as u64;
        total += sc.states().len() as u64;
    }
    let freq = open as f64 / total as f64;
    let se = (0.4 * 0.6 / total as f64).sqrt();
    assert!((freq - 0.4).abs() < 3.0 * se, "{freq}");
}

#[test]
fn spine_attachments_are_binomial() {
    for (d, p, depth) in [(2u32, 0.75, 12), (3, 0.6, 8)] {
        let sampler = Sampler::limit(depth, &FloatParams::new(d, p).unwrap()).unwrap();
        let mut hist = vec![0u64; d as usize];
        for sc in spec(sampler, 5, 2_000).samples() {
            for (h, c) in hist.iter_mut().zip(spine_attachment_counts(&sc)) {
                *h += c;
            }
        }
        let k = (d - 1) as i32;
        let a = 1.0 / d as f64;
        let reference: Vec<f64> = (0..=k)
            .map(|j| binom(k as u64, j as u64) * a.powi(j) * (1.0 - a).powi(k - j))
            .collect();
        let gof = goodness_of_fit(&hist, &reference).unwrap();
        assert!(gof.p_value > 0.001, "d={d} {gof:?}");
    }
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn survival_frequency_tracks_q() {
    let shape = TreeShape::wired(2, 2).unwrap();
    let sampler = Sampler::finite(shape, &ExactParams::new(2, Rational::ratio(1, 2)).unwrap()).unwrap();
    let (q, se) = survival_frequency(spec(sampler, 3, 100_000).samples().map(|sc| root_reaches_boundary(&sc))).unwrap();
    assert!((q - 0.5).abs() < 3.0 * se, "{q} ± {se}");

    let params = FloatParams::new(2, 0.75).unwrap();
    let q20 = 1.0 / (1.0 + k_closed_form(20, &params).unwrap());
    let sampler = Sampler::finite(TreeShape::wired(2, 20).unwrap(), &params).unwrap();
    let runs = spec(sampler, 4, 50_000);
    let (q, se) = survival_frequency((0..runs.replicas).map(|r| {
        let mut root = RootOnly(false);
        runs.sampler.stream(runs.replica_seed(r), &mut root).unwrap();
        root.0
    }))
    .unwrap();
    assert!((q - q20).abs() < 3.0 * se, "{q} vs {q20}");
}

/// Reads the root block and skips everything below it.
struct RootOnly(bool);

impl EdgeVisitor for RootOnly {
    type Error = Infallible;

    fn block(&mut self, v: VertexRef, _: EdgeState, children: &[EdgeState]) -> Result<(), Infallible> {
        if v.level == 0 {
            self.0 = children.contains(&EdgeState::Spine);
        }
        Ok(())
    }

    fn enter(&mut self, _: EdgeRef, _: EdgeState) -> Result<Walk, Infallible> {
        Ok(Walk::Skip)
    }
}

#[test]
fn gw_routes_agree_in_floating_point() {
    for d in 2..=4 {
        let closed = gw_total_progeny_pmf::<f64>(d, 30);
        let conv = gw_total_progeny_pmf_convolution::<f64>(d, 30);
        for k in 1..=30 {
            let (a, b) = (closed.prob(k), conv.prob(k));
            assert!((a - b).abs() <= 1e-12 * b.abs(), "d={d} k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn finite_clusters_follow_gw_law() {
    let depth = 24;
    let sampler = Sampler::limit(depth, &FloatParams::new(2, 0.75).unwrap()).unwrap();
    let mut hist = ClusterHistogram::new(20);
    for r in 0..400 {
        let mut collector = FiniteClusterCollector::new(depth, 3);
        sampler.stream(r, &mut collector).unwrap();
        hist.extend(collector.into_samples());
    }
    assert!(hist.undetermined_fraction() < 0.01);
    let gof = hist.compare_to_gw(2).unwrap();
    assert!(gof.p_value > 0.001, "{gof:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wired_samples_are_one_ended_forests(d in 2u32..4, depth in 1u32..6, p in 0.05f64..0.95, seed: u64) {
        let sampler = Sampler::finite(TreeShape::wired(d, depth).unwrap(), &FloatParams::new(d, p).unwrap()).unwrap();
        let sc = sampler.sample(seed);
        prop_assert_eq!(one_ended_violations(&sc), 0);
        let forest = phi_inverse(&sc).unwrap();
        let report = components(&forest).unwrap();
        let v = forest.shape().vertex_count() as usize;
        prop_assert_eq!(report.component_count(), v - forest.open_count());
        prop_assert_eq!(report.boundary_connected, root_reaches_boundary(&sc));
    }

    #[test]
    fn window_samples_are_one_ended(d in 2u32..4, depth in 1u32..7, p in 0.05f64..0.95, seed: u64) {
        let sc = Sampler::limit(depth, &FloatParams::new(d, p).unwrap()).unwrap().sample(seed);
        prop_assert_eq!(one_ended_violations(&sc), 0);
        prop_assert!(sc.is_valid());
    }
}
