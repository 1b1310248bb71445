//! Cluster decomposition of sampled configurations.

use std::convert::Infallible;

use crate::config::{EdgeState, ForestConfig, StateConfig};
use crate::enumeration::is_forest_wired;
use crate::error::{GasError, Result};
use crate::sampler::{EdgeVisitor, Walk};
use crate::tree::{EdgeRef, VertexRef};
use crate::union_find::UnionFind;

/// Component decomposition of a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterReport {
    /// Vertex counts, ordered by the smallest vertex key of each component
    /// (the root's component first). Isolated vertices are size-1 components.
    pub component_sizes: Vec<u64>,
    pub root_cluster_size: u64,
    /// Root and boundary share a component (wired shapes only).
    pub boundary_connected: bool,
    /// Per component: it contains a vertex on the last level of an open window.
    pub censored: Vec<bool>,
}

impl ClusterReport {
    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }
}

pub fn components(config: &ForestConfig) -> Result<ClusterReport> {
    let shape = config.shape();
    if shape.is_wired() && !is_forest_wired(config)? {
        return Err(GasError::NotAForest);
    }
    let n_vertices = shape.vertex_count() as usize;
    let mut uf = UnionFind::new(n_vertices);
    for (e, &open) in shape.edges().zip(config.bits()) {
        if open {
            uf.union(shape.vertex_key(shape.tail(e)), shape.vertex_key(shape.head(e)));
        }
    }
    let mut slot = vec![usize::MAX; n_vertices];
    let mut sizes = Vec::new();
    let mut censored = Vec::new();
    for v in 0..n_vertices {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = sizes.len();
            sizes.push(0u64);
            censored.push(false);
        }
        sizes[slot[r]] += 1;
    }
    if !shape.is_wired() {
        let last = shape.depth();
        for index in 0..shape.level_width(last) {
            let key = shape.vertex_key(VertexRef::new(last, index));
            let r = uf.find(key);
            censored[slot[r]] = true;
        }
    }
    let root = uf.find(0);
    let boundary_connected = shape.is_wired() && root == uf.find(n_vertices - 1);
    Ok(ClusterReport {
        root_cluster_size: sizes[slot[root]],
        component_sizes: sizes,
        boundary_connected,
        censored,
    })
}

/// Size of one finite cluster hanging from a collection site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterSample {
    pub size: u64,
    /// The cluster reaches the last level of the window, so `size` is only a
    /// lower bound.
    pub censored: bool,
}

/// Finite clusters at every collection site: a vertex whose parent edge is
/// `0'` (the root's virtual parent counts) and none of whose children edges is
/// `2'`. The cluster is the site plus everything reachable through `1'`
/// descendants. Sites on the last level of the shape have no sampled block
/// and are skipped.
pub fn finite_cluster_samples(sc: &StateConfig) -> Vec<ClusterSample> {
    finite_cluster_samples_up_to(sc, u32::MAX)
}

/// As [`finite_cluster_samples`], restricted to sites at level `≤ max_site_level`.
pub fn finite_cluster_samples_up_to(sc: &StateConfig, max_site_level: u32) -> Vec<ClusterSample> {
    let shape = sc.shape();
    let depth = shape.depth();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for level in 0..depth.min(max_site_level.saturating_add(1)) {
        for index in 0..shape.level_width(level) {
            let site = VertexRef::new(level, index);
            if sc.parent_state(site) != EdgeState::Closed || sc.block(site).contains(&EdgeState::Spine) {
                continue;
            }
            let mut sample = ClusterSample { size: 1, censored: false };
            stack.push(site);
            while let Some(v) = stack.pop() {
                if v.level == depth {
                    sample.censored |= !shape.is_wired();
                    continue;
                }
                for (j, &s) in sc.block(v).iter().enumerate() {
                    if s == EdgeState::Finite {
                        sample.size += 1;
                        stack.push(VertexRef::new(v.level + 1, v.index * shape.d() as u64 + j as u64));
                    }
                }
            }
            out.push(sample);
        }
    }
    out
}

/// Streaming counterpart of [`finite_cluster_samples_up_to`]. Subtrees that
/// can neither hold a site nor extend an open cluster are skipped, so deep
/// windows cost roughly the size of the clusters collected.
#[derive(Debug, Clone)]
pub struct FiniteClusterCollector {
    depth: u32,
    max_site_level: u32,
    active: Vec<Option<usize>>,
    pub clusters: Vec<ClusterSample>,
}

impl FiniteClusterCollector {
    pub fn new(depth: u32, max_site_level: u32) -> Self {
        Self {
            depth,
            max_site_level,
            active: vec![None; depth as usize + 1],
            clusters: Vec::new(),
        }
    }

    /// Collects at every site of the window.
    pub fn full(depth: u32) -> Self {
        Self::new(depth, depth.saturating_sub(1))
    }

    pub fn into_samples(self) -> Vec<ClusterSample> {
        self.clusters
    }
}

impl EdgeVisitor for FiniteClusterCollector {
    type Error = Infallible;

    fn block(&mut self, vertex: VertexRef, parent: EdgeState, children: &[EdgeState]) -> std::result::Result<(), Infallible> {
        if vertex.level == 0 {
            // A collector may be reused across replicas.
            self.active[0] = None;
        }
        if parent == EdgeState::Closed && vertex.level <= self.max_site_level && !children.contains(&EdgeState::Spine) {
            self.active[vertex.level as usize] = Some(self.clusters.len());
            self.clusters.push(ClusterSample { size: 1, censored: false });
        }
        Ok(())
    }

    fn enter(&mut self, edge: EdgeRef, state: EdgeState) -> std::result::Result<Walk, Infallible> {
        let k = edge.level as usize;
        let cluster = if state == EdgeState::Finite { self.active[k - 1] } else { None };
        self.active[k] = cluster;
        if let Some(id) = cluster {
            let sample = &mut self.clusters[id];
            sample.size += 1;
            if edge.level == self.depth {
                sample.censored = true;
            }
        }
        Ok(if cluster.is_some() || edge.level <= self.max_site_level {
            Walk::Descend
        } else {
            Walk::Skip
        })
    }
}

/// Number of `2'` edges whose head has a sampled block (not on the wired
/// boundary, not on the last window level) without exactly one `2'` child.
pub fn one_ended_violations(sc: &StateConfig) -> usize {
    let shape = sc.shape();
    (0..shape.depth())
        .flat_map(|level| (0..shape.level_width(level)).map(move |i| VertexRef::new(level, i)))
        .filter(|&v| v.level > 0 && sc.parent_state(v) == EdgeState::Spine)
        .filter(|&v| sc.block(v).iter().filter(|&&s| s == EdgeState::Spine).count() != 1)
        .count()
}

/// Histogram over `0..d` of the number of `1'` edges among the `d − 1`
/// non-spine children of every spine vertex (head of a `2'` edge with a
/// sampled block).
pub fn spine_attachment_counts(sc: &StateConfig) -> Vec<u64> {
    let shape = sc.shape();
    let mut hist = vec![0u64; shape.d() as usize];
    for level in 1..shape.depth() {
        for index in 0..shape.level_width(level) {
            let v = VertexRef::new(level, index);
            if sc.parent_state(v) == EdgeState::Spine {
                let ones = sc.block(v).iter().filter(|&&s| s == EdgeState::Finite).count();
                let last = hist.len() - 1;
                hist[ones.min(last)] += 1;
            }
        }
    }
    hist
}

/// Whether the root reaches the boundary in a wired state configuration.
pub fn root_reaches_boundary(sc: &StateConfig) -> bool {
    let shape = sc.shape();
    shape.depth() == 0 || sc.block(VertexRef::ROOT).contains(&EdgeState::Spine)
}

/// Fraction of samples with the root joined to the boundary, with its
/// binomial standard error.
pub fn survival_frequency<I: IntoIterator<Item = bool>>(connected: I) -> Result<(f64, f64)> {
    let (mut hits, mut total) = (0u64, 0u64);
    for c in connected {
        hits += c as u64;
        total += 1;
    }
    if total == 0 {
        return Err(GasError::EmptyInput);
    }
    let q = hits as f64 / total as f64;
    Ok((q, (q * (1.0 - q) / total as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::GasParams;
    use crate::sampler::Sampler;
    use crate::tree::TreeShape;

    #[test]
    fn component_examples() {
        let s = TreeShape::wired(2, 2).unwrap();
        let report = components(&ForestConfig::all_closed(s)).unwrap();
        assert_eq!(report.component_sizes, vec![1, 1, 1, 1]);
        assert!(!report.boundary_connected);

        let s1 = TreeShape::wired(2, 1).unwrap();
        let report = components(&ForestConfig::from_open_set(s1, &[EdgeRef::new(1, 0)]).unwrap()).unwrap();
        assert_eq!(report.root_cluster_size, 2);
        assert!(report.boundary_connected);

        let report =
            components(&ForestConfig::from_open_set(s, &[EdgeRef::new(1, 0), EdgeRef::new(2, 0)]).unwrap()).unwrap();
        assert_eq!(report.root_cluster_size, 3);
        assert!(report.boundary_connected);

        assert_eq!(components(&ForestConfig::from_mask(s1, 0b11)), Err(GasError::NotAForest));
    }

    #[test]
    fn window_components_are_censored_at_the_edge() {
        let w = TreeShape::window(2, 2).unwrap();
        let report = components(&ForestConfig::from_open_set(w, &[EdgeRef::new(1, 0)]).unwrap()).unwrap();
        assert_eq!(report.component_sizes.iter().sum::<u64>(), 7);
        assert_eq!(report.root_cluster_size, 2);
        assert!(!report.censored[0]);
        assert_eq!(report.censored.iter().filter(|&&c| c).count(), 4);
    }

    #[test]
    fn euler_relation_on_samples() {
        let sampler = Sampler::finite(TreeShape::wired(3, 5).unwrap(), &GasParams::new(3, 0.7).unwrap()).unwrap();
        for seed in 0..20 {
            let forest = sampler.sample(seed).decode_unchecked();
            let report = components(&forest).unwrap();
            let v = forest.shape().vertex_count() as usize;
            assert_eq!(report.component_count(), v - forest.open_count());
            assert_eq!(report.component_sizes.iter().sum::<u64>(), v as u64);
        }
    }

    #[test]
    fn one_ended_counting() {
        use EdgeState::*;
        let w = TreeShape::window(2, 3).unwrap();
        let mut states = vec![Closed; 14];
        states[0] = Spine; // (1,0)
        states[2] = Spine; // (2,0)
        states[3] = Spine; // (2,1): two spine children under (1,0)
        let sc = StateConfig::new(w, states).unwrap();
        // (1,0) has two spine children; (2,0) and (2,1) have none.
        assert_eq!(one_ended_violations(&sc), 3);
        assert_eq!(one_ended_violations(&StateConfig::all_closed(w)), 0);

        let mut states = vec![Closed; 14];
        states[0] = Spine;
        states[2] = Spine;
        states[3] = Spine;
        states[6] = Spine; // (3,0) under (2,0)
        states[8] = Spine; // (3,2) under (2,1)
        let sc = StateConfig::new(w, states).unwrap();
        assert_eq!(one_ended_violations(&sc), 1);
    }

    #[test]
    fn subcritical_collects_every_site() {
        let sampler = Sampler::limit(6, &GasParams::new(2, 0.4).unwrap()).unwrap();
        let sc = sampler.sample(9);
        let sites = (0..6u32)
            .flat_map(|l| (0..1u64 << l).map(move |i| VertexRef::new(l, i)))
            .filter(|&v| sc.parent_state(v) == EdgeState::Closed)
            .count();
        assert_eq!(finite_cluster_samples(&sc).len(), sites);
    }

    #[test]
    fn streaming_collector_matches_materialized() {
        let sampler = Sampler::limit(10, &GasParams::new(2, 0.75).unwrap()).unwrap();
        for seed in 0..30 {
            let mut stream = FiniteClusterCollector::full(10);
            sampler.stream(seed, &mut stream).unwrap();
            let mut a = stream.into_samples();
            let mut b = finite_cluster_samples(&sampler.sample(seed));
            a.sort();
            b.sort();
            assert_eq!(a, b);

            let mut partial = FiniteClusterCollector::new(10, 3);
            sampler.stream(seed, &mut partial).unwrap();
            let mut a = partial.into_samples();
            let mut b = finite_cluster_samples_up_to(&sampler.sample(seed), 3);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn collector_reuse_matches_fresh_collectors() {
        let sampler = Sampler::limit(8, &GasParams::new(2, 0.75).unwrap()).unwrap();
        let mut shared = FiniteClusterCollector::full(8);
        let mut fresh = Vec::new();
        for seed in 0..40 {
            sampler.stream(seed, &mut shared).unwrap();
            fresh.extend(finite_cluster_samples(&sampler.sample(seed)));
        }
        let mut a = shared.into_samples();
        a.sort();
        fresh.sort();
        assert_eq!(a, fresh);
    }

    #[test]
    fn survival_frequency_edge_cases() {
        assert_eq!(survival_frequency(Vec::<bool>::new()), Err(GasError::EmptyInput));
        let s0 = TreeShape::wired(2, 0).unwrap();
        assert!(root_reaches_boundary(&StateConfig::all_closed(s0)));
        assert_eq!(survival_frequency([true, true]).unwrap(), (1.0, 0.0));
    }
}
