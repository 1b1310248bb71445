//! Brute-force ground truth on small wired trees: every edge subset is
//! visited, non-forests are pruned, and partition functions, the exact
//! measure and its three-state image are accumulated in rational arithmetic.

use num_traits::Zero;

use crate::config::{EdgeState, ForestConfig, StateConfig};
use crate::error::{GasError, Result};
use crate::recursion::PartitionTriple;
use crate::scalar::{complement, is_unit_interval_open_right, Scalar};
use crate::tree::TreeShape;
use crate::Rational;

/// Default limit on the number of edges (i.e. `2^24` subsets).
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Largest cap accepted; forests are tracked as `u64` masks.
pub const MAX_ENUMERATION_CAP: u32 = 63;

/// Union-find without path compression so unions can be undone in LIFO order.
#[derive(Debug, Clone)]
struct RollbackUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
}

impl RollbackUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` (and records a no-op) if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((ra, rb)));
        true
    }

    fn rollback(&mut self) {
        if let Some(Some((ra, rb))) = self.history.pop() {
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }
}

fn endpoints(shape: &TreeShape) -> Vec<(usize, usize)> {
    shape
        .edges()
        .map(|e| (shape.vertex_key(shape.tail(e)), shape.vertex_key(shape.head(e))))
        .collect()
}

/// True iff the open edges contain no cycle once the depth-`n` vertices of a
/// wired shape are merged (two open edges into the boundary from the same
/// vertex count as a cycle). Open windows are trees, so every subset passes.
pub fn is_forest_wired(config: &ForestConfig) -> Result<bool> {
    let shape = config.shape();
    let mut uf = RollbackUnionFind::new(shape.vertex_count() as usize);
    for ((a, b), &open) in endpoints(&shape).into_iter().zip(config.bits()) {
        if open && !uf.union(a, b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `p^{#open}·(1 − p)^{#closed}`.
pub fn config_weight(config: &ForestConfig, p: &Rational) -> Result<Rational> {
    check_p(p)?;
    let open = config.open_count() as u32;
    let closed = config.bits().len() as u32 - open;
    Ok(p.powu(open) * complement(p).powu(closed))
}

fn check_p(p: &Rational) -> Result<()> {
    if is_unit_interval_open_right(p) {
        Ok(())
    } else {
        Err(GasError::ProbabilityOutOfRange(p.to_string()))
    }
}

/// One forest found by the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumeratedForest {
    /// Bit `i` set iff the edge with flat index `i` is open.
    pub mask: u64,
    pub open: u32,
    pub root_connected: bool,
}

/// All forests of a wired shape, in ascending mask order.
#[derive(Debug, Clone)]
pub struct ForestEnumeration {
    shape: TreeShape,
    forests: Vec<EnumeratedForest>,
}

impl ForestEnumeration {
    pub fn new(shape: TreeShape, cap: u32) -> Result<Self> {
        if !shape.is_wired() {
            return Err(GasError::NotWired);
        }
        let edges = shape.edge_count();
        let cap = cap.min(MAX_ENUMERATION_CAP);
        if edges > cap as u64 {
            return Err(GasError::EnumerationCap { edges, cap });
        }
        let ends = endpoints(&shape);
        let root = shape.vertex_key(crate::tree::VertexRef::ROOT);
        let boundary = shape.vertex_count() as usize - 1;
        let mut walk = Walk {
            ends: &ends,
            uf: RollbackUnionFind::new(shape.vertex_count() as usize),
            forests: Vec::new(),
            root,
            boundary,
        };
        walk.descend(ends.len(), 0, 0);
        Ok(Self {
            shape,
            forests: walk.forests,
        })
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn forests(&self) -> &[EnumeratedForest] {
        &self.forests
    }

    pub fn config(&self, forest: &EnumeratedForest) -> ForestConfig {
        ForestConfig::from_mask(self.shape, forest.mask)
    }

    /// Forest weights summed by open-edge count, split by root connection.
    pub fn partitions(&self, p: &Rational) -> Result<PartitionTriple<Rational>> {
        check_p(p)?;
        let edges = self.shape.edge_count() as usize;
        let mut connected = vec![0u64; edges + 1];
        let mut rest = vec![0u64; edges + 1];
        for f in &self.forests {
            if f.root_connected {
                connected[f.open as usize] += 1;
            } else {
                rest[f.open as usize] += 1;
            }
        }
        let weigh = |counts: &[u64]| -> Rational {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| Rational::from_count(c) * p.powu(k as u32) * complement(p).powu((edges - k) as u32))
                .fold(Rational::zero(), |acc, x| acc + x)
        };
        Ok(PartitionTriple::from_parts(weigh(&connected), weigh(&rest)))
    }
}

struct Walk<'a> {
    ends: &'a [(usize, usize)],
    uf: RollbackUnionFind,
    forests: Vec<EnumeratedForest>,
    root: usize,
    boundary: usize,
}

impl Walk<'_> {
    /// Decides edges `remaining − 1` down to `0`, closed before open, so masks
    /// come out in ascending numeric order.
    fn descend(&mut self, remaining: usize, mask: u64, open: u32) {
        if remaining == 0 {
            let root_connected = self.uf.find(self.root) == self.uf.find(self.boundary);
            self.forests.push(EnumeratedForest {
                mask,
                open,
                root_connected,
            });
            return;
        }
        let i = remaining - 1;
        self.descend(i, mask, open);
        let (a, b) = self.ends[i];
        if self.uf.union(a, b) {
            self.descend(i, mask | 1 << i, open + 1);
        }
        self.uf.rollback();
    }
}

pub fn enumerate_partitions(shape: TreeShape, p: &Rational, cap: u32) -> Result<PartitionTriple<Rational>> {
    check_p(p)?;
    ForestEnumeration::new(shape, cap)?.partitions(p)
}

/// Every forest with its exact probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMeasure {
    pub entries: Vec<(ForestConfig, Rational)>,
}

impl ExactMeasure {
    pub fn total(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn probability_of(&self, config: &ForestConfig) -> Rational {
        self.entries
            .iter()
            .find(|(c, _)| c == config)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(Rational::zero)
    }
}

pub fn exact_measure(shape: TreeShape, p: &Rational, cap: u32) -> Result<ExactMeasure> {
    check_p(p)?;
    let enumeration = ForestEnumeration::new(shape, cap)?;
    let z = enumeration.partitions(p)?.z;
    let entries = enumeration
        .forests()
        .iter()
        .map(|f| {
            let config = enumeration.config(f);
            let w = config_weight(&config, p)? / &z;
            Ok((config, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactMeasure { entries })
}

/// `Z^S / Z`; equals one for depth zero.
pub fn root_connection_probability(shape: TreeShape, p: &Rational, cap: u32) -> Result<Rational> {
    Ok(enumerate_partitions(shape, p, cap)?.root_connection())
}

/// Three-state encoding of a forest: closed edges become `0'`; an open edge
/// becomes `2'` when its head reaches the boundary through open edges of its
/// own descendant subtree, and `1'` otherwise.
pub fn apply_phi(config: &ForestConfig) -> Result<StateConfig> {
    let shape = config.shape();
    if !shape.is_wired() {
        return Err(GasError::NotWired);
    }
    if !is_forest_wired(config)? {
        return Err(GasError::NotAForest);
    }
    let n = shape.depth();
    let bits = config.bits();
    let mut states = vec![EdgeState::Closed; bits.len()];
    if n == 0 {
        return StateConfig::new(shape, states);
    }
    // reaches[v] for the vertices of the level below the one being processed.
    let mut reaches_below = vec![true; shape.level_width(n) as usize];
    for level in (1..=n).rev() {
        let offset = shape.edge_offset(level) as usize;
        let width = shape.level_width(level) as usize;
        let d = shape.d() as usize;
        let mut reaches_here = vec![false; width / d];
        for i in 0..width {
            if bits[offset + i] {
                let reach = reaches_below[i];
                states[offset + i] = if reach { EdgeState::Spine } else { EdgeState::Finite };
                if reach {
                    reaches_here[i / d] = true;
                }
            }
        }
        reaches_below = reaches_here;
    }
    StateConfig::new(shape, states)
}

/// The exact measure pushed through [`apply_phi`].
pub fn exact_state_measure(shape: TreeShape, p: &Rational, cap: u32) -> Result<Vec<(StateConfig, Rational)>> {
    exact_measure(shape, p, cap)?
        .entries
        .into_iter()
        .map(|(config, w)| Ok((apply_phi(&config)?, w)))
        .collect()
}

/// Convenience: probability of the single forest with no open edge.
pub fn empty_forest_probability(shape: TreeShape, p: &Rational, cap: u32) -> Result<Rational> {
    let z = enumerate_partitions(shape, p, cap)?.z;
    Ok(complement(p).powu(shape.edge_count() as u32) / z)
}
