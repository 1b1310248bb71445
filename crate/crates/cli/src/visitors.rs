//! Streaming statistics, one accumulator per replica with an associative
//! merge.

use std::convert::Infallible;

use arboreal::sampler::{EdgeVisitor, Walk};
use arboreal::statistics::FiniteClusterCollector;
use arboreal::{EdgeRef, EdgeState, VertexRef};

fn breaks_one_endedness(parent: EdgeState, children: &[EdgeState]) -> bool {
    let spines = children.iter().filter(|&&s| s == EdgeState::Spine).count();
    match parent {
        EdgeState::Closed => spines > 1,
        EdgeState::Finite => spines != 0,
        EdgeState::Spine => spines != 1,
    }
}

/// Finite-cluster collection plus a violation count over the visited blocks.
pub struct ClusterVisitor {
    pub collector: FiniteClusterCollector,
    pub violations: u64,
}

impl EdgeVisitor for ClusterVisitor {
    type Error = Infallible;

    fn block(&mut self, vertex: VertexRef, parent: EdgeState, children: &[EdgeState]) -> Result<(), Infallible> {
        self.violations += breaks_one_endedness(parent, children) as u64;
        self.collector.block(vertex, parent, children)
    }

    fn enter(&mut self, edge: EdgeRef, state: EdgeState) -> Result<Walk, Infallible> {
        self.collector.enter(edge, state)
    }

    fn leave(&mut self, edge: EdgeRef, state: EdgeState) -> Result<(), Infallible> {
        self.collector.leave(edge, state)
    }
}

/// Samples only the root block.
#[derive(Default)]
pub struct RootVisitor {
    pub connected: bool,
}

impl EdgeVisitor for RootVisitor {
    type Error = Infallible;

    fn block(&mut self, vertex: VertexRef, _: EdgeState, children: &[EdgeState]) -> Result<(), Infallible> {
        if vertex.level == 0 {
            self.connected = children.contains(&EdgeState::Spine);
        }
        Ok(())
    }

    fn enter(&mut self, _: EdgeRef, _: EdgeState) -> Result<Walk, Infallible> {
        Ok(Walk::Skip)
    }
}

/// Edge tallies over whole blocks, including sibling pairs that are both
/// open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeTally {
    pub edges: u64,
    pub open: u64,
    pub spine: u64,
    pub sibling_pairs: u64,
    pub both_open: u64,
    pub violations: u64,
}

impl EdgeTally {
    pub fn merge(self, o: Self) -> Self {
        EdgeTally {
            edges: self.edges + o.edges,
            open: self.open + o.open,
            spine: self.spine + o.spine,
            sibling_pairs: self.sibling_pairs + o.sibling_pairs,
            both_open: self.both_open + o.both_open,
            violations: self.violations + o.violations,
        }
    }
}

impl EdgeVisitor for EdgeTally {
    type Error = Infallible;

    fn block(&mut self, _: VertexRef, parent: EdgeState, children: &[EdgeState]) -> Result<(), Infallible> {
        let d = children.len() as u64;
        let open = children.iter().filter(|s| s.is_open()).count() as u64;
        self.edges += d;
        self.open += open;
        self.spine += children.iter().filter(|&&s| s == EdgeState::Spine).count() as u64;
        self.sibling_pairs += d * (d - 1) / 2;
        self.both_open += open * open.saturating_sub(1) / 2;
        self.violations += breaks_one_endedness(parent, children) as u64;
        Ok(())
    }

    fn enter(&mut self, _: EdgeRef, _: EdgeState) -> Result<Walk, Infallible> {
        Ok(Walk::Descend)
    }
}
