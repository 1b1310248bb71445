use std::convert::Infallible;

use super::{block_rng, sample_block, Sampler};
use crate::config::EdgeState;
use crate::tree::{EdgeRef, VertexRef};

/// Whether the streamer should generate the subtree below an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Walk {
    Descend,
    Skip,
}

/// Callbacks of the depth-first streamer.
///
/// For every vertex whose block is generated, [`block`](Self::block) is called
/// once with the freshly drawn child states; then each child edge is passed to
/// [`enter`](Self::enter) and, once its subtree is finished or skipped, to
/// [`leave`](Self::leave). Skipped subtrees are never sampled.
pub trait EdgeVisitor {
    type Error;

    fn block(&mut self, _vertex: VertexRef, _parent: EdgeState, _children: &[EdgeState]) -> Result<(), Self::Error> {
        Ok(())
    }

    fn enter(&mut self, edge: EdgeRef, state: EdgeState) -> Result<Walk, Self::Error>;

    fn leave(&mut self, _edge: EdgeRef, _state: EdgeState) -> Result<(), Self::Error> {
        Ok(())
    }
}

struct Frame {
    vertex: VertexRef,
    cursor: usize,
}

/// Depth-first generation of one replica. Memory is `O(d·depth)`: one block
/// of child states per level of the current path.
pub fn stream_sample<V: EdgeVisitor>(sampler: &Sampler, replica_seed: u64, visitor: &mut V) -> Result<(), V::Error> {
    let shape = sampler.shape();
    let depth = shape.depth();
    if depth == 0 {
        return Ok(());
    }
    let d = shape.d() as usize;
    let mut blocks = vec![EdgeState::Closed; depth as usize * d];
    let mut stack: Vec<Frame> = Vec::with_capacity(depth as usize);

    let root = VertexRef::ROOT;
    let mut rng = block_rng(replica_seed, shape.vertex_id(root));
    sample_block(&mut rng, EdgeState::Closed, sampler.kernel_for(root), &mut blocks[..d]);
    visitor.block(root, EdgeState::Closed, &blocks[..d])?;
    stack.push(Frame { vertex: root, cursor: 0 });

    while let Some(top) = stack.last_mut() {
        let level = top.vertex.level as usize;
        if top.cursor == d {
            let v = top.vertex;
            stack.pop();
            if level > 0 {
                let state = blocks[(level - 1) * d + (v.index % d as u64) as usize];
                visitor.leave(EdgeRef::new(v.level, v.index), state)?;
            }
            continue;
        }
        let j = top.cursor;
        top.cursor += 1;
        let index = top.vertex.index * d as u64 + j as u64;
        let edge = EdgeRef::new(level as u32 + 1, index);
        let state = blocks[level * d + j];
        let walk = visitor.enter(edge, state)?;
        if walk == Walk::Descend && edge.level < depth {
            let head = VertexRef::new(edge.level, index);
            let mut rng = block_rng(replica_seed, shape.vertex_id(head));
            let (above, below) = blocks.split_at_mut((level + 1) * d);
            debug_assert_eq!(above[level * d + j], state);
            let block = &mut below[..d];
            sample_block(&mut rng, state, sampler.kernel_for(head), block);
            visitor.block(head, state, block)?;
            stack.push(Frame { vertex: head, cursor: 0 });
        } else {
            visitor.leave(edge, state)?;
        }
    }
    Ok(())
}

/// Tallies edges by state and counts one-endedness violations: blocks below a
/// `2'` edge without exactly one `2'` child, or below a `1'` edge with any.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountingVisitor {
    pub edges: u64,
    pub open: u64,
    pub spine: u64,
    pub one_ended_violations: u64,
}

impl EdgeVisitor for CountingVisitor {
    type Error = Infallible;

    fn block(&mut self, _vertex: VertexRef, parent: EdgeState, children: &[EdgeState]) -> Result<(), Infallible> {
        let spines = children.iter().filter(|&&s| s == EdgeState::Spine).count();
        let broken = match parent {
            EdgeState::Spine => spines != 1,
            EdgeState::Finite => spines != 0,
            EdgeState::Closed => spines > 1,
        };
        self.one_ended_violations += broken as u64;
        Ok(())
    }

    fn enter(&mut self, _edge: EdgeRef, state: EdgeState) -> Result<Walk, Infallible> {
        self.edges += 1;
        self.open += state.is_open() as u64;
        self.spine += (state == EdgeState::Spine) as u64;
        Ok(Walk::Descend)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::GasParams;
    use crate::tree::TreeShape;

    /// Records every visited edge with its state.
    struct Recorder(Vec<(EdgeRef, EdgeState)>);

    impl EdgeVisitor for Recorder {
        type Error = Infallible;
        fn enter(&mut self, edge: EdgeRef, state: EdgeState) -> Result<Walk, Infallible> {
            self.0.push((edge, state));
            Ok(Walk::Descend)
        }
    }

    #[test]
    fn counts_every_edge() {
        let sampler = Sampler::limit(6, &GasParams::new(3, 0.5).unwrap()).unwrap();
        let mut counter = CountingVisitor::default();
        sampler.stream(3, &mut counter).unwrap();
        assert_eq!(counter.edges, TreeShape::window(3, 6).unwrap().edge_count());
        assert_eq!(counter.one_ended_violations, 0);
    }

    #[test]
    fn stream_matches_array_sampler() {
        for sampler in [
            Sampler::limit(7, &GasParams::new(2, 0.75).unwrap()).unwrap(),
            Sampler::finite(TreeShape::wired(3, 4).unwrap(), &GasParams::new(3, 0.6).unwrap()).unwrap(),
        ] {
            for seed in 0..10 {
                let array = sampler.sample(seed);
                let mut rec = Recorder(Vec::new());
                sampler.stream(seed, &mut rec).unwrap();
                assert_eq!(rec.0.len(), array.states().len());
                for (edge, state) in rec.0 {
                    assert_eq!(array.get(edge).unwrap(), state);
                }
            }
        }
    }

    #[test]
    fn skipping_prunes_subtrees() {
        struct TopOnly(u64);
        impl EdgeVisitor for TopOnly {
            type Error = Infallible;
            fn enter(&mut self, edge: EdgeRef, _: EdgeState) -> Result<Walk, Infallible> {
                self.0 += 1;
                Ok(if edge.level < 2 { Walk::Descend } else { Walk::Skip })
            }
        }
        let sampler = Sampler::limit(20, &GasParams::new(2, 0.75).unwrap()).unwrap();
        let mut v = TopOnly(0);
        sampler.stream(1, &mut v).unwrap();
        assert_eq!(v.0, 2 + 4);
    }

    #[test]
    fn visitor_errors_propagate() {
        struct Fails;
        impl EdgeVisitor for Fails {
            type Error = &'static str;
            fn enter(&mut self, edge: EdgeRef, _: EdgeState) -> Result<Walk, &'static str> {
                if edge.level == 3 {
                    Err("stop")
                } else {
                    Ok(Walk::Descend)
                }
            }
        }
        let sampler = Sampler::limit(5, &GasParams::new(2, 0.5).unwrap()).unwrap();
        assert_eq!(sampler.stream(0, &mut Fails), Err("stop"));
    }
}
