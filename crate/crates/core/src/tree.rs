//! Addressing for depth-`n` d-ary trees, either wired (all depth-`n` vertices
//! identified into one boundary vertex) or open truncation windows.
//!
//! Every non-boundary vertex, the root included, has exactly `d` children
//! edges. Edges are stored in level order: level `k` occupies the flat range
//! `offset(k) .. offset(k) + d^k`, and the children of edge `(k, i)` are
//! `(k + 1, i·d + j)` for `j < d`.

use crate::error::{GasError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeShape {
    d: u32,
    depth: u32,
    wired: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub level: u32,
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexRef {
    pub level: u32,
    pub index: u64,
}

impl EdgeRef {
    pub const fn new(level: u32, index: u64) -> Self {
        Self { level, index }
    }
}

impl VertexRef {
    pub const ROOT: VertexRef = VertexRef { level: 0, index: 0 };

    pub const fn new(level: u32, index: u64) -> Self {
        Self { level, index }
    }
}

impl TreeShape {
    /// Wired tree `T^w_{n,d}`.
    pub fn wired(d: u32, depth: u32) -> Result<Self> {
        Self::new(d, depth, true)
    }

    /// Finite window of the infinite d-ary tree, truncated below `depth`.
    pub fn window(d: u32, depth: u32) -> Result<Self> {
        Self::new(d, depth, false)
    }

    pub fn new(d: u32, depth: u32, wired: bool) -> Result<Self> {
        if d < 2 {
            return Err(GasError::InvalidBranching(d));
        }
        // Vertex ids go up to (d^{depth+1} - 1)/(d - 1); keep d^{depth+1} in u64.
        if (d as u64).checked_pow(depth + 1).is_none() {
            return Err(GasError::TooLarge { d, depth });
        }
        Ok(Self { d, depth, wired })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_wired(&self) -> bool {
        self.wired
    }

    /// Number of edges at level `k` (and of vertices at level `k` before wiring).
    pub fn level_width(&self, level: u32) -> u64 {
        (self.d as u64).pow(level)
    }

    /// `d·(d^n − 1)/(d − 1)`.
    pub fn edge_count(&self) -> u64 {
        let d = self.d as u64;
        d * (d.pow(self.depth) - 1) / (d - 1)
    }

    /// Flat index of the first edge of `level` (levels start at 1).
    pub fn edge_offset(&self, level: u32) -> u64 {
        debug_assert!(level >= 1);
        let d = self.d as u64;
        (d.pow(level) - d) / (d - 1)
    }

    /// Id of the first vertex of `level` in the unwired numbering.
    pub fn vertex_offset(&self, level: u32) -> u64 {
        let d = self.d as u64;
        (d.pow(level) - 1) / (d - 1)
    }

    pub fn contains(&self, e: EdgeRef) -> bool {
        e.level >= 1 && e.level <= self.depth && e.index < self.level_width(e.level)
    }

    fn check(&self, e: EdgeRef) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(GasError::InvalidEdge {
                level: e.level,
                index: e.index,
            })
        }
    }

    pub fn flat_index(&self, e: EdgeRef) -> Result<u64> {
        self.check(e)?;
        Ok(self.edge_offset(e.level) + e.index)
    }

    pub fn edge_at(&self, flat: u64) -> Result<EdgeRef> {
        if flat >= self.edge_count() {
            return Err(GasError::InvalidEdge {
                level: 0,
                index: flat,
            });
        }
        let mut level = 1;
        while flat >= self.edge_offset(level + 1) {
            level += 1;
        }
        Ok(EdgeRef::new(level, flat - self.edge_offset(level)))
    }

    /// Edges in flat-index order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        (1..=self.depth).flat_map(move |k| (0..self.level_width(k)).map(move |i| EdgeRef::new(k, i)))
    }

    pub fn parent_edge(&self, e: EdgeRef) -> Result<Option<EdgeRef>> {
        self.check(e)?;
        if e.level == 1 {
            return Ok(None);
        }
        Ok(Some(EdgeRef::new(e.level - 1, e.index / self.d as u64)))
    }

    pub fn children_edges(&self, e: EdgeRef) -> Result<Vec<EdgeRef>> {
        self.check(e)?;
        if e.level == self.depth {
            return Ok(Vec::new());
        }
        Ok(self.block_of(self.head(e)))
    }

    /// The other `d − 1` edges sharing `e`'s tail vertex. Root edges are grouped
    /// by the root's virtual parent.
    pub fn sibling_edges(&self, e: EdgeRef) -> Result<Vec<EdgeRef>> {
        self.check(e)?;
        let first = e.index - e.index % self.d as u64;
        Ok((first..first + self.d as u64)
            .filter(|&i| i != e.index)
            .map(|i| EdgeRef::new(e.level, i))
            .collect())
    }

    pub fn head_is_boundary(&self, e: EdgeRef) -> Result<bool> {
        if !self.wired {
            return Err(GasError::NotWired);
        }
        self.check(e)?;
        Ok(e.level == self.depth)
    }

    /// The `d` children edges of a non-leaf vertex.
    pub fn block_of(&self, v: VertexRef) -> Vec<EdgeRef> {
        let first = v.index * self.d as u64;
        (first..first + self.d as u64)
            .map(|i| EdgeRef::new(v.level + 1, i))
            .collect()
    }

    pub fn head(&self, e: EdgeRef) -> VertexRef {
        VertexRef::new(e.level, e.index)
    }

    pub fn tail(&self, e: EdgeRef) -> VertexRef {
        VertexRef::new(e.level - 1, e.index / self.d as u64)
    }

    /// True for vertices aliased to the wired boundary.
    pub fn is_boundary(&self, v: VertexRef) -> bool {
        self.wired && v.level == self.depth
    }

    /// Globally unique id of a vertex in the unwired level-order numbering.
    pub fn vertex_id(&self, v: VertexRef) -> u64 {
        self.vertex_offset(v.level) + v.index
    }

    /// Number of distinct vertices after wiring.
    pub fn vertex_count(&self) -> u64 {
        if self.wired {
            if self.depth == 0 {
                1
            } else {
                self.vertex_offset(self.depth) + 1
            }
        } else {
            self.vertex_offset(self.depth + 1)
        }
    }

    /// Dense key in `0..vertex_count()`; every boundary vertex maps to the
    /// same key (the last one). For `depth = 0` the root is its own boundary.
    pub fn vertex_key(&self, v: VertexRef) -> usize {
        if self.is_boundary(v) {
            (self.vertex_count() - 1) as usize
        } else {
            self.vertex_id(v) as usize
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(d: u32, n: u32) -> TreeShape {
        TreeShape::wired(d, n).unwrap()
    }

    #[test]
    fn edge_counts() {
        assert_eq!(shape(2, 1).edge_count(), 2);
        assert_eq!(shape(2, 3).edge_count(), 14);
        assert_eq!(shape(3, 2).edge_count(), 12);
        assert_eq!(shape(4, 0).edge_count(), 0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(TreeShape::wired(1, 3), Err(GasError::InvalidBranching(1)));
        assert!(matches!(TreeShape::wired(2, 64), Err(GasError::TooLarge { .. })));
        assert!(TreeShape::window(2, 62).is_ok());
    }

    #[test]
    fn parents() {
        assert_eq!(shape(2, 3).parent_edge(EdgeRef::new(1, 0)).unwrap(), None);
        assert_eq!(
            shape(3, 2).parent_edge(EdgeRef::new(2, 5)).unwrap(),
            Some(EdgeRef::new(1, 1))
        );
        assert_eq!(
            shape(2, 3).parent_edge(EdgeRef::new(3, 7)).unwrap(),
            Some(EdgeRef::new(2, 3))
        );
        assert!(shape(2, 2).parent_edge(EdgeRef::new(3, 0)).is_err());
        assert!(shape(2, 2).parent_edge(EdgeRef::new(2, 4)).is_err());
    }

    #[test]
    fn children() {
        assert_eq!(
            shape(2, 2).children_edges(EdgeRef::new(1, 0)).unwrap(),
            vec![EdgeRef::new(2, 0), EdgeRef::new(2, 1)]
        );
        assert!(shape(2, 2).children_edges(EdgeRef::new(2, 1)).unwrap().is_empty());
        assert_eq!(
            shape(3, 2).children_edges(EdgeRef::new(1, 2)).unwrap(),
            vec![EdgeRef::new(2, 6), EdgeRef::new(2, 7), EdgeRef::new(2, 8)]
        );
    }

    #[test]
    fn siblings() {
        assert_eq!(
            shape(2, 2).sibling_edges(EdgeRef::new(2, 0)).unwrap(),
            vec![EdgeRef::new(2, 1)]
        );
        assert_eq!(
            shape(3, 2).sibling_edges(EdgeRef::new(1, 1)).unwrap(),
            vec![EdgeRef::new(1, 0), EdgeRef::new(1, 2)]
        );
        assert_eq!(
            shape(2, 3).sibling_edges(EdgeRef::new(3, 5)).unwrap(),
            vec![EdgeRef::new(3, 4)]
        );
    }

    #[test]
    fn boundary_heads() {
        assert!(shape(2, 2).head_is_boundary(EdgeRef::new(2, 3)).unwrap());
        assert!(!shape(2, 2).head_is_boundary(EdgeRef::new(1, 0)).unwrap());
        assert!(shape(2, 1).head_is_boundary(EdgeRef::new(1, 1)).unwrap());
        let window = TreeShape::window(2, 2).unwrap();
        assert_eq!(window.head_is_boundary(EdgeRef::new(2, 0)), Err(GasError::NotWired));
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(shape(2, 0).vertex_count(), 1);
        assert_eq!(shape(2, 1).vertex_count(), 2);
        assert_eq!(shape(2, 2).vertex_count(), 4);
        assert_eq!(TreeShape::window(2, 2).unwrap().vertex_count(), 7);
        let s = shape(3, 2);
        assert_eq!(s.vertex_key(VertexRef::new(2, 8)), s.vertex_key(VertexRef::new(2, 0)));
    }

    proptest! {
        #[test]
        fn flat_index_round_trips(d in 2u32..5, n in 1u32..6, seed in any::<u64>()) {
            let s = shape(d, n);
            let flat = seed % s.edge_count();
            let e = s.edge_at(flat).unwrap();
            prop_assert_eq!(s.flat_index(e).unwrap(), flat);
        }

        #[test]
        fn family_relations(d in 2u32..5, n in 2u32..6, seed in any::<u64>()) {
            let s = shape(d, n);
            let e = s.edge_at(seed % s.edge_count()).unwrap();
            for c in s.children_edges(e).unwrap() {
                prop_assert_eq!(s.parent_edge(c).unwrap(), Some(e));
            }
            let sib = s.sibling_edges(e).unwrap();
            prop_assert_eq!(sib.len(), d as usize - 1);
            prop_assert!(!sib.contains(&e));
        }
    }

    #[test]
    fn edges_iterate_in_flat_order() {
        let s = shape(3, 3);
        for (flat, e) in s.edges().enumerate() {
            assert_eq!(s.flat_index(e).unwrap(), flat as u64);
        }
    }
}
