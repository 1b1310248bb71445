//! Per-edge configurations: open/closed forests and their three-state
//! hidden-Markov encoding. Both are stored in flat (level-order) edge order.

use std::fmt;

use crate::error::{GasError, Result};
use crate::tree::{EdgeRef, TreeShape, VertexRef};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ForestConfig {
    shape: TreeShape,
    open: Vec<bool>,
}

impl ForestConfig {
    pub fn new(shape: TreeShape, open: Vec<bool>) -> Result<Self> {
        if open.len() as u64 != shape.edge_count() {
            return Err(GasError::LengthMismatch {
                expected: shape.edge_count(),
                got: open.len(),
            });
        }
        Ok(Self { shape, open })
    }

    pub fn all_closed(shape: TreeShape) -> Self {
        Self {
            shape,
            open: vec![false; shape.edge_count() as usize],
        }
    }

    pub fn from_open_set(shape: TreeShape, open_edges: &[EdgeRef]) -> Result<Self> {
        let mut config = Self::all_closed(shape);
        for &e in open_edges {
            let flat = shape.flat_index(e)?;
            config.open[flat as usize] = true;
        }
        Ok(config)
    }

    /// Bit `i` of `mask` opens the edge with flat index `i`.
    pub fn from_mask(shape: TreeShape, mask: u64) -> Self {
        let open = (0..shape.edge_count()).map(|i| mask >> i & 1 == 1).collect();
        Self { shape, open }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn bits(&self) -> &[bool] {
        &self.open
    }

    pub fn is_open(&self, e: EdgeRef) -> Result<bool> {
        Ok(self.open[self.shape.flat_index(e)? as usize])
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    /// `'1'` for open, `'0'` for closed, in flat order.
    pub fn bit_string(&self) -> String {
        self.open.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(shape: TreeShape, s: &str) -> Result<Self> {
        let open = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(GasError::InvalidStateConfig),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(shape, open)
    }
}

/// Hidden state of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum EdgeState {
    /// `0'`: closed.
    #[default]
    Closed,
    /// `1'`: open, and the head does not reach the boundary through its own
    /// descendants.
    Finite,
    /// `2'`: open, and the head reaches the boundary through its descendants.
    Spine,
}

impl EdgeState {
    pub const ALL: [EdgeState; 3] = [EdgeState::Closed, EdgeState::Finite, EdgeState::Spine];

    pub fn is_open(self) -> bool {
        self != EdgeState::Closed
    }

    /// 2-bit code: `00 = 0'`, `01 = 1'`, `10 = 2'`.
    pub fn code(self) -> u8 {
        match self {
            EdgeState::Closed => 0,
            EdgeState::Finite => 1,
            EdgeState::Spine => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(EdgeState::Closed),
            1 => Some(EdgeState::Finite),
            2 => Some(EdgeState::Spine),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'", self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateConfig {
    shape: TreeShape,
    states: Vec<EdgeState>,
}

impl StateConfig {
    pub fn new(shape: TreeShape, states: Vec<EdgeState>) -> Result<Self> {
        if states.len() as u64 != shape.edge_count() {
            return Err(GasError::LengthMismatch {
                expected: shape.edge_count(),
                got: states.len(),
            });
        }
        Ok(Self { shape, states })
    }

    pub fn all_closed(shape: TreeShape) -> Self {
        Self {
            shape,
            states: vec![EdgeState::Closed; shape.edge_count() as usize],
        }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn states(&self) -> &[EdgeState] {
        &self.states
    }

    pub fn into_states(self) -> Vec<EdgeState> {
        self.states
    }

    pub fn get(&self, e: EdgeRef) -> Result<EdgeState> {
        Ok(self.states[self.shape.flat_index(e)? as usize])
    }

    /// States of the `d` children edges of `v`; `v` must not be a leaf.
    pub fn block(&self, v: VertexRef) -> &[EdgeState] {
        let d = self.shape.d() as usize;
        let start = (self.shape.edge_offset(v.level + 1) + v.index * d as u64) as usize;
        &self.states[start..start + d]
    }

    /// State of the edge entering `v`; the root's virtual parent is `0'`.
    pub fn parent_state(&self, v: VertexRef) -> EdgeState {
        if v.level == 0 {
            EdgeState::Closed
        } else {
            self.states[(self.shape.edge_offset(v.level) + v.index) as usize]
        }
    }

    /// Checks the structural constraints every encoded forest satisfies.
    pub fn validate(&self) -> Result<()> {
        let shape = self.shape;
        let n = shape.depth();
        if shape.is_wired() && n >= 1 {
            let start = shape.edge_offset(n) as usize;
            if self.states[start..].contains(&EdgeState::Finite) {
                return Err(GasError::InvalidStateConfig);
            }
        }
        for level in 0..n {
            for index in 0..shape.level_width(level) {
                let v = VertexRef::new(level, index);
                let parent = self.parent_state(v);
                let block = self.block(v);
                let spines = block.iter().filter(|&&s| s == EdgeState::Spine).count();
                let ok = match parent {
                    EdgeState::Closed => spines <= 1,
                    EdgeState::Finite => spines == 0,
                    EdgeState::Spine => spines == 1,
                };
                if !ok {
                    return Err(GasError::InvalidStateConfig);
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Edge-local decoding `1', 2' ↦ open`, `0' ↦ closed`, without validation.
    pub fn decode_unchecked(&self) -> ForestConfig {
        ForestConfig {
            shape: self.shape,
            open: self.states.iter().map(|s| s.is_open()).collect(),
        }
    }

    /// 2-bit packing, four states per byte, first edge in the low bits.
    pub fn pack(&self) -> Vec<u8> {
        pack_states(&self.states)
    }

    pub fn unpack(shape: TreeShape, bytes: &[u8]) -> Result<Self> {
        let states = unpack_states(bytes, shape.edge_count() as usize)?;
        Self::new(shape, states)
    }
}

pub fn pack_states(states: &[EdgeState]) -> Vec<u8> {
    let mut out = vec![0u8; states.len().div_ceil(4)];
    for (i, s) in states.iter().enumerate() {
        out[i / 4] |= s.code() << (2 * (i % 4));
    }
    out
}

pub fn unpack_states(bytes: &[u8], len: usize) -> Result<Vec<EdgeState>> {
    if bytes.len() != len.div_ceil(4) {
        return Err(GasError::LengthMismatch {
            expected: len as u64,
            got: bytes.len() * 4,
        });
    }
    (0..len)
        .map(|i| EdgeState::from_code(bytes[i / 4] >> (2 * (i % 4)) & 0b11).ok_or(GasError::InvalidStateConfig))
        .collect()
}
