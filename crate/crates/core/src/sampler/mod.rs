//! Exact samplers of the three-state tree-indexed Markov chain.
//!
//! A vertex with remaining depth `m` draws the states of its `d` children
//! edges from a block kernel `(θ, α)` that depends only on its parent edge
//! state; the root's virtual parent is `0'`. On a wired tree the kernels vary
//! with `m` and the law is exactly the arboreal gas pushed through the
//! three-state encoding. On a window of the infinite tree the kernel is the
//! constant limiting one.
//!
//! Randomness is counter-based: each replica gets `derive_seed(master, r)`,
//! and every vertex draws from its own stream keyed by `(replica seed, vertex
//! id)`. The array sampler and the depth-first streamer therefore produce the
//! same states edge for edge, whichever subtrees a visitor chooses to skip.

mod stream;

pub use stream::{stream_sample, CountingVisitor, EdgeVisitor, Walk};

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::config::{EdgeState, ForestConfig, StateConfig};
use crate::error::{GasError, Result};
use crate::recursion::{limit_kernel, GasParams, KernelParams, KernelTable};
use crate::scalar::Scalar;
use crate::tree::{TreeShape, VertexRef};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed of replica `replica` under `master`.
pub fn derive_seed(master: u64, replica: u64) -> u64 {
    SplitMix64::seed_from_u64(master.wrapping_add(replica.wrapping_mul(GOLDEN_GAMMA))).next_u64()
}

/// Independent stream for the block of `vertex_id` in one replica.
pub(crate) fn block_rng(replica_seed: u64, vertex_id: u64) -> SplitMix64 {
    let key = SplitMix64::seed_from_u64(replica_seed ^ vertex_id.wrapping_mul(GOLDEN_GAMMA)).next_u64();
    SplitMix64::seed_from_u64(key)
}

/// Uniform child index as `⌊d·u⌋`.
fn uniform_child<R: Rng>(rng: &mut R, d: usize) -> usize {
    ((rng.random::<f64>() * d as f64) as usize).min(d - 1)
}

/// Fills `out` with one block drawn below an edge in state `parent`.
pub(crate) fn sample_block<R: Rng>(rng: &mut R, parent: EdgeState, kernel: &KernelParams<f64>, out: &mut [EdgeState]) {
    let d = out.len();
    let spine = match parent {
        EdgeState::Closed => {
            let u: f64 = rng.random();
            (u < kernel.theta).then(|| uniform_child(rng, d))
        }
        EdgeState::Finite => None,
        EdgeState::Spine => Some(uniform_child(rng, d)),
    };
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = if spine == Some(j) {
            EdgeState::Spine
        } else if rng.random::<f64>() < kernel.alpha {
            EdgeState::Finite
        } else {
            EdgeState::Closed
        };
    }
}

/// Kernel lookup by remaining depth.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSchedule {
    /// Entry `m − 1` is used at remaining depth `m`.
    Finite(Vec<KernelParams<f64>>),
    Limit(KernelParams<f64>),
}

impl KernelSchedule {
    pub fn at(&self, remaining: u32) -> &KernelParams<f64> {
        match self {
            KernelSchedule::Finite(table) => &table[remaining as usize - 1],
            KernelSchedule::Limit(kernel) => kernel,
        }
    }
}

/// A sampler bound to a shape and a kernel schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    shape: TreeShape,
    schedule: KernelSchedule,
}

impl Sampler {
    /// Exact sampler of the wired tree. Kernels are evaluated in `T` and then
    /// rounded to `f64`.
    pub fn finite<T: Scalar>(shape: TreeShape, params: &GasParams<T>) -> Result<Self> {
        if !shape.is_wired() {
            return Err(GasError::NotWired);
        }
        if shape.d() != params.d() {
            return Err(GasError::MalformedBlock {
                expected: shape.d(),
                got: params.d() as usize,
            });
        }
        let table = KernelTable::finite(shape.depth(), params);
        Ok(Self {
            shape,
            schedule: KernelSchedule::Finite(table.iter().map(KernelParams::to_f64).collect()),
        })
    }

    /// Sampler of the limiting law on a window of depth `depth`.
    pub fn limit<T: Scalar>(depth: u32, params: &GasParams<T>) -> Result<Self> {
        let shape = TreeShape::window(params.d(), depth)?;
        Ok(Self {
            shape,
            schedule: KernelSchedule::Limit(limit_kernel(params).to_f64()),
        })
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn schedule(&self) -> &KernelSchedule {
        &self.schedule
    }

    pub(crate) fn kernel_for(&self, v: VertexRef) -> &KernelParams<f64> {
        self.schedule.at(self.shape.depth() - v.level)
    }

    /// Materialized sample, filled level by level.
    pub fn sample(&self, replica_seed: u64) -> StateConfig {
        let shape = self.shape;
        let d = shape.d() as usize;
        let mut states = vec![EdgeState::Closed; shape.edge_count() as usize];
        for level in 0..shape.depth() {
            let child_offset = shape.edge_offset(level + 1) as usize;
            for index in 0..shape.level_width(level) {
                let v = VertexRef::new(level, index);
                let parent = if level == 0 {
                    EdgeState::Closed
                } else {
                    states[(shape.edge_offset(level) + index) as usize]
                };
                let mut rng = block_rng(replica_seed, shape.vertex_id(v));
                let start = child_offset + index as usize * d;
                sample_block(&mut rng, parent, self.kernel_for(v), &mut states[start..start + d]);
            }
        }
        let sc = StateConfig::new(shape, states).expect("length matches shape");
        debug_assert!(sc.is_valid());
        sc
    }

    /// Depth-first generation without materializing the configuration.
    pub fn stream<V: EdgeVisitor>(&self, replica_seed: u64, visitor: &mut V) -> std::result::Result<(), V::Error> {
        stream_sample(self, replica_seed, visitor)
    }
}

/// A sampler together with a master seed and replica count.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub sampler: Sampler,
    pub master_seed: u64,
    pub replicas: u64,
}

impl SamplerSpec {
    pub fn replica_seed(&self, replica: u64) -> u64 {
        derive_seed(self.master_seed, replica)
    }

    pub fn sample_replica(&self, replica: u64) -> StateConfig {
        self.sampler.sample(self.replica_seed(replica))
    }

    pub fn samples(&self) -> impl Iterator<Item = StateConfig> + '_ {
        (0..self.replicas).map(|r| self.sample_replica(r))
    }
}

pub fn sample_states_finite<T: Scalar>(shape: TreeShape, params: &GasParams<T>, replica_seed: u64) -> Result<StateConfig> {
    Ok(Sampler::finite(shape, params)?.sample(replica_seed))
}

pub fn sample_states_limit<T: Scalar>(depth: u32, params: &GasParams<T>, replica_seed: u64) -> Result<StateConfig> {
    Ok(Sampler::limit(depth, params)?.sample(replica_seed))
}

/// Edge-local decoding `1', 2' ↦ open`, `0' ↦ closed` of a valid state
/// configuration.
pub fn phi_inverse(sc: &StateConfig) -> Result<ForestConfig> {
    sc.validate()?;
    Ok(sc.decode_unchecked())
}

/// Chain-rule probability of a wired state configuration under the
/// finite-depth kernels: the product of block probabilities over all
/// non-boundary vertices. Configurations violating the constraints get zero.
pub fn state_config_probability<T: Scalar>(sc: &StateConfig, table: &KernelTable<T>) -> Result<T> {
    let shape = sc.shape();
    if !shape.is_wired() {
        return Err(GasError::NotWired);
    }
    if table.d() != shape.d() || table.depth() != shape.depth() {
        return Err(GasError::SurvivalTooShort(shape.depth()));
    }
    chain_probability(sc, |m| table.get(m))
}

/// Probability of a window configuration under a constant kernel.
pub fn window_probability<T: Scalar>(sc: &StateConfig, kernel: &KernelParams<T>) -> Result<T> {
    chain_probability(sc, |_| kernel)
}

fn chain_probability<'a, T: Scalar + 'a>(sc: &StateConfig, kernel_at: impl Fn(u32) -> &'a KernelParams<T>) -> Result<T> {
    let shape = sc.shape();
    let n = shape.depth();
    let mut prob = T::one();
    for level in 0..n {
        for index in 0..shape.level_width(level) {
            let v = VertexRef::new(level, index);
            let block_prob = kernel_at(n - level).block_probability(shape.d(), sc.parent_state(v), sc.block(v))?;
            if block_prob.is_zero() {
                return Ok(T::zero());
            }
            prob = prob * block_prob;
        }
    }
    Ok(prob)
}
