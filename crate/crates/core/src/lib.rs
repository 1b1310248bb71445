//! Exact computation and simulation of the arboreal gas (Bernoulli bond
//! percolation conditioned on being a forest) on wired d-ary trees.
//!
//! - [`tree`]: level-order addressing of wired trees and truncation windows.
//! - [`enumeration`]: brute-force forests, partition functions and exact
//!   measures in rational arithmetic.
//! - [`recursion`]: partition recursion, survival probabilities and block
//!   kernels, generic over [`Scalar`].
//! - [`sampler`]: exact finite-depth and limiting-law samplers, array and
//!   depth-first streaming.
//! - [`statistics`]: clusters, the critical Galton–Watson law and
//!   goodness-of-fit tests.
//!
//! The numeric code is written once against [`Scalar`]; the aliases below
//! fix it to exact rationals or `f64`.

pub mod config;
pub mod enumeration;
pub mod error;
pub mod recursion;
pub mod sampler;
pub mod scalar;
pub mod statistics;
pub mod tree;
mod union_find;

pub use config::{EdgeState, ForestConfig, StateConfig};
pub use error::{GasError, Result};
pub use recursion::{GasParams, KernelParams, KernelTable, PartitionTriple, SurvivalSequence};
pub use scalar::Scalar;
pub use tree::{EdgeRef, TreeShape, VertexRef};
pub use union_find::UnionFind;

/// Exact scalar used by the verification paths.
pub type Rational = num_rational::BigRational;

pub type ExactParams = GasParams<Rational>;
pub type FloatParams = GasParams<f64>;
pub type ExactKernel = KernelParams<Rational>;
pub type FloatKernel = KernelParams<f64>;
pub type ExactKernelTable = KernelTable<Rational>;
pub type FloatKernelTable = KernelTable<f64>;
pub type ExactSurvival = SurvivalSequence<Rational>;
pub type FloatSurvival = SurvivalSequence<f64>;
pub type ExactPartition = PartitionTriple<Rational>;
