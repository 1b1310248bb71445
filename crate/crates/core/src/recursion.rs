//! Partition-function recursion on wired trees, the root-survival sequence
//! and the per-depth block kernels of the hidden-Markov representation.
//!
//! Everything is generic over [`Scalar`] so that the same formulas run in
//! exact rational arithmetic (verification) and in `f64` (sampling). Raw
//! partition functions grow doubly exponentially in the depth and are only
//! produced in exact mode; the float path works with the survival
//! probabilities `q_m` directly.

use num_traits::{One, Zero};

use crate::config::EdgeState;
use crate::error::{GasError, Result};
use crate::scalar::{complement, is_probability, is_unit_interval_open_right, Scalar};
use crate::Rational;

/// Branching factor and edge parameter of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct GasParams<T> {
    d: u32,
    p: T,
}

impl<T: Scalar> GasParams<T> {
    pub fn new(d: u32, p: T) -> Result<Self> {
        if d < 2 {
            return Err(GasError::InvalidBranching(d));
        }
        if !is_unit_interval_open_right(&p) {
            return Err(GasError::ProbabilityOutOfRange(p.to_string()));
        }
        Ok(Self { d, p })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn dp(&self) -> T {
        T::from_count(self.d as u64) * self.p.clone()
    }

    /// Whether `d·p = 1` (exactly, or within tolerance for floats).
    pub fn is_critical(&self) -> bool {
        self.dp().near(&T::one())
    }

    /// Strictly above the critical point `p = 1/d`.
    pub fn is_supercritical(&self) -> bool {
        self.dp() > T::one() && !self.is_critical()
    }

    pub fn to_f64(&self) -> GasParams<f64> {
        GasParams {
            d: self.d,
            p: self.p.to_f64(),
        }
    }
}

/// `(Z, Z^S, Z^×)`: total weight, weight of forests joining root and
/// boundary, and weight of the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTriple<T> {
    pub z: T,
    pub z_s: T,
    pub z_x: T,
}

impl<T: Scalar> PartitionTriple<T> {
    pub fn from_parts(z_s: T, z_x: T) -> Self {
        Self {
            z: z_s.clone() + z_x.clone(),
            z_s,
            z_x,
        }
    }

    /// `Z^S / Z`, the probability that the root reaches the boundary.
    pub fn root_connection(&self) -> T {
        self.z_s.clone() / self.z.clone()
    }
}

/// Exact `(Z^S_m, Z^×_m)` for `m = 0..=n`, from `Z^S_0 = 1`, `Z^×_0 = 0`.
pub fn partition_recursion(n: u32, params: &GasParams<Rational>) -> Vec<PartitionTriple<Rational>> {
    let d = params.d();
    let p = params.p().clone();
    let dp = params.dp();
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(PartitionTriple::from_parts(Rational::one(), Rational::zero()));
    for _ in 0..n {
        let prev = out.last().expect("seeded");
        // (1 − p)·Z^S + Z^× is the weight of one child subtree that does not
        // carry the unique root-to-boundary path.
        let free = complement(&p) * &prev.z_s + &prev.z_x;
        let z_s = &dp * &prev.z_s * free.powu(d - 1);
        let z_x = free.powu(d);
        out.push(PartitionTriple::from_parts(z_s, z_x));
    }
    out
}

/// Survival probabilities `q_m` and ratios `K_m = Z^×_m / Z^S_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSequence<T> {
    pub q: Vec<T>,
    /// `K_0..K_n`. For the degenerate `p = 0` sequence only `K_0` is stored,
    /// since `K_m` is infinite for `m ≥ 1`.
    pub k: Vec<T>,
    pub degenerate: bool,
}

impl<T: Scalar> SurvivalSequence<T> {
    pub fn depth(&self) -> u32 {
        (self.q.len() - 1) as u32
    }

    pub fn q(&self, m: u32) -> &T {
        &self.q[m as usize]
    }
}

/// `K_m` by the affine recursion `K_m = (1 − p)/(dp) + K_{m−1}/(dp)` and
/// `q_m = 1/(1 + K_m)`.
///
/// Floating scalars evaluate `q_m` through the equivalent recursion
/// `q_m = dp·q·A^{d−1} / (dp·q·A^{d−1} + A^d)`, `A = 1 − p·q_{m−1}`, which
/// neither overflows nor cancels; `K_m` is then derived from `q_m`.
pub fn k_recursive<T: Scalar>(n: u32, params: &GasParams<T>) -> Result<SurvivalSequence<T>> {
    if params.p().is_zero() {
        return Err(GasError::DegenerateZeroP);
    }
    let mut q = Vec::with_capacity(n as usize + 1);
    let mut k = Vec::with_capacity(n as usize + 1);
    q.push(T::one());
    k.push(T::zero());
    if T::EXACT {
        let dp = params.dp();
        let base = complement(params.p()) / dp.clone();
        for m in 1..=n as usize {
            let next = base.clone() + k[m - 1].clone() / dp.clone();
            q.push(T::one() / (T::one() + next.clone()));
            k.push(next);
        }
    } else {
        for m in 1..=n as usize {
            let next = next_survival(params, &q[m - 1]);
            k.push(complement(&next) / next.clone());
            q.push(next);
        }
    }
    Ok(SurvivalSequence {
        q,
        k,
        degenerate: false,
    })
}

/// Like [`k_recursive`], but `p = 0` yields the degenerate sequence
/// `q_0 = 1, q_m = 0` instead of an error.
pub fn survival_sequence<T: Scalar>(n: u32, params: &GasParams<T>) -> SurvivalSequence<T> {
    match k_recursive(n, params) {
        Ok(seq) => seq,
        Err(_) => {
            let mut q = vec![T::zero(); n as usize + 1];
            q[0] = T::one();
            SurvivalSequence {
                q,
                k: vec![T::zero()],
                degenerate: true,
            }
        }
    }
}

fn next_survival<T: Scalar>(params: &GasParams<T>, q_prev: &T) -> T {
    let d = params.d();
    let a = complement(&(params.p().clone() * q_prev.clone()));
    let spine = params.dp() * q_prev.clone() * a.powu(d - 1);
    let rest = a.powu(d);
    spine.clone() / (spine + rest)
}

/// Below this relative distance from criticality the float closed form loses
/// digits to cancellation and the finite geometric sum is used instead.
const CLOSED_FORM_CANCELLATION_BAND: f64 = 1e-4;

/// `K_n` in closed form: `(1 − p)/(dp − 1)·(1 − (dp)^{−n})` off criticality,
/// `(1 − 1/d)·n` at `p = 1/d`.
pub fn k_closed_form<T: Scalar>(n: u32, params: &GasParams<T>) -> Result<T> {
    if params.p().is_zero() {
        return Err(GasError::DegenerateZeroP);
    }
    let d = T::from_count(params.d() as u64);
    let dp = params.dp();
    if params.is_critical() {
        return Ok(complement(&(T::one() / d)) * T::from_count(n as u64));
    }
    let gap = dp.clone() - T::one();
    if !T::EXACT && gap.to_f64().abs() < CLOSED_FORM_CANCELLATION_BAND {
        // (1 − p)/(dp)^n · Σ_{i<n} (dp)^i
        let mut sum = T::zero();
        let mut power = T::one();
        for _ in 0..n {
            sum = sum + power.clone();
            power = power * dp.clone();
        }
        return Ok(complement(params.p()) * sum / power);
    }
    let decay = T::one() / dp.powu(n);
    Ok(complement(params.p()) / gap * complement(&decay))
}

/// `q_{d,p} = (dp − 1)/(p(d − 1))` above criticality, zero otherwise.
pub fn survival_prob_limit<T: Scalar>(params: &GasParams<T>) -> T {
    if !params.is_supercritical() {
        return T::zero();
    }
    let d_minus_one = T::from_count(params.d() as u64 - 1);
    (params.dp() - T::one()) / (params.p().clone() * d_minus_one)
}

/// Block kernel parameters: `theta` is the weight of spawning a `2'` child
/// under a `0'` parent, `alpha` the independent `1'` probability of every
/// non-spine child.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams<T> {
    pub theta: T,
    pub alpha: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn to_f64(&self) -> KernelParams<f64> {
        KernelParams {
            theta: self.theta.to_f64(),
            alpha: self.alpha.to_f64(),
        }
    }

    /// Probability of the exact child pattern `children` below an edge in
    /// state `parent`. Inadmissible patterns have probability zero.
    pub fn block_probability(&self, d: u32, parent: EdgeState, children: &[EdgeState]) -> Result<T> {
        if children.len() != d as usize {
            return Err(GasError::MalformedBlock {
                expected: d,
                got: children.len(),
            });
        }
        let spines = children.iter().filter(|&&s| s == EdgeState::Spine).count() as u32;
        let ones = children.iter().filter(|&&s| s == EdgeState::Finite).count() as u32;
        if spines > 1 {
            return Ok(T::zero());
        }
        let free = d - spines;
        let independent = self.alpha.powu(ones) * complement(&self.alpha).powu(free - ones);
        let uniform = T::one() / T::from_count(d as u64);
        let weight = match (parent, spines) {
            (EdgeState::Closed, 1) => self.theta.clone() * uniform,
            (EdgeState::Closed, _) => complement(&self.theta),
            (EdgeState::Finite, 0) => T::one(),
            (EdgeState::Finite, _) => T::zero(),
            (EdgeState::Spine, 1) => uniform,
            (EdgeState::Spine, _) => T::zero(),
        };
        Ok(weight * independent)
    }

    pub fn is_valid(&self) -> bool {
        is_probability(&self.theta) && is_probability(&self.alpha)
    }
}

/// Kernel for the block of `d` children edges of a vertex whose remaining
/// depth to the boundary is `m ≥ 1`. With `A = 1 − p·q_{m−1}`:
/// `θ_m = dp·q_{m−1}·A^{d−1} / (dp·q_{m−1}·A^{d−1} + A^d)` and
/// `α_m = p(1 − q_{m−1})/A`.
pub fn finite_kernel<T: Scalar>(
    m: u32,
    params: &GasParams<T>,
    survival: &SurvivalSequence<T>,
) -> Result<KernelParams<T>> {
    if m == 0 {
        return Err(GasError::ZeroKernelDepth);
    }
    if survival.q.len() < m as usize {
        return Err(GasError::SurvivalTooShort(m));
    }
    let q_prev = survival.q(m - 1);
    let p = params.p();
    let a = complement(&(p.clone() * q_prev.clone()));
    let theta = next_survival(params, q_prev);
    let alpha = p.clone() * complement(q_prev) / a;
    Ok(KernelParams { theta, alpha })
}

/// Constant kernel of the limiting process: `(q_{d,p}, 1/d)` above
/// criticality, `(0, p)` (i.i.d. percolation) at or below it.
pub fn limit_kernel<T: Scalar>(params: &GasParams<T>) -> KernelParams<T> {
    if params.is_supercritical() {
        KernelParams {
            theta: survival_prob_limit(params),
            alpha: T::one() / T::from_count(params.d() as u64),
        }
    } else {
        KernelParams {
            theta: T::zero(),
            alpha: params.p().clone(),
        }
    }
}

/// Finite-depth kernels indexed by remaining depth `m = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    d: u32,
    kernels: Vec<KernelParams<T>>,
}

impl<T: Scalar> KernelTable<T> {
    pub fn finite(n: u32, params: &GasParams<T>) -> Self {
        let survival = survival_sequence(n, params);
        let kernels = (1..=n)
            .map(|m| finite_kernel(m, params, &survival).expect("m ≥ 1 and sequence long enough"))
            .collect();
        Self { d: params.d(), kernels }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn depth(&self) -> u32 {
        self.kernels.len() as u32
    }

    /// Kernel at remaining depth `m ∈ 1..=depth`.
    pub fn get(&self, m: u32) -> &KernelParams<T> {
        &self.kernels[m as usize - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &KernelParams<T>> {
        self.kernels.iter()
    }
}

/// All `3^d` child patterns of a block, admissible or not.
pub fn all_block_patterns(d: u32) -> impl Iterator<Item = Vec<EdgeState>> {
    let total = 3u64.pow(d);
    (0..total).map(move |mut code| {
        (0..d)
            .map(|_| {
                let s = EdgeState::from_code((code % 3) as u8).expect("code < 3");
                code /= 3;
                s
            })
            .collect()
    })
}
