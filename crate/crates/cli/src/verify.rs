//! Verification suites. Each check records what was expected and what was
//! computed; a suite passes when all of its checks do.

use std::collections::HashMap;
use std::io::Write;

use arboreal::enumeration::{exact_measure, exact_state_measure, ForestEnumeration};
use arboreal::recursion::{
    all_block_patterns, k_closed_form, k_recursive, limit_kernel, partition_recursion, survival_sequence,
};
use arboreal::sampler::{derive_seed, state_config_probability, Sampler};
use arboreal::statistics::{goodness_of_fit, gw_total_progeny_pmf, gw_total_progeny_pmf_convolution, one_ended_violations};
use arboreal::{EdgeState, ExactKernelTable, GasParams, KernelParams, KernelTable, Rational, Scalar, StateConfig, TreeShape};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Suite, VerifyArgs};
use crate::error::{CliError, CliResult, Outcome};
use crate::params::{open_output, thread_pool, ProbArg};
use crate::reports::{SIGNIFICANCE, Z_LIMIT};
use crate::sample::stream_tally;

/// Exhaustive state-configuration checks visit `3^edges` configurations.
pub const PUSHFORWARD_MAX_EDGES: u64 = 12;
pub const GOF_MAX_TV: f64 = 0.01;
pub const GW_MAX_RELATIVE_ERROR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl ToString, actual: impl ToString, pass: bool) -> Self {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass,
        }
    }

    fn equal<T: PartialEq + ToString>(name: impl Into<String>, expected: T, actual: T) -> Self {
        let pass = expected == actual;
        Self::new(name, expected, actual, pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub params: Value,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &'static str, params: Value, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite,
            params,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str, suite: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("suite {suite} needs --{flag}")))
}

fn need_p(args: &VerifyArgs, suite: &str) -> CliResult<ProbArg> {
    ProbArg::parse(args.p.as_deref().ok_or_else(|| CliError::config(format!("suite {suite} needs --p")))?)
}

pub fn run_suite(args: &VerifyArgs) -> CliResult<SuiteReport> {
    match args.suite {
        Suite::Recursion => {
            let p = need_p(args, "recursion")?;
            recursion_suite(need(args.d, "d", "recursion")?, need(args.n, "n", "recursion")?, &p, args.cap)
        }
        Suite::Kernels => {
            let p = need_p(args, "kernels")?;
            kernels_suite(need(args.d, "d", "kernels")?, args.n.unwrap_or(20), &p)
        }
        Suite::Pushforward => {
            let p = need_p(args, "pushforward")?;
            pushforward_suite(need(args.d, "d", "pushforward")?, need(args.n, "n", "pushforward")?, &p, args.cap)
        }
        Suite::SamplerGof => {
            let p = need_p(args, "sampler-gof")?;
            let pool = thread_pool(args.workers)?;
            pool.install(|| {
                sampler_gof_suite(
                    need(args.d, "d", "sampler-gof")?,
                    need(args.n, "n", "sampler-gof")?,
                    &p,
                    args.replicas.unwrap_or(200_000),
                    args.seed,
                    args.cap,
                )
            })
        }
        Suite::Gw => gw_suite(args.d, args.k_max),
        Suite::Bernoulli => {
            let p = need_p(args, "bernoulli")?;
            let pool = thread_pool(args.workers)?;
            pool.install(|| {
                bernoulli_suite(
                    need(args.d, "d", "bernoulli")?,
                    &p,
                    args.n.unwrap_or(12),
                    args.replicas.unwrap_or(10_000),
                    args.seed,
                )
            })
        }
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<Outcome> {
    let report = run_suite(args)?;
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(Outcome::from_pass(report.pass))
}

/// Partition recursion against enumeration, closed-form `K` against the
/// recursion, and `θ_m = q_m`, for every depth `m ≤ n`.
pub fn recursion_suite(d: u32, n: u32, p: &ProbArg, cap: u32) -> CliResult<SuiteReport> {
    let params = p.exact_params(d)?;
    let mut checks = Vec::new();
    let triples = partition_recursion(n, &params);
    let survival = survival_sequence(n, &params);
    for (m, rec) in triples.iter().enumerate() {
        let shape = TreeShape::wired(d, m as u32)?;
        let brute = ForestEnumeration::new(shape, cap)?.partitions(params.p())?;
        checks.push(Check::equal(format!("Z_S[{m}]"), brute.z_s.clone(), rec.z_s.clone()));
        checks.push(Check::equal(format!("Z_X[{m}]"), brute.z_x.clone(), rec.z_x.clone()));
        checks.push(Check::equal(
            format!("q[{m}] = Z_S/Z"),
            brute.root_connection(),
            survival.q[m].clone(),
        ));
    }
    if !params.p().is_zero() {
        let seq = k_recursive(n, &params)?;
        let table = ExactKernelTable::finite(n, &params);
        for m in 0..=n {
            checks.push(Check::equal(
                format!("K[{m}] closed form"),
                seq.k[m as usize].clone(),
                k_closed_form(m, &params)?,
            ));
        }
        for m in 1..=n {
            checks.push(Check::equal(
                format!("theta[{m}] = q[{m}]"),
                seq.q[m as usize].clone(),
                table.get(m).theta.clone(),
            ));
        }
    }
    Ok(SuiteReport::new(
        "recursion",
        json!({"d": d, "n": n, "p": p.canonical()}),
        checks,
    ))
}

fn kernel_checks<T: Scalar>(d: u32, params: &GasParams<T>, n: u32) -> Vec<Check> {
    let mut checks = Vec::new();
    let table = KernelTable::finite(n, params);
    let seq = survival_sequence(n, params);
    let mut check_kernel = |label: String, kernel: &KernelParams<T>| {
        checks.push(Check::new(format!("{label} in [0,1]"), true, kernel.is_valid(), kernel.is_valid()));
        for parent in EdgeState::ALL {
            let total = all_block_patterns(d).fold(T::zero(), |acc, block| {
                acc + kernel.block_probability(d, parent, &block).expect("block has d entries")
            });
            let pass = total.near(&T::one());
            checks.push(Check::new(format!("{label} sum below {parent}"), T::one(), total, pass));
        }
    };
    for m in 1..=n {
        check_kernel(format!("kernel[{m}]"), table.get(m));
    }
    check_kernel("limit kernel".into(), &limit_kernel(params));
    for m in 1..=n {
        let (q, theta) = (seq.q(m), &table.get(m).theta);
        checks.push(Check::new(format!("theta[{m}] = q[{m}]"), q, theta, theta.near(q)));
    }
    checks
}

/// Normalization and ranges of every finite kernel up to depth `n` and of
/// the limiting kernel. Exact for rational `p`, to relative `1e-12` for
/// decimals.
pub fn kernels_suite(d: u32, n: u32, p: &ProbArg) -> CliResult<SuiteReport> {
    let checks = match p {
        ProbArg::Exact(_) => kernel_checks(d, &p.exact_params(d)?, n),
        ProbArg::Float(_) => kernel_checks(d, &p.float_params(d)?, n),
    };
    Ok(SuiteReport::new(
        "kernels",
        json!({"d": d, "n": n, "p": p.canonical()}),
        checks,
    ))
}

/// All `3^E` state configurations of the wired tree: the kernel-chain
/// probability equals the enumerated mass pushed through the state encoding
/// (zero off its image), and the masses sum to one.
pub fn pushforward_suite(d: u32, n: u32, p: &ProbArg, cap: u32) -> CliResult<SuiteReport> {
    let params = p.exact_params(d)?;
    let shape = TreeShape::wired(d, n)?;
    let edges = shape.edge_count();
    if edges > PUSHFORWARD_MAX_EDGES {
        return Err(CliError::config(format!(
            "{edges} edges: exhaustive state check limited to {PUSHFORWARD_MAX_EDGES}"
        )));
    }
    let measure: HashMap<Vec<u8>, Rational> = exact_state_measure(shape, params.p(), cap)?
        .into_iter()
        .map(|(sc, prob)| (sc.pack(), prob))
        .collect();
    let table = ExactKernelTable::finite(n, &params);
    let (mut total, mut support, mut mismatches) = (Rational::zero(), 0u64, Vec::new());
    for code in 0..3u64.pow(edges as u32) {
        let mut c = code;
        let states = (0..edges)
            .map(|_| {
                let s = EdgeState::from_code((c % 3) as u8).expect("code below 3");
                c /= 3;
                s
            })
            .collect();
        let sc = StateConfig::new(shape, states)?;
        let chain = state_config_probability(&sc, &table)?;
        let expected = measure.get(&sc.pack()).cloned().unwrap_or_else(Rational::zero);
        support += !chain.is_zero() as u64;
        if chain != expected {
            mismatches.push(Check::equal(
                format!("config {}", sc.states().iter().map(|s| s.code().to_string()).collect::<String>()),
                expected,
                chain.clone(),
            ));
        }
        total += chain;
    }
    let forests = ForestEnumeration::new(shape, cap)?.forests().len() as u64;
    let mut checks = vec![
        Check::equal("mismatched configurations", 0, mismatches.len()),
        Check::equal("total mass", Rational::one(), total),
        Check::equal("support size = forest count", forests, support),
    ];
    checks.extend(mismatches.into_iter().take(10));
    Ok(SuiteReport::new(
        "pushforward",
        json!({"d": d, "n": n, "p": p.canonical(), "configurations": 3u64.pow(edges as u32)}),
        checks,
    ))
}

fn forest_mask(sc: &StateConfig) -> u64 {
    sc.states()
        .iter()
        .enumerate()
        .fold(0u64, |m, (i, s)| m | (s.is_open() as u64) << i)
}

/// Empirical forest law of the exact sampler against the enumerated measure.
pub fn sampler_gof_suite(d: u32, n: u32, p: &ProbArg, replicas: u64, seed: u64, cap: u32) -> CliResult<SuiteReport> {
    let params = p.exact_params(d)?;
    let shape = TreeShape::wired(d, n)?;
    let measure = exact_measure(shape, params.p(), cap)?;
    let index: HashMap<u64, usize> = measure
        .entries
        .iter()
        .enumerate()
        .map(|(i, (forest, _))| {
            let mask = forest.bits().iter().enumerate().fold(0u64, |m, (j, &b)| m | (b as u64) << j);
            (mask, i)
        })
        .collect();
    let reference: Vec<f64> = measure.entries.iter().map(|(_, prob)| prob.to_f64()).collect();
    let sampler = Sampler::finite(shape, &params)?;
    let bins = reference.len();
    let (counts, violations, unknown) = (0..replicas)
        .into_par_iter()
        .fold(
            || (vec![0u64; bins], 0u64, 0u64),
            |(mut counts, mut violations, mut unknown), r| {
                let sc = sampler.sample(derive_seed(seed, r));
                violations += one_ended_violations(&sc) as u64;
                match index.get(&forest_mask(&sc)) {
                    Some(&i) if sc.is_valid() => counts[i] += 1,
                    _ => unknown += 1,
                }
                (counts, violations, unknown)
            },
        )
        .reduce(
            || (vec![0u64; bins], 0, 0),
            |(mut a, va, ua), (b, vb, ub)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, va + vb, ua + ub)
            },
        );
    let gof = goodness_of_fit(&counts, &reference)?;
    let checks = vec![
        Check::new(
            "total variation",
            format!("< {GOF_MAX_TV}"),
            gof.tv_distance,
            gof.tv_distance < GOF_MAX_TV,
        ),
        Check::new(
            "chi-square p-value",
            format!("> {SIGNIFICANCE}"),
            format!("{} (chi2 = {}, dof = {})", gof.p_value, gof.chi_square, gof.dof),
            gof.p_value > SIGNIFICANCE,
        ),
        Check::equal("one-endedness violations", 0, violations),
        Check::equal("samples outside the forest set", 0, unknown),
    ];
    Ok(SuiteReport::new(
        "sampler-gof",
        json!({"d": d, "n": n, "p": p.canonical(), "replicas": replicas, "seed": seed, "forests": bins}),
        checks,
    ))
}

/// The cycle-lemma closed form of the critical total-progeny law against the
/// convolution recursion, exactly and in `f64`.
pub fn gw_suite(d: Option<u32>, k_max: usize) -> CliResult<SuiteReport> {
    if k_max == 0 {
        return Err(CliError::config("--k-max must be at least 1"));
    }
    let ds = match d {
        Some(d) if d < 2 => return Err(CliError::config("branching factor must be at least 2")),
        Some(d) => vec![d],
        None => vec![2, 3, 4],
    };
    let mut checks = Vec::new();
    for d in ds.iter().copied() {
        let exact = gw_total_progeny_pmf::<Rational>(d, k_max);
        let exact_conv = gw_total_progeny_pmf_convolution::<Rational>(d, k_max);
        let mismatched = (1..=k_max).filter(|&k| exact.prob(k) != exact_conv.prob(k)).count();
        checks.push(Check::equal(format!("d={d} exact mismatches for k <= {k_max}"), 0, mismatched));

        let closed = gw_total_progeny_pmf::<f64>(d, k_max);
        let conv = gw_total_progeny_pmf_convolution::<f64>(d, k_max);
        let worst = (1..=k_max)
            .map(|k| ((closed.prob(k) - conv.prob(k)) / conv.prob(k)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(
            format!("d={d} max relative error (f64)"),
            format!("< {GW_MAX_RELATIVE_ERROR}"),
            worst,
            worst < GW_MAX_RELATIVE_ERROR,
        ));

        let leaf = (Rational::one() - Rational::ratio(1, d as u64)).powu(d);
        checks.push(Check::equal(format!("d={d} P(T=1) = (1-1/d)^d"), leaf, exact.prob(1)));
        let mass: Rational = exact.pmf.iter().fold(Rational::zero(), |a, b| a + b);
        checks.push(Check::new(format!("d={d} partial sum <= 1"), "<= 1", &mass, mass <= Rational::one()));
    }
    Ok(SuiteReport::new("gw", json!({"d": ds, "k_max": k_max}), checks))
}

/// At or below criticality the limiting law is i.i.d. percolation: no `2'`
/// state, open frequency `p`, uncorrelated siblings.
pub fn bernoulli_suite(d: u32, p: &ProbArg, depth: u32, replicas: u64, seed: u64) -> CliResult<SuiteReport> {
    if p.above_critical(d) {
        return Err(CliError::config("the bernoulli suite needs p <= 1/d"));
    }
    let sampler = match p {
        ProbArg::Exact(r) => Sampler::limit(depth, &GasParams::new(d, r.clone())?)?,
        ProbArg::Float(x) => Sampler::limit(depth, &GasParams::new(d, *x)?)?,
    };
    let t = stream_tally(&sampler, seed, replicas);
    let pf = p.to_f64();
    let freq = t.open as f64 / t.edges as f64;
    let freq_z = (freq - pf) / (pf * (1.0 - pf) / t.edges as f64).sqrt();
    // Pooled sibling correlation; under independence its standard error is
    // 1/sqrt(#pairs).
    let both = t.both_open as f64 / t.sibling_pairs as f64;
    let corr = (both - freq * freq) / (freq * (1.0 - freq));
    let corr_z = corr * (t.sibling_pairs as f64).sqrt();
    let checks = vec![
        Check::equal("2' states", 0, t.spine),
        Check::new(
            "open frequency",
            format!("{pf} within {Z_LIMIT} sigma"),
            format!("{freq} (z = {freq_z:.3})"),
            freq_z.abs() < Z_LIMIT,
        ),
        Check::new(
            "sibling correlation",
            format!("0 within {Z_LIMIT} sigma"),
            format!("{corr} (z = {corr_z:.3})"),
            corr_z.abs() < Z_LIMIT,
        ),
        Check::equal("one-endedness violations", 0, t.violations),
    ];
    Ok(SuiteReport::new(
        "bernoulli",
        json!({"d": d, "p": p.canonical(), "depth": depth, "replicas": replicas, "seed": seed, "edges": t.edges}),
        checks,
    ))
}
