//! Verdicts and tables shared by `sample --stream` and `stats`.

use std::io::Write;

use arboreal::recursion::survival_sequence;
use arboreal::statistics::{gw_total_progeny_pmf, survival_frequency, ClusterHistogram};
use arboreal::{Scalar, TreeShape};
use serde_json::{json, Value};

use crate::error::CliResult;
use crate::params::{json_f64, ProbArg};

/// Significance level of the seeded goodness-of-fit verdicts.
pub const SIGNIFICANCE: f64 = 0.001;
/// Largest admissible fraction of collected clusters whose bin the window
/// cannot determine.
pub const MAX_UNDETERMINED_FRACTION: f64 = 0.01;
pub const Z_LIMIT: f64 = 3.0;

pub fn write_cluster_csv(out: &mut dyn Write, hist: &ClusterHistogram) -> std::io::Result<()> {
    writeln!(out, "size,count")?;
    for (k, c) in hist.counts.iter().enumerate() {
        writeln!(out, "{},{c}", k + 1)?;
    }
    writeln!(out, ">{},{}", hist.k_max, hist.tail)
}

pub fn cluster_summary(hist: &ClusterHistogram, violations: u64) -> String {
    format!(
        "collected={} censored={} undetermined={} one_ended_violations={violations}",
        hist.collected, hist.censored, hist.undetermined
    )
}

/// Chi-square and TV comparison of finite-cluster sizes with the total
/// progeny of a `Bin(d, 1/d)` Galton–Watson tree, plus the `P(size = 1)`
/// check. Passes when every check does.
pub fn gw_verdict(hist: &ClusterHistogram, d: u32, violations: u64) -> CliResult<(Value, bool)> {
    let gof = hist.compare_to_gw(d)?;
    let n = hist.binned_total() as f64;
    let single = hist.counts.first().copied().unwrap_or(0) as f64 / n;
    let single_expected = gw_total_progeny_pmf::<f64>(d, 1).prob(1);
    let single_se = (single_expected * (1.0 - single_expected) / n).sqrt();
    let single_z = (single - single_expected) / single_se;
    let checks = [
        gof.p_value > SIGNIFICANCE,
        hist.undetermined_fraction() < MAX_UNDETERMINED_FRACTION,
        single_z.abs() < Z_LIMIT,
        violations == 0,
    ];
    let pass = checks.iter().all(|&c| c);
    let doc = json!({
        "d": d,
        "k_max": hist.k_max,
        "collected": hist.collected,
        "binned": hist.binned_total(),
        "censored": hist.censored,
        "censored_fraction": json_f64(hist.censored_fraction()),
        "undetermined": hist.undetermined,
        "undetermined_fraction": json_f64(hist.undetermined_fraction()),
        "one_ended_violations": violations,
        "tv_distance": json_f64(gof.tv_distance),
        "chi_square": json_f64(gof.chi_square),
        "dof": gof.dof,
        "p_value": json_f64(gof.p_value),
        "p_size_one": json_f64(single),
        "p_size_one_expected": json_f64(single_expected),
        "p_size_one_z": json_f64(single_z),
        "pass": pass,
    });
    Ok((doc, pass))
}

/// Survival frequency against the exact `q_n` of the shape.
pub fn survival_verdict(
    shape: TreeShape,
    p: &ProbArg,
    connected: impl IntoIterator<Item = bool>,
) -> CliResult<(Value, bool)> {
    let mut replicas = 0u64;
    let (estimate, se) = survival_frequency(connected.into_iter().inspect(|_| replicas += 1))?;
    let n = shape.depth();
    let expected = match p {
        ProbArg::Exact(r) => {
            let params = arboreal::ExactParams::new(shape.d(), r.clone())?;
            survival_sequence(n, &params).q(n).to_f64()
        }
        ProbArg::Float(_) => *survival_sequence(n, &p.float_params(shape.d())?).q(n),
    };
    let z = if se > 0.0 {
        (estimate - expected) / se
    } else if estimate == expected {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = z.abs() < Z_LIMIT;
    let doc = json!({
        "d": shape.d(),
        "n": n,
        "p": p.canonical(),
        "replicas": replicas,
        "estimate": json_f64(estimate),
        "std_error": json_f64(se),
        "expected": json_f64(expected),
        "z_score": json_f64(z),
        "pass": pass,
    });
    Ok((doc, pass))
}
