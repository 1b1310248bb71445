use std::io::Write;

use arboreal::sampler::{derive_seed, Sampler};
use arboreal::statistics::{ClusterHistogram, FiniteClusterCollector};
use arboreal::{ExactParams, FloatParams, TreeShape};
use rayon::prelude::*;

use crate::args::{ClusterArgs, Emit, SampleArgs, SampleKind, StreamStat};
use crate::error::{CliError, CliResult, Outcome};
use crate::params::{open_output, thread_pool, ProbArg};
use crate::records::Record;
use crate::reports::{cluster_summary, gw_verdict, survival_verdict, write_cluster_csv};
use crate::visitors::{ClusterVisitor, EdgeTally, RootVisitor};

/// Replicas generated per parallel batch before their records are written.
const BATCH: u64 = 1024;

pub fn build_sampler(kind: SampleKind, d: u32, depth: u32, p: &ProbArg) -> CliResult<Sampler> {
    Ok(match (kind, p) {
        (SampleKind::Finite, ProbArg::Exact(r)) => {
            Sampler::finite(TreeShape::wired(d, depth)?, &ExactParams::new(d, r.clone())?)?
        }
        (SampleKind::Finite, ProbArg::Float(x)) => Sampler::finite(TreeShape::wired(d, depth)?, &FloatParams::new(d, *x)?)?,
        (SampleKind::Limit, ProbArg::Exact(r)) => Sampler::limit(depth, &ExactParams::new(d, r.clone())?)?,
        (SampleKind::Limit, ProbArg::Float(x)) => Sampler::limit(depth, &FloatParams::new(d, *x)?)?,
    })
}

pub fn run(args: &SampleArgs) -> CliResult<Outcome> {
    let p = ProbArg::parse(&args.p)?;
    let sampler = build_sampler(args.kind, args.d, args.n, &p)?;
    let pool = thread_pool(args.workers)?;
    match (args.stream, args.stats) {
        (true, Some(stat)) => {
            if args.emit == Emit::Forest {
                return Err(CliError::config("--stream emits statistics only; drop --emit forest"));
            }
            let mut out = open_output(args.output.as_deref())?;
            let outcome = pool.install(|| stream_stat(&mut *out, &sampler, args, &p, stat))?;
            out.flush()?;
            Ok(outcome)
        }
        (true, None) => Err(CliError::config("--stream needs a statistic: --stats edges|clusters|gw|survival")),
        (false, Some(_)) => Err(CliError::config("--stats runs on the streaming path; add --stream")),
        (false, None) => {
            let mut out = open_output(args.output.as_deref())?;
            pool.install(|| emit_records(&mut *out, &sampler, args, &p))?;
            out.flush()?;
            Ok(Outcome::Success)
        }
    }
}

fn emit_records(out: &mut (dyn Write + Send), sampler: &Sampler, args: &SampleArgs, p: &ProbArg) -> CliResult<()> {
    let p_text = p.canonical();
    let mut start = 0;
    while start < args.replicas {
        let end = (start + BATCH).min(args.replicas);
        let lines: Vec<String> = (start..end)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(args.seed, r);
                let sc = sampler.sample(seed);
                let rec = Record::new(r, seed, args.kind.into(), p_text.clone(), &sc, args.emit == Emit::Forest);
                serde_json::to_string(&rec).expect("records serialize")
            })
            .collect();
        for line in lines {
            writeln!(out, "{line}")?;
        }
        start = end;
    }
    Ok(())
}

pub fn site_level(clusters: &ClusterArgs, depth: u32) -> u32 {
    clusters.site_level.unwrap_or(depth.saturating_sub(1))
}

/// Streams every replica through a fresh cluster visitor and merges.
pub fn stream_clusters(sampler: &Sampler, master: u64, replicas: u64, clusters: &ClusterArgs) -> (ClusterHistogram, u64) {
    let depth = sampler.shape().depth();
    let level = site_level(clusters, depth);
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut v = ClusterVisitor {
                collector: FiniteClusterCollector::new(depth, level),
                violations: 0,
            };
            sampler.stream(derive_seed(master, r), &mut v).expect("infallible");
            let mut hist = ClusterHistogram::new(clusters.k_max);
            hist.extend(v.collector.into_samples());
            (hist, v.violations)
        })
        .reduce(
            || (ClusterHistogram::new(clusters.k_max), 0),
            |(mut a, va), (b, vb)| {
                a.merge(&b);
                (a, va + vb)
            },
        )
}

pub fn stream_tally(sampler: &Sampler, master: u64, replicas: u64) -> EdgeTally {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut tally = EdgeTally::default();
            sampler.stream(derive_seed(master, r), &mut tally).expect("infallible");
            tally
        })
        .reduce(EdgeTally::default, EdgeTally::merge)
}

fn stream_stat(out: &mut (dyn Write + Send), sampler: &Sampler, args: &SampleArgs, p: &ProbArg, stat: StreamStat) -> CliResult<Outcome> {
    let shape = sampler.shape();
    match stat {
        StreamStat::Edges => {
            let t = stream_tally(sampler, args.seed, args.replicas);
            writeln!(out, "replicas,edges,open,spine,one_ended_violations")?;
            writeln!(out, "{},{},{},{},{}", args.replicas, t.edges, t.open, t.spine, t.violations)?;
            Ok(Outcome::Success)
        }
        StreamStat::Clusters => {
            require_limit(args.kind)?;
            let (hist, violations) = stream_clusters(sampler, args.seed, args.replicas, &args.clusters);
            write_cluster_csv(out, &hist)?;
            eprintln!("{}", cluster_summary(&hist, violations));
            Ok(Outcome::Success)
        }
        StreamStat::Gw => {
            require_limit(args.kind)?;
            if !p.at_least_critical(shape.d()) {
                return Err(CliError::config("the Galton-Watson reference applies for p ≥ 1/d"));
            }
            let (hist, violations) = stream_clusters(sampler, args.seed, args.replicas, &args.clusters);
            let (mut doc, pass) = gw_verdict(&hist, shape.d(), violations)?;
            doc["p"] = p.canonical().into();
            doc["depth"] = shape.depth().into();
            doc["replicas"] = args.replicas.into();
            doc["seed"] = args.seed.into();
            doc["site_level"] = site_level(&args.clusters, shape.depth()).into();
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
            Ok(Outcome::from_pass(pass))
        }
        StreamStat::Survival => {
            if args.kind != SampleKind::Finite {
                return Err(CliError::config("survival frequency needs the wired (finite) sampler"));
            }
            let connected: Vec<bool> = (0..args.replicas)
                .into_par_iter()
                .map(|r| {
                    let mut v = RootVisitor::default();
                    sampler.stream(derive_seed(args.seed, r), &mut v).expect("infallible");
                    // Depth 0: the root is the boundary.
                    v.connected || shape.depth() == 0
                })
                .collect();
            let (doc, pass) = survival_verdict(shape, p, connected)?;
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
            Ok(Outcome::from_pass(pass))
        }
    }
}

fn require_limit(kind: SampleKind) -> CliResult<()> {
    if kind == SampleKind::Limit {
        Ok(())
    } else {
        Err(CliError::config("finite-cluster statistics need the limit sampler"))
    }
}
