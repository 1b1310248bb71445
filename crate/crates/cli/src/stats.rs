use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};

use arboreal::statistics::{finite_cluster_samples_up_to, one_ended_violations, root_reaches_boundary, ClusterHistogram};
use arboreal::StateConfig;

use crate::args::{Report, StatsArgs};
use crate::error::{CliError, CliResult, Outcome};
use crate::params::{open_output, ProbArg};
use crate::records::{Record, RecordKind};
use crate::reports::{cluster_summary, gw_verdict, survival_verdict, write_cluster_csv};
use crate::sample::site_level;

/// Parsed input: the common shape header and the decoded replicas.
pub struct Batch {
    pub first: Record,
    pub configs: Vec<StateConfig>,
}

pub fn read_batch(reader: impl BufRead) -> CliResult<Batch> {
    let mut first: Option<Record> = None;
    let mut configs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record =
            serde_json::from_str(&line).map_err(|e| CliError::Input(format!("line {}: {e}", lineno + 1)))?;
        if let Some(f) = &first {
            if (f.kind, f.d, f.depth, &f.p) != (rec.kind, rec.d, rec.depth, &rec.p) {
                return Err(CliError::Input(format!("line {}: records mix different runs", lineno + 1)));
            }
        }
        configs.push(rec.state_config()?);
        first.get_or_insert(rec);
    }
    let first = first.ok_or_else(|| CliError::Input("no records".into()))?;
    Ok(Batch { first, configs })
}

pub fn run(args: &StatsArgs) -> CliResult<Outcome> {
    let batch = if args.input.as_os_str() == "-" {
        read_batch(io::stdin().lock())?
    } else {
        read_batch(BufReader::new(File::open(&args.input)?))?
    };
    let mut out = open_output(args.output.as_deref())?;
    let outcome = report(&mut *out, &batch, args)?;
    out.flush()?;
    Ok(outcome)
}

fn report(out: &mut dyn Write, batch: &Batch, args: &StatsArgs) -> CliResult<Outcome> {
    let first = &batch.first;
    let shape = first.shape()?;
    let violations: u64 = batch.configs.iter().map(|sc| one_ended_violations(sc) as u64).sum();
    match args.report {
        Report::Survival => {
            if first.kind != RecordKind::Finite {
                return Err(CliError::config("survival frequency needs wired (finite) records"));
            }
            let p = ProbArg::parse(&first.p)?;
            let (doc, pass) = survival_verdict(shape, &p, batch.configs.iter().map(root_reaches_boundary))?;
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::from)?;
            writeln!(out)?;
            Ok(Outcome::from_pass(pass))
        }
        Report::Clusters | Report::Gw => {
            if first.kind != RecordKind::Limit {
                return Err(CliError::config("finite-cluster statistics need limit records"));
            }
            let level = site_level(&args.clusters, shape.depth());
            let mut hist = ClusterHistogram::new(args.clusters.k_max);
            for sc in &batch.configs {
                hist.extend(finite_cluster_samples_up_to(sc, level));
            }
            if args.report == Report::Clusters {
                write_cluster_csv(out, &hist)?;
                eprintln!("{}", cluster_summary(&hist, violations));
                return Ok(Outcome::Success);
            }
            if !ProbArg::parse(&first.p)?.at_least_critical(shape.d()) {
                return Err(CliError::config("the Galton-Watson reference applies for p ≥ 1/d"));
            }
            let (mut doc, pass) = gw_verdict(&hist, shape.d(), violations)?;
            doc["p"] = first.p.clone().into();
            doc["depth"] = shape.depth().into();
            doc["replicas"] = batch.configs.len().into();
            doc["site_level"] = level.into();
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::from)?;
            writeln!(out)?;
            Ok(Outcome::from_pass(pass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(read_batch(io::Cursor::new("")), Err(CliError::Input(_))));
        assert!(matches!(read_batch(io::Cursor::new("\n\n")), Err(CliError::Input(_))));
        assert!(matches!(read_batch(io::Cursor::new("{not json")), Err(CliError::Input(_))));
    }
}
