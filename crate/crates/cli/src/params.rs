//! Parsing of command-line numbers and construction of shared resources.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use arboreal::{ExactParams, FloatParams, Rational, Scalar};

use crate::error::{CliError, CliResult};

/// An edge probability as typed: a fraction (or integer) is kept exact, a
/// decimal is a float.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbArg {
    Exact(Rational),
    Float(f64),
}

impl ProbArg {
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s.contains(['.', 'e', 'E']) {
            return s
                .parse::<f64>()
                .map(ProbArg::Float)
                .map_err(|_| CliError::config(format!("cannot parse probability {s:?}")));
        }
        Rational::from_str(s)
            .map(ProbArg::Exact)
            .map_err(|_| CliError::config(format!("cannot parse probability {s:?}; expected a/b or a decimal")))
    }

    pub fn exact(&self) -> CliResult<Rational> {
        match self {
            ProbArg::Exact(r) => Ok(r.clone()),
            ProbArg::Float(x) => Err(CliError::config(format!(
                "exact arithmetic needs a rational p such as 3/4, got decimal {x}"
            ))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ProbArg::Exact(r) => r.to_f64(),
            ProbArg::Float(x) => *x,
        }
    }

    pub fn exact_params(&self, d: u32) -> CliResult<ExactParams> {
        Ok(ExactParams::new(d, self.exact()?)?)
    }

    pub fn float_params(&self, d: u32) -> CliResult<FloatParams> {
        Ok(FloatParams::new(d, self.to_f64())?)
    }

    /// Canonical text: reduced fraction, or the decimal as given.
    pub fn canonical(&self) -> String {
        match self {
            ProbArg::Exact(r) => r.to_string(),
            ProbArg::Float(x) => x.to_string(),
        }
    }

    /// Whether `p > 1/d`.
    pub fn above_critical(&self, d: u32) -> bool {
        match self {
            ProbArg::Exact(r) => r * Rational::from_count(d as u64) > Rational::from_count(1),
            ProbArg::Float(x) => x * d as f64 > 1.0 + 1e-12,
        }
    }

    /// Whether `p ≥ 1/d`.
    pub fn at_least_critical(&self, d: u32) -> bool {
        match self {
            ProbArg::Exact(r) => r * Rational::from_count(d as u64) >= Rational::from_count(1),
            ProbArg::Float(x) => x * d as f64 >= 1.0 - 1e-12,
        }
    }
}

pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn thread_pool(workers: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    builder.build().map_err(|e| CliError::config(e.to_string()))
}

/// A float as a JSON number, or a string for non-finite values.
pub fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(x.to_string()))
}
