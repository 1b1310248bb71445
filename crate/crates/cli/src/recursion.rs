use std::io::Write;

use arboreal::recursion::{k_recursive, partition_recursion, survival_sequence};
use arboreal::{ExactKernelTable, FloatKernelTable, Scalar};
use serde_json::{json, Map, Value};

use crate::args::{Format, Mode, RecursionArgs};
use crate::error::{CliResult, Outcome};
use crate::params::{json_f64, open_output, ProbArg};

/// Builds the table rows `m = 0..=n`. Kernel columns are empty at `m = 0`.
pub fn recursion_rows(d: u32, p: &ProbArg, n: u32, mode: Mode) -> CliResult<Vec<Map<String, Value>>> {
    let mut rows = Vec::with_capacity(n as usize + 1);
    match mode {
        Mode::Exact => {
            let params = p.exact_params(d)?;
            let triples = partition_recursion(n, &params);
            let seq = survival_sequence(n, &params);
            let table = ExactKernelTable::finite(n, &params);
            for (m, t) in triples.iter().enumerate() {
                let mut row = Map::new();
                row.insert("m".into(), json!(m));
                row.insert("Z_S".into(), json!(t.z_s.to_string()));
                row.insert("Z_X".into(), json!(t.z_x.to_string()));
                let k = seq.k.get(m).map_or_else(|| "inf".to_string(), |k| k.to_string());
                row.insert("K".into(), json!(k));
                row.insert("q".into(), json!(seq.q[m].to_string()));
                let kernel = (m > 0).then(|| table.get(m as u32));
                row.insert("theta".into(), kernel.map_or(Value::Null, |k| json!(k.theta.to_string())));
                row.insert("alpha".into(), kernel.map_or(Value::Null, |k| json!(k.alpha.to_string())));
                rows.push(row);
            }
        }
        Mode::Float => {
            let params = p.float_params(d)?;
            let seq = match k_recursive(n, &params) {
                Ok(seq) => seq,
                Err(_) => survival_sequence(n, &params),
            };
            let table = FloatKernelTable::finite(n, &params);
            for m in 0..=n as usize {
                let mut row = Map::new();
                row.insert("m".into(), json!(m));
                row.insert("K".into(), json_f64(seq.k.get(m).copied().unwrap_or(f64::INFINITY)));
                row.insert("q".into(), json_f64(seq.q[m].to_f64()));
                let kernel = (m > 0).then(|| table.get(m as u32));
                row.insert("theta".into(), kernel.map_or(Value::Null, |k| json_f64(k.theta)));
                row.insert("alpha".into(), kernel.map_or(Value::Null, |k| json_f64(k.alpha)));
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn run(args: &RecursionArgs) -> CliResult<Outcome> {
    let p = ProbArg::parse(&args.p)?;
    let rows = recursion_rows(args.d, &p, args.n, args.mode)?;
    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        Format::Csv => write_csv(&mut out, &rows)?,
        Format::Json => {
            let doc = json!({
                "d": args.d,
                "p": p.canonical(),
                "mode": match args.mode { Mode::Exact => "exact", Mode::Float => "float" },
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_csv(out: &mut dyn Write, rows: &[Map<String, Value>]) -> std::io::Result<()> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    writeln!(out, "{}", first.keys().cloned().collect::<Vec<_>>().join(","))?;
    for row in rows {
        writeln!(out, "{}", row.values().map(cell).collect::<Vec<_>>().join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rows() {
        let rows = recursion_rows(2, &ProbArg::parse("1/2").unwrap(), 2, Mode::Exact).unwrap();
        assert_eq!(rows[2]["Z_S"], "1/4");
        assert_eq!(rows[2]["Z_X"], "1/4");
        assert_eq!(rows[2]["q"], "1/2");
        assert_eq!(rows[0]["theta"], Value::Null);
    }

    #[test]
    fn float_rows_converge() {
        let rows = recursion_rows(2, &ProbArg::parse("0.75").unwrap(), 50, Mode::Float).unwrap();
        let q = rows[50]["q"].as_f64().unwrap();
        assert!((q - 2.0 / 3.0).abs() < 1e-9);
        assert!(!rows[0].contains_key("Z_S"));
    }

    #[test]
    fn degenerate_p() {
        let rows = recursion_rows(2, &ProbArg::parse("0").unwrap(), 2, Mode::Exact).unwrap();
        assert_eq!(rows[1]["K"], "inf");
        assert_eq!(rows[1]["q"], "0");
        assert_eq!(rows[0]["q"], "1");
    }
}
