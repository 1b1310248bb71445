use std::io::Write;

use arboreal::enumeration::{exact_measure, ForestEnumeration, MAX_ENUMERATION_CAP};
use arboreal::TreeShape;
use serde_json::{json, Value};

use crate::args::EnumerateArgs;
use crate::error::{CliError, CliResult, Outcome};
use crate::params::{open_output, ProbArg};

pub fn enumerate_report(d: u32, n: u32, p: &ProbArg, cap: u32, dump_measure: bool) -> CliResult<Value> {
    if cap > MAX_ENUMERATION_CAP {
        return Err(CliError::config(format!("cap {cap} exceeds the maximum {MAX_ENUMERATION_CAP}")));
    }
    let params = p.exact_params(d)?;
    let shape = TreeShape::wired(d, n)?;
    let triple = ForestEnumeration::new(shape, cap)?.partitions(params.p())?;
    let mut doc = json!({
        "Z": triple.z.to_string(),
        "Z_S": triple.z_s.to_string(),
        "Z_X": triple.z_x.to_string(),
    });
    if dump_measure {
        let measure = exact_measure(shape, params.p(), cap)?;
        let entries: Vec<Value> = measure
            .entries
            .iter()
            .map(|(forest, prob)| json!({"forest": forest.bit_string(), "probability": prob.to_string()}))
            .collect();
        doc["measure"] = Value::Array(entries);
    }
    Ok(doc)
}

pub fn run(args: &EnumerateArgs) -> CliResult<Outcome> {
    let p = ProbArg::parse(&args.p)?;
    let doc = enumerate_report(args.d, args.n, &p, args.cap, args.dump_measure)?;
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer(&mut out, &doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use arboreal::enumeration::DEFAULT_ENUMERATION_CAP;

    fn report(d: u32, n: u32, p: &str) -> CliResult<Value> {
        enumerate_report(d, n, &ProbArg::parse(p).unwrap(), DEFAULT_ENUMERATION_CAP, false)
    }

    #[test]
    fn examples() {
        assert_eq!(
            serde_json::to_string(&report(2, 1, "1/2").unwrap()).unwrap(),
            r#"{"Z":"3/4","Z_S":"1/2","Z_X":"1/4"}"#
        );
        assert_eq!(
            serde_json::to_string(&report(2, 0, "1/3").unwrap()).unwrap(),
            r#"{"Z":"1","Z_S":"1","Z_X":"0"}"#
        );
        assert!(matches!(report(3, 3, "1/2"), Err(CliError::Model(_))));
        assert!(matches!(report(2, 1, "0.5"), Err(CliError::Config(_))));
    }

    #[test]
    fn measure_sums_to_one() {
        let doc = enumerate_report(2, 2, &ProbArg::parse("1/3").unwrap(), 24, true).unwrap();
        let total = doc["measure"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["probability"].as_str().unwrap().parse::<arboreal::Rational>().unwrap())
            .fold(arboreal::Rational::from_integer(0.into()), |a, b| a + b);
        assert_eq!(total, arboreal::Rational::from_integer(1.into()));
    }
}
