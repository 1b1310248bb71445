//! The NDJSON replica record.
//!
//! `states` holds the edge states in flat level order, two bits each
//! (`00 = 0'`, `01 = 1'`, `10 = 2'`), four per byte with the first edge in the
//! low bits, base64 encoded. Flat index of edge `(k, i)` is
//! `(d^k − d)/(d − 1) + i`.

use arboreal::{StateConfig, TreeShape};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::args::SampleKind;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Finite,
    Limit,
}

impl From<SampleKind> for RecordKind {
    fn from(kind: SampleKind) -> Self {
        match kind {
            SampleKind::Finite => RecordKind::Finite,
            SampleKind::Limit => RecordKind::Limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub replica: u64,
    pub seed: u64,
    pub kind: RecordKind,
    pub d: u32,
    pub depth: u32,
    pub p: String,
    pub states: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forest: Option<String>,
}

impl Record {
    pub fn new(replica: u64, seed: u64, kind: RecordKind, p: String, sc: &StateConfig, with_forest: bool) -> Self {
        let shape = sc.shape();
        Record {
            replica,
            seed,
            kind,
            d: shape.d(),
            depth: shape.depth(),
            p,
            states: STANDARD.encode(sc.pack()),
            forest: with_forest.then(|| sc.decode_unchecked().bit_string()),
        }
    }

    pub fn shape(&self) -> CliResult<TreeShape> {
        Ok(TreeShape::new(self.d, self.depth, self.kind == RecordKind::Finite)?)
    }

    pub fn state_config(&self) -> CliResult<StateConfig> {
        let bytes = STANDARD
            .decode(&self.states)
            .map_err(|e| CliError::Input(format!("replica {}: {e}", self.replica)))?;
        let sc = StateConfig::unpack(self.shape()?, &bytes)
            .map_err(|e| CliError::Input(format!("replica {}: {e}", self.replica)))?;
        Ok(sc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arboreal::sampler::Sampler;
    use arboreal::FloatParams;

    #[test]
    fn record_round_trip() {
        let sampler = Sampler::limit(5, &FloatParams::new(3, 0.6).unwrap()).unwrap();
        let sc = sampler.sample(17);
        let rec = Record::new(4, 17, RecordKind::Limit, "0.6".into(), &sc, true);
        let line = serde_json::to_string(&rec).unwrap();
        let back: Record = serde_json::from_str(&line).unwrap();
        assert_eq!(back.state_config().unwrap(), sc);
        assert_eq!(back.forest.unwrap(), sc.decode_unchecked().bit_string());
    }

    #[test]
    fn truncated_states_rejected() {
        let sc = Sampler::limit(4, &FloatParams::new(2, 0.6).unwrap()).unwrap().sample(1);
        let mut rec = Record::new(0, 1, RecordKind::Limit, "0.6".into(), &sc, false);
        rec.states = STANDARD.encode([0u8]);
        assert!(matches!(rec.state_config(), Err(CliError::Input(_))));
    }
}
