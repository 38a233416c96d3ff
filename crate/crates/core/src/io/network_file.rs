//! Versioned TOML network files.
//!
//! ```toml
//! format = "rulenet-network/1"
//!
//! [[fact]]
//! id = 0
//! value = 0.0
//! label = "income"
//!
//! [[rule]]
//! id = 0
//! in1 = 0
//! in2 = 1
//! out = 2
//! w1 = 0.6
//! w2 = 0.4
//! ```
//!
//! `label`, `layer` and `suspended` are optional. Loaded networks are
//! validated.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{validate, Fact, FactId, Rule, RuleFactNetwork, RuleId, ValidationReport};

pub const NETWORK_FORMAT: &str = "rulenet-network/1";

#[derive(Debug, Error)]
pub enum NetworkFileError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed network file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unsupported format tag {found:?} (expected {NETWORK_FORMAT:?})")]
    Format { found: String },
    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    format: String,
    #[serde(default)]
    fact: Vec<FactDoc>,
    #[serde(default)]
    rule: Vec<RuleDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactDoc {
    id: usize,
    #[serde(default)]
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    layer: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    id: usize,
    in1: usize,
    in2: usize,
    out: usize,
    w1: f64,
    w2: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    suspended: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

pub fn network_to_string(network: &RuleFactNetwork<f64>) -> String {
    let doc = NetworkDoc {
        format: NETWORK_FORMAT.into(),
        fact: network
            .facts
            .iter()
            .map(|f| FactDoc { id: f.id.0, value: f.value, label: f.label.clone(), layer: f.layer })
            .collect(),
        rule: network
            .rules
            .iter()
            .map(|r| RuleDoc {
                id: r.id.0,
                in1: r.input1.0,
                in2: r.input2.0,
                out: r.output.0,
                w1: r.w1,
                w2: r.w2,
                suspended: r.suspended,
                label: r.label.clone(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("network documents always serialize")
}

pub fn network_from_str(text: &str) -> Result<RuleFactNetwork<f64>, NetworkFileError> {
    let doc: NetworkDoc = toml::from_str(text)?;
    if doc.format != NETWORK_FORMAT {
        return Err(NetworkFileError::Format { found: doc.format });
    }
    let network = RuleFactNetwork {
        facts: doc
            .fact
            .into_iter()
            .map(|f| Fact { id: FactId(f.id), value: f.value, label: f.label, layer: f.layer })
            .collect(),
        rules: doc
            .rule
            .into_iter()
            .map(|r| Rule {
                id: RuleId(r.id),
                input1: FactId(r.in1),
                input2: FactId(r.in2),
                output: FactId(r.out),
                w1: r.w1,
                w2: r.w2,
                suspended: r.suspended,
                label: r.label,
            })
            .collect(),
    };
    let report = validate(&network);
    if !report.is_empty() {
        return Err(NetworkFileError::Invalid(report));
    }
    Ok(network)
}

pub fn read_network(path: &Path) -> Result<RuleFactNetwork<f64>, NetworkFileError> {
    let text =
        fs::read_to_string(path).map_err(|source| NetworkFileError::Read { path: path.to_path_buf(), source })?;
    network_from_str(&text)
}

pub fn write_network(path: &Path, network: &RuleFactNetwork<f64>) -> Result<(), NetworkFileError> {
    fs::write(path, network_to_string(network))
        .map_err(|source| NetworkFileError::Write { path: path.to_path_buf(), source })
}
