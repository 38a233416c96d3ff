//! Experiment suite files.
//!
//! A suite is a TOML document with a name, an output directory and one
//! `[[condition]]` table per experimental condition:
//!
//! ```toml
//! name = "baseline"
//! output_dir = "results"
//!
//! [[condition]]
//! name = "perfect-10x10"
//! topology = { kind = "perfect", n_facts = 10, n_rules = 10 }
//! epochs = 100
//! velocity = 0.1
//! seed = 42
//!
//! [[condition]]
//! name = "layered-adaptive"
//! topology = { kind = "layered", depth = 5, interior_width = 5 }
//! oracle = { kind = "random", n_facts = 25, n_rules = 100 }
//! prune = { kind = "adaptive", epoch = 20, active_filtering = true }
//! ```
//!
//! Keys per condition: `name`, `topology`, `oracle`, `approach`
//! (`tpsf`/`tprf`), `epochs`, `velocity`, `prune`, `iterations`, `seed`,
//! `threshold`, `endpoints` (`uniform`/`layer-boundary`), `fact_init`
//! (`uniform`/`zero`), `change_epsilon`, `pass_cap`. `oracle` may be
//! omitted only for the `perfect` topology. Unknown keys are rejected. A
//! relative `output_dir` resolves against the suite file's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::experiments::{ConditionConfig, ConfigError, EndpointSampling, FactInit, OracleSpec};
use crate::generators::TopologySpec;
use crate::network::EvalParams;
use crate::pruning::{PruneConfig, PruneScope};
use crate::trainer::{Approach, TrainingConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: String,
    pub output_dir: PathBuf,
    pub conditions: Vec<NamedCondition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCondition {
    pub name: String,
    pub config: ConditionConfig<f64>,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read suite file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("suite file is empty")]
    Empty,
    #[error("malformed suite: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("suite declares no conditions")]
    NoConditions,
    #[error("condition name {0:?} is used more than once")]
    DuplicateName(String),
    #[error("condition name {0:?} must be non-empty and use only letters, digits, '-', '_' or '.'")]
    BadName(String),
    #[error("condition {0:?} needs an `oracle` table (only perfect topologies default to a clone)")]
    MissingOracle(String),
    #[error("condition {name:?}: {source}")]
    Invalid { name: String, source: ConfigError },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteDoc {
    name: String,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default)]
    condition: Vec<ConditionDoc>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionDoc {
    name: String,
    topology: TopologySpec,
    oracle: Option<OracleSpec>,
    #[serde(default = "default_approach")]
    approach: Approach,
    #[serde(default = "default_epochs")]
    epochs: usize,
    #[serde(default = "default_velocity")]
    velocity: f64,
    #[serde(default)]
    prune: PruneDoc,
    #[serde(default = "default_iterations")]
    iterations: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default)]
    endpoints: EndpointSampling,
    #[serde(default)]
    fact_init: FactInit,
    change_epsilon: Option<f64>,
    pass_cap: Option<usize>,
}

fn default_approach() -> Approach {
    Approach::Tpsf
}
fn default_epochs() -> usize {
    100
}
fn default_velocity() -> f64 {
    0.1
}
fn default_iterations() -> usize {
    1000
}
fn default_threshold() -> f64 {
    0.10
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum PruneDoc {
    #[default]
    None,
    Contribution {
        epoch: usize,
        threshold: f64,
        #[serde(default = "default_scope")]
        scope: PruneScope,
    },
    Adaptive {
        epoch: usize,
        #[serde(default)]
        active_filtering: bool,
    },
}

fn default_scope() -> PruneScope {
    PruneScope::TargetFact
}

impl ConditionDoc {
    fn into_named(self) -> Result<NamedCondition, SuiteError> {
        let valid = !self.name.is_empty()
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if !valid {
            return Err(SuiteError::BadName(self.name));
        }
        let oracle = match (self.oracle, &self.topology) {
            (Some(oracle), _) => oracle,
            (None, TopologySpec::Perfect { .. }) => OracleSpec::CloneOfTrainee,
            (None, _) => return Err(SuiteError::MissingOracle(self.name)),
        };
        let mut training = TrainingConfig::new(self.approach, self.epochs, self.velocity);
        training.prune = match self.prune {
            PruneDoc::None => None,
            PruneDoc::Contribution { epoch, threshold, scope } => {
                Some(PruneConfig::contribution(epoch, threshold, scope))
            }
            PruneDoc::Adaptive { epoch, active_filtering } => Some(PruneConfig::adaptive(epoch, active_filtering)),
        };
        let mut eval = EvalParams::default();
        if let Some(eps) = self.change_epsilon {
            eval.change_epsilon = eps;
        }
        eval.pass_cap = self.pass_cap;

        let mut config = ConditionConfig::new(self.topology, oracle, training);
        config.iterations = self.iterations;
        config.master_seed = self.seed;
        config.classification_threshold = self.threshold;
        config.endpoints = self.endpoints;
        config.fact_init = self.fact_init;
        config.eval = eval;
        config.check().map_err(|source| SuiteError::Invalid { name: self.name.clone(), source })?;
        Ok(NamedCondition { name: self.name, config })
    }
}

/// Parses suite text. `base_dir` anchors a relative output directory.
pub fn parse_suite_str(text: &str, base_dir: &Path) -> Result<Suite, SuiteError> {
    if text.trim().is_empty() {
        return Err(SuiteError::Empty);
    }
    let doc: SuiteDoc = toml::from_str(text)?;
    if doc.condition.is_empty() {
        return Err(SuiteError::NoConditions);
    }
    let mut seen = BTreeSet::new();
    let mut conditions = Vec::with_capacity(doc.condition.len());
    for entry in doc.condition {
        if !seen.insert(entry.name.clone()) {
            return Err(SuiteError::DuplicateName(entry.name));
        }
        conditions.push(entry.into_named()?);
    }
    let output_dir = if doc.output_dir.is_absolute() { doc.output_dir } else { base_dir.join(doc.output_dir) };
    Ok(Suite { name: doc.name, output_dir, conditions })
}

pub fn parse_suite(path: &Path) -> Result<Suite, SuiteError> {
    let text = fs::read_to_string(path).map_err(|source| SuiteError::Read { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_suite_str(&text, base)
}
