//! Review annotations: labels and dispositions for facts and rules.
//!
//! An exported file lists every fact and rule with its current label and
//! no disposition. A reviewer fills in labels and dispositions; applying
//! the file copies labels onto the network and deletes everything marked
//! `remove` (a removed fact loses all of its rules but keeps its id).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{validate, FactId, RuleFactNetwork, RuleId, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Disposition {
    /// Intermediate value with no domain meaning of its own.
    Functional,
    /// Named, domain-meaningful value or association.
    Meaningful,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disposition: Option<Disposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationFile {
    /// Path of the annotated network file.
    pub network: String,
    #[serde(default)]
    pub fact: Vec<Entry>,
    #[serde(default)]
    pub rule: Vec<Entry>,
}

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed annotation file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("annotation refers to unknown fact {0}")]
    UnknownFact(FactId),
    #[error("annotation refers to unknown rule {0}")]
    UnknownRule(RuleId),
    #[error("{0} is annotated more than once")]
    Repeated(String),
    #[error("network is invalid after applying annotations:\n{0}")]
    Invalid(ValidationReport),
}

pub fn export_annotations<T>(network: &RuleFactNetwork<T>, network_ref: &str) -> AnnotationFile {
    AnnotationFile {
        network: network_ref.to_owned(),
        fact: network.facts.iter().map(|f| Entry { id: f.id.0, label: f.label.clone(), disposition: None }).collect(),
        rule: network.rules.iter().map(|r| Entry { id: r.id.0, label: r.label.clone(), disposition: None }).collect(),
    }
}

/// Applies labels and removals. Facts and rules missing from the file are
/// left untouched.
pub fn import_annotations<T: crate::Scalar>(
    network: &RuleFactNetwork<T>,
    file: &AnnotationFile,
) -> Result<RuleFactNetwork<T>, AnnotateError> {
    let mut net = network.clone();
    let mut seen = BTreeSet::new();
    let mut removed_facts = BTreeSet::new();
    for e in &file.fact {
        let id = FactId(e.id);
        if !seen.insert(id.to_string()) {
            return Err(AnnotateError::Repeated(id.to_string()));
        }
        let fact = net.facts.get_mut(e.id).filter(|f| f.id == id).ok_or(AnnotateError::UnknownFact(id))?;
        fact.label = e.label.clone();
        if e.disposition == Some(Disposition::Remove) {
            removed_facts.insert(id);
        }
    }
    let mut removed_rules = BTreeSet::new();
    for e in &file.rule {
        let id = RuleId(e.id);
        if !seen.insert(id.to_string()) {
            return Err(AnnotateError::Repeated(id.to_string()));
        }
        let rule = net.rule_mut(id).ok_or(AnnotateError::UnknownRule(id))?;
        rule.label = e.label.clone();
        if e.disposition == Some(Disposition::Remove) {
            removed_rules.insert(id);
        }
    }
    net.rules.retain(|r| {
        !removed_rules.contains(&r.id)
            && !removed_facts.contains(&r.input1)
            && !removed_facts.contains(&r.input2)
            && !removed_facts.contains(&r.output)
    });
    let report = validate(&net);
    if !report.is_empty() {
        return Err(AnnotateError::Invalid(report));
    }
    Ok(net)
}

pub fn annotations_to_string(file: &AnnotationFile) -> String {
    toml::to_string(file).expect("annotation documents always serialize")
}

pub fn annotations_from_str(text: &str) -> Result<AnnotationFile, AnnotateError> {
    Ok(toml::from_str(text)?)
}

pub fn read_annotations(path: &Path) -> Result<AnnotationFile, AnnotateError> {
    let text = fs::read_to_string(path).map_err(|source| AnnotateError::Read { path: path.to_path_buf(), source })?;
    annotations_from_str(&text)
}

pub fn write_annotations(path: &Path, file: &AnnotationFile) -> Result<(), AnnotateError> {
    fs::write(path, annotations_to_string(file))
        .map_err(|source| AnnotateError::Write { path: path.to_path_buf(), source })
}
