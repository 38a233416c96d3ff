use std::collections::HashMap;
use std::fmt;

use super::{FactId, RuleFactNetwork, RuleId};
use crate::scalar::Scalar;

/// One broken network invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Fact at `position` carries a different id.
    FactIdOrder {
        position: usize,
        id: FactId,
    },
    FactValueRange {
        fact: FactId,
        value: f64,
    },
    /// Rule ids must be unique and ascending.
    RuleIdOrder {
        rule: RuleId,
        previous: RuleId,
    },
    WeightRange {
        rule: RuleId,
        w1: f64,
        w2: f64,
    },
    WeightSum {
        rule: RuleId,
        sum: f64,
    },
    DanglingFact {
        rule: RuleId,
        fact: FactId,
    },
    SelfLoop {
        rule: RuleId,
    },
    DuplicateRule {
        rule: RuleId,
        first: RuleId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FactIdOrder { position, id } => {
                write!(f, "fact at position {position} has id {id}")
            }
            Violation::FactValueRange { fact, value } => {
                write!(f, "fact {fact} value {value} outside [0, 1]")
            }
            Violation::RuleIdOrder { rule, previous } => {
                write!(f, "rule id {rule} does not follow {previous}")
            }
            Violation::WeightRange { rule, w1, w2 } => {
                write!(f, "rule {rule} weights ({w1}, {w2}) outside [0, 1]")
            }
            Violation::WeightSum { rule, sum } => write!(f, "rule {rule} weight sum {sum} != 1"),
            Violation::DanglingFact { rule, fact } => {
                write!(f, "rule {rule} references unknown fact {fact}")
            }
            Violation::SelfLoop { rule } => {
                write!(f, "rule {rule} repeats a fact among its endpoints")
            }
            Violation::DuplicateRule { rule, first } => {
                write!(f, "rule {rule} duplicates rule {first}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every broken invariant; an empty report means the network is
/// well formed.
pub fn validate<T: Scalar>(network: &RuleFactNetwork<T>) -> ValidationReport {
    let mut violations = Vec::new();
    let tol = T::WEIGHT_SUM_TOLERANCE;

    for (position, fact) in network.facts.iter().enumerate() {
        if fact.id.index() != position {
            violations.push(Violation::FactIdOrder { position, id: fact.id });
        }
        let v = fact.value.as_f64();
        if !(0.0..=1.0).contains(&v) {
            violations.push(Violation::FactValueRange { fact: fact.id, value: v });
        }
    }

    let mut seen = HashMap::new();
    let mut previous: Option<RuleId> = None;
    for rule in &network.rules {
        if let Some(prev) = previous {
            if rule.id <= prev {
                violations.push(Violation::RuleIdOrder { rule: rule.id, previous: prev });
            }
        }
        previous = Some(rule.id);

        let (w1, w2) = (rule.w1.as_f64(), rule.w2.as_f64());
        if !(0.0..=1.0).contains(&w1) || !(0.0..=1.0).contains(&w2) {
            violations.push(Violation::WeightRange { rule: rule.id, w1, w2 });
        }
        let sum = w1 + w2;
        if sum.is_nan() || (sum - 1.0).abs() > tol {
            violations.push(Violation::WeightSum { rule: rule.id, sum });
        }

        let mut dangling = false;
        for fact in [rule.input1, rule.input2, rule.output] {
            if !network.contains_fact(fact) {
                violations.push(Violation::DanglingFact { rule: rule.id, fact });
                dangling = true;
            }
        }
        if rule.input1 == rule.input2 || rule.output == rule.input1 || rule.output == rule.input2 {
            violations.push(Violation::SelfLoop { rule: rule.id });
        }
        if !dangling {
            if let Some(&first) = seen.get(&rule.structural_key()) {
                violations.push(Violation::DuplicateRule { rule: rule.id, first });
            } else {
                seen.insert(rule.structural_key(), rule.id);
            }
        }
    }

    ValidationReport { violations }
}
