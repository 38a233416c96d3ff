//! Rule-fact network representation.
//!
//! Facts hold partial-membership values in `[0, 1]`. Each rule reads two
//! distinct input facts and writes the convex combination
//! `w1 * input1 + w2 * input2` to a third fact, with `w1 + w2 = 1`.

mod eval;
mod validate;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub use eval::{evaluate, evaluate_with_state, Assignment, EvalError, EvalParams, RunOutcome, RunStatus};
pub use validate::{validate, ValidationReport, Violation};

/// Dense fact identifier; fact ids are contiguous from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactId(pub usize);

impl FactId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// Rule identifier. Ids are unique and ascending within a network but may
/// have gaps once rules have been pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleId(pub usize);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact<T> {
    pub id: FactId,
    pub value: T,
    pub label: Option<String>,
    /// Layer index, set only by the layered generator.
    pub layer: Option<usize>,
}

impl<T: Scalar> Fact<T> {
    pub fn new(id: usize) -> Self {
        Self { id: FactId(id), value: T::zero(), label: None, layer: None }
    }
}

/// Which of a rule's two inputs a weight applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSlot {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub id: RuleId,
    pub input1: FactId,
    pub input2: FactId,
    pub output: FactId,
    pub w1: T,
    pub w2: T,
    pub suspended: bool,
    pub label: Option<String>,
}

impl<T: Scalar> Rule<T> {
    /// Builds an active rule. Weights are taken as given; call
    /// [`Rule::renormalized`] to enforce the weight invariants.
    pub fn new(id: usize, input1: usize, input2: usize, output: usize, w1: T, w2: T) -> Self {
        Self {
            id: RuleId(id),
            input1: FactId(input1),
            input2: FactId(input2),
            output: FactId(output),
            w1,
            w2,
            suspended: false,
            label: None,
        }
    }

    #[inline]
    pub fn weight(&self, slot: InputSlot) -> T {
        match slot {
            InputSlot::First => self.w1,
            InputSlot::Second => self.w2,
        }
    }

    #[inline]
    pub fn input(&self, slot: InputSlot) -> FactId {
        match slot {
            InputSlot::First => self.input1,
            InputSlot::Second => self.input2,
        }
    }

    /// Input slots paired with the fact they read.
    pub fn inputs(&self) -> [(InputSlot, FactId); 2] {
        [(InputSlot::First, self.input1), (InputSlot::Second, self.input2)]
    }

    #[inline]
    pub fn reads(&self, fact: FactId) -> bool {
        self.input1 == fact || self.input2 == fact
    }

    /// Unordered input pair plus output; two rules with the same key are duplicates.
    pub fn structural_key(&self) -> (FactId, FactId, FactId) {
        let (a, b) = if self.input1 <= self.input2 { (self.input1, self.input2) } else { (self.input2, self.input1) };
        (a, b, self.output)
    }

    pub fn renormalized(mut self) -> Self {
        let (w1, w2) = renormalize(self.w1, self.w2);
        self.w1 = w1;
        self.w2 = w2;
        self
    }
}

/// Clamps both weights to `[0, 1]` and rescales them to sum to one.
/// Two weights that both clamp to zero reset to an even split.
pub fn renormalize<T: Scalar>(w1: T, w2: T) -> (T, T) {
    let a = w1.clamp_unit();
    let b = w2.clamp_unit();
    let sum = a + b;
    if sum <= T::zero() {
        return (T::half(), T::half());
    }
    let a = a / sum;
    // Derive the second weight from the first so the pair sums to one as
    // exactly as the scalar type allows.
    (a, (T::one() - a).clamp_unit())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleFactNetwork<T> {
    pub facts: Vec<Fact<T>>,
    pub rules: Vec<Rule<T>>,
}

impl<T: Scalar> RuleFactNetwork<T> {
    /// A network with `n_facts` zero-valued facts and no rules.
    pub fn with_facts(n_facts: usize) -> Self {
        Self { facts: (0..n_facts).map(Fact::new).collect(), rules: Vec::new() }
    }

    #[inline]
    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// Number of rules that are not suspended.
    pub fn active_rule_count(&self) -> usize {
        self.rules.iter().filter(|r| !r.suspended).count()
    }

    pub fn contains_fact(&self, id: FactId) -> bool {
        id.index() < self.facts.len()
    }

    pub fn active_rules(&self) -> impl Iterator<Item = &Rule<T>> {
        self.rules.iter().filter(|r| !r.suspended)
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule<T>> {
        self.rule_position(id).map(|i| &self.rules[i])
    }

    pub fn rule_mut(&mut self, id: RuleId) -> Option<&mut Rule<T>> {
        self.rule_position(id).map(move |i| &mut self.rules[i])
    }

    pub fn rule_position(&self, id: RuleId) -> Option<usize> {
        // Rules are kept in ascending id order; fall back to a scan if a
        // hand-built network violates that.
        match self.rules.binary_search_by_key(&id, |r| r.id) {
            Ok(i) => Some(i),
            Err(_) => self.rules.iter().position(|r| r.id == id),
        }
    }

    /// Removes a rule, returning it if present.
    pub fn remove_rule(&mut self, id: RuleId) -> Option<Rule<T>> {
        self.rule_position(id).map(|i| self.rules.remove(i))
    }

    /// Next unused rule id.
    pub fn next_rule_id(&self) -> usize {
        self.rules.iter().map(|r| r.id.0 + 1).max().unwrap_or(0)
    }

    /// Appends a rule with the next free id and returns that id.
    pub fn push_rule(&mut self, input1: usize, input2: usize, output: usize, w1: T, w2: T) -> RuleId {
        let id = self.next_rule_id();
        self.rules.push(Rule::new(id, input1, input2, output, w1, w2));
        RuleId(id)
    }

    /// Facts that are not the output of any active rule.
    pub fn pure_inputs(&self) -> Vec<FactId> {
        let mut written = vec![false; self.facts.len()];
        for r in self.active_rules() {
            if let Some(w) = written.get_mut(r.output.index()) {
                *w = true;
            }
        }
        written.iter().enumerate().filter(|(_, w)| !**w).map(|(i, _)| FactId(i)).collect()
    }

    /// Facts with no incident active rule.
    pub fn isolated_facts(&self) -> Vec<FactId> {
        let mut touched = vec![false; self.facts.len()];
        for r in self.active_rules() {
            for f in [r.input1, r.input2, r.output] {
                if let Some(t) = touched.get_mut(f.index()) {
                    *t = true;
                }
            }
        }
        touched.iter().enumerate().filter(|(_, t)| !**t).map(|(i, _)| FactId(i)).collect()
    }

    /// Facts reachable from `source` by following active rules from an
    /// input to its output. The source itself is included.
    pub fn reachable_set(&self, source: FactId) -> Vec<bool> {
        let mut seen = vec![false; self.facts.len()];
        if !self.contains_fact(source) {
            return seen;
        }
        let mut readers: Vec<Vec<FactId>> = vec![Vec::new(); self.facts.len()];
        for r in self.active_rules() {
            for (_, f) in r.inputs() {
                if let Some(list) = readers.get_mut(f.index()) {
                    list.push(r.output);
                }
            }
        }
        let mut queue = VecDeque::from([source]);
        seen[source.index()] = true;
        while let Some(f) = queue.pop_front() {
            for &next in &readers[f.index()] {
                if next.index() < seen.len() && !seen[next.index()] {
                    seen[next.index()] = true;
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    /// Facts that can influence `target` through active rules, including
    /// the target itself.
    pub fn ancestors_of(&self, target: FactId) -> Vec<bool> {
        let mut seen = vec![false; self.facts.len()];
        if !self.contains_fact(target) {
            return seen;
        }
        let mut writers: Vec<Vec<FactId>> = vec![Vec::new(); self.facts.len()];
        for r in self.active_rules() {
            if let Some(list) = writers.get_mut(r.output.index()) {
                list.push(r.input1);
                list.push(r.input2);
            }
        }
        let mut queue = VecDeque::from([target]);
        seen[target.index()] = true;
        while let Some(f) = queue.pop_front() {
            for &prev in &writers[f.index()] {
                if prev.index() < seen.len() && !seen[prev.index()] {
                    seen[prev.index()] = true;
                    queue.push_back(prev);
                }
            }
        }
        seen
    }
}

/// True iff a directed chain of active rules carries `source` into `target`.
/// A fact trivially reaches itself.
pub fn reachable<T: Scalar>(network: &RuleFactNetwork<T>, source: FactId, target: FactId) -> bool {
    network.reachable_set(source).get(target.index()).copied().unwrap_or(false)
}
