//! Forward-chaining fixpoint evaluation.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{FactId, RuleFactNetwork};
use crate::scalar::Scalar;

/// Values assigned at the start of a run. Facts not listed start at their
/// stored value ([`Fact::value`](super::Fact), zero unless set).
pub type Assignment<T> = BTreeMap<FactId, T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Completed,
    /// The first sweep changed nothing.
    ImmediateCompletion,
    /// The pass cap was reached while facts were still changing.
    NonConverging,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome<T> {
    pub status: RunStatus,
    pub target_value: T,
    /// Number of full rule sweeps executed.
    pub passes: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unknown fact {0} in assignment")]
    UnknownAssignedFact(FactId),
    #[error("unknown target fact {0}")]
    UnknownTarget(FactId),
    #[error("assigned value {value} for fact {fact} outside [0, 1]")]
    ValueOutOfRange { fact: FactId, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams<T> {
    /// A sweep counts as changing the network when some fact moved by more
    /// than this amount between the start and the end of the sweep.
    pub change_epsilon: T,
    /// Maximum number of sweeps; `None` means 100 sweeps per active rule,
    /// so suspending a rule and deleting it give the same cap.
    pub pass_cap: Option<usize>,
}

impl<T: Scalar> Default for EvalParams<T> {
    fn default() -> Self {
        Self { change_epsilon: T::lit(T::CHANGE_EPSILON), pass_cap: None }
    }
}

impl<T: Scalar> EvalParams<T> {
    pub fn cap_for(&self, network: &RuleFactNetwork<T>) -> usize {
        self.pass_cap.unwrap_or(100 * network.active_rule_count())
    }
}

/// Runs the network to a fixpoint and reports the target fact's final value.
pub fn evaluate<T: Scalar>(
    network: &RuleFactNetwork<T>,
    assignment: &Assignment<T>,
    target: FactId,
    params: &EvalParams<T>,
) -> Result<RunOutcome<T>, EvalError> {
    evaluate_with_state(network, assignment, target, params).map(|(outcome, _)| outcome)
}

/// Like [`evaluate`] but also returns every fact's value at termination.
///
/// Active rules fire in ascending rule order. Each firing writes
/// `w1 * input1 + w2 * input2` to its output immediately, so later rules in
/// the same sweep observe it.
pub fn evaluate_with_state<T: Scalar>(
    network: &RuleFactNetwork<T>,
    assignment: &Assignment<T>,
    target: FactId,
    params: &EvalParams<T>,
) -> Result<(RunOutcome<T>, Vec<T>), EvalError> {
    let n = network.fact_count();
    if target.index() >= n {
        return Err(EvalError::UnknownTarget(target));
    }
    let mut values: Vec<T> = network.facts.iter().map(|f| f.value.clamp_unit()).collect();
    for (&fact, &value) in assignment {
        if fact.index() >= n {
            return Err(EvalError::UnknownAssignedFact(fact));
        }
        if !(value >= T::zero() && value <= T::one()) {
            return Err(EvalError::ValueOutOfRange { fact, value: value.as_f64() });
        }
        values[fact.index()] = value;
    }

    // Resolve rules once; dangling endpoints are skipped rather than
    // indexed out of bounds.
    let firing: Vec<_> = network
        .active_rules()
        .filter(|r| r.input1.index() < n && r.input2.index() < n && r.output.index() < n)
        .map(|r| (r.input1.index(), r.input2.index(), r.output.index(), r.w1, r.w2))
        .collect();

    let cap = params.cap_for(network);
    let mut snapshot = values.clone();
    let mut passes = 0;
    let status = loop {
        passes += 1;
        for &(a, b, out, w1, w2) in &firing {
            let candidate = w1 * values[a] + w2 * values[b];
            debug_assert!(
                candidate.as_f64() >= -1e-9 && candidate.as_f64() <= 1.0 + 1e-6,
                "convex combination left [0, 1]"
            );
            values[out] = candidate.clamp_unit();
        }
        let changed = values.iter().zip(&snapshot).any(|(now, before)| (*now - *before).abs() > params.change_epsilon);
        if !changed {
            break if passes == 1 { RunStatus::ImmediateCompletion } else { RunStatus::Completed };
        }
        if passes >= cap {
            break RunStatus::NonConverging;
        }
        snapshot.copy_from_slice(&values);
    };

    let outcome = RunOutcome { status, target_value: values[target.index()], passes };
    Ok((outcome, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> EvalParams<f64> {
        EvalParams::default()
    }

    fn assign(pairs: &[(usize, f64)]) -> Assignment<f64> {
        pairs.iter().map(|&(f, v)| (FactId(f), v)).collect()
    }

    #[test]
    fn pass_through_weight() {
        let mut n = RuleFactNetwork::with_facts(3);
        n.push_rule(0, 1, 2, 1.0, 0.0);
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(2), &params()).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_relative_eq!(out.target_value, 0.99);
        assert_eq!(out.passes, 2);
    }

    #[test]
    fn unread_source_completes_immediately() {
        let mut n = RuleFactNetwork::with_facts(4);
        n.push_rule(1, 2, 3, 0.5, 0.5);
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(3), &params()).unwrap();
        assert_eq!(out.status, RunStatus::ImmediateCompletion);
        assert_eq!(out.passes, 1);
        assert_eq!(out.target_value, 0.0);
    }

    #[test]
    fn no_rules_is_immediate() {
        let n = RuleFactNetwork::<f64>::with_facts(2);
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(1), &params()).unwrap();
        assert_eq!(out.status, RunStatus::ImmediateCompletion);
    }

    #[test]
    fn chain_of_half_weights() {
        // f0 -> f2 -> f4 with every weight 0.5 and zero side inputs.
        let mut n = RuleFactNetwork::with_facts(5);
        n.push_rule(0, 1, 2, 0.5, 0.5);
        n.push_rule(2, 3, 4, 0.5, 0.5);
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(4), &params()).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_relative_eq!(out.target_value, 0.2475, epsilon = 1e-15);
    }

    #[test]
    fn unknown_ids_rejected() {
        let n = RuleFactNetwork::<f64>::with_facts(2);
        assert_eq!(
            evaluate(&n, &assign(&[(5, 0.5)]), FactId(1), &params()),
            Err(EvalError::UnknownAssignedFact(FactId(5)))
        );
        assert_eq!(evaluate(&n, &assign(&[(0, 0.5)]), FactId(2), &params()), Err(EvalError::UnknownTarget(FactId(2))));
        assert!(matches!(
            evaluate(&n, &assign(&[(0, 1.5)]), FactId(1), &params()),
            Err(EvalError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn cap_trips_on_slow_cycle() {
        // Two facts feeding each other with a leak towards a zero fact
        // converge geometrically; a cap of 3 sweeps cannot reach the fixpoint.
        let mut n = RuleFactNetwork::with_facts(4);
        n.push_rule(0, 2, 1, 0.9, 0.1);
        n.push_rule(1, 3, 0, 0.9, 0.1);
        let p = EvalParams { change_epsilon: 1e-12, pass_cap: Some(3) };
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(1), &p).unwrap();
        assert_eq!(out.status, RunStatus::NonConverging);
        assert_eq!(out.passes, 3);
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(1), &params()).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
    }

    #[test]
    fn suspended_rules_do_not_fire() {
        let mut n = RuleFactNetwork::with_facts(3);
        n.push_rule(0, 1, 2, 1.0, 0.0);
        n.rules[0].suspended = true;
        let out = evaluate(&n, &assign(&[(0, 0.99)]), FactId(2), &params()).unwrap();
        assert_eq!(out.status, RunStatus::ImmediateCompletion);
        assert_eq!(out.target_value, 0.0);
    }

    #[test]
    fn unassigned_facts_start_at_stored_value() {
        let mut n = RuleFactNetwork::with_facts(3);
        n.facts[1].value = 0.4;
        n.push_rule(0, 1, 2, 0.5, 0.5);
        let out = evaluate(&n, &assign(&[(0, 0.8)]), FactId(2), &params()).unwrap();
        assert_relative_eq!(out.target_value, 0.6);
    }

    #[test]
    fn assigned_facts_can_be_overwritten() {
        let mut n = RuleFactNetwork::with_facts(3);
        n.push_rule(1, 2, 0, 0.5, 0.5);
        let (out, values) = evaluate_with_state(&n, &assign(&[(0, 0.99)]), FactId(0), &params()).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_eq!(values[0], 0.0);
    }

    #[test]
    fn works_in_single_precision() {
        let mut n = RuleFactNetwork::<f32>::with_facts(5);
        n.push_rule(0, 1, 2, 0.5, 0.5);
        n.push_rule(2, 3, 4, 0.5, 0.5);
        let a: Assignment<f32> = [(FactId(0), 0.99f32)].into_iter().collect();
        let out = evaluate(&n, &a, FactId(4), &EvalParams::default()).unwrap();
        assert!((out.target_value - 0.2475).abs() < 1e-6);
    }

    #[test]
    fn default_cap_counts_active_rules() {
        let mut n = RuleFactNetwork::<f64>::with_facts(4);
        n.push_rule(0, 1, 2, 0.5, 0.5);
        let r = n.push_rule(1, 2, 3, 0.5, 0.5);
        assert_eq!(params().cap_for(&n), 200);
        n.rule_mut(r).unwrap().suspended = true;
        assert_eq!(params().cap_for(&n), 100);
        assert_eq!(EvalParams { pass_cap: Some(7), ..params() }.cap_for(&n), 7);
    }
}
