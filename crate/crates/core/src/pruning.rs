//! Rule removal after partial training.
//!
//! Contribution pruning drops rules whose path contribution falls below a
//! threshold. Adaptive pruning suspends one rule at a time and keeps the
//! removal only when the training-path error does not get worse. Active
//! filtering then discards networks that lose every rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{evaluate, Assignment, EvalError, EvalParams, FactId, RuleFactNetwork, RuleId, RunStatus};
use crate::scalar::Scalar;
use crate::trainer::{contributing_rules, difference_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneScope {
    /// Keep a rule that reaches the threshold toward any fact.
    AnyFact,
    /// Judge rules only by their contribution toward the path target.
    TargetFact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruneMethod<T> {
    Contribution { threshold: T, scope: PruneScope },
    Adaptive { active_filtering: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneConfig<T> {
    /// Pruning runs once this many epochs have completed.
    pub prune_epoch: usize,
    pub method: PruneMethod<T>,
}

impl<T: Scalar> PruneConfig<T> {
    pub fn adaptive(prune_epoch: usize, active_filtering: bool) -> Self {
        Self { prune_epoch, method: PruneMethod::Adaptive { active_filtering } }
    }

    pub fn contribution(prune_epoch: usize, threshold: T, scope: PruneScope) -> Self {
        Self { prune_epoch, method: PruneMethod::Contribution { threshold, scope } }
    }

    pub fn check(&self) -> Result<(), PruneError> {
        if let PruneMethod::Contribution { threshold, .. } = self.method {
            if !(threshold >= T::zero() && threshold <= T::one()) {
                return Err(PruneError::Threshold(threshold.as_f64()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Kept,
    Dropped,
    RevertedToPrePrune,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport<T> {
    pub tested: usize,
    pub removed: usize,
    pub reinstated: usize,
    /// Training-path error before pruning, when it could be measured.
    pub baseline_error: Option<T>,
    pub final_error: Option<T>,
    pub verdict: Verdict,
    /// Facts left without any incident rule. They stay in the network.
    pub isolated_facts: Vec<FactId>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PruneError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("perfect network did not converge on the pruning assignment")]
    PerfectNonConverging,
    #[error("trainee did not converge on the pruning assignment")]
    TraineeNonConverging,
    #[error("trainee did not converge with rule {0} suspended; pruning abandoned")]
    NonConverging(RuleId),
    #[error("contribution threshold {0} outside [0, 1]")]
    Threshold(f64),
}

/// Removes every rule whose contribution is zero or below `threshold`.
///
/// With [`PruneScope::TargetFact`] the contribution is measured toward
/// `target`; with [`PruneScope::AnyFact`] a rule survives if it reaches the
/// threshold toward at least one fact.
pub fn contribution_prune<T: Scalar>(
    network: &RuleFactNetwork<T>,
    threshold: T,
    scope: PruneScope,
    target: FactId,
) -> (RuleFactNetwork<T>, PruneReport<T>) {
    let keeps = |c: T| c > T::zero() && c >= threshold;
    let survivors: Vec<RuleId> = match scope {
        PruneScope::TargetFact => {
            let contribs = contributing_rules(network, target);
            network.active_rules().filter(|r| keeps(contribs.value(r.id))).map(|r| r.id).collect()
        }
        PruneScope::AnyFact => {
            let maps: Vec<_> = (0..network.fact_count()).map(|f| contributing_rules(network, FactId(f))).collect();
            network.active_rules().filter(|r| maps.iter().any(|m| keeps(m.value(r.id)))).map(|r| r.id).collect()
        }
    };

    let tested = network.active_rule_count();
    let mut pruned = network.clone();
    pruned.rules.retain(|r| r.suspended || survivors.binary_search(&r.id).is_ok());
    let report = PruneReport {
        tested,
        removed: tested - survivors.len(),
        reinstated: 0,
        baseline_error: None,
        final_error: None,
        verdict: Verdict::Kept,
        isolated_facts: pruned.isolated_facts(),
    };
    (pruned, report)
}

/// Greedy suspend-and-test scan over the trainee's active rules in
/// ascending id order.
///
/// The baseline is the difference value between the perfect and trainee
/// target outputs on `assignment`. A rule whose suspension leaves the error
/// unchanged or lower is removed and the baseline moves to the new error;
/// otherwise it is reinstated. Rules whose output cannot reach the target
/// cannot move it and are removed without a re-evaluation. If the trainee
/// stops converging mid-scan the original network is kept and an error
/// returned.
pub fn adaptive_prune<T: Scalar>(
    trainee: &RuleFactNetwork<T>,
    perfect: &RuleFactNetwork<T>,
    assignment: &Assignment<T>,
    target: FactId,
    params: &EvalParams<T>,
) -> Result<(RuleFactNetwork<T>, PruneReport<T>), PruneError> {
    let expected = evaluate(perfect, assignment, target, params)?;
    if expected.status == RunStatus::NonConverging {
        return Err(PruneError::PerfectNonConverging);
    }
    let r_p = expected.target_value;
    let start = evaluate(trainee, assignment, target, params)?;
    if start.status == RunStatus::NonConverging {
        return Err(PruneError::TraineeNonConverging);
    }
    let baseline = difference_value(r_p, start.target_value);

    let mut net = trainee.clone();
    let candidates: Vec<RuleId> = net.active_rules().map(|r| r.id).collect();
    let mut error = baseline;
    let (mut removed, mut reinstated) = (0, 0);
    for id in &candidates {
        let Some(rule) = net.rule(*id) else { continue };
        if !net.ancestors_of(target)[rule.output.index()] {
            net.remove_rule(*id);
            removed += 1;
            continue;
        }
        net.rule_mut(*id).expect("rule present").suspended = true;
        let trial = evaluate(&net, assignment, target, params)?;
        if trial.status == RunStatus::NonConverging {
            return Err(PruneError::NonConverging(*id));
        }
        let trial_error = difference_value(r_p, trial.target_value);
        if trial_error > error {
            net.rule_mut(*id).expect("rule present").suspended = false;
            reinstated += 1;
        } else {
            net.remove_rule(*id);
            removed += 1;
            error = trial_error;
        }
    }

    let report = PruneReport {
        tested: candidates.len(),
        removed,
        reinstated,
        baseline_error: Some(baseline),
        final_error: Some(error),
        verdict: Verdict::Kept,
        isolated_facts: net.isolated_facts(),
    };
    Ok((net, report))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterOutcome<T> {
    Kept(RuleFactNetwork<T>),
    /// Every rule was pruned and filtering discarded the network.
    Dropped,
    /// Every rule was pruned; the pre-pruning network is used instead.
    Reverted(RuleFactNetwork<T>),
}

impl<T> FilterOutcome<T> {
    pub fn verdict(&self) -> Verdict {
        match self {
            FilterOutcome::Kept(_) => Verdict::Kept,
            FilterOutcome::Dropped => Verdict::Dropped,
            FilterOutcome::Reverted(_) => Verdict::RevertedToPrePrune,
        }
    }
}

/// Decides what survives an adaptive scan and records it in `report`.
pub fn apply_active_filter<T: Scalar>(
    pre_prune: &RuleFactNetwork<T>,
    pruned: RuleFactNetwork<T>,
    report: &mut PruneReport<T>,
    active_filtering: bool,
) -> FilterOutcome<T> {
    let outcome = if pruned.active_rule_count() > 0 {
        FilterOutcome::Kept(pruned)
    } else if active_filtering {
        FilterOutcome::Dropped
    } else {
        FilterOutcome::Reverted(pre_prune.clone())
    };
    report.verdict = outcome.verdict();
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::canonical_assignment;

    fn chain() -> RuleFactNetwork<f64> {
        // B: f0,f1 -> f2 (C = 0.3 toward f4); A: f2,f3 -> f4 (C = 0.6).
        let mut n = RuleFactNetwork::with_facts(6);
        n.push_rule(0, 1, 2, 0.5, 0.5);
        n.push_rule(2, 3, 4, 0.6, 0.4);
        n
    }

    #[test]
    fn threshold_splits_chain() {
        let (pruned, report) = contribution_prune(&chain(), 0.4, PruneScope::TargetFact, FactId(4));
        assert_eq!(pruned.rules.len(), 1);
        assert_eq!(pruned.rules[0].id, RuleId(1));
        assert_eq!(report.removed, 1);
        assert_eq!(report.verdict, Verdict::Kept);
        assert!(report.isolated_facts.contains(&FactId(0)));
    }

    #[test]
    fn threshold_zero_removes_only_unreachable() {
        let mut n = chain();
        n.push_rule(3, 5, 0, 0.5, 0.5);
        let (pruned, report) = contribution_prune(&n, 0.0, PruneScope::TargetFact, FactId(2));
        // Rule 2 writes f0, which feeds f2 through rule 0; rule 1 only leaves f2.
        let kept: Vec<_> = pruned.rules.iter().map(|r| r.id.0).collect();
        assert_eq!(kept, vec![0, 2]);
        assert_eq!(report.removed, 1);
    }

    #[test]
    fn threshold_one_keeps_only_unit_feeders() {
        let mut n = RuleFactNetwork::with_facts(6);
        n.push_rule(0, 1, 2, 1.0, 0.0);
        n.push_rule(3, 4, 2, 0.7, 0.3);
        let (pruned, _) = contribution_prune(&n, 1.0, PruneScope::TargetFact, FactId(2));
        assert_eq!(pruned.rules.len(), 1);
        assert_eq!(pruned.rules[0].id, RuleId(0));
    }

    #[test]
    fn any_fact_scope_keeps_locally_strong_rules() {
        // Every rule contributes max(w1, w2) >= 0.5 toward its own output.
        let (pruned, _) = contribution_prune(&chain(), 0.5, PruneScope::AnyFact, FactId(4));
        assert_eq!(pruned.rules.len(), 2);
        let (pruned, _) = contribution_prune(&chain(), 0.55, PruneScope::AnyFact, FactId(4));
        assert_eq!(pruned.rules.len(), 1);
    }

    #[test]
    fn adaptive_removes_no_impact_rules() {
        let mut perfect = RuleFactNetwork::with_facts(6);
        perfect.push_rule(0, 1, 2, 0.8, 0.2);
        let mut trainee = perfect.clone();
        trainee.rules[0].w1 = 0.7;
        trainee.rules[0].w2 = 0.3;
        trainee.push_rule(3, 4, 5, 0.5, 0.5);
        let a = canonical_assignment(FactId(0));
        let (pruned, report) = adaptive_prune(&trainee, &perfect, &a, FactId(2), &EvalParams::default()).unwrap();
        assert_eq!(report.tested, 2);
        assert_eq!(report.removed, 1);
        assert_eq!(report.reinstated, 1);
        assert_eq!(pruned.rules.len(), 1);
        assert_eq!(report.final_error, report.baseline_error);
    }

    #[test]
    fn adaptive_keeps_rules_that_matter() {
        // Removing the only path rule sends the trainee to 0: error 1.
        let mut perfect = RuleFactNetwork::with_facts(3);
        perfect.push_rule(0, 1, 2, 0.8, 0.2);
        let mut trainee = RuleFactNetwork::with_facts(3);
        trainee.push_rule(0, 1, 2, 0.6, 0.4);
        let a = canonical_assignment(FactId(0));
        let (pruned, report) = adaptive_prune(&trainee, &perfect, &a, FactId(2), &EvalParams::default()).unwrap();
        assert_eq!(report.removed, 0);
        assert_eq!(pruned, trainee);
    }

    #[test]
    fn filter_outcomes() {
        let mut n = RuleFactNetwork::<f64>::with_facts(3);
        n.push_rule(0, 1, 2, 0.5, 0.5);
        let empty = RuleFactNetwork::<f64>::with_facts(3);
        let mut report = PruneReport {
            tested: 1,
            removed: 1,
            reinstated: 0,
            baseline_error: Some(1.0),
            final_error: Some(1.0),
            verdict: Verdict::Kept,
            isolated_facts: vec![],
        };
        assert_eq!(apply_active_filter(&n, n.clone(), &mut report, true), FilterOutcome::Kept(n.clone()));
        assert_eq!(apply_active_filter(&n, empty.clone(), &mut report, true), FilterOutcome::Dropped);
        assert_eq!(report.verdict, Verdict::Dropped);
        assert_eq!(apply_active_filter(&n, empty, &mut report, false), FilterOutcome::Reverted(n.clone()));
        assert_eq!(report.verdict, Verdict::RevertedToPrePrune);
    }

    #[test]
    fn threshold_range_checked() {
        assert!(PruneConfig::contribution(1, 1.5f64, PruneScope::AnyFact).check().is_err());
        assert!(PruneConfig::<f64>::adaptive(1, false).check().is_ok());
    }
}
