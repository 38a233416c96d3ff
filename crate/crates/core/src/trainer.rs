//! Contribution-weighted gradient descent over rule weights.
//!
//! Each epoch runs the perfect (oracle) network and the trainee on the same
//! fact assignment, measures the normalized difference of their target
//! values, and distributes a velocity-scaled share of that difference to the
//! trainee's contributing rules in proportion to their path contribution.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{
    evaluate, evaluate_with_state, reachable, renormalize, Assignment, EvalError, EvalParams, FactId, RuleFactNetwork,
    RuleId, RunStatus,
};
use crate::pruning::{self, FilterOutcome, PruneConfig, PruneError, PruneMethod, PruneReport};
use crate::scalar::Scalar;

/// Value given to the source fact on the canonical training path.
pub const SOURCE_VALUE: f64 = 0.99;

/// Maximal path contribution of each rule toward one target fact.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContributionMap<T> {
    pub entries: BTreeMap<RuleId, T>,
}

impl<T: Scalar> ContributionMap<T> {
    pub fn get(&self, rule: RuleId) -> Option<T> {
        self.entries.get(&rule).copied()
    }

    /// Contribution of `rule`, zero when it does not reach the target.
    pub fn value(&self, rule: RuleId) -> T {
        self.get(rule).unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// Train path, same facts: the canonical assignment every epoch.
    Tpsf,
    /// Train path, random facts: fresh input fact values every epoch.
    Tprf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig<T> {
    pub approach: Approach,
    pub epochs: usize,
    pub velocity: T,
    pub prune: Option<PruneConfig<T>>,
}

impl<T: Scalar> TrainingConfig<T> {
    pub fn new(approach: Approach, epochs: usize, velocity: T) -> Self {
        Self { approach, epochs, velocity, prune: None }
    }

    pub fn check(&self) -> Result<(), TrainError> {
        if !(self.velocity > T::zero() && self.velocity <= T::one()) {
            return Err(TrainError::Config(format!("velocity {} outside (0, 1]", self.velocity)));
        }
        if let Some(prune) = &self.prune {
            if prune.prune_epoch >= self.epochs {
                return Err(TrainError::Config(format!(
                    "prune epoch {} must be below the epoch count {}",
                    prune.prune_epoch, self.epochs
                )));
            }
            prune.check().map_err(|e| TrainError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord<T> {
    pub epoch: usize,
    /// Perfect network output.
    pub r_p: T,
    /// Trainee output before this epoch's update.
    pub r_t: T,
    pub dv: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Perfect,
    Trainee,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0:?} network did not converge")]
    NonConverging(Side),
    #[error("target {to} is not reachable from source {from} in the {side:?} network")]
    NoPath { side: Side, from: FactId, to: FactId },
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Prune(#[from] PruneError),
}

/// Backward closure from `target` over active rules.
///
/// A fact's gain is the largest product of input weights along any rule
/// chain that carries it into the target (the target itself has gain one).
/// A rule's contribution is its larger weight times the gain of its output,
/// which is the maximum over its per-weight contributions. Passes repeat
/// until one adds or raises nothing.
pub fn contributing_rules<T: Scalar>(network: &RuleFactNetwork<T>, target: FactId) -> ContributionMap<T> {
    let n = network.fact_count();
    let mut entries = BTreeMap::new();
    if target.index() >= n {
        return ContributionMap { entries };
    }
    let mut gain: Vec<Option<T>> = vec![None; n];
    gain[target.index()] = Some(T::one());

    let rules: Vec<_> = network
        .active_rules()
        .filter(|r| r.output.index() < n && r.input1.index() < n && r.input2.index() < n)
        .collect();
    loop {
        let mut changed = false;
        for rule in &rules {
            let Some(out_gain) = gain[rule.output.index()] else {
                continue;
            };
            for (slot, fact) in rule.inputs() {
                let candidate = rule.weight(slot) * out_gain;
                let entry = &mut gain[fact.index()];
                if entry.is_none_or(|g| candidate > g) {
                    *entry = Some(candidate);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for rule in &rules {
        if let Some(out_gain) = gain[rule.output.index()] {
            let c = rule.w1.max(rule.w2) * out_gain;
            if c > T::zero() {
                entries.insert(rule.id, c);
            }
        }
    }
    ContributionMap { entries }
}

/// Normalized difference `|r_p - r_t| / max(r_p, r_t)`, zero when both are zero.
pub fn difference_value<T: Scalar>(r_p: T, r_t: T) -> T {
    let max = r_p.max(r_t);
    if max <= T::zero() {
        return T::zero();
    }
    ((r_p - r_t).abs() / max).clamp_unit()
}

/// Each contributor's share of the total contribution. Empty when every
/// contribution is zero.
pub fn rule_share<T: Scalar>(contribs: &ContributionMap<T>) -> BTreeMap<RuleId, T> {
    let total = contribs.entries.values().fold(T::zero(), |acc, &c| acc + c);
    if total <= T::zero() {
        return BTreeMap::new();
    }
    contribs.entries.iter().map(|(&id, &c)| (id, c / total)).collect()
}

/// Weight change for one rule: share × velocity × difference value.
#[inline]
pub fn weight_delta<T: Scalar>(rc: T, velocity: T, dv: T) -> T {
    rc * velocity * dv
}

/// The canonical training assignment: the source at 0.99, all else default.
pub fn canonical_assignment<T: Scalar>(source: FactId) -> Assignment<T> {
    Assignment::from([(source, T::lit(SOURCE_VALUE))])
}

/// Uniform `[0, 1)` values for the source and every fact that no active rule
/// writes in either network, shared by both networks.
pub fn random_assignment<T: Scalar, R: Rng + ?Sized>(
    perfect: &RuleFactNetwork<T>,
    trainee: &RuleFactNetwork<T>,
    source: FactId,
    rng: &mut R,
) -> Assignment<T> {
    let mut facts: Vec<FactId> = perfect.pure_inputs();
    facts.extend(trainee.pure_inputs());
    facts.push(source);
    facts.sort_unstable();
    facts.dedup();
    facts.into_iter().map(|f| (f, T::lit(rng.random::<f64>()))).collect()
}

/// One training epoch: run both networks, then shift each contributing
/// rule's weight toward (trainee too low) or away from (trainee too high)
/// its larger-valued input.
pub fn apply_epoch<T: Scalar>(
    perfect: &RuleFactNetwork<T>,
    trainee: &mut RuleFactNetwork<T>,
    assignment: &Assignment<T>,
    target: FactId,
    velocity: T,
    params: &EvalParams<T>,
) -> Result<EpochRecord<T>, TrainError> {
    let expected = evaluate(perfect, assignment, target, params)?;
    if expected.status == RunStatus::NonConverging {
        return Err(TrainError::NonConverging(Side::Perfect));
    }
    let (actual, values) = evaluate_with_state(trainee, assignment, target, params)?;
    if actual.status == RunStatus::NonConverging {
        return Err(TrainError::NonConverging(Side::Trainee));
    }
    let (r_p, r_t) = (expected.target_value, actual.target_value);
    let dv = difference_value(r_p, r_t);
    let record = EpochRecord { epoch: 0, r_p, r_t, dv };
    if dv <= T::zero() || r_p == r_t {
        return Ok(record);
    }

    let shares = rule_share(&contributing_rules(trainee, target));
    let raise = r_t < r_p;
    for (id, rc) in shares {
        let delta = weight_delta(rc, velocity, dv);
        let Some(rule) = trainee.rule_mut(id) else {
            continue;
        };
        let (v1, v2) = (values[rule.input1.index()], values[rule.input2.index()]);
        if v1 == v2 {
            continue;
        }
        // Moving weight onto the larger input raises the rule's output.
        let toward_first = (v1 > v2) == raise;
        let (w1, w2) =
            if toward_first { (rule.w1 + delta, rule.w2 - delta) } else { (rule.w1 - delta, rule.w2 + delta) };
        let (w1, w2) = renormalize(w1, w2);
        rule.w1 = w1;
        rule.w2 = w2;
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput<T> {
    pub trainee: RuleFactNetwork<T>,
    pub trace: Vec<EpochRecord<T>>,
    pub prune_report: Option<PruneReport<T>>,
}

impl<T> TrainOutput<T> {
    /// True when active filtering discarded the network.
    pub fn dropped(&self) -> bool {
        self.prune_report.as_ref().is_some_and(|r| r.verdict == pruning::Verdict::Dropped)
    }
}

/// Trains `trainee` against `perfect` along the `(source, target)` path.
///
/// When pruning is configured it runs once `prune_epoch` epochs have
/// completed, and training then continues on the surviving network. A
/// network dropped by active filtering ends training early.
pub fn train<T: Scalar, R: Rng + ?Sized>(
    perfect: &RuleFactNetwork<T>,
    mut trainee: RuleFactNetwork<T>,
    config: &TrainingConfig<T>,
    path: (FactId, FactId),
    rng: &mut R,
    params: &EvalParams<T>,
) -> Result<TrainOutput<T>, TrainError> {
    config.check()?;
    let (source, target) = path;
    for (side, net) in [(Side::Perfect, perfect), (Side::Trainee, &trainee)] {
        if !net.contains_fact(source) {
            return Err(EvalError::UnknownAssignedFact(source).into());
        }
        if !net.contains_fact(target) {
            return Err(EvalError::UnknownTarget(target).into());
        }
        if !reachable(net, source, target) {
            return Err(TrainError::NoPath { side, from: source, to: target });
        }
    }

    let canonical = canonical_assignment(source);
    let mut trace = Vec::with_capacity(config.epochs);
    let mut prune_report = None;
    for epoch in 0..config.epochs {
        if let Some(prune) = config.prune.as_ref().filter(|p| p.prune_epoch == epoch) {
            let assignment = match config.approach {
                Approach::Tpsf => canonical.clone(),
                Approach::Tprf => random_assignment(perfect, &trainee, source, rng),
            };
            let (next, report) = run_prune(perfect, trainee, prune, &assignment, target, params)?;
            let dropped = report.verdict == pruning::Verdict::Dropped;
            trainee = next;
            prune_report = Some(report);
            if dropped {
                break;
            }
        }
        let assignment = match config.approach {
            Approach::Tpsf => canonical.clone(),
            Approach::Tprf => random_assignment(perfect, &trainee, source, rng),
        };
        let mut record = apply_epoch(perfect, &mut trainee, &assignment, target, config.velocity, params)?;
        record.epoch = epoch;
        trace.push(record);
    }
    Ok(TrainOutput { trainee, trace, prune_report })
}

fn run_prune<T: Scalar>(
    perfect: &RuleFactNetwork<T>,
    trainee: RuleFactNetwork<T>,
    prune: &PruneConfig<T>,
    assignment: &Assignment<T>,
    target: FactId,
    params: &EvalParams<T>,
) -> Result<(RuleFactNetwork<T>, PruneReport<T>), TrainError> {
    match prune.method {
        PruneMethod::Contribution { threshold, scope } => {
            let error = |net: &RuleFactNetwork<T>| -> Option<T> {
                let p = evaluate(perfect, assignment, target, params).ok()?;
                let t = evaluate(net, assignment, target, params).ok()?;
                (p.status != RunStatus::NonConverging && t.status != RunStatus::NonConverging)
                    .then(|| difference_value(p.target_value, t.target_value))
            };
            let baseline = error(&trainee);
            let (pruned, mut report) = pruning::contribution_prune(&trainee, threshold, scope, target);
            report.baseline_error = baseline;
            report.final_error = error(&pruned);
            Ok((pruned, report))
        }
        PruneMethod::Adaptive { active_filtering } => {
            let (pruned, mut report) = pruning::adaptive_prune(&trainee, perfect, assignment, target, params)?;
            let next = match pruning::apply_active_filter(&trainee, pruned, &mut report, active_filtering) {
                FilterOutcome::Kept(net) | FilterOutcome::Reverted(net) => net,
                FilterOutcome::Dropped => RuleFactNetwork { facts: trainee.facts, rules: Vec::new() },
            };
            Ok((next, report))
        }
    }
}
