//! Monte-Carlo experiment harness.
//!
//! Every iteration builds a fresh oracle and trainee from its own seed,
//! picks a random training path, trains (and optionally prunes), and
//! records the final difference value on the canonical assignment or the
//! reason the run was excluded. A condition aggregates its iterations into
//! the mean / median / high-low bucket statistics.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{
    clone_structure_fresh_weights, facts_in_layer, gen_random, randomize_fact_values, GenError, TopologySpec,
};
use crate::network::{evaluate, reachable, EvalParams, FactId, RuleFactNetwork, RunStatus};
use crate::scalar::Scalar;
use crate::trainer::{canonical_assignment, difference_value, train, TrainError, TrainingConfig};

/// Where the oracle ("perfect") network comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleSpec {
    /// An independent random network over the trainee's facts.
    Random { n_facts: usize, n_rules: usize },
    /// Oracle drawn at random; the trainee copies its structure with fresh weights.
    CloneOfTrainee,
}

/// How the training path endpoints are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointSampling {
    /// Source and target uniform over all facts, redrawn until distinct.
    #[default]
    Uniform,
    /// For layered trainees, source from the first layer and target from the
    /// last; uniform otherwise.
    LayerBoundary,
}

/// Starting values of the facts of each generated network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactInit {
    /// Every fact starts at 0.
    Zero,
    /// Each generated network draws its fact values uniformly from [0, 1);
    /// a structural clone keeps its original's values.
    #[default]
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionConfig<T> {
    pub topology: TopologySpec,
    pub oracle: OracleSpec,
    pub training: TrainingConfig<T>,
    pub iterations: usize,
    pub master_seed: u64,
    pub classification_threshold: T,
    pub endpoints: EndpointSampling,
    pub fact_init: FactInit,
    pub eval: EvalParams<T>,
    /// Trainee copies the oracle including weights. Used to check the
    /// harness: every completed error must then be zero.
    pub exact_clone: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("classification threshold {0} outside (0, 1)")]
    Threshold(f64),
    #[error("perfect topology requires the clone-of-trainee oracle, other topologies a random oracle")]
    OracleMismatch,
    #[error("oracle has {oracle} facts but the trainee has {trainee}")]
    FactCountMismatch { oracle: usize, trainee: usize },
    #[error(transparent)]
    Topology(#[from] GenError),
    #[error(transparent)]
    Training(#[from] TrainError),
}

impl<T: Scalar> ConditionConfig<T> {
    pub fn new(topology: TopologySpec, oracle: OracleSpec, training: TrainingConfig<T>) -> Self {
        Self {
            topology,
            oracle,
            training,
            iterations: 1000,
            master_seed: 0,
            classification_threshold: T::lit(0.10),
            endpoints: EndpointSampling::default(),
            fact_init: FactInit::default(),
            eval: EvalParams::default(),
            exact_clone: false,
        }
    }

    /// Perfect-network condition: random oracle, structural-copy trainee.
    pub fn perfect(n_facts: usize, n_rules: usize, training: TrainingConfig<T>) -> Self {
        Self::new(TopologySpec::Perfect { n_facts, n_rules }, OracleSpec::CloneOfTrainee, training)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.iterations == 0 {
            return Err(ConfigError::NoIterations);
        }
        let t = self.classification_threshold;
        if !(t > T::zero() && t < T::one()) {
            return Err(ConfigError::Threshold(t.as_f64()));
        }
        self.topology.check()?;
        match (&self.topology, self.oracle) {
            (TopologySpec::Perfect { .. }, OracleSpec::CloneOfTrainee) => {}
            (TopologySpec::Perfect { .. }, _) | (_, OracleSpec::CloneOfTrainee) => {
                return Err(ConfigError::OracleMismatch)
            }
            (topology, OracleSpec::Random { n_facts, n_rules }) => {
                TopologySpec::Random { n_facts, n_rules }.check()?;
                if n_facts != topology.n_facts() {
                    return Err(ConfigError::FactCountMismatch { oracle: n_facts, trainee: topology.n_facts() });
                }
            }
        }
        self.training.check()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Completed,
    ExcludedNoPath,
    ExcludedImmediate,
    ExcludedNonConverging,
    ExcludedZeroOracle,
    Dropped,
}

impl RecordStatus {
    pub const ALL: [RecordStatus; 6] = [
        RecordStatus::Completed,
        RecordStatus::ExcludedNoPath,
        RecordStatus::ExcludedImmediate,
        RecordStatus::ExcludedNonConverging,
        RecordStatus::ExcludedZeroOracle,
        RecordStatus::Dropped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Completed => "completed",
            RecordStatus::ExcludedNoPath => "excluded_no_path",
            RecordStatus::ExcludedImmediate => "excluded_immediate",
            RecordStatus::ExcludedNonConverging => "excluded_non_converging",
            RecordStatus::ExcludedZeroOracle => "excluded_zero_oracle",
            RecordStatus::Dropped => "dropped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|st| st.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord<T> {
    pub seed: u64,
    pub status: RecordStatus,
    /// Present only for completed runs.
    pub error: Option<T>,
    pub rules_after_prune: usize,
}

impl<T> RunRecord<T> {
    fn excluded(seed: u64, status: RecordStatus, rules: usize) -> Self {
        Self { seed, status, error: None, rules_after_prune: rules }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExclusionCounts {
    pub no_path: usize,
    pub immediate: usize,
    pub non_converging: usize,
    pub zero_oracle: usize,
    pub dropped: usize,
}

impl ExclusionCounts {
    pub fn total(&self) -> usize {
        self.no_path + self.immediate + self.non_converging + self.zero_oracle + self.dropped
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionStats<T> {
    pub mean: Option<T>,
    pub median: Option<T>,
    /// Mean of errors above the threshold.
    pub av_high: Option<T>,
    /// Mean of errors at or below the threshold.
    pub av_low: Option<T>,
    pub ct_high: usize,
    pub ct_low: usize,
    pub completions: usize,
    pub exclusions: ExclusionCounts,
}

/// Seed of iteration `index` under `master_seed`.
pub fn iteration_seed(master_seed: u64, index: u64) -> u64 {
    // splitmix64 over the pair.
    let mut z = master_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn build_networks<T: Scalar, R: Rng + ?Sized>(
    config: &ConditionConfig<T>,
    rng: &mut R,
) -> Result<(RuleFactNetwork<T>, RuleFactNetwork<T>), GenError> {
    let init = |net: &mut RuleFactNetwork<T>, rng: &mut R| {
        if config.fact_init == FactInit::Uniform {
            randomize_fact_values(net, rng);
        }
    };
    match (&config.topology, config.oracle) {
        (topology, OracleSpec::CloneOfTrainee) => {
            let mut perfect = topology.generate(rng)?;
            init(&mut perfect, rng);
            let trainee =
                if config.exact_clone { perfect.clone() } else { clone_structure_fresh_weights(&perfect, rng) };
            Ok((perfect, trainee))
        }
        (topology, OracleSpec::Random { n_facts, n_rules }) => {
            let mut perfect = gen_random(n_facts, n_rules, rng)?;
            init(&mut perfect, rng);
            let trainee = if config.exact_clone {
                perfect.clone()
            } else {
                let mut trainee = topology.generate(rng)?;
                init(&mut trainee, rng);
                trainee
            };
            Ok((perfect, trainee))
        }
    }
}

fn pick_endpoints<T: Scalar, R: Rng + ?Sized>(
    trainee: &RuleFactNetwork<T>,
    topology: &TopologySpec,
    sampling: EndpointSampling,
    rng: &mut R,
) -> (FactId, FactId) {
    if let (EndpointSampling::LayerBoundary, TopologySpec::Layered { depth, .. }) = (sampling, topology) {
        let first = facts_in_layer(trainee, 0);
        let last = facts_in_layer(trainee, depth - 1);
        if let (Some(&s), Some(&t)) = (first.choose(rng), last.choose(rng)) {
            return (s, t);
        }
    }
    let n = trainee.fact_count();
    let source = FactId(rng.random_range(0..n));
    loop {
        let target = FactId(rng.random_range(0..n));
        if target != source {
            return (source, target);
        }
    }
}

/// Runs one iteration of a condition from its own seed.
pub fn run_iteration<T: Scalar>(config: &ConditionConfig<T>, seed: u64) -> Result<RunRecord<T>, ConfigError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (perfect, trainee) = build_networks(config, &mut rng)?;
    let rules = trainee.active_rule_count();
    let (source, target) = pick_endpoints(&trainee, &config.topology, config.endpoints, &mut rng);

    if !reachable(&perfect, source, target) || !reachable(&trainee, source, target) {
        return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedNoPath, rules));
    }

    let canonical = canonical_assignment(source);
    let params = &config.eval;
    let p0 = evaluate(&perfect, &canonical, target, params).expect("endpoints are valid facts");
    let t0 = evaluate(&trainee, &canonical, target, params).expect("endpoints are valid facts");
    if p0.status == RunStatus::NonConverging || t0.status == RunStatus::NonConverging {
        return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedNonConverging, rules));
    }
    if p0.status == RunStatus::ImmediateCompletion || t0.status == RunStatus::ImmediateCompletion {
        return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedImmediate, rules));
    }
    if p0.target_value <= T::zero() {
        return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedZeroOracle, rules));
    }

    let output = match train(&perfect, trainee, &config.training, (source, target), &mut rng, params) {
        Ok(out) => out,
        Err(TrainError::Config(_)) => {
            config.training.check()?;
            unreachable!("training config validated")
        }
        Err(_) => return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedNonConverging, rules)),
    };
    if output.dropped() {
        return Ok(RunRecord::excluded(seed, RecordStatus::Dropped, 0));
    }
    let rules = output.trainee.active_rule_count();
    let final_run = evaluate(&output.trainee, &canonical, target, params).expect("endpoints are valid facts");
    if final_run.status == RunStatus::NonConverging {
        return Ok(RunRecord::excluded(seed, RecordStatus::ExcludedNonConverging, rules));
    }
    Ok(RunRecord {
        seed,
        status: RecordStatus::Completed,
        error: Some(difference_value(p0.target_value, final_run.target_value)),
        rules_after_prune: rules,
    })
}

/// Runs every iteration of a condition on the current rayon pool.
pub fn run_condition<T: Scalar>(
    config: &ConditionConfig<T>,
) -> Result<(ConditionStats<T>, Vec<RunRecord<T>>), ConfigError> {
    config.check()?;
    let records = (0..config.iterations as u64)
        .into_par_iter()
        .map(|i| run_iteration(config, iteration_seed(config.master_seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let stats = classify_and_aggregate(&records, config.classification_threshold);
    Ok((stats, records))
}

/// [`run_condition`] on a dedicated pool of `workers` threads.
pub fn run_condition_with_workers<T: Scalar>(
    config: &ConditionConfig<T>,
    workers: usize,
) -> Result<(ConditionStats<T>, Vec<RunRecord<T>>), ConfigError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    pool.install(|| run_condition(config))
}

fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    Some(sum / T::from_usize(values.len()).expect("count fits scalar"))
}

/// Median with the midpoint convention for even counts. Sorts in place.
fn median<T: Scalar>(values: &mut [T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("errors are finite"));
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) { (values[mid - 1] + values[mid]) / T::lit(2.0) } else { values[mid] })
}

/// Buckets completed runs at `threshold` (low is `<=`) and summarizes them.
pub fn classify_and_aggregate<T: Scalar>(records: &[RunRecord<T>], threshold: T) -> ConditionStats<T> {
    let mut exclusions = ExclusionCounts::default();
    let mut errors = Vec::new();
    for r in records {
        match r.status {
            RecordStatus::Completed => errors.extend(r.error),
            RecordStatus::ExcludedNoPath => exclusions.no_path += 1,
            RecordStatus::ExcludedImmediate => exclusions.immediate += 1,
            RecordStatus::ExcludedNonConverging => exclusions.non_converging += 1,
            RecordStatus::ExcludedZeroOracle => exclusions.zero_oracle += 1,
            RecordStatus::Dropped => exclusions.dropped += 1,
        }
    }
    let (low, high): (Vec<T>, Vec<T>) = errors.iter().partition(|&&e| e <= threshold);
    ConditionStats {
        mean: mean(&errors),
        av_high: mean(&high),
        av_low: mean(&low),
        ct_high: high.len(),
        ct_low: low.len(),
        completions: errors.len(),
        median: median(&mut errors),
        exclusions,
    }
}
