//! Gradient-descent trained rule-fact expert system networks.
//!
//! The crate covers the whole pipeline: fixpoint inference over weighted
//! two-input rules ([`network`]), seeded topology generators
//! ([`generators`]), contribution-based weight training ([`trainer`]),
//! contribution and adaptive pruning with active filtering ([`pruning`]),
//! the Monte-Carlo condition harness ([`experiments`]) and file formats
//! for suites, results, networks and annotations ([`io`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which the harness and CLI use.

pub mod experiments;
pub mod generators;
pub mod io;
pub mod network;
pub mod pruning;
pub mod scalar;
pub mod trainer;

pub use network::{FactId, RuleId};
pub use scalar::Scalar;

pub type Fact = network::Fact<f64>;
pub type Rule = network::Rule<f64>;
pub type Network = network::RuleFactNetwork<f64>;
pub type Assignment = network::Assignment<f64>;
pub type RunOutcome = network::RunOutcome<f64>;
pub type EvalParams = network::EvalParams<f64>;
pub type ContributionMap = trainer::ContributionMap<f64>;
pub type TrainingConfig = trainer::TrainingConfig<f64>;
pub type EpochRecord = trainer::EpochRecord<f64>;
pub type PruneConfig = pruning::PruneConfig<f64>;
pub type PruneReport = pruning::PruneReport<f64>;
pub type ConditionConfig = experiments::ConditionConfig<f64>;
pub type ConditionStats = experiments::ConditionStats<f64>;
pub type RunRecord = experiments::RunRecord<f64>;
