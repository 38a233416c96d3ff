//! Seeded construction of perfect, random, fully connected, dense and
//! layered networks.

use std::collections::HashSet;

use rand::distr::Open01;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{renormalize, Fact, FactId, RuleFactNetwork};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least {needed} facts, got {got}")]
    TooFewFacts { needed: usize, got: usize },
    #[error("need at least one rule")]
    NoRules,
    #[error("{requested} rules requested but only {capacity} distinct rules exist over {n_facts} facts")]
    TooManyRules { requested: usize, capacity: usize, n_facts: usize },
    #[error("density {0}% outside 1..=100")]
    DensityRange(u32),
    #[error("density {density_pct}% of {n_facts} facts yields no rules")]
    EmptyDensity { n_facts: usize, density_pct: u32 },
    #[error("layered networks need depth >= 2 and widths >= 2 (depth {depth}, interior {interior_width}, boundary {boundary_width})")]
    LayerShape { depth: usize, interior_width: usize, boundary_width: usize },
}

fn default_boundary() -> usize {
    5
}

/// Shape of a network to generate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologySpec {
    /// Random structure used both for the oracle and, with fresh weights,
    /// for the trainee.
    Perfect {
        n_facts: usize,
        n_rules: usize,
    },
    Random {
        n_facts: usize,
        n_rules: usize,
    },
    FullyConnected {
        n_facts: usize,
    },
    Dense {
        n_facts: usize,
        density_pct: u32,
    },
    Layered {
        depth: usize,
        interior_width: usize,
        #[serde(default = "default_boundary")]
        boundary_width: usize,
    },
}

impl TopologySpec {
    pub fn n_facts(&self) -> usize {
        match *self {
            TopologySpec::Perfect { n_facts, .. }
            | TopologySpec::Random { n_facts, .. }
            | TopologySpec::FullyConnected { n_facts }
            | TopologySpec::Dense { n_facts, .. } => n_facts,
            TopologySpec::Layered { depth, interior_width, boundary_width } => {
                layer_sizes(depth, interior_width, boundary_width).iter().sum()
            }
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        match *self {
            TopologySpec::Perfect { n_facts, n_rules } | TopologySpec::Random { n_facts, n_rules } => {
                check_random(n_facts, n_rules)
            }
            TopologySpec::FullyConnected { n_facts } => min_facts(n_facts),
            TopologySpec::Dense { n_facts, density_pct } => dense_rule_count(n_facts, density_pct).map(|_| ()),
            TopologySpec::Layered { depth, interior_width, boundary_width } => {
                check_layers(depth, interior_width, boundary_width)
            }
        }
    }

    pub fn generate<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RuleFactNetwork<T>, GenError> {
        match *self {
            TopologySpec::Perfect { n_facts, n_rules } | TopologySpec::Random { n_facts, n_rules } => {
                gen_random(n_facts, n_rules, rng)
            }
            TopologySpec::FullyConnected { n_facts } => gen_fully_connected(n_facts, rng),
            TopologySpec::Dense { n_facts, density_pct } => gen_dense(n_facts, density_pct, rng),
            TopologySpec::Layered { depth, interior_width, boundary_width } => {
                gen_layered(depth, interior_width, boundary_width, rng)
            }
        }
    }
}

/// Two weights drawn uniformly from (0, 1) and scaled to sum to one.
pub fn random_weights<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> (T, T) {
    let a: f64 = rng.sample(Open01);
    let b: f64 = rng.sample(Open01);
    renormalize(T::lit(a), T::lit(b))
}

fn min_facts(n_facts: usize) -> Result<(), GenError> {
    if n_facts < 3 {
        Err(GenError::TooFewFacts { needed: 3, got: n_facts })
    } else {
        Ok(())
    }
}

/// Number of distinct (unordered input pair, output) triples.
fn rule_capacity(n_facts: usize) -> usize {
    n_facts * n_facts.saturating_sub(1) / 2 * n_facts.saturating_sub(2)
}

fn check_random(n_facts: usize, n_rules: usize) -> Result<(), GenError> {
    min_facts(n_facts)?;
    if n_rules == 0 {
        return Err(GenError::NoRules);
    }
    let capacity = rule_capacity(n_facts);
    if n_rules > capacity {
        return Err(GenError::TooManyRules { requested: n_rules, capacity, n_facts });
    }
    Ok(())
}

/// Random rules over random facts, rejecting duplicate structures.
pub fn gen_random<T: Scalar, R: Rng + ?Sized>(
    n_facts: usize,
    n_rules: usize,
    rng: &mut R,
) -> Result<RuleFactNetwork<T>, GenError> {
    check_random(n_facts, n_rules)?;
    let mut net = RuleFactNetwork::with_facts(n_facts);
    let mut used = HashSet::with_capacity(n_rules);
    while net.rules.len() < n_rules {
        let picked = index::sample(rng, n_facts, 3);
        let (a, b, out) = (picked.index(0), picked.index(1), picked.index(2));
        let key = (a.min(b), a.max(b), out);
        if !used.insert(key) {
            continue;
        }
        let (w1, w2) = random_weights(rng);
        net.push_rule(a, b, out, w1, w2);
    }
    Ok(net)
}

fn pair_from_index(n: usize, mut k: usize) -> (usize, usize) {
    // Lexicographic enumeration of {a < b}.
    for a in 0..n {
        let row = n - a - 1;
        if k < row {
            return (a, a + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

fn rules_for_pairs<T: Scalar, R: Rng + ?Sized>(
    n_facts: usize,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    rng: &mut R,
) -> RuleFactNetwork<T> {
    let mut net = RuleFactNetwork::with_facts(n_facts);
    for (a, b) in pairs {
        // Uniform over the n - 2 facts other than a and b.
        let mut out = rng.random_range(0..n_facts - 2);
        for skip in [a, b] {
            if out >= skip {
                out += 1;
            }
        }
        let (w1, w2) = random_weights(rng);
        net.push_rule(a, b, out, w1, w2);
    }
    net
}

/// One rule per unordered fact pair, each writing a random third fact.
pub fn gen_fully_connected<T: Scalar, R: Rng + ?Sized>(
    n_facts: usize,
    rng: &mut R,
) -> Result<RuleFactNetwork<T>, GenError> {
    min_facts(n_facts)?;
    let pairs = (0..n_facts).flat_map(|a| (a + 1..n_facts).map(move |b| (a, b)));
    Ok(rules_for_pairs(n_facts, pairs, rng))
}

fn dense_rule_count(n_facts: usize, density_pct: u32) -> Result<usize, GenError> {
    min_facts(n_facts)?;
    if !(1..=100).contains(&density_pct) {
        return Err(GenError::DensityRange(density_pct));
    }
    let pairs = n_facts * (n_facts - 1) / 2;
    let count = pairs * density_pct as usize / 100;
    if count == 0 {
        return Err(GenError::EmptyDensity { n_facts, density_pct });
    }
    Ok(count)
}

/// A `density_pct` percent sample of the fully connected pair set.
pub fn gen_dense<T: Scalar, R: Rng + ?Sized>(
    n_facts: usize,
    density_pct: u32,
    rng: &mut R,
) -> Result<RuleFactNetwork<T>, GenError> {
    let count = dense_rule_count(n_facts, density_pct)?;
    let total = n_facts * (n_facts - 1) / 2;
    let mut chosen = index::sample(rng, total, count).into_vec();
    chosen.sort_unstable();
    let pairs = chosen.into_iter().map(|k| pair_from_index(n_facts, k));
    Ok(rules_for_pairs(n_facts, pairs, rng))
}

pub fn layer_sizes(depth: usize, interior_width: usize, boundary_width: usize) -> Vec<usize> {
    let mut sizes = vec![boundary_width];
    sizes.extend(std::iter::repeat_n(interior_width, depth.saturating_sub(2)));
    if depth >= 2 {
        sizes.push(boundary_width);
    }
    sizes
}

fn check_layers(depth: usize, interior_width: usize, boundary_width: usize) -> Result<(), GenError> {
    if depth < 2 || boundary_width < 2 || (depth > 2 && interior_width < 2) {
        return Err(GenError::LayerShape { depth, interior_width, boundary_width });
    }
    Ok(())
}

/// Layered network: for each node of layer `L + 1`, one rule per cyclically
/// adjacent pair `(i, i + 1 mod w)` of layer `L`, so every node feeds every
/// node of the next layer through exactly two rules.
pub fn gen_layered<T: Scalar, R: Rng + ?Sized>(
    depth: usize,
    interior_width: usize,
    boundary_width: usize,
    rng: &mut R,
) -> Result<RuleFactNetwork<T>, GenError> {
    check_layers(depth, interior_width, boundary_width)?;
    let sizes = layer_sizes(depth, interior_width, boundary_width);
    let mut starts = Vec::with_capacity(sizes.len());
    let mut facts = Vec::new();
    for (layer, &size) in sizes.iter().enumerate() {
        starts.push(facts.len());
        for _ in 0..size {
            let mut fact = Fact::new(facts.len());
            fact.layer = Some(layer);
            facts.push(fact);
        }
    }
    let mut net = RuleFactNetwork { facts, rules: Vec::new() };
    for gap in 0..sizes.len() - 1 {
        let (from, width) = (starts[gap], sizes[gap]);
        // With two nodes both cyclic pairs are the same unordered pair.
        let pair_count = if width == 2 { 1 } else { width };
        for j in 0..sizes[gap + 1] {
            let out = starts[gap + 1] + j;
            for i in 0..pair_count {
                let (w1, w2) = random_weights(rng);
                net.push_rule(from + i, from + (i + 1) % width, out, w1, w2);
            }
        }
    }
    Ok(net)
}

/// Same facts and rule endpoints with every weight redrawn.
pub fn clone_structure_fresh_weights<T: Scalar, R: Rng + ?Sized>(
    network: &RuleFactNetwork<T>,
    rng: &mut R,
) -> RuleFactNetwork<T> {
    let mut clone = network.clone();
    for rule in &mut clone.rules {
        let (w1, w2) = random_weights(rng);
        rule.w1 = w1;
        rule.w2 = w2;
    }
    clone
}

/// Draws every fact's stored value uniformly from [0, 1).
pub fn randomize_fact_values<T: Scalar, R: Rng + ?Sized>(network: &mut RuleFactNetwork<T>, rng: &mut R) {
    for fact in &mut network.facts {
        fact.value = T::lit(rng.random::<f64>());
    }
}

/// Ids of the facts in `layer`, for networks built by [`gen_layered`].
pub fn facts_in_layer<T>(network: &RuleFactNetwork<T>, layer: usize) -> Vec<FactId> {
    network.facts.iter().filter(|f| f.layer == Some(layer)).map(|f| f.id).collect()
}
