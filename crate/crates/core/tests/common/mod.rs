#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rulenet::generators::random_weights;
use rulenet::{FactId, Network, Rule, RuleId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Contribution by exhaustive enumeration of simple backward paths from the
/// target: a fact's gain is the best weight product over those paths.
pub fn brute_contributions(net: &Network, target: FactId) -> BTreeMap<RuleId, f64> {
    fn walk(net: &Network, fact: FactId, gain: f64, on_path: &mut [bool], best: &mut [Option<f64>]) {
        if best[fact.0].is_none_or(|b| gain > b) {
            best[fact.0] = Some(gain);
        }
        for r in net.active_rules().filter(|r| r.output == fact) {
            for (input, w) in [(r.input1, r.w1), (r.input2, r.w2)] {
                if !on_path[input.0] {
                    on_path[input.0] = true;
                    walk(net, input, w * gain, on_path, best);
                    on_path[input.0] = false;
                }
            }
        }
    }
    let n = net.fact_count();
    let mut best = vec![None; n];
    let mut on_path = vec![false; n];
    on_path[target.0] = true;
    walk(net, target, 1.0, &mut on_path, &mut best);
    net.active_rules()
        .filter_map(|r| best[r.output.0].map(|g| (r.id, r.w1.max(r.w2) * g)))
        .filter(|&(_, c)| c > 0.0)
        .collect()
}

/// Random acyclic network in which every fact has at most one writer.
/// Facts are ordered by a random permutation and rules only point forward.
pub fn single_writer_dag(n_facts: usize, seed: u64) -> Network {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..n_facts).collect();
    for i in (1..n_facts).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let mut net = Network::with_facts(n_facts);
    for f in &mut net.facts {
        f.value = r.random::<f64>();
    }
    let mut id = 0;
    for pos in 2..n_facts {
        if r.random_bool(0.7) {
            let a = r.random_range(0..pos);
            let mut b = r.random_range(0..pos - 1);
            if b >= a {
                b += 1;
            }
            let (w1, w2) = random_weights::<f64, _>(&mut r);
            net.rules.push(Rule::new(id, order[a], order[b], order[pos], w1, w2));
            id += r.random_range(1..3);
        }
    }
    net.rules.sort_by_key(|rule| rule.id);
    net
}

/// Closed-form values of a single-writer acyclic network: each written fact
/// equals its rule's combination of its (already final) inputs.
pub fn dag_values(net: &Network, start: &[f64]) -> Vec<f64> {
    let mut values = start.to_vec();
    let mut done: Vec<bool> = (0..net.fact_count()).map(|f| !net.active_rules().any(|r| r.output.0 == f)).collect();
    while done.iter().any(|d| !d) {
        for r in net.active_rules() {
            if !done[r.output.0] && done[r.input1.0] && done[r.input2.0] {
                values[r.output.0] = r.w1 * values[r.input1.0] + r.w2 * values[r.input2.0];
                done[r.output.0] = true;
            }
        }
    }
    values
}
