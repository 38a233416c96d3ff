mod common;

use proptest::prelude::*;
use rulenet::experiments::{classify_and_aggregate, RecordStatus, RunRecord};
use rulenet::generators::{gen_random, random_weights, randomize_fact_values, TopologySpec};
use rulenet::io::{network_from_str, network_to_string};
use rulenet::network::{evaluate, evaluate_with_state, reachable, RunStatus};
use rulenet::pruning::{adaptive_prune, contribution_prune, PruneScope};
use rulenet::trainer::{apply_epoch, canonical_assignment, contributing_rules, difference_value};
use rulenet::{Assignment, EvalParams, FactId, Network};

use common::{brute_contributions, dag_values, rng, single_writer_dag};

fn weights_sum_to_one(net: &Network) -> bool {
    net.rules
        .iter()
        .all(|r| (r.w1 + r.w2 - 1.0).abs() <= 1e-9 && (0.0..=1.0).contains(&r.w1) && (0.0..=1.0).contains(&r.w2))
}

/// Oracle, trainee and a connected path drawn from one seed.
fn training_setup(seed: u64, n_facts: usize, n_rules: usize) -> Option<(Network, Network, FactId, FactId)> {
    let mut r = rng(seed);
    let mut perfect: Network = gen_random(n_facts, n_rules, &mut r).ok()?;
    let mut trainee: Network = gen_random(n_facts, n_rules, &mut r).ok()?;
    randomize_fact_values(&mut perfect, &mut r);
    randomize_fact_values(&mut trainee, &mut r);
    let source = FactId(seed as usize % n_facts);
    let target = (0..n_facts)
        .map(FactId)
        .find(|&t| t != source && reachable(&perfect, source, t) && reachable(&trainee, source, t))?;
    Some((perfect, trainee, source, target))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weight_sums_hold_after_every_epoch(seed in any::<u64>(), n_facts in 4usize..12, extra in 0usize..20, velocity in 0.01f64..1.0) {
        let n_rules = n_facts + extra;
        if let Some((perfect, mut trainee, source, target)) = training_setup(seed, n_facts, n_rules) {
            let params = EvalParams::default();
            let assignment = canonical_assignment(source);
            for _ in 0..20 {
                if apply_epoch(&perfect, &mut trainee, &assignment, target, velocity, &params).is_err() {
                    break;
                }
                prop_assert!(weights_sum_to_one(&trainee));
            }
        }
    }

    #[test]
    fn weight_sums_hold_after_pruning(seed in any::<u64>(), n_facts in 4usize..10, extra in 0usize..12, threshold in 0.0f64..1.0) {
        if let Some((perfect, trainee, source, target)) = training_setup(seed, n_facts, n_facts + extra) {
            let (pruned, _) = contribution_prune(&trainee, threshold, PruneScope::TargetFact, target);
            prop_assert!(weights_sum_to_one(&pruned));
            let params = EvalParams::default();
            if let Ok((pruned, _)) = adaptive_prune(&trainee, &perfect, &canonical_assignment(source), target, &params) {
                prop_assert!(weights_sum_to_one(&pruned));
            }
        }
    }

    #[test]
    fn difference_value_is_a_unit_fraction(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let dv = difference_value(a, b);
        prop_assert!((0.0..=1.0).contains(&dv));
        prop_assert_eq!(dv, difference_value(b, a));
        prop_assert_eq!(difference_value(a, a), 0.0);
    }

    #[test]
    fn evaluation_terminates_within_the_cap(seed in any::<u64>(), n_facts in 3usize..40, n_rules in 1usize..=200) {
        let mut r = rng(seed);
        let Ok(mut net) = gen_random::<f64, _>(n_facts, n_rules, &mut r) else { return Ok(()) };
        randomize_fact_values(&mut net, &mut r);
        let params = EvalParams::default();
        let out = evaluate(&net, &canonical_assignment(FactId(0)), FactId(n_facts - 1), &params).unwrap();
        prop_assert!(out.passes <= params.cap_for(&net));
        prop_assert!((0.0..=1.0).contains(&out.target_value));
        if out.status == RunStatus::NonConverging {
            prop_assert_eq!(out.passes, params.cap_for(&net));
        }
    }

    #[test]
    fn acyclic_evaluation_matches_topological_oracle(seed in any::<u64>(), n_facts in 3usize..=12, zero_start in any::<bool>(), assigned in 0usize..12, value in 0.0f64..=1.0) {
        let mut net = single_writer_dag(n_facts, seed);
        if zero_start {
            for f in &mut net.facts {
                f.value = 0.0;
            }
        }
        let source = FactId(assigned % n_facts);
        let assignment = Assignment::from([(source, value)]);
        let mut start: Vec<f64> = net.facts.iter().map(|f| f.value).collect();
        start[source.0] = value;
        let expected = dag_values(&net, &start);
        let (_, values) = evaluate_with_state(&net, &assignment, FactId(0), &EvalParams::default()).unwrap();
        for (got, want) in values.iter().zip(&expected) {
            prop_assert!((got - want).abs() <= 1e-8, "got {got}, want {want}");
        }
    }

    #[test]
    fn contribution_pruning_is_monotone_and_idempotent(seed in any::<u64>(), n_facts in 4usize..12, extra in 0usize..16, lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut r = rng(seed);
        let Ok(net) = gen_random::<f64, _>(n_facts, n_facts + extra, &mut r) else { return Ok(()) };
        let target = FactId(seed as usize % n_facts);
        let (loose, _) = contribution_prune(&net, lo, PruneScope::TargetFact, target);
        let (strict, _) = contribution_prune(&net, hi, PruneScope::TargetFact, target);
        prop_assert!(strict.rules.iter().all(|r| loose.rule(r.id).is_some()));
        let (again, report) = contribution_prune(&loose, lo, PruneScope::TargetFact, target);
        prop_assert_eq!(&again, &loose);
        prop_assert_eq!(report.removed, 0);
    }

    #[test]
    fn adaptive_pruning_never_raises_the_error(seed in any::<u64>(), n_facts in 4usize..10, extra in 0usize..12) {
        if let Some((perfect, trainee, source, target)) = training_setup(seed, n_facts, n_facts + extra) {
            let params = EvalParams::default();
            let assignment = canonical_assignment(source);
            if let Ok((pruned, report)) = adaptive_prune(&trainee, &perfect, &assignment, target, &params) {
                let (base, fin) = (report.baseline_error.unwrap(), report.final_error.unwrap());
                prop_assert!(fin <= base);
                prop_assert_eq!(report.removed + pruned.rules.len(), trainee.rules.len());
                let p = evaluate(&perfect, &assignment, target, &params).unwrap().target_value;
                let t = evaluate(&pruned, &assignment, target, &params).unwrap();
                // Rules that cannot reach the target are dropped unevaluated.
                // On cyclic networks that can move the stopping sweep, so the
                // reported error holds up to the change epsilon, and only
                // while the pruned network still converges within its cap.
                if t.status != RunStatus::NonConverging {
                    prop_assert!((difference_value(p, t.target_value) - fin).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn completions_split_into_high_and_low(errors in prop::collection::vec(prop::option::of(0.0f64..=1.0), 0..200), threshold in 0.0f64..=1.0) {
        let records: Vec<RunRecord<f64>> = errors
            .iter()
            .enumerate()
            .map(|(i, e)| RunRecord {
                seed: i as u64,
                status: if e.is_some() { RecordStatus::Completed } else { RecordStatus::ExcludedNoPath },
                error: *e,
                rules_after_prune: 1,
            })
            .collect();
        let stats = classify_and_aggregate(&records, threshold);
        prop_assert_eq!(stats.ct_high + stats.ct_low, stats.completions);
        prop_assert_eq!(stats.completions + stats.exclusions.total(), records.len());
        prop_assert_eq!(stats.mean.is_some(), stats.completions > 0);
    }

    #[test]
    fn network_files_round_trip(seed in any::<u64>(), n_facts in 3usize..15, extra in 0usize..20) {
        let mut r = rng(seed);
        let Ok(mut net) = gen_random::<f64, _>(n_facts, n_facts + extra, &mut r) else { return Ok(()) };
        randomize_fact_values(&mut net, &mut r);
        let (w1, w2) = random_weights::<f64, _>(&mut r);
        net.rules[0].w1 = w1;
        net.rules[0].w2 = w2;
        prop_assert_eq!(network_from_str(&network_to_string(&net)).unwrap(), net);
    }
}

#[test]
fn contributions_match_path_enumeration_on_small_networks() {
    let mut checked = 0;
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let n_facts = 3 + (seed as usize % 6);
        let n_rules = 1 + (seed as usize / 6) % 8;
        let Ok(net) = gen_random::<f64, _>(n_facts, n_rules, &mut r) else { continue };
        for t in 0..n_facts {
            let target = FactId(t);
            let fast = contributing_rules(&net, target).entries;
            assert_eq!(fast, brute_contributions(&net, target), "seed {seed}, target {target}");
        }
        checked += 1;
    }
    assert!(checked >= 400, "only {checked} networks generated");
}

#[test]
fn training_setups_are_mostly_usable() {
    let usable = (0..200).filter(|&s| training_setup(s, 8, 12).is_some()).count();
    assert!(usable >= 100, "{usable}");
}

#[test]
fn topology_generators_preserve_weight_sums() {
    let specs = [
        TopologySpec::Random { n_facts: 10, n_rules: 30 },
        TopologySpec::FullyConnected { n_facts: 8 },
        TopologySpec::Dense { n_facts: 10, density_pct: 50 },
        TopologySpec::Layered { depth: 5, interior_width: 5, boundary_width: 5 },
    ];
    for spec in specs {
        for seed in 0..20 {
            let net: Network = spec.generate(&mut rng(seed)).unwrap();
            assert!(weights_sum_to_one(&net), "{spec:?}");
        }
    }
}
