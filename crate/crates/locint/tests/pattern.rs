mod common;

use std::collections::{BTreeSet, HashSet};

use locint::partition::{enumerate_partitions, refines_rgs};
use locint::pattern::{anti_patterns, anti_patterns_wrt, assignments, occurs_in, trajectory_set};
use locint::Pattern;
use num::Zero;
use proptest::prelude::*;

use common::{all_patterns, random_net, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn occurrence_matches_trajectory_sets(seed in any::<u64>(), n in 1usize..=5) {
        let net = random_net(&mut rng(seed), n, 2);
        let everything = assignments(&net, &net.node_ids()).unwrap();
        for x in all_patterns(&net) {
            let all: BTreeSet<Pattern> = trajectory_set(&net, &x, false).unwrap().into_iter().collect();
            let possible: BTreeSet<Pattern> = trajectory_set(&net, &x, true).unwrap().into_iter().collect();
            for tau in &everything {
                let occurs = occurs_in(&x, tau);
                prop_assert_eq!(all.contains(tau), occurs);
                let positive = !net.joint_probability(tau).unwrap().is_zero();
                prop_assert_eq!(possible.contains(tau), occurs && positive);
            }
        }
    }
}

#[test]
fn eight_node_occurrence_is_exhaustive() {
    let net = random_net(&mut rng(3), 8, 2);
    let everything = assignments(&net, &net.node_ids()).unwrap();
    for x in all_patterns(&net) {
        let set: HashSet<Pattern> = trajectory_set(&net, &x, false).unwrap().into_iter().collect();
        assert_eq!(set.len(), everything.iter().filter(|t| occurs_in(&x, t)).count());
        assert!(set.iter().all(|t| occurs_in(&x, t)));
    }
}

#[test]
fn anti_patterns_shrink_under_refinement() {
    let net = random_net(&mut rng(11), 4, 3);
    for x in all_patterns(&net) {
        let parts: Vec<_> = enumerate_partitions(&x.domain(), 8).unwrap().collect();
        let anti: Vec<BTreeSet<Pattern>> =
            parts.iter().map(|p| anti_patterns_wrt(&net, &x, p).unwrap().into_iter().collect()).collect();
        for (i, fine) in parts.iter().enumerate() {
            for (j, coarse) in parts.iter().enumerate() {
                if refines_rgs(fine.rgs(), coarse.rgs()) {
                    assert!(anti[i].is_subset(&anti[j]), "{x}: {fine} vs {coarse}");
                }
            }
        }
    }
}

/// Trajectory sets as bitmasks over the full assignment list.
fn masks(net: &locint::BayesNet, everything: &[Pattern]) -> Vec<(Pattern, u64)> {
    all_patterns(net)
        .into_iter()
        .map(|x| {
            let m = everything.iter().enumerate().filter(|(_, t)| occurs_in(&x, t)).fold(0u64, |m, (k, _)| m | 1 << k);
            (x, m)
        })
        .collect()
}

#[test]
fn unions_with_anti_patterns_are_not_trajectory_sets() {
    for n in 2..=6 {
        let net = random_net(&mut rng(n as u64), n, 2);
        let everything = assignments(&net, &net.node_ids()).unwrap();
        let table = masks(&net, &everything);
        let realised: HashSet<u64> = table.iter().map(|(_, m)| *m).collect();
        let by_pattern: std::collections::HashMap<&Pattern, u64> = table.iter().map(|(x, m)| (x, *m)).collect();
        let mut checked = 0;
        for (x, m) in &table {
            if x.len() < 2 {
                continue;
            }
            for bar in anti_patterns(&net, x).unwrap() {
                let union = m | by_pattern[&bar];
                assert!(!realised.contains(&union), "n={n}: {x} with {bar}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn anti_patterns_differ_everywhere() {
    let net = random_net(&mut rng(5), 3, 3);
    for x in all_patterns(&net) {
        for bar in anti_patterns(&net, &x).unwrap() {
            assert!(x.iter().all(|(k, v)| bar.get(k) != Some(v)));
            assert_eq!(bar.domain(), x.domain());
        }
    }
}
