mod common;

use std::collections::BTreeSet;

use locint::builtin::{self, mc_const, mc_eps};
use locint::disintegration::{
    disintegration_hierarchy, entity_set_union, iota_entities, refinement_free, verify_disintegration_theorem,
    verify_disintegration_theorem_unfiltered,
};
use locint::integration::{cli, sli};
use locint::partition::bell;
use locint::{BayesNet, NodeId, Pattern};
use num::{BigUint, One};
use proptest::prelude::*;

use common::{random_net, rng};

fn subsets(domain: &[NodeId]) -> impl Iterator<Item = Vec<NodeId>> + '_ {
    (1u32..(1 << domain.len()))
        .filter(|m| m.count_ones() >= 2)
        .map(move |m| (0..domain.len()).filter(|k| m & (1 << k) != 0).map(|k| domain[k].clone()).collect())
}

/// Positive-ι sub-patterns of a trajectory, found with the public `cli` alone.
fn brute_force_entities(net: &BayesNet, trajectory: &Pattern) -> BTreeSet<Pattern> {
    let domain = trajectory.domain();
    subsets(&domain)
        .map(|a| trajectory.restrict(&a))
        .filter(|x| cli(net, x).unwrap().value.ratio() > &num::BigRational::one())
        .collect()
}

fn check_hierarchy(net: &BayesNet, trajectory: &Pattern) {
    let h = disintegration_hierarchy(net, trajectory).unwrap();
    let total: usize = h.level_sizes().iter().sum();
    assert_eq!(BigUint::from(total), bell(trajectory.len()));
    for level in &h.levels {
        for p in &level.partitions {
            assert_eq!(&sli(net, trajectory, p).unwrap(), &level.sli);
        }
    }
    for w in h.levels.windows(2) {
        assert!(w[0].sli.ratio() < w[1].sli.ratio());
    }

    // Refinement-free levels recomputed from the definition.
    let rf = refinement_free(&h);
    for (i, level) in h.levels.iter().enumerate() {
        let expected: Vec<_> = level
            .partitions
            .iter()
            .filter(|p| {
                !h.levels[..=i]
                    .iter()
                    .flat_map(|l| l.partitions.iter())
                    .any(|q| q != *p && q.refines(p).unwrap())
            })
            .cloned()
            .collect();
        assert_eq!(rf.levels[i], expected);
    }

    let found: BTreeSet<Pattern> = iota_entities(net, trajectory).unwrap().into_iter().map(|e| e.pattern).collect();
    for e in &found {
        assert!(cli(net, e).unwrap().is_entity, "{e}");
    }
    assert_eq!(found, brute_force_entities(net, trajectory));
}

#[test]
fn mc_const_theorem_is_exhaustive() {
    let net = mc_const();
    for (t, _) in net.enumerate_trajectories().unwrap() {
        check_hierarchy(&net, &t);
        assert!(verify_disintegration_theorem(&net, &t).unwrap().passed());
    }
}

#[test]
fn mc_eps_theorem_is_exhaustive() {
    let net = mc_eps(&builtin::default_eps()).unwrap();
    let trajectories = net.enumerate_trajectories().unwrap();
    assert_eq!(trajectories.len(), 64);
    for (t, _) in &trajectories {
        check_hierarchy(&net, t);
        let report = verify_disintegration_theorem(&net, t).unwrap();
        assert!(report.passed(), "{t}: {:?}", report.counterexamples);
        assert_eq!(report.patterns_scanned, 57);
    }
}

#[test]
fn unfiltered_hierarchy_breaks_the_theorem() {
    let net = mc_const();
    let (t, _) = &net.enumerate_trajectories().unwrap()[0];
    let report = verify_disintegration_theorem_unfiltered(&net, t).unwrap();
    assert!(!report.passed());
}

#[test]
fn union_of_entity_sets() {
    let net = mc_const();
    let union = entity_set_union(&net).unwrap();
    // Eight row segments per trajectory; each row value gives its own patterns.
    assert_eq!(union.len(), 16);
    let mut expected = BTreeSet::new();
    for (t, _) in net.enumerate_trajectories().unwrap() {
        expected.extend(brute_force_entities(&net, &t));
    }
    assert_eq!(union.into_iter().map(|e| e.pattern).collect::<BTreeSet<_>>(), expected);
}

#[test]
fn first_level_is_the_global_minimum() {
    let net = mc_eps(&builtin::default_eps()).unwrap();
    let t = &builtin::mc_eps_representatives()[1];
    let h = disintegration_hierarchy(&net, t).unwrap();
    let unit = h.level_of(&locint::SetPartition::one(&t.domain())).unwrap();
    assert!(h.levels[unit].sli.ratio().is_one());
    assert!(h.levels[0].sli.ratio() <= h.levels[unit].sli.ratio());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theorem_holds_on_random_nets(seed in any::<u64>(), n in 2usize..=5) {
        let net = random_net(&mut rng(seed), n, 2);
        let trajectories = net.enumerate_trajectories().unwrap();
        for (t, _) in trajectories.iter().take(6) {
            check_hierarchy(&net, t);
            prop_assert!(verify_disintegration_theorem(&net, t).unwrap().passed());
        }
    }
}
