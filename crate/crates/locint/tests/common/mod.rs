#![allow(dead_code)]

use locint::model::{Mechanism, NodeSpec};
use locint::rational::{ratio, Rational};
use locint::{BayesNet, NodeId, Pattern, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A distribution with small integer weights; zeros are common.
pub fn random_dist(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| ratio(x, total)).collect();
        }
    }
}

fn node(k: usize) -> NodeId {
    NodeId::named(format!("n{k}"))
}

/// A random net on `n` named nodes with up to two parents each, arities in `2..=max_arity`.
pub fn random_net(rng: &mut impl Rng, n: usize, max_arity: usize) -> BayesNet {
    let arity: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_arity)).collect();
    let mut specs = Vec::new();
    for k in 0..n {
        let mut parents: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.4)).collect();
        parents.truncate(2);
        let rows: usize = parents.iter().map(|&p| arity[p]).product();
        specs.push(NodeSpec {
            id: node(k),
            states: StateSpace::range(arity[k]),
            mechanism: Mechanism::new(
                parents.iter().map(|&p| node(p)).collect(),
                (0..rows).map(|_| random_dist(rng, arity[k])).collect(),
            ),
        });
    }
    BayesNet::new("random", specs).expect("valid random net")
}

/// A deterministic binary net with uniform roots: each non-root is a random boolean
/// function of up to two earlier nodes.
pub fn random_deterministic_net(rng: &mut impl Rng, n: usize, roots: usize) -> BayesNet {
    let mut specs = Vec::new();
    for k in 0..n {
        if k < roots {
            specs.push(NodeSpec { id: node(k), states: StateSpace::binary(), mechanism: Mechanism::root(vec![ratio(1, 2); 2]) });
            continue;
        }
        let mut parents: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
        parents.truncate(2);
        if parents.is_empty() {
            parents.push(rng.gen_range(0..k));
        }
        let rows = 1usize << parents.len();
        specs.push(NodeSpec {
            id: node(k),
            states: StateSpace::binary(),
            mechanism: Mechanism::new(
                parents.iter().map(|&p| node(p)).collect(),
                (0..rows)
                    .map(|_| if rng.gen_bool(0.5) { vec![ratio(1, 1), ratio(0, 1)] } else { vec![ratio(0, 1), ratio(1, 1)] })
                    .collect(),
            ),
        });
    }
    BayesNet::new("deterministic", specs).expect("valid deterministic net")
}

/// Every pattern of the net: every nonempty node subset with every assignment.
pub fn all_patterns(net: &BayesNet) -> Vec<Pattern> {
    let ids = net.node_ids();
    let mut out = Vec::new();
    for mask in 1u32..(1 << ids.len()) {
        let domain: Vec<NodeId> = (0..ids.len()).filter(|k| mask & (1 << k) != 0).map(|k| ids[k].clone()).collect();
        out.extend(locint::pattern::assignments(net, &domain).unwrap());
    }
    out
}

/// Every full assignment with its factorized probability, by explicit products of mechanism entries.
pub fn full_joint(net: &BayesNet) -> Vec<(Pattern, Rational)> {
    locint::pattern::assignments(net, &net.node_ids())
        .unwrap()
        .into_iter()
        .map(|x| {
            let p = net.joint_probability(&x).unwrap();
            (x, p)
        })
        .collect()
}

/// `p(x_A)` by summing the joint over explicit completions.
pub fn oracle_marginal(joint: &[(Pattern, Rational)], pattern: &Pattern) -> Rational {
    joint.iter().filter(|(x, _)| pattern.compatible(x)).map(|(_, p)| p.clone()).sum()
}
