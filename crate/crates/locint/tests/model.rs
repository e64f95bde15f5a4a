mod common;

use locint::rational::Rational;
use num::{BigInt, One, Zero};
use proptest::prelude::*;

use common::{all_patterns, full_joint, oracle_marginal, random_deterministic_net, random_net, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn joint_sums_to_one(seed in any::<u64>(), n in 1usize..=6) {
        let net = random_net(&mut rng(seed), n, 3);
        let total: Rational = full_joint(&net).into_iter().map(|(_, p)| p).sum();
        prop_assert_eq!(total, Rational::one());
        let support: Rational = net.support().unwrap().probs.iter().sum();
        prop_assert_eq!(support, Rational::one());
    }

    #[test]
    fn marginals_match_summed_completions(seed in any::<u64>(), n in 1usize..=5) {
        let net = random_net(&mut rng(seed), n, 3);
        let joint = full_joint(&net);
        for x in all_patterns(&net) {
            prop_assert_eq!(net.marginal_probability(&x).unwrap(), oracle_marginal(&joint, &x), "{}", x);
        }
    }

    #[test]
    fn sub_patterns_are_at_least_as_likely(seed in any::<u64>(), n in 2usize..=5) {
        let net = random_net(&mut rng(seed), n, 2);
        for x in all_patterns(&net) {
            let p = net.marginal_probability(&x).unwrap();
            if p.is_zero() {
                continue;
            }
            let domain = x.domain();
            for mask in 1u32..(1 << domain.len()) {
                let b: Vec<_> = (0..domain.len()).filter(|k| mask & (1 << k) != 0).map(|k| domain[k].clone()).collect();
                prop_assert!(net.marginal_probability(&x.restrict(&b)).unwrap() >= p);
            }
        }
    }

    #[test]
    fn deterministic_probabilities_are_counts(seed in any::<u64>(), n in 2usize..=6, roots in 1usize..=2) {
        let net = random_deterministic_net(&mut rng(seed), n, roots.min(n - 1));
        let root_configs = BigInt::from(1u32 << roots.min(n - 1));
        for x in all_patterns(&net) {
            let p = net.marginal_probability(&x).unwrap();
            let count = net.deterministic_pattern_count(&x).unwrap();
            prop_assert_eq!(p * Rational::from_integer(root_configs.clone()), Rational::from_integer(count));
        }
    }
}

#[test]
fn eight_node_net_marginals_are_exhaustively_correct() {
    let net = random_net(&mut rng(8), 8, 2);
    let joint = full_joint(&net);
    let patterns = all_patterns(&net);
    assert_eq!(patterns.len(), 3usize.pow(8) - 1);
    for x in patterns {
        assert_eq!(net.marginal_probability(&x).unwrap(), oracle_marginal(&joint, &x), "{x}");
    }
}
