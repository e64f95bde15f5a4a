//! The two-cell example chains and their symmetry groups, generated from [`MarkovSpec`]s.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{build_markov_chain, BayesNet, DrivenKernel, Kernel, MarkovSpec, StateSpace};
use crate::pattern::Pattern;
use crate::rational::{ratio, Rational};
use crate::symmetry::{GeneratedGroup, Permutation};

fn uniform(n: usize) -> Vec<Rational> {
    vec![ratio(1, n as i64); n]
}

/// `MC=`: two binary cells that keep their value forever, three time steps, uniform start.
pub fn mc_const_spec() -> MarkovSpec {
    let matrix = (0..4)
        .map(|i| (0..4).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    MarkovSpec {
        name: "mc-const".into(),
        states: vec![StateSpace::binary(), StateSpace::binary()],
        times: 3,
        kernel: Kernel::Joint(matrix),
        initial: uniform(4),
    }
}

/// `MCε`: like `MC=`, but every other joint state is reached with probability `ε`.
pub fn mc_eps_spec(eps: &Rational) -> Result<MarkovSpec> {
    if eps <= &Rational::zero() || eps >= &ratio(1, 3) {
        return Err(Error::Config("eps must lie strictly between 0 and 1/3".into()));
    }
    let stay = Rational::one() - eps * Rational::from_integer(3.into());
    let matrix = (0..4)
        .map(|i| (0..4).map(|k| if i == k { stay.clone() } else { eps.clone() }).collect())
        .collect();
    Ok(MarkovSpec {
        name: "mc-eps".into(),
        states: vec![StateSpace::binary(), StateSpace::binary()],
        times: 3,
        kernel: Kernel::Joint(matrix),
        initial: uniform(4),
    })
}

/// The default `ε = 1/100`.
pub fn default_eps() -> Rational {
    ratio(1, 100)
}

pub fn mc_const() -> BayesNet {
    build_markov_chain(&mc_const_spec()).expect("built-in spec is valid")
}

pub fn mc_eps(eps: &Rational) -> Result<BayesNet> {
    build_markov_chain(&mc_eps_spec(eps)?)
}

/// Representatives of the three `MCε` trajectory classes: no, one, and two ε-transitions.
pub fn mc_eps_representatives() -> [Pattern; 3] {
    let grid = |v: [u32; 6]| Pattern::grid((0..6).map(|k| (k as u32 % 2 + 1, k as u32 / 2, v[k])));
    [grid([0, 1, 0, 1, 0, 1]), grid([0, 1, 0, 1, 0, 0]), grid([0, 1, 0, 0, 0, 1])]
}

/// Swap of the two rows at every time step.
pub fn flip(times: u32) -> Permutation {
    Permutation::spatial(&[(1, 2), (2, 1)], times).expect("valid permutation")
}

/// Row-wise time transpositions plus the row flip: `(3!)² · 2 = 72` elements.
pub fn mc_const_group() -> GeneratedGroup {
    let mut gens = Vec::new();
    for j in 1..=2 {
        gens.push(Permutation::row_time(j, &[(0, 1), (1, 0)]).expect("valid"));
        gens.push(Permutation::row_time(j, &[(1, 2), (2, 1)]).expect("valid"));
    }
    gens.push(flip(3));
    GeneratedGroup::new(gens)
}

/// Row flip and global time reversal: 4 elements.
pub fn mc_eps_group() -> GeneratedGroup {
    GeneratedGroup::new(vec![flip(3), Permutation::time(&[1, 2], &[(0, 2), (2, 0)]).expect("valid")])
}

/// A driven chain where node 1 is a thermostat reading the majority of the `n` driven
/// binary nodes `2..=n+1`: it switches to 1 iff at most half of them are 1. Each driven
/// node that disagrees with the thermostat moves to its value with probability `ε`.
pub fn thermostat_spec(n: u32, times: u32, eps: &Rational) -> Result<MarkovSpec> {
    if n < 1 {
        return Err(Error::Config("thermostat needs at least one driven node".into()));
    }
    if eps < &Rational::zero() || eps > &Rational::one() {
        return Err(Error::Config("eps must be a probability".into()));
    }
    let jn = n + 1;
    let states = vec![StateSpace::binary(); jn as usize];
    let slice = 1usize << jn;
    let na = 1usize << n;
    let bit = |idx: usize, j: u32, width: u32| ((idx >> (width - j)) & 1) as u32;
    let driving_matrix: Vec<Vec<Rational>> = (0..2u32)
        .map(|b| {
            (0..slice)
                .map(|s| {
                    let ones: u32 = (2..=jn).map(|j| bit(s, j, jn)).sum();
                    let target = u32::from(2 * ones <= n);
                    if b == target {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let driven_matrix: Vec<Vec<Rational>> = (0..na)
        .map(|next| {
            (0..2 * na)
                .map(|col| {
                    let b = (col / na) as u32;
                    let prev = col % na;
                    (1..=n).fold(Rational::one(), |acc, k| {
                        let (from, to) = (bit(prev, k, n), bit(next, k, n));
                        let p = if from == b {
                            if to == from { Rational::one() } else { Rational::zero() }
                        } else if to == b {
                            eps.clone()
                        } else {
                            Rational::one() - eps
                        };
                        acc * p
                    })
                })
                .collect()
        })
        .collect();
    Ok(MarkovSpec {
        name: "thermostat".into(),
        states,
        times,
        kernel: Kernel::Driven(DrivenKernel { driving: vec![1], driving_matrix, driven_matrix }),
        initial: uniform(slice),
    })
}
