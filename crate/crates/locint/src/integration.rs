//! Specific and complete local integration.
//!
//! `mi_π(x_O) = log₂ p_O(x_O) / ∏_{b∈π} p_b(x_b)`. Values are carried as the
//! exact ratio inside the logarithm; bits are for display only.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BayesNet, Mechanism, NodeId, NodeSpec, StateSpace};
use crate::partition::{RgsIter, SetPartition, DEFAULT_PARTITION_CAP};
use crate::pattern::Pattern;
use crate::rational::{fmt_rational, log2, pow, Rational};

/// An SLI value as the exact ratio `p_O / ∏ p_b`. Ordering and equality are exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SliValue {
    ratio: Rational,
}

impl SliValue {
    pub fn from_ratio(ratio: Rational) -> Self {
        debug_assert!(ratio.is_positive());
        SliValue { ratio }
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    /// `log₂` of the ratio, for display.
    pub fn bits(&self) -> f64 {
        if self.ratio.is_one() {
            0.0
        } else {
            log2(&self.ratio)
        }
    }

    pub fn is_positive(&self) -> bool {
        self.ratio > Rational::one()
    }
}

impl fmt::Display for SliValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bit ({})", self.bits(), fmt_rational(&self.ratio))
    }
}

impl Serialize for SliValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SliValue", 2)?;
        st.serialize_field("ratio", &fmt_rational(&self.ratio))?;
        st.serialize_field("bits", &self.bits())?;
        st.end()
    }
}

/// Complete local integration `ι(x_O)` and the partition attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliResult {
    pub value: SliValue,
    pub witness: SetPartition<NodeId>,
    pub is_entity: bool,
}

/// Marginals `p(x_S)` of every sub-pattern `x_S` of a fixed pattern, indexed by bitmask
/// over the pattern's domain (bit `i` is the `i`-th node in canonical order).
#[derive(Clone, Debug)]
pub struct MarginalTable {
    domain: Vec<NodeId>,
    probs: Vec<Rational>,
}

/// Largest pattern for which a subset-marginal table is built.
const MAX_TABLE_NODES: usize = 24;

impl MarginalTable {
    pub fn new(net: &BayesNet, pattern: &Pattern) -> Result<Self> {
        let resolved = net.resolve(pattern)?;
        let n = resolved.len();
        if n > MAX_TABLE_NODES {
            return Err(Error::PartitionCap { size: n, cap: MAX_TABLE_NODES });
        }
        let domain = pattern.domain();
        let probs = match net.support() {
            Ok(support) => {
                // Agreement-mask histogram, then superset sums: p(x_S) = Σ_{m ⊇ S} f[m].
                let mut f = vec![Rational::zero(); 1 << n];
                for (x, p) in support.states.iter().zip(&support.probs) {
                    let mask = resolved
                        .iter()
                        .enumerate()
                        .filter(|(_, &(i, v))| x[i] == v)
                        .fold(0usize, |m, (k, _)| m | (1 << k));
                    f[mask] += p;
                }
                for bit in 0..n {
                    for mask in 0..(1usize << n) {
                        if mask & (1 << bit) == 0 {
                            let add = f[mask | (1 << bit)].clone();
                            f[mask] += add;
                        }
                    }
                }
                f
            }
            Err(Error::StateCap { .. }) => (0..1usize << n)
                .into_par_iter()
                .map(|mask| {
                    let sub = Pattern::from_pairs(
                        (0..n).filter(|k| mask & (1 << k) != 0).map(|k| (domain[k].clone(), resolved[k].1)),
                    )?;
                    net.marginal_probability(&sub)
                })
                .collect::<Result<Vec<_>>>()?,
            Err(e) => return Err(e),
        };
        Ok(MarginalTable { domain, probs })
    }

    pub fn domain(&self) -> &[NodeId] {
        &self.domain
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.domain.len()) - 1
    }

    pub fn prob(&self, mask: usize) -> &Rational {
        &self.probs[mask]
    }

    pub fn mask_of(&self, nodes: &[NodeId]) -> Result<usize> {
        nodes.iter().try_fold(0usize, |m, id| {
            let k = self
                .domain
                .binary_search(id)
                .map_err(|_| Error::PartitionMismatch(format!("node `{id}` is not in the pattern")))?;
            Ok(m | (1 << k))
        })
    }

    fn bits_of(mask: usize) -> Vec<usize> {
        (0..usize::BITS as usize).filter(|k| mask & (1 << k) != 0).collect()
    }

    /// Block masks of a restricted-growth string over the set bits of `mask`.
    pub fn block_masks(mask: usize, rgs: &[u32]) -> Vec<usize> {
        let bits = Self::bits_of(mask);
        let k = rgs.iter().max().map_or(0, |m| *m as usize + 1);
        let mut blocks = vec![0usize; k];
        for (&b, &r) in bits.iter().zip(rgs) {
            blocks[r as usize] |= 1 << b;
        }
        blocks
    }

    /// SLI ratio of the sub-pattern on `mask` w.r.t. the given blocks, with the 0/0 convention.
    pub fn sli_ratio(&self, mask: usize, blocks: &[usize]) -> Result<Rational> {
        let po = &self.probs[mask];
        let mut denom = Rational::one();
        for &b in blocks {
            denom *= &self.probs[b];
        }
        if po.is_zero() {
            return if denom.is_zero() { Ok(Rational::one()) } else { Err(Error::ImpossiblePattern) };
        }
        Ok(po / denom)
    }

    /// `ι` of the sub-pattern on `mask`: the first restricted-growth minimiser over non-unit partitions.
    pub fn cli(&self, mask: usize) -> Result<(Rational, Vec<u32>)> {
        let n = mask.count_ones() as usize;
        if n < 2 {
            return Err(Error::SingletonCli);
        }
        if n > DEFAULT_PARTITION_CAP {
            return Err(Error::PartitionCap { size: n, cap: DEFAULT_PARTITION_CAP });
        }
        if self.probs[mask].is_zero() {
            return Err(Error::ImpossiblePattern);
        }
        let best = |a: (Rational, Vec<u32>), b: (Rational, Vec<u32>)| match a.0.cmp(&b.0) {
            Ordering::Greater => b,
            Ordering::Less => a,
            Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        };
        let evaluate = |rgs: Vec<u32>| -> Result<(Rational, Vec<u32>)> {
            let blocks = Self::block_masks(mask, &rgs);
            Ok((self.sli_ratio(mask, &blocks)?, rgs))
        };
        let candidates = RgsIter::new(n).skip(1);
        let result = if n >= 8 {
            candidates
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(evaluate)
                .try_reduce_with(|a, b| Ok(best(a, b)))
                .expect("at least one non-unit partition")?
        } else {
            let mut acc: Option<(Rational, Vec<u32>)> = None;
            for rgs in candidates {
                let e = evaluate(rgs)?;
                acc = Some(match acc {
                    None => e,
                    Some(a) => best(a, e),
                });
            }
            acc.expect("at least one non-unit partition")
        };
        Ok(result)
    }

    /// The partition of `mask`'s nodes described by `rgs`.
    pub fn partition(&self, mask: usize, rgs: &[u32]) -> SetPartition<NodeId> {
        let ground: Vec<NodeId> = Self::bits_of(mask).into_iter().map(|k| self.domain[k].clone()).collect();
        SetPartition::from_rgs_unchecked(ground, rgs.to_vec())
    }

    /// Sub-pattern of `pattern` on `mask`.
    pub fn sub_pattern(&self, pattern: &Pattern, mask: usize) -> Pattern {
        let nodes: Vec<&NodeId> = Self::bits_of(mask).into_iter().map(|k| &self.domain[k]).collect();
        pattern.restrict(nodes)
    }
}

fn check_partition(pattern: &Pattern, partition: &SetPartition<NodeId>) -> Result<()> {
    if partition.ground() != pattern.domain().as_slice() {
        return Err(Error::PartitionMismatch("partition ground differs from pattern domain".into()));
    }
    Ok(())
}

/// `mi_π(x_O)` as an exact ratio.
pub fn sli(net: &BayesNet, pattern: &Pattern, partition: &SetPartition<NodeId>) -> Result<SliValue> {
    check_partition(pattern, partition)?;
    let po = net.marginal_probability(pattern)?;
    let mut denom = Rational::one();
    for block in partition.blocks() {
        denom *= net.marginal_probability(&pattern.restrict(&block))?;
    }
    if po.is_zero() {
        return if denom.is_zero() {
            Ok(SliValue::from_ratio(Rational::one()))
        } else {
            Err(Error::ImpossiblePattern)
        };
    }
    Ok(SliValue::from_ratio(po / denom))
}

/// SLI on a deterministic net with uniform roots, from trajectory counts:
/// `|𝒳_roots|^{|π|-1} · N(x_O) / ∏ N(x_b)`.
pub fn sli_deterministic(net: &BayesNet, pattern: &Pattern, partition: &SetPartition<NodeId>) -> Result<SliValue> {
    check_partition(pattern, partition)?;
    let roots = net.deterministic_pattern_count(&Pattern::new())?;
    let no = net.deterministic_pattern_count(pattern)?;
    let mut prod = num::BigInt::one();
    for block in partition.blocks() {
        prod *= net.deterministic_pattern_count(&pattern.restrict(&block))?;
    }
    if no.is_zero() {
        return if prod.is_zero() {
            Ok(SliValue::from_ratio(Rational::one()))
        } else {
            Err(Error::ImpossiblePattern)
        };
    }
    let scale = pow(&Rational::from_integer(roots), partition.len() as i64 - 1);
    Ok(SliValue::from_ratio(scale * Rational::new(no, prod)))
}

/// `ι(x_O)`: minimum SLI over all non-unit partitions; ties go to the first partition
/// in restricted-growth order.
pub fn cli(net: &BayesNet, pattern: &Pattern) -> Result<CliResult> {
    if pattern.len() < 2 {
        return Err(Error::SingletonCli);
    }
    let table = MarginalTable::new(net, pattern)?;
    let mask = table.full_mask();
    let (ratio, rgs) = table.cli(mask)?;
    let value = SliValue::from_ratio(ratio);
    Ok(CliResult { is_entity: value.is_positive(), witness: table.partition(mask, &rgs), value })
}

/// `mi_π(x_O) / (−(|π|−1) log₂ p_O(x_O))`.
pub fn normalized_sli(net: &BayesNet, pattern: &Pattern, partition: &SetPartition<NodeId>) -> Result<f64> {
    if partition.is_unit() {
        return Err(Error::InvalidArgument("normalised SLI is undefined for the unit partition".into()));
    }
    let po = net.marginal_probability(pattern)?;
    if po.is_zero() || po.is_one() {
        return Err(Error::InvalidArgument("normalised SLI needs 0 < p_O < 1".into()));
    }
    let v = sli(net, pattern, partition)?;
    Ok(v.bits() / sli_upper_bound(&po, partition.len())?)
}

/// `−(k−1) log₂ p`, the largest SLI a pattern of probability `p` can have w.r.t. a `k`-block partition.
pub fn sli_upper_bound(p: &Rational, k: usize) -> Result<f64> {
    if !p.is_positive() || p > &Rational::one() {
        return Err(Error::InvalidArgument("bound needs 0 < p <= 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("partition has at least one block".into()));
    }
    if k == 1 || p.is_one() {
        return Ok(0.0);
    }
    Ok(-((k - 1) as f64) * log2(p))
}

/// `mi_π − mi_ξ` as the ratio `∏_{a∈ξ} p_a / ∏_{b∈π} p_b`.
pub fn delta_sli(
    net: &BayesNet,
    pattern: &Pattern,
    pi: &SetPartition<NodeId>,
    xi: &SetPartition<NodeId>,
) -> Result<SliValue> {
    check_partition(pattern, pi)?;
    check_partition(pattern, xi)?;
    let prod = |p: &SetPartition<NodeId>| -> Result<Rational> {
        p.blocks().iter().try_fold(Rational::one(), |acc, b| Ok(acc * net.marginal_probability(&pattern.restrict(b))?))
    };
    let (a, b) = (prod(xi)?, prod(pi)?);
    if a.is_zero() || b.is_zero() {
        return Err(Error::ImpossiblePattern);
    }
    Ok(SliValue::from_ratio(a / b))
}

fn check_q(q: &Rational) -> Result<()> {
    if !q.is_positive() || q >= &Rational::one() {
        return Err(Error::InvalidArgument("q must lie strictly between 0 and 1".into()));
    }
    Ok(())
}

/// A pattern whose SLI w.r.t. `𝟎` attains the upper bound: `n` binary nodes all copying
/// node `x1`, which is 0 with probability `q`. Returns the net, the all-zero pattern and `𝟎`.
pub fn max_sli_fixture(q: &Rational, n: usize) -> Result<(BayesNet, Pattern, SetPartition<NodeId>)> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the construction needs n >= 2".into()));
    }
    let one = Rational::one();
    let zero = Rational::zero();
    let head = NodeId::named("x1");
    let mut specs = vec![NodeSpec {
        id: head.clone(),
        states: StateSpace::binary(),
        mechanism: Mechanism::root(vec![q.clone(), &one - q]),
    }];
    for k in 2..=n {
        specs.push(NodeSpec {
            id: NodeId::named(format!("x{k}")),
            states: StateSpace::binary(),
            mechanism: Mechanism::new(
                vec![head.clone()],
                vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            ),
        });
    }
    let net = BayesNet::new("max-sli", specs)?;
    let pattern = Pattern::from_pairs(net.node_ids().into_iter().map(|id| (id, 0)))?;
    let partition = SetPartition::zero(&pattern.domain());
    Ok((net, pattern, partition))
}

/// A pattern with negative SLI: `k` binary nodes where the all-zero pattern has
/// probability `q`, each pattern with exactly one 1 has `(1−q)/k`, and all others 0.
/// SLI of the all-zero pattern w.r.t. `𝟎` is `log₂ q / (1 − (1−q)/k)^k`.
pub fn negative_sli_fixture(q: &Rational, k: usize) -> Result<(BayesNet, Pattern, SetPartition<NodeId>)> {
    check_q(q)?;
    if k < 2 {
        return Err(Error::InvalidArgument("the construction needs k >= 2".into()));
    }
    if k > 20 {
        return Err(Error::InvalidArgument("k too large for an explicit joint".into()));
    }
    let share = (Rational::one() - q) / Rational::from_integer((k as i64).into());
    let joint: Vec<Rational> = (0..1usize << k)
        .map(|x| match x.count_ones() {
            0 => q.clone(),
            1 => share.clone(),
            _ => Rational::zero(),
        })
        .collect();
    let nodes = (1..=k).map(|i| (NodeId::named(format!("x{i:02}")), StateSpace::binary())).collect();
    let net = BayesNet::from_joint("negative-sli", nodes, &joint)?;
    let pattern = Pattern::from_pairs(net.node_ids().into_iter().map(|id| (id, 0)))?;
    let partition = SetPartition::zero(&pattern.domain());
    Ok((net, pattern, partition))
}

/// One row of an SLI report.
#[derive(Clone, Debug, Serialize)]
pub struct SliRow {
    pub pattern: String,
    pub partition: String,
    pub ratio: String,
    pub bits: f64,
}

/// SLI of a pattern w.r.t. every partition of its domain, as CSV (`partition,blocks,ratio,bits`),
/// in restricted-growth order.
pub fn sli_sweep_csv(net: &BayesNet, pattern: &Pattern) -> Result<String> {
    let table = MarginalTable::new(net, pattern)?;
    let mask = table.full_mask();
    let n = pattern.len();
    if n == 0 || n > DEFAULT_PARTITION_CAP {
        return Err(Error::PartitionCap { size: n, cap: DEFAULT_PARTITION_CAP });
    }
    let mut out = String::from("partition,blocks,ratio,bits\n");
    for rgs in RgsIter::new(n) {
        let blocks = MarginalTable::block_masks(mask, &rgs);
        let v = SliValue::from_ratio(table.sli_ratio(mask, &blocks)?);
        out.push_str(&format!(
            "\"{}\",{},{},{}\n",
            table.partition(mask, &rgs),
            blocks.len(),
            fmt_rational(v.ratio()),
            v.bits()
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coins() -> BayesNet {
        let coin = |n: &str| NodeSpec {
            id: NodeId::named(n),
            states: StateSpace::binary(),
            mechanism: Mechanism::root(vec![ratio(1, 2), ratio(1, 2)]),
        };
        BayesNet::new("coins", vec![coin("a"), coin("b")]).unwrap()
    }

    #[test]
    fn independent_coins_are_not_integrated() {
        let net = coins();
        let p = net.parse_pattern("a=0,b=0").unwrap();
        let c = cli(&net, &p).unwrap();
        assert_eq!(c.value.ratio(), &ratio(1, 1));
        assert!(!c.is_entity);
        assert_eq!(c.value.bits(), 0.0);
    }

    #[test]
    fn singleton_cli_is_undefined() {
        let net = coins();
        let p = net.parse_pattern("a=0").unwrap();
        assert_eq!(cli(&net, &p), Err(Error::SingletonCli));
    }

    #[test]
    fn upper_bound_formula() {
        assert_eq!(sli_upper_bound(&ratio(1, 4), 2).unwrap(), 2.0);
        assert_eq!(sli_upper_bound(&ratio(1, 4), 1).unwrap(), 0.0);
        assert_eq!(sli_upper_bound(&ratio(1, 2), 3).unwrap(), 2.0);
        assert!(sli_upper_bound(&ratio(0, 1), 2).is_err());
    }

    #[test]
    fn fixtures() {
        let (net, p, pi) = max_sli_fixture(&ratio(1, 2), 3).unwrap();
        assert_eq!(sli(&net, &p, &pi).unwrap().ratio(), &ratio(4, 1));
        let (net, p, pi) = max_sli_fixture(&ratio(1, 4), 2).unwrap();
        assert_eq!(sli(&net, &p, &pi).unwrap().bits(), 2.0);
        assert!(max_sli_fixture(&ratio(1, 2), 1).is_err());
        let (net, p, pi) = negative_sli_fixture(&ratio(1, 2), 2).unwrap();
        assert_eq!(sli(&net, &p, &pi).unwrap().ratio(), &ratio(8, 9));
    }
}
