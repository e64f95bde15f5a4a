//! Set partitions in restricted-growth form, the refinement lattice, and counting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigUint, One, Zero};
use petgraph::unionfind::UnionFind;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::BayesNet;

/// Largest ground set accepted by [`enumerate_partitions`] unless overridden.
pub const DEFAULT_PARTITION_CAP: usize = 13;

/// A partition of a finite, sorted ground set.
///
/// Stored as a restricted-growth string: `rgs[i]` is the block of `ground[i]`,
/// blocks are numbered by first occurrence. Two partitions are equal iff their
/// grounds and strings are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition<T> {
    ground: Vec<T>,
    rgs: Vec<u32>,
}

fn canonical_rgs(labels: &[u32]) -> Vec<u32> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len() as u32;
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn sorted_ground<T: Ord + Clone>(ground: &[T]) -> Result<Vec<T>> {
    let mut g = ground.to_vec();
    g.sort();
    if g.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("ground set has repeated elements".into()));
    }
    Ok(g)
}

impl<T: Ord + Clone> SetPartition<T> {
    /// Builds from block labels aligned with `ground` (any labelling; it is canonicalised).
    pub fn from_labels(ground: &[T], labels: &[u32]) -> Result<Self> {
        if ground.len() != labels.len() {
            return Err(Error::InvalidArgument("labels and ground differ in length".into()));
        }
        let mut pairs: Vec<(T, u32)> = ground.iter().cloned().zip(labels.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let g: Vec<T> = pairs.iter().map(|p| p.0.clone()).collect();
        sorted_ground(&g)?;
        let l: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        Ok(SetPartition { ground: g, rgs: canonical_rgs(&l) })
    }

    /// Trusted constructor for an already-sorted ground and a valid restricted-growth string.
    pub(crate) fn from_rgs_unchecked(ground: Vec<T>, rgs: Vec<u32>) -> Self {
        debug_assert_eq!(canonical_rgs(&rgs), rgs);
        SetPartition { ground, rgs }
    }

    pub fn from_blocks(blocks: Vec<Vec<T>>) -> Result<Self> {
        let mut ground = Vec::new();
        let mut labels = Vec::new();
        for (k, b) in blocks.into_iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidArgument("partition blocks must be nonempty".into()));
            }
            for x in b {
                ground.push(x);
                labels.push(k as u32);
            }
        }
        if ground.is_empty() {
            return Err(Error::InvalidArgument("partition of the empty set".into()));
        }
        Self::from_labels(&ground, &labels)
    }

    /// The finest partition `𝟎`: all singletons.
    pub fn zero(ground: &[T]) -> Self {
        let g = sorted_ground(ground).expect("distinct ground elements");
        let rgs = (0..g.len() as u32).collect();
        SetPartition { ground: g, rgs }
    }

    /// The coarsest partition `𝟏`: one block.
    pub fn one(ground: &[T]) -> Self {
        let g = sorted_ground(ground).expect("distinct ground elements");
        let rgs = vec![0; g.len()];
        SetPartition { ground: g, rgs }
    }

    pub fn ground(&self) -> &[T] {
        &self.ground
    }

    pub fn rgs(&self) -> &[u32] {
        &self.rgs
    }

    /// Number of blocks `|π|`.
    pub fn len(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| *m as usize + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.len() == 1
    }

    pub fn is_zero(&self) -> bool {
        self.len() == self.ground.len()
    }

    /// Blocks in order of their first element, each sorted.
    pub fn blocks(&self) -> Vec<Vec<T>> {
        let mut out = vec![Vec::new(); self.len()];
        for (x, &b) in self.ground.iter().zip(&self.rgs) {
            out[b as usize].push(x.clone());
        }
        out
    }

    /// Block sizes in block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for &b in &self.rgs {
            out[b as usize] += 1;
        }
        out
    }

    fn same_ground(&self, other: &Self) -> Result<()> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::PartitionMismatch("partitions have different ground sets".into()))
        }
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Self) -> Result<bool> {
        self.same_ground(other)?;
        Ok(refines_rgs(&self.rgs, &other.rgs))
    }

    /// Least common coarsening.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_ground(other)?;
        let n = self.ground.len();
        let mut uf = UnionFind::<usize>::new(n);
        for rgs in [&self.rgs, &other.rgs] {
            let mut first = BTreeMap::new();
            for (i, &b) in rgs.iter().enumerate() {
                let f = *first.entry(b).or_insert(i);
                uf.union(f, i);
            }
        }
        let labels: Vec<u32> = (0..n).map(|i| uf.find(i) as u32).collect();
        Ok(SetPartition { ground: self.ground.clone(), rgs: canonical_rgs(&labels) })
    }

    /// Greatest common refinement: pairwise block intersections.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_ground(other)?;
        let k = other.len() as u32;
        let labels: Vec<u32> = self.rgs.iter().zip(&other.rgs).map(|(a, b)| a * k + b).collect();
        Ok(SetPartition { ground: self.ground.clone(), rgs: canonical_rgs(&labels) })
    }

    /// True iff `coarser` is `self` with exactly two blocks merged.
    pub fn covered_by(&self, coarser: &Self) -> Result<bool> {
        Ok(self.refines(coarser)? && self.len() == coarser.len() + 1)
    }

    /// `{b ∩ A : b ∈ π} ∖ {∅}`.
    pub fn restrict(&self, subset: &[T]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument("restriction to the empty set".into()));
        }
        let mut ground = Vec::new();
        let mut labels = Vec::new();
        for x in sorted_ground(subset)? {
            let i = self
                .ground
                .binary_search(&x)
                .map_err(|_| Error::PartitionMismatch("restriction set is not a subset of the ground".into()))?;
            ground.push(x);
            labels.push(self.rgs[i]);
        }
        Ok(SetPartition { ground, rgs: canonical_rgs(&labels) })
    }

    /// Image of the partition under an element map, `{f(b) : b ∈ π}`.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Result<SetPartition<U>> {
        let ground: Vec<U> = self.ground.iter().map(f).collect();
        SetPartition::from_labels(&ground, &self.rgs)
    }
}

/// `π ≤ ξ` on restricted-growth strings over the same ground.
pub fn refines_rgs(fine: &[u32], coarse: &[u32]) -> bool {
    let mut image: Vec<Option<u32>> = Vec::new();
    for (&a, &b) in fine.iter().zip(coarse) {
        let a = a as usize;
        if a >= image.len() {
            image.resize(a + 1, None);
        }
        match image[a] {
            None => image[a] = Some(b),
            Some(c) if c != b => return false,
            _ => {}
        }
    }
    true
}

impl<T: fmt::Display> fmt::Display for SetPartition<T> {
    /// Block string such as `{1/0,1/1}|{2/0}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.rgs.iter().max().map_or(0, |m| *m as usize + 1);
        for b in 0..k {
            if b > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            let mut first = true;
            for (x, &r) in self.ground.iter().zip(&self.rgs) {
                if r as usize == b {
                    if !first {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                    first = false;
                }
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl<T> FromStr for SetPartition<T>
where
    T: Ord + Clone + FromStr,
{
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.trim().split('|') {
            let inner = part
                .trim()
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("block `{part}` must be enclosed in braces")))?;
            let block = inner
                .split(',')
                .map(|x| x.trim().parse::<T>().map_err(|_| Error::Parse(format!("invalid element `{x}`"))))
                .collect::<Result<Vec<T>>>()?;
            blocks.push(block);
        }
        Self::from_blocks(blocks).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: fmt::Display> Serialize for SetPartition<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Restricted-growth strings of length `n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct RgsIter {
    cur: Option<Vec<u32>>,
    // max[i] = max(cur[0..i])
    max: Vec<u32>,
}

impl RgsIter {
    pub fn new(n: usize) -> Self {
        if n == 0 {
            return RgsIter { cur: None, max: Vec::new() };
        }
        RgsIter { cur: Some(vec![0; n]), max: vec![0; n] }
    }
}

impl Iterator for RgsIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let n = cur.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.cur = None;
                return Some(out);
            }
            i -= 1;
            if cur[i] <= self.max[i] {
                cur[i] += 1;
                break;
            }
        }
        for k in i + 1..n {
            cur[k] = 0;
            self.max[k] = self.max[k - 1].max(cur[k - 1]);
        }
        Some(out)
    }
}

/// Every partition of `ground`, each once, in restricted-growth lexicographic order.
pub fn enumerate_partitions<T: Ord + Clone>(
    ground: &[T],
    cap: usize,
) -> Result<impl Iterator<Item = SetPartition<T>>> {
    if ground.is_empty() {
        return Err(Error::InvalidArgument("cannot enumerate partitions of the empty set".into()));
    }
    if ground.len() > cap {
        return Err(Error::PartitionCap { size: ground.len(), cap });
    }
    let g = sorted_ground(ground)?;
    Ok(RgsIter::new(g.len()).map(move |rgs| SetPartition { ground: g.clone(), rgs }))
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::InvalidArgument(format!("S({n},{k}) needs k <= n")));
    }
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for j in 1..=m {
            let stay = if j < m { &row[j] * BigUint::from(j) } else { BigUint::zero() };
            next[j] = stay + &row[j - 1];
        }
        row = next;
    }
    Ok(row[k].clone())
}

/// Bell number `B_n`.
pub fn bell(n: usize) -> BigUint {
    (0..=n).map(|k| stirling2(n, k).expect("k <= n")).sum()
}

/// Covering pairs `(lower, upper)` among `elements`, computed relative to the subset:
/// `lower` strictly refines `upper` and no element lies strictly between them.
pub fn hasse_edges<T: Ord + Clone>(elements: &[SetPartition<T>]) -> Result<Vec<(usize, usize)>> {
    let m = elements.len();
    if let Some(first) = elements.first() {
        for e in elements {
            first.same_ground(e)?;
        }
    }
    let below = |i: usize, j: usize| i != j && elements[i] != elements[j] && refines_rgs(&elements[i].rgs, &elements[j].rgs);
    let rel: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| below(i, j)).collect()).collect();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if rel[i][j] && !(0..m).any(|k| rel[i][k] && rel[k][j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// Sizes of the connected components of a graph on `n` vertices, sorted descending.
pub fn component_sizes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        *counts.entry(uf.find(i)).or_default() += 1;
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// DOT digraph of a partition poset, one rank per block count, finer partitions at the bottom.
pub fn hasse_dot<T: Ord + Clone + fmt::Display>(name: &str, elements: &[SetPartition<T>]) -> Result<String> {
    let edges = hasse_edges(elements)?;
    let mut out = format!("digraph \"{}\" {{\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n", name.replace('"', "'"));
    for (i, e) in elements.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{e}\"];\n"));
    }
    let mut ranks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        ranks.entry(e.len()).or_default().push(i);
    }
    for members in ranks.values() {
        let ids: Vec<String> = members.iter().map(|i| format!("n{i};")).collect();
        out.push_str(&format!("  {{ rank=same; {} }}\n", ids.join(" ")));
    }
    for (a, b) in edges {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    Ok(out)
}

/// Which SLI evaluations a workload estimate counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkloadMode {
    /// Every pattern on every nonempty node subset, every partition: `Σ_A |𝒳_A|·B_|A|`.
    Exhaustive,
    /// Every trajectory, every partition of `V`: `|𝒳_V|·B_|V|`.
    Disintegration,
}

/// Exact number of SLI values the given analysis would evaluate.
pub fn sli_workload(net: &BayesNet, mode: WorkloadMode) -> BigUint {
    let sizes: Vec<BigUint> = (0..net.len()).map(|i| BigUint::from(net.states(i).len())).collect();
    match mode {
        WorkloadMode::Disintegration => sizes.iter().product::<BigUint>() * bell(sizes.len()),
        WorkloadMode::Exhaustive => {
            // e[k] = elementary symmetric polynomial of degree k in the state-space sizes.
            let mut e = vec![BigUint::zero(); sizes.len() + 1];
            e[0] = BigUint::one();
            for (m, s) in sizes.iter().enumerate() {
                for k in (1..=m + 1).rev() {
                    let add = &e[k - 1] * s;
                    e[k] += add;
                }
            }
            (1..=sizes.len()).map(|k| &e[k] * bell(k)).sum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[u32]]) -> SetPartition<u32> {
        SetPartition::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_partitions(&[1, 2, 3, 4], 13).unwrap().count(), 15);
        assert_eq!(enumerate_partitions(&[1], 13).unwrap().count(), 1);
        let all: Vec<_> = enumerate_partitions(&[1, 2, 3], 13).unwrap().map(|p| p.rgs().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
        assert!(matches!(enumerate_partitions(&(0..14).collect::<Vec<u32>>(), 13), Err(Error::PartitionCap { .. })));
    }

    #[test]
    fn bell_and_stirling() {
        assert_eq!(bell(1), BigUint::from(1u32));
        assert_eq!(bell(7), BigUint::from(877u32));
        let row: Vec<BigUint> = (1..=6).map(|k| stirling2(6, k).unwrap()).collect();
        let expected: Vec<BigUint> = [1u32, 31, 90, 65, 15, 1].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(row, expected);
        assert!(stirling2(2, 3).is_err());
    }

    #[test]
    fn lattice_operations() {
        let a = p(&[&[1, 2], &[3]]);
        let b = p(&[&[1], &[2, 3]]);
        assert_eq!(a.meet(&b).unwrap(), SetPartition::zero(&[1, 2, 3]));
        assert_eq!(a.join(&b).unwrap(), SetPartition::one(&[1, 2, 3]));
        assert_eq!(a.join(&a).unwrap(), a);
        assert!(!a.refines(&b).unwrap() && !b.refines(&a).unwrap());
        assert!(p(&[&[1], &[2, 3]]).refines(&SetPartition::one(&[1, 2, 3])).unwrap());
        assert!(SetPartition::zero(&[1, 2]).covered_by(&SetPartition::one(&[1, 2])).unwrap());
        assert!(!SetPartition::zero(&[1, 2, 3]).covered_by(&SetPartition::one(&[1, 2, 3])).unwrap());
        assert!(SetPartition::zero(&[1, 2, 3]).covered_by(&a).unwrap());
    }

    #[test]
    fn restriction() {
        assert_eq!(p(&[&[1, 2], &[3, 4]]).restrict(&[1, 3]).unwrap(), p(&[&[1], &[3]]));
        assert_eq!(p(&[&[1, 2, 3]]).restrict(&[2, 3]).unwrap(), p(&[&[2, 3]]));
        assert!(p(&[&[1, 2]]).restrict(&[]).is_err());
    }

    #[test]
    fn hasse_of_three_element_lattice() {
        let all: Vec<_> = enumerate_partitions(&[1, 2, 3], 13).unwrap().collect();
        assert_eq!(hasse_edges(&all).unwrap().len(), 6);
        assert!(hasse_edges(&all[..1]).unwrap().is_empty());
        assert_eq!(component_sizes(5, &hasse_edges(&all).unwrap()), vec![5]);
    }

    #[test]
    fn render_and_parse() {
        let x = p(&[&[3, 1], &[2]]);
        assert_eq!(x.to_string(), "{1,3}|{2}");
        assert_eq!(x.to_string().parse::<SetPartition<u32>>().unwrap(), x);
        assert!("{1,2}|{2}".parse::<SetPartition<u32>>().is_err());
    }
}
