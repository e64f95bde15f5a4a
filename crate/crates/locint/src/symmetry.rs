//! Permutation actions on patterns, partitions and distributions.
//!
//! The action on patterns is `g x_C := x^{g⁻¹}_C`: the value a pattern holds at node
//! `k` moves to node `g(k)`. Every use in this crate goes through [`act_on_pattern`].
//! The pull-back `x^g` (node `i` receives the value at `g(i)`) is `g⁻¹ x`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integration::MarginalTable;
use crate::model::{build_markov_chain, BayesNet, Kernel, MarkovSpec, NodeId};
use crate::partition::{RgsIter, SetPartition};
use crate::pattern::Pattern;
use crate::rational::Rational;

/// Default cap on the size of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// A bijection on a finite set of nodes, the identity elsewhere. Only moved points are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation {
    map: BTreeMap<NodeId, NodeId>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from an explicit mapping; fixed points may be included.
    pub fn from_map(pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if map.insert(a.clone(), b).is_some() {
                return Err(Error::InvalidArgument(format!("node `{a}` mapped twice")));
            }
        }
        let image: BTreeSet<&NodeId> = map.values().collect();
        let domain: BTreeSet<&NodeId> = map.keys().collect();
        if image != domain {
            return Err(Error::InvalidArgument("mapping is not a bijection on its nodes".into()));
        }
        map.retain(|a, b| a != b);
        Ok(Permutation { map })
    }

    pub fn from_cycles(cycles: &[Vec<NodeId>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for c in cycles {
            for (k, a) in c.iter().enumerate() {
                pairs.push((a.clone(), c[(k + 1) % c.len()].clone()));
            }
        }
        Self::from_map(pairs)
    }

    pub fn apply(&self, id: &NodeId) -> NodeId {
        self.map.get(id).cloned().unwrap_or_else(|| id.clone())
    }

    pub fn inverse(&self) -> Self {
        Permutation { map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let points: BTreeSet<&NodeId> = self.map.keys().chain(other.map.keys()).collect();
        let mut map = BTreeMap::new();
        for p in points {
            let img = self.apply(&other.apply(p));
            if &img != p {
                map.insert(p.clone(), img);
            }
        }
        Permutation { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Nodes the permutation moves.
    pub fn support(&self) -> Vec<NodeId> {
        self.map.keys().cloned().collect()
    }

    pub fn cycles(&self) -> Vec<Vec<NodeId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.map.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut cycle = vec![start.clone()];
            seen.insert(start.clone());
            let mut cur = self.apply(start);
            while &cur != start {
                seen.insert(cur.clone());
                cycle.push(cur.clone());
                cur = self.apply(&cur);
            }
            out.push(cycle);
        }
        out
    }

    /// Lifts a permutation of spatial indices to every time-slice `0..times`.
    pub fn spatial(jmap: &[(u32, u32)], times: u32) -> Result<Self> {
        Self::from_map((0..times).flat_map(|t| jmap.iter().map(move |&(a, b)| (NodeId::grid(a, t), NodeId::grid(b, t)))))
    }

    /// Permutes the time indices of one row `j`.
    pub fn row_time(j: u32, tmap: &[(u32, u32)]) -> Result<Self> {
        Self::from_map(tmap.iter().map(|&(a, b)| (NodeId::grid(j, a), NodeId::grid(j, b))))
    }

    /// Permutes time indices on every row in `js`.
    pub fn time(js: &[u32], tmap: &[(u32, u32)]) -> Result<Self> {
        Self::from_map(js.iter().flat_map(|&j| tmap.iter().map(move |&(a, b)| (NodeId::grid(j, a), NodeId::grid(j, b)))))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("()");
        }
        for c in self.cycles() {
            let items: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", items.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Cycle notation, e.g. `(1/0 2/0)(1/1 2/1)`; `()` is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let inner_end = rest.find(')').ok_or_else(|| Error::Parse(format!("unbalanced cycle in `{s}`")))?;
            let inner = rest[..inner_end]
                .trim()
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected `(` in `{s}`")))?;
            let cycle = inner
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::parse::<NodeId>)
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = rest[inner_end + 1..].trim_start();
        }
        Self::from_cycles(&cycles).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A permutation group given by generators, closed lazily by breadth-first search.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    pub generators: Vec<Permutation>,
    pub cap: usize,
}

impl GeneratedGroup {
    pub fn new(generators: Vec<Permutation>) -> Self {
        GeneratedGroup { generators, cap: DEFAULT_GROUP_CAP }
    }

    /// All elements, sorted, identity first.
    pub fn elements(&self) -> Result<Vec<Permutation>> {
        let id = Permutation::identity();
        let mut seen: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &self.generators {
                let h = s.compose(&g);
                if seen.insert(h.clone()) {
                    if seen.len() > self.cap {
                        return Err(Error::GroupCap(self.cap));
                    }
                    queue.push_back(h);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

fn check_homogeneous(net: &BayesNet, g: &Permutation) -> Result<()> {
    for k in g.support() {
        let i = net.index_of(&k)?;
        let j = net.index_of(&g.apply(&k))?;
        if net.states(i) != net.states(j) {
            return Err(Error::HeterogeneousStates(format!("{k} and {}", g.apply(&k))));
        }
    }
    Ok(())
}

/// `g x_C`: the value at node `k` moves to `g(k)`.
pub fn act_on_pattern(net: &BayesNet, g: &Permutation, pattern: &Pattern) -> Result<Pattern> {
    check_homogeneous(net, g)?;
    Pattern::from_pairs(pattern.iter().map(|(k, v)| (g.apply(k), v)))
}

/// `x^g`: node `i` receives the value the pattern holds at `g(i)`.
pub fn pull_back(net: &BayesNet, g: &Permutation, pattern: &Pattern) -> Result<Pattern> {
    act_on_pattern(net, &g.inverse(), pattern)
}

/// `g π = {g(b) : b ∈ π}`.
pub fn act_on_partition(g: &Permutation, partition: &SetPartition<NodeId>) -> Result<SetPartition<NodeId>> {
    partition.map(|k| g.apply(k))
}

/// The distribution `ǧ p_V`, `(ǧ p)(x_V) = p_V(x^g_V)`.
#[derive(Clone, Copy, Debug)]
pub struct TransformedDistribution<'a> {
    pub net: &'a BayesNet,
    pub g: &'a Permutation,
}

/// `ǧ p_V` as a queryable view.
pub fn act_on_distribution<'a>(net: &'a BayesNet, g: &'a Permutation) -> Result<TransformedDistribution<'a>> {
    check_homogeneous(net, g)?;
    Ok(TransformedDistribution { net, g })
}

impl TransformedDistribution<'_> {
    /// `(g p_B)(x_B) = p_{g⁻¹(B)}(x^g_{g⁻¹(B)})`.
    pub fn marginal(&self, pattern: &Pattern) -> Result<Rational> {
        self.net.marginal_probability(&pull_back(self.net, self.g, pattern)?)
    }
}

/// True iff `g x = x`.
pub fn is_pattern_symmetry(net: &BayesNet, g: &Permutation, pattern: &Pattern) -> Result<bool> {
    Ok(&act_on_pattern(net, g, pattern)? == pattern)
}

/// True iff `g π = π`.
pub fn is_partition_symmetry(g: &Permutation, partition: &SetPartition<NodeId>) -> Result<bool> {
    Ok(&act_on_partition(g, partition)? == partition)
}

/// Distribution of the restriction to `domain`, from the cached support.
fn restricted_distribution(net: &BayesNet, domain: &[NodeId]) -> Result<HashMap<Pattern, Rational>> {
    let support = net.support()?;
    let mut out: HashMap<Pattern, Rational> = HashMap::new();
    for (x, p) in support.states.iter().zip(&support.probs) {
        *out.entry(net.trajectory_pattern(x).restrict(domain)).or_default() += p;
    }
    Ok(out)
}

/// True iff `g p_A = p_A`, i.e. `p_A(x^g_A) = p_A(x_A)` for all `x_A`.
/// `g` must map `A` onto itself.
pub fn is_marginal_symmetry(net: &BayesNet, g: &Permutation, domain: &[NodeId]) -> Result<bool> {
    check_homogeneous(net, g)?;
    let set: BTreeSet<&NodeId> = domain.iter().collect();
    if g.support().iter().any(|k| !set.contains(k)) {
        return Err(Error::InvalidArgument(format!("{g} moves nodes outside the pattern domain")));
    }
    let dist = restricted_distribution(net, domain)?;
    for (x, p) in &dist {
        if dist.get(&pull_back(net, g, x)?) != Some(p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `g p_V = p_V`.
pub fn is_distribution_symmetry(net: &BayesNet, g: &Permutation) -> Result<bool> {
    is_marginal_symmetry(net, g, &net.node_ids())
}

/// `{g π : g ∈ 𝔊}`, sorted.
pub fn orbit(group: &GeneratedGroup, partition: &SetPartition<NodeId>) -> Result<Vec<SetPartition<NodeId>>> {
    let mut out = BTreeSet::new();
    for g in group.elements()? {
        out.insert(act_on_partition(&g, partition)?);
    }
    Ok(out.into_iter().collect())
}

/// Which corollary case grants `mi_{gπ}(x) = mi_π(x)` for one `(g, π)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceCase {
    /// `x^g = x`.
    PatternInvariant,
    /// `x^g ≠ x` but `p_b(x^g_b) = p_b(x_b)` for every block.
    BlockwiseInvariant,
    /// Only the block-probability product is preserved.
    ProductInvariant,
    /// None of the above; the SLI may change.
    NotInvariant,
}

/// Result of checking the SLI symmetry theorem on one pattern.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SymmetryReport {
    /// `g p_A = p_A` held for every group element; when false nothing else was checked.
    pub precondition_holds: bool,
    pub group_size: usize,
    pub partitions: usize,
    /// `(g, π)` pairs on which `mi_{gπ}(x) = mi_π(x^g)` was asserted.
    pub pairs_checked: usize,
    pub violations: Vec<String>,
    pub cases: BTreeMap<String, usize>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.precondition_holds && self.violations.is_empty()
    }
}

fn case_name(c: InvarianceCase) -> String {
    match c {
        InvarianceCase::PatternInvariant => "pattern_invariant",
        InvarianceCase::BlockwiseInvariant => "blockwise_invariant",
        InvarianceCase::ProductInvariant => "product_invariant",
        InvarianceCase::NotInvariant => "not_invariant",
    }
    .to_string()
}

/// Asserts `mi_{gπ}(x_A) = mi_π(x^g_A)` for every group element and every partition of `A`,
/// after checking `g p_A = p_A`, and classifies each pair by corollary case.
pub fn check_sli_symmetry(net: &BayesNet, group: &GeneratedGroup, pattern: &Pattern) -> Result<SymmetryReport> {
    let elements = group.elements()?;
    let domain = pattern.domain();
    let mut report = SymmetryReport { group_size: elements.len(), ..Default::default() };
    for g in &elements {
        if !is_marginal_symmetry(net, g, &domain)? {
            report.violations.push(format!("precondition: {g} is not a symmetry of p_A"));
            return Ok(report);
        }
    }
    report.precondition_holds = true;
    let n = pattern.len();
    let base = MarginalTable::new(net, pattern)?;
    let full = base.full_mask();
    let partitions: Vec<SetPartition<NodeId>> = RgsIter::new(n).map(|r| base.partition(full, &r)).collect();
    report.partitions = partitions.len();
    for g in &elements {
        let xg = pull_back(net, g, pattern)?;
        let moved = MarginalTable::new(net, &xg)?;
        for pi in &partitions {
            let blocks = pi.blocks();
            let gpi = act_on_partition(g, pi)?;
            let lhs_blocks = gpi.blocks().iter().map(|b| base.mask_of(b)).collect::<Result<Vec<_>>>()?;
            let lhs = base.sli_ratio(full, &lhs_blocks)?;
            let rhs_blocks = blocks.iter().map(|b| moved.mask_of(b)).collect::<Result<Vec<_>>>()?;
            let rhs = moved.sli_ratio(full, &rhs_blocks)?;
            report.pairs_checked += 1;
            if lhs != rhs {
                report.violations.push(format!("g = {g}, partition {pi}: mi_(g pi)(x) != mi_pi(x^g)"));
            }
            let own_blocks = blocks.iter().map(|b| base.mask_of(b)).collect::<Result<Vec<_>>>()?;
            let case = if xg == *pattern {
                InvarianceCase::PatternInvariant
            } else if own_blocks.iter().zip(&rhs_blocks).all(|(&a, &b)| base.prob(a) == moved.prob(b)) {
                InvarianceCase::BlockwiseInvariant
            } else {
                let prod = |t: &MarginalTable, ms: &[usize]| ms.iter().map(|&m| t.prob(m).clone()).product::<Rational>();
                if prod(&base, &own_blocks) == prod(&moved, &rhs_blocks) {
                    InvarianceCase::ProductInvariant
                } else {
                    InvarianceCase::NotInvariant
                }
            };
            *report.cases.entry(case_name(case)).or_default() += 1;
        }
    }
    Ok(report)
}

/// Spatial map `j ↦ g(j)` of a permutation that acts identically on every slice.
fn spatial_map(spec: &MarkovSpec, g: &Permutation) -> Result<Vec<u32>> {
    let jn = spec.j_count();
    let mut jmap: Vec<u32> = (0..=jn).collect();
    for j in 1..=jn {
        let img = g.apply(&NodeId::grid(j, 0));
        let (ij, it) = img
            .coord()
            .ok_or_else(|| Error::InvalidArgument(format!("{g} leaves the grid")))?;
        if it != 0 || ij < 1 || ij > jn {
            return Err(Error::InvalidArgument(format!("{g} is not a spatial permutation")));
        }
        jmap[j as usize] = ij;
        for t in 1..spec.times {
            if g.apply(&NodeId::grid(j, t)) != NodeId::grid(ij, t) {
                return Err(Error::InvalidArgument(format!("{g} acts differently on different slices")));
            }
        }
    }
    if g.support().iter().any(|k| k.coord().map_or(true, |(j, t)| j < 1 || j > jn || t >= spec.times)) {
        return Err(Error::InvalidArgument(format!("{g} moves nodes outside the chain")));
    }
    Ok(jmap)
}

/// Findings of [`check_markov_symmetry_propagation`].
#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub kernel_invariant: bool,
    pub initial_invariant: bool,
    /// `g p_V = p_V` on the built net, checked only when both conditions hold.
    pub joint_invariant: Option<bool>,
}

impl PropagationReport {
    pub fn holds(&self) -> bool {
        self.kernel_invariant && self.initial_invariant && self.joint_invariant == Some(true)
    }
}

/// Checks `p(x^g_{t+1} | x^g_t) = p(x_{t+1} | x_t)` and `g p_{V_0} = p_{V_0}` for every
/// element of a group of spatial permutations and, when both hold, `g p_V = p_V` on the
/// built net. For driven chains the group must fix the driving indices.
pub fn check_markov_symmetry_propagation(spec: &MarkovSpec, group: &GeneratedGroup) -> Result<PropagationReport> {
    spec.validate()?;
    let elements = group.elements()?;
    let n = spec.slice_size();
    let mut report = PropagationReport { kernel_invariant: true, initial_invariant: true, joint_invariant: None };
    for g in &elements {
        let jmap = spatial_map(spec, g)?;
        for j in 1..=spec.j_count() as usize {
            if spec.states[j - 1] != spec.states[jmap[j] as usize - 1] {
                return Err(Error::HeterogeneousStates(format!("{j} and {}", jmap[j])));
            }
        }
        if let Kernel::Driven(d) = &spec.kernel {
            if d.driving.iter().any(|&b| jmap[b as usize] != b) {
                return Err(Error::InvalidArgument(format!("{g} moves a driving index")));
            }
        }
        let pull = |s: usize| {
            let x = spec.slice_values(s);
            let y: Vec<u32> = (1..=spec.j_count() as usize).map(|j| x[jmap[j] as usize - 1]).collect();
            spec.slice_index(&y)
        };
        let perm: Vec<usize> = (0..n).map(pull).collect();
        if (0..n).any(|s| spec.initial[perm[s]] != spec.initial[s]) {
            report.initial_invariant = false;
        }
        let m = spec.joint_matrix();
        if (0..n).any(|s| (0..n).any(|s2| m[perm[s2]][perm[s]] != m[s2][s])) {
            report.kernel_invariant = false;
        }
    }
    if report.kernel_invariant && report.initial_invariant {
        let net = build_markov_chain(spec)?;
        let mut all = true;
        for g in &elements {
            all &= is_distribution_symmetry(&net, g)?;
        }
        report.joint_invariant = Some(all);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation_round_trip() {
        let g: Permutation = "(1/0 2/0)(1/1 2/1)".parse().unwrap();
        assert_eq!(g.apply(&NodeId::grid(1, 0)), NodeId::grid(2, 0));
        assert_eq!(g.to_string(), "(1/0 2/0)(1/1 2/1)");
        assert_eq!(g.to_string().parse::<Permutation>().unwrap(), g);
        assert!("()".parse::<Permutation>().unwrap().is_identity());
        assert!("(1/0 1/0)".parse::<Permutation>().is_err());
        assert!("(1/0 2/0".parse::<Permutation>().is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a: Permutation = "(1/0 1/1 1/2)".parse().unwrap();
        let b: Permutation = "(1/0 1/1)".parse().unwrap();
        assert!(a.compose(&a.inverse()).is_identity());
        let ab = a.compose(&b);
        assert_eq!(ab.apply(&NodeId::grid(1, 0)), a.apply(&b.apply(&NodeId::grid(1, 0))));
    }

    #[test]
    fn group_closure() {
        let row1: Vec<Permutation> = vec!["(1/0 1/1)".parse().unwrap(), "(1/1 1/2)".parse().unwrap()];
        assert_eq!(GeneratedGroup::new(row1.clone()).elements().unwrap().len(), 6);
        let capped = GeneratedGroup { generators: row1, cap: 3 };
        assert_eq!(capped.elements(), Err(Error::GroupCap(3)));
    }
}
