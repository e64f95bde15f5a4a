use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use num::{BigInt, One, Zero};

use super::{Mechanism, NodeId, StateSpace};
use crate::error::{Error, Result};
use crate::pattern::{self, Pattern};
use crate::rational::{is_probability, Rational};

/// Default cap on `∏|𝒳_i|` for exhaustive enumeration.
pub const DEFAULT_STATE_CAP: u128 = 1 << 20;

/// Input description of one node.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub id: NodeId,
    pub states: StateSpace,
    pub mechanism: Mechanism,
}

#[derive(Clone, Debug)]
struct NodeData {
    id: NodeId,
    states: StateSpace,
    parents: Vec<usize>,
    strides: Vec<usize>,
    rows: Vec<Vec<Rational>>,
}

/// All positive-probability trajectories, as symbol vectors in node-index order.
#[derive(Clone, Debug)]
pub struct Support {
    pub states: Vec<Vec<u32>>,
    pub probs: Vec<Rational>,
}

/// Conditional distribution over completions of a pattern. Only the support is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morph {
    pub entries: Vec<(Pattern, Rational)>,
}

impl Morph {
    pub fn prob(&self, completion: &Pattern) -> Rational {
        self.entries
            .iter()
            .find(|(p, _)| p == completion)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(Rational::zero)
    }
}

/// A finite DAG of discrete nodes with exact mechanisms. Immutable once built.
///
/// Nodes are indexed in canonical [`NodeId`] order. The positive-probability
/// support is computed lazily and cached.
#[derive(Clone, Debug)]
pub struct BayesNet {
    name: String,
    nodes: Vec<NodeData>,
    index: HashMap<NodeId, usize>,
    topo: Vec<usize>,
    state_cap: u128,
    support: OnceLock<std::result::Result<Arc<Support>, Error>>,
}

impl PartialEq for BayesNet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| {
                a.id == b.id && a.states == b.states && a.parents == b.parents && a.rows == b.rows
            })
    }
}

impl BayesNet {
    pub fn new(name: impl Into<String>, specs: Vec<NodeSpec>) -> Result<Self> {
        let mut specs = specs;
        specs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::new();
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(Error::Model(format!("duplicate node `{}`", s.id)));
            }
        }
        let grid = specs.iter().filter(|s| s.id.coord().is_some()).count();
        if grid != 0 && grid != specs.len() {
            return Err(Error::Model("coordinates must be present on all nodes or none".into()));
        }
        let mut nodes = Vec::with_capacity(specs.len());
        for s in &specs {
            let parents = s
                .mechanism
                .parents
                .iter()
                .map(|p| index.get(p).copied().ok_or_else(|| Error::UnknownNode(p.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if parents.iter().collect::<BTreeSet<_>>().len() != parents.len() {
                return Err(Error::Model(format!("node `{}` lists a parent twice", s.id)));
            }
            let mut strides = vec![1usize; parents.len()];
            let mut configs = 1usize;
            for k in (0..parents.len()).rev() {
                strides[k] = configs;
                configs = configs
                    .checked_mul(specs[parents[k]].states.len())
                    .ok_or_else(|| Error::Model("mechanism table too large".into()))?;
            }
            if s.mechanism.rows.len() != configs {
                return Err(Error::Model(format!(
                    "node `{}` has {} mechanism rows, expected {configs}",
                    s.id,
                    s.mechanism.rows.len()
                )));
            }
            for (r, row) in s.mechanism.rows.iter().enumerate() {
                if row.len() != s.states.len() {
                    return Err(Error::Model(format!("node `{}` row {r} has wrong length", s.id)));
                }
                if !row.iter().all(is_probability) {
                    return Err(Error::Model(format!("node `{}` row {r} leaves [0,1]", s.id)));
                }
                if row.iter().sum::<Rational>() != Rational::one() {
                    return Err(Error::Model(format!("node `{}` row {r} does not sum to 1", s.id)));
                }
            }
            nodes.push(NodeData {
                id: s.id.clone(),
                states: s.states.clone(),
                parents,
                strides,
                rows: s.mechanism.rows.clone(),
            });
        }
        let topo = topo_order(&nodes)?;
        Ok(BayesNet {
            name: name.into(),
            nodes,
            index,
            topo,
            state_cap: DEFAULT_STATE_CAP,
            support: OnceLock::new(),
        })
    }

    /// Builds a net reproducing an arbitrary joint distribution by the chain rule.
    ///
    /// Node `k` (in the given order) gets all earlier nodes as parents. `joint` is
    /// indexed row-major over the given node order, first node most significant.
    /// Rows for impossible parent configurations are uniform.
    pub fn from_joint(
        name: impl Into<String>,
        nodes: Vec<(NodeId, StateSpace)>,
        joint: &[Rational],
    ) -> Result<Self> {
        let sizes: Vec<usize> = nodes.iter().map(|(_, s)| s.len()).collect();
        let total: usize = sizes.iter().product();
        if joint.len() != total {
            return Err(Error::Model(format!("joint needs {total} entries, got {}", joint.len())));
        }
        if !joint.iter().all(is_probability) || joint.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Model("joint is not a probability vector".into()));
        }
        let mut specs = Vec::with_capacity(nodes.len());
        for k in 0..nodes.len() {
            let prefix: usize = sizes[..k].iter().product();
            let suffix: usize = sizes[k + 1..].iter().product();
            let arity = sizes[k];
            let mut rows = Vec::with_capacity(prefix);
            for cfg in 0..prefix {
                let mut row: Vec<Rational> = (0..arity)
                    .map(|v| (0..suffix).map(|r| &joint[(cfg * arity + v) * suffix + r]).sum())
                    .collect();
                let mass: Rational = row.iter().sum();
                if mass.is_zero() {
                    row = vec![Rational::new(BigInt::one(), BigInt::from(arity)); arity];
                } else {
                    row.iter_mut().for_each(|p| *p /= &mass);
                }
                rows.push(row);
            }
            let parents = nodes[..k].iter().map(|(id, _)| id.clone()).collect();
            specs.push(NodeSpec {
                id: nodes[k].0.clone(),
                states: nodes[k].1.clone(),
                mechanism: Mechanism::new(parents, rows),
            });
        }
        BayesNet::new(name, specs)
    }

    /// Replaces the enumeration cap.
    pub fn with_state_cap(mut self, cap: u128) -> Self {
        self.state_cap = cap;
        self.support = OnceLock::new();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_cap(&self) -> u128 {
        self.state_cap
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids in canonical order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.iter().map(|n| n.id.clone()).collect()
    }

    pub fn id(&self, i: usize) -> &NodeId {
        &self.nodes[i].id
    }

    pub fn index_of(&self, id: &NodeId) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn states(&self, i: usize) -> &StateSpace {
        &self.nodes[i].states
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.nodes[i].parents
    }

    pub fn mechanism(&self, i: usize) -> Mechanism {
        let n = &self.nodes[i];
        Mechanism::new(n.parents.iter().map(|&p| self.nodes[p].id.clone()).collect(), n.rows.clone())
    }

    pub fn specs(&self) -> Vec<NodeSpec> {
        (0..self.len())
            .map(|i| NodeSpec {
                id: self.nodes[i].id.clone(),
                states: self.nodes[i].states.clone(),
                mechanism: self.mechanism(i),
            })
            .collect()
    }

    /// Topological order, ties broken by canonical node order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn is_grid(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.iter().all(|n| n.id.coord().is_some())
    }

    /// Sorted time indices of a grid net.
    pub fn times(&self) -> Vec<u32> {
        self.nodes.iter().filter_map(|n| n.id.time()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Sorted spatial indices of a grid net.
    pub fn spatial_indices(&self) -> Vec<u32> {
        self.nodes.iter().filter_map(|n| n.id.space()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Nodes of time-slice `V_t`, in canonical order.
    pub fn slice_ids(&self, t: u32) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| n.id.time() == Some(t)).map(|n| n.id.clone()).collect()
    }

    pub fn symbol_label(&self, id: &NodeId, v: u32) -> Result<&str> {
        let i = self.index_of(id)?;
        self.nodes[i]
            .states
            .symbol(v)
            .ok_or_else(|| Error::UnknownSymbol { node: id.to_string(), symbol: v })
    }

    /// Parses a pattern literal, accepting symbol labels or indices.
    pub fn parse_pattern(&self, s: &str) -> Result<Pattern> {
        pattern::parse_literal(s, |id, sym| {
            let i = self.index_of(id).map_err(|e| Error::Parse(e.to_string()))?;
            let states = &self.nodes[i].states;
            states
                .index_of(sym)
                .or_else(|| sym.parse::<u32>().ok().filter(|&v| (v as usize) < states.len()))
                .ok_or_else(|| Error::Parse(format!("unknown symbol `{sym}` for node `{id}`")))
        })
    }

    /// Renders a pattern literal with symbol labels.
    pub fn format_pattern(&self, p: &Pattern) -> String {
        if p.is_empty() {
            return "{}".into();
        }
        p.iter()
            .map(|(k, v)| format!("{k}={}", self.symbol_label(k, v).unwrap_or("?")))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Node indices and symbols of a pattern, validated against the net.
    pub fn resolve(&self, p: &Pattern) -> Result<Vec<(usize, u32)>> {
        p.iter()
            .map(|(k, v)| {
                let i = self.index_of(k)?;
                if (v as usize) < self.nodes[i].states.len() {
                    Ok((i, v))
                } else {
                    Err(Error::UnknownSymbol { node: k.to_string(), symbol: v })
                }
            })
            .collect()
    }

    /// The full pattern for a symbol vector in node-index order.
    pub fn trajectory_pattern(&self, states: &[u32]) -> Pattern {
        let mut p = Pattern::new();
        for (i, &v) in states.iter().enumerate() {
            p.insert(self.nodes[i].id.clone(), v);
        }
        p
    }

    /// Symbol vector of a full pattern.
    pub fn trajectory_states(&self, p: &Pattern) -> Result<Vec<u32>> {
        let resolved = self.resolve(p)?;
        if resolved.len() != self.len() {
            return Err(Error::PartialAssignment);
        }
        let mut out = vec![0; self.len()];
        for (i, v) in resolved {
            out[i] = v;
        }
        Ok(out)
    }

    /// `∏|𝒳_i|`, saturating.
    pub fn state_space_size(&self) -> u128 {
        self.nodes.iter().fold(1u128, |acc, n| acc.saturating_mul(n.states.len() as u128))
    }

    pub(crate) fn cond(&self, i: usize, x: &[u32]) -> &Rational {
        let n = &self.nodes[i];
        let row: usize = n.parents.iter().zip(&n.strides).map(|(&p, &s)| x[p] as usize * s).sum();
        &n.rows[row][x[i] as usize]
    }

    /// Every assignment of every node in lexicographic index order (including probability 0).
    pub(crate) fn all_assignments(&self) -> Result<Vec<Vec<u32>>> {
        let size = self.state_space_size();
        if size > self.state_cap {
            return Err(Error::StateCap { size, cap: self.state_cap });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut cur = vec![0u32; self.len()];
        loop {
            out.push(cur.clone());
            let mut k = self.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                cur[k] += 1;
                if (cur[k] as usize) < self.nodes[k].states.len() {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    /// Cached positive-probability support, enumerated row-major in topological order.
    pub fn support(&self) -> Result<Arc<Support>> {
        self.support.get_or_init(|| self.enumerate_support().map(Arc::new)).clone()
    }

    fn enumerate_support(&self) -> Result<Support> {
        let size = self.state_space_size();
        if size > self.state_cap {
            return Err(Error::StateCap { size, cap: self.state_cap });
        }
        let mut out = Support { states: Vec::new(), probs: Vec::new() };
        let mut x = vec![0u32; self.len()];
        self.support_dfs(0, Rational::one(), &mut x, &mut out);
        Ok(out)
    }

    fn support_dfs(&self, depth: usize, p: Rational, x: &mut Vec<u32>, out: &mut Support) {
        if depth == self.topo.len() {
            out.states.push(x.clone());
            out.probs.push(p);
            return;
        }
        let i = self.topo[depth];
        for v in 0..self.nodes[i].states.len() as u32 {
            x[i] = v;
            let c = self.cond(i, x);
            if !c.is_zero() {
                self.support_dfs(depth + 1, &p * c, x, out);
            }
        }
        x[i] = 0;
    }

    /// All possible trajectories with their exact probabilities, in enumeration order.
    pub fn enumerate_trajectories(&self) -> Result<Vec<(Pattern, Rational)>> {
        let s = self.support()?;
        Ok(s.states.iter().zip(&s.probs).map(|(x, p)| (self.trajectory_pattern(x), p.clone())).collect())
    }

    /// `∏_i p_i(x_i | x_pa(i))` for a full trajectory.
    pub fn joint_probability(&self, trajectory: &Pattern) -> Result<Rational> {
        let x = self.trajectory_states(trajectory)?;
        let mut p = Rational::one();
        for &i in &self.topo {
            p *= self.cond(i, &x);
            if p.is_zero() {
                break;
            }
        }
        Ok(p)
    }

    fn ancestral_order(&self, fixed: &[Option<u32>]) -> Vec<usize> {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<usize> = (0..self.len()).filter(|&i| fixed[i].is_some()).collect();
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(self.nodes[i].parents.iter().copied());
            }
        }
        self.topo.iter().copied().filter(|&i| keep[i]).collect()
    }

    /// `p_A(x_A)`: sum of the joint over all completions. Only the ancestral
    /// closure of `A` is summed over; the empty pattern has probability 1.
    pub fn marginal_probability(&self, pattern: &Pattern) -> Result<Rational> {
        let resolved = self.resolve(pattern)?;
        let mut fixed = vec![None; self.len()];
        for (i, v) in resolved {
            fixed[i] = Some(v);
        }
        let order = self.ancestral_order(&fixed);
        let free: u128 = order
            .iter()
            .filter(|&&i| fixed[i].is_none())
            .fold(1u128, |acc, &i| acc.saturating_mul(self.nodes[i].states.len() as u128));
        if free > self.state_cap {
            return Err(Error::StateCap { size: free, cap: self.state_cap });
        }
        let mut x = vec![0u32; self.len()];
        Ok(self.marginal_dfs(&order, 0, &fixed, &mut x))
    }

    fn marginal_dfs(&self, order: &[usize], depth: usize, fixed: &[Option<u32>], x: &mut Vec<u32>) -> Rational {
        if depth == order.len() {
            return Rational::one();
        }
        let i = order[depth];
        let mut total = Rational::zero();
        let values: Vec<u32> = match fixed[i] {
            Some(v) => vec![v],
            None => (0..self.nodes[i].states.len() as u32).collect(),
        };
        for v in values {
            x[i] = v;
            let c = self.cond(i, x).clone();
            if !c.is_zero() {
                total += c * self.marginal_dfs(order, depth + 1, fixed, x);
            }
        }
        total
    }

    /// `p(target | given)`. Conflicting patterns give 0.
    pub fn conditional_probability(&self, target: &Pattern, given: &Pattern) -> Result<Rational> {
        self.resolve(target)?;
        let pg = self.marginal_probability(given)?;
        if pg.is_zero() {
            return Err(Error::ZeroConditioning);
        }
        match target.merge(given) {
            None => Ok(Rational::zero()),
            Some(joint) => Ok(self.marginal_probability(&joint)? / pg),
        }
    }

    /// `p_{V∖A|A}(· | x_A)` over completions of the pattern.
    pub fn morph(&self, pattern: &Pattern) -> Result<Morph> {
        let p = self.marginal_probability(pattern)?;
        if p.is_zero() {
            return Err(Error::ZeroConditioning);
        }
        let support = self.support()?;
        let rest: Vec<NodeId> = self.node_ids().into_iter().filter(|n| !pattern.contains(n)).collect();
        let mut acc: Vec<(Pattern, Rational)> = Vec::new();
        let mut pos: HashMap<Pattern, usize> = HashMap::new();
        for (x, q) in support.states.iter().zip(&support.probs) {
            let tr = self.trajectory_pattern(x);
            if !pattern::occurs_in(pattern, &tr) {
                continue;
            }
            let c = tr.restrict(&rest);
            match pos.get(&c) {
                Some(&k) => acc[k].1 += q,
                None => {
                    pos.insert(c.clone(), acc.len());
                    acc.push((c, q.clone()));
                }
            }
        }
        for e in &mut acc {
            e.1 /= &p;
        }
        Ok(Morph { entries: acc })
    }

    fn require_deterministic_uniform(&self) -> Result<Vec<usize>> {
        let mut roots = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.parents.is_empty() {
                let u = Rational::new(BigInt::one(), BigInt::from(n.states.len()));
                if n.rows[0].iter().any(|p| p != &u) {
                    return Err(Error::NotDeterministic(format!("root `{}` is not uniform", n.id)));
                }
                roots.push(i);
            } else if n.rows.iter().any(|r| !r.iter().any(|p| p.is_one())) {
                return Err(Error::NotDeterministic(format!("mechanism of `{}` is stochastic", n.id)));
            }
        }
        Ok(roots)
    }

    /// `N(x_A)`: number of root configurations whose deterministic trajectory contains
    /// the pattern, so that `p_A(x_A) = N(x_A) / |𝒳_roots|`.
    pub fn deterministic_pattern_count(&self, pattern: &Pattern) -> Result<BigInt> {
        let roots = self.require_deterministic_uniform()?;
        let resolved = self.resolve(pattern)?;
        let size = roots.iter().fold(1u128, |a, &r| a.saturating_mul(self.nodes[r].states.len() as u128));
        if size > self.state_cap {
            return Err(Error::StateCap { size, cap: self.state_cap });
        }
        let mut count = BigInt::zero();
        let mut x = vec![0u32; self.len()];
        let mut root_vals = vec![0u32; roots.len()];
        loop {
            for (k, &r) in roots.iter().enumerate() {
                x[r] = root_vals[k];
            }
            for &i in &self.topo {
                if !self.nodes[i].parents.is_empty() {
                    x[i] = 0;
                    while !self.cond(i, &x).is_one() {
                        x[i] += 1;
                    }
                }
            }
            if resolved.iter().all(|&(i, v)| x[i] == v) {
                count += 1;
            }
            let mut k = roots.len();
            loop {
                if k == 0 {
                    return Ok(count);
                }
                k -= 1;
                root_vals[k] += 1;
                if (root_vals[k] as usize) < self.nodes[roots[k]].states.len() {
                    break;
                }
                root_vals[k] = 0;
            }
        }
    }

    /// Checks `p(V_{t+1} | V_{≼t}) = p(V_{t+1} | V_t)` for every positive-probability history.
    pub fn verify_time_slice_markov(&self) -> Result<bool> {
        if !self.is_grid() {
            return Err(Error::Model("time-slice check needs (j,t) coordinates".into()));
        }
        let support = self.support()?;
        let times = self.times();
        for w in times.windows(2) {
            let (t, next) = (w[0], w[1]);
            let hist: Vec<usize> = (0..self.len()).filter(|&i| self.nodes[i].id.time().unwrap() <= t).collect();
            let now: Vec<usize> = (0..self.len()).filter(|&i| self.nodes[i].id.time() == Some(t)).collect();
            let nxt: Vec<usize> = (0..self.len()).filter(|&i| self.nodes[i].id.time() == Some(next)).collect();
            let key = |x: &[u32], idx: &[usize]| idx.iter().map(|&i| x[i]).collect::<Vec<u32>>();
            let mut h: HashMap<Vec<u32>, Rational> = HashMap::new();
            let mut hn: HashMap<(Vec<u32>, Vec<u32>), Rational> = HashMap::new();
            let mut s: HashMap<Vec<u32>, Rational> = HashMap::new();
            let mut sn: HashMap<(Vec<u32>, Vec<u32>), Rational> = HashMap::new();
            for (x, p) in support.states.iter().zip(&support.probs) {
                let (kh, ks, kn) = (key(x, &hist), key(x, &now), key(x, &nxt));
                *h.entry(kh.clone()).or_insert_with(Rational::zero) += p;
                *hn.entry((kh, kn.clone())).or_insert_with(Rational::zero) += p;
                *s.entry(ks.clone()).or_insert_with(Rational::zero) += p;
                *sn.entry((ks, kn)).or_insert_with(Rational::zero) += p;
            }
            let pos: Vec<usize> = now.iter().map(|i| hist.iter().position(|j| j == i).unwrap()).collect();
            for ((kh, kn), p) in &hn {
                let ks: Vec<u32> = pos.iter().map(|&k| kh[k]).collect();
                let lhs = p / &h[kh];
                let rhs = &sn[&(ks.clone(), kn.clone())] / &s[&ks];
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn topo_order(nodes: &[NodeData]) -> Result<Vec<usize>> {
    let n = nodes.len();
    let mut indeg: Vec<usize> = nodes.iter().map(|d| d.parents.len()).collect();
    let mut children = vec![Vec::new(); n];
    for (i, d) in nodes.iter().enumerate() {
        for &p in &d.parents {
            children[p].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() != n {
        return Err(Error::Model("graph contains a cycle".into()));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coin(id: &str) -> NodeSpec {
        NodeSpec {
            id: NodeId::named(id),
            states: StateSpace::binary(),
            mechanism: Mechanism::root(vec![ratio(1, 2), ratio(1, 2)]),
        }
    }

    #[test]
    fn rejects_cycles_and_bad_rows() {
        let a = NodeSpec {
            id: NodeId::named("a"),
            states: StateSpace::binary(),
            mechanism: Mechanism::new(
                vec![NodeId::named("b")],
                vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]],
            ),
        };
        let b = NodeSpec {
            id: NodeId::named("b"),
            states: StateSpace::binary(),
            mechanism: Mechanism::new(
                vec![NodeId::named("a")],
                vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]],
            ),
        };
        assert!(matches!(BayesNet::new("c", vec![a, b]), Err(Error::Model(_))));
        let bad = NodeSpec {
            id: NodeId::named("x"),
            states: StateSpace::binary(),
            mechanism: Mechanism::root(vec![ratio(1, 2), ratio(1, 3)]),
        };
        assert!(BayesNet::new("bad", vec![bad]).is_err());
    }

    #[test]
    fn independent_coins() {
        let net = BayesNet::new("coins", vec![coin("a"), coin("b")]).unwrap();
        let p = Pattern::from_pairs([(NodeId::named("a"), 0)]).unwrap();
        assert_eq!(net.marginal_probability(&p).unwrap(), ratio(1, 2));
        assert_eq!(net.marginal_probability(&Pattern::new()).unwrap(), ratio(1, 1));
        assert_eq!(net.enumerate_trajectories().unwrap().len(), 4);
        assert_eq!(net.conditional_probability(&p, &p).unwrap(), ratio(1, 1));
    }

    #[test]
    fn state_cap_is_enforced() {
        let net = BayesNet::new("coins", vec![coin("a"), coin("b"), coin("c")]).unwrap().with_state_cap(4);
        assert!(matches!(net.enumerate_trajectories(), Err(Error::StateCap { .. })));
    }
}
