//! Spatiotemporal patterns: partial assignments of symbols to nodes.
//!
//! Patterns carry no probabilities and are bound to a net only at call sites.
//! Values are symbol indices into each node's [`StateSpace`](crate::model::StateSpace).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{BayesNet, NodeId};
use crate::partition::SetPartition;

/// A partial assignment `x_A`, stored in canonical `(t, j)` node order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    entries: BTreeMap<NodeId, u32>,
}

impl Pattern {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a pattern; a node given twice with different values is an error.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, u32)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (id, v) in pairs {
            if let Some(old) = entries.insert(id.clone(), v) {
                if old != v {
                    return Err(Error::InvalidArgument(format!("node `{id}` assigned twice")));
                }
            }
        }
        Ok(Pattern { entries })
    }

    /// Grid pattern from `(j, t, value)` triples.
    pub fn grid(cells: impl IntoIterator<Item = (u32, u32, u32)>) -> Self {
        let mut entries = BTreeMap::new();
        for (j, t, v) in cells {
            entries.insert(NodeId::grid(j, t), v);
        }
        Pattern { entries }
    }

    pub fn insert(&mut self, id: NodeId, value: u32) -> Option<u32> {
        self.entries.insert(id, value)
    }

    pub fn get(&self, id: &NodeId) -> Option<u32> {
        self.entries.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, u32)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    /// The index set `A`.
    pub fn domain(&self) -> Vec<NodeId> {
        self.entries.keys().cloned().collect()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.entries.contains_key(id)
    }

    /// `x_B` for `B ⊆ A`; nodes outside `A` are ignored.
    pub fn restrict<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> Pattern {
        let entries = nodes
            .into_iter()
            .filter_map(|n| self.entries.get(n).map(|v| (n.clone(), *v)))
            .collect();
        Pattern { entries }
    }

    /// True when the two patterns assign equal values on their shared nodes.
    pub fn compatible(&self, other: &Pattern) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().all(|(k, v)| large.get(k).map_or(true, |w| w == v))
    }

    /// Union of two compatible patterns; `None` if they conflict.
    pub fn merge(&self, other: &Pattern) -> Option<Pattern> {
        if !self.compatible(other) {
            return None;
        }
        let mut out = self.clone();
        out.entries.extend(other.iter().map(|(k, v)| (k.clone(), v)));
        Some(out)
    }

    fn filter_time(&self, keep: impl Fn(u32) -> bool) -> Pattern {
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| k.time().is_some_and(&keep))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Pattern { entries }
    }

    /// Time-slice `x_{A_t}`.
    pub fn slice(&self, t: u32) -> Pattern {
        self.filter_time(|s| s == t)
    }

    /// Past including `t`: `x_{A_{≼t}}`.
    pub fn up_to(&self, t: u32) -> Pattern {
        self.filter_time(|s| s <= t)
    }

    /// Future strictly after `t`: `x_{A_{t≺}}`.
    pub fn after(&self, t: u32) -> Pattern {
        self.filter_time(|s| s > t)
    }

    /// Slices `t0..=t1`.
    pub fn interval(&self, t0: u32, t1: u32) -> Pattern {
        self.filter_time(|s| (t0..=t1).contains(&s))
    }

    /// Times with a nonempty slice.
    pub fn times(&self) -> BTreeSet<u32> {
        self.entries.keys().filter_map(NodeId::time).collect()
    }

    /// Spatial indices occupied at time `t`.
    pub fn spatial_set(&self, t: u32) -> BTreeSet<u32> {
        self.entries
            .keys()
            .filter_map(NodeId::coord)
            .filter(|c| c.1 == t)
            .map(|c| c.0)
            .collect()
    }

    fn require_grid(&self) -> Result<()> {
        if self.entries.keys().all(|k| k.coord().is_some()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument("pattern nodes lack (j,t) coordinates".into()))
        }
    }
}

impl fmt::Display for Pattern {
    /// Literal form `j/t=symbol,...`; the empty pattern renders as `{}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Parses `1/0=0,2/2=1` with numeric symbol indices. `{}` or an empty
    /// string is the empty pattern. Use [`BayesNet::parse_pattern`] for labels.
    fn from_str(s: &str) -> Result<Self> {
        parse_literal(s, |_, sym| {
            sym.parse::<u32>().map_err(|_| Error::Parse(format!("symbol `{sym}` is not an index")))
        })
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn parse_literal(
    s: &str,
    mut symbol: impl FnMut(&NodeId, &str) -> Result<u32>,
) -> Result<Pattern> {
    let s = s.trim();
    if s.is_empty() || s == "{}" {
        return Ok(Pattern::new());
    }
    let mut pairs = Vec::new();
    for item in s.split(',') {
        let (id, sym) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `node=symbol`, got `{item}`")))?;
        let id: NodeId = id.parse()?;
        let v = symbol(&id, sym.trim())?;
        pairs.push((id, v));
    }
    Pattern::from_pairs(pairs).map_err(|e| Error::Parse(e.to_string()))
}

/// True iff `trajectory` restricted to the pattern's domain equals the pattern.
/// The empty pattern occurs everywhere.
pub fn occurs_in(pattern: &Pattern, trajectory: &Pattern) -> bool {
    pattern.iter().all(|(k, v)| trajectory.get(k) == Some(v))
}

/// `𝒯(x_A)`: the trajectories in which the pattern occurs, in enumeration order.
/// With `possible_only` only positive-probability trajectories are considered.
pub fn trajectory_set(net: &BayesNet, pattern: &Pattern, possible_only: bool) -> Result<Vec<Pattern>> {
    net.resolve(pattern)?;
    if possible_only {
        let support = net.support()?;
        Ok(support
            .states
            .iter()
            .map(|s| net.trajectory_pattern(s))
            .filter(|tr| occurs_in(pattern, tr))
            .collect())
    } else {
        Ok(net
            .all_assignments()?
            .into_iter()
            .map(|s| net.trajectory_pattern(&s))
            .filter(|tr| occurs_in(pattern, tr))
            .collect())
    }
}

/// Every assignment on `domain`, in lexicographic order over the canonical node order.
pub fn assignments(net: &BayesNet, domain: &[NodeId]) -> Result<Vec<Pattern>> {
    let sizes = domain
        .iter()
        .map(|id| Ok(net.states(net.index_of(id)?).len() as u32))
        .collect::<Result<Vec<_>>>()?;
    let total: u128 = sizes.iter().map(|&s| s as u128).product();
    if total > net.state_cap() {
        return Err(Error::StateCap { size: total, cap: net.state_cap() });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![0u32; domain.len()];
    loop {
        out.push(Pattern::from_pairs(domain.iter().cloned().zip(cur.iter().copied()))?);
        let mut k = domain.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// `¬(x_A)`: assignments on `A` that differ from the pattern at every node.
pub fn anti_patterns(net: &BayesNet, pattern: &Pattern) -> Result<Vec<Pattern>> {
    if pattern.is_empty() {
        return Err(Error::InvalidArgument("anti-patterns of the empty pattern are undefined".into()));
    }
    net.resolve(pattern)?;
    let domain = pattern.domain();
    let singletons = SetPartition::zero(&domain);
    anti_patterns_wrt(net, pattern, &singletons)
}

/// `¬_π(x_A)`: assignments on `A` that differ from the pattern inside every block of `π`.
pub fn anti_patterns_wrt(
    net: &BayesNet,
    pattern: &Pattern,
    partition: &SetPartition<NodeId>,
) -> Result<Vec<Pattern>> {
    let domain = pattern.domain();
    if partition.ground() != domain.as_slice() {
        return Err(Error::PartitionMismatch("partition ground differs from pattern domain".into()));
    }
    net.resolve(pattern)?;
    let blocks = partition.blocks();
    Ok(assignments(net, &domain)?
        .into_iter()
        .filter(|cand| {
            blocks.iter().all(|b| b.iter().any(|n| cand.get(n) != pattern.get(n)))
        })
        .collect())
}

/// Composite classification of a grid pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Composite {
    /// Some slice occupies more than one node.
    pub spatial: bool,
    /// More than one slice is nonempty.
    pub temporal: bool,
}

impl Composite {
    pub fn spatiotemporal(&self) -> bool {
        self.spatial && self.temporal
    }
}

pub fn classify_composite(pattern: &Pattern) -> Result<Composite> {
    pattern.require_grid()?;
    let times = pattern.times();
    Ok(Composite {
        spatial: times.iter().any(|&t| pattern.spatial_set(t).len() > 1),
        temporal: times.len() > 1,
    })
}

/// True iff two nonempty slices occupy different spatial index sets.
pub fn traverses_dof(pattern: &Pattern) -> Result<bool> {
    pattern.require_grid()?;
    let sets: BTreeSet<BTreeSet<u32>> = pattern.times().iter().map(|&t| pattern.spatial_set(t)).collect();
    Ok(sets.len() > 1)
}

/// How two patterns differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variation {
    Equal,
    Value,
    Extent,
    ValueAndExtent,
}

pub fn variation(p: &Pattern, q: &Pattern) -> Variation {
    let same_domain = p.len() == q.len() && p.entries.keys().eq(q.entries.keys());
    let disagree = !p.compatible(q);
    match (same_domain, disagree) {
        (true, false) => Variation::Equal,
        (true, true) => Variation::Value,
        (false, false) => Variation::Extent,
        (false, true) => Variation::ValueAndExtent,
    }
}

/// ASCII grid: one row per spatial index, one column per time step, `.` for unfixed nodes.
pub fn render_grid(net: &BayesNet, pattern: &Pattern) -> Result<String> {
    pattern.require_grid()?;
    let (rows, times) = (net.spatial_indices(), net.times());
    let width = pattern
        .iter()
        .map(|(k, v)| net.symbol_label(k, v).map(|s| s.len()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for &j in &rows {
        let cells: Vec<String> = times
            .iter()
            .map(|&t| {
                let id = NodeId::grid(j, t);
                match pattern.get(&id) {
                    Some(v) => net.symbol_label(&id, v).map(|s| format!("{s:>width$}")),
                    None => Ok(format!("{:>width$}", ".")),
                }
            })
            .collect::<Result<_>>()?;
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Plain (P2) PGM image of the grid: unfixed nodes are mid grey, symbol 0 is
/// white and the last symbol black.
pub fn render_pgm(net: &BayesNet, pattern: &Pattern) -> Result<String> {
    pattern.require_grid()?;
    let (rows, times) = (net.spatial_indices(), net.times());
    let mut out = format!("P2\n{} {}\n255\n", times.len(), rows.len());
    for &j in &rows {
        let mut line = Vec::new();
        for &t in &times {
            let id = NodeId::grid(j, t);
            let level = match pattern.get(&id) {
                None => 128,
                Some(v) => {
                    let k = net.states(net.index_of(&id)?).len() as u32;
                    if k <= 1 { 255 } else { 255 - v * 255 / (k - 1) }
                }
            };
            line.push(level.to_string());
        }
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        let p: Pattern = "2/2=1,1/0=0".parse().unwrap();
        assert_eq!(p.to_string(), "1/0=0,2/2=1");
        assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p);
        assert!("".parse::<Pattern>().unwrap().is_empty());
        assert!("1/0=0,1/0=1".parse::<Pattern>().is_err());
        assert!("1/0".parse::<Pattern>().is_err());
    }

    #[test]
    fn slices_and_pasts() {
        let p = Pattern::grid([(2, 0, 1), (1, 1, 0), (1, 2, 0), (2, 2, 1)]);
        assert_eq!(p.slice(0), Pattern::grid([(2, 0, 1)]));
        assert_eq!(p.up_to(1), Pattern::grid([(2, 0, 1), (1, 1, 0)]));
        assert_eq!(p.after(1), Pattern::grid([(1, 2, 0), (2, 2, 1)]));
        assert_eq!(p.times().into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn composite_and_dof() {
        let spatial = Pattern::grid([(1, 1, 0), (2, 1, 0)]);
        let c = classify_composite(&spatial).unwrap();
        assert!(c.spatial && !c.temporal);
        let row = Pattern::grid([(1, 0, 0), (1, 1, 0), (1, 2, 0)]);
        let c = classify_composite(&row).unwrap();
        assert!(!c.spatial && c.temporal);
        let single = Pattern::grid([(1, 0, 0)]);
        let c = classify_composite(&single).unwrap();
        assert!(!c.spatial && !c.temporal && !c.spatiotemporal());

        assert!(traverses_dof(&Pattern::grid([(2, 0, 0), (1, 1, 0)])).unwrap());
        assert!(!traverses_dof(&Pattern::grid([(1, 0, 0), (1, 1, 0)])).unwrap());
        assert!(!traverses_dof(&spatial).unwrap());
        assert!(classify_composite(&Pattern::from_pairs([(NodeId::named("a"), 0)]).unwrap()).is_err());
    }

    #[test]
    fn variations() {
        let a = Pattern::grid([(1, 0, 0), (1, 1, 0), (1, 2, 0)]);
        let b = Pattern::grid([(1, 0, 1), (1, 1, 1), (1, 2, 1)]);
        assert_eq!(variation(&a, &b), Variation::Value);
        assert_eq!(variation(&a, &a), Variation::Equal);
        let c = Pattern::grid([(2, 1, 0)]);
        let d = Pattern::grid([(1, 1, 0)]);
        assert_eq!(variation(&c, &d), Variation::Extent);
        let e = Pattern::grid([(1, 0, 1), (1, 1, 0)]);
        assert_eq!(variation(&a, &e), Variation::ValueAndExtent);
    }

    #[test]
    fn occurrence() {
        let traj = Pattern::grid([(1, 0, 0), (2, 0, 0), (1, 1, 0), (2, 1, 0)]);
        assert!(occurs_in(&Pattern::grid([(1, 0, 0), (1, 1, 0)]), &traj));
        assert!(!occurs_in(&Pattern::grid([(1, 0, 1)]), &traj));
        assert!(occurs_in(&Pattern::new(), &traj));
    }
}
