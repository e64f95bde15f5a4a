//! Discrete Bayesian networks with exact rational mechanisms, and the
//! multivariate Markov chains built on top of them.

mod markov;
mod net;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use markov::{build_markov_chain, DrivenKernel, Kernel, MarkovSpec};
pub use net::{BayesNet, Morph, NodeSpec, Support, DEFAULT_STATE_CAP};

/// Identifier of a node. Chain-structured nets use `(j, t)` grid coordinates,
/// other nets use free-form labels.
///
/// Grid ids order by `(t, j)`; all grid ids sort before named ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeId {
    Grid { j: u32, t: u32 },
    Named(String),
}

impl NodeId {
    pub fn grid(j: u32, t: u32) -> Self {
        NodeId::Grid { j, t }
    }

    pub fn named(s: impl Into<String>) -> Self {
        NodeId::Named(s.into())
    }

    /// `(j, t)` for grid ids.
    pub fn coord(&self) -> Option<(u32, u32)> {
        match self {
            NodeId::Grid { j, t } => Some((*j, *t)),
            NodeId::Named(_) => None,
        }
    }

    pub fn time(&self) -> Option<u32> {
        self.coord().map(|c| c.1)
    }

    pub fn space(&self) -> Option<u32> {
        self.coord().map(|c| c.0)
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NodeId::Grid { j: a, t: s }, NodeId::Grid { j: b, t: u }) => (s, a).cmp(&(u, b)),
            (NodeId::Grid { .. }, NodeId::Named(_)) => Ordering::Less,
            (NodeId::Named(_), NodeId::Grid { .. }) => Ordering::Greater,
            (NodeId::Named(a), NodeId::Named(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Grid { j, t } => write!(f, "{j}/{t}"),
            NodeId::Named(s) => f.write_str(s),
        }
    }
}

impl FromStr for NodeId {
    type Err = Error;

    /// `"j/t"` with integer parts gives a grid id; anything else is a label.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((j, t)) = s.split_once('/') {
            if let (Ok(j), Ok(t)) = (j.parse(), t.parse()) {
                return Ok(NodeId::Grid { j, t });
            }
        }
        if s.is_empty() || s.contains(|c: char| c.is_whitespace() || ",=|{}()/".contains(c)) {
            return Err(Error::Parse(format!("invalid node id `{s}`")));
        }
        Ok(NodeId::Named(s.to_string()))
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Ordered, duplicate-free list of the symbols a node can take.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    symbols: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Model("state space must have at least one symbol".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::Model(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(StateSpace { symbols })
    }

    /// Symbols `"0"`, `"1"`, ..., `"n-1"`.
    pub fn range(n: usize) -> Self {
        assert!(n >= 1, "state space must be nonempty");
        StateSpace { symbols: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn binary() -> Self {
        Self::range(2)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: u32) -> Option<&str> {
        self.symbols.get(i as usize).map(String::as_str)
    }

    pub fn index_of(&self, symbol: &str) -> Option<u32> {
        self.symbols.iter().position(|s| s == symbol).map(|i| i as u32)
    }
}

/// Conditional distribution of a node given its parents.
///
/// `rows[k]` is the distribution for the `k`-th parent configuration in
/// lexicographic order over the parents' symbol orders, first parent most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mechanism {
    pub parents: Vec<NodeId>,
    pub rows: Vec<Vec<Rational>>,
}

impl Mechanism {
    /// A parentless distribution.
    pub fn root(dist: Vec<Rational>) -> Self {
        Mechanism { parents: Vec::new(), rows: vec![dist] }
    }

    pub fn new(parents: Vec<NodeId>, rows: Vec<Vec<Rational>>) -> Self {
        Mechanism { parents, rows }
    }
}
