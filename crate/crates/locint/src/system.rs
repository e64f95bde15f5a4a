//! TOML system files.
//!
//! A file declares either explicit `[[node]]` tables or a `[markov]` shorthand,
//! plus optional `[paloop]` and `[[group]]` sections:
//!
//! ```toml
//! [net]
//! name = "coins"
//!
//! [[node]]
//! id = "a"
//! states = ["h", "t"]
//! parents = []
//! cpt = [["1/2", "1/2"]]
//!
//! [[group]]
//! name = "swap"
//! generators = ["(a b)"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_markov_chain, BayesNet, DrivenKernel, Kernel, MarkovSpec, Mechanism, NodeId, NodeSpec, StateSpace};
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::symmetry::{GeneratedGroup, Permutation};

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct NetSection {
    #[serde(default)]
    name: String,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct NodeSection {
    id: String,
    states: Vec<String>,
    #[serde(default)]
    parents: Vec<String>,
    cpt: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MarkovSection {
    times: u32,
    /// One symbol list per spatial index `j = 1..=J`.
    states: Vec<Vec<String>>,
    initial: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    driving: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    driving_matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    driven_matrix: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PaLoopSection {
    memory: u32,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    name: String,
    generators: Vec<String>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(default)]
    net: NetSection,
    #[serde(default, rename = "node", skip_serializing_if = "Vec::is_empty")]
    nodes: Vec<NodeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    markov: Option<MarkovSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paloop: Option<PaLoopSection>,
    #[serde(default, rename = "group", skip_serializing_if = "Vec::is_empty")]
    groups: Vec<GroupSection>,
}

/// A loaded system: the net, the Markov spec it came from (if any), and declared extras.
#[derive(Clone, Debug)]
pub struct System {
    pub net: BayesNet,
    pub markov: Option<MarkovSpec>,
    /// Row holding the memory process when the net is a perception-action loop.
    pub paloop_memory: Option<u32>,
    pub groups: Vec<(String, GeneratedGroup)>,
}

impl System {
    pub fn from_net(net: BayesNet) -> Self {
        System { net, markov: None, paloop_memory: None, groups: Vec::new() }
    }

    pub fn from_markov(spec: MarkovSpec) -> Result<Self> {
        let net = build_markov_chain(&spec)?;
        Ok(System { net, markov: Some(spec), paloop_memory: None, groups: Vec::new() })
    }

    pub fn group(&self, name: &str) -> Result<&GeneratedGroup> {
        self.groups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| Error::Config(format!("no group named `{name}`")))
    }
}

fn rationals(row: &[String]) -> Result<Vec<Rational>> {
    row.iter().map(|s| parse_rational(s)).collect()
}

fn matrix(rows: &[Vec<String>]) -> Result<Vec<Vec<Rational>>> {
    rows.iter().map(|r| rationals(r)).collect()
}

fn strings(row: &[Rational]) -> Vec<String> {
    row.iter().map(fmt_rational).collect()
}

fn config(e: Error) -> Error {
    match e {
        Error::Parse(_) | Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn markov_spec(name: &str, m: &MarkovSection) -> Result<MarkovSpec> {
    let states = m.states.iter().map(|s| StateSpace::new(s.iter().cloned())).collect::<Result<Vec<_>>>()?;
    let kernel = match (&m.matrix, &m.driving, &m.driving_matrix, &m.driven_matrix) {
        (Some(mx), None, None, None) => Kernel::Joint(matrix(mx)?),
        (None, Some(b), Some(dm), Some(am)) => {
            Kernel::Driven(DrivenKernel { driving: b.clone(), driving_matrix: matrix(dm)?, driven_matrix: matrix(am)? })
        }
        _ => {
            return Err(Error::Config(
                "[markov] needs either `matrix` or all of `driving`, `driving_matrix`, `driven_matrix`".into(),
            ))
        }
    };
    Ok(MarkovSpec { name: name.to_string(), states, times: m.times, kernel, initial: rationals(&m.initial)? })
}

fn node_spec(n: &NodeSection) -> Result<NodeSpec> {
    Ok(NodeSpec {
        id: n.id.parse()?,
        states: StateSpace::new(n.states.iter().cloned())?,
        mechanism: Mechanism::new(
            n.parents.iter().map(|p| p.parse()).collect::<Result<Vec<NodeId>>>()?,
            matrix(&n.cpt)?,
        ),
    })
}

/// Parses a system file. Syntax errors carry the TOML line and column;
/// model errors (bad tables, cycles) are reported as configuration errors.
pub fn parse_system(text: &str) -> Result<System> {
    let file: SystemFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let name = if file.net.name.is_empty() { "system".to_string() } else { file.net.name.clone() };
    let mut system = match (&file.markov, file.nodes.is_empty()) {
        (Some(m), true) => System::from_markov(markov_spec(&name, m).map_err(config)?).map_err(config)?,
        (None, false) => {
            let specs = file.nodes.iter().map(node_spec).collect::<Result<Vec<_>>>().map_err(config)?;
            System::from_net(BayesNet::new(name, specs).map_err(config)?)
        }
        (Some(_), false) => return Err(Error::Config("use either [markov] or [[node]] tables, not both".into())),
        (None, true) => return Err(Error::Config("system defines no nodes".into())),
    };
    if let Some(p) = &file.paloop {
        if !system.net.spatial_indices().contains(&p.memory) {
            return Err(Error::Config(format!("[paloop] memory row {} does not exist", p.memory)));
        }
        system.paloop_memory = Some(p.memory);
    }
    for g in &file.groups {
        let gens = g.generators.iter().map(|s| s.parse::<Permutation>()).collect::<Result<Vec<_>>>()?;
        for p in &gens {
            for id in p.support() {
                system.net.index_of(&id).map_err(config)?;
            }
        }
        system.groups.push((g.name.clone(), GeneratedGroup::new(gens)));
    }
    Ok(system)
}

pub fn load_system(path: &Path) -> Result<System> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Renders a system back to TOML. Parsing the output reproduces an equal net.
pub fn render_system(system: &System) -> String {
    let mut file = SystemFile { net: NetSection { name: system.net.name().to_string() }, ..Default::default() };
    match &system.markov {
        Some(spec) => {
            let mut m = MarkovSection {
                times: spec.times,
                states: spec.states.iter().map(|s| s.symbols().to_vec()).collect(),
                initial: strings(&spec.initial),
                matrix: None,
                driving: None,
                driving_matrix: None,
                driven_matrix: None,
            };
            match &spec.kernel {
                Kernel::Joint(mx) => m.matrix = Some(mx.iter().map(|r| strings(r)).collect()),
                Kernel::Driven(d) => {
                    m.driving = Some(d.driving.clone());
                    m.driving_matrix = Some(d.driving_matrix.iter().map(|r| strings(r)).collect());
                    m.driven_matrix = Some(d.driven_matrix.iter().map(|r| strings(r)).collect());
                }
            }
            file.markov = Some(m);
        }
        None => {
            file.nodes = system
                .net
                .specs()
                .into_iter()
                .map(|s| NodeSection {
                    id: s.id.to_string(),
                    states: s.states.symbols().to_vec(),
                    parents: s.mechanism.parents.iter().map(ToString::to_string).collect(),
                    cpt: s.mechanism.rows.iter().map(|r| strings(r)).collect(),
                })
                .collect();
        }
    }
    file.paloop = system.paloop_memory.map(|memory| PaLoopSection { memory });
    file.groups = system
        .groups
        .iter()
        .map(|(name, g)| GroupSection { name: name.clone(), generators: g.generators.iter().map(ToString::to_string).collect() })
        .collect();
    toml::to_string(&file).expect("system file serializes")
}
