use std::collections::BTreeMap;

use num::{One, Zero};

use super::{BayesNet, Mechanism, NodeId, NodeSpec, StateSpace};
use crate::error::{Error, Result};
use crate::rational::{is_probability, Rational};

/// Factored kernel of a driven chain.
///
/// `driving_matrix[b'][s]` is `p(x_{B,t+1} | x_{V_t})` and
/// `driven_matrix[a'][(b', a)]` is `p(x_{A,t+1} | x_{B,t+1}, x_{A,t})`, with the
/// column index `b' * |𝒳_A| + a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrivenKernel {
    /// Spatial indices of the driving nodes `B`.
    pub driving: Vec<u32>,
    pub driving_matrix: Vec<Vec<Rational>>,
    pub driven_matrix: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `matrix[next][prev]` over whole time-slices.
    Joint(Vec<Vec<Rational>>),
    Driven(DrivenKernel),
}

/// A time-homogeneous multivariate Markov chain on `J` spatial indices (`1..=J`)
/// and `times` slices (`0..times`).
///
/// Slice states are indexed row-major over ascending `j`, with `x_1` most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovSpec {
    pub name: String,
    pub states: Vec<StateSpace>,
    pub times: u32,
    pub kernel: Kernel,
    pub initial: Vec<Rational>,
}

fn radix_values(mut idx: usize, sizes: &[usize]) -> Vec<u32> {
    let mut out = vec![0u32; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = (idx % sizes[k]) as u32;
        idx /= sizes[k];
    }
    out
}

fn radix_index(values: &[u32], sizes: &[usize]) -> usize {
    values.iter().zip(sizes).fold(0, |acc, (&v, &s)| acc * s + v as usize)
}

fn check_stochastic(m: &[Vec<Rational>], rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Model(format!("{what} must be {rows}x{cols}")));
    }
    for c in 0..cols {
        let mut sum = Rational::zero();
        for row in m {
            if !is_probability(&row[c]) {
                return Err(Error::Model(format!("{what} entry outside [0,1] in column {c}")));
            }
            sum += &row[c];
        }
        if !sum.is_one() {
            return Err(Error::Model(format!("{what} column {c} does not sum to 1")));
        }
    }
    Ok(())
}

impl MarkovSpec {
    pub fn j_count(&self) -> u32 {
        self.states.len() as u32
    }

    fn sizes(&self) -> Vec<usize> {
        self.states.iter().map(StateSpace::len).collect()
    }

    /// `|𝒳_{V_t}|`.
    pub fn slice_size(&self) -> usize {
        self.states.iter().map(StateSpace::len).product()
    }

    pub fn slice_values(&self, idx: usize) -> Vec<u32> {
        radix_values(idx, &self.sizes())
    }

    pub fn slice_index(&self, values: &[u32]) -> usize {
        radix_index(values, &self.sizes())
    }

    fn split(&self) -> (Vec<u32>, Vec<u32>) {
        let driving = match &self.kernel {
            Kernel::Joint(_) => Vec::new(),
            Kernel::Driven(d) => d.driving.clone(),
        };
        let driven = (1..=self.j_count()).filter(|j| !driving.contains(j)).collect();
        (driving, driven)
    }

    fn sub_sizes(&self, js: &[u32]) -> Vec<usize> {
        js.iter().map(|&j| self.states[j as usize - 1].len()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::Model("J must be at least 1".into()));
        }
        if self.times < 1 {
            return Err(Error::Model("T must be at least 1".into()));
        }
        let n = self.slice_size();
        if self.initial.len() != n {
            return Err(Error::Model(format!("initial distribution needs {n} entries")));
        }
        if !self.initial.iter().all(is_probability) || self.initial.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Model("initial distribution is not a probability vector".into()));
        }
        match &self.kernel {
            Kernel::Joint(m) => check_stochastic(m, n, n, "Markov matrix"),
            Kernel::Driven(d) => {
                let mut seen = d.driving.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != d.driving.len() || seen.iter().any(|&j| j < 1 || j > self.j_count()) {
                    return Err(Error::Model("driving indices must be distinct values in 1..=J".into()));
                }
                let (b, a) = self.split();
                let nb: usize = self.sub_sizes(&b).iter().product();
                let na: usize = self.sub_sizes(&a).iter().product();
                check_stochastic(&d.driving_matrix, nb, n, "driving matrix")?;
                check_stochastic(&d.driven_matrix, na, nb * na, "driven matrix")
            }
        }
    }

    /// `p(x_{V_{t+1}} = next | x_{V_t} = prev)`.
    pub fn transition(&self, next: usize, prev: usize) -> Rational {
        match &self.kernel {
            Kernel::Joint(m) => m[next][prev].clone(),
            Kernel::Driven(d) => {
                let (b, a) = self.split();
                let (sb, sa) = (self.sub_sizes(&b), self.sub_sizes(&a));
                let na: usize = sa.iter().product();
                let nv = self.slice_values(next);
                let pv = self.slice_values(prev);
                let pick = |x: &[u32], js: &[u32]| js.iter().map(|&j| x[j as usize - 1]).collect::<Vec<_>>();
                let ib = radix_index(&pick(&nv, &b), &sb);
                let ia_next = radix_index(&pick(&nv, &a), &sa);
                let ia_prev = radix_index(&pick(&pv, &a), &sa);
                &d.driving_matrix[ib][prev] * &d.driven_matrix[ia_next][ib * na + ia_prev]
            }
        }
    }

    /// The whole-slice kernel `P[next][prev]`, composing a driven kernel if needed.
    pub fn joint_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.slice_size();
        (0..n).map(|next| (0..n).map(|prev| self.transition(next, prev)).collect()).collect()
    }

    /// Order in which same-slice nodes may condition on each other: driving before driven.
    fn intra_order(&self) -> Vec<u32> {
        let (mut b, a) = self.split();
        b.extend(a);
        b
    }
}

/// Conditional table of one node over candidate parents, rows in lexicographic order.
#[derive(Clone)]
struct Table {
    parents: Vec<NodeId>,
    sizes: Vec<usize>,
    rows: Vec<Option<Vec<Rational>>>,
}

impl Table {
    fn without(&self, k: usize) -> Option<Table> {
        let mut sizes = self.sizes.clone();
        sizes.remove(k);
        let count: usize = sizes.iter().product();
        let mut rows: Vec<Option<Vec<Rational>>> = vec![None; count];
        for (r, row) in self.rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let mut cfg = radix_values(r, &self.sizes);
            cfg.remove(k);
            let slot = &mut rows[radix_index(&cfg, &sizes)];
            match slot {
                None => *slot = Some(row.clone()),
                Some(existing) if existing == row => {}
                Some(_) => return None,
            }
        }
        let mut parents = self.parents.clone();
        parents.remove(k);
        Some(Table { parents, sizes, rows })
    }

    fn prune(mut self) -> Table {
        'outer: loop {
            for k in 0..self.parents.len() {
                if let Some(t) = self.without(k) {
                    self = t;
                    continue 'outer;
                }
            }
            return self;
        }
    }

    fn into_mechanism(self, arity: usize) -> Mechanism {
        let uniform = vec![Rational::new(1.into(), (arity as i64).into()); arity];
        Mechanism::new(self.parents, self.rows.into_iter().map(|r| r.unwrap_or_else(|| uniform.clone())).collect())
    }
}

/// Chain-rule conditional of variable `target` given `cands` (indices into the
/// assignment vector) under the weights `w`, over assignments described by `sizes`.
fn conditional_table(
    weights: &[(Vec<u32>, Rational)],
    cands: &[(usize, NodeId)],
    var_sizes: &[usize],
    target: usize,
) -> Table {
    let sizes: Vec<usize> = cands.iter().map(|(v, _)| var_sizes[*v]).collect();
    let count: usize = sizes.iter().product();
    let arity = var_sizes[target];
    let mut acc: Vec<Vec<Rational>> = vec![vec![Rational::zero(); arity]; count];
    for (x, w) in weights {
        if w.is_zero() {
            continue;
        }
        let cfg: Vec<u32> = cands.iter().map(|(v, _)| x[*v]).collect();
        acc[radix_index(&cfg, &sizes)][x[target] as usize] += w;
    }
    let rows = acc
        .into_iter()
        .map(|row| {
            let total: Rational = row.iter().sum();
            if total.is_zero() {
                None
            } else {
                Some(row.into_iter().map(|p| p / &total).collect())
            }
        })
        .collect();
    Table { parents: cands.iter().map(|(_, id)| id.clone()).collect(), sizes, rows }
}

/// Builds the Bayesian network of a multivariate Markov chain.
///
/// Each node's mechanism is its chain-rule conditional given the previous slice
/// and the same-slice nodes before it (driving nodes first), with every parent the
/// conditional does not depend on removed. The joint distribution is exactly the
/// one defined by `initial` and the kernel.
pub fn build_markov_chain(spec: &MarkovSpec) -> Result<BayesNet> {
    spec.validate()?;
    let jn = spec.j_count() as usize;
    let n = spec.slice_size();
    let order = spec.intra_order();

    // t = 0: variables are the slice itself.
    let init_weights: Vec<(Vec<u32>, Rational)> =
        (0..n).map(|i| (spec.slice_values(i), spec.initial[i].clone())).collect();
    let slice_sizes = spec.sizes();
    let mut initial_tables = BTreeMap::new();
    for (k, &j) in order.iter().enumerate() {
        let mut cands: Vec<(usize, NodeId)> =
            order[..k].iter().map(|&i| (i as usize - 1, NodeId::grid(i, 0))).collect();
        cands.sort_by(|a, b| a.1.cmp(&b.1));
        let table = conditional_table(&init_weights, &cands, &slice_sizes, j as usize - 1).prune();
        initial_tables.insert(j, table);
    }

    // t >= 1: variables are (prev slice, next slice). Parents are expressed at t = 1 and shifted.
    let mut step_tables = BTreeMap::new();
    if spec.times > 1 {
        let matrix = spec.joint_matrix();
        let mut pair_sizes = slice_sizes.clone();
        pair_sizes.extend(&slice_sizes);
        let mut weights = Vec::with_capacity(n * n);
        for prev in 0..n {
            let pv = spec.slice_values(prev);
            for (next, row) in matrix.iter().enumerate() {
                if row[prev].is_zero() {
                    continue;
                }
                let mut x = pv.clone();
                x.extend(spec.slice_values(next));
                weights.push((x, row[prev].clone()));
            }
        }
        for (k, &j) in order.iter().enumerate() {
            let mut cands: Vec<(usize, NodeId)> = (1..=jn as u32).map(|i| (i as usize - 1, NodeId::grid(i, 0))).collect();
            cands.extend(order[..k].iter().map(|&i| (jn + i as usize - 1, NodeId::grid(i, 1))));
            cands.sort_by(|a, b| a.1.cmp(&b.1));
            let table = conditional_table(&weights, &cands, &pair_sizes, jn + j as usize - 1).prune();
            step_tables.insert(j, table);
        }
    }

    let mut specs = Vec::new();
    for t in 0..spec.times {
        for j in 1..=spec.j_count() {
            let states = spec.states[j as usize - 1].clone();
            let arity = states.len();
            let mechanism = if t == 0 {
                initial_tables[&j].clone().into_mechanism(arity)
            } else {
                let mut tab: Table = step_tables[&j].clone();
                tab.parents = tab
                    .parents
                    .iter()
                    .map(|p| {
                        let (pj, pt) = p.coord().expect("grid id");
                        NodeId::grid(pj, t - 1 + pt)
                    })
                    .collect();
                tab.into_mechanism(arity)
            };
            specs.push(NodeSpec { id: NodeId::grid(j, t), states, mechanism });
        }
    }
    BayesNet::new(spec.name.clone(), specs)
}
