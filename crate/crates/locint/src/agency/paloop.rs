use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::{perception_partition, CoPerceptionContext, EntityIndex, EntitySet};
use crate::error::{Error, Result};
use crate::model::{BayesNet, Mechanism, NodeId, NodeSpec, StateSpace};
use crate::partition::SetPartition;
use crate::pattern::Pattern;
use crate::rational::{is_probability, log2, ratio, Rational};

/// A perception-action loop: environment `E_t` in row 1, memory `M_t` in row 2.
///
/// Kernel rows are indexed by `e * |𝓜| + m`, matching a mechanism with parents `[E_t, M_t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaLoop {
    pub environment: StateSpace,
    pub memory: StateSpace,
    /// Number of time steps; at least 2.
    pub times: u32,
    /// `initial[e][m] = p(e_0, m_0)`.
    pub initial: Vec<Vec<Rational>>,
    /// `env_kernel[t][e·|𝓜|+m][e'] = p(e_{t+1}=e' | e_t=e, m_t=m)`.
    pub env_kernel: Vec<Vec<Vec<Rational>>>,
    /// `mem_kernel[t][e·|𝓜|+m][m'] = p(m_{t+1}=m' | e_t=e, m_t=m)`.
    pub mem_kernel: Vec<Vec<Vec<Rational>>>,
}

fn check_dist(row: &[Rational], len: usize, what: &str) -> Result<()> {
    if row.len() != len || !row.iter().all(is_probability) || row.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::Model(format!("{what} is not a distribution over {len} states")));
    }
    Ok(())
}

fn uniform(n: usize) -> Vec<Rational> {
    vec![ratio(1, n as i64); n]
}

fn partition_by<K: Ord>(n: usize, key: impl Fn(usize) -> K) -> SetPartition<u32> {
    let mut seen = BTreeMap::new();
    let labels: Vec<u32> = (0..n)
        .map(|i| {
            let next = seen.len() as u32;
            *seen.entry(key(i)).or_insert(next)
        })
        .collect();
    let ground: Vec<u32> = (0..n as u32).collect();
    SetPartition::from_labels(&ground, &labels).expect("labels match ground")
}

impl PaLoop {
    fn ne(&self) -> usize {
        self.environment.len()
    }

    fn nm(&self) -> usize {
        self.memory.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (ne, nm) = (self.ne(), self.nm());
        if self.times < 2 {
            return Err(Error::Model("a perception-action loop needs at least two time steps".into()));
        }
        if self.initial.len() != ne || self.initial.iter().any(|r| r.len() != nm) {
            return Err(Error::Model("initial distribution has the wrong shape".into()));
        }
        check_dist(&self.initial.concat(), ne * nm, "initial joint")?;
        let steps = self.times as usize - 1;
        if self.env_kernel.len() != steps || self.mem_kernel.len() != steps {
            return Err(Error::Model(format!("expected {steps} kernels per process")));
        }
        for t in 0..steps {
            if self.env_kernel[t].len() != ne * nm || self.mem_kernel[t].len() != ne * nm {
                return Err(Error::Model(format!("kernel at step {t} needs {} rows", ne * nm)));
            }
            for row in &self.env_kernel[t] {
                check_dist(row, ne, &format!("environment kernel row at step {t}"))?;
            }
            for row in &self.mem_kernel[t] {
                check_dist(row, nm, &format!("memory kernel row at step {t}"))?;
            }
        }
        Ok(())
    }

    fn env_marginal(&self) -> Vec<Rational> {
        self.initial.iter().map(|r| r.iter().sum()).collect()
    }

    fn initial_specs(&self, mem_row: u32) -> Vec<NodeSpec> {
        let pe = self.env_marginal();
        let pm: Vec<Rational> = (0..self.nm()).map(|m| self.initial.iter().map(|r| &r[m]).sum()).collect();
        let product = (0..self.ne()).all(|e| (0..self.nm()).all(|m| self.initial[e][m] == &pe[e] * &pm[m]));
        let m0 = if product {
            Mechanism::root(pm)
        } else {
            let rows = (0..self.ne())
                .map(|e| {
                    if pe[e].is_zero() {
                        uniform(self.nm())
                    } else {
                        self.initial[e].iter().map(|p| p / &pe[e]).collect()
                    }
                })
                .collect();
            Mechanism::new(vec![NodeId::grid(1, 0)], rows)
        };
        vec![
            NodeSpec { id: NodeId::grid(1, 0), states: self.environment.clone(), mechanism: Mechanism::root(pe) },
            NodeSpec { id: NodeId::grid(mem_row, 0), states: self.memory.clone(), mechanism: m0 },
        ]
    }

    /// The loop as a Bayesian network. `M_0` depends on `E_0` only if the initial joint is not a product.
    pub fn to_net(&self) -> Result<BayesNet> {
        self.validate()?;
        let mut specs = self.initial_specs(2);
        for t in 0..self.times - 1 {
            let parents = vec![NodeId::grid(1, t), NodeId::grid(2, t)];
            specs.push(NodeSpec {
                id: NodeId::grid(1, t + 1),
                states: self.environment.clone(),
                mechanism: Mechanism::new(parents.clone(), self.env_kernel[t as usize].clone()),
            });
            specs.push(NodeSpec {
                id: NodeId::grid(2, t + 1),
                states: self.memory.clone(),
                mechanism: Mechanism::new(parents, self.mem_kernel[t as usize].clone()),
            });
        }
        BayesNet::new("pa-loop", specs)
    }

    /// Reads a loop off a two-row grid net whose row `memory_row` is the memory process.
    /// Every node at `t+1` may depend only on the two nodes at `t`.
    pub fn from_net(net: &BayesNet, memory_row: u32) -> Result<Self> {
        let rows = net.spatial_indices();
        if !net.is_grid() || rows.len() != 2 || !rows.contains(&memory_row) {
            return Err(Error::Config(format!("a perception-action loop needs a two-row grid with row {memory_row}")));
        }
        let env_row = *rows.iter().find(|&&j| j != memory_row).expect("two rows");
        let times = net.times();
        if times.iter().enumerate().any(|(k, &t)| k as u32 != t) || times.len() < 2 {
            return Err(Error::Config("perception-action loop times must be 0..n with n ≥ 1".into()));
        }
        let idx = |j: u32, t: u32| net.index_of(&NodeId::grid(j, t));
        let (ne, nm) = (net.states(idx(env_row, 0)?).len(), net.states(idx(memory_row, 0)?).len());
        for &t in &times {
            for j in [env_row, memory_row] {
                let i = idx(j, t)?;
                let n = if j == env_row { ne } else { nm };
                if net.states(i).len() != n {
                    return Err(Error::Config(format!("row {j} changes its state space at t={t}")));
                }
                let allowed: Vec<usize> = if t == 0 {
                    vec![idx(env_row, 0)?, idx(memory_row, 0)?]
                } else {
                    vec![idx(env_row, t - 1)?, idx(memory_row, t - 1)?]
                };
                if net.parents(i).iter().any(|p| !allowed.contains(p)) {
                    return Err(Error::Config(format!("node {j}/{t} has parents outside the previous time-slice")));
                }
            }
        }
        let mut initial = vec![vec![Rational::zero(); nm]; ne];
        for (e, row) in initial.iter_mut().enumerate() {
            for (m, cell) in row.iter_mut().enumerate() {
                let p = crate::pattern::Pattern::from_pairs([
                    (NodeId::grid(env_row, 0), e as u32),
                    (NodeId::grid(memory_row, 0), m as u32),
                ])?;
                *cell = net.marginal_probability(&p)?;
            }
        }
        let mut env_kernel = Vec::new();
        let mut mem_kernel = Vec::new();
        let mut x = vec![0u32; net.len()];
        for t in 0..times.len() as u32 - 1 {
            let (ie, im, ie1, im1) = (idx(env_row, t)?, idx(memory_row, t)?, idx(env_row, t + 1)?, idx(memory_row, t + 1)?);
            let mut ek = Vec::with_capacity(ne * nm);
            let mut mk = Vec::with_capacity(ne * nm);
            for e in 0..ne as u32 {
                for m in 0..nm as u32 {
                    x[ie] = e;
                    x[im] = m;
                    let row = |target: usize, n: usize, x: &mut Vec<u32>| -> Vec<Rational> {
                        (0..n as u32)
                            .map(|v| {
                                x[target] = v;
                                net.cond(target, x).clone()
                            })
                            .collect()
                    };
                    ek.push(row(ie1, ne, &mut x));
                    mk.push(row(im1, nm, &mut x));
                }
            }
            env_kernel.push(ek);
            mem_kernel.push(mk);
        }
        let out = PaLoop {
            environment: net.states(idx(env_row, 0)?).clone(),
            memory: net.states(idx(memory_row, 0)?).clone(),
            times: times.len() as u32,
            initial,
            env_kernel,
            mem_kernel,
        };
        out.validate()?;
        Ok(out)
    }

    /// `ε_t` over all `m_t`: environments with identical memory transitions. The last step has one block.
    pub fn sensor_partition(&self, t: u32) -> SetPartition<u32> {
        if t + 1 >= self.times {
            return partition_by(self.ne(), |_| 0);
        }
        let k = &self.mem_kernel[t as usize];
        partition_by(self.ne(), |e| (0..self.nm()).map(|m| &k[e * self.nm() + m]).collect::<Vec<_>>())
    }

    /// `ε_t` for one fixed `m_t`, optionally restricted to a subset of environments.
    pub fn sensor_partition_given(&self, t: u32, m: u32, environments: &[u32]) -> Result<SetPartition<u32>> {
        if t + 1 >= self.times {
            return Err(Error::InvalidArgument(format!("no transition after t={t}")));
        }
        let k = &self.mem_kernel[t as usize];
        let labels = {
            let mut seen = BTreeMap::new();
            environments
                .iter()
                .map(|&e| {
                    let next = seen.len() as u32;
                    *seen.entry(&k[e as usize * self.nm() + m as usize]).or_insert(next)
                })
                .collect::<Vec<u32>>()
        };
        SetPartition::from_labels(environments, &labels)
    }

    /// `μ_t`: memory states with identical environment transitions. The last step has one block.
    pub fn action_partition(&self, t: u32) -> SetPartition<u32> {
        if t + 1 >= self.times {
            return partition_by(self.nm(), |_| 0);
        }
        let k = &self.env_kernel[t as usize];
        partition_by(self.nm(), |m| (0..self.ne()).map(|e| &k[e * self.nm() + m]).collect::<Vec<_>>())
    }
}

pub fn pa_sensor_partition(pa: &PaLoop, t: u32) -> SetPartition<u32> {
    pa.sensor_partition(t)
}

pub fn pa_action_partition(pa: &PaLoop, t: u32) -> SetPartition<u32> {
    pa.action_partition(t)
}

/// The extended loop with rows `E = 1`, `S = 2`, `A = 3`, `M = 4`.
#[derive(Clone, Debug)]
pub struct ExtendedLoop {
    pub net: BayesNet,
    pub sensor: Vec<SetPartition<u32>>,
    pub action: Vec<SetPartition<u32>>,
    /// Whether the marginal over `(M_T, E_T)` equals the original joint exactly.
    pub marginal_invariant: bool,
}

fn block_index(p: &SetPartition<u32>, v: u32) -> u32 {
    p.rgs()[p.ground().binary_search(&v).expect("value in ground")]
}

fn delta(n: usize, k: u32) -> Vec<Rational> {
    (0..n).map(|i| if i as u32 == k { Rational::one() } else { Rational::zero() }).collect()
}

/// Support of a grid net projected onto `(E_t, M_t)` pairs.
fn projected(net: &BayesNet, env_row: u32, mem_row: u32) -> Result<HashMap<Vec<u32>, Rational>> {
    let times = net.times();
    let cols: Vec<usize> = times
        .iter()
        .flat_map(|&t| [NodeId::grid(env_row, t), NodeId::grid(mem_row, t)])
        .map(|id| net.index_of(&id))
        .collect::<Result<_>>()?;
    let support = net.support()?;
    let mut out: HashMap<Vec<u32>, Rational> = HashMap::new();
    for (x, p) in support.states.iter().zip(&support.probs) {
        *out.entry(cols.iter().map(|&c| x[c]).collect()).or_insert_with(Rational::zero) += p;
    }
    Ok(out)
}

/// Builds sensor and action processes from `ε_t` and `μ_t` and checks marginal invariance.
pub fn extend_pa_loop(pa: &PaLoop) -> Result<ExtendedLoop> {
    let original = pa.to_net()?;
    let (ne, nm) = (pa.ne(), pa.nm());
    let sensor: Vec<_> = (0..pa.times).map(|t| pa.sensor_partition(t)).collect();
    let action: Vec<_> = (0..pa.times).map(|t| pa.action_partition(t)).collect();
    let mut specs = pa.initial_specs(4);
    for t in 0..pa.times {
        let (ns, na) = (sensor[t as usize].len(), action[t as usize].len());
        specs.push(NodeSpec {
            id: NodeId::grid(2, t),
            states: StateSpace::range(ns),
            mechanism: Mechanism::new(
                vec![NodeId::grid(1, t)],
                (0..ne as u32).map(|e| delta(ns, block_index(&sensor[t as usize], e))).collect(),
            ),
        });
        specs.push(NodeSpec {
            id: NodeId::grid(3, t),
            states: StateSpace::range(na),
            mechanism: Mechanism::new(
                vec![NodeId::grid(4, t)],
                (0..nm as u32).map(|m| delta(na, block_index(&action[t as usize], m))).collect(),
            ),
        });
        if t + 1 == pa.times {
            continue;
        }
        let ek = &pa.env_kernel[t as usize];
        let mk = &pa.mem_kernel[t as usize];
        let action_reps: Vec<usize> = action[t as usize].blocks().iter().map(|b| b[0] as usize).collect();
        let sensor_reps: Vec<usize> = sensor[t as usize].blocks().iter().map(|b| b[0] as usize).collect();
        let env_rows = (0..ne).flat_map(|e| action_reps.iter().map(move |&m| ek[e * nm + m].clone())).collect();
        let mem_rows = (0..nm).flat_map(|m| sensor_reps.iter().map(move |&e| mk[e * nm + m].clone())).collect();
        specs.push(NodeSpec {
            id: NodeId::grid(1, t + 1),
            states: pa.environment.clone(),
            mechanism: Mechanism::new(vec![NodeId::grid(1, t), NodeId::grid(3, t)], env_rows),
        });
        specs.push(NodeSpec {
            id: NodeId::grid(4, t + 1),
            states: pa.memory.clone(),
            mechanism: Mechanism::new(vec![NodeId::grid(4, t), NodeId::grid(2, t)], mem_rows),
        });
    }
    let net = BayesNet::new("pa-loop-extended", specs)?;
    // Sensor and action nodes are deterministic, so the support is no larger than the original's.
    let size = net.state_space_size();
    let net = net.with_state_cap(size.max(original.state_cap()));
    let marginal_invariant = projected(&net, 1, 4)? == projected(&original, 1, 2)?;
    Ok(ExtendedLoop { net, sensor, action, marginal_invariant })
}

/// `H(M_{t+1} | E_t)` together with the existence of entity actions at `t` in `𝔈^PA`.
#[derive(Clone, Debug, Serialize)]
pub struct NonHeteronomy {
    pub t: u32,
    pub entropy_bits: f64,
    /// Exact test of `H > 0`: some possible `e_t` admits two possible `m_{t+1}`.
    pub entropy_positive: bool,
    pub actions_exist: bool,
}

impl NonHeteronomy {
    pub fn consistent(&self) -> bool {
        self.entropy_positive == self.actions_exist
    }
}

pub fn non_heteronomy(pa: &PaLoop, t: u32) -> Result<NonHeteronomy> {
    if t + 1 >= pa.times {
        return Err(Error::InvalidArgument(format!("no transition after t={t}")));
    }
    let net = pa.to_net()?;
    let (ie, im1) = (net.index_of(&NodeId::grid(1, t))?, net.index_of(&NodeId::grid(2, t + 1))?);
    let support = net.support()?;
    let mut joint: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (x, p) in support.states.iter().zip(&support.probs) {
        *joint.entry((x[ie], x[im1])).or_insert_with(Rational::zero) += p;
    }
    let mut pe: BTreeMap<u32, Rational> = BTreeMap::new();
    for ((e, _), p) in &joint {
        *pe.entry(*e).or_insert_with(Rational::zero) += p;
    }
    let mut entropy_bits = 0.0;
    for ((e, _), p) in &joint {
        let cond = p / &pe[e];
        if !cond.is_one() {
            entropy_bits -= num::ToPrimitive::to_f64(p).unwrap_or(0.0) * log2(&cond);
        }
    }
    let entropy_positive = pe.keys().any(|e| joint.keys().filter(|(e2, _)| e2 == e).count() >= 2);

    let entities = EntitySet::pa_loop(&net, 2)?;
    let index = EntityIndex::new(&net, &entities)?;
    let mut actions_exist = false;
    for x in &support.states {
        let trajectory = net.trajectory_pattern(x);
        let keep: Vec<NodeId> = trajectory.domain().into_iter().filter(|n| n.space() == Some(2)).collect();
        if index.has_co_action(&trajectory.restrict(&keep), &trajectory, t)? {
            actions_exist = true;
            break;
        }
    }
    Ok(NonHeteronomy { t, entropy_bits, entropy_positive, actions_exist })
}

/// Agreement of entity perceptions in `𝔈^PA` with the per-`m_t` sensor partitions.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PerceptionEquivalence {
    /// `(t, memory past)` anchors compared.
    pub anchors_checked: usize,
    pub mismatches: Vec<String>,
}

impl PerceptionEquivalence {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// For every `t` with a successor and every possible memory past `m_{≤t}`, compares the
/// perception partition of a memory entity with that past against the sensor partition
/// for its `m_t`, restricted to the environments that co-occur with the past.
pub fn pa_perception_equivalence(pa: &PaLoop) -> Result<PerceptionEquivalence> {
    let net = pa.to_net()?;
    let entities = EntitySet::pa_loop(&net, 2)?;
    let support = net.support()?;
    let mut report = PerceptionEquivalence::default();
    for t in 0..pa.times.saturating_sub(1) {
        let mut anchors: BTreeMap<Pattern, Pattern> = BTreeMap::new();
        for x in &support.states {
            let trajectory = net.trajectory_pattern(x);
            let keep: Vec<NodeId> = trajectory.domain().into_iter().filter(|n| n.space() == Some(2)).collect();
            let entity = trajectory.restrict(&keep);
            anchors.entry(entity.up_to(t)).or_insert(entity);
        }
        for anchor in anchors.values() {
            report.anchors_checked += 1;
            let ctx = CoPerceptionContext::new(&net, &entities, anchor, t)?;
            let perceived = perception_partition(&net, &ctx)?;
            let e_of = |env: &Pattern| env.get(&NodeId::grid(1, t)).expect("environment holds E_t");
            let perceived = perceived.partition.map(e_of)?;
            let m = anchor.get(&NodeId::grid(2, t)).expect("memory entity covers M_t");
            let expected = pa.sensor_partition_given(t, m, perceived.ground())?;
            if perceived != expected {
                report.mismatches.push(format!("t={t}, past {}: perceptions {perceived}, sensor partition {expected}", anchor.up_to(t)));
            }
        }
    }
    Ok(report)
}

fn random_dist<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    if rng.gen_bool(0.25) {
        return delta(n, rng.gen_range(0..n as u32));
    }
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| ratio(x, total)).collect();
        }
    }
}

fn random_kernel<R: Rng>(rng: &mut R, rows: usize, n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for _ in 0..rows {
        // Reusing rows makes coarse sensor and action partitions likely.
        let row = if !out.is_empty() && rng.gen_bool(0.35) {
            out[rng.gen_range(0..out.len())].clone()
        } else {
            random_dist(rng, n)
        };
        out.push(row);
    }
    out
}

/// A random loop with small-denominator kernels, frequent repeated rows and some delta rows.
pub fn random_pa_loop<R: Rng>(rng: &mut R, memory: usize, environment: usize, times: u32) -> PaLoop {
    let (ne, nm) = (environment, memory);
    let initial = if rng.gen_bool(0.5) {
        let (pe, pm) = (random_dist(rng, ne), random_dist(rng, nm));
        pe.iter().map(|a| pm.iter().map(|b| a * b).collect()).collect()
    } else {
        let flat = random_dist(rng, ne * nm);
        flat.chunks(nm).map(|c| c.to_vec()).collect()
    };
    let steps = times.saturating_sub(1) as usize;
    PaLoop {
        environment: StateSpace::range(ne),
        memory: StateSpace::range(nm),
        times,
        initial,
        env_kernel: (0..steps).map(|_| random_kernel(rng, ne * nm, ne)).collect(),
        mem_kernel: (0..steps).map(|_| random_kernel(rng, ne * nm, nm)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary memory, ternary environment; memory goes to 0 with probability `q[e]`.
    fn ternary(q: [Rational; 3]) -> PaLoop {
        let mem_rows = (0..3).flat_map(|e| {
            let r = q[e].clone();
            (0..2).map(move |_| vec![r.clone(), Rational::one() - &r])
        });
        PaLoop {
            environment: StateSpace::range(3),
            memory: StateSpace::range(2),
            times: 2,
            initial: vec![vec![ratio(1, 6); 2]; 3],
            env_kernel: vec![vec![uniform(3); 6]],
            mem_kernel: vec![mem_rows.collect()],
        }
    }

    #[test]
    fn sensor_partitions_follow_kernel_equalities() {
        let q = |a, b, c| [ratio(a, 4), ratio(b, 4), ratio(c, 4)];
        assert_eq!(ternary(q(1, 1, 1)).sensor_partition(0).len(), 1);
        assert_eq!(ternary(q(1, 1, 3)).sensor_partition(0).to_string(), "{0,1}|{2}");
        assert_eq!(ternary(q(1, 2, 3)).sensor_partition(0).len(), 3);
        assert_eq!(ternary(q(1, 2, 3)).action_partition(0).len(), 1);
    }

    #[test]
    fn trivial_sensor_in_extension() {
        let ext = extend_pa_loop(&ternary([ratio(1, 2), ratio(1, 2), ratio(1, 2)])).unwrap();
        assert!(ext.marginal_invariant);
        assert_eq!(ext.net.states(ext.net.index_of(&NodeId::grid(2, 0)).unwrap()).len(), 1);
    }

    #[test]
    fn net_round_trip() {
        let pa = ternary([ratio(1, 4), ratio(1, 4), ratio(3, 4)]);
        let net = pa.to_net().unwrap();
        assert_eq!(PaLoop::from_net(&net, 2).unwrap(), pa);
    }

    #[test]
    fn uniform_memory_has_full_entropy() {
        let pa = ternary([ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        let h = non_heteronomy(&pa, 0).unwrap();
        assert!((h.entropy_bits - 1.0).abs() < 1e-12);
        assert!(h.entropy_positive && h.actions_exist);
    }

    #[test]
    fn environment_driven_memory_has_no_actions() {
        let mut pa = ternary([ratio(1, 1), ratio(0, 1), ratio(1, 1)]);
        pa.times = 2;
        let h = non_heteronomy(&pa, 0).unwrap();
        assert_eq!(h.entropy_bits, 0.0);
        assert!(!h.entropy_positive && !h.actions_exist);
    }

    #[test]
    fn ternary_perceptions_match_sensor_partition() {
        let pa = ternary([ratio(1, 4), ratio(1, 4), ratio(3, 4)]);
        let eq = pa_perception_equivalence(&pa).unwrap();
        assert_eq!(eq.anchors_checked, 2);
        assert!(eq.holds(), "{:?}", eq.mismatches);
    }

    #[test]
    fn random_loops_perceive_like_sensors() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let pa = random_pa_loop(&mut rng, 2, 3, 3);
            let eq = pa_perception_equivalence(&pa).unwrap();
            assert!(eq.holds(), "{:?}", eq.mismatches);
        }
    }
}
