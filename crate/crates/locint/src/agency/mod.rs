//! Entity sets and the entity-level notions of action and perception.
//!
//! All searches run over the positive-probability support of the net, so a
//! pattern "occurs" in a trajectory exactly when the trajectory is possible
//! and agrees with the pattern on its domain.

mod paloop;

pub use paloop::{
    extend_pa_loop, non_heteronomy, pa_action_partition, pa_perception_equivalence, pa_sensor_partition, random_pa_loop,
    ExtendedLoop, NonHeteronomy, PaLoop, PerceptionEquivalence,
};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::disintegration::entity_set_union;
use crate::error::{Error, Result};
use crate::model::{BayesNet, NodeId, Support};
use crate::partition::SetPartition;
use crate::pattern::{assignments, occurs_in, Pattern};
use crate::rational::{serialize_exact, Rational};

type Resolved = Vec<(usize, u32)>;

fn holds(state: &[u32], r: &[(usize, u32)]) -> bool {
    r.iter().all(|&(i, v)| state[i] == v)
}

fn resolve_all(net: &BayesNet, set: &[Pattern]) -> Result<Vec<Resolved>> {
    set.iter().map(|p| net.resolve(p)).collect()
}

fn has_slices(p: &Pattern, t: u32) -> bool {
    !p.slice(t).is_empty() && !p.slice(t + 1).is_empty()
}

fn require_slices(p: &Pattern, t: u32) -> Result<()> {
    if has_slices(p, t) {
        Ok(())
    } else {
        Err(Error::Agency(format!("pattern {p} needs nonempty time-slices at {t} and {}", t + 1)))
    }
}

/// Where the members of an [`EntitySet`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EntitySource {
    /// `𝔈_ι`: every ι-entity of every possible trajectory.
    Iota,
    Explicit,
    /// `𝔈^PA`: every time-evolution of one row of a perception-action loop.
    PaLoop { memory_row: u32 },
}

/// A set of patterns treated as entities, kept sorted and free of duplicates.
#[derive(Clone, Debug, Serialize)]
pub struct EntitySet {
    source: EntitySource,
    members: Vec<Pattern>,
}

impl EntitySet {
    pub fn iota(net: &BayesNet) -> Result<Self> {
        let members = entity_set_union(net)?.into_iter().map(|e| e.pattern).collect();
        Ok(EntitySet { source: EntitySource::Iota, members })
    }

    pub fn explicit(net: &BayesNet, members: Vec<Pattern>) -> Result<Self> {
        resolve_all(net, &members)?;
        let members: BTreeSet<Pattern> = members.into_iter().collect();
        Ok(EntitySet { source: EntitySource::Explicit, members: members.into_iter().collect() })
    }

    /// Every assignment of the nodes in row `memory_row`, over all times.
    pub fn pa_loop(net: &BayesNet, memory_row: u32) -> Result<Self> {
        let domain: Vec<NodeId> = net.node_ids().into_iter().filter(|n| n.space() == Some(memory_row)).collect();
        if domain.is_empty() {
            return Err(Error::InvalidArgument(format!("net has no nodes in row {memory_row}")));
        }
        Ok(EntitySet { source: EntitySource::PaLoop { memory_row }, members: assignments(net, &domain)? })
    }

    pub fn source(&self) -> &EntitySource {
        &self.source
    }

    pub fn members(&self) -> &[Pattern] {
        &self.members
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.members.binary_search(p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `x_{V_t∖A_t}`: the part of the trajectory's time-slice at `t` not occupied by `x_A`.
pub fn environment_of(x_a: &Pattern, trajectory: &Pattern, t: u32) -> Pattern {
    let slice = trajectory.slice(t);
    let keep: Vec<NodeId> = slice.domain().into_iter().filter(|n| !x_a.contains(n)).collect();
    slice.restrict(&keep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    /// Same occupied nodes at `t+1`, different values.
    Value,
    /// Different occupied nodes at `t+1`.
    Extent,
}

/// An actor `x_A` in `x_V` and a co-actor `y_B` in `y_V` at time `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoActionPair {
    pub actor: Pattern,
    pub trajectory: Pattern,
    pub coactor: Pattern,
    pub co_trajectory: Pattern,
    pub t: u32,
    pub kind: ActionKind,
    /// `x_{A_t} = y_{B_t}`: with equal environments the two entities are indistinguishable at `t`.
    pub identical_at_t: bool,
    /// The co-actor also occurs in the actor's trajectory.
    pub coactor_in_trajectory: bool,
}

/// An entity set with, for every member, the support rows it occurs in.
pub struct EntityIndex<'a> {
    net: &'a BayesNet,
    entities: &'a EntitySet,
    support: Arc<Support>,
    occurrences: Vec<Vec<usize>>,
}

impl<'a> EntityIndex<'a> {
    pub fn new(net: &'a BayesNet, entities: &'a EntitySet) -> Result<Self> {
        let support = net.support()?;
        let resolved = resolve_all(net, entities.members())?;
        let occurrences = resolved
            .par_iter()
            .map(|r| (0..support.states.len()).filter(|&s| holds(&support.states[s], r)).collect())
            .collect();
        Ok(EntityIndex { net, entities, support, occurrences })
    }

    pub fn entities(&self) -> &EntitySet {
        self.entities
    }

    /// Possible trajectories in which `member` occurs.
    pub fn trajectories_of(&self, member: &Pattern) -> Vec<Pattern> {
        match self.entities.members().binary_search(member) {
            Ok(k) => self.occurrences[k]
                .iter()
                .map(|&s| self.net.trajectory_pattern(&self.support.states[s]))
                .collect(),
            Err(_) => Vec::new(),
        }
    }

    pub fn co_actions(&self, x_a: &Pattern, trajectory: &Pattern, t: u32) -> Result<Vec<CoActionPair>> {
        self.scan(x_a, trajectory, t, false)
    }

    /// True iff [`EntityIndex::co_actions`] would return a nonempty list.
    pub fn has_co_action(&self, x_a: &Pattern, trajectory: &Pattern, t: u32) -> Result<bool> {
        Ok(!self.scan(x_a, trajectory, t, true)?.is_empty())
    }

    fn scan(&self, x_a: &Pattern, trajectory: &Pattern, t: u32, first_only: bool) -> Result<Vec<CoActionPair>> {
        if !self.entities.contains(x_a) {
            return Err(Error::Agency(format!("{x_a} is not in the entity set")));
        }
        require_slices(x_a, t)?;
        let x = self.net.trajectory_states(trajectory)?;
        if !occurs_in(x_a, trajectory) {
            return Err(Error::Agency(format!("{x_a} does not occur in {trajectory}")));
        }
        if self.net.joint_probability(trajectory)?.is_zero() {
            return Err(Error::Agency(format!("trajectory {trajectory} is impossible")));
        }
        let net = self.net;
        let a_t = x_a.slice(t).domain();
        let env: Vec<usize> =
            (0..net.len()).filter(|&i| net.id(i).time() == Some(t) && !x_a.contains(net.id(i))).collect();
        let next = x_a.slice(t + 1);
        let mut out = Vec::new();
        for (k, y_b) in self.entities.members().iter().enumerate() {
            if y_b.slice(t).domain() != a_t {
                continue;
            }
            let y_next = y_b.slice(t + 1);
            if y_next.is_empty() || y_next == next {
                continue;
            }
            let kind = if y_next.domain() == next.domain() { ActionKind::Value } else { ActionKind::Extent };
            for &s in &self.occurrences[k] {
                let y = &self.support.states[s];
                if *y == x || env.iter().any(|&i| y[i] != x[i]) {
                    continue;
                }
                out.push(CoActionPair {
                    actor: x_a.clone(),
                    trajectory: trajectory.clone(),
                    coactor: y_b.clone(),
                    co_trajectory: net.trajectory_pattern(y),
                    t,
                    kind,
                    identical_at_t: y_b.slice(t) == x_a.slice(t),
                    coactor_in_trajectory: occurs_in(y_b, trajectory),
                });
                if first_only {
                    return Ok(out);
                }
            }
        }
        out.sort_by(|a, b| (&a.co_trajectory, &a.coactor).cmp(&(&b.co_trajectory, &b.coactor)));
        Ok(out)
    }
}

/// All co-action entities of `x_A` in `trajectory` at `t`, each labelled value or extent.
pub fn find_co_actions(
    net: &BayesNet,
    entities: &EntitySet,
    x_a: &Pattern,
    trajectory: &Pattern,
    t: u32,
) -> Result<Vec<CoActionPair>> {
    EntityIndex::new(net, entities)?.co_actions(x_a, trajectory, t)
}

/// `𝔖(x_A,t)`: members with nonempty slices at `t`, `t+1` and the same past `≼t` as `x_A`.
pub fn co_perception_entities(entities: &EntitySet, x_a: &Pattern, t: u32) -> Result<Vec<Pattern>> {
    require_slices(x_a, t)?;
    let past = x_a.up_to(t);
    Ok(entities.members().iter().filter(|y| has_slices(y, t) && y.up_to(t) == past).cloned().collect())
}

/// Exhaustiveness, mutual exclusion and non-interpenetration of a set of patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SetPredicates {
    pub exhaustive: bool,
    pub mutually_exclusive: bool,
    pub non_interpenetrating: bool,
}

fn dedup(set: &[Pattern]) -> Vec<Pattern> {
    set.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Distinct pairs `(i, j)`, `i < j`, that occur together in some possible trajectory
/// satisfying `given`.
fn co_occurring(net: &BayesNet, set: &[Pattern], given: &[(usize, u32)]) -> Result<BTreeSet<(usize, usize)>> {
    let resolved = resolve_all(net, set)?;
    let support = net.support()?;
    let mut pairs = BTreeSet::new();
    for state in support.states.iter().filter(|s| holds(s, given)) {
        let present: Vec<usize> = (0..set.len()).filter(|&k| holds(state, &resolved[k])).collect();
        for (a, &i) in present.iter().enumerate() {
            for &j in &present[a + 1..] {
                pairs.insert((i, j));
            }
        }
    }
    Ok(pairs)
}

/// `Pr(⋃ 𝔠) = 1`.
pub fn is_exhaustive(net: &BayesNet, set: &[Pattern]) -> Result<bool> {
    let resolved = resolve_all(net, set)?;
    let support = net.support()?;
    Ok(support.states.iter().all(|s| resolved.iter().any(|r| holds(s, r))))
}

/// The first pair of distinct members with positive joint probability, if any.
pub fn overlapping_pair(net: &BayesNet, set: &[Pattern]) -> Result<Option<(Pattern, Pattern)>> {
    let set = dedup(set);
    let pairs = co_occurring(net, &set, &[])?;
    Ok(pairs.into_iter().next().map(|(i, j)| (set[i].clone(), set[j].clone())))
}

/// The first pair violating non-interpenetration: equal pasts `≼t` (possibly empty),
/// different futures, and positive joint probability.
pub fn interpenetrating_pair(net: &BayesNet, set: &[Pattern]) -> Result<Option<(Pattern, Pattern)>> {
    let set = dedup(set);
    let times = net.times();
    let pairs = co_occurring(net, &set, &[])?;
    Ok(pairs
        .into_iter()
        .find(|&(i, j)| {
            let (y, z) = (&set[i], &set[j]);
            times.iter().any(|&t| y.up_to(t) == z.up_to(t) && y.after(t) != z.after(t))
        })
        .map(|(i, j)| (set[i].clone(), set[j].clone())))
}

pub fn set_predicates(net: &BayesNet, set: &[Pattern]) -> Result<SetPredicates> {
    Ok(SetPredicates {
        exhaustive: is_exhaustive(net, set)?,
        mutually_exclusive: overlapping_pair(net, set)?.is_none(),
        non_interpenetrating: interpenetrating_pair(net, set)?.is_none(),
    })
}

/// `p(k) = p(x^k | c) / Σ_l p(x^l | c)` for a set that is mutually exclusive given `c`.
/// Entries are aligned with `set`.
pub fn dist_over_mutually_exclusive(net: &BayesNet, set: &[Pattern], conditioning: &Pattern) -> Result<Vec<Rational>> {
    let given = net.resolve(conditioning)?;
    if let Some(&(i, j)) = co_occurring(net, set, &given)?.iter().next() {
        return Err(Error::NotMutuallyExclusive(set[i].to_string(), set[j].to_string()));
    }
    let resolved = resolve_all(net, set)?;
    let support = net.support()?;
    let mut weights = vec![Rational::zero(); set.len()];
    for (state, p) in support.states.iter().zip(&support.probs) {
        if !holds(state, &given) {
            continue;
        }
        for (w, r) in weights.iter_mut().zip(&resolved) {
            if holds(state, r) {
                *w += p;
            }
        }
    }
    let total: Rational = weights.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroConditioning);
    }
    Ok(weights.into_iter().map(|w| w / &total).collect())
}

/// True iff the futures `t≺` of the set all share one domain `C` and together form `𝒳_C`.
pub fn futures_exhaust_variables(net: &BayesNet, set: &[Pattern], t: u32) -> Result<bool> {
    let futures: BTreeSet<Pattern> = set.iter().map(|y| y.after(t)).collect();
    let Some(first) = futures.iter().next() else {
        return Ok(false);
    };
    let domain = first.domain();
    if futures.iter().any(|f| f.domain() != domain) {
        return Ok(false);
    }
    let size = domain.iter().try_fold(1u128, |acc, n| Ok::<_, Error>(acc * net.states(net.index_of(n)?).len() as u128))?;
    Ok(futures.len() as u128 == size)
}

/// Everything needed to extract the perceptions of `x_A` at `t`.
#[derive(Clone, Debug, Serialize)]
pub struct CoPerceptionContext {
    pub anchor: Pattern,
    pub t: u32,
    /// Number of future slices `t+1..=t+steps` that define a branch.
    pub steps: u32,
    /// `𝔖(x_A,t)`.
    pub entities: Vec<Pattern>,
    /// `V_t∖A_t`.
    pub environment_nodes: Vec<NodeId>,
    /// Predicates of `𝔖(x_A,t)`.
    pub predicates: SetPredicates,
    /// A mutually exclusive proxy `ζ ⊆ 𝔖` containing the anchor.
    pub zeta: Option<Vec<Pattern>>,
    #[serde(skip)]
    overlap: Option<(Pattern, Pattern)>,
}

impl CoPerceptionContext {
    pub fn new(net: &BayesNet, entities: &EntitySet, anchor: &Pattern, t: u32) -> Result<Self> {
        if !entities.contains(anchor) {
            return Err(Error::Agency(format!("{anchor} is not in the entity set")));
        }
        let members = co_perception_entities(entities, anchor, t)?;
        let environment_nodes = net.slice_ids(t).into_iter().filter(|n| !anchor.contains(n)).collect();
        let overlap = overlapping_pair(net, &members)?;
        let predicates = SetPredicates {
            exhaustive: is_exhaustive(net, &members)?,
            mutually_exclusive: overlap.is_none(),
            non_interpenetrating: interpenetrating_pair(net, &members)?.is_none(),
        };
        Ok(CoPerceptionContext {
            anchor: anchor.clone(),
            t,
            steps: 1,
            entities: members,
            environment_nodes,
            predicates,
            zeta: None,
            overlap,
        })
    }

    /// Branches by the slices `t+1..=t+r` instead of `t+1` alone.
    pub fn with_steps(mut self, net: &BayesNet, r: u32) -> Result<Self> {
        let last = net.times().last().copied().unwrap_or(0);
        if r == 0 || self.t + r > last {
            return Err(Error::InvalidArgument(format!("branching over {r} steps after t={} exceeds the net", self.t)));
        }
        self.steps = r;
        Ok(self)
    }

    /// Restricts branching to a mutually exclusive subset `ζ ∋ x_A` of `𝔖(x_A,t)`.
    pub fn with_zeta(mut self, net: &BayesNet, zeta: Vec<Pattern>) -> Result<Self> {
        let zeta = dedup(&zeta);
        if !zeta.contains(&self.anchor) {
            return Err(Error::Agency(format!("proxy set must contain the anchor {}", self.anchor)));
        }
        if let Some(z) = zeta.iter().find(|z| !self.entities.contains(z)) {
            return Err(Error::Agency(format!("{z} is not a co-perception entity of {} at {}", self.anchor, self.t)));
        }
        if let Some((a, b)) = overlapping_pair(net, &zeta)? {
            return Err(Error::NotMutuallyExclusive(a.to_string(), b.to_string()));
        }
        self.zeta = Some(zeta);
        Ok(self)
    }

    /// The set branching and morphs range over: `ζ` if set, else `𝔖`.
    pub fn active(&self) -> &[Pattern] {
        self.zeta.as_deref().unwrap_or(&self.entities)
    }

    /// True when no member of `𝔖(x_A,t)` differs from the anchor in its next slices,
    /// so `η` has a single branch and nothing can be perceived.
    pub fn is_trivial(&self) -> bool {
        let key = self.branch_key(&self.anchor);
        self.entities.iter().all(|y| self.branch_key(y) == key)
    }

    fn require_exclusive(&self) -> Result<()> {
        match (&self.zeta, &self.overlap) {
            (None, Some((a, b))) => Err(Error::NotMutuallyExclusive(a.to_string(), b.to_string())),
            _ => Ok(()),
        }
    }

    fn branch_key(&self, y: &Pattern) -> Pattern {
        y.interval(self.t + 1, self.t + self.steps)
    }
}

/// Environments on `V_t∖A_t` that co-occur with some member of the active set.
/// When the members' futures form `𝒳_C` it suffices that they co-occur with the shared past.
pub fn co_perception_environments(net: &BayesNet, ctx: &CoPerceptionContext) -> Result<Vec<Pattern>> {
    let set = ctx.active();
    let support = net.support()?;
    let candidates = assignments(net, &ctx.environment_nodes)?;
    let fast = futures_exhaust_variables(net, set, ctx.t)?;
    let required: Vec<Resolved> =
        if fast { vec![net.resolve(&ctx.anchor.up_to(ctx.t))?] } else { resolve_all(net, set)? };
    let mut out = Vec::new();
    for env in candidates {
        let e = net.resolve(&env)?;
        let found = support.states.iter().any(|s| holds(s, &e) && required.iter().any(|r| holds(s, r)));
        if found {
            out.push(env);
        }
    }
    Ok(out)
}

/// `η(x_A,t)` over the active set: members grouped by equal next slice (or slices).
pub fn branching_partition(ctx: &CoPerceptionContext) -> Result<SetPartition<Pattern>> {
    let set = ctx.active();
    let mut keys: BTreeMap<Pattern, u32> = BTreeMap::new();
    let labels: Vec<u32> = set
        .iter()
        .map(|y| {
            let next = keys.len() as u32;
            *keys.entry(ctx.branch_key(y)).or_insert(next)
        })
        .collect();
    SetPartition::from_labels(set, &labels)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// The shared slices after `t` that define the branch.
    pub next: Pattern,
    pub members: Vec<Pattern>,
    #[serde(serialize_with = "serialize_exact")]
    pub probability: Rational,
}

/// `p(b | x̂, x_{A≼t})` over the branches of `η`, in branch order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchMorph {
    pub environment: Pattern,
    pub branches: Vec<Branch>,
}

impl BranchMorph {
    pub fn probabilities(&self) -> Vec<&Rational> {
        self.branches.iter().map(|b| &b.probability).collect()
    }

    /// Probability of the branch containing `member`.
    pub fn probability_of(&self, member: &Pattern) -> Option<&Rational> {
        self.branches.iter().find(|b| b.members.contains(member)).map(|b| &b.probability)
    }
}

/// Branch probabilities `Σ_{y∈b} p(y_{t≺} | x̂, x_{A≼t})`, normalised over the branches.
/// Needs a mutually exclusive active set: either `𝔖` itself or a proxy `ζ`.
pub fn branch_morph(net: &BayesNet, ctx: &CoPerceptionContext, environment: &Pattern) -> Result<BranchMorph> {
    ctx.require_exclusive()?;
    if environment.domain() != ctx.environment_nodes {
        return Err(Error::InvalidArgument(format!(
            "environment {environment} does not cover exactly the nodes beside the anchor at t={}",
            ctx.t
        )));
    }
    let eta = branching_partition(ctx)?;
    let blocks = eta.blocks();
    let given = net.resolve(&ctx.anchor.up_to(ctx.t).merge(environment).expect("disjoint domains"))?;
    let resolved: Vec<Vec<Resolved>> =
        blocks.iter().map(|b| resolve_all(net, b)).collect::<Result<_>>()?;
    let support = net.support()?;
    let mut weights = vec![Rational::zero(); blocks.len()];
    for (state, p) in support.states.iter().zip(&support.probs) {
        if !holds(state, &given) {
            continue;
        }
        for (w, members) in weights.iter_mut().zip(&resolved) {
            for r in members {
                if holds(state, r) {
                    *w += p;
                }
            }
        }
    }
    let total: Rational = weights.iter().sum();
    if total.is_zero() {
        return Err(Error::Agency(format!("{environment} is not a co-perception environment")));
    }
    let branches = blocks
        .into_iter()
        .zip(weights)
        .map(|(members, w)| Branch { next: ctx.branch_key(&members[0]), members, probability: w / &total })
        .collect();
    Ok(BranchMorph { environment: environment.clone(), branches })
}

/// The co-perception environments grouped by identical branch-morph; blocks are perceptions.
#[derive(Clone, Debug, Serialize)]
pub struct PerceptionReport {
    pub morphs: Vec<BranchMorph>,
    pub partition: SetPartition<Pattern>,
}

impl PerceptionReport {
    pub fn perceptions(&self) -> Vec<Vec<Pattern>> {
        self.partition.blocks()
    }
}

pub fn perception_partition(net: &BayesNet, ctx: &CoPerceptionContext) -> Result<PerceptionReport> {
    let envs = co_perception_environments(net, ctx)?;
    let morphs: Vec<BranchMorph> = envs.iter().map(|e| branch_morph(net, ctx, e)).collect::<Result<_>>()?;
    let mut keys: BTreeMap<Vec<&Rational>, u32> = BTreeMap::new();
    let labels: Vec<u32> = morphs
        .iter()
        .map(|m| {
            let next = keys.len() as u32;
            *keys.entry(m.probabilities()).or_insert(next)
        })
        .collect();
    let partition = SetPartition::from_labels(&envs, &labels)?;
    Ok(PerceptionReport { morphs, partition })
}
