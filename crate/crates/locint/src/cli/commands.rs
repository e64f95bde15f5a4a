use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Loaded, Output};
use crate::agency::{
    extend_pa_loop, non_heteronomy, pa_perception_equivalence, perception_partition, random_pa_loop, ActionKind,
    CoPerceptionContext, EntityIndex, EntitySet, PaLoop,
};
use crate::disintegration::{
    disintegration_hierarchy_with, iota_entities_with, refinement_free, verify_disintegration_theorem,
    verify_disintegration_theorem_unfiltered, IotaEntity,
};
use crate::error::{Error, Result};
use crate::integration::SliValue;
use crate::model::BayesNet;
use crate::partition::{bell, component_sizes, hasse_dot, hasse_edges, sli_workload, SetPartition, WorkloadMode};
use crate::pattern::{classify_composite, occurs_in, render_grid, traverses_dof, Pattern};
use crate::rational::{fmt_rational, Rational};
use crate::symmetry::{check_markov_symmetry_propagation, check_sli_symmetry, GeneratedGroup};

/// A rational as exact fraction plus float.
#[derive(Clone, Debug, Serialize)]
struct Exact {
    exact: String,
    approx: f64,
}

impl Exact {
    fn new(r: &Rational) -> Self {
        Exact { exact: fmt_rational(r), approx: r.to_f64().unwrap_or(f64::NAN) }
    }
}

impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({:.6})", self.exact, self.approx)
    }
}

fn grid(net: &BayesNet, p: &Pattern) -> Option<String> {
    render_grid(net, p).ok()
}

fn indent(text: &str, by: usize) -> String {
    text.lines().map(|l| format!("{:by$}{l}\n", "")).collect()
}

fn partition_str(net: &BayesNet, p: &SetPartition<Pattern>) -> String {
    p.blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|x| net.format_pattern(x)).collect::<Vec<_>>().join("; ")))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn entity_set(l: &Loaded) -> Result<EntitySet> {
    match l.system.paloop_memory {
        Some(row) => EntitySet::pa_loop(l.net(), row),
        None => EntitySet::iota(l.net()),
    }
}

fn last_time(net: &BayesNet) -> u32 {
    net.times().last().copied().unwrap_or(0)
}

fn has_slices(p: &Pattern, t: u32) -> bool {
    !p.slice(t).is_empty() && !p.slice(t + 1).is_empty()
}

#[derive(Serialize)]
struct LevelReport {
    level: usize,
    sli: SliValue,
    size: usize,
    refinement_free: Vec<String>,
    partitions: Vec<String>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    system: String,
    label: String,
    trajectory: String,
    probability: Exact,
    level_sizes: Vec<usize>,
    levels: Vec<LevelReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    dot: Vec<String>,
}

pub(super) fn analyze(l: &Loaded, traj: Option<&str>, dot: bool, out: &mut Output) -> Result<bool> {
    let net = l.net();
    let mut reports = Vec::new();
    let mut dot_files = Vec::new();
    for (k, x) in l.select(traj)? {
        let h = disintegration_hierarchy_with(net, &x, l.opts)?;
        let rf = refinement_free(&h);
        let mut dots = Vec::new();
        if dot {
            for (i, level) in h.levels.iter().enumerate() {
                let name = format!("{} trajectory {k} level {}", l.label, i + 1);
                dots.push((format!("analyze-{k}-level{}.dot", i + 1), hasse_dot(&name, &level.partitions)?));
            }
        }
        let report = AnalyzeReport {
            system: l.label.clone(),
            label: k.clone(),
            trajectory: net.format_pattern(&x),
            probability: Exact::new(&net.joint_probability(&x)?),
            level_sizes: h.level_sizes(),
            levels: h
                .levels
                .iter()
                .zip(&rf.levels)
                .enumerate()
                .map(|(i, (lv, rfl))| LevelReport {
                    level: i + 1,
                    sli: lv.sli.clone(),
                    size: lv.partitions.len(),
                    refinement_free: rfl.iter().map(ToString::to_string).collect(),
                    partitions: lv.partitions.iter().map(ToString::to_string).collect(),
                })
                .collect(),
            dot: if out.dir.is_none() { dots.iter().map(|(_, d)| d.clone()).collect() } else { Vec::new() },
        };
        let mut text = format!("{} trajectory {k}: {}\np = {}\n", l.label, report.trajectory, report.probability);
        text.push_str(&indent(&grid(net, &x).unwrap_or_default(), 2));
        text.push_str("level   size   refinement-free   sli\n");
        for lv in &report.levels {
            let _ = writeln!(text, "{:>5}  {:>5}   {:>15}   {}", lv.level, lv.size, lv.refinement_free.len(), lv.sli);
        }
        for d in &report.dot {
            text.push_str(d);
        }
        dot_files.extend(dots);
        reports.push((format!("analyze-{k}"), report, text));
    }
    out.emit(&reports)?;
    if out.dir.is_some() {
        for (name, body) in dot_files {
            out.emit_raw(&name, &body)?;
        }
    }
    Ok(true)
}

#[derive(Clone, Serialize)]
struct EntityRow {
    pattern: String,
    nodes: usize,
    iota: SliValue,
    spatial: Option<bool>,
    temporal: Option<bool>,
    traverses_dof: Option<bool>,
    /// Number of possible trajectories that contain the pattern as an ι-entity.
    entity_in: usize,
    /// The pattern is an ι-entity in some possible trajectories but not in others.
    counterfactual: bool,
    grid: Option<String>,
}

#[derive(Serialize)]
struct EntitiesReport {
    system: String,
    label: String,
    trajectory: String,
    entities: Vec<EntityRow>,
}

fn entity_row(net: &BayesNet, e: &IotaEntity, counts: &BTreeMap<Pattern, usize>, possible: usize) -> EntityRow {
    let comp = classify_composite(&e.pattern).ok();
    let entity_in = counts.get(&e.pattern).copied().unwrap_or(0);
    EntityRow {
        pattern: net.format_pattern(&e.pattern),
        nodes: e.pattern.len(),
        iota: e.iota.clone(),
        spatial: comp.map(|c| c.spatial),
        temporal: comp.map(|c| c.temporal),
        traverses_dof: traverses_dof(&e.pattern).ok(),
        entity_in,
        counterfactual: entity_in < possible,
        grid: grid(net, &e.pattern),
    }
}

fn entity_line(r: &EntityRow) -> String {
    let comp = match (r.spatial, r.temporal) {
        (Some(true), Some(true)) => "ST",
        (Some(true), _) => "S",
        (_, Some(true)) => "T",
        (Some(false), Some(false)) => "-",
        _ => "?",
    };
    let flag = |b: Option<bool>| match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "?",
    };
    format!(
        "{:>9.6} bit  {:<16} {:<3} dof={:<3} cf={:<3} in={:<3} {}\n",
        r.iota.bits(),
        fmt_rational(r.iota.ratio()),
        comp,
        flag(r.traverses_dof),
        flag(Some(r.counterfactual)),
        r.entity_in,
        r.pattern
    )
}

pub(super) fn entities(l: &Loaded, traj: Option<&str>, out: &mut Output) -> Result<bool> {
    let net = l.net();
    let support = net.support()?;
    let all: Vec<(Pattern, Vec<IotaEntity>)> = support
        .states
        .par_iter()
        .map(|x| {
            let t = net.trajectory_pattern(x);
            let e = iota_entities_with(net, &t, l.opts)?;
            Ok((t, e))
        })
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<Pattern, usize> = BTreeMap::new();
    let mut union: BTreeMap<Pattern, IotaEntity> = BTreeMap::new();
    for (_, es) in &all {
        for e in es {
            *counts.entry(e.pattern.clone()).or_default() += 1;
            union.entry(e.pattern.clone()).or_insert_with(|| e.clone());
        }
    }
    let possible = all.len();
    let mut reports = Vec::new();
    for (k, x) in l.select(traj)? {
        let es = match all.iter().find(|(t, _)| t == &x) {
            Some((_, es)) => es.clone(),
            None => iota_entities_with(net, &x, l.opts)?,
        };
        let rows: Vec<EntityRow> = es.iter().map(|e| entity_row(net, e, &counts, possible)).collect();
        let mut text = format!("{} trajectory {k}: {} ({} entities)\n", l.label, net.format_pattern(&x), rows.len());
        for r in &rows {
            text.push_str(&entity_line(r));
            text.push_str(&indent(r.grid.as_deref().unwrap_or(""), 4));
        }
        let report = EntitiesReport { system: l.label.clone(), label: k.clone(), trajectory: net.format_pattern(&x), entities: rows };
        reports.push((format!("entities-{k}"), report, text));
    }
    let rows: Vec<EntityRow> = union.values().map(|e| entity_row(net, e, &counts, possible)).collect();
    let mut text = format!(
        "{}: {} distinct ι-entities over {possible} possible trajectories\n",
        l.label,
        rows.len()
    );
    for r in &rows {
        text.push_str(&entity_line(r));
    }
    let report = EntitiesReport { system: l.label.clone(), label: "union".into(), trajectory: String::new(), entities: rows };
    reports.push(("entities-union".to_string(), report, text));
    out.emit(&reports)?;
    Ok(true)
}

#[derive(Serialize)]
struct ActionRow {
    t: u32,
    kind: ActionKind,
    actor: String,
    coactor: String,
    co_trajectory: String,
    identical_at_t: bool,
    coactor_in_trajectory: bool,
    actor_grid: Option<String>,
    coactor_grid: Option<String>,
}

#[derive(Serialize)]
struct ActionsReport {
    system: String,
    label: String,
    trajectory: String,
    value_actions: usize,
    extent_actions: usize,
    pairs: Vec<ActionRow>,
}

pub(super) fn actions(l: &Loaded, traj: Option<&str>, time: Option<u32>, out: &mut Output) -> Result<bool> {
    let net = l.net();
    let entities = entity_set(l)?;
    let index = EntityIndex::new(net, &entities)?;
    let times: Vec<u32> = match time {
        Some(t) if t >= last_time(net) => {
            return Err(Error::Config(format!("--time must be below the last time step {}", last_time(net))))
        }
        Some(t) => vec![t],
        None => (0..last_time(net)).collect(),
    };
    let mut reports = Vec::new();
    for (k, x) in l.select(traj)? {
        let jobs: Vec<(u32, &Pattern)> = times
            .iter()
            .flat_map(|&t| entities.members().iter().filter(move |m| has_slices(m, t)).map(move |m| (t, m)))
            .filter(|(_, m)| occurs_in(m, &x))
            .collect();
        let found: Vec<Vec<_>> =
            jobs.par_iter().map(|&(t, m)| index.co_actions(m, &x, t)).collect::<Result<_>>()?;
        let pairs: Vec<ActionRow> = found
            .into_iter()
            .flatten()
            .map(|c| ActionRow {
                t: c.t,
                kind: c.kind,
                actor: net.format_pattern(&c.actor),
                coactor: net.format_pattern(&c.coactor),
                co_trajectory: net.format_pattern(&c.co_trajectory),
                identical_at_t: c.identical_at_t,
                coactor_in_trajectory: c.coactor_in_trajectory,
                actor_grid: grid(net, &c.actor),
                coactor_grid: grid(net, &c.coactor),
            })
            .collect();
        let value_actions = pairs.iter().filter(|p| p.kind == ActionKind::Value).count();
        let extent_actions = pairs.len() - value_actions;
        let mut text = format!(
            "{} trajectory {k}: {}\n{value_actions} value and {extent_actions} extent co-action pairs\n",
            l.label,
            net.format_pattern(&x)
        );
        for p in &pairs {
            let kind = match p.kind {
                ActionKind::Value => "value",
                ActionKind::Extent => "extent",
            };
            let mut flags = Vec::new();
            if p.identical_at_t {
                flags.push("identical at t");
            }
            if p.coactor_in_trajectory {
                flags.push("co-actor also occurs here");
            }
            let _ = writeln!(
                text,
                "t={} {kind:<6} {}  ->  {}  in {}{}",
                p.t,
                p.actor,
                p.coactor,
                p.co_trajectory,
                if flags.is_empty() { String::new() } else { format!("  [{}]", flags.join(", ")) }
            );
        }
        let report = ActionsReport {
            system: l.label.clone(),
            label: k.clone(),
            trajectory: net.format_pattern(&x),
            value_actions,
            extent_actions,
            pairs,
        };
        reports.push((format!("actions-{k}"), report, text));
    }
    out.emit(&reports)?;
    Ok(true)
}

#[derive(Serialize)]
struct BranchRow {
    next: String,
    members: Vec<String>,
}

#[derive(Serialize)]
struct MorphRow {
    environment: String,
    perception: usize,
    probabilities: Vec<Exact>,
}

#[derive(Serialize)]
struct ContextReport {
    anchor: String,
    t: u32,
    steps: u32,
    co_perception_entities: Vec<String>,
    exhaustive: bool,
    mutually_exclusive: bool,
    non_interpenetrating: bool,
    zeta: Option<Vec<String>>,
    branches: Vec<BranchRow>,
    morphs: Vec<MorphRow>,
    perceptions: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct PerceptionsReport {
    system: String,
    notice: Option<String>,
    contexts: Vec<ContextReport>,
}

const NO_CO_PERCEPTION: &str = "no co-perception entities: every co-perception set has a single branch, so nothing is perceived";

fn context_report(net: &BayesNet, ctx: &CoPerceptionContext) -> Result<(ContextReport, String)> {
    let report = perception_partition(net, ctx)?;
    let blocks = report.partition.blocks();
    let perception_of = |env: &Pattern| blocks.iter().position(|b| b.contains(env)).map_or(0, |i| i + 1);
    let branches: Vec<BranchRow> = report
        .morphs
        .first()
        .map(|m| {
            m.branches
                .iter()
                .map(|b| BranchRow {
                    next: net.format_pattern(&b.next),
                    members: b.members.iter().map(|x| net.format_pattern(x)).collect(),
                })
                .collect()
        })
        .unwrap_or_default();
    let morphs: Vec<MorphRow> = report
        .morphs
        .iter()
        .map(|m| MorphRow {
            environment: net.format_pattern(&m.environment),
            perception: perception_of(&m.environment),
            probabilities: m.branches.iter().map(|b| Exact::new(&b.probability)).collect(),
        })
        .collect();
    let fmt_all = |v: &[Pattern]| v.iter().map(|x| net.format_pattern(x)).collect::<Vec<_>>();
    let out = ContextReport {
        anchor: net.format_pattern(&ctx.anchor),
        t: ctx.t,
        steps: ctx.steps,
        co_perception_entities: fmt_all(&ctx.entities),
        exhaustive: ctx.predicates.exhaustive,
        mutually_exclusive: ctx.predicates.mutually_exclusive,
        non_interpenetrating: ctx.predicates.non_interpenetrating,
        zeta: ctx.zeta.as_deref().map(fmt_all),
        branches,
        morphs,
        perceptions: blocks.iter().map(|b| fmt_all(b)).collect(),
    };
    let yn = |b: bool| if b { "yes" } else { "no" };
    let mut text = format!(
        "anchor {} at t={} ({} co-perception entities; exhaustive {}, mutually exclusive {}, non-interpenetrating {})\n",
        out.anchor,
        out.t,
        out.co_perception_entities.len(),
        yn(out.exhaustive),
        yn(out.mutually_exclusive),
        yn(out.non_interpenetrating)
    );
    if let Some(z) = &out.zeta {
        let _ = writeln!(text, "proxy set: {}", z.join("; "));
    }
    for (i, b) in out.branches.iter().enumerate() {
        let _ = writeln!(text, "branch {}: next {}  members {}", i + 1, b.next, b.members.join("; "));
    }
    let width = out.morphs.iter().map(|m| m.environment.len()).max().unwrap_or(0).max(11);
    let _ = write!(text, "{:<width$}", "environment");
    for i in 0..out.branches.len() {
        let _ = write!(text, "  {:<28}", format!("branch {}", i + 1));
    }
    text.push('\n');
    for m in &out.morphs {
        let _ = write!(text, "{:<width$}", m.environment);
        for p in &m.probabilities {
            let _ = write!(text, "  {:<28}", p.to_string());
        }
        text.push('\n');
    }
    let _ = writeln!(text, "perceptions: {}", partition_str(net, &report.partition));
    Ok((out, text))
}

pub(super) fn perceptions(
    l: &Loaded,
    anchor: Option<&str>,
    time: Option<u32>,
    zeta: &[String],
    steps: u32,
    out: &mut Output,
) -> Result<bool> {
    let net = l.net();
    let entities = entity_set(l)?;
    let zeta: Vec<Pattern> = zeta
        .iter()
        .flat_map(|s| s.split(';'))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| net.parse_pattern(s))
        .collect::<Result<_>>()?;
    let prepare = |anchor: &Pattern, t: u32| -> Result<CoPerceptionContext> {
        let ctx = CoPerceptionContext::new(net, &entities, anchor, t)?;
        if steps > 1 {
            ctx.with_steps(net, steps)
        } else {
            Ok(ctx)
        }
    };
    let contexts: Vec<CoPerceptionContext> = match (anchor, zeta.first()) {
        (None, None) => {
            let times: Vec<u32> = match time {
                Some(t) => vec![t],
                None => (0..last_time(net)).collect(),
            };
            let mut found = Vec::new();
            for t in times {
                for m in entities.members().iter().filter(|m| has_slices(m, t)) {
                    let ctx = prepare(m, t)?;
                    if !ctx.is_trivial() {
                        found.push(ctx);
                    }
                }
            }
            found
        }
        (a, first) => {
            let anchor = match a {
                Some(s) => net.parse_pattern(s)?,
                None => first.expect("zeta is nonempty").clone(),
            };
            let mut ctx = prepare(&anchor, time.unwrap_or(0))?;
            if !zeta.is_empty() {
                ctx = ctx.with_zeta(net, zeta.clone())?;
            }
            if ctx.is_trivial() {
                Vec::new()
            } else {
                vec![ctx]
            }
        }
    };
    let mut report = PerceptionsReport { system: l.label.clone(), notice: None, contexts: Vec::new() };
    let mut text = String::new();
    if contexts.is_empty() {
        report.notice = Some(NO_CO_PERCEPTION.to_string());
        let _ = writeln!(text, "{}: {NO_CO_PERCEPTION}", l.label);
    }
    for ctx in &contexts {
        let (r, t) = context_report(net, ctx)?;
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&t);
        report.contexts.push(r);
    }
    out.emit(&[("perceptions".to_string(), report, text)])?;
    Ok(true)
}

#[derive(Serialize)]
struct HasseReport {
    label: String,
    level: usize,
    sli: SliValue,
    size: usize,
    components: Vec<usize>,
    edges: Vec<(usize, usize)>,
    partitions: Vec<String>,
    dot: String,
}

pub(super) fn hasse(l: &Loaded, traj: Option<&str>, level: Option<usize>, rf: bool, out: &mut Output) -> Result<bool> {
    let net = l.net();
    let (k, x) = l.select(traj)?.into_iter().next().ok_or_else(|| Error::Agency("system has no possible trajectory".into()))?;
    let h = disintegration_hierarchy_with(net, &x, l.opts)?;
    let levels: Vec<Vec<SetPartition<_>>> =
        if rf { refinement_free(&h).levels } else { h.levels.iter().map(|lv| lv.partitions.clone()).collect() };
    let chosen: Vec<usize> = match level {
        Some(i) if i > levels.len() => {
            return Err(Error::Config(format!("--level must lie in 1..={}", levels.len())));
        }
        Some(i) => vec![i],
        None => (1..=levels.len()).collect(),
    };
    let tag = if rf { "refinement-free level" } else { "level" };
    let mut reports = Vec::new();
    for i in chosen {
        let parts = &levels[i - 1];
        let edges = hasse_edges(parts)?;
        let components = component_sizes(parts.len(), &edges);
        let name = format!("{} trajectory {k} {tag} {i}", l.label);
        let sizes: Vec<String> = components.iter().map(ToString::to_string).collect();
        let dot = format!(
            "// {name}: {} partitions, {} components of sizes {}\n{}",
            parts.len(),
            components.len(),
            sizes.join(","),
            hasse_dot(&name, parts)?
        );
        let report = HasseReport {
            label: k.clone(),
            level: i,
            sli: h.levels[i - 1].sli.clone(),
            size: parts.len(),
            components,
            edges,
            partitions: parts.iter().map(ToString::to_string).collect(),
            dot: dot.clone(),
        };
        reports.push((format!("hasse-{k}-level{i}"), report, dot));
    }
    if out.json {
        out.emit(&reports)?;
    } else {
        for (name, _, dot) in &reports {
            out.emit_raw(&format!("{name}.dot"), dot)?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct Check {
    check: String,
    target: String,
    passed: bool,
    detail: String,
    counterexamples: Vec<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    system: String,
    passed: bool,
    checks: Vec<Check>,
}

fn pa_checks(pa: &PaLoop, target: &str) -> Result<Vec<Check>> {
    let ext = extend_pa_loop(pa)?;
    let eq = pa_perception_equivalence(pa)?;
    let mut nh_bad = Vec::new();
    let mut nh_detail = Vec::new();
    for t in 0..pa.times.saturating_sub(1) {
        let nh = non_heteronomy(pa, t)?;
        nh_detail.push(format!("t={t}: H={:.6} bit, actions {}", nh.entropy_bits, if nh.actions_exist { "yes" } else { "no" }));
        if !nh.consistent() {
            nh_bad.push(format!("t={t}: entropy positive {} but actions exist {}", nh.entropy_positive, nh.actions_exist));
        }
    }
    Ok(vec![
        Check {
            check: "pa-extension".into(),
            target: target.into(),
            passed: ext.marginal_invariant,
            detail: "marginal of (E, M) unchanged by sensor and action nodes".into(),
            counterexamples: if ext.marginal_invariant { vec![] } else { vec!["extended loop changes p(E, M)".into()] },
        },
        Check {
            check: "pa-perception".into(),
            target: target.into(),
            passed: eq.holds(),
            detail: format!("{} anchors", eq.anchors_checked),
            counterexamples: eq.mismatches,
        },
        Check {
            check: "pa-non-heteronomy".into(),
            target: target.into(),
            passed: nh_bad.is_empty(),
            detail: nh_detail.join("; "),
            counterexamples: nh_bad,
        },
    ])
}

pub(super) fn verify(
    l: &Loaded,
    group: Option<&str>,
    pa_loops: usize,
    seed: u64,
    inject_fault: bool,
    out: &mut Output,
) -> Result<bool> {
    let net = l.net();
    let support = net.support()?;
    let trajectories: Vec<Pattern> = support.states.iter().map(|x| net.trajectory_pattern(x)).collect();
    let mut checks = Vec::new();

    let dis: Vec<Check> = trajectories
        .par_iter()
        .map(|x| {
            let r = if inject_fault {
                verify_disintegration_theorem_unfiltered(net, x)?
            } else {
                verify_disintegration_theorem(net, x)?
            };
            Ok(Check {
                check: "disintegration".into(),
                target: net.format_pattern(x),
                passed: r.passed(),
                detail: format!("{} blocks, {} sub-patterns, {} entities", r.blocks_checked, r.patterns_scanned, r.entities_found),
                counterexamples: r.counterexamples,
            })
        })
        .collect::<Result<_>>()?;
    checks.extend(dis);

    let groups: Vec<(String, GeneratedGroup)> = match group {
        Some(name) => vec![(name.to_string(), l.system.group(name)?.clone())],
        None => l.system.groups.clone(),
    };
    for (name, g) in &groups {
        let sym: Vec<Check> = trajectories
            .par_iter()
            .map(|x| {
                let r = check_sli_symmetry(net, g, x)?;
                let cases: Vec<String> = r.cases.iter().map(|(c, n)| format!("{c}={n}")).collect();
                Ok(Check {
                    check: format!("symmetry[{name}]"),
                    target: net.format_pattern(x),
                    passed: r.passed(),
                    detail: format!("{} elements, {} pairs, {}", r.group_size, r.pairs_checked, cases.join(" ")),
                    counterexamples: r.violations,
                })
            })
            .collect::<Result<_>>()?;
        checks.extend(sym);
        if let Some(spec) = &l.system.markov {
            let spatial: Vec<_> = g
                .generators
                .iter()
                .filter(|s| check_markov_symmetry_propagation(spec, &GeneratedGroup::new(vec![(*s).clone()])).is_ok())
                .cloned()
                .collect();
            if !spatial.is_empty() {
                let r = check_markov_symmetry_propagation(spec, &GeneratedGroup::new(spatial))?;
                let yn = |b: bool| if b { "yes" } else { "no" };
                let applies = r.kernel_invariant && r.initial_invariant;
                checks.push(Check {
                    check: format!("spatial-symmetry[{name}]"),
                    target: spec.name.clone(),
                    passed: !applies || r.joint_invariant == Some(true),
                    detail: format!(
                        "kernel invariant {}, initial invariant {}, joint invariant {}",
                        yn(r.kernel_invariant),
                        yn(r.initial_invariant),
                        r.joint_invariant.map_or("not checked", yn)
                    ),
                    counterexamples: if !applies || r.joint_invariant == Some(true) {
                        vec![]
                    } else {
                        vec!["kernel and initial distribution invariant but joint is not".into()]
                    },
                });
            }
        }
    }

    if let Some(row) = l.system.paloop_memory {
        checks.extend(pa_checks(&PaLoop::from_net(net, row)?, &l.label)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus: Vec<(String, PaLoop)> = (0..pa_loops)
        .map(|i| {
            let (m, e, t) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(2..=4));
            (format!("random loop {} (|M|={m}, |E|={e}, T={t})", i + 1), random_pa_loop(&mut rng, m, e, t))
        })
        .collect();
    let pa: Vec<Vec<Check>> = corpus.par_iter().map(|(name, pa)| pa_checks(pa, name)).collect::<Result<_>>()?;
    checks.extend(pa.into_iter().flatten());

    let passed = checks.iter().all(|c| c.passed);
    let mut text = format!("verify {}\n", l.label);
    for c in &checks {
        let _ = writeln!(text, "{} {:<24} {}  ({})", if c.passed { "PASS" } else { "FAIL" }, c.check, c.target, c.detail);
        for ce in c.counterexamples.iter().take(20) {
            let _ = writeln!(text, "    counterexample: {ce}");
        }
        if c.counterexamples.len() > 20 {
            let _ = writeln!(text, "    ... {} more", c.counterexamples.len() - 20);
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(text, "summary: {} checks, {} passed, {failed} failed", checks.len(), checks.len() - failed);
    let report = VerifyReport { system: l.label.clone(), passed, checks };
    out.emit(&[("verify".to_string(), report, text)])?;
    Ok(passed)
}

#[derive(Serialize)]
struct WorkloadReport {
    system: String,
    nodes: usize,
    trajectories: String,
    possible_trajectories: Option<usize>,
    partitions_of_v: String,
    disintegration_evaluations: String,
    exhaustive_evaluations: String,
}

pub(super) fn workload(l: &Loaded, out: &mut Output) -> Result<bool> {
    let net = l.net();
    let report = WorkloadReport {
        system: l.label.clone(),
        nodes: net.len(),
        trajectories: net.state_space_size().to_string(),
        possible_trajectories: net.support().ok().map(|s| s.states.len()),
        partitions_of_v: bell(net.len()).to_string(),
        disintegration_evaluations: sli_workload(net, WorkloadMode::Disintegration).to_string(),
        exhaustive_evaluations: sli_workload(net, WorkloadMode::Exhaustive).to_string(),
    };
    let text = format!(
        "{}\nnodes                         {}\ntrajectories                  {}\npossible trajectories         {}\npartitions of V               {}\nSLI values, all trajectories  {}\nSLI values, all patterns      {}\n",
        report.system,
        report.nodes,
        report.trajectories,
        report.possible_trajectories.map_or("over the state cap".to_string(), |n| n.to_string()),
        report.partitions_of_v,
        report.disintegration_evaluations,
        report.exhaustive_evaluations
    );
    out.emit(&[("workload".to_string(), report, text)])?;
    Ok(true)
}
