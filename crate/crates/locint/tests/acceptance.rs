//! One pass/fail line per acceptance criterion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use locint::agency::{
    branch_morph, extend_pa_loop, interpenetrating_pair, non_heteronomy, pa_perception_equivalence,
    perception_partition, random_pa_loop, CoPerceptionContext, EntityIndex, EntitySet,
};
use locint::builtin::{default_eps, flip, mc_const, mc_const_group, mc_eps, mc_eps_representatives};
use locint::disintegration::{disintegration_hierarchy, iota_entities, verify_disintegration_theorem};
use locint::integration::{max_sli_fixture, negative_sli_fixture, sli};
use locint::partition::{enumerate_partitions, hasse_edges};
use locint::pattern::assignments;
use locint::rational::{fmt_rational, pow, ratio};
use locint::symmetry::{
    act_on_distribution, act_on_partition, act_on_pattern, check_sli_symmetry, pull_back, GeneratedGroup, Permutation,
};
use locint::{BayesNet, NodeId, Pattern, Rational, SetPartition};
use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid(cells: &[(u32, u32, u32)]) -> Pattern {
    Pattern::grid(cells.iter().copied())
}

fn all_partitions(domain: &[NodeId]) -> Vec<SetPartition<NodeId>> {
    enumerate_partitions(domain, 16).unwrap().collect()
}

fn criterion_1() -> Outcome {
    let ids: Vec<NodeId> = (1..=2).flat_map(|j| (0..3).map(move |t| NodeId::grid(j, t))).collect();
    let parts = all_partitions(&ids);
    let mut profile = [0usize; 6];
    for p in &parts {
        profile[p.len() - 1] += 1;
    }
    ensure(parts.len() == 203, format!("{} partitions", parts.len()))?;
    ensure(profile == [1, 31, 90, 65, 15, 1], format!("profile {profile:?}"))?;
    Ok(format!("203 partitions, profile {profile:?}"))
}

fn criterion_2() -> Outcome {
    let net = mc_const();
    let trajectories = net.enumerate_trajectories().unwrap();
    ensure(trajectories.len() == 4, format!("{} possible trajectories", trajectories.len()))?;
    for (t, _) in &trajectories {
        let h = disintegration_hierarchy(&net, t).unwrap();
        let ratios: Vec<Rational> = h.levels.iter().map(|l| l.sli.ratio().clone()).collect();
        let expected: Vec<Rational> = [1, 2, 4, 8, 16].iter().map(|&r| ratio(r, 1)).collect();
        ensure(ratios == expected, format!("{t}: ratios {ratios:?}"))?;
        ensure(h.level_sizes() == [2, 18, 71, 78, 34], format!("{t}: sizes {:?}", h.level_sizes()))?;
    }
    Ok("4 trajectories, ratios 1,2,4,8,16, sizes 2,18,71,78,34".into())
}

fn criterion_3() -> Outcome {
    let net = mc_const();
    let mut expected = BTreeSet::new();
    for j in 1..=2 {
        for ts in [vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]] {
            expected.insert(ts.into_iter().map(|t| NodeId::grid(j, t)).collect::<Vec<_>>());
        }
    }
    for (t, _) in net.enumerate_trajectories().unwrap() {
        let e = iota_entities(&net, &t).unwrap();
        ensure(e.len() == 8, format!("{t}: {} entities", e.len()))?;
        ensure(e.iter().all(|x| x.iota.ratio() == &ratio(2, 1)), format!("{t}: iota not 1 bit"))?;
        let domains: BTreeSet<Vec<NodeId>> = e.iter().map(|x| x.pattern.domain()).collect();
        ensure(domains == expected, format!("{t}: domains differ"))?;
    }
    Ok("8 entities per trajectory, all iota = 2/1, row-segment domains".into())
}

fn components(level: &[SetPartition<NodeId>]) -> Vec<BTreeSet<SetPartition<NodeId>>> {
    let mut label: Vec<usize> = (0..level.len()).collect();
    let edges = hasse_edges(level).unwrap();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in &edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
    }
    let mut out: BTreeMap<usize, BTreeSet<SetPartition<NodeId>>> = BTreeMap::new();
    for (i, p) in level.iter().enumerate() {
        out.entry(label[i]).or_default().insert(p.clone());
    }
    out.into_values().collect()
}

/// Sizes of the classes of components that group elements map onto each other.
fn orbit_classes(group: &GeneratedGroup, comps: &[BTreeSet<SetPartition<NodeId>>]) -> Vec<usize> {
    let elements = group.elements().unwrap();
    let mut assigned = vec![false; comps.len()];
    let mut sizes = Vec::new();
    for i in 0..comps.len() {
        if assigned[i] {
            continue;
        }
        let images: BTreeSet<BTreeSet<SetPartition<NodeId>>> = elements
            .iter()
            .map(|g| comps[i].iter().map(|p| act_on_partition(g, p).unwrap()).collect())
            .collect();
        let mut size = 0;
        for (j, c) in comps.iter().enumerate() {
            if images.contains(c) {
                assigned[j] = true;
                size += 1;
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn criterion_4() -> Outcome {
    let net = mc_const();
    let shift = Permutation::time(&[1, 2], &[(0, 2), (1, 0), (2, 1)]).unwrap();
    let h_group = GeneratedGroup::new(vec![flip(3), shift]);
    for (t, _) in net.enumerate_trajectories().unwrap() {
        let h = disintegration_hierarchy(&net, &t).unwrap();
        let d2 = components(&h.levels[1].partitions);
        let sizes2: Vec<usize> = d2.iter().map(BTreeSet::len).collect();
        ensure(sizes2 == [3; 6], format!("{t}: level 2 components {sizes2:?}"))?;
        ensure(orbit_classes(&h_group, &d2) == [6], format!("{t}: level 2 components are not one orbit"))?;
        let d3 = components(&h.levels[2].partitions);
        let mut sizes3: Vec<usize> = d3.iter().map(BTreeSet::len).collect();
        sizes3.sort_unstable_by(|a, b| b.cmp(a));
        ensure(sizes3 == [7, 7, 7, 7, 7, 7, 7, 7, 7, 4, 4], format!("{t}: level 3 components {sizes3:?}"))?;
        ensure(orbit_classes(&mc_const_group(), &d3) == [9, 2], format!("{t}: level 3 orbit classes"))?;
    }
    Ok("level 2: 6 components of 3, one orbit; level 3: 9 of 7 and 2 of 4".into())
}

fn criterion_5() -> Outcome {
    let net = mc_eps(&default_eps()).unwrap();
    let probs: Vec<Rational> = mc_eps_representatives().iter().map(|r| net.joint_probability(r).unwrap()).collect();
    ensure(
        probs == [ratio(9409, 40000), ratio(97, 40000), ratio(1, 40000)],
        format!("representatives {:?}", probs.iter().map(fmt_rational).collect::<Vec<_>>()),
    )?;
    let mut classes: BTreeMap<Rational, usize> = BTreeMap::new();
    let trajectories = net.enumerate_trajectories().unwrap();
    for (_, p) in &trajectories {
        *classes.entry(p.clone()).or_default() += 1;
    }
    let counts: Vec<usize> = classes.values().rev().copied().collect();
    ensure(trajectories.len() == 64 && counts == [4, 24, 36], format!("classes {counts:?}"))?;
    Ok("9409/40000, 97/40000, 1/40000; classes 4/24/36 of 64".into())
}

fn criterion_6() -> Outcome {
    let net = mc_eps(&default_eps()).unwrap();
    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    for r in mc_eps_representatives() {
        for e in iota_entities(&net, &r).unwrap() {
            lo = lo.min(e.iota.bits());
            hi = hi.max(e.iota.bits());
        }
    }
    ensure((lo - 0.014).abs() <= 5e-4, format!("min {lo:.6}"))?;
    ensure((hi - 0.971).abs() <= 5e-4, format!("max {hi:.6}"))?;
    Ok(format!("min {lo:.6} bit, max {hi:.6} bit"))
}

fn criterion_7() -> Outcome {
    let net = mc_eps(&default_eps()).unwrap();
    let anchor = grid(&[(2, 0, 1), (1, 1, 0), (1, 2, 0), (2, 2, 1)]);
    let y_b = grid(&[(2, 0, 1), (1, 1, 1), (1, 2, 1), (2, 2, 1)]);
    let z_c = grid(&[(2, 0, 1), (1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1)]);
    let set = EntitySet::iota(&net).unwrap();
    let base = CoPerceptionContext::new(&net, &set, &anchor, 0).unwrap();
    let env = |v| grid(&[(1, 0, v)]);
    let morphs = |other: &Pattern| -> Vec<Vec<Rational>> {
        let ctx = base.clone().with_zeta(&net, vec![anchor.clone(), other.clone()]).unwrap();
        (0..2)
            .map(|v| {
                let m = branch_morph(&net, &ctx, &env(v)).unwrap();
                vec![m.probability_of(&anchor).unwrap().clone(), m.probability_of(other).unwrap().clone()]
            })
            .collect()
    };
    let first = morphs(&y_b);
    ensure(
        first == [vec![ratio(4705, 4754), ratio(49, 4754)], vec![ratio(49, 4754), ratio(4705, 4754)]],
        format!("{first:?}"),
    )?;
    let second = morphs(&z_c);
    ensure(
        second == [vec![ratio(9410, 9507), ratio(97, 9507)], vec![ratio(98, 9507), ratio(9409, 9507)]],
        format!("{second:?}"),
    )?;
    let joint = net.marginal_probability(&y_b.merge(&z_c).unwrap()).unwrap();
    ensure(joint == ratio(4753, 20000), format!("Pr(y_B, z_C) = {}", fmt_rational(&joint)))?;
    ensure(interpenetrating_pair(&net, &[y_b, z_c]).unwrap().is_some(), "no interpenetration witness")?;
    Ok("4705/4754, 49/4754; 9410/9507, 97/9507, 98/9507, 9409/9507; Pr = 4753/20000".into())
}

fn criterion_8() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let start = Instant::now();
        let mut evaluations = 0;
        for net in [mc_const(), mc_eps(&default_eps()).unwrap()] {
            for (t, _) in net.enumerate_trajectories().unwrap() {
                let report = verify_disintegration_theorem(&net, &t).unwrap();
                ensure(report.passed(), format!("{t}: {:?}", report.counterexamples))?;
                evaluations += 203;
            }
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(60), format!("{elapsed:?}"))?;
        Ok(format!("{evaluations} hierarchy SLI evaluations, 0 counterexamples, single thread"))
    })
}

fn criterion_9() -> Outcome {
    let mut checked = 0usize;
    for net in [mc_const(), mc_eps(&default_eps()).unwrap()] {
        let mut cache: HashMap<Pattern, Rational> = HashMap::new();
        let mut p = |x: &Pattern| cache.entry(x.clone()).or_insert_with(|| net.marginal_probability(x).unwrap()).clone();
        let ids = net.node_ids();
        for mask in 1u32..(1 << ids.len()) {
            let domain: Vec<NodeId> = (0..ids.len()).filter(|k| mask & (1 << k) != 0).map(|k| ids[k].clone()).collect();
            let parts = all_partitions(&domain);
            for x in assignments(&net, &domain).unwrap() {
                let po = p(&x);
                if po.is_zero() {
                    continue;
                }
                for pi in &parts {
                    let blocks: Vec<Rational> = pi.blocks().iter().map(|b| p(&x.restrict(b))).collect();
                    let value = &po / blocks.iter().product::<Rational>();
                    let bound = pow(&po, 1 - pi.len() as i64);
                    ensure(value <= bound, format!("{x} {pi}: above bound"))?;
                    ensure((value == bound) == blocks.iter().all(|b| b == &po), format!("{x} {pi}: equality case"))?;
                    checked += 1;
                }
            }
        }
    }
    let (net, x, pi) = max_sli_fixture(&ratio(1, 3), 4).unwrap();
    ensure(sli(&net, &x, &pi).unwrap().ratio() == &pow(&ratio(1, 3), -3), "max fixture misses the bound")?;
    let (net, x, pi) = negative_sli_fixture(&ratio(1, 2), 2).unwrap();
    ensure(sli(&net, &x, &pi).unwrap().ratio() < &Rational::one(), "negative fixture is not negative")?;
    Ok(format!("{checked} pattern/partition pairs, fixtures attain the bound and a negative value"))
}

fn random_permutation(rng: &mut impl Rng, ids: &[NodeId]) -> Permutation {
    let mut image = ids.to_vec();
    image.shuffle(rng);
    Permutation::from_map(ids.iter().cloned().zip(image)).unwrap()
}

fn random_binary_net(rng: &mut impl Rng) -> BayesNet {
    let n = rng.gen_range(2..=5);
    let nodes = (0..n).map(|k| (NodeId::named(format!("v{k}")), locint::StateSpace::binary())).collect();
    let weights: Vec<i64> = (0..1 << n).map(|_| rng.gen_range(0..=3)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut joint: Vec<Rational> = weights.iter().map(|&w| ratio(w, total)).collect();
    if weights.iter().all(|&w| w == 0) {
        joint[0] = Rational::one();
    }
    BayesNet::from_joint("random", nodes, &joint).unwrap()
}

fn criterion_10() -> Outcome {
    let net = mc_const();
    let group = mc_const_group();
    let mut pairs = 0;
    for (t, _) in net.enumerate_trajectories().unwrap() {
        let report = check_sli_symmetry(&net, &group, &t).unwrap();
        ensure(report.passed(), format!("{t}: {:?}", report.violations))?;
        ensure(report.partitions == 203, format!("{} partitions", report.partitions))?;
        pairs += report.pairs_checked;
    }
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..CASES {
        let net = random_binary_net(&mut rng);
        let ids = net.node_ids();
        let (g, h) = (random_permutation(&mut rng, &ids), random_permutation(&mut rng, &ids));
        let id = Permutation::identity();
        let dom: Vec<NodeId> = ids.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let dom = if dom.is_empty() { vec![ids[0].clone()] } else { dom };
        let x = Pattern::from_pairs(dom.iter().map(|k| (k.clone(), rng.gen_range(0..2)))).unwrap();
        let labels: Vec<u32> = (0..dom.len()).map(|_| rng.gen_range(0..dom.len() as u32)).collect();
        let pi = SetPartition::from_labels(&dom, &labels).unwrap();
        let gh = g.compose(&h);

        let ok_pattern = act_on_pattern(&net, &id, &x).unwrap() == x
            && act_on_pattern(&net, &gh, &x).unwrap()
                == act_on_pattern(&net, &g, &act_on_pattern(&net, &h, &x).unwrap()).unwrap();
        ensure(ok_pattern, format!("pattern law, case {case}"))?;
        let ok_partition = act_on_partition(&id, &pi).unwrap() == pi
            && act_on_partition(&gh, &pi).unwrap() == act_on_partition(&g, &act_on_partition(&h, &pi).unwrap()).unwrap();
        ensure(ok_partition, format!("partition law, case {case}"))?;
        let p = net.marginal_probability(&x).unwrap();
        let twice = pull_back(&net, &h, &pull_back(&net, &g, &x).unwrap()).unwrap();
        let ok_distribution = act_on_distribution(&net, &id).unwrap().marginal(&x).unwrap() == p
            && act_on_distribution(&net, &gh).unwrap().marginal(&x).unwrap() == net.marginal_probability(&twice).unwrap();
        ensure(ok_distribution, format!("distribution law, case {case}"))?;
    }
    Ok(format!("{pairs} (g, partition) pairs exact; {CASES} random cases per action law"))
}

fn criterion_11() -> Outcome {
    const LOOPS: u64 = 120;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut anchors, mut transitions) = (0, 0);
    for k in 0..LOOPS {
        let (m, e, times) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(2..=4));
        let pa = random_pa_loop(&mut rng, m, e, times);
        let label = format!("loop {k} (|M|={m}, |E|={e}, T={times})");

        let original = pa.to_net().unwrap();
        let ext = extend_pa_loop(&pa).unwrap();
        let em: Vec<NodeId> = (0..times).flat_map(|t| [NodeId::grid(1, t), NodeId::grid(2, t)]).collect();
        for x in assignments(&original, &em).unwrap() {
            let moved =
                Pattern::from_pairs(x.iter().map(|(n, v)| (NodeId::grid(if n.space() == Some(2) { 4 } else { 1 }, n.time().unwrap()), v)))
                    .unwrap();
            ensure(
                ext.net.marginal_probability(&moved).unwrap() == original.joint_probability(&x).unwrap(),
                format!("{label}: extension changes p({x})"),
            )?;
        }

        let equivalence = pa_perception_equivalence(&pa).unwrap();
        ensure(equivalence.holds(), format!("{label}: {:?}", equivalence.mismatches))?;
        anchors += equivalence.anchors_checked;
        let set = EntitySet::pa_loop(&original, 2).unwrap();
        let support = original.support().unwrap();
        for t in 0..times - 1 {
            for x in &support.states {
                let tr = original.trajectory_pattern(x);
                let keep: Vec<NodeId> = tr.domain().into_iter().filter(|n| n.space() == Some(2)).collect();
                let anchor = tr.restrict(&keep);
                let ctx = CoPerceptionContext::new(&original, &set, &anchor, t).unwrap();
                let report = perception_partition(&original, &ctx).unwrap();
                let m_t = anchor.get(&NodeId::grid(2, t)).unwrap() as usize;
                let row = |env: &Pattern| {
                    let e = env.get(&NodeId::grid(1, t)).unwrap() as usize;
                    &pa.mem_kernel[t as usize][e * m + m_t]
                };
                let blocks = report.perceptions();
                for a in report.partition.ground() {
                    for b in report.partition.ground() {
                        let same = blocks.iter().any(|blk| blk.contains(a) && blk.contains(b));
                        ensure(same == (row(a) == row(b)), format!("{label}: t={t} perceptions differ from sensor classes"))?;
                    }
                }
            }

            let index = EntityIndex::new(&original, &set).unwrap();
            let (ie, im) = (original.index_of(&NodeId::grid(1, t)).unwrap(), original.index_of(&NodeId::grid(2, t + 1)).unwrap());
            let mut next: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
            let mut actions = false;
            for x in &support.states {
                next.entry(x[ie]).or_default().insert(x[im]);
                let tr = original.trajectory_pattern(x);
                let keep: Vec<NodeId> = tr.domain().into_iter().filter(|n| n.space() == Some(2)).collect();
                actions |= !index.co_actions(&tr.restrict(&keep), &tr, t).unwrap().is_empty();
            }
            let entropy_positive = next.values().any(|s| s.len() > 1);
            ensure(entropy_positive == actions, format!("{label}: t={t} H>0 is {entropy_positive}, actions {actions}"))?;
            ensure(non_heteronomy(&pa, t).unwrap().consistent(), format!("{label}: t={t} library disagrees"))?;
            transitions += 1;
        }
    }
    Ok(format!("{LOOPS} loops: extension exact, {anchors} perception anchors, {transitions} transitions"))
}

fn criterion_12() -> Outcome {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_locint"))
            .args(["verify", "--builtin", "mc-eps", "--threads", threads])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), format!("verify with {threads} threads exited with {}", out.status))?;
        Ok::<_, String>(out.stdout)
    };
    let one = run("1")?;
    let four = run("4")?;
    ensure(one == four, "reports differ between 1 and 4 threads")?;
    Ok(format!("{} identical bytes with 1 and 4 threads", one.len()))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut failed = 0;
    for (i, criterion) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS ({detail}, {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL ({detail}, {secs:.2}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
