//! Disintegration hierarchies of trajectories and the ι-entities they contain.

use std::collections::BTreeMap;

use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integration::{MarginalTable, SliValue};
use crate::model::{BayesNet, NodeId};
use crate::partition::{refines_rgs, RgsIter, SetPartition, DEFAULT_PARTITION_CAP};
use crate::pattern::Pattern;

/// One level `𝔇_i`: all partitions sharing an exact SLI value.
#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub sli: SliValue,
    pub partitions: Vec<SetPartition<NodeId>>,
}

/// `𝔇(x_V)`, levels in strictly increasing SLI.
#[derive(Clone, Debug, Serialize)]
pub struct Hierarchy {
    pub trajectory: Pattern,
    pub levels: Vec<Level>,
}

impl Hierarchy {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.partitions.len()).collect()
    }

    pub fn level_of(&self, partition: &SetPartition<NodeId>) -> Option<usize> {
        self.levels.iter().position(|l| l.partitions.contains(partition))
    }
}

/// `𝔇◁(x_V)`: level `i` keeps the partitions with no strict refinement in levels `≤ i`.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementFreeHierarchy {
    pub levels: Vec<Vec<SetPartition<NodeId>>>,
}

/// A completely locally integrated pattern found in a refinement-free hierarchy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IotaEntity {
    pub pattern: Pattern,
    pub iota: SliValue,
    /// `(level index, partition)` pairs of `𝔇◁` that contain the pattern as a block.
    pub witnesses: Vec<(usize, SetPartition<NodeId>)>,
}

/// Options for [`disintegration_hierarchy_with`].
#[derive(Clone, Copy, Debug)]
pub struct HierarchyOptions {
    pub partition_cap: usize,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions { partition_cap: DEFAULT_PARTITION_CAP }
    }
}

fn check_trajectory(net: &BayesNet, trajectory: &Pattern) -> Result<()> {
    net.trajectory_states(trajectory)?;
    Ok(())
}

/// `𝔇(x_V)` with the default partition cap.
pub fn disintegration_hierarchy(net: &BayesNet, trajectory: &Pattern) -> Result<Hierarchy> {
    disintegration_hierarchy_with(net, trajectory, HierarchyOptions::default())
}

pub fn disintegration_hierarchy_with(net: &BayesNet, trajectory: &Pattern, opts: HierarchyOptions) -> Result<Hierarchy> {
    check_trajectory(net, trajectory)?;
    let n = trajectory.len();
    if n > opts.partition_cap {
        return Err(Error::PartitionCap { size: n, cap: opts.partition_cap });
    }
    let table = MarginalTable::new(net, trajectory)?;
    let mask = table.full_mask();
    if table.prob(mask).is_zero() {
        return Err(Error::ImpossiblePattern);
    }
    let all: Vec<Vec<u32>> = RgsIter::new(n).collect();
    let ratios: Vec<_> = all
        .par_iter()
        .map(|rgs| table.sli_ratio(mask, &MarginalTable::block_masks(mask, rgs)))
        .collect::<Result<_>>()?;
    let mut grouped: BTreeMap<_, Vec<SetPartition<NodeId>>> = BTreeMap::new();
    for (rgs, r) in all.into_iter().zip(ratios) {
        grouped.entry(r).or_default().push(table.partition(mask, &rgs));
    }
    let levels = grouped
        .into_iter()
        .map(|(r, partitions)| Level { sli: SliValue::from_ratio(r), partitions })
        .collect();
    Ok(Hierarchy { trajectory: trajectory.clone(), levels })
}

fn filter_levels(levels: &[&[SetPartition<NodeId>]]) -> RefinementFreeHierarchy {
    // Partitions seen so far, bucketed by block count: only partitions with more blocks can refine.
    let mut seen: BTreeMap<usize, Vec<&SetPartition<NodeId>>> = BTreeMap::new();
    let mut out = Vec::with_capacity(levels.len());
    for level in levels {
        for p in level.iter() {
            seen.entry(p.len()).or_default().push(p);
        }
        let kept = level
            .iter()
            .filter(|p| {
                !seen
                    .range(p.len() + 1..)
                    .flat_map(|(_, v)| v.iter())
                    .any(|q| refines_rgs(q.rgs(), p.rgs()))
            })
            .cloned()
            .collect();
        out.push(kept);
    }
    RefinementFreeHierarchy { levels: out }
}

/// `𝔇◁(x_V)`.
pub fn refinement_free(h: &Hierarchy) -> RefinementFreeHierarchy {
    let levels: Vec<&[SetPartition<NodeId>]> = h.levels.iter().map(|l| l.partitions.as_slice()).collect();
    filter_levels(&levels)
}

fn collect_entities(
    net: &BayesNet,
    trajectory: &Pattern,
    rf: &RefinementFreeHierarchy,
) -> Result<Vec<IotaEntity>> {
    let table = MarginalTable::new(net, trajectory)?;
    let mut found: BTreeMap<Pattern, Vec<(usize, SetPartition<NodeId>)>> = BTreeMap::new();
    for (i, level) in rf.levels.iter().enumerate() {
        for p in level {
            for block in p.blocks() {
                if block.len() >= 2 {
                    found.entry(trajectory.restrict(&block)).or_default().push((i, p.clone()));
                }
            }
        }
    }
    found
        .into_iter()
        .map(|(pattern, witnesses)| {
            let mask = table.mask_of(&pattern.domain())?;
            let (ratio, _) = table.cli(mask)?;
            Ok(IotaEntity { pattern, iota: SliValue::from_ratio(ratio), witnesses })
        })
        .collect()
}

/// The non-singleton blocks of all `𝔇◁(x_V)` partitions, each with its `ι`, sorted by pattern.
pub fn iota_entities(net: &BayesNet, trajectory: &Pattern) -> Result<Vec<IotaEntity>> {
    iota_entities_with(net, trajectory, HierarchyOptions::default())
}

pub fn iota_entities_with(net: &BayesNet, trajectory: &Pattern, opts: HierarchyOptions) -> Result<Vec<IotaEntity>> {
    let h = disintegration_hierarchy_with(net, trajectory, opts)?;
    collect_entities(net, trajectory, &refinement_free(&h))
}

/// `𝔈_ι`: union of [`iota_entities`] over all possible trajectories, deduplicated by pattern.
/// Witness lists are concatenated across trajectories.
pub fn entity_set_union(net: &BayesNet) -> Result<Vec<IotaEntity>> {
    let trajectories = net.enumerate_trajectories()?;
    let per: Vec<Vec<IotaEntity>> =
        trajectories.par_iter().map(|(t, _)| iota_entities(net, t)).collect::<Result<_>>()?;
    let mut merged: BTreeMap<Pattern, IotaEntity> = BTreeMap::new();
    for e in per.into_iter().flatten() {
        match merged.get_mut(&e.pattern) {
            Some(m) => m.witnesses.extend(e.witnesses),
            None => {
                merged.insert(e.pattern.clone(), e);
            }
        }
    }
    Ok(merged.into_values().collect())
}

/// Findings of a brute-force check of the disintegration theorem on one trajectory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    /// Non-singleton `𝔇◁` blocks checked for `ι > 0`.
    pub blocks_checked: usize,
    /// Sub-patterns of the trajectory with at least two nodes scanned for `ι > 0`.
    pub patterns_scanned: usize,
    /// Positive-`ι` sub-patterns found by the scan.
    pub entities_found: usize,
    pub counterexamples: Vec<String>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks both directions of the disintegration theorem:
/// every non-singleton `𝔇◁` block has `ι > 0`, and for every sub-pattern `x_A` with
/// `ι > 0` the partition `{A} ∪ singletons` lies in `𝔇◁` at its own level.
pub fn verify_disintegration_theorem(net: &BayesNet, trajectory: &Pattern) -> Result<TheoremReport> {
    verify_with_filter(net, trajectory, true)
}

/// Negative control: the same check against an unfiltered hierarchy.
#[doc(hidden)]
pub fn verify_disintegration_theorem_unfiltered(net: &BayesNet, trajectory: &Pattern) -> Result<TheoremReport> {
    verify_with_filter(net, trajectory, false)
}

fn verify_with_filter(net: &BayesNet, trajectory: &Pattern, filter: bool) -> Result<TheoremReport> {
    let h = disintegration_hierarchy(net, trajectory)?;
    let rf = if filter {
        refinement_free(&h)
    } else {
        RefinementFreeHierarchy { levels: h.levels.iter().map(|l| l.partitions.clone()).collect() }
    };
    let table = MarginalTable::new(net, trajectory)?;
    let mut report = TheoremReport::default();

    for level in &rf.levels {
        for p in level {
            for block in p.blocks() {
                if block.len() < 2 {
                    continue;
                }
                report.blocks_checked += 1;
                let (ratio, _) = table.cli(table.mask_of(&block)?)?;
                if !SliValue::from_ratio(ratio).is_positive() {
                    report.counterexamples.push(format!(
                        "block {} of {p} in the refinement-free hierarchy has iota <= 0",
                        trajectory.restrict(&block)
                    ));
                }
            }
        }
    }

    let domain = trajectory.domain();
    for mask in 1..=table.full_mask() {
        if mask.count_ones() < 2 {
            continue;
        }
        report.patterns_scanned += 1;
        let (ratio, _) = table.cli(mask)?;
        if !SliValue::from_ratio(ratio).is_positive() {
            continue;
        }
        report.entities_found += 1;
        let labels: Vec<u32> = (0..domain.len())
            .map(|k| if mask & (1 << k) != 0 { 0 } else { k as u32 + 1 })
            .collect();
        let pi_a = SetPartition::from_labels(&domain, &labels)?;
        let level = h.level_of(&pi_a).expect("every partition lies in some level");
        if !rf.levels[level].contains(&pi_a) {
            report.counterexamples.push(format!(
                "entity {} has iota > 0 but {pi_a} is not refinement-free at level {}",
                table.sub_pattern(trajectory, mask),
                level + 1
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mechanism, NodeSpec, StateSpace};
    use crate::rational::ratio;

    #[test]
    fn independent_coins_single_level() {
        let coin = |n: &str| NodeSpec {
            id: NodeId::named(n),
            states: StateSpace::binary(),
            mechanism: Mechanism::root(vec![ratio(1, 2), ratio(1, 2)]),
        };
        let net = BayesNet::new("coins", vec![coin("a"), coin("b")]).unwrap();
        let t = net.parse_pattern("a=0,b=1").unwrap();
        let h = disintegration_hierarchy(&net, &t).unwrap();
        assert_eq!(h.level_sizes(), vec![2]);
        let rf = refinement_free(&h);
        assert_eq!(rf.levels[0], vec![SetPartition::zero(&t.domain())]);
        assert!(iota_entities(&net, &t).unwrap().is_empty());
    }
}
