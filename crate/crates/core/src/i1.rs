//! The subproblem of huge items packed into bins with totals in `[1 + delta_small, 1 + delta)`.
//!
//! Sizes are rounded up by linear grouping, all configurations over the
//! present rounded sizes are enumerated, the equality-form configuration LP
//! is solved exactly, and the floored solution is instantiated.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::classify::SchemeParams;
use crate::error::{Error, Result};
use crate::grouping::{group_classes, ClassKey, Direction, GroupedInstance, SizeEntry};
use crate::lp::{self, Column, LpProblem, Relation, Sense};
use crate::model::Instance;
use crate::rational::{floor_int, format_rational, Rational};

pub const DEFAULT_CONFIG_CAP: usize = 200_000;

/// A multiset of rounded sizes, as counts per entry of the size table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationI1 {
    pub counts: Vec<u64>,
    pub total: Rational,
    pub reward: bool,
}

impl ConfigurationI1 {
    pub fn item_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Rounds the (huge) items of `items` up within their classes.
pub fn group_up(instance: &Instance, items: &[usize], params: &SchemeParams) -> GroupedInstance {
    let mut classes: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for &j in items {
        let psi = params.class_of(instance.size(j)).expect("I1 holds only huge items");
        classes.entry(ClassKey::Huge(psi)).or_default().push(j);
    }
    group_classes(instance, &classes, params.group_count(), Direction::Up)
}

/// Every multiset over `sizes` with multiplicities bounded by the table and
/// total below `1 + delta`, in depth-first order starting with the empty one.
pub fn enumerate_configs_i1(
    sizes: &[SizeEntry],
    delta: &Rational,
    delta_small: &Rational,
    cap: usize,
) -> Result<Vec<ConfigurationI1>> {
    let upper = Rational::one() + delta;
    let reward_lo = Rational::one() + delta_small;
    let mut out = Vec::new();
    let mut counts = vec![0u64; sizes.len()];

    fn dfs(
        sizes: &[SizeEntry],
        next: usize,
        counts: &mut Vec<u64>,
        total: Rational,
        bounds: (&Rational, &Rational),
        cap: usize,
        out: &mut Vec<ConfigurationI1>,
    ) -> Result<()> {
        if out.len() >= cap {
            return Err(Error::ConfigCapExceeded { cap });
        }
        let reward = &total >= bounds.0 && &total < bounds.1;
        out.push(ConfigurationI1 { counts: counts.clone(), total: total.clone(), reward });
        for i in next..sizes.len() {
            if counts[i] == sizes[i].count() {
                continue;
            }
            let t = &total + &sizes[i].size;
            if &t >= bounds.1 {
                // Sizes ascend, so every later size overshoots as well.
                break;
            }
            counts[i] += 1;
            dfs(sizes, i, counts, t, bounds, cap, out)?;
            counts[i] -= 1;
        }
        Ok(())
    }

    dfs(sizes, 0, &mut counts, Rational::zero(), (&reward_lo, &upper), cap, &mut out)?;
    Ok(out)
}

/// Equality-form configuration LP over the unit-reward configurations plus
/// one zero-reward single-item column per size.
pub fn build_lp(sizes: &[SizeEntry], configs: &[&ConfigurationI1]) -> LpProblem {
    let mut lp = LpProblem::new(Sense::Maximize);
    for entry in sizes {
        lp.add_row(Relation::Eq, Rational::from_integer(entry.count().into()), format!("size_{}", format_rational(&entry.size)));
    }
    for (k, c) in configs.iter().enumerate() {
        let entries = c
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (i, Rational::from_integer(n.into())))
            .collect();
        lp.add_column(Column::new(Rational::one(), entries).named(format!("c{k}")));
    }
    for i in 0..sizes.len() {
        lp.add_column(Column::new(Rational::zero(), vec![(i, Rational::one())]).named(format!("single{i}")));
    }
    lp
}

#[derive(Debug, Clone, Serialize)]
pub struct I1Outcome {
    /// Instantiated unit-reward bins, then one dedicated bin per leftover item.
    pub bins: Vec<Vec<usize>>,
    /// Indices into `bins` of the bins built from unit-reward configurations.
    pub unit_bins: Vec<usize>,
    pub covered: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub lp_value: Rational,
    pub lp_rows: usize,
    pub lp_support: usize,
    pub floored_value: u64,
    pub configurations: usize,
}

impl I1Outcome {
    fn empty() -> Self {
        Self {
            bins: Vec::new(),
            unit_bins: Vec::new(),
            covered: 0,
            lp_value: Rational::zero(),
            lp_rows: 0,
            lp_support: 0,
            floored_value: 0,
            configurations: 0,
        }
    }
}

/// Approximately solves the subproblem on `items`, returning bins over
/// exactly those items.
pub fn solve_i1(instance: &Instance, items: &[usize], params: &SchemeParams, config_cap: usize) -> Result<I1Outcome> {
    if items.is_empty() {
        return Ok(I1Outcome::empty());
    }
    let grouped = group_up(instance, items, params);
    let sizes = grouped.size_table();
    let configs = enumerate_configs_i1(&sizes, &params.delta, &params.delta_small, config_cap)?;
    let unit: Vec<&ConfigurationI1> = configs.iter().filter(|c| c.reward).collect();
    let problem = build_lp(&sizes, &unit);
    let solution = lp::solve(&problem)?;
    if solution.status != lp::LpStatus::Optimal {
        return Err(Error::Lp(format!("I1 configuration LP reported {:?}", solution.status)));
    }

    let mut available: Vec<std::collections::VecDeque<usize>> =
        sizes.iter().map(|e| e.items.iter().copied().collect()).collect();
    let mut bins = Vec::new();
    let mut unit_bins = Vec::new();
    let mut floored_value = 0u64;
    for (k, config) in unit.iter().enumerate() {
        let copies = floor_int(&solution.primal[k]).to_u64().expect("bin count fits u64");
        floored_value += copies;
        for _ in 0..copies {
            let mut bin = Vec::new();
            for (i, &n) in config.counts.iter().enumerate() {
                for _ in 0..n {
                    bin.push(available[i].pop_front().expect("LP rows bound the item counts"));
                }
            }
            bin.sort_unstable();
            unit_bins.push(bins.len());
            bins.push(bin);
        }
    }
    let mut leftovers: Vec<usize> = available.into_iter().flatten().collect();
    leftovers.sort_unstable();
    bins.extend(leftovers.into_iter().map(|j| vec![j]));
    let covered = bins.iter().filter(|b| instance.is_covered_total(&instance.total(b))).count();

    Ok(I1Outcome {
        bins,
        unit_bins,
        covered,
        lp_value: solution.objective.clone(),
        lp_rows: problem.rows.len(),
        lp_support: solution.support().len(),
        floored_value,
        configurations: configs.len(),
    })
}
