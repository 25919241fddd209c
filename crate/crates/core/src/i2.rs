//! The subproblem of items packed into bins with totals in `[1, 1 + 3 delta_small)`.
//!
//! For every guess `beta` of the number of good bins with non-huge items,
//! the non-huge items are split into large, medium and small ones. Large
//! items join the huge classes, sizes are rounded down by linear grouping,
//! small items become sand, and the sand configuration LP is solved by
//! column generation. The floored solution is realized with actual items.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::classify::SchemeParams;
use crate::error::{Error, Result};
use crate::grouping::{group_classes, ClassKey, Direction, GroupedInstance, SizeEntry};
use crate::lp::{self, column_generation, to_basic, LpProblem, Relation, Sense};
use crate::model::Instance;
use crate::pricing;
use crate::rational::{floor_int, format_rational, Rational};

pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

/// Large, medium and small items, each in non-increasing size order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LmsSplit {
    pub large: Vec<usize>,
    pub medium: Vec<usize>,
    pub small: Vec<usize>,
}

/// Splits the non-huge items `x` for the guess `beta`.
pub fn split_lms(instance: &Instance, x: &[usize], beta: usize, params: &SchemeParams) -> Result<LmsSplit> {
    if beta > x.len() {
        return Err(Error::BetaOutOfRange { beta, max: x.len() });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|&a, &b| instance.size(b).cmp(instance.size(a)).then(a.cmp(&b)));
    let inv_eps = params.inv_eps() as usize;
    let l = sorted.len().min((beta + 1) * inv_eps);
    let m = (l + beta).min(sorted.len());
    Ok(LmsSplit { large: sorted[..l].to_vec(), medium: sorted[l..m].to_vec(), small: sorted[m..].to_vec() })
}

/// Rounds the huge classes together with the large items (as one extra class) down.
pub fn group_down(instance: &Instance, huge: &[usize], large: &[usize], params: &SchemeParams) -> GroupedInstance {
    let mut classes: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for &j in huge {
        let psi = params.class_of(instance.size(j)).expect("huge item has a class");
        classes.entry(ClassKey::Huge(psi)).or_default().push(j);
    }
    if !large.is_empty() {
        classes.insert(ClassKey::Large, large.to_vec());
    }
    group_classes(instance, &classes, params.group_count(), Direction::Down)
}

/// The master LP: one `<=` row per size, then the sand row, then the sand-bin row; no columns.
pub fn master_lp(sizes: &[SizeEntry], sand: &Rational, beta: usize) -> LpProblem {
    let mut lp = LpProblem::new(Sense::Maximize);
    for entry in sizes {
        lp.add_row(Relation::Le, Rational::from_integer(entry.count().into()), format!("size_{}", format_rational(&entry.size)));
    }
    lp.add_row(Relation::Le, sand.clone(), "sand");
    lp.add_row(Relation::Le, Rational::from_integer(beta.into()), "sand_bins");
    lp
}

#[derive(Debug, Clone)]
pub struct MasterResult {
    pub problem: LpProblem,
    /// Basic solution after crashing.
    pub solution: lp::LpSolution,
    /// Objective before crashing.
    pub lp_value: Rational,
    pub rounds: usize,
    pub columns_added: usize,
    pub certified: bool,
}

/// Solves the master for the rounded sizes by column generation with the
/// approximate separation oracle, then crashes to a basic solution.
pub fn build_and_solve_master(
    sizes: &[SizeEntry],
    sand: &Rational,
    beta: usize,
    params: &SchemeParams,
    max_rounds: usize,
) -> Result<MasterResult> {
    let size_values: Vec<Rational> = sizes.iter().map(|e| e.size.clone()).collect();
    let counts: Vec<u64> = sizes.iter().map(SizeEntry::count).collect();
    let master = master_lp(sizes, sand, beta);
    let cg = column_generation(master, |duals| pricing::price(duals, &size_values, &counts, params), max_rounds)?;
    let basic = to_basic(&cg.problem, &cg.solution)?;
    Ok(MasterResult {
        problem: cg.problem,
        lp_value: cg.solution.objective,
        solution: basic,
        rounds: cg.rounds,
        columns_added: cg.columns_added,
        certified: cg.certified,
    })
}

/// Replaces sand of a bin whose items total `base` by small items taken in
/// order until the next would bring the total to 1 or more, then adds one
/// medium item. Returns the added items.
pub fn fill_with_small(
    instance: &Instance,
    base: &Rational,
    small: &mut VecDeque<usize>,
    medium: &mut VecDeque<usize>,
) -> Vec<usize> {
    let one = Rational::one();
    let mut total = base.clone();
    let mut added = Vec::new();
    while let Some(&j) = small.front() {
        let next = &total + instance.size(j);
        if next >= one {
            break;
        }
        total = next;
        added.push(j);
        small.pop_front();
    }
    if let Some(j) = medium.pop_front() {
        added.push(j);
    }
    added
}

#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    pub bins: Vec<Vec<usize>>,
    /// Indices into `bins` of the bins built from unit-reward configurations.
    pub unit_bins: Vec<usize>,
    pub covered: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub sand_used: Rational,
    pub medium_used: usize,
}

/// Instantiates `floor(x)` bins per master column over the items of
/// `grouped`, deletes large items from overfull bins, realizes sand with
/// small and medium items, and puts everything else into dedicated bins.
pub fn realize(
    instance: &Instance,
    grouped: &GroupedInstance,
    problem: &LpProblem,
    x: &[Rational],
    split: &LmsSplit,
) -> Realization {
    let sizes = grouped.size_table();
    let k = sizes.len();
    let upper = instance.upper();
    let one = Rational::one();
    let large: std::collections::BTreeSet<usize> = split.large.iter().copied().collect();
    let mut available: Vec<VecDeque<usize>> = sizes.iter().map(|e| e.items.iter().copied().collect()).collect();
    let mut small: VecDeque<usize> = split.small.iter().copied().collect();
    let mut medium: VecDeque<usize> = split.medium.iter().copied().collect();
    let mut bins = Vec::new();
    let mut unit_bins = Vec::new();
    let mut deleted = Vec::new();
    let mut sand_used = Rational::zero();
    let mut medium_used = 0;

    for (col, value) in problem.columns.iter().zip(x) {
        let copies = floor_int(value).to_u64().expect("bin count fits u64");
        if copies == 0 {
            continue;
        }
        let sand = col.coefficient(k);
        for _ in 0..copies {
            let mut bin = Vec::new();
            for (i, a) in &col.entries {
                if *i >= k {
                    continue;
                }
                let n = a.to_integer().to_u64().expect("configuration count fits u64");
                for _ in 0..n {
                    bin.push(available[*i].pop_front().expect("master rows bound the item counts"));
                }
            }
            // Drop large items, last placed first, while the bin with its sand overflows.
            let mut total = instance.total(&bin);
            while &total + &sand >= upper {
                let Some(pos) = bin.iter().rposition(|j| large.contains(j)) else { break };
                let j = bin.remove(pos);
                total -= instance.size(j);
                deleted.push(j);
            }
            if sand.is_positive() {
                let reduced = if total < one { &one - &total } else { Rational::zero() };
                if reduced.is_positive() {
                    sand_used += &reduced;
                    let before = medium.len();
                    let added = fill_with_small(instance, &total, &mut small, &mut medium);
                    medium_used += before - medium.len();
                    bin.extend(added);
                }
            }
            bin.sort_unstable();
            unit_bins.push(bins.len());
            bins.push(bin);
        }
    }
    let mut rest: Vec<usize> = available.into_iter().flatten().chain(small).chain(medium).chain(deleted).collect();
    rest.sort_unstable();
    bins.extend(rest.into_iter().map(|j| vec![j]));
    let covered = bins.iter().filter(|b| instance.is_covered_total(&instance.total(b))).count();
    Realization { bins, unit_bins, covered, sand_used, medium_used }
}

/// Per-guess record of one `beta` iteration.
#[derive(Debug, Clone, Serialize)]
pub struct BetaTrace {
    pub beta: usize,
    pub large: usize,
    pub medium: usize,
    pub small: usize,
    pub sizes: usize,
    pub columns_priced: usize,
    pub rounds: usize,
    pub certified: bool,
    #[serde(with = "crate::rational::serde_rational")]
    pub lp_value: Rational,
    pub support: usize,
    pub floored_value: u64,
    pub covered: usize,
    /// Earlier `beta` with an identical LP whose result was reused.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reused_from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct I2Outcome {
    pub bins: Vec<Vec<usize>>,
    pub unit_bins: Vec<usize>,
    pub covered: usize,
    pub best_beta: Option<usize>,
    pub trace: Vec<BetaTrace>,
}

struct BetaRun {
    realization: Realization,
    trace: BetaTrace,
}

fn run_beta(
    instance: &Instance,
    huge: &[usize],
    non_huge: &[usize],
    beta: usize,
    params: &SchemeParams,
    max_rounds: usize,
) -> Result<BetaRun> {
    let split = split_lms(instance, non_huge, beta, params)?;
    let grouped = group_down(instance, huge, &split.large, params);
    let sizes = grouped.size_table();
    let sand = instance.total(&split.small);
    let master = build_and_solve_master(&sizes, &sand, beta, params, max_rounds)?;
    let floored_value: u64 =
        master.solution.primal.iter().map(|v| floor_int(v).to_u64().expect("bin count fits u64")).sum();
    let realization = realize(instance, &grouped, &master.problem, &master.solution.primal, &split);
    let trace = BetaTrace {
        beta,
        large: split.large.len(),
        medium: split.medium.len(),
        small: split.small.len(),
        sizes: sizes.len(),
        columns_priced: master.columns_added,
        rounds: master.rounds,
        certified: master.certified,
        lp_value: master.lp_value,
        support: master.solution.support().len(),
        floored_value,
        covered: realization.covered,
        reused_from: None,
        error: None,
    };
    Ok(BetaRun { realization, trace })
}

/// Tries every `beta` in ascending order and keeps the fragment with the
/// most covered bins (lowest `beta` on ties). Bins cover exactly `items`.
pub fn solve_i2(instance: &Instance, items: &[usize], params: &SchemeParams, max_rounds: usize) -> Result<I2Outcome> {
    let mut huge = Vec::new();
    let mut non_huge = Vec::new();
    for &j in items {
        if params.class_of(instance.size(j)).is_some() {
            huge.push(j);
        } else {
            non_huge.push(j);
        }
    }
    let mut best: Option<(usize, Realization)> = None;
    let mut trace = Vec::new();
    // With no small items the LP and its realization do not depend on beta beyond the split.
    let mut sandless: BTreeMap<Vec<usize>, (usize, BetaTrace)> = BTreeMap::new();

    for beta in 0..=non_huge.len() {
        let split = split_lms(instance, &non_huge, beta, params)?;
        if split.small.is_empty() {
            if let Some((from, t)) = sandless.get(&split.large) {
                let mut t = t.clone();
                t.beta = beta;
                t.medium = split.medium.len();
                t.reused_from = Some(*from);
                trace.push(t);
                continue;
            }
        }
        match run_beta(instance, &huge, &non_huge, beta, params, max_rounds) {
            Ok(run) => {
                if best.as_ref().map_or(true, |(_, b)| run.realization.covered > b.covered) {
                    best = Some((beta, run.realization));
                }
                if split.small.is_empty() {
                    sandless.insert(split.large.clone(), (beta, run.trace.clone()));
                }
                trace.push(run.trace);
            }
            Err(e) => {
                log::warn!("beta = {beta} skipped: {e}");
                trace.push(BetaTrace {
                    beta,
                    large: split.large.len(),
                    medium: split.medium.len(),
                    small: split.small.len(),
                    sizes: 0,
                    columns_priced: 0,
                    rounds: 0,
                    certified: false,
                    lp_value: Rational::zero(),
                    support: 0,
                    floored_value: 0,
                    covered: 0,
                    reused_from: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    match best {
        Some((beta, r)) => Ok(I2Outcome { bins: r.bins, unit_bins: r.unit_bins, covered: r.covered, best_beta: Some(beta), trace }),
        None if items.is_empty() => Ok(I2Outcome { bins: Vec::new(), unit_bins: Vec::new(), covered: 0, best_beta: None, trace }),
        None => {
            // Every beta failed: fall back to dedicated bins.
            let mut sorted = items.to_vec();
            sorted.sort_unstable();
            let bins: Vec<Vec<usize>> = sorted.into_iter().map(|j| vec![j]).collect();
            let covered = bins.iter().filter(|b| instance.is_covered_total(&instance.total(b))).count();
            Ok(I2Outcome { bins, unit_bins: Vec::new(), covered, best_beta: None, trace })
        }
    }
}
