//! Exact optimum for small instances by subset dynamic programming.
//!
//! `f(S) = max(f(S - low), max_{T} 1 + f(S - T))` where `low` is the lowest
//! item of `S` and `T` ranges over covering subsets of `S` that contain `low`.

use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, Packing};
use crate::rational::{common_denominator, Rational};

/// Hard ceiling on the number of items the oracle accepts.
pub const MAX_ITEMS: usize = 24;
pub const DEFAULT_LIMIT: usize = 20;

/// A set of item indices as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn full(n: usize) -> Self {
        Self(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    pub fn items(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    pub fn lowest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn from_items(items: &[usize]) -> Self {
        Self(items.iter().fold(0, |m, &i| m | 1 << i))
    }
}

/// Reward interval `[lo, hi)` on bin totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RewardInterval {
    pub fn near_exact(instance: &Instance) -> Self {
        Self { lo: Rational::from_integer(1.into()), hi: instance.upper() }
    }
}

/// Sizes and interval bounds scaled to a common denominator.
struct Scaled<T> {
    weights: Vec<T>,
    lo: T,
    hi: T,
}

fn scale(sizes: &[Rational], interval: &RewardInterval) -> (Vec<BigInt>, BigInt, BigInt) {
    let d = common_denominator(sizes.iter().chain([&interval.lo, &interval.hi]));
    let lift = |r: &Rational| r.numer() * (&d / r.denom());
    (sizes.iter().map(lift).collect(), lift(&interval.lo), lift(&interval.hi))
}

fn covering_from_lowest<T>(s: &Scaled<T>, mask: u32, low: usize, out: &mut Vec<u32>)
where
    T: Clone + Ord + Zero + Add<Output = T>,
{
    fn dfs<T: Clone + Ord + Zero + Add<Output = T>>(
        s: &Scaled<T>,
        mask: u32,
        next: usize,
        chosen: u32,
        total: T,
        out: &mut Vec<u32>,
    ) {
        if total >= s.lo {
            out.push(chosen);
        }
        for j in next..s.weights.len() {
            if mask >> j & 1 == 0 {
                continue;
            }
            let t = total.clone() + s.weights[j].clone();
            if t < s.hi {
                dfs(s, mask, j + 1, chosen | 1 << j, t, out);
            }
        }
    }
    let w = s.weights[low].clone();
    if w < s.hi {
        dfs(s, mask, low + 1, 1 << low, w, out);
    }
}

fn solve_scaled<T>(s: &Scaled<T>) -> (usize, Vec<Vec<usize>>)
where
    T: Clone + Ord + Zero + Add<Output = T>,
{
    let n = s.weights.len();
    let full = SubsetMask::full(n).0;
    // Covering subsets grouped by their lowest item, in lexicographic order.
    let covers: Vec<Vec<u32>> = (0..n)
        .map(|low| {
            let mut out = Vec::new();
            covering_from_lowest(s, full, low, &mut out);
            out
        })
        .collect();

    const UNKNOWN: u8 = u8::MAX;
    let mut memo = vec![UNKNOWN; 1usize << n];
    memo[0] = 0;

    fn value(mask: u32, covers: &[Vec<u32>], memo: &mut [u8]) -> u8 {
        if memo[mask as usize] != UNKNOWN {
            return memo[mask as usize];
        }
        let low = mask.trailing_zeros() as usize;
        let mut best = value(mask & !(1 << low), covers, memo);
        for &t in &covers[low] {
            if t & !mask == 0 {
                best = best.max(1 + value(mask & !t, covers, memo));
            }
        }
        memo[mask as usize] = best;
        best
    }

    let opt = value(full, &covers, &mut memo);

    let mut bins = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let target = memo[mask as usize];
        let low = mask.trailing_zeros() as usize;
        let chosen = covers[low]
            .iter()
            .copied()
            .find(|&t| t & !mask == 0 && 1 + value(mask & !t, &covers, &mut memo) == target);
        match chosen {
            Some(t) => {
                bins.push(SubsetMask(t).items());
                mask &= !t;
            }
            None => {
                bins.push(vec![low]);
                mask &= !(1 << low);
            }
        }
    }
    (opt as usize, bins)
}

fn fits_u128(weights: &[BigInt], hi: &BigInt) -> bool {
    let bound = weights.iter().fold(hi.clone(), |acc, w| acc + w);
    bound.to_u128().is_some()
}

fn run<R>(
    sizes: &[Rational],
    interval: &RewardInterval,
    small: impl FnOnce(&Scaled<u128>) -> R,
    big: impl FnOnce(&Scaled<BigInt>) -> R,
) -> R {
    let (weights, lo, hi) = scale(sizes, interval);
    if fits_u128(&weights, &hi) && lo.to_u128().is_some() {
        let s = Scaled {
            weights: weights.iter().map(|w| w.to_u128().unwrap()).collect(),
            lo: lo.to_u128().unwrap(),
            hi: hi.to_u128().unwrap(),
        };
        small(&s)
    } else {
        big(&Scaled { weights, lo, hi })
    }
}

/// Optimum number of bins with totals in `interval`, with a witness partition
/// (uncovered leftovers in singleton bins).
pub fn exact_opt_in_interval(
    sizes: &[Rational],
    interval: &RewardInterval,
    limit: usize,
) -> Result<(usize, Vec<Vec<usize>>)> {
    let n = sizes.len();
    if n > limit.min(MAX_ITEMS) {
        return Err(Error::TooLarge { n, limit: limit.min(MAX_ITEMS) });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    Ok(run(sizes, interval, solve_scaled, solve_scaled))
}

/// True optimum of the near-exact objective and a packing achieving it.
pub fn exact_opt(instance: &Instance, limit: usize) -> Result<(usize, Packing)> {
    let (opt, bins) = exact_opt_in_interval(instance.sizes(), &RewardInterval::near_exact(instance), limit)?;
    let packing = Packing::new(instance, bins)?;
    debug_assert_eq!(packing.covers(), opt);
    Ok((opt, packing))
}

/// All covered subsets of `mask` that contain its lowest item, in lexicographic order.
pub fn enumerate_covering_subsets(instance: &Instance, mask: SubsetMask) -> Result<Vec<SubsetMask>> {
    let n = instance.len();
    if n > MAX_ITEMS {
        return Err(Error::TooLarge { n, limit: MAX_ITEMS });
    }
    if mask.0 & !SubsetMask::full(n).0 != 0 {
        return Err(Error::InvalidParams(format!("mask {:#b} references items beyond n = {n}", mask.0)));
    }
    let Some(low) = mask.lowest() else {
        return Ok(Vec::new());
    };
    let interval = RewardInterval::near_exact(instance);
    let out = run(
        instance.sizes(),
        &interval,
        |s| {
            let mut out = Vec::new();
            covering_from_lowest(s, mask.0, low, &mut out);
            out
        },
        |s| {
            let mut out = Vec::new();
            covering_from_lowest(s, mask.0, low, &mut out);
            out
        },
    );
    Ok(out.into_iter().map(SubsetMask).collect())
}
