//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the solver code it is compared against.

#![allow(dead_code)]

use std::collections::HashMap;

use nearcover::generators::{random_instance, SizeDistribution};
use nearcover::rational::{int, ratio};
use nearcover::{Instance, Rational};
use num_traits::{One, Signed, Zero};

pub const DELTAS: [(i64, i64); 4] = [(1, 4), (1, 2), (1, 1), (2, 1)];

/// Small deterministic instance families on a coarse grid.
pub fn suite_instance(n: usize, delta: Rational, seed: u64) -> Instance {
    let dist = match seed % 4 {
        0 => SizeDistribution::Uniform { lo: ratio(1, 50), hi: ratio(3, 4) },
        1 => SizeDistribution::Uniform { lo: ratio(1, 5), hi: int(1) },
        2 => SizeDistribution::TwoCluster { lo1: ratio(1, 100), hi1: ratio(1, 10), lo2: ratio(2, 5), hi2: ratio(4, 5) },
        _ => SizeDistribution::HugeHeavy { huge_lo: ratio(1, 4), small_hi: ratio(1, 8) },
    };
    let grid = [120, 240, 1000][(seed / 4 % 3) as usize];
    random_instance(n, &dist, delta, seed, grid).expect("suite parameters are valid")
}

fn covered(total: &Rational, lo: &Rational, hi: &Rational) -> bool {
    total >= lo && total < hi
}

/// Maximum over all set partitions, by restricted growth strings.
pub fn naive_partition_opt(sizes: &[Rational], lo: &Rational, hi: &Rational) -> usize {
    let n = sizes.len();
    if n == 0 {
        return 0;
    }
    let mut block = vec![0usize; n];
    let mut best = 0;
    loop {
        let blocks = block.iter().max().unwrap() + 1;
        let mut totals = vec![Rational::zero(); blocks];
        for (j, &b) in block.iter().enumerate() {
            totals[b] += &sizes[j];
        }
        best = best.max(totals.iter().filter(|t| covered(t, lo, hi)).count());
        // Next restricted growth string.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let prefix_max = block[..i].iter().copied().max().unwrap();
            if block[i] <= prefix_max {
                block[i] += 1;
                for b in block.iter_mut().skip(i + 1) {
                    *b = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// All count vectors `c <= counts`, lexicographic.
pub fn count_vectors(counts: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &n in counts {
        out = out.into_iter().flat_map(|v| (0..=n).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out
}

pub fn multiset_total(sizes: &[Rational], c: &[u64]) -> Rational {
    sizes.iter().zip(c).fold(Rational::zero(), |acc, (s, &k)| acc + s * Rational::from_integer(k.into()))
}

/// Optimum for a multiset of sizes, rewarding bins with total in `[lo, hi)`,
/// by memoized recursion over remaining count vectors.
pub fn multiset_opt(sizes: &[Rational], counts: &[u64], lo: &Rational, hi: &Rational) -> usize {
    let rewarding: Vec<Vec<u64>> = count_vectors(counts)
        .into_iter()
        .filter(|c| covered(&multiset_total(sizes, c), lo, hi))
        .collect();
    let mut memo = HashMap::new();
    fn go(rest: Vec<u64>, rewarding: &[Vec<u64>], memo: &mut HashMap<Vec<u64>, usize>) -> usize {
        if let Some(&v) = memo.get(&rest) {
            return v;
        }
        let mut best = 0;
        for c in rewarding {
            if c.iter().zip(&rest).all(|(a, b)| a <= b) {
                let next: Vec<u64> = rest.iter().zip(c).map(|(r, a)| r - a).collect();
                best = best.max(1 + go(next, rewarding, memo));
            }
        }
        memo.insert(rest, best);
        best
    }
    go(counts.to_vec(), &rewarding, &mut memo)
}

/// Maximum of `c x` over `A x <= b, x >= 0` by enumerating vertices.
/// Assumes a bounded feasible region.
pub fn vertex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let (m, n) = (a.len(), c.len());
    // Constraint k < m is row k tight; k >= m is x_{k-m} = 0.
    let rows: Vec<(Vec<Rational>, Rational)> = (0..m + n)
        .map(|k| {
            if k < m {
                (a[k].clone(), b[k].clone())
            } else {
                let mut e = vec![Rational::zero(); n];
                e[k - m] = Rational::one();
                (e, Rational::zero())
            }
        })
        .collect();
    let mut best: Option<Rational> = None;
    for pick in subsets(m + n, n) {
        let sys: Vec<(Vec<Rational>, Rational)> = pick.iter().map(|&k| rows[k].clone()).collect();
        let Some(x) = solve_square(sys) else { continue };
        if x.iter().any(Signed::is_negative) {
            continue;
        }
        let feasible = (0..m).all(|i| a[i].iter().zip(&x).fold(Rational::zero(), |acc, (p, q)| acc + p * q) <= b[i]);
        if feasible {
            let v = c.iter().zip(&x).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
            if best.as_ref().map_or(true, |b| v > *b) {
                best = Some(v);
            }
        }
    }
    best
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1).into_iter().map(|mut s| {
        s.push(n - 1);
        s
    }).collect();
    with.extend(subsets(n - 1, k));
    with
}

fn solve_square(mut sys: Vec<(Vec<Rational>, Rational)>) -> Option<Vec<Rational>> {
    let n = sys.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !sys[r].0[col].is_zero())?;
        sys.swap(col, p);
        let (pr, pb) = sys[col].clone();
        for r in 0..n {
            if r != col && !sys[r].0[col].is_zero() {
                let f = &sys[r].0[col] / &pr[col];
                for k in 0..n {
                    let d = &f * &pr[k];
                    sys[r].0[k] -= d;
                }
                sys[r].1 -= &f * &pb;
            }
        }
    }
    Some((0..n).map(|i| &sys[i].1 / &sys[i].0[i]).collect())
}

/// Unit-reward configurations of the sand master: sandless with total in
/// `[1, 1 + 3d)`, or with total below 1 topped up by sand.
pub struct MasterConfig {
    pub counts: Vec<u64>,
    pub sand: Rational,
}

pub fn master_configs(sizes: &[Rational], counts: &[u64], delta_small: &Rational) -> Vec<MasterConfig> {
    let one = Rational::one();
    let hi = &one + delta_small * int(3);
    let mut out = Vec::new();
    for c in count_vectors(counts) {
        let t = multiset_total(sizes, &c);
        if t >= one && t < hi {
            out.push(MasterConfig { counts: c, sand: Rational::zero() });
        } else if t < one {
            out.push(MasterConfig { sand: &one - &t, counts: c });
        }
    }
    out
}
