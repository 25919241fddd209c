//! Instance generators: seeded random families and the partition-based
//! hardness family whose optimum is either `T` or `0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{ceil_int, floor_int, Rational};

/// Default lattice for random sizes: multiples of `1 / 2^20`.
pub const DEFAULT_GRID: u64 = 1 << 20;

/// Positive integers `a` summing to `2B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInput {
    pub a: Vec<u64>,
    pub b: u64,
}

impl PartitionInput {
    pub fn new(a: Vec<u64>) -> Result<Self> {
        let sum: u64 = a.iter().sum();
        if a.is_empty() || a.contains(&0) || sum % 2 != 0 {
            return Err(Error::InvalidParams(format!("partition input {a:?} must be positive with even sum")));
        }
        Ok(Self { b: sum / 2, a })
    }

    /// Brute-force: does some subset sum to `B`?
    pub fn is_yes(&self) -> bool {
        let mut reachable = vec![false; self.b as usize + 1];
        reachable[0] = true;
        for &x in &self.a {
            for t in (x as usize..=self.b as usize).rev() {
                reachable[t] |= reachable[t - x as usize];
            }
        }
        reachable[self.b as usize]
    }
}

/// A partition input replicated over `generations` scales.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub partition: PartitionInput,
    pub generations: u32,
}

/// `1 / (3B)^(T+1)`: with this delta a covered bin must total exactly 1.
pub fn reduction_delta(spec: &GenerationSpec) -> Rational {
    let base = BigInt::from(3 * spec.partition.b);
    Rational::new(BigInt::one(), num_traits::pow(base, spec.generations as usize + 1))
}

/// Generation `j` holds `a_i / (3B)^j` for every `i` plus one item `1 - B / (3B)^j`.
pub fn reduction_instance(spec: &GenerationSpec, delta: Rational) -> Result<Instance> {
    if spec.generations == 0 {
        return Err(Error::InvalidParams("at least one generation is required".into()));
    }
    let b = BigInt::from(spec.partition.b);
    let base = BigInt::from(3) * &b;
    let mut sizes = Vec::with_capacity(spec.generations as usize * (spec.partition.a.len() + 1));
    let mut scale = BigInt::one();
    for _ in 1..=spec.generations {
        scale *= &base;
        for &a in &spec.partition.a {
            sizes.push(Rational::new(BigInt::from(a), scale.clone()));
        }
        sizes.push(Rational::one() - Rational::new(b.clone(), scale.clone()));
    }
    Instance::new(delta, sizes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SizeDistribution {
    /// Uniform on the grid within `[lo, hi]`.
    Uniform {
        #[serde(with = "crate::rational::serde_rational")]
        lo: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        hi: Rational,
    },
    /// Each item picks one of two uniform ranges with equal probability.
    TwoCluster {
        #[serde(with = "crate::rational::serde_rational")]
        lo1: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        hi1: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        lo2: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        hi2: Rational,
    },
    /// Three quarters of the items uniform in `[huge_lo, 1]`, the rest in `(0, small_hi]`.
    HugeHeavy {
        #[serde(with = "crate::rational::serde_rational")]
        huge_lo: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        small_hi: Rational,
    },
}

struct GridRange {
    lo: u64,
    hi: u64,
}

fn grid_range(lo: &Rational, hi: &Rational, grid: u64) -> Result<GridRange> {
    let one = Rational::one();
    if !lo.is_positive() || hi > &one || lo > hi {
        return Err(Error::InvalidParams(format!("bounds [{lo}, {hi}] must satisfy 0 < lo <= hi <= 1")));
    }
    let g = Rational::from_integer(BigInt::from(grid));
    let lo_k = ceil_int(&(lo * &g)).max(BigInt::one());
    let hi_k = floor_int(&(hi * &g));
    if lo_k > hi_k {
        return Err(Error::InvalidParams(format!("no grid point of 1/{grid} lies in [{lo}, {hi}]")));
    }
    Ok(GridRange { lo: lo_k.to_u64().unwrap(), hi: hi_k.to_u64().unwrap() })
}

/// Deterministic for a fixed `seed`; sizes are multiples of `1 / grid`.
pub fn random_instance(
    n: usize,
    distribution: &SizeDistribution,
    delta: Rational,
    seed: u64,
    grid: u64,
) -> Result<Instance> {
    if grid == 0 {
        return Err(Error::InvalidParams("grid must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges: Vec<(GridRange, f64)> = match distribution {
        SizeDistribution::Uniform { lo, hi } => vec![(grid_range(lo, hi, grid)?, 1.0)],
        SizeDistribution::TwoCluster { lo1, hi1, lo2, hi2 } => {
            vec![(grid_range(lo1, hi1, grid)?, 0.5), (grid_range(lo2, hi2, grid)?, 1.0)]
        }
        SizeDistribution::HugeHeavy { huge_lo, small_hi } => vec![
            (grid_range(huge_lo, &Rational::one(), grid)?, 0.75),
            (grid_range(&Rational::new(BigInt::one(), BigInt::from(grid)), small_hi, grid)?, 1.0),
        ],
    };
    let sizes = (0..n)
        .map(|_| {
            let pick: f64 = rng.gen();
            let (range, _) = ranges.iter().find(|(_, cut)| pick < *cut).unwrap_or(ranges.last().unwrap());
            let k = rng.gen_range(range.lo..=range.hi);
            Rational::new(BigInt::from(k), BigInt::from(grid))
        })
        .collect();
    Instance::new(delta, sizes)
}
