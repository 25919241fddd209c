//! Approximate separation for the dual of the sand configuration LP.
//!
//! Dual values are rounded up to multiples of `eps / N` and sizes to
//! multiples of `delta_small / N`, which turns each family of pricing
//! problems into a two-constraint bounded knapsack. One table-filling pass
//! per family answers every `(value, modified size)` cell at once.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::classify::SchemeParams;
use crate::error::{Error, Result};
use crate::lp::Column;
use crate::rational::{ceil_int, common_denominator, floor_int, Rational};

/// Default limit on table cells per family.
pub const DEFAULT_MAX_CELLS: usize = 40_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPoint {
    pub y: Vec<Rational>,
    pub z1: Rational,
    pub z2: Rational,
}

impl DualPoint {
    /// Splits master duals laid out as size rows, then the sand row, then the count row.
    pub fn from_master(duals: &[Rational]) -> Self {
        let k = duals.len() - 2;
        Self { y: duals[..k].to_vec(), z1: duals[k].clone(), z2: duals[k + 1].clone() }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self {
            y: self.y.iter().map(|v| v * factor).collect(),
            z1: &self.z1 * factor,
            z2: &self.z2 * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Sandless, modified sizes rounded up, maximize the true size.
    Ip1,
    /// Sandless, modified sizes rounded down, minimize the true size.
    Ip2,
    /// Sand-bearing, modified sizes rounded down, maximize the true size.
    Ip3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

/// A bounded two-constraint knapsack over integer unit weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridIp {
    pub value_units: Vec<u64>,
    pub size_units: Vec<u64>,
    pub sizes: Vec<Rational>,
    pub counts: Vec<u64>,
    /// Inclusive upper ends of the two axes.
    pub value_cap: u64,
    pub size_cap: u64,
    pub objective: Objective,
}

/// Optimum true size for every cell, with witnesses.
#[derive(Debug, Clone)]
pub struct SweepTable {
    width: usize,
    cells: Vec<u128>,
    denominator: BigInt,
    pieces: Vec<(usize, u64, usize)>,
    taken: Vec<Vec<u64>>,
}

const UNREACHED: u128 = u128::MAX;

impl SweepTable {
    fn index(&self, value: u64, size: u64) -> Option<usize> {
        let (v, s) = (value as usize, size as usize);
        (s < self.width && v < self.cells.len() / self.width).then(|| v * self.width + s)
    }

    /// Optimum of the cell, or `None` when no configuration hits it exactly.
    pub fn value(&self, value: u64, size: u64) -> Option<Rational> {
        let i = self.index(value, size)?;
        (self.cells[i] != UNREACHED).then(|| Rational::new(BigInt::from(self.cells[i]), self.denominator.clone()))
    }

    /// Counts per item type of an optimal configuration for the cell.
    pub fn witness(&self, value: u64, size: u64, types: usize) -> Option<Vec<u64>> {
        let mut x = self.index(value, size)?;
        if self.cells[x] == UNREACHED {
            return None;
        }
        let mut counts = vec![0u64; types];
        for (p, &(item, mult, offset)) in self.pieces.iter().enumerate().rev() {
            if self.taken[p][x / 64] >> (x % 64) & 1 == 1 {
                counts[item] += mult;
                x -= offset;
            }
        }
        debug_assert_eq!(x, 0);
        Some(counts)
    }

    fn raw(&self, value: u64, size: u64) -> Option<u128> {
        let i = self.index(value, size)?;
        (self.cells[i] != UNREACHED).then_some(self.cells[i])
    }
}

/// Fills the whole `(value, size)` table in one bounded-knapsack pass with
/// binary-split multiplicities. Cells hold equality-constrained optima.
pub fn sweep_dp(grid: &GridIp) -> Result<SweepTable> {
    sweep_dp_capped(grid, DEFAULT_MAX_CELLS)
}

pub fn sweep_dp_capped(grid: &GridIp, max_cells: usize) -> Result<SweepTable> {
    let types = grid.sizes.len();
    if grid.value_units.len() != types || grid.size_units.len() != types || grid.counts.len() != types {
        return Err(Error::InvalidParams("grid vectors must have one entry per item type".into()));
    }
    let width = grid.size_cap as usize + 1;
    let height = grid.value_cap as usize + 1;
    let total_cells = width.checked_mul(height).filter(|&c| c <= max_cells).ok_or_else(|| {
        Error::GridOverflow(format!("{height} x {width} cells exceed the limit of {max_cells}"))
    })?;

    let denominator = common_denominator(grid.sizes.iter());
    let mut scaled = Vec::with_capacity(types);
    let mut bound = BigInt::zero();
    for (s, &n) in grid.sizes.iter().zip(&grid.counts) {
        let v = s.numer() * (&denominator / s.denom());
        bound += &v * BigInt::from(n);
        scaled.push(v);
    }
    if bound.to_u128().map_or(true, |b| b >= UNREACHED) {
        return Err(Error::GridOverflow("total size does not fit the table's integer range".into()));
    }
    let scaled: Vec<u128> = scaled.iter().map(|v| v.to_u128().unwrap()).collect();

    let mut cells = vec![UNREACHED; total_cells];
    cells[0] = 0;
    let words = total_cells.div_ceil(64);
    let mut pieces = Vec::new();
    let mut taken = Vec::new();
    let maximize = grid.objective == Objective::Max;

    for item in 0..types {
        let mut left = grid.counts[item];
        let mut mult = 1u64;
        while left > 0 {
            let k = mult.min(left);
            left -= k;
            mult *= 2;
            let wv = grid.value_units[item].checked_mul(k);
            let ws = grid.size_units[item].checked_mul(k);
            let (Some(wv), Some(ws)) = (wv, ws) else { continue };
            if wv > grid.value_cap || ws > grid.size_cap {
                continue;
            }
            let (wv, ws) = (wv as usize, ws as usize);
            let add = scaled[item] * u128::from(k);
            let offset = wv * width + ws;
            let mut bits = vec![0u64; words];
            if offset == 0 {
                // Zero weight on both axes: taking it is free, so only the objective decides.
                if maximize && add > 0 {
                    for (x, c) in cells.iter_mut().enumerate() {
                        if *c != UNREACHED {
                            *c += add;
                            bits[x / 64] |= 1 << (x % 64);
                        }
                    }
                }
            } else {
                for v in (wv..height).rev() {
                    let row = v * width;
                    let src_row = (v - wv) * width;
                    for s in (ws..width).rev() {
                        let from = cells[src_row + s - ws];
                        if from == UNREACHED {
                            continue;
                        }
                        let cand = from + add;
                        let x = row + s;
                        let cur = cells[x];
                        let better = cur == UNREACHED || if maximize { cand > cur } else { cand < cur };
                        if better {
                            cells[x] = cand;
                            bits[x / 64] |= 1 << (x % 64);
                        }
                    }
                }
            }
            pieces.push((item, k, offset));
            taken.push(bits);
        }
    }
    Ok(SweepTable { width, cells, denominator, pieces, taken })
}

/// A dual constraint that fails at the rounded duals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub family: Family,
    pub counts: Vec<u64>,
    /// Space for sand; zero for sandless configurations.
    #[serde(with = "crate::rational::serde_rational")]
    pub sand: Rational,
    /// True (rounded-instance) size of the items.
    #[serde(with = "crate::rational::serde_rational")]
    pub size: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OracleVerdict {
    /// `(1 + eps)` times the duals is feasible for every configuration constraint.
    Certified,
    Violated(Violation),
    /// A dual variable is negative; index as in the master row layout.
    NegativeDual(usize),
}

fn saturate(v: &BigInt) -> u128 {
    if v.is_negative() {
        0
    } else {
        v.to_u128().unwrap_or(u128::MAX)
    }
}

/// Grid resolution `N = ceil((1 + eps) * sum(counts))`, at least 1.
pub fn grid_resolution(counts: &[u64], eps: &Rational) -> u64 {
    let items: u64 = counts.iter().sum();
    let n = ceil_int(&((Rational::one() + eps) * Rational::from_integer(items.into())));
    n.to_u64().expect("grid resolution fits u64").max(1)
}

/// Exact left-hand side of a configuration's dual constraint.
pub fn constraint_value(duals: &DualPoint, counts: &[u64], sand: &Rational) -> Rational {
    let mut v = counts.iter().zip(&duals.y).fold(Rational::zero(), |acc, (&c, y)| acc + y * Rational::from_integer(c.into()));
    if sand.is_positive() {
        v += sand * &duals.z1 + &duals.z2;
    }
    v
}

/// The rounded-instance sizes `sizes` with multiplicities `counts` against `duals`.
pub fn separate(duals: &DualPoint, sizes: &[Rational], counts: &[u64], params: &SchemeParams) -> Result<OracleVerdict> {
    let k = sizes.len();
    if duals.y.len() != k {
        return Err(Error::InvalidParams(format!("{} dual values for {k} sizes", duals.y.len())));
    }
    if let Some(i) = duals.y.iter().position(|v| v.is_negative()) {
        return Ok(OracleVerdict::NegativeDual(i));
    }
    if duals.z1.is_negative() {
        return Ok(OracleVerdict::NegativeDual(k));
    }
    if duals.z2.is_negative() {
        return Ok(OracleVerdict::NegativeDual(k + 1));
    }

    let one = Rational::one();
    let n = grid_resolution(counts, &params.eps);
    let inv_eps = params.inv_eps();
    let inv_delta = params.inv_delta_small();
    let n_r = Rational::from_integer(n.into());
    let value_scale = &n_r * Rational::from_integer(inv_eps.into());
    let size_scale = &n_r * Rational::from_integer(inv_delta.into());
    // Only cells of value below 1 can carry a violated constraint.
    let value_cap = n * inv_eps - 1;
    let clamp = |v: BigInt| v.to_u64().unwrap_or(u64::MAX);
    let value_units: Vec<u64> = duals.y.iter().map(|y| clamp(ceil_int(&(y * &value_scale)))).collect();
    let up: Vec<u64> = sizes.iter().map(|s| clamp(ceil_int(&(s * &size_scale)))).collect();
    let down: Vec<u64> = sizes.iter().map(|s| clamp(floor_int(&(s * &size_scale)))).collect();
    let good_hi = &one + &params.delta_small * Rational::from_integer(3.into());

    let families = [
        // Witnesses of modified size 1 + 4 delta or more are too large to be accepted.
        (Family::Ip1, Objective::Max, up, n * (inv_delta + 4)),
        (Family::Ip2, Objective::Min, down.clone(), n * (inv_delta + 3)),
        (Family::Ip3, Objective::Max, down, n * inv_delta),
    ];
    for (family, objective, size_units, size_cap) in families {
        let grid = GridIp {
            value_units: value_units.clone(),
            size_units,
            sizes: sizes.to_vec(),
            counts: counts.to_vec(),
            value_cap,
            size_cap,
            objective,
        };
        let table = sweep_dp(&grid)?;
        let den = Rational::from_integer(table.denominator.clone());
        let one_raw = saturate(&table.denominator);
        let hi_raw = saturate(&ceil_int(&(&good_hi * &den)));
        for iota in 0..=value_cap {
            // Sand-bearing cells of this row are violated from `lo_raw` upwards.
            let lo_raw = match family {
                Family::Ip3 => {
                    let room = &one - &duals.z2 - Rational::new(iota.into(), value_scale.to_integer());
                    if !room.is_positive() {
                        None
                    } else if duals.z1.is_zero() {
                        Some(0)
                    } else {
                        let t = &den * (&one - &room / &duals.z1);
                        Some(saturate(&(floor_int(&t) + 1)))
                    }
                }
                _ => None,
            };
            for iota_s in 0..=size_cap {
                let Some(raw) = table.raw(iota, iota_s) else { continue };
                let sand = if raw >= one_raw {
                    if raw >= hi_raw {
                        continue;
                    }
                    Rational::zero()
                } else {
                    match lo_raw {
                        Some(lo) if raw >= lo => &one - Rational::from_integer(BigInt::from(raw)) / &den,
                        _ => continue,
                    }
                };
                let size = Rational::from_integer(BigInt::from(raw)) / &den;
                let counts = table.witness(iota, iota_s, k).expect("reached cell has a witness");
                return Ok(OracleVerdict::Violated(Violation { family, counts, sand, size }));
            }
        }
    }
    Ok(OracleVerdict::Certified)
}

/// Master column for a configuration: reward 1, counts on the size rows,
/// sand on row `k`, and a unit on the sand-bin row `k + 1` when sand is positive.
pub fn config_column(counts: &[u64], sand: &Rational) -> Column {
    let k = counts.len();
    let mut entries: Vec<(usize, Rational)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, Rational::from_integer(c.into())))
        .collect();
    if sand.is_positive() {
        entries.push((k, sand.clone()));
        entries.push((k + 1, Rational::one()));
    }
    Column::new(Rational::one(), entries)
}

/// Pricing adapter for column generation.
pub fn price(duals: &[Rational], sizes: &[Rational], counts: &[u64], params: &SchemeParams) -> Result<Option<Column>> {
    match separate(&DualPoint::from_master(duals), sizes, counts, params)? {
        OracleVerdict::Certified => Ok(None),
        OracleVerdict::Violated(v) => Ok(Some(config_column(&v.counts, &v.sand))),
        OracleVerdict::NegativeDual(i) => Err(Error::Lp(format!("master dual {i} is negative"))),
    }
}
