//! Scheme preliminaries: the granularity `delta_small`, huge-item classes,
//! certificate vectors and their enumeration, the input split, and the
//! niceness checker.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Packing};
use crate::rational::{ceil_int, floor_int, int, ratio, reciprocal_integer, Rational};

/// Default accuracy parameter.
pub fn default_eps() -> Rational {
    ratio(1, 12)
}

/// `1 / max(4, ceil(4 / delta))`: the largest unit fraction at most `delta / 4`, capped at `1/4`.
pub fn compute_delta_small(delta: &Rational) -> Rational {
    assert!(delta.is_positive(), "delta must be positive");
    let k = ceil_int(&(int(4) / delta)).max(BigInt::from(4));
    Rational::new(BigInt::one(), k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    #[serde(with = "crate::rational::serde_rational")]
    pub eps: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub delta_small: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub delta: Rational,
    /// Replaces the group count `1/(eps^2 delta_small)`; for exercising rounding in tests.
    pub group_count_override: Option<u64>,
    /// Set when `eps > 1/12` was explicitly allowed.
    pub unsound_constants: bool,
}

impl SchemeParams {
    pub fn new(delta: Rational, eps: Rational) -> Result<Self> {
        Self::build(delta, eps, false)
    }

    /// Like [`SchemeParams::new`] but accepts `eps > 1/12`.
    pub fn with_unsound_constants(delta: Rational, eps: Rational) -> Result<Self> {
        Self::build(delta, eps, true)
    }

    fn build(delta: Rational, eps: Rational, allow_unsound: bool) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
        }
        if reciprocal_integer(&eps).is_none() {
            return Err(Error::InvalidParams(format!("1/eps must be a positive integer, got eps = {eps}")));
        }
        let unsound = eps > default_eps();
        if unsound && !allow_unsound {
            return Err(Error::InvalidParams(format!("eps = {eps} exceeds 1/12; allow unsound constants to proceed")));
        }
        Ok(Self {
            delta_small: compute_delta_small(&delta),
            delta,
            eps,
            group_count_override: None,
            unsound_constants: unsound,
        })
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::new(instance.delta().clone(), default_eps()).expect("default parameters are valid")
    }

    pub fn with_group_count(mut self, groups: u64) -> Self {
        assert!(groups > 0, "group count must be positive");
        self.group_count_override = Some(groups);
        self
    }

    pub fn inv_eps(&self) -> u64 {
        reciprocal_integer(&self.eps).unwrap()
    }

    pub fn inv_delta_small(&self) -> u64 {
        reciprocal_integer(&self.delta_small).unwrap()
    }

    /// Number of linear-grouping subsets per class, `1/(eps^2 delta_small)` unless overridden.
    pub fn group_count(&self) -> u64 {
        self.group_count_override.unwrap_or_else(|| self.inv_eps().pow(2) * self.inv_delta_small())
    }

    /// Whether the run uses the constants under which the guarantees are stated.
    pub fn is_certifiable(&self) -> bool {
        !self.unsound_constants && self.group_count_override.is_none()
    }

    pub fn class_width(&self) -> Rational {
        self.delta_small.pow(3)
    }

    /// Largest class index, `1/delta^3 - 1/delta^2`.
    pub fn top_class(&self) -> u64 {
        let k = self.inv_delta_small();
        k.pow(3) - k.pow(2)
    }

    /// Class of a huge item, or `None` for a non-huge one.
    pub fn class_of(&self, size: &Rational) -> Option<ClassIndex> {
        if size < &self.delta_small {
            return None;
        }
        let psi = floor_int(&((size - &self.delta_small) / self.class_width()));
        Some(ClassIndex(psi.to_u64().expect("class index fits u64")))
    }

    /// Lower end `delta + psi * delta^3` of a class.
    pub fn class_lower(&self, psi: ClassIndex) -> Rational {
        &self.delta_small + Rational::from_integer(BigInt::from(psi.0)) * self.class_width()
    }
}

/// Index `psi` of a class of huge items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassIndex(pub u64);

/// Huge items bucketed by class (each sorted by non-decreasing size, ties by
/// decreasing index), plus the non-huge items in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub classes: BTreeMap<ClassIndex, Vec<usize>>,
    pub non_huge: Vec<usize>,
}

impl Classification {
    pub fn class_size(&self, psi: ClassIndex) -> usize {
        self.classes.get(&psi).map_or(0, Vec::len)
    }

    /// Class of each huge item.
    pub fn class_lookup(&self) -> BTreeMap<usize, ClassIndex> {
        self.classes.iter().flat_map(|(&psi, items)| items.iter().map(move |&j| (j, psi))).collect()
    }
}

/// Sorts items by non-decreasing size, breaking ties by decreasing index.
pub fn sort_class(instance: &Instance, items: &mut [usize]) {
    items.sort_by(|&a, &b| instance.size(a).cmp(instance.size(b)).then(b.cmp(&a)));
}

pub fn classify(instance: &Instance, params: &SchemeParams) -> Classification {
    let mut classes: BTreeMap<ClassIndex, Vec<usize>> = BTreeMap::new();
    let mut non_huge = Vec::new();
    for (j, s) in instance.sizes().iter().enumerate() {
        match params.class_of(s) {
            Some(psi) => classes.entry(psi).or_default().push(j),
            None => non_huge.push(j),
        }
    }
    for items in classes.values_mut() {
        sort_class(instance, items);
    }
    Classification { classes, non_huge }
}

/// Distinct values of `floor((1 + eps delta^3)^t)` over integer `t`, restricted to `[0, cap]`.
pub fn certificate_value_set(params: &SchemeParams, cap: u64) -> Vec<u64> {
    let step = &params.eps * params.class_width();
    // While r^t < 1/(r-1) consecutive powers differ by less than one, so every
    // integer up to floor(1/(r-1)) is hit.
    let dense = floor_int(&step.recip()).to_u64().unwrap_or(u64::MAX);
    if cap <= dense {
        return (0..=cap).collect();
    }
    let mut values: Vec<u64> = (0..=dense).collect();
    let r = Rational::one() + &step;
    let estimate = ((dense as f64).ln() / (1.0 + crate::rational::to_f64(&step)).ln()).floor() as i64;
    let mut t = estimate.max(0) as usize;
    let dense_q = Rational::from_integer(BigInt::from(dense));
    let mut power = num_traits::pow(r.clone(), t);
    while t > 0 && power > dense_q {
        t -= 1;
        power = num_traits::pow(r.clone(), t);
    }
    loop {
        let v = floor_int(&power).to_u64().unwrap_or(u64::MAX);
        if v > cap {
            break;
        }
        if v > *values.last().unwrap() {
            values.push(v);
        }
        power *= &r;
    }
    values
}

/// Guessed counts for one class: `v` items for type-1 bins, `u` for type-2 bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct CertificatePair {
    pub v: u64,
    pub u: u64,
}

/// Per-class `(v, u)` pairs; classes not listed are `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct CertificateVector {
    pub entries: BTreeMap<ClassIndex, CertificatePair>,
}

impl CertificateVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, psi: ClassIndex) -> CertificatePair {
        self.entries.get(&psi).copied().unwrap_or_default()
    }

    /// Sets a pair, dropping it when it is `(0, 0)`.
    pub fn set(&mut self, psi: ClassIndex, pair: CertificatePair) {
        if pair == CertificatePair::default() {
            self.entries.remove(&psi);
        } else {
            self.entries.insert(psi, pair);
        }
    }

    pub fn total_v(&self) -> u64 {
        self.entries.values().map(|p| p.v).sum()
    }

    /// Checks capacity and value-set membership against `classes`.
    pub fn validate(&self, classes: &Classification, params: &SchemeParams) -> Result<()> {
        for (&psi, pair) in &self.entries {
            let size = classes.class_size(psi) as u64;
            if pair.u + pair.v > size {
                return Err(Error::InvalidCertificate(format!(
                    "class {}: u + v = {} exceeds class size {size}",
                    psi.0,
                    pair.u + pair.v
                )));
            }
            let values = certificate_value_set(params, size);
            for x in [pair.u, pair.v] {
                if values.binary_search(&x).is_err() {
                    return Err(Error::InvalidCertificate(format!("class {}: {x} is not in the value set", psi.0)));
                }
            }
        }
        Ok(())
    }
}

fn pairs_for(values: &[u64], size: u64) -> Vec<CertificatePair> {
    let mut out = Vec::new();
    for &v in values {
        for &u in values {
            if u + v <= size {
                out.push(CertificatePair { v, u });
            }
        }
    }
    out
}

/// Lazily yields every certificate vector, odometer-style over the nonempty classes.
#[derive(Debug, Clone)]
pub struct CertificateEnumeration {
    classes: Vec<ClassIndex>,
    choices: Vec<Vec<CertificatePair>>,
    cursor: Option<Vec<usize>>,
    total: u128,
}

impl CertificateEnumeration {
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl Iterator for CertificateEnumeration {
    type Item = CertificateVector;

    fn next(&mut self) -> Option<CertificateVector> {
        let cursor = self.cursor.as_mut()?;
        let mut cert = CertificateVector::zero();
        for (k, &psi) in self.classes.iter().enumerate() {
            cert.set(psi, self.choices[k][cursor[k]]);
        }
        let mut k = 0;
        loop {
            if k == cursor.len() {
                self.cursor = None;
                break;
            }
            cursor[k] += 1;
            if cursor[k] < self.choices[k].len() {
                break;
            }
            cursor[k] = 0;
            k += 1;
        }
        Some(cert)
    }
}

/// Every valid certificate vector, or `BudgetExceeded` when there are more than `budget`.
pub fn enumerate_certificates(
    classes: &Classification,
    params: &SchemeParams,
    budget: u128,
) -> Result<CertificateEnumeration> {
    let mut ids = Vec::new();
    let mut choices = Vec::new();
    let mut total: u128 = 1;
    for (&psi, items) in &classes.classes {
        let size = items.len() as u64;
        let pairs = pairs_for(&certificate_value_set(params, size), size);
        total = total.saturating_mul(pairs.len() as u128);
        ids.push(psi);
        choices.push(pairs);
    }
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let cursor = Some(vec![0; ids.len()]);
    Ok(CertificateEnumeration { classes: ids, choices, cursor, total })
}

/// `i1`: per class the last `v` items; `i2`: every non-huge item plus per class the first `u`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputSplit {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
}

impl InputSplit {
    /// Items in neither part, which go to dedicated bins.
    pub fn unused(&self, n: usize) -> Vec<usize> {
        let used: BTreeSet<usize> = self.i1.iter().chain(&self.i2).copied().collect();
        (0..n).filter(|j| !used.contains(j)).collect()
    }
}

pub fn split_input(
    classes: &Classification,
    params: &SchemeParams,
    cert: &CertificateVector,
) -> Result<InputSplit> {
    cert.validate(classes, params)?;
    let mut split = InputSplit { i1: Vec::new(), i2: classes.non_huge.clone() };
    for (psi, items) in &classes.classes {
        let pair = cert.get(*psi);
        split.i2.extend_from_slice(&items[..pair.u as usize]);
        split.i1.extend_from_slice(&items[items.len() - pair.v as usize..]);
    }
    split.i1.sort_unstable();
    split.i2.sort_unstable();
    Ok(split)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinType {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// Outcome of one niceness property; `offending` holds bin indices for
/// properties 1 to 3 and class indices for 4 and 5.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PropertyCheck {
    pub passed: bool,
    pub offending: Vec<u64>,
}

impl PropertyCheck {
    fn from_offending(mut offending: Vec<u64>) -> Self {
        offending.sort_unstable();
        offending.dedup();
        Self { passed: offending.is_empty(), offending }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceReport {
    /// Properties 1 through 5, in order.
    pub properties: [PropertyCheck; 5],
    /// Labelled bins that are not covered, and covered bins without a label.
    pub labelling: PropertyCheck,
}

impl NiceReport {
    pub fn is_nice(&self) -> bool {
        self.properties.iter().all(|p| p.passed) && self.labelling.passed
    }
}

/// Checks the five niceness properties of `packing` under `cert` and the bin labels `types`.
pub fn check_nice(
    instance: &Instance,
    params: &SchemeParams,
    packing: &Packing,
    cert: &CertificateVector,
    types: &BTreeMap<usize, BinType>,
) -> NiceReport {
    let classes = classify(instance, params);
    let lookup = classes.class_lookup();
    let one = Rational::one();
    let d = &params.delta_small;
    let upper = instance.upper();
    let type1_lo = &one + d;
    let type2_hi = &one + d * int(3);

    // Position of each huge item within its class order.
    let mut position: BTreeMap<usize, usize> = BTreeMap::new();
    for items in classes.classes.values() {
        for (k, &j) in items.iter().enumerate() {
            position.insert(j, k);
        }
    }

    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut p3 = Vec::new();
    let mut labelling = Vec::new();
    let mut in_type: BTreeMap<(ClassIndex, BinType), u64> = BTreeMap::new();

    for (b, bin) in packing.bins().iter().enumerate() {
        let total = instance.total(bin);
        let covered = instance.is_covered_total(&total);
        let Some(&kind) = types.get(&b) else {
            if covered {
                labelling.push(b as u64);
            }
            continue;
        };
        if !covered {
            labelling.push(b as u64);
        }
        let total_ok = match kind {
            BinType::One => total >= type1_lo && total < upper,
            BinType::Two => total >= one && total <= type2_hi,
        };
        if !total_ok {
            p1.push(b as u64);
        }
        for &j in bin {
            match lookup.get(&j) {
                None => {
                    if kind == BinType::One {
                        p2.push(b as u64);
                    }
                }
                Some(&psi) => {
                    *in_type.entry((psi, kind)).or_default() += 1;
                    let size = classes.class_size(psi);
                    let pair = cert.get(psi);
                    let k = position[&j];
                    let allowed = match kind {
                        BinType::One => k >= size - pair.v.min(size as u64) as usize,
                        BinType::Two => (k as u64) < pair.u,
                    };
                    if !allowed {
                        p3.push(b as u64);
                    }
                }
            }
        }
    }

    let mut p4 = Vec::new();
    let mut p5 = Vec::new();
    for (&psi, pair) in &cert.entries {
        let size = classes.class_size(psi) as u64;
        let values = certificate_value_set(params, pair.u.max(pair.v).max(size));
        if pair.u + pair.v > size || values.binary_search(&pair.u).is_err() || values.binary_search(&pair.v).is_err() {
            p4.push(psi.0);
        }
        let got1 = in_type.get(&(psi, BinType::One)).copied().unwrap_or(0);
        let got2 = in_type.get(&(psi, BinType::Two)).copied().unwrap_or(0);
        if 2 * got1 < pair.v || 2 * got2 < pair.u {
            p5.push(psi.0);
        }
    }

    NiceReport {
        properties: [
            PropertyCheck::from_offending(p1),
            PropertyCheck::from_offending(p2),
            PropertyCheck::from_offending(p3),
            PropertyCheck::from_offending(p4),
            PropertyCheck::from_offending(p5),
        ],
        labelling: PropertyCheck::from_offending(labelling),
    }
}

/// Largest value-set element that is at most `x`.
fn round_down_to_values(params: &SchemeParams, x: u64) -> u64 {
    *certificate_value_set(params, x).last().unwrap()
}

/// Certificate read off a witness packing: strip non-huge items from covered
/// bins at or above `1 + delta_small`, label bins at or above `1 + 2 delta_small`
/// type 1 and the rest type 2, count class members per type, and round the
/// counts down to the value set.
pub fn derive_certificate(
    instance: &Instance,
    params: &SchemeParams,
    classes: &Classification,
    packing: &Packing,
) -> (CertificateVector, BTreeMap<usize, BinType>) {
    let lookup = classes.class_lookup();
    let one = Rational::one();
    let strip_at = &one + &params.delta_small;
    let type1_at = &one + &params.delta_small * int(2);
    let mut counts: BTreeMap<ClassIndex, (u64, u64)> = BTreeMap::new();
    let mut types = BTreeMap::new();
    for (b, bin) in packing.bins().iter().enumerate() {
        let mut total = instance.total(bin);
        if !instance.is_covered_total(&total) {
            continue;
        }
        let mut non_huge: Vec<usize> = bin.iter().copied().filter(|j| !lookup.contains_key(j)).collect();
        while total >= strip_at {
            match non_huge.pop() {
                Some(j) => total -= instance.size(j),
                None => break,
            }
        }
        let kind = if total >= type1_at && non_huge.is_empty() { BinType::One } else { BinType::Two };
        types.insert(b, kind);
        for j in bin {
            if let Some(&psi) = lookup.get(j) {
                let e = counts.entry(psi).or_default();
                match kind {
                    BinType::One => e.0 += 1,
                    BinType::Two => e.1 += 1,
                }
            }
        }
    }
    let mut cert = CertificateVector::zero();
    for (psi, (v, u)) in counts {
        cert.set(psi, CertificatePair { v: round_down_to_values(params, v), u: round_down_to_values(params, u) });
    }
    (cert, types)
}

/// Number of `(v, u)` pairs with both values in `values` and `v + u <= size`.
pub fn pair_count(values: &[u64], size: u64) -> usize {
    pairs_for(values, size).len()
}
