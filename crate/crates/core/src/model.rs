//! Problem instances, packings, and the near-exact cover objective.
//!
//! A bin is *near-exact covered* when the exact total size `S` of its items
//! satisfies `1 <= S < 1 + delta`. The objective of a packing is the number
//! of such bins. Empty bins are allowed and never count.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_rational, Rational};

/// `delta` plus one exact size per item, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    delta: Rational,
    sizes: Vec<Rational>,
}

impl Instance {
    pub fn new(delta: Rational, sizes: Vec<Rational>) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidInstance(format!("delta must be positive, got {delta}")));
        }
        for (j, s) in sizes.iter().enumerate() {
            if !s.is_positive() || *s > Rational::one() {
                return Err(Error::InvalidInstance(format!("size of item {j} is {s}, outside (0, 1]")));
            }
        }
        Ok(Self { delta, sizes })
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn size(&self, item: usize) -> &Rational {
        &self.sizes[item]
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Same items under a different `delta`.
    pub fn with_delta(&self, delta: Rational) -> Result<Self> {
        Self::new(delta, self.sizes.clone())
    }

    /// Upper end of the covered interval, `1 + delta` (exclusive).
    pub fn upper(&self) -> Rational {
        Rational::one() + &self.delta
    }

    pub fn total(&self, items: &[usize]) -> Rational {
        items.iter().fold(Rational::zero(), |acc, &j| acc + &self.sizes[j])
    }

    pub fn is_covered_total(&self, total: &Rational) -> bool {
        is_in_interval(total, &Rational::one(), &self.upper())
    }
}

/// `lo <= value < hi`.
pub fn is_in_interval(value: &Rational, lo: &Rational, hi: &Rational) -> bool {
    value >= lo && value < hi
}

/// A partition of the item indices into bins, with its cover count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    bins: Vec<Vec<usize>>,
    covers: usize,
}

impl Packing {
    /// Validates that `bins` partition the items of `instance` and evaluates them.
    pub fn new(instance: &Instance, bins: Vec<Vec<usize>>) -> Result<Self> {
        let covers = evaluate_bins(instance, &bins)?;
        Ok(Self { bins, covers })
    }

    /// Every item in its own bin.
    pub fn singletons(instance: &Instance) -> Self {
        let bins: Vec<Vec<usize>> = (0..instance.len()).map(|j| vec![j]).collect();
        let covers = bins.iter().filter(|b| instance.is_covered_total(&instance.total(b))).count();
        Self { bins, covers }
    }

    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    pub fn covers(&self) -> usize {
        self.covers
    }

    pub fn into_bins(self) -> Vec<Vec<usize>> {
        self.bins
    }

    /// Indices of the covered bins.
    pub fn covered_bins(&self, instance: &Instance) -> Vec<usize> {
        self.bins
            .iter()
            .enumerate()
            .filter(|(_, b)| instance.is_covered_total(&instance.total(b)))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Checks that every index in `0..n` appears in exactly one bin.
pub fn check_partition(n: usize, bins: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for bin in bins {
        for &j in bin {
            if j >= n {
                return Err(Error::InvalidPacking(format!("item index {j} out of range (n = {n})")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPacking(format!("item {j} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPacking(format!("item {missing} is not packed")));
    }
    Ok(())
}

fn evaluate_bins(instance: &Instance, bins: &[Vec<usize>]) -> Result<usize> {
    check_partition(instance.len(), bins)?;
    Ok(bins.iter().filter(|b| instance.is_covered_total(&instance.total(b))).count())
}

/// Number of near-exact covered bins, recomputed from scratch.
pub fn evaluate(instance: &Instance, packing: &Packing) -> Result<usize> {
    evaluate_bins(instance, packing.bins())
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(with = "serde_rational")]
    delta: Rational,
    #[serde(with = "serde_rational::vec")]
    sizes: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PackingDoc {
    bins: Vec<Vec<usize>>,
}

pub fn read_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Instance::new(doc.delta, doc.sizes)
}

pub fn write_instance(instance: &Instance) -> String {
    let doc = InstanceDoc { delta: instance.delta.clone(), sizes: instance.sizes.clone() };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

/// Reads a packing document and validates it against `instance`.
pub fn read_packing(text: &str, instance: &Instance) -> Result<Packing> {
    let doc: PackingDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Packing::new(instance, doc.bins)
}

pub fn write_packing(packing: &Packing) -> String {
    serde_json::to_string(&PackingDoc { bins: packing.bins.clone() }).expect("packing serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, parse_rational, ratio};

    fn inst(delta: Rational, sizes: &[&str]) -> Instance {
        Instance::new(delta, sizes.iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn upper_end_is_open() {
        let i = inst(ratio(1, 2), &["1", "1/2"]);
        let p = Packing::new(&i, vec![vec![0, 1]]).unwrap();
        assert_eq!(evaluate(&i, &p).unwrap(), 0);
    }

    #[test]
    fn lower_end_is_closed() {
        let i = inst(ratio(1, 2), &["1/2", "1/2"]);
        let p = Packing::new(&i, vec![vec![0, 1]]).unwrap();
        assert_eq!(evaluate(&i, &p).unwrap(), 1);
    }

    #[test]
    fn two_covered_bins() {
        let i = inst(int(1), &["0.6", "0.5", "0.9", "0.2"]);
        let p = Packing::new(&i, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(p.covers(), 2);
        assert_eq!(p.covered_bins(&i), vec![0, 1]);
    }

    #[test]
    fn empty_bins_are_ignored() {
        let i = inst(int(1), &["1"]);
        let p = Packing::new(&i, vec![vec![], vec![0], vec![]]).unwrap();
        assert_eq!(p.covers(), 1);
    }

    #[test]
    fn partition_violations() {
        let i = inst(int(1), &["0.5", "0.5"]);
        assert!(matches!(Packing::new(&i, vec![vec![0, 0, 1]]), Err(Error::InvalidPacking(_))));
        assert!(matches!(Packing::new(&i, vec![vec![0]]), Err(Error::InvalidPacking(_))));
        assert!(matches!(Packing::new(&i, vec![vec![0, 1, 2]]), Err(Error::InvalidPacking(_))));
    }

    #[test]
    fn instance_invariants() {
        assert!(Instance::new(int(0), vec![]).is_err());
        assert!(Instance::new(int(1), vec![ratio(3, 2)]).is_err());
        assert!(Instance::new(int(1), vec![int(0)]).is_err());
        assert!(Instance::new(int(1), vec![]).is_ok());
    }

    #[test]
    fn file_formats() {
        let i = read_instance(r#"{"delta": "1/2", "sizes": ["0.3", "1/3", 1, 0.25]}"#).unwrap();
        assert_eq!(i.sizes(), &[ratio(3, 10), ratio(1, 3), int(1), ratio(1, 4)]);
        assert_eq!(read_instance(&write_instance(&i)).unwrap(), i);
        assert!(write_instance(&i).contains("\"3/10\""));

        assert!(matches!(read_instance(r#"{"delta": "1", "sizes": ["1.5"]}"#), Err(Error::InvalidInstance(_))));
        assert!(matches!(read_instance(r#"{"delta": "0", "sizes": []}"#), Err(Error::InvalidInstance(_))));
        assert!(matches!(read_instance(r#"{"delta": "1", "sizes": ["x"]}"#), Err(Error::Format(_))));

        let p = read_packing(r#"{"bins": [[0, 1], [2, 3]]}"#, &i).unwrap();
        assert_eq!(read_packing(&write_packing(&p), &i).unwrap(), p);
        assert!(read_packing(r#"{"bins": [[0, 1], [1, 2, 3]]}"#, &i).is_err());
    }

    #[test]
    fn long_decimal_literal_is_exact() {
        let i = read_instance(r#"{"delta": 1, "sizes": [0.12345678901234567890123]}"#).unwrap();
        assert_eq!(i.sizes()[0], parse_rational("0.12345678901234567890123").unwrap());
    }
}
