//! Linear grouping of item classes.
//!
//! A class with at least `G` items is cut into `G` groups of near-equal
//! cardinality; the first group holds the largest positions of the class.
//! Every item is then rounded to the largest (up) or smallest (down) size of
//! its group. Smaller classes are left unrounded.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{sort_class, ClassIndex};
use crate::model::Instance;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// A class of the grouped item set: a huge class, or the large non-huge items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassKey {
    Large,
    Huge(ClassIndex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedClass {
    /// Class items in class order (non-decreasing size, ties by decreasing index).
    pub items: Vec<usize>,
    /// Groups `H^1, H^2, ...`; each group lists items in class order.
    pub groups: Vec<Vec<usize>>,
    pub rounded: bool,
}

/// Distinct rounded size with the items carrying it, ascending by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeEntry {
    pub size: Rational,
    pub items: Vec<usize>,
}

impl SizeEntry {
    pub fn count(&self) -> u64 {
        self.items.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedInstance {
    pub direction: Direction,
    pub group_count: u64,
    pub classes: BTreeMap<ClassKey, GroupedClass>,
    rounded: BTreeMap<usize, Rational>,
}

impl GroupedInstance {
    pub fn rounded_size(&self, item: usize) -> Option<&Rational> {
        self.rounded.get(&item)
    }

    pub fn rounded_sizes(&self) -> &BTreeMap<usize, Rational> {
        &self.rounded
    }

    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        self.rounded.keys().copied()
    }

    /// Distinct rounded sizes in ascending order with their multiplicities.
    pub fn size_table(&self) -> Vec<SizeEntry> {
        let mut by_size: BTreeMap<&Rational, Vec<usize>> = BTreeMap::new();
        for (&j, s) in &self.rounded {
            by_size.entry(s).or_default().push(j);
        }
        by_size.into_iter().map(|(s, items)| SizeEntry { size: s.clone(), items }).collect()
    }
}

fn split_into_groups(items: &[usize], group_count: u64) -> (Vec<Vec<usize>>, bool) {
    let len = items.len() as u64;
    if len < group_count {
        // H^1 is empty and every item is its own group, largest position first.
        let mut groups = vec![Vec::new()];
        groups.extend(items.iter().rev().map(|&j| vec![j]));
        return (groups, false);
    }
    let q = len / group_count;
    let r = len % group_count;
    let mut groups = Vec::with_capacity(group_count as usize);
    let mut end = items.len();
    for alpha in 0..group_count {
        let size = (q + u64::from(alpha < r)) as usize;
        groups.push(items[end - size..end].to_vec());
        end -= size;
    }
    debug_assert_eq!(end, 0);
    (groups, true)
}

/// Groups every class and rounds in `direction`. Items of `classes` are re-sorted into class order.
pub fn group_classes(
    instance: &Instance,
    classes: &BTreeMap<ClassKey, Vec<usize>>,
    group_count: u64,
    direction: Direction,
) -> GroupedInstance {
    assert!(group_count > 0, "group count must be positive");
    let mut out = BTreeMap::new();
    let mut rounded = BTreeMap::new();
    for (&key, items) in classes {
        if items.is_empty() {
            continue;
        }
        let mut items = items.clone();
        sort_class(instance, &mut items);
        let (groups, is_rounded) = split_into_groups(&items, group_count);
        for group in &groups {
            let target = match direction {
                Direction::Up => group.last(),
                Direction::Down => group.first(),
            };
            for &j in group {
                let s = if is_rounded { instance.size(*target.unwrap()) } else { instance.size(j) };
                rounded.insert(j, s.clone());
            }
        }
        out.insert(key, GroupedClass { items, groups, rounded: is_rounded });
    }
    GroupedInstance { direction, group_count, classes: out, rounded }
}
