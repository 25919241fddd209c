//! Next-fit covering greedy: fill the current bin until its total reaches 1,
//! then open a new one.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Packing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    #[default]
    Input,
    Descending,
    Ascending,
}

/// Item indices in the scan order; ties keep input order.
pub fn scan_order(instance: &Instance, order: Order) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..instance.len()).collect();
    match order {
        Order::Input => {}
        Order::Descending => idx.sort_by(|&a, &b| instance.size(b).cmp(instance.size(a)).then(a.cmp(&b))),
        Order::Ascending => idx.sort_by(|&a, &b| instance.size(a).cmp(instance.size(b)).then(a.cmp(&b))),
    }
    idx
}

pub fn greedy(instance: &Instance, order: Order) -> Packing {
    let one = crate::rational::int(1);
    let mut bins = Vec::new();
    let mut current = Vec::new();
    let mut total = crate::rational::int(0);
    for j in scan_order(instance, order) {
        current.push(j);
        total += instance.size(j);
        if total >= one {
            bins.push(std::mem::take(&mut current));
            total = crate::rational::int(0);
        }
    }
    if !current.is_empty() {
        bins.push(current);
    }
    Packing::new(instance, bins).expect("greedy emits a partition")
}
