//! Builds an instance by hand, packs it two ways and counts covered bins.
//!
//! A bin counts when its total lands in `[1, 1 + delta)`: too little and it
//! is not covered, too much and it overshoots.

use nearcover::model::{write_instance, write_packing};
use nearcover::rational::{format_rational, parse_rational};
use nearcover::{evaluate, Instance, Packing};

fn main() -> nearcover::Result<()> {
    let sizes = ["0.6", "0.45", "0.55", "0.5", "0.3", "0.7"]
        .iter()
        .map(|s| parse_rational(s))
        .collect::<nearcover::Result<Vec<_>>>()?;
    let inst = Instance::new(parse_rational("1/4")?, sizes)?;
    println!("{}", write_instance(&inst));

    for bins in [vec![vec![0, 1], vec![2, 3], vec![4, 5]], vec![vec![0, 2], vec![1, 3, 4], vec![5]]] {
        let packing = Packing::new(&inst, bins)?;
        for bin in packing.bins() {
            let total = inst.total(bin);
            let mark = if inst.is_covered_total(&total) { "covered" } else { "-" };
            println!("  {bin:?} total {} {mark}", format_rational(&total));
        }
        println!("{} -> {} covered\n", write_packing(&packing), evaluate(&inst, &packing)?);
    }
    Ok(())
}
