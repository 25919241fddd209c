//! The approximate separation oracle: a table sweep over a rounded
//! knapsack, then verdicts for a few dual points.

use nearcover::classify::{default_eps, SchemeParams};
use nearcover::pricing::{separate, sweep_dp, DualPoint, GridIp, Objective, OracleVerdict};
use nearcover::rational::{format_rational, int, ratio};

fn main() -> nearcover::Result<()> {
    let grid = GridIp {
        value_units: vec![1, 3],
        size_units: vec![1, 3],
        sizes: vec![ratio(2, 5), ratio(1, 1)],
        counts: vec![3, 1],
        value_cap: 3,
        size_cap: 3,
        objective: Objective::Max,
    };
    let table = sweep_dp(&grid)?;
    for v in 0..=3 {
        let row: Vec<String> = (0..=3).map(|s| table.value(v, s).map_or("-".into(), |x| format_rational(&x))).collect();
        println!("value {v}: {}", row.join("  "));
    }

    let params = SchemeParams::new(int(1), default_eps())?;
    let sizes = vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let counts = vec![3, 2, 1];
    for (y, z1, z2) in [
        (vec![ratio(0, 1), ratio(0, 1), ratio(0, 1)], int(0), int(0)),
        (vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)], int(1), int(0)),
        (vec![int(1), int(1), int(1)], int(1), int(1)),
    ] {
        let duals = DualPoint { y, z1, z2 };
        match separate(&duals, &sizes, &counts, &params)? {
            OracleVerdict::Certified => println!("certified"),
            OracleVerdict::Violated(w) => {
                println!("violated by {:?} ({:?}) size {} sand {}", w.counts, w.family, format_rational(&w.size), format_rational(&w.sand))
            }
            OracleVerdict::NegativeDual(i) => println!("negative dual at row {i}"),
        }
    }
    Ok(())
}
