//! Greedy in three scan orders against the exact optimum on random instances.

use nearcover::exact::exact_opt;
use nearcover::generators::{random_instance, SizeDistribution};
use nearcover::greedy::{greedy, Order};
use nearcover::rational::ratio;

fn main() -> nearcover::Result<()> {
    let dist = SizeDistribution::Uniform { lo: ratio(1, 20), hi: ratio(3, 4) };
    println!("{:>6} {:>4} {:>6} {:>6} {:>6} {:>6}", "delta", "seed", "input", "desc", "asc", "exact");
    for (delta, label) in [(ratio(1, 4), "1/4"), (ratio(1, 1), "1"), (ratio(2, 1), "2")] {
        for seed in 0..4 {
            let inst = random_instance(14, &dist, delta.clone(), seed, 1000)?;
            let g: Vec<usize> = [Order::Input, Order::Descending, Order::Ascending].iter().map(|&o| greedy(&inst, o).covers()).collect();
            let (opt, _) = exact_opt(&inst, 20)?;
            println!("{label:>6} {seed:>4} {:>6} {:>6} {:>6} {opt:>6}", g[0], g[1], g[2]);
        }
    }
    Ok(())
}
