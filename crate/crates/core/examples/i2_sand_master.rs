//! The sand-relaxed master for one beta: split, round down, generate
//! columns, crash to a basic solution and realize the sand with small items.

use nearcover::classify::{default_eps, SchemeParams};
use nearcover::generators::{random_instance, SizeDistribution};
use nearcover::i2::{build_and_solve_master, group_down, realize, solve_i2, split_lms, DEFAULT_MAX_ROUNDS};
use nearcover::rational::{format_rational, int, ratio};
use num_traits::Zero;

fn main() -> nearcover::Result<()> {
    let dist = SizeDistribution::TwoCluster { lo1: ratio(1, 50), hi1: ratio(1, 10), lo2: ratio(2, 5), hi2: ratio(4, 5) };
    let inst = random_instance(24, &dist, int(1), 11, 100)?;
    let params = SchemeParams::new(int(1), default_eps())?;
    let (huge, x): (Vec<usize>, Vec<usize>) = (0..inst.len()).partition(|&j| params.class_of(inst.size(j)).is_some());

    let beta = 2;
    let split = split_lms(&inst, &x, beta, &params)?;
    let grouped = group_down(&inst, &huge, &split.large, &params);
    let sand = split.small.iter().fold(nearcover::Rational::zero(), |acc, &j| acc + inst.size(j));
    println!("beta {beta}: {} large, {} medium, {} small, sand {}", split.large.len(), split.medium.len(), split.small.len(), format_rational(&sand));

    let master = build_and_solve_master(&grouped.size_table(), &sand, beta, &params, DEFAULT_MAX_ROUNDS)?;
    println!(
        "{} columns over {} rounds, certified {}, value {}",
        master.columns_added,
        master.rounds,
        master.certified,
        format_rational(&master.lp_value)
    );
    let r = realize(&inst, &grouped, &master.problem, &master.solution.primal, &split);
    println!("realized: {} covered, sand used {}, {} medium items", r.covered, format_rational(&r.sand_used), r.medium_used);

    let all: Vec<usize> = (0..inst.len()).collect();
    let out = solve_i2(&inst, &all, &params, DEFAULT_MAX_ROUNDS)?;
    println!("over all beta: best {:?} with {} covered", out.best_beta, out.covered);
    Ok(())
}
