//! Rounds huge items up within their classes, enumerates bin
//! configurations, solves the configuration LP and instantiates bins.

use nearcover::classify::{default_eps, SchemeParams};
use nearcover::generators::{random_instance, SizeDistribution};
use nearcover::i1::{group_up, solve_i1, DEFAULT_CONFIG_CAP};
use nearcover::rational::{format_rational, int, ratio};

fn main() -> nearcover::Result<()> {
    let dist = SizeDistribution::Uniform { lo: ratio(1, 4), hi: ratio(4, 5) };
    let inst = random_instance(16, &dist, int(1), 7, 40)?;
    // A small group count so that rounding actually merges sizes.
    let params = SchemeParams::new(int(1), default_eps())?.with_group_count(3);
    let items: Vec<usize> = (0..inst.len()).collect();

    for entry in group_up(&inst, &items, &params).size_table() {
        println!("rounded size {:>6} x {}", format_rational(&entry.size), entry.count());
    }
    let out = solve_i1(&inst, &items, &params, DEFAULT_CONFIG_CAP)?;
    println!(
        "{} configurations, LP value {}, support {} of {} rows, floored {}",
        out.configurations,
        format_rational(&out.lp_value),
        out.lp_support,
        out.lp_rows,
        out.floored_value
    );
    for &b in &out.unit_bins {
        let bin = &out.bins[b];
        println!("  {bin:?} total {}", format_rational(&inst.total(bin)));
    }
    println!("covered {}", out.covered);
    Ok(())
}
