//! End to end: generate, run the scheme in both guessing modes, compare with
//! greedy and the exact optimum, and print the CSV row.

use nearcover::classify::SchemeParams;
use nearcover::generators::{random_instance, SizeDistribution};
use nearcover::harness::{compare, csv_row, Budgets, Mode, CSV_HEADER};
use nearcover::rational::ratio;

fn main() -> nearcover::Result<()> {
    let dist = SizeDistribution::HugeHeavy { huge_lo: ratio(1, 3), small_hi: ratio(1, 10) };
    let inst = random_instance(12, &dist, ratio(1, 2), 5, 120)?;
    let params = SchemeParams::for_instance(&inst);
    let budgets = Budgets { jobs: 2, ..Budgets::default() };

    println!("{CSV_HEADER}");
    for mode in [Mode::Oracle, Mode::Exhaustive] {
        let report = compare(&inst, &params, mode, &budgets)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        println!("{}", csv_row(&report));
        let best = &report.best;
        println!("# {mode:?}: {} guesses, best guess {:?} covers {} with {:?}", report.guesses.len(), best.guess, best.covers, best.bins);
    }
    Ok(())
}
