//! The exact simplex on a small production problem, its duals, a basic
//! crash of an interior optimum, and the text dump of the model.

use nearcover::lp::{solve, to_basic, write_lp_format, Column, LpProblem, Relation, Sense};
use nearcover::rational::{format_rational, int, ratio};

fn main() -> nearcover::Result<()> {
    let mut lp = LpProblem::new(Sense::Maximize);
    let wood = lp.add_row(Relation::Le, int(12), "wood");
    let labor = lp.add_row(Relation::Le, int(8), "labor");
    lp.add_column(Column::new(int(3), vec![(wood, int(2)), (labor, int(1))]).named("table"));
    lp.add_column(Column::new(int(2), vec![(wood, int(1)), (labor, int(1))]).named("chair"));
    lp.add_column(Column::new(int(5), vec![(wood, int(3)), (labor, ratio(5, 2))]).named("desk"));
    print!("{}", write_lp_format(&lp));

    let s = solve(&lp)?;
    let fmt = |v: &[nearcover::Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(", ");
    println!("status {:?}, objective {}", s.status, format_rational(&s.objective));
    println!("primal [{}], duals [{}], {} pivots", fmt(&s.primal), fmt(&s.duals), s.iterations);

    // Two equally good columns: any convex mix is optimal, crashing picks a vertex.
    let mut tie = LpProblem::new(Sense::Maximize);
    let r = tie.add_row(Relation::Le, int(1), "cap");
    tie.add_column(Column::new(int(1), vec![(r, int(1))]));
    tie.add_column(Column::new(int(1), vec![(r, int(1))]));
    let mut mix = solve(&tie)?;
    mix.primal = vec![ratio(1, 2), ratio(1, 2)];
    let basic = to_basic(&tie, &mix)?;
    println!("mix [{}] -> basic [{}]", fmt(&mix.primal), fmt(&basic.primal));
    Ok(())
}
