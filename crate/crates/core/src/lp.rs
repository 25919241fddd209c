//! Exact rational linear programming.
//!
//! Two-phase revised simplex with an explicit basis inverse and Bland's
//! rule for both the entering and the leaving variable. Problems are stored
//! column-wise so column generation can append columns cheaply.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{common_denominator, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub relation: Relation,
    pub rhs: Rational,
    pub name: String,
}

/// A sparse column: objective coefficient and `(row, coefficient)` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub objective: Rational,
    pub entries: Vec<(usize, Rational)>,
    pub name: String,
}

impl Column {
    pub fn new(objective: Rational, entries: Vec<(usize, Rational)>) -> Self {
        Self { objective, entries, name: String::new() }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn coefficient(&self, row: usize) -> Rational {
        self.entries.iter().filter(|(r, _)| *r == row).fold(Rational::zero(), |acc, (_, v)| acc + v)
    }
}

/// `sense c.x` subject to the rows, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub sense: Sense,
    pub rows: Vec<Row>,
    pub columns: Vec<Column>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        Self { sense, rows: Vec::new(), columns: Vec::new() }
    }

    pub fn add_row(&mut self, relation: Relation, rhs: Rational, name: impl Into<String>) -> usize {
        self.rows.push(Row { relation, rhs, name: name.into() });
        self.rows.len() - 1
    }

    pub fn add_column(&mut self, column: Column) -> usize {
        self.columns.push(column);
        self.columns.len() - 1
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.columns.iter().zip(x).fold(Rational::zero(), |acc, (c, v)| acc + &c.objective * v)
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[Rational]) -> Vec<Rational> {
        let mut act = vec![Rational::zero(); self.rows.len()];
        for (col, v) in self.columns.iter().zip(x) {
            if v.is_zero() {
                continue;
            }
            for (r, a) in &col.entries {
                act[*r] += a * v;
            }
        }
        act
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.columns.len()
            && x.iter().all(|v| !v.is_negative())
            && self.activities(x).iter().zip(&self.rows).all(|(a, row)| match row.relation {
                Relation::Le => a <= &row.rhs,
                Relation::Eq => a == &row.rhs,
                Relation::Ge => a >= &row.rhs,
            })
    }

    fn validate(&self) -> Result<()> {
        for (j, col) in self.columns.iter().enumerate() {
            if let Some((r, _)) = col.entries.iter().find(|(r, _)| *r >= self.rows.len()) {
                return Err(Error::Lp(format!("column {j} references row {r}, but there are {} rows", self.rows.len())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub objective: Rational,
    /// One value per row; on an optimal solve `sum(duals * rhs) == objective`.
    pub duals: Vec<Rational>,
    /// Structural columns in the final basis, ascending.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

impl LpSolution {
    fn empty(status: LpStatus, n: usize, m: usize, iterations: usize) -> Self {
        Self {
            status,
            primal: vec![Rational::zero(); n],
            objective: Rational::zero(),
            duals: vec![Rational::zero(); m],
            basis: Vec::new(),
            iterations,
        }
    }

    /// Columns with a positive value.
    pub fn support(&self) -> Vec<usize> {
        self.primal.iter().enumerate().filter(|(_, v)| v.is_positive()).map(|(j, _)| j).collect()
    }

    pub fn fractional_count(&self) -> usize {
        self.primal.iter().filter(|v| !v.is_integer()).count()
    }
}

/// Safety net far above anything Bland's rule needs at the sizes used here.
const MAX_ITERATIONS: usize = 5_000_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Structural(usize),
    Slack(usize, bool),
    Artificial(usize),
}

/// Standard-form view: every row has non-negative rhs and an initial basic
/// slack or artificial variable with a `+1` coefficient.
struct Tableau {
    problem: LpProblem,
    m: usize,
    row_sign: Vec<bool>,
    vars: Vec<VarKind>,
    /// Structural column entries as integers over a per-column denominator.
    scaled: Vec<(Vec<(usize, BigInt)>, BigInt)>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    iterations: usize,
}

/// Column entries as integers over a common denominator, in standard-form signs.
fn scale_column(col: &Column, row_sign: &[bool]) -> (Vec<(usize, BigInt)>, BigInt) {
    let den = common_denominator(col.entries.iter().map(|(_, v)| v));
    let entries = col
        .entries
        .iter()
        .map(|(r, v)| {
            let mut e = v.numer() * (&den / v.denom());
            if row_sign[*r] {
                e = -e;
            }
            (*r, e)
        })
        .collect();
    (entries, den)
}

impl Tableau {
    fn new(problem: LpProblem) -> Self {
        let m = problem.rows.len();
        let n = problem.columns.len();
        let row_sign: Vec<bool> = problem.rows.iter().map(|r| r.rhs.is_negative()).collect();
        let mut vars: Vec<VarKind> = (0..n).map(VarKind::Structural).collect();
        let mut basis = vec![0; m];
        let mut xb = Vec::with_capacity(m);
        for (i, row) in problem.rows.iter().enumerate() {
            let rel = match (row.relation, row_sign[i]) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match rel {
                Relation::Le => {
                    basis[i] = vars.len();
                    vars.push(VarKind::Slack(i, true));
                }
                Relation::Ge => {
                    vars.push(VarKind::Slack(i, false));
                    basis[i] = vars.len();
                    vars.push(VarKind::Artificial(i));
                }
                Relation::Eq => {
                    basis[i] = vars.len();
                    vars.push(VarKind::Artificial(i));
                }
            }
            xb.push(row.rhs.abs());
        }
        let scaled = problem.columns.iter().map(|col| scale_column(col, &row_sign)).collect();
        let mut is_basic = vec![false; vars.len()];
        for &b in &basis {
            is_basic[b] = true;
        }
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self { problem, m, row_sign, vars, scaled, binv, xb, basis, is_basic, iterations: 0 }
    }

    /// Column `j` of the standard-form matrix, densely.
    fn dense_column(&self, j: usize) -> Vec<Rational> {
        let mut col = vec![Rational::zero(); self.m];
        match self.vars[j] {
            VarKind::Structural(s) => {
                for (r, v) in &self.problem.columns[s].entries {
                    if self.row_sign[*r] {
                        col[*r] -= v;
                    } else {
                        col[*r] += v;
                    }
                }
            }
            VarKind::Slack(i, plus) => col[i] = if plus { Rational::one() } else { -Rational::one() },
            VarKind::Artificial(i) => col[i] = Rational::one(),
        }
        col
    }

    fn cost(&self, j: usize, phase_one: bool, maximize: bool) -> Rational {
        match (self.vars[j], phase_one) {
            (VarKind::Artificial(_), true) => -Rational::one(),
            (_, true) => Rational::zero(),
            (VarKind::Structural(s), false) => {
                let c = self.problem.columns[s].objective.clone();
                if maximize {
                    c
                } else {
                    -c
                }
            }
            _ => Rational::zero(),
        }
    }

    /// `c_B^T B^{-1}`.
    fn simplex_multipliers(&self, phase_one: bool, maximize: bool) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = self.cost(b, phase_one, maximize);
            if c.is_zero() {
                continue;
            }
            for k in 0..self.m {
                if !self.binv[i][k].is_zero() {
                    y[k] += &c * &self.binv[i][k];
                }
            }
        }
        y
    }

    /// Lowest-index variable with positive reduced cost (Bland).
    fn entering(&self, y: &[Rational], phase_one: bool, maximize: bool) -> Option<usize> {
        // Multipliers over a common denominator so structural pricing is integer-only.
        let den = common_denominator(y.iter());
        let y_int: Vec<BigInt> = y.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        for j in 0..self.vars.len() {
            if self.is_basic[j] {
                continue;
            }
            let positive = match self.vars[j] {
                VarKind::Structural(s) => {
                    let c = self.cost(j, phase_one, maximize);
                    let (entries, cden) = &self.scaled[s];
                    let dot: BigInt = entries.iter().map(|(r, e)| &y_int[*r] * e).sum();
                    // c - dot / (den * cden) > 0
                    c.numer() * &den * cden > c.denom() * dot
                }
                VarKind::Slack(i, plus) => {
                    if plus {
                        y[i].is_negative()
                    } else {
                        y[i].is_positive()
                    }
                }
                VarKind::Artificial(i) => phase_one && (-Rational::one() - &y[i]).is_positive(),
            };
            if positive {
                return Some(j);
            }
        }
        None
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[Rational]) {
        let piv = u[r].clone();
        for k in 0..self.m {
            if !self.binv[r][k].is_zero() {
                self.binv[r][k] /= &piv;
            }
        }
        self.xb[r] /= &piv;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        for i in 0..self.m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = &u[i];
            for k in 0..self.m {
                if !pivot_row[k].is_zero() {
                    let delta = f * &pivot_row[k];
                    self.binv[i][k] -= delta;
                }
            }
            self.xb[i] -= f * &pivot_x;
        }
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = j;
        self.is_basic[j] = true;
        self.iterations += 1;
    }

    fn ftran(&self, j: usize) -> Vec<Rational> {
        let col = self.dense_column(j);
        let nz: Vec<usize> = (0..self.m).filter(|&k| !col[k].is_zero()).collect();
        (0..self.m)
            .map(|i| nz.iter().fold(Rational::zero(), |acc, &k| acc + &self.binv[i][k] * &col[k]))
            .collect()
    }

    /// Runs simplex iterations; `Ok(false)` means unbounded.
    fn optimize(&mut self, phase_one: bool, maximize: bool) -> Result<bool> {
        let mut y = self.simplex_multipliers(phase_one, maximize);
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Lp("simplex iteration cap exceeded".into()));
            }
            let Some(j) = self.entering(&y, phase_one, maximize) else {
                return Ok(true);
            };
            let u = self.ftran(j);
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if !u[i].is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / &u[i];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => {
                    let reduced = self.dense_column(j).iter().zip(&y).fold(self.cost(j, phase_one, maximize), |acc, (a, yk)| {
                        if a.is_zero() {
                            acc
                        } else {
                            acc - a * yk
                        }
                    });
                    self.pivot(r, j, &u);
                    for (yk, b) in y.iter_mut().zip(&self.binv[r]) {
                        if !b.is_zero() {
                            *yk += &reduced * b;
                        }
                    }
                }
            }
        }
    }

    /// Appends a structural column as a nonbasic variable at zero.
    fn add_column(&mut self, column: Column) {
        self.scaled.push(scale_column(&column, &self.row_sign));
        let s = self.problem.add_column(column);
        self.vars.push(VarKind::Structural(s));
        self.is_basic.push(false);
    }

    /// Phase one, then phase two from the current basis.
    fn run(&mut self) -> Result<LpStatus> {
        let maximize = self.problem.sense == Sense::Maximize;
        let artificial_basic = self.basis.iter().any(|&b| matches!(self.vars[b], VarKind::Artificial(_)));
        if artificial_basic {
            self.optimize(true, maximize)?;
            let infeasible = self
                .basis
                .iter()
                .zip(&self.xb)
                .any(|(&b, x)| matches!(self.vars[b], VarKind::Artificial(_)) && x.is_positive());
            if infeasible {
                return Ok(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }
        // Artificials never re-enter: `entering` only prices them in phase one.
        if !self.optimize(false, maximize)? {
            return Ok(LpStatus::Unbounded);
        }
        Ok(LpStatus::Optimal)
    }

    fn solution(&self, status: LpStatus) -> LpSolution {
        let n = self.problem.columns.len();
        if status != LpStatus::Optimal {
            return LpSolution::empty(status, n, self.m, self.iterations);
        }
        let maximize = self.problem.sense == Sense::Maximize;
        let mut primal = vec![Rational::zero(); n];
        let mut basis = Vec::new();
        for (i, &b) in self.basis.iter().enumerate() {
            if let VarKind::Structural(s) = self.vars[b] {
                primal[s] = self.xb[i].clone();
                basis.push(s);
            }
        }
        basis.sort_unstable();
        let y = self.simplex_multipliers(false, maximize);
        let duals = y
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let v = if self.row_sign[i] { -v } else { v };
                if maximize {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let objective = self.problem.objective_value(&primal);
        LpSolution { status, primal, objective, duals, basis, iterations: self.iterations }
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if !matches!(self.vars[self.basis[r]], VarKind::Artificial(_)) {
                continue;
            }
            let candidate = (0..self.vars.len()).find_map(|j| {
                if self.is_basic[j] || matches!(self.vars[j], VarKind::Artificial(_)) {
                    return None;
                }
                let u = self.ftran(j);
                (!u[r].is_zero()).then_some((j, u))
            });
            if let Some((j, u)) = candidate {
                self.pivot(r, j, &u);
            }
        }
    }
}

/// Solves `problem` exactly. Infeasible and unbounded problems are statuses, not errors.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let mut t = Tableau::new(problem.clone());
    let status = t.run()?;
    Ok(t.solution(status))
}

/// Null-space vector of the columns of `mat` (row-major, `m x k`), if any.
fn null_vector(mat: &[Vec<Rational>], k: usize) -> Option<Vec<Rational>> {
    let m = mat.len();
    let mut a: Vec<Vec<Rational>> = mat.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in 0..k {
            a[row][c] = &a[row][c] * &inv;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in 0..k {
                    let d = &f * &a[row][c];
                    a[i][c] -= d;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    let free = (0..k).find(|c| !pivot_cols.contains(c))?;
    let mut d = vec![Rational::zero(); k];
    d[free] = Rational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -a[r][free].clone();
    }
    Some(d)
}

/// Basis crashing: moves a feasible `solution` to a vertex whose objective is
/// no worse, so that at most `rows` columns and slacks are positive.
/// Duals are carried over unchanged.
pub fn to_basic(problem: &LpProblem, solution: &LpSolution) -> Result<LpSolution> {
    if !problem.is_feasible(&solution.primal) {
        return Err(Error::Lp("basis crashing needs a feasible point".into()));
    }
    let m = problem.rows.len();
    let maximize = problem.sense == Sense::Maximize;
    let mut x = solution.primal.clone();
    let mut steps = 0;
    loop {
        let act = problem.activities(&x);
        // Support: positive structurals, then positive slacks.
        let mut cols: Vec<(Option<usize>, Vec<Rational>, Rational, Rational)> = Vec::new();
        for (j, v) in x.iter().enumerate() {
            if v.is_positive() {
                let mut dense = vec![Rational::zero(); m];
                for (r, a) in &problem.columns[j].entries {
                    dense[*r] += a;
                }
                cols.push((Some(j), dense, problem.columns[j].objective.clone(), v.clone()));
            }
        }
        for (i, row) in problem.rows.iter().enumerate() {
            let (slack, sign) = match row.relation {
                Relation::Le => (&row.rhs - &act[i], Rational::one()),
                Relation::Ge => (&act[i] - &row.rhs, -Rational::one()),
                Relation::Eq => continue,
            };
            if slack.is_positive() {
                let mut dense = vec![Rational::zero(); m];
                dense[i] = sign;
                cols.push((None, dense, Rational::zero(), slack));
            }
        }
        let k = cols.len();
        let mat: Vec<Vec<Rational>> = (0..m).map(|i| cols.iter().map(|c| c.1[i].clone()).collect()).collect();
        let Some(mut d) = null_vector(&mat, k) else {
            break;
        };
        let gain: Rational = cols.iter().zip(&d).fold(Rational::zero(), |acc, (c, dv)| acc + &c.2 * dv);
        let worse = if maximize { gain.is_negative() } else { gain.is_positive() };
        if worse || (gain.is_zero() && d.iter().all(|v| !v.is_negative())) {
            d.iter_mut().for_each(|v| *v = -v.clone());
        }
        let step = cols
            .iter()
            .zip(&d)
            .filter(|(_, dv)| dv.is_negative())
            .map(|(c, dv)| &c.3 / -dv)
            .min()
            .ok_or_else(|| Error::Lp("objective is unbounded along the crashing direction".into()))?;
        for (c, dv) in cols.iter().zip(&d) {
            if let Some(j) = c.0 {
                x[j] = &x[j] + &step * dv;
                if x[j].is_negative() {
                    x[j] = Rational::zero();
                }
            }
        }
        steps += 1;
    }
    let basis = x.iter().enumerate().filter(|(_, v)| v.is_positive()).map(|(j, _)| j).collect();
    Ok(LpSolution {
        status: solution.status,
        objective: problem.objective_value(&x),
        primal: x,
        duals: solution.duals.clone(),
        basis,
        iterations: solution.iterations + steps,
    })
}

/// Result of [`column_generation`].
#[derive(Debug, Clone)]
pub struct ColumnGeneration {
    pub problem: LpProblem,
    pub solution: LpSolution,
    pub rounds: usize,
    pub columns_added: usize,
    /// `true` when the pricer declined to add a column on the final round.
    pub certified: bool,
}

/// Alternates exact solves of the restricted master with calls to `pricer`
/// until it returns no column or `max_rounds` pricing rounds have run.
pub fn column_generation<F>(master: LpProblem, mut pricer: F, max_rounds: usize) -> Result<ColumnGeneration>
where
    F: FnMut(&[Rational]) -> Result<Option<Column>>,
{
    master.validate()?;
    let mut t = Tableau::new(master);
    let mut rounds = 0;
    let mut added = 0;
    loop {
        // New columns enter nonbasic at zero, so the previous basis stays primal feasible.
        let status = t.run()?;
        if status != LpStatus::Optimal {
            return Err(Error::Lp(format!("restricted master is {status:?}")));
        }
        let solution = t.solution(status);
        let finish = |t: Tableau, solution, rounds, added, certified| {
            Ok(ColumnGeneration { problem: t.problem, solution, rounds, columns_added: added, certified })
        };
        if rounds == max_rounds {
            return finish(t, solution, rounds, added, false);
        }
        rounds += 1;
        match pricer(&solution.duals)? {
            None => return finish(t, solution, rounds, added, true),
            Some(col) => {
                if t.problem.columns.iter().any(|c| c.entries == col.entries && c.objective == col.objective) {
                    log::warn!("pricer returned a column already in the master; stopping");
                    return finish(t, solution, rounds, added, false);
                }
                t.add_column(col);
                added += 1;
            }
        }
    }
}

fn lp_number(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}", to_f64(v))
    }
}

/// CPLEX-style LP text for debugging. Non-integer coefficients are printed
/// as decimal approximations; the exact value follows in a comment line.
pub fn write_lp_format(problem: &LpProblem) -> String {
    let col_name = |j: usize| {
        let n = &problem.columns[j].name;
        if n.is_empty() {
            format!("x{j}")
        } else {
            n.clone()
        }
    };
    let mut out = String::new();
    let mut exact_notes = Vec::new();
    out.push_str(match problem.sense {
        Sense::Maximize => "Maximize\n obj:",
        Sense::Minimize => "Minimize\n obj:",
    });
    let mut any = false;
    for (j, c) in problem.columns.iter().enumerate() {
        if c.objective.is_zero() {
            continue;
        }
        any = true;
        out.push_str(&format!(" + {} {}", lp_number(&c.objective), col_name(j)));
        if !c.objective.is_integer() {
            exact_notes.push(format!("obj {} = {}", col_name(j), c.objective));
        }
    }
    if !any {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for (i, row) in problem.rows.iter().enumerate() {
        let name = if row.name.is_empty() { format!("r{i}") } else { row.name.clone() };
        out.push_str(&format!(" {name}:"));
        let mut empty = true;
        for (j, c) in problem.columns.iter().enumerate() {
            let a = c.coefficient(i);
            if a.is_zero() {
                continue;
            }
            empty = false;
            out.push_str(&format!(" + {} {}", lp_number(&a), col_name(j)));
            if !a.is_integer() {
                exact_notes.push(format!("{name} {} = {a}", col_name(j)));
            }
        }
        if empty {
            out.push_str(" 0 x0");
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        out.push_str(&format!(" {rel} {}\n", lp_number(&row.rhs)));
        if !row.rhs.is_integer() {
            exact_notes.push(format!("{name} rhs = {}", row.rhs));
        }
    }
    out.push_str("End\n");
    for note in exact_notes {
        out.push_str(&format!("\\ exact: {note}\n"));
    }
    out
}
