//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;

use common::*;
use nearcover::classify::{default_eps, SchemeParams};
use nearcover::exact::exact_opt;
use nearcover::generators::{reduction_delta, reduction_instance, GenerationSpec, PartitionInput};
use nearcover::greedy::{greedy, Order};
use nearcover::grouping::SizeEntry;
use nearcover::harness::{compare, run_afptas, Budgets, ExactColumn, Mode};
use nearcover::i1::{group_up, solve_i1, DEFAULT_CONFIG_CAP};
use nearcover::i2::{build_and_solve_master, DEFAULT_MAX_ROUNDS};
use nearcover::lp::{self, Column, LpProblem, LpStatus, Relation, Sense};
use nearcover::model::check_partition;
use nearcover::pricing::{constraint_value, separate, sweep_dp, DualPoint, GridIp, Objective, OracleVerdict};
use nearcover::rational::{int, ratio};
use nearcover::{evaluate, Instance, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    failures: Vec<String>,
    checked: usize,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new(), checked: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn report(&self, id: u32, title: &str) -> bool {
        let pass = self.failures.is_empty();
        println!("{} criterion {id}: {title} ({} checks)", if pass { "PASS" } else { "FAIL" }, self.checked);
        for f in self.failures.iter().filter(|f| !f.is_empty()) {
            println!("    {f}");
        }
        if self.failures.len() > 5 {
            println!("    ... {} failures in total", self.failures.len());
        }
        pass
    }
}

fn delta_of(k: usize) -> Rational {
    let (n, d) = DELTAS[k % DELTAS.len()];
    ratio(n, d)
}

fn params(delta: &Rational) -> SchemeParams {
    SchemeParams::new(delta.clone(), default_eps()).unwrap()
}

/// LP checks collected from the other criteria.
#[derive(Default)]
struct LpLedger {
    outcome: Vec<(bool, String)>,
}

impl LpLedger {
    fn record(&mut self, support: usize, rows: usize, lp_value: &Rational, floored: u64, source: &str) {
        let support_ok = support <= rows;
        let floor_ok = Rational::from_integer(floored.into()) >= lp_value - Rational::from_integer(rows.into());
        self.outcome.push((
            support_ok && floor_ok,
            format!("{source}: support {support}, bound {rows}, lp {lp_value}, floored {floored}"),
        ));
    }
}

fn criterion_1(ledger: &mut LpLedger) -> bool {
    let mut o = Outcome::new();
    let budgets = Budgets { exact_limit: 12, ..Budgets::default() };
    for i in 0..1000u64 {
        let n = 1 + (i % 30) as usize;
        let delta = delta_of((i / 30) as usize);
        let inst = suite_instance(n, delta.clone(), i);
        for order in [Order::Input, Order::Descending, Order::Ascending] {
            let p = greedy(&inst, order);
            o.check(check_partition(n, p.bins()).is_ok(), || format!("greedy {order:?} on #{i}: not a partition"));
            o.check(evaluate(&inst, &p) == Ok(p.covers()), || format!("greedy {order:?} on #{i}: cover count mismatch"));
        }
        let report = match run_afptas(&inst, &params(&delta), Mode::Oracle, &budgets) {
            Ok(r) => r,
            Err(e) => {
                o.check(false, || format!("scheme on #{i} failed: {e}"));
                continue;
            }
        };
        o.check(check_partition(n, &report.best.bins).is_ok(), || format!("scheme on #{i}: not a partition"));
        let revalidated = report.best_packing(&inst).and_then(|p| evaluate(&inst, &p));
        o.check(revalidated == Ok(report.best.covers), || format!("scheme on #{i}: reported {} vs {revalidated:?}", report.best.covers));
        for g in &report.guesses {
            if let Some(s) = &g.i1 {
                if s.lp_rows > 0 {
                    ledger.record(s.lp_support, s.lp_rows, &s.lp_value, s.floored_value, &format!("I1 LP of #{i}"));
                }
            }
            if let Some(s) = &g.i2 {
                for t in s.betas.iter().filter(|t| t.error.is_none() && t.reused_from.is_none()) {
                    ledger.record(t.support, t.sizes + 2, &t.lp_value, t.floored_value, &format!("I2 master of #{i}, beta {}", t.beta));
                }
            }
        }
    }
    o.report(1, "feasibility of greedy and scheme packings on 1000 instances")
}

fn criterion_2() -> bool {
    let mut o = Outcome::new();
    let budgets = Budgets { exact_limit: 14, ..Budgets::default() };
    for i in 0..200u64 {
        let n = 2 + (i % 13) as usize;
        let delta = delta_of(i as usize);
        let inst = suite_instance(n, delta.clone(), 5000 + i);
        let report = compare(&inst, &params(&delta), Mode::Oracle, &budgets).unwrap();
        let c = report.comparison.as_ref().unwrap();
        let ExactColumn::Value(opt) = c.exact else {
            o.check(false, || format!("#{i}: exact column skipped"));
            continue;
        };
        o.check(c.afptas <= opt, || format!("#{i}: scheme {} > optimum {opt}", c.afptas));
        for order in [Order::Input, Order::Descending, Order::Ascending] {
            let g = greedy(&inst, order).covers();
            o.check(g <= opt, || format!("#{i}: greedy {order:?} {g} > optimum {opt}"));
        }
    }
    o.report(2, "scheme and greedy never beat the exact optimum (n <= 14)")
}

fn criterion_3() -> bool {
    let mut o = Outcome::new();
    let mut inputs: Vec<Vec<u64>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..4 {
        inputs = inputs.into_iter().flat_map(|v| (1..=4).map(move |a| [v.clone(), vec![a]].concat())).collect();
        all.extend(inputs.iter().cloned());
    }
    let (mut yes, mut no) = (0, 0);
    for a in all {
        let Ok(partition) = PartitionInput::new(a) else { continue };
        for t in 1..=2 {
            let spec = GenerationSpec { partition: partition.clone(), generations: t };
            let inst = reduction_instance(&spec, reduction_delta(&spec)).unwrap();
            let (opt, _) = exact_opt(&inst, 20).unwrap();
            let expected = if partition.is_yes() { t as usize } else { 0 };
            if partition.is_yes() {
                yes += 1;
            } else {
                no += 1;
            }
            o.check(opt == expected, || format!("{:?}, T = {t}: optimum {opt}, expected {expected}", partition.a));
        }
    }
    println!("    reduction inputs: {yes} yes, {no} no");
    o.report(3, "reduction optimum is T on yes inputs and 0 on no inputs")
}

fn huge_items(inst: &Instance, p: &SchemeParams) -> Vec<usize> {
    (0..inst.len()).filter(|&j| p.class_of(inst.size(j)).is_some()).collect()
}

fn criterion_4(ledger: &mut LpLedger) -> bool {
    let mut o = Outcome::new();
    let mut unit_bins = 0;
    for i in 0..300u64 {
        let n = 2 + (i % 14) as usize;
        let delta = delta_of(i as usize);
        let inst = suite_instance(n, delta.clone(), 9000 + i);
        let base = params(&delta);
        for p in [base.clone(), base.clone().with_group_count(2), base.with_group_count(3)] {
            let items = huge_items(&inst, &p);
            let out = match solve_i1(&inst, &items, &p, DEFAULT_CONFIG_CAP) {
                Ok(out) => out,
                Err(e) => {
                    o.check(false, || format!("#{i}: {e}"));
                    continue;
                }
            };
            if out.lp_rows > 0 {
                ledger.record(out.lp_support, out.lp_rows, &out.lp_value, out.floored_value, &format!("I1 LP of #{i}"));
            }
            let lo = Rational::one() + &p.delta_small - &p.delta_small * &p.delta_small * int(2);
            for &b in &out.unit_bins {
                unit_bins += 1;
                let total = inst.total(&out.bins[b]);
                o.check(total >= lo && total < inst.upper(), || format!("#{i}: unit bin {:?} totals {total}", out.bins[b]));
            }
        }
    }
    println!("    unit-reward bins checked: {unit_bins}");
    o.report(4, "every unit-reward bin of the I1 solver is covered under original sizes")
}

/// Instance drawn from a handful of distinct huge sizes.
fn few_sizes_instance(rng: &mut ChaCha8Rng, delta: &Rational, p: &SchemeParams) -> Instance {
    let kinds = rng.gen_range(1..=4);
    let lo = (&p.delta_small * int(120)).to_integer();
    let lo: i64 = lo.try_into().unwrap();
    let palette: Vec<Rational> = (0..kinds).map(|_| ratio(rng.gen_range(lo.max(1)..=120), 120)).collect();
    let n = rng.gen_range(1..=9);
    let sizes = (0..n).map(|_| palette[rng.gen_range(0..kinds)].clone()).collect();
    Instance::new(delta.clone(), sizes).unwrap()
}

fn criterion_5(ledger: &mut LpLedger) -> bool {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for i in 0..150 {
        let delta = delta_of(i);
        let base = params(&delta);
        let p = if i % 2 == 0 { base } else { base.with_group_count(2) };
        let inst = few_sizes_instance(&mut rng, &delta, &p);
        let items = huge_items(&inst, &p);
        let table = group_up(&inst, &items, &p).size_table();
        if table.len() > 6 {
            continue;
        }
        let out = solve_i1(&inst, &items, &p, DEFAULT_CONFIG_CAP).unwrap();
        let sizes: Vec<Rational> = table.iter().map(|e| e.size.clone()).collect();
        let counts: Vec<u64> = table.iter().map(SizeEntry::count).collect();
        let lo = Rational::one() + &p.delta_small;
        let brute = multiset_opt(&sizes, &counts, &lo, &inst.upper());
        o.check(out.lp_value >= Rational::from_integer(brute.into()), || {
            format!("I1 instance {:?}: LP {} < rounded optimum {brute}", inst.sizes(), out.lp_value)
        });
    }

    for i in 0..120 {
        let delta = delta_of(i);
        let p = params(&delta);
        let k = rng.gen_range(1..=4);
        let sizes: Vec<Rational> = {
            let mut s = BTreeSet::new();
            while s.len() < k {
                s.insert(ratio(rng.gen_range(3..=60), 60));
            }
            s.into_iter().collect()
        };
        let counts: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        let sand = ratio(rng.gen_range(0..=12), 6);
        let beta = rng.gen_range(0..=3usize);
        let mut next = 0;
        let table: Vec<SizeEntry> = sizes
            .iter()
            .zip(&counts)
            .map(|(s, &c)| {
                let items = (next..next + c as usize).collect();
                next += c as usize;
                SizeEntry { size: s.clone(), items }
            })
            .collect();
        let master = build_and_solve_master(&table, &sand, beta, &p, DEFAULT_MAX_ROUNDS).unwrap();
        ledger.record(master.solution.support().len(), master.problem.rows.len(), &master.lp_value, {
            master.solution.primal.iter().map(|x| x.to_integer().try_into().unwrap_or(0u64)).sum()
        }, "sampled master");
        let full = full_master(&sizes, &counts, &sand, beta, &p.delta_small);
        let bound = (Rational::one() - &p.eps) * &full;
        o.check(master.lp_value >= bound, || {
            format!("master sizes {sizes:?} x {counts:?}, sand {sand}, beta {beta}: {} < (1-eps) * {full}", master.lp_value)
        });
    }
    o.report(5, "I1 LP dominates the rounded optimum; I2 master within (1 - eps) of the full LP")
}

fn full_master(sizes: &[Rational], counts: &[u64], sand: &Rational, beta: usize, delta_small: &Rational) -> Rational {
    let k = sizes.len();
    let mut lp = LpProblem::new(Sense::Maximize);
    for &c in counts {
        lp.add_row(Relation::Le, Rational::from_integer(c.into()), "size");
    }
    lp.add_row(Relation::Le, sand.clone(), "sand");
    lp.add_row(Relation::Le, Rational::from_integer(beta.into()), "sand_bins");
    for cfg in master_configs(sizes, counts, delta_small) {
        let mut entries: Vec<(usize, Rational)> =
            cfg.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i, Rational::from_integer(c.into()))).collect();
        if cfg.sand > Rational::zero() {
            entries.push((k, cfg.sand.clone()));
            entries.push((k + 1, Rational::one()));
        }
        lp.add_column(Column::new(Rational::one(), entries));
    }
    let s = lp::solve(&lp).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    s.objective
}

fn criterion_6(ledger: &LpLedger) -> bool {
    let mut o = Outcome::new();
    for (ok, what) in &ledger.outcome {
        o.check(*ok, || what.clone());
    }
    o.report(6, "basic-solution support and floor-rounding bounds on every LP solved above")
}

fn criterion_7() -> bool {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut certified, mut violated) = (0, 0);
    for i in 0..150 {
        let delta = delta_of(i);
        let p = params(&delta);
        let k = rng.gen_range(1..=5);
        let sizes: Vec<Rational> = {
            let mut s = BTreeSet::new();
            while s.len() < k {
                s.insert(ratio(rng.gen_range(2..=48), 48));
            }
            s.into_iter().collect()
        };
        let counts: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        let scale = rng.gen_range(1..=8);
        let y: Vec<Rational> = (0..k).map(|_| ratio(rng.gen_range(0..=24 * scale), 48)).collect();
        let duals = DualPoint { y, z1: ratio(rng.gen_range(0..=20), 10), z2: ratio(rng.gen_range(0..=10), 20) };
        let configs = master_configs(&sizes, &counts, &p.delta_small);
        match separate(&duals, &sizes, &counts, &p).unwrap() {
            OracleVerdict::Certified => {
                certified += 1;
                let lifted = duals.scaled(&(Rational::one() + &p.eps));
                for c in &configs {
                    let v = constraint_value(&lifted, &c.counts, &c.sand);
                    o.check(v >= Rational::one(), || format!("certified point violates {:?} + sand {} ({v})", c.counts, c.sand));
                }
            }
            OracleVerdict::Violated(w) => {
                violated += 1;
                let member = configs.iter().any(|c| c.counts == w.counts && c.sand == w.sand);
                o.check(member, || format!("witness {:?} + sand {} is not a configuration", w.counts, w.sand));
                let v = constraint_value(&duals, &w.counts, &w.sand);
                o.check(v < Rational::one(), || format!("witness {:?} has constraint value {v}", w.counts));
            }
            OracleVerdict::NegativeDual(_) => o.check(false, || "non-negative duals reported negative".into()),
        }
    }
    println!("    dual points: {certified} certified, {violated} violated");
    o.check(certified > 0 && violated > 0, || "both verdicts must occur".into());
    o.report(7, "separation oracle agrees with exhaustive configuration enumeration")
}

fn criterion_8() -> bool {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..400 {
        let k = rng.gen_range(1..=3);
        let counts: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=3)).collect();
        let value_units: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=12)).collect();
        let size_units: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=12)).collect();
        let sizes: Vec<Rational> = (0..k).map(|_| ratio(rng.gen_range(1..=30), rng.gen_range(1..=30))).collect();
        let objective = if rng.gen_bool(0.5) { Objective::Max } else { Objective::Min };
        let grid = GridIp {
            value_units: value_units.clone(),
            size_units: size_units.clone(),
            sizes: sizes.clone(),
            counts: counts.clone(),
            value_cap: rng.gen_range(0..=40),
            size_cap: rng.gen_range(0..=40),
            objective,
        };
        let table = sweep_dp(&grid).unwrap();
        let mut expected = vec![vec![None::<Rational>; grid.size_cap as usize + 1]; grid.value_cap as usize + 1];
        for c in count_vectors(&counts) {
            let v: u64 = c.iter().zip(&value_units).map(|(a, b)| a * b).sum();
            let s: u64 = c.iter().zip(&size_units).map(|(a, b)| a * b).sum();
            if v > grid.value_cap || s > grid.size_cap {
                continue;
            }
            let t = multiset_total(&sizes, &c);
            let cell = &mut expected[v as usize][s as usize];
            let better = match (cell.as_ref(), objective) {
                (None, _) => true,
                (Some(cur), Objective::Max) => t > *cur,
                (Some(cur), Objective::Min) => t < *cur,
            };
            if better {
                *cell = Some(t);
            }
        }
        for (v, row) in expected.iter().enumerate() {
            for (s, want) in row.iter().enumerate() {
                let got = table.value(v as u64, s as u64);
                o.check(got == *want, || format!("{grid:?} cell ({v}, {s}): {got:?} vs {want:?}"));
            }
        }
    }
    o.report(8, "sweep table equals per-cell brute force")
}

fn criterion_9() -> bool {
    let mut o = Outcome::new();
    for i in 0..200u64 {
        let n = 2 + (i % 13) as usize;
        let inst = suite_instance(n, int(1), 20_000 + i);
        let (opt, _) = exact_opt(&inst, 14).unwrap();
        let g = greedy(&inst, Order::Input).covers();
        o.check(opt <= 2 * g + 1, || format!("#{i}: optimum {opt}, greedy {g}"));
    }
    o.report(9, "greedy ratio 2 with additive slack 1 at delta = 1")
}

fn criterion_10() -> bool {
    let mut o = Outcome::new();
    for i in 0..12u64 {
        let delta = delta_of(i as usize);
        let n = 4 + (i as usize * 2);
        let a = suite_instance(n, delta.clone(), 31 + i);
        let b = suite_instance(n, delta.clone(), 31 + i);
        o.check(a == b, || format!("seed {}: generator differs", 31 + i));
        let mode = if i % 3 == 0 { Mode::Exhaustive } else { Mode::Oracle };
        let run = |jobs| {
            let budgets = Budgets { jobs, exact_limit: 12, guess_budget: 200, ..Budgets::default() };
            compare(&a, &params(&delta), mode, &budgets).unwrap().to_json()
        };
        let first = run(1);
        o.check(first == run(1), || format!("seed {}: reports differ between runs", 31 + i));
        o.check(first == run(2), || format!("seed {}: reports differ between job counts", 31 + i));
    }
    o.report(10, "identical seeds and flags give byte-identical reports")
}

#[test]
fn acceptance() {
    let mut ledger = LpLedger::default();
    let results = [
        criterion_1(&mut ledger),
        criterion_2(),
        criterion_3(),
        criterion_4(&mut ledger),
        criterion_5(&mut ledger),
        criterion_6(&ledger),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    println!(
        "NOT REPRODUCIBLE criterion 11: end-to-end asymptotic ratio; its additive constant exceeds every optimum reachable here, so criteria 4 to 8 check the constructive steps it composes"
    );
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
