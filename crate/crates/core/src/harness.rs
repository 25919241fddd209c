//! Experiment driver: certificate guessing, subproblem assembly, and reports.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classify::{classify, derive_certificate, enumerate_certificates, split_input, CertificateVector, SchemeParams};
use crate::error::{Error, Result};
use crate::exact::{exact_opt, DEFAULT_LIMIT};
use crate::greedy::{greedy, Order};
use crate::i1::{solve_i1, DEFAULT_CONFIG_CAP};
use crate::i2::{solve_i2, BetaTrace, DEFAULT_MAX_ROUNDS};
use crate::model::{write_instance, Instance, Packing};
use crate::rational::{format_rational, Rational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every certificate vector, within the guess budget.
    Exhaustive,
    /// A handful of certificates read off greedy and exact witness packings.
    Oracle,
}

#[derive(Debug, Clone)]
pub struct Budgets {
    pub guess_budget: u128,
    pub config_cap: usize,
    pub max_rounds: usize,
    /// Largest instance for which the exact witness and comparison are computed.
    pub exact_limit: usize,
    pub jobs: usize,
    /// Fail instead of downgrading when the guess budget is exceeded.
    pub no_fallback: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            guess_budget: 10_000,
            config_cap: DEFAULT_CONFIG_CAP,
            max_rounds: DEFAULT_MAX_ROUNDS,
            exact_limit: DEFAULT_LIMIT,
            jobs: 1,
            no_fallback: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct I1Summary {
    pub items: usize,
    pub covered: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub lp_value: Rational,
    pub lp_rows: usize,
    pub lp_support: usize,
    pub floored_value: u64,
    pub configurations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct I2Summary {
    pub items: usize,
    pub covered: usize,
    pub best_beta: Option<usize>,
    pub betas: Vec<BetaTrace>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GuessRecord {
    pub index: usize,
    pub source: String,
    pub certificate: CertificateVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i1: Option<I1Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i2: Option<I2Summary>,
    pub dedicated: usize,
    pub covers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BestRecord {
    pub guess: Option<usize>,
    pub covers: usize,
    pub bins: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ExactColumn {
    Value(usize),
    Skipped(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub afptas: usize,
    pub greedy: usize,
    pub exact: ExactColumn,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance_digest: String,
    pub items: usize,
    pub delta: String,
    pub eps: String,
    pub delta_small: String,
    pub certifiable: bool,
    pub requested_mode: Mode,
    pub mode: Mode,
    pub warnings: Vec<String>,
    pub guesses: Vec<GuessRecord>,
    pub best: BestRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn best_packing(&self, instance: &Instance) -> Result<Packing> {
        Packing::new(instance, self.best.bins.clone())
    }
}

/// Hex SHA-256 of the canonical instance document.
pub fn instance_digest(instance: &Instance) -> String {
    hex::encode(Sha256::digest(write_instance(instance).as_bytes()))
}

fn oracle_guesses(
    instance: &Instance,
    params: &SchemeParams,
    classes: &crate::classify::Classification,
    exact_limit: usize,
) -> Vec<(String, CertificateVector)> {
    let mut out = vec![("zero".to_string(), CertificateVector::zero())];
    for order in [Order::Input, Order::Descending, Order::Ascending] {
        let packing = greedy(instance, order);
        let label = format!("greedy-{}", format!("{order:?}").to_lowercase());
        out.push((label, derive_certificate(instance, params, classes, &packing).0));
    }
    if instance.len() <= exact_limit {
        if let Ok((_, packing)) = exact_opt(instance, exact_limit) {
            out.push(("exact".to_string(), derive_certificate(instance, params, classes, &packing).0));
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|(_, c)| seen.insert(c.clone()));
    out
}

fn run_guess(
    instance: &Instance,
    params: &SchemeParams,
    classes: &crate::classify::Classification,
    index: usize,
    source: String,
    certificate: CertificateVector,
    budgets: &Budgets,
) -> (GuessRecord, Option<Vec<Vec<usize>>>) {
    let mut record = GuessRecord {
        index,
        source,
        certificate: certificate.clone(),
        i1: None,
        i2: None,
        dedicated: 0,
        covers: 0,
        error: None,
    };
    let outcome = (|| -> Result<Vec<Vec<usize>>> {
        let split = split_input(classes, params, &certificate)?;
        let i1 = solve_i1(instance, &split.i1, params, budgets.config_cap)?;
        record.i1 = Some(I1Summary {
            items: split.i1.len(),
            covered: i1.covered,
            lp_value: i1.lp_value.clone(),
            lp_rows: i1.lp_rows,
            lp_support: i1.lp_support,
            floored_value: i1.floored_value,
            configurations: i1.configurations,
        });
        let i2 = solve_i2(instance, &split.i2, params, budgets.max_rounds)?;
        record.i2 = Some(I2Summary {
            items: split.i2.len(),
            covered: i2.covered,
            best_beta: i2.best_beta,
            betas: i2.trace.clone(),
        });
        let unused = split.unused(instance.len());
        record.dedicated = unused.len();
        let mut bins = i1.bins;
        bins.extend(i2.bins);
        bins.extend(unused.into_iter().map(|j| vec![j]));
        Ok(bins)
    })();
    match outcome.and_then(|bins| Packing::new(instance, bins)) {
        Ok(packing) => {
            record.covers = packing.covers();
            (record, Some(packing.into_bins()))
        }
        Err(e) => {
            log::warn!("guess {index} failed: {e}");
            record.error = Some(e.to_string());
            (record, None)
        }
    }
}

/// Runs the scheme for every guessed certificate and keeps the best packing
/// (lowest guess index on ties).
pub fn run_afptas(instance: &Instance, params: &SchemeParams, mode: Mode, budgets: &Budgets) -> Result<RunReport> {
    if params.delta != *instance.delta() {
        return Err(Error::InvalidParams(format!(
            "parameters are for delta = {}, instance has delta = {}",
            params.delta,
            instance.delta()
        )));
    }
    let classes = classify(instance, params);
    let mut warnings = Vec::new();
    if !params.is_certifiable() {
        warnings.push("non-default constants: guarantees do not apply".to_string());
    }
    let mut effective = mode;
    let guesses: Vec<(String, CertificateVector)> = match mode {
        Mode::Exhaustive => match enumerate_certificates(&classes, params, budgets.guess_budget) {
            Ok(all) => all.enumerate().map(|(k, c)| (format!("enumerated-{k}"), c)).collect(),
            Err(e @ Error::BudgetExceeded { .. }) => {
                if budgets.no_fallback {
                    return Err(e);
                }
                warnings.push(format!("{e}; downgraded to oracle-guided mode"));
                effective = Mode::Oracle;
                oracle_guesses(instance, params, &classes, budgets.exact_limit)
            }
            Err(e) => return Err(e),
        },
        Mode::Oracle => oracle_guesses(instance, params, &classes, budgets.exact_limit),
    };

    let work = |(index, (source, cert)): (usize, (String, CertificateVector))| {
        run_guess(instance, params, &classes, index, source, cert, budgets)
    };
    let results: Vec<(GuessRecord, Option<Vec<Vec<usize>>>)> = if budgets.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(budgets.jobs)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        pool.install(|| guesses.into_par_iter().enumerate().map(work).collect())
    } else {
        guesses.into_iter().enumerate().map(work).collect()
    };

    let mut best = BestRecord { guess: None, covers: 0, bins: Vec::new() };
    let mut records = Vec::with_capacity(results.len());
    for (record, bins) in results {
        if let Some(bins) = bins {
            if best.guess.is_none() || record.covers > best.covers {
                best = BestRecord { guess: Some(record.index), covers: record.covers, bins };
            }
        }
        records.push(record);
    }
    if best.guess.is_none() {
        warnings.push("every guess failed; reporting dedicated bins".to_string());
        let packing = Packing::singletons(instance);
        best = BestRecord { guess: None, covers: packing.covers(), bins: packing.into_bins() };
    }

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        instance_digest: instance_digest(instance),
        items: instance.len(),
        delta: format_rational(&params.delta),
        eps: format_rational(&params.eps),
        delta_small: format_rational(&params.delta_small),
        certifiable: params.is_certifiable(),
        requested_mode: mode,
        mode: effective,
        warnings,
        guesses: records,
        best,
        comparison: None,
    })
}

/// [`run_afptas`] plus greedy (input order) and, for small inputs, the exact optimum.
pub fn compare(instance: &Instance, params: &SchemeParams, mode: Mode, budgets: &Budgets) -> Result<RunReport> {
    let mut report = run_afptas(instance, params, mode, budgets)?;
    let exact = if instance.len() <= budgets.exact_limit {
        ExactColumn::Value(exact_opt(instance, budgets.exact_limit)?.0)
    } else {
        ExactColumn::Skipped("skipped".to_string())
    };
    report.comparison =
        Some(Comparison { afptas: report.best.covers, greedy: greedy(instance, Order::Input).covers(), exact });
    Ok(report)
}

pub const CSV_HEADER: &str = "instance_digest,items,delta,eps,mode,guesses,afptas,greedy,exact";

/// One CSV summary line matching [`CSV_HEADER`].
pub fn csv_row(report: &RunReport) -> String {
    let (greedy, exact) = match &report.comparison {
        Some(c) => (
            c.greedy.to_string(),
            match &c.exact {
                ExactColumn::Value(v) => v.to_string(),
                ExactColumn::Skipped(s) => s.clone(),
            },
        ),
        None => (String::new(), String::new()),
    };
    let mode = match report.mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Oracle => "oracle",
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        report.instance_digest,
        report.items,
        report.delta,
        report.eps,
        mode,
        report.guesses.len(),
        report.best.covers,
        greedy,
        exact
    )
}
