use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use nearcover::classify::{check_nice, BinType, CertificatePair, CertificateVector, ClassIndex, SchemeParams};
use nearcover::exact::{exact_opt, DEFAULT_LIMIT};
use nearcover::generators::{
    random_instance, reduction_delta, reduction_instance, GenerationSpec, PartitionInput, SizeDistribution, DEFAULT_GRID,
};
use nearcover::greedy::{greedy, Order};
use nearcover::harness::{compare, csv_row, run_afptas, Budgets, Mode, CSV_HEADER};
use nearcover::model::{read_instance, read_packing, write_instance, write_packing, Instance};
use nearcover::rational::{parse_rational, Rational};
use nearcover::Error;

#[derive(Parser)]
#[command(name = "nearcover", version, about = "Near-exact bin covering solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance
    Gen(GenArgs),
    /// Run the approximation scheme and write a report
    Solve(SolveArgs),
    /// Exact optimum by subset dynamic programming
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Next-fit covering greedy
    Greedy {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Input)]
        order: Order,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scheme, greedy and exact side by side
    Compare {
        #[command(flatten)]
        solve: SolveArgs,
        /// Append a CSV summary row (header written when the file is new)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the niceness properties of a packing under a certificate
    CheckNice {
        instance: PathBuf,
        packing: PathBuf,
        /// JSON `{"certificate": {"<class>": [v, u]}, "types": {"<bin>": 1 | 2}}`
        certificate: PathBuf,
        #[arg(long, value_parser = parse_rational_arg)]
        eps: Option<Rational>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Uniform,
    TwoCluster,
    HugeHeavy,
    Reduction,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Family::Uniform)]
    family: Family,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, value_parser = parse_rational_arg)]
    delta: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_rational_arg)]
    lo: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    hi: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    lo2: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    hi2: Option<Rational>,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: u64,
    /// Comma-separated partition input for the reduction family
    #[arg(long, value_delimiter = ',')]
    partition: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    generations: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Overrides the instance's delta
    #[arg(long, value_parser = parse_rational_arg)]
    delta: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    eps: Option<Rational>,
    /// Accept eps above 1/12
    #[arg(long)]
    unsound_constants: bool,
    #[arg(long, value_enum, default_value_t = Mode::Oracle)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    guess_budget: u128,
    #[arg(long, default_value_t = nearcover::i1::DEFAULT_CONFIG_CAP)]
    config_cap: usize,
    /// Accepted for reproducible command lines; the scheme itself is deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Exit with status 3 instead of downgrading when the guess budget is exceeded
    #[arg(long)]
    no_fallback: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Format(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path, delta: Option<&Rational>) -> Result<Instance, Error> {
    let inst = read_instance(&read_file(path)?)?;
    match delta {
        Some(d) => inst.with_delta(d.clone()),
        None => Ok(inst),
    }
}

fn scheme_params(inst: &Instance, eps: Option<&Rational>, unsound: bool) -> Result<SchemeParams, Error> {
    let eps = eps.cloned().unwrap_or_else(nearcover::classify::default_eps);
    if unsound {
        SchemeParams::with_unsound_constants(inst.delta().clone(), eps)
    } else {
        SchemeParams::new(inst.delta().clone(), eps)
    }
}

fn budgets(args: &SolveArgs) -> Budgets {
    Budgets {
        guess_budget: args.guess_budget,
        config_cap: args.config_cap,
        jobs: args.jobs.max(1),
        no_fallback: args.no_fallback,
        ..Budgets::default()
    }
}

fn generate(args: &GenArgs) -> Result<Instance, Error> {
    let need = |v: &Option<Rational>, name: &str| {
        v.clone().ok_or_else(|| Error::InvalidParams(format!("--{name} is required for this family")))
    };
    let delta = args.delta.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
    let dist = match args.family {
        Family::Reduction => {
            let spec = GenerationSpec { partition: PartitionInput::new(args.partition.clone())?, generations: args.generations };
            let delta = args.delta.clone().unwrap_or_else(|| reduction_delta(&spec));
            return reduction_instance(&spec, delta);
        }
        Family::Uniform => SizeDistribution::Uniform { lo: need(&args.lo, "lo")?, hi: need(&args.hi, "hi")? },
        Family::TwoCluster => SizeDistribution::TwoCluster {
            lo1: need(&args.lo, "lo")?,
            hi1: need(&args.hi, "hi")?,
            lo2: need(&args.lo2, "lo2")?,
            hi2: need(&args.hi2, "hi2")?,
        },
        Family::HugeHeavy => SizeDistribution::HugeHeavy { huge_lo: need(&args.lo, "lo")?, small_hi: need(&args.hi, "hi")? },
    };
    random_instance(args.n, &dist, delta, args.seed, args.grid)
}

#[derive(Deserialize)]
struct NiceDoc {
    certificate: BTreeMap<u64, [u64; 2]>,
    types: BTreeMap<usize, u8>,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(args) => emit(args.out.as_deref(), &write_instance(&generate(&args)?)),
        Command::Solve(args) => {
            let inst = load_instance(&args.instance, args.delta.as_ref())?;
            let params = scheme_params(&inst, args.eps.as_ref(), args.unsound_constants)?;
            let report = run_afptas(&inst, &params, args.mode, &budgets(&args))?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(args.out.as_deref(), &report.to_json())
        }
        Command::Exact { instance, limit, out } => {
            let inst = load_instance(&instance, None)?;
            let (opt, packing) = exact_opt(&inst, limit)?;
            eprintln!("optimum: {opt}");
            emit(out.as_deref(), &write_packing(&packing))
        }
        Command::Greedy { instance, order, out } => {
            let inst = load_instance(&instance, None)?;
            let packing = greedy(&inst, order);
            eprintln!("covered: {}", packing.covers());
            emit(out.as_deref(), &write_packing(&packing))
        }
        Command::Compare { solve, csv } => {
            let inst = load_instance(&solve.instance, solve.delta.as_ref())?;
            let params = scheme_params(&inst, solve.eps.as_ref(), solve.unsound_constants)?;
            let report = compare(&inst, &params, solve.mode, &budgets(&solve))?;
            if let Some(path) = csv {
                let mut text = if path.exists() { read_file(&path)? } else { format!("{CSV_HEADER}\n") };
                text.push_str(&csv_row(&report));
                text.push('\n');
                std::fs::write(&path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            }
            emit(solve.out.as_deref(), &report.to_json())
        }
        Command::CheckNice { instance, packing, certificate, eps } => {
            let inst = load_instance(&instance, None)?;
            let packing = read_packing(&read_file(&packing)?, &inst)?;
            let doc: NiceDoc = serde_json::from_str(&read_file(&certificate)?).map_err(|e| Error::Format(e.to_string()))?;
            let params = scheme_params(&inst, eps.as_ref(), false)?;
            let mut cert = CertificateVector::zero();
            for (psi, [v, u]) in doc.certificate {
                cert.set(ClassIndex(psi), CertificatePair { v, u });
            }
            let mut types = BTreeMap::new();
            for (bin, t) in doc.types {
                let kind = match t {
                    1 => BinType::One,
                    2 => BinType::Two,
                    other => return Err(Error::Format(format!("bin type must be 1 or 2, got {other}"))),
                };
                types.insert(bin, kind);
            }
            let report = check_nice(&inst, &params, &packing, &cert, &types);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.is_nice() {
                Ok(())
            } else {
                Err(Error::InvalidPacking("packing is not nice".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                Error::Number(_)
                | Error::Format(_)
                | Error::InvalidInstance(_)
                | Error::InvalidPacking(_)
                | Error::InvalidParams(_)
                | Error::InvalidCertificate(_)
                | Error::TooLarge { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
