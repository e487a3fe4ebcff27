use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use two_tower::arith::{jacobi, quartic_residue_2};
use two_tower::harness::{run_scan_with_cache, ClassCache, Format, Lemma, Render};
use two_tower::iwasawa::{kida_input_for_pair, kida_lambda_minus, splitting};
use two_tower::kuroda::{kuroda_h2, kuroda_h2_exponent, kuroda_v, KurodaInput};
use two_tower::quadratic::{class_data, fundamental_unit};
use two_tower::tower::{pi_candidates, predict};
use two_tower::unit_lattice::{cm_unit_index, decompose_unit, hasse_index, unit_index, DecompCase, MultiQuadField};
use two_tower::Error;

#[derive(Parser)]
#[command(name = "two-tower", version, about = "Quadratic and multiquadratic invariants and 2-class field tower predictions")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Table)]
    format: OutFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    #[value(name = "q")]
    Q,
    #[value(name = "2q")]
    TwoQ,
    #[value(name = "q1q2")]
    Q1Q2,
    #[value(name = "2q1q2")]
    TwoQ1Q2,
}

impl From<CaseArg> for DecompCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Q => DecompCase::Q,
            CaseArg::TwoQ => DecompCase::TwoQ,
            CaseArg::Q1Q2 => DecompCase::Q1Q2,
            CaseArg::TwoQ1Q2 => DecompCase::TwoQ1Q2,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental unit of Q(sqrt d).
    Pell { d: u64 },
    /// Wide and narrow class numbers of Q(sqrt d).
    Classdata {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Jacobi symbol (a/n).
    Jacobi {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        n: i64,
    },
    /// Quartic residue symbol (2/p)_4.
    Quartic2 { p: u64 },
    /// Square-root decomposition of a fundamental unit.
    Decompose {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        q1: u64,
        #[arg(long)]
        q2: Option<u64>,
    },
    /// Unit index of a multiquadratic field.
    Qindex {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gens: Vec<i64>,
    },
    /// 2-class number from the class number formula with a given unit index.
    Kuroda {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gens: Vec<i64>,
        #[arg(long)]
        q: u64,
    },
    /// Hasse unit index of a CM multiquadratic field.
    Hasse {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gens: Vec<i64>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
        n0: u32,
    },
    /// Prime decomposition of q in Q(zeta_{2^{n+2}}) and its real subfield.
    Splitting { q: u64, n: u32 },
    /// lambda^- of Q(i, sqrt q1, sqrt q2) by Kida's formula.
    Kida {
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        pair: Vec<u64>,
    },
    /// Tower prediction for K_n = Q(zeta_{2^{n+2}}, sqrt d).
    Predict {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u32,
    },
    /// Candidate primes pi above p.
    Pi { p: u64 },
    /// Run a lemma scan up to a bound.
    Scan {
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Class-number cache file (JSON lines), read before and written after the scan.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Undecided square tests tolerated before exiting with status 3.
        #[arg(long, default_value_t = 0)]
        max_unknown: u64,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Hypothesis(_) | Error::Cache(_) => EXIT_USAGE,
        Error::IdentityFailure(_) | Error::KurodaInconsistent { .. } => EXIT_FAILURE,
        Error::Indeterminate(_) | Error::FactorizationFailed { .. } | Error::Overflow(_) => EXIT_RESOURCE,
    }
}

fn run(cli: Cli) -> Result<(String, u8), Error> {
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Table => Format::Table,
    };
    let out = |r: &dyn Fn(Format) -> String| Ok((r(format), 0));
    match cli.command {
        Command::Pell { d } => {
            let e = fundamental_unit(d)?;
            out(&|f| e.render(f))
        }
        Command::Classdata { d } => {
            let c = class_data(d)?;
            out(&|f| c.render(f))
        }
        Command::Jacobi { a, n } => {
            let v = json!({ "a": a, "n": n, "symbol": jacobi(a, n)? });
            out(&|f| v.render(f))
        }
        Command::Quartic2 { p } => {
            let v = json!({ "p": p.to_string(), "symbol": quartic_residue_2(p)? });
            out(&|f| v.render(f))
        }
        Command::Decompose { case, q1, q2 } => {
            let d = decompose_unit(case.into(), q1, q2)?;
            out(&|f| d.render(f))
        }
        Command::Qindex { gens } => {
            let field = MultiQuadField::new(&gens)?;
            let v = if field.is_real() { serde_json::to_value(unit_index(&field)?) } else { serde_json::to_value(cm_unit_index(&field)?) };
            let v = v.expect("results serialize");
            out(&|f| v.render(f))
        }
        Command::Kuroda { gens, q } => {
            let field = MultiQuadField::new(&gens)?;
            let v = kuroda_v(field.k() as u32, field.is_real())?;
            let input = KurodaInput::from_field(field, q)?;
            let exponent = kuroda_h2_exponent(&input)?;
            let h2 = kuroda_h2(&input)?;
            let classes: serde_json::Map<String, serde_json::Value> =
                input.subfield_class.iter().map(|(d, c)| (d.to_string(), json!(c.h2.to_string()))).collect();
            let v = json!({
                "gens": input.field.gens(),
                "q": q.to_string(),
                "v": v,
                "subfield_h2": classes,
                "exponent": exponent,
                "h2": h2.to_string(),
            });
            out(&|f| v.render(f))
        }
        Command::Hasse { gens, n0 } => {
            let h = hasse_index(&MultiQuadField::new(&gens)?, Some(n0))?;
            out(&|f| h.render(f))
        }
        Command::Splitting { q, n } => {
            let s = splitting(q, n)?;
            out(&|f| s.render(f))
        }
        Command::Kida { pair } => {
            let [q1, q2] = pair[..] else {
                return Err(Error::InvalidInput(format!("--pair needs two primes, got {}", pair.len())));
            };
            let input = kida_input_for_pair(q1, q2)?;
            let lambda = kida_lambda_minus(&input)?;
            let v = json!({ "pair": [q1.to_string(), q2.to_string()], "input": input, "lambda_minus": lambda });
            out(&|f| v.render(f))
        }
        Command::Predict { d, n } => {
            let p = predict(d, n)?;
            out(&|f| p.render(f))
        }
        Command::Pi { p } => {
            let c = pi_candidates(p)?;
            out(&|f| c.render(f))
        }
        Command::Scan { lemma, bound, jobs, cache, max_unknown } => {
            let lemma: Lemma = lemma.parse()?;
            let memo = match &cache {
                Some(path) => {
                    let (memo, stats) = ClassCache::load(path)?;
                    log::info!("cache {}: {} entries, {} corrupt lines skipped", path.display(), stats.entries, stats.corrupt);
                    memo
                }
                None => ClassCache::new(),
            };
            let report = run_scan_with_cache(lemma, bound, jobs, &memo)?;
            if let Some(path) = &cache {
                memo.store(path)?;
            }
            let code = if !report.failures.is_empty() {
                EXIT_FAILURE
            } else if report.unknown > max_unknown {
                EXIT_RESOURCE
            } else {
                0
            };
            Ok((report.render(format), code))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            // a closed pipe is not an error worth reporting
            let _ = write!(std::io::stdout().lock(), "{text}{nl}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
