//! `eudoxus` command-line front end.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use eudoxus::expr::{evaluate_str, ExprError};
use eudoxus::lemmas::certificate_audit;
use eudoxus::multidim::{MultiAH, RatMatrix};
use eudoxus::numeric::{fmt_rat, parse_rat};
use eudoxus::{digits, AlmostHom, BigInt, Budget, Error, Rat};
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_EVAL: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VIOLATED: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "eudoxus",
    version,
    about = "Exact real arithmetic on Eudoxus reals",
    after_help = "EXPRESSIONS:\n  Integers, + - * /, unary minus, parentheses and sqrt(...).\n  \
                  Two adjacent integer literals around '/' form an exact rational (3/2);\n  \
                  anything else around '/' is division (1/(2+1), (3)/2).\n\n\
                  EXIT CODES:\n  0 ok, 1 usage/parse/file error, 2 evaluation error,\n  \
                  3 budget exceeded, 4 audit or verification failed"
)]
struct Cli {
    /// Evaluation arguments are capped at 2^BUDGET.
    #[arg(long, global = true, env = "EUDOXUS_BUDGET", default_value_t = Budget::DEFAULT_EXPONENT,
          value_parser = clap::value_parser!(u32).range(1..))]
    budget: u32,

    /// Seed for audits and noisy matrix lifts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Plain)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Plain,
    JsonLines,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a decimal approximation within 10^-N.
    Eval {
        expr: String,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        digits: u32,
    },
    /// Print the values f(1), ..., f(M) of a normal-form representative.
    Colonnade {
        expr: String,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
    /// Sample the additive defect against the claimed certificate.
    Certify {
        expr: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        range: u64,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Lift a matrix with seeded noise and recover it by enclosure.
    MatrixRecover {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        noise: u64,
        /// Target interval width, as num/den or an integer.
        #[arg(long, default_value = "1/100", value_parser = parse_eps)]
        eps: Rat,
    },
    /// Time a fixed workload.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Digits,
    Mul,
    Recip,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Digits => "digits",
            Suite::Mul => "mul",
            Suite::Recip => "recip",
        }
    }
}

fn parse_eps(text: &str) -> Result<Rat, String> {
    let r = parse_rat(text).map_err(|e| e.to_string())?;
    if r <= Rat::from_integer(BigInt::from(0)) {
        return Err("eps must be positive".into());
    }
    Ok(r)
}

/// A failure carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse(p) => Failure::new(EXIT_USAGE, p),
            ExprError::Eval(e) => e.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Malformed { .. } => EXIT_USAGE,
            _ => EXIT_EVAL,
        };
        Failure::new(code, e)
    }
}

type Outcome = Result<Vec<String>, Failure>;

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records serialize")
}

#[derive(Serialize)]
struct EvalRecord<'a> {
    expr: &'a str,
    digits: u32,
    value: String,
}

fn cmd_eval(cli: &Cli, expr: &str, n: u32) -> Outcome {
    let budget = budget_of(cli);
    let x = evaluate_str(expr, budget)?;
    let value = digits(&x, n, budget)?;
    Ok(vec![match cli.output {
        Output::Plain => value,
        Output::JsonLines => json(&EvalRecord {
            expr,
            digits: n,
            value,
        }),
    }])
}

#[derive(Serialize)]
struct ColonnadeRecord {
    p: u64,
    value: String,
}

fn cmd_colonnade(cli: &Cli, expr: &str, count: u64) -> Outcome {
    let budget = budget_of(cli);
    let x = evaluate_str(expr, budget)?;
    let value_at: Box<dyn Fn(&BigInt) -> BigInt> = match x.exact() {
        Some(exact) => {
            let exact = exact.clone();
            Box::new(move |p| exact.floor_mul(p))
        }
        None => {
            let c = x.canonicalize(budget)?;
            Box::new(move |p| c.eval(p))
        }
    };
    Ok((1..=count)
        .map(|p| {
            let value = value_at(&BigInt::from(p)).to_string();
            match cli.output {
                Output::Plain => value,
                Output::JsonLines => json(&ColonnadeRecord { p, value }),
            }
        })
        .collect())
}

#[derive(Serialize)]
struct AuditRecord {
    label: String,
    samples: u64,
    max_defect_observed: String,
    cert_claimed: String,
    violated: bool,
}

fn cmd_certify(cli: &Cli, expr: &str, range: u64, samples: u64) -> Outcome {
    let x = evaluate_str(expr, budget_of(cli))?;
    let report = certificate_audit(&x, range, samples, cli.seed)?;
    let line = match cli.output {
        Output::Plain => report.to_string(),
        Output::JsonLines => json(&AuditRecord {
            label: report.label.clone(),
            samples: report.samples,
            max_defect_observed: report.max_defect_observed.to_string(),
            cert_claimed: report.cert_claimed.to_string(),
            violated: report.violated,
        }),
    };
    if report.violated {
        return Err(Failure::new(
            EXIT_VIOLATED,
            format!("certificate violated: {line}"),
        ));
    }
    Ok(vec![line])
}

#[derive(Serialize)]
struct EntryRecord {
    row: usize,
    col: usize,
    lo: String,
    hi: String,
    truth: String,
    contained: bool,
    resolved: bool,
}

fn cmd_matrix_recover(cli: &Cli, file: &PathBuf, noise: u64, eps: &Rat) -> Outcome {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", file.display())))?;
    let m = RatMatrix::parse_grid(&text)?;
    let f = MultiAH::from_matrix_noisy(&m, noise, cli.seed);
    let rec = f.recover_matrix(eps, budget_of(cli))?;

    let mut lines = Vec::new();
    if cli.output == Output::Plain {
        lines.extend(rec.matrix.to_string().lines().map(str::to_owned));
    }
    let mut all_ok = true;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let iv = rec.matrix.get(i, j);
            let truth = m.get(i, j);
            let contained = iv.contains(truth);
            let resolved = !rec.unresolved.contains(&(i, j));
            all_ok &= contained;
            lines.push(match cli.output {
                Output::Plain => {
                    let verdict = match (contained, resolved) {
                        (true, true) => "contained",
                        (true, false) => "contained unresolved",
                        (false, _) => "missed",
                    };
                    format!("{i} {j} {verdict}")
                }
                Output::JsonLines => json(&EntryRecord {
                    row: i,
                    col: j,
                    lo: fmt_rat(iv.lo()),
                    hi: fmt_rat(iv.hi()),
                    truth: fmt_rat(truth),
                    contained,
                    resolved,
                }),
            });
        }
    }
    if !all_ok {
        return Err(Failure::new(
            EXIT_VIOLATED,
            lines.join("\n") + "\nrecovered interval misses an entry",
        ));
    }
    if !rec.is_complete() {
        for l in &lines {
            println!("{l}");
        }
        return Err(Failure::new(
            EXIT_BUDGET,
            format!(
                "{} entries not refined to width {} within budget",
                rec.unresolved.len(),
                fmt_rat(eps)
            ),
        ));
    }
    Ok(lines)
}

#[derive(Serialize)]
struct BenchRecord {
    suite: &'static str,
    iterations: u64,
    elapsed_seconds: f64,
}

fn cmd_bench(cli: &Cli, suite: Suite) -> Outcome {
    let budget = budget_of(cli);
    let start = Instant::now();
    let iterations = match suite {
        Suite::Digits => {
            let x = AlmostHom::sqrt_int(2)?;
            std::hint::black_box(digits(&x, 50, budget)?);
            1
        }
        Suite::Mul => {
            let p = BigInt::from(1_000_003);
            for k in 1..=1000i64 {
                let x = AlmostHom::sqrt_int(k)?;
                let y = AlmostHom::from_rational(Rat::new(BigInt::from(k), BigInt::from(7)));
                std::hint::black_box(x.times(&y).eval(&p));
            }
            1000
        }
        Suite::Recip => {
            let p = BigInt::from(1_000_003);
            for k in 1..=100i64 {
                let x = AlmostHom::sqrt_int(k + 1)?.recip(budget)?;
                std::hint::black_box(x.eval(&p));
            }
            100
        }
    };
    let elapsed = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok(vec![json(&BenchRecord {
        suite: suite.name(),
        iterations,
        elapsed_seconds: elapsed,
    })])
}

fn budget_of(cli: &Cli) -> Budget {
    Budget::new(cli.budget).expect("clap enforces budget >= 1")
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval { expr, digits } => cmd_eval(cli, expr, *digits),
        Command::Colonnade { expr, count } => cmd_colonnade(cli, expr, *count),
        Command::Certify {
            expr,
            range,
            samples,
        } => cmd_certify(cli, expr, *range, *samples),
        Command::MatrixRecover { file, noise, eps } => cmd_matrix_recover(cli, file, *noise, eps),
        Command::Bench { suite } => cmd_bench(cli, *suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
