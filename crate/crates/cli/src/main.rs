//! Command line front end: exact question mark evaluations and
//! machine-readable tables for the measure-side computations.
//!
//! Output is CSV with a header row by default; `--json` switches the
//! table subcommands to one JSON object per line. Identical invocations
//! produce byte-identical output. Exit codes: 0 success, 1 domain error,
//! 2 usage error, 3 cell budget exhausted (partial results are still
//! printed, with a warning on stderr).

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use minkowski_core::contfrac::{Dyadic, Rational};
use minkowski_core::error::Error;
use minkowski_core::fourier::{coeff_table, fit_decay, FourierCoefficient};
use minkowski_core::measure::{
    dimension_from_integral, kinney_dimension, mu_interval, DimensionEstimate, MuSampler,
    DEFAULT_CELL_BUDGET,
};
use minkowski_core::qmark::{box_exact, qmark_exact};

#[derive(Parser)]
#[command(
    name = "minkowski",
    version,
    about = "Minkowski's question mark function, its Stieltjes measure, and the Fourier side of both"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate ?(x) exactly; x is a rational in [0, 1] ("2/5", "0.4", "1")
    Qmark {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Invert ? exactly; y must be a dyadic rational in [0, 1] ("3/8", "0.375")
    Unqmark {
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// Exact measure of an interval: ?(b) - ?(a)
    Measure {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Hausdorff dimension of the measure, with a certified error bound
    Dim {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        /// One JSON object per line instead of CSV
        #[arg(long)]
        json: bool,
    },
    /// Fourier-Stieltjes coefficients for every n in [from, to]
    Fourier {
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Decay exponent fit over dyadic blocks j in [from, to]
    Decay {
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Draw samples from the measure, one per line
    Sample {
        #[arg(long)]
        count: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long = "mass-tol", default_value_t = 1e-9)]
        mass_tol: f64,
    },
}

/// Anything the front end can fail on, wrapping the library errors.
#[derive(Debug)]
enum CliError {
    Core(Error),
    Parse(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    match run(cli.cmd, &mut out) {
        Ok(code) => {
            if out.flush().is_err() {
                return ExitCode::from(1);
            }
            code
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Core(Error::BudgetExhausted { .. })
        | CliError::Core(Error::CoeffBudgetExhausted { .. }) => 3,
        _ => 1,
    }
}

fn run(cmd: Cmd, out: &mut impl Write) -> Result<ExitCode, CliError> {
    match cmd {
        Cmd::Qmark { x } => {
            let x = parse_rational(&x)?;
            writeln!(out, "{}", qmark_exact(&x)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Unqmark { y } => {
            let y = parse_dyadic(&y)?;
            writeln!(out, "{}", box_exact(&y)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Measure { a, b } => {
            let a = parse_rational(&a)?;
            let b = parse_rational(&b)?;
            writeln!(out, "{}", mu_interval(&a, &b)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Dim { tol, budget, json } => run_dim(tol, budget, json, out),
        Cmd::Fourier {
            from,
            to,
            tol,
            budget,
            json,
        } => run_fourier(from, to, tol, budget, json, out),
        Cmd::Decay {
            from,
            to,
            tol,
            budget,
            json,
        } => run_decay(from, to, tol, budget, json, out),
        Cmd::Sample {
            count,
            seed,
            mass_tol,
        } => {
            let mut sampler = MuSampler::new(seed);
            for _ in 0..count {
                writeln!(out, "{}", sampler.sample(mass_tol)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct DimRecord {
    dim: f64,
    err_bound: f64,
    integral: f64,
    integral_err: f64,
}

fn run_dim(tol: f64, budget: u64, json: bool, out: &mut impl Write) -> Result<ExitCode, CliError> {
    let (estimate, exhausted) = match kinney_dimension(tol, budget) {
        Ok(d) => (d, false),
        Err(Error::BudgetExhausted { partial, .. }) => (dimension_from_integral(&partial)?, true),
        Err(e) => return Err(e.into()),
    };
    write_dim(&estimate, json, out)?;
    if exhausted {
        eprintln!(
            "warning: cell budget {budget} exhausted; bound {} exceeds tolerance {tol}",
            estimate.integral.err_bound
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_dim(d: &DimensionEstimate, json: bool, out: &mut impl Write) -> Result<(), CliError> {
    let record = DimRecord {
        dim: d.dim,
        err_bound: d.err_bound,
        integral: d.integral.value,
        integral_err: d.integral.err_bound,
    };
    if json {
        writeln!(out, "{}", serde_json::to_string(&record).expect("serializable"))
            ?;
    } else {
        writeln!(out, "dim,err_bound,integral,integral_err")?;
        writeln!(
            out,
            "{},{},{},{}",
            record.dim, record.err_bound, record.integral, record.integral_err
        )
        ?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FourierRecord {
    n: i64,
    re: f64,
    im: f64,
    abs: f64,
    err_bound: f64,
}

impl From<&FourierCoefficient> for FourierRecord {
    fn from(c: &FourierCoefficient) -> Self {
        FourierRecord {
            n: c.n,
            re: c.re,
            im: c.im,
            abs: c.abs(),
            err_bound: c.err_bound,
        }
    }
}

fn run_fourier(
    from: i64,
    to: i64,
    tol: f64,
    budget: u64,
    json: bool,
    out: &mut impl Write,
) -> Result<ExitCode, CliError> {
    let table = coeff_table(from, to, tol, budget)?;
    let mut exhausted = 0u64;
    if !json {
        writeln!(out, "n,re,im,abs,err_bound")?;
    }
    for row in &table {
        let coeff = match row {
            Ok(c) => c,
            Err(Error::CoeffBudgetExhausted { partial, .. }) => {
                exhausted += 1;
                partial
            }
            Err(e) => return Err(e.clone().into()),
        };
        let record = FourierRecord::from(coeff);
        if json {
            writeln!(out, "{}", serde_json::to_string(&record).expect("serializable"))
                ?;
        } else {
            writeln!(
                out,
                "{},{},{},{},{}",
                record.n, record.re, record.im, record.abs, record.err_bound
            )
            ?;
        }
    }
    if exhausted > 0 {
        eprintln!(
            "warning: cell budget {budget} exhausted on {exhausted} coefficients; \
             their err_bound column exceeds the tolerance {tol}"
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BlockRecord {
    j: u32,
    block_max: f64,
}

#[derive(Serialize)]
struct DecaySummary {
    eta: f64,
    intercept: f64,
    residual: f64,
}

fn run_decay(
    from: u32,
    to: u32,
    tol: f64,
    budget: u64,
    json: bool,
    out: &mut impl Write,
) -> Result<ExitCode, CliError> {
    if from > to || to >= 46 {
        return Err(CliError::Core(Error::InvalidRange {
            lo: from as i64,
            hi: to as i64,
        }));
    }
    let n_lo = 1i64 << from;
    let n_hi = (1i64 << (to + 1)) - 1;
    let table = coeff_table(n_lo, n_hi, tol, budget)?;
    let mut exhausted = 0u64;
    let rows: Vec<FourierCoefficient> = table
        .iter()
        .map(|row| match row {
            Ok(c) => Ok(*c),
            Err(Error::CoeffBudgetExhausted { partial, .. }) => {
                exhausted += 1;
                Ok(*partial)
            }
            Err(e) => Err(e.clone()),
        })
        .collect::<Result<_, Error>>()?;
    let est = fit_decay(&rows, from, to)?;

    if json {
        for &(j, block_max) in &est.block_maxima {
            let rec = BlockRecord { j, block_max };
            writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable"))
                ?;
        }
        let summary = DecaySummary {
            eta: est.eta,
            intercept: est.intercept,
            residual: est.residual,
        };
        writeln!(out, "{}", serde_json::to_string(&summary).expect("serializable"))
            ?;
    } else {
        writeln!(out, "j,block_max")?;
        for &(j, block_max) in &est.block_maxima {
            writeln!(out, "{j},{block_max}")?;
        }
        writeln!(out, "eta,intercept,residual")?;
        writeln!(out, "{},{},{}", est.eta, est.intercept, est.residual)?;
    }
    if exhausted > 0 {
        eprintln!(
            "warning: cell budget {budget} exhausted on {exhausted} coefficients; \
             the fit uses their partial values"
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

/// "p/q", an integer, or a terminating decimal, parsed exactly.
fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Parse(format!("'{s}' is not a rational: use p/q, an integer, or a terminating decimal"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = frac.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rational::new(digits, den);
        let int_part = Rational::from_integer(int);
        return Ok(if negative {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

fn parse_dyadic(s: &str) -> Result<Dyadic, CliError> {
    let r = parse_rational(s)?;
    Dyadic::from_rational(&r).ok_or_else(|| {
        CliError::Parse(format!(
            "'{s}' is not a dyadic rational (the denominator must be a power of two)"
        ))
    })
}
