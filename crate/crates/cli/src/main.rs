//! `basisconv`: polynomial basis conversions, raw composition with
//! structured power series, conversion matrices, benchmarks and a
//! self-test, all over a prime field.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use basisconv::families::default_kinds;
use basisconv::io::{read_coeffs, write_coeffs};
use basisconv::modfield::mul_trunc;
use basisconv::oracle::{matvec, Matrix};
use basisconv::{
    eval, eval_inv, eval_inv_transposed, eval_t, selftest, CompositionSequence, Error, Family, FieldElement,
    Modulus, Poly, DEFAULT_MODULUS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "basisconv", version, about = "Polynomial basis conversion over prime fields")]
struct Cli {
    /// Prime modulus of the coefficient field.
    #[arg(long, global = true, default_value_t = DEFAULT_MODULUS)]
    modulus: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a coefficient vector between a family's basis and the monomials.
    Convert {
        /// Family, e.g. `hermite` or `jacobi(3,5)`; bare names use default parameters.
        #[arg(long)]
        family: String,
        #[arg(long, value_enum)]
        dir: Direction,
        /// Dimension; the input is zero-padded up to it.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compose a polynomial with the series produced by a composition sequence.
    Compose {
        /// Sequence such as `A:1;Inv;M:-2;P:2;R:3,2,1;E;L`.
        #[arg(long)]
        sequence: String,
        /// Precision; the input is zero-padded up to it.
        #[arg(long)]
        n: Option<usize>,
        /// Apply the transposed map.
        #[arg(long)]
        transpose: bool,
        /// Apply the inverse map (with --transpose: the inverse transpose).
        #[arg(long)]
        inverse: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Print a conversion matrix as CSV; column j holds basis element j.
    Matrix {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Print the matrix of the monomial-to-family direction instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Time fast conversion against the quadratic matrix-vector product.
    Bench {
        #[arg(long)]
        family: String,
        /// Largest dimension; sizes are the powers of two up to it.
        #[arg(long = "n-max")]
        n_max: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Largest size for which the naive matrix is built.
        #[arg(long = "naive-max", default_value_t = 4096)]
        naive_max: usize,
    },
    /// Check the fast algorithms against the reference implementations.
    Selftest {
        /// Smaller sizes and fewer samples.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Input JSON file (default: standard input).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output JSON file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    ToMonomial,
    FromMonomial,
}

/// Runtime failures; all map to exit code 1.
enum CliError {
    Lib(Error),
    Io(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let md = Modulus::new(cli.modulus)?;
    match cli.command {
        Command::Convert { family, dir, n, io } => {
            let fam = resolve_family(&md, &family)?;
            let a = read_input(&md, &io, n)?;
            let out = match dir {
                Direction::ToMonomial => fam.to_monomial(&md, &a)?.into_coeffs(),
                Direction::FromMonomial => fam.from_monomial(&md, &Poly::new(a))?,
            };
            write_output(&io, &write_coeffs(&md, &out))
        }
        Command::Compose {
            sequence,
            n,
            transpose,
            inverse,
            io,
        } => {
            let seq = CompositionSequence::parse(&md, &sequence)?;
            let a = Poly::new(read_input(&md, &io, n)?);
            let n = a.dim();
            let out = match (transpose, inverse) {
                (false, false) => eval(&md, &a, &seq, n)?,
                (true, false) => eval_t(&md, &a, &seq, n)?,
                (false, true) => eval_inv(&md, &a, &seq, n)?,
                (true, true) => eval_inv_transposed(&md, &a, &seq, n)?,
            };
            write_output(&io, &write_coeffs(&md, out.coeffs()))
        }
        Command::Matrix { family, n, inverse } => {
            md.check_precision(n)?;
            let fam = resolve_family(&md, &family)?;
            let m = if inverse {
                probe(n, |e| fam.from_monomial(&md, e))?
            } else {
                probe(n, |e| Ok(fam.to_monomial(&md, e.coeffs())?.into_coeffs()))?
            };
            let mut text = String::new();
            for row in &m {
                let cells: Vec<String> = row.iter().map(|c| c.value().to_string()).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Bench {
            family,
            n_max,
            csv,
            naive_max,
        } => bench(&md, &family, n_max, naive_max, csv),
        Command::Selftest { quick } => {
            let report = selftest::run(&md, quick);
            for c in &report.checks {
                if c.passed {
                    println!("ok    {}", c.name);
                } else {
                    println!("FAIL  {}: {}", c.name, c.detail);
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", report.checks.len(), failed);
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{failed} self-test check(s) failed")))
            }
        }
    }
}

/// Parses a family; a bare name of a parametrised family takes the
/// catalogue's default parameters.
fn resolve_family(md: &Modulus, text: &str) -> CliResult<Family> {
    match Family::parse(md, text) {
        Ok(f) => Ok(f),
        Err(e) => {
            let name = text.trim();
            if !name.contains('(') {
                if let Some(kind) = default_kinds(md).into_iter().find(|k| k.name() == name) {
                    return Ok(Family::new(md, kind)?);
                }
            }
            Err(e.into())
        }
    }
}

fn read_input(md: &Modulus, io: &IoArgs, n: Option<usize>) -> CliResult<Vec<FieldElement>> {
    let text = match &io.input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let mut a = read_coeffs(md, &text)?;
    if let Some(n) = n {
        if a.len() > n {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() }.into());
        }
        a.resize(n, FieldElement::ZERO);
    }
    md.check_precision(a.len())?;
    Ok(a)
}

fn write_output(io: &IoArgs, text: &str) -> CliResult<()> {
    match &io.output {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Row-major matrix whose column `j` is the image of the `j`-th basis vector.
fn probe(n: usize, mut f: impl FnMut(&Poly) -> basisconv::Result<Vec<FieldElement>>) -> CliResult<Matrix> {
    let mut m = vec![vec![FieldElement::ZERO; n]; n];
    for j in 0..n {
        for (i, c) in f(&Poly::basis(j, n))?.into_iter().enumerate().take(n) {
            m[i][j] = c;
        }
    }
    Ok(m)
}

/// Best wall time of `reps` runs, in seconds.
fn best_of(reps: usize, mut f: impl FnMut() -> CliResult<()>) -> CliResult<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let t = Instant::now();
        f()?;
        best = best.min(t.elapsed().as_secs_f64());
    }
    Ok(best)
}

fn bench(md: &Modulus, family: &str, n_max: usize, naive_max: usize, csv: Option<PathBuf>) -> CliResult<()> {
    md.check_precision(n_max)?;
    let fam = resolve_family(md, family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut text = String::from("n,fast_s,naive_s,naive_with_setup_s\n");
    let mut crossover = None;
    let mut n = 1;
    while n <= n_max {
        let a: Vec<FieldElement> = (0..n).map(|_| md.elem(rng.gen_range(0..md.p()))).collect();
        let reps = (1 << 14) / n.max(1);
        let reps = reps.clamp(3, 50);
        let fast = best_of(reps, || {
            fam.to_monomial(md, &a)?;
            Ok(())
        })?;
        let (naive, with_setup) = if n <= naive_max {
            let start = Instant::now();
            let m = probe(n, |e| Ok(fam.to_monomial(md, e.coeffs())?.into_coeffs()))?;
            let setup = start.elapsed().as_secs_f64();
            let naive = best_of(reps, || {
                std::hint::black_box(matvec(md, &m, &a));
                Ok(())
            })?;
            (Some(naive), Some(setup + naive))
        } else {
            (None, None)
        };
        if crossover.is_none() && naive.is_some_and(|t| fast < t) {
            crossover = Some(n);
        }
        // informative: conversion cost in units of one truncated product
        let p = Poly::new(a.clone());
        let m_n = best_of(reps, || {
            std::hint::black_box(mul_trunc(md, &p, &p, n)?);
            Ok(())
        })?;
        eprintln!("n={n}: fast/M(n) = {:.1}", fast / m_n);
        let cell = |t: Option<f64>| t.map(|t| format!("{t:.9}")).unwrap_or_default();
        text.push_str(&format!("{n},{fast:.9},{},{}\n", cell(naive), cell(with_setup)));
        n *= 2;
    }
    match crossover {
        Some(c) => eprintln!("crossover: fast conversion wins from n = {c}"),
        None => eprintln!("crossover: none up to n = {}", n_max.min(naive_max)),
    }
    if n_max > naive_max {
        eprintln!("naive columns are left empty above n = {naive_max}");
    }
    match csv {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
