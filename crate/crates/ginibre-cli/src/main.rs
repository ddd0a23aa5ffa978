//! `ginibre`: exact, asymptotic and Monte Carlo moments of Ginibre
//! characteristic polynomials, plus the identity suites.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use ginibre::suites::Suite;
use ginibre::Precision;
use num_complex::Complex64 as C64;

use output::{ContourSettings, RunManifest, Status};

/// Environment variable selecting the starting precision.
const PRECISION_ENV: &str = "GINIBRE_PRECISION";

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);
#[derive(Clone, Debug)]
struct Reals(Vec<f64>);
#[derive(Clone, Debug)]
struct Complexes(Vec<C64>);

fn sizes(s: &str) -> Result<Sizes, String> {
    grid::sizes(s).map(Sizes)
}
fn orders(s: &str) -> Result<Sizes, String> {
    grid::orders(s).map(Sizes)
}
fn reals(s: &str) -> Result<Reals, String> {
    grid::reals(s).map(Reals)
}
fn complexes(s: &str) -> Result<Complexes, String> {
    grid::complexes(s).map(Complexes)
}
fn precision(s: &str) -> Result<Precision, String> {
    Precision::parse(s).ok_or_else(|| format!("'{s}' is not a precision (double or extended)"))
}

#[derive(Parser, Debug)]
#[command(name = "ginibre", version, about = "Moments E|det(G_N - x)|^gamma of complex Ginibre matrices")]
struct Cli {
    /// Write the primary output to FILE and the run manifest to FILE.manifest.json
    /// (without it the manifest goes to stderr).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Starting precision, double or extended. Overrides GINIBRE_PRECISION.
    #[arg(long, global = true, value_parser = precision)]
    precision: Option<Precision>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact log-moments on a grid (CSV).
    Exact(GridArgs),
    /// Exact log-moments against the large-N formula (CSV).
    Compare(GridArgs),
    /// Run an identity suite and report residuals with tolerances (JSON).
    Verify(VerifyArgs),
    /// Monte Carlo moments, the CLT statistic, or the multi-point product (CSV).
    Mc(McArgs),
    /// Parametrix diagnostics per (N, x, gamma, r) (CSV).
    RhpSweep(SweepArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Matrix sizes, e.g. 8,16,32 or 4:12:4.
    #[arg(long, value_parser = sizes)]
    n: Sizes,
    /// Real evaluation points in (0, 1), e.g. 0.3:0.7:0.2.
    #[arg(long, value_parser = reals)]
    x: Reals,
    /// Exponents, e.g. 1,2,1+0.5i.
    #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
    gamma: Complexes,
    /// Degree shift k of the orthogonal polynomials.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k: i32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_parser = PossibleValuesParser::new(Suite::ALL.map(|s| s.name())).map(|s| s.parse::<Suite>().expect("listed suite")))]
    suite: Suite,
    /// Overrides the suite's default sizes.
    #[arg(long, value_parser = sizes)]
    n: Option<Sizes>,
    /// Overrides the suite's default points.
    #[arg(long, value_parser = reals)]
    x: Option<Reals>,
    /// Overrides the suite's default exponents.
    #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
    gamma: Option<Complexes>,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct McArgs {
    #[command(subcommand)]
    mode: Option<McMode>,
    /// Matrix sizes.
    #[arg(long, value_parser = sizes)]
    n: Option<Sizes>,
    /// Complex shift points.
    #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
    z: Option<Complexes>,
    /// Exponents.
    #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
    gamma: Option<Complexes>,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Args, Debug, Clone, Copy)]
struct Sampling {
    /// Number of sampled matrices (at least 1000).
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1000..))]
    samples: u64,
    /// Seed of the counter-based generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum McMode {
    /// Mean and variance of the normalized log|det| statistic.
    Clt {
        #[arg(long, value_parser = sizes)]
        n: Sizes,
        #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
        z: Complexes,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Conjectured multi-point product (labelled CONJECTURE) against Monte Carlo.
    Conjecture {
        #[arg(long, value_parser = sizes)]
        n: Sizes,
        /// Distinct points z_j, one per exponent.
        #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
        z: Complexes,
        /// Exponents gamma_j, one per point.
        #[arg(long, value_parser = complexes, allow_hyphen_values = true)]
        gamma: Complexes,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = sizes, default_value = "16,32,64,128")]
    n: Sizes,
    #[arg(long, value_parser = reals, default_value = "0.5")]
    x: Reals,
    #[arg(long, value_parser = complexes, default_value = "1,2", allow_hyphen_values = true)]
    gamma: Complexes,
    /// Correction orders r of the local parametrix.
    #[arg(long, value_parser = orders, default_value = "0,1,2")]
    r: Sizes,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    k: i32,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(Status::Usage as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let precision = match (cli.precision, std::env::var(PRECISION_ENV)) {
        (Some(p), _) => p,
        (None, Ok(v)) => match Precision::parse(&v) {
            Some(p) => p,
            None => return usage(&format!("{PRECISION_ENV}='{v}' is not double or extended")),
        },
        (None, Err(_)) => Precision::Double,
    };

    let started = Instant::now();
    let (name, run) = match cli.command {
        Command::Exact(a) => ("exact", commands::exact(&a.n.0, &a.x.0, &a.gamma.0, a.k, precision)),
        Command::Compare(a) => ("compare", commands::compare(&a.n.0, &a.x.0, &a.gamma.0, a.k, precision)),
        Command::Verify(a) => ("verify", commands::verify(a.suite, a.n.map(|v| v.0), a.x.map(|v| v.0), a.gamma.map(|v| v.0), precision)),
        Command::Mc(a) => match a.mode {
            None => {
                let (Some(n), Some(z), Some(g)) = (a.n, a.z, a.gamma) else {
                    return usage("mc needs --n, --z and --gamma (or a clt/conjecture subcommand)");
                };
                ("mc", commands::mc(&n.0, &z.0, &g.0, a.sampling.samples as usize, a.sampling.seed))
            }
            Some(McMode::Clt { n, z, sampling }) => ("mc clt", commands::clt(&n.0, &z.0, sampling.samples as usize, sampling.seed)),
            Some(McMode::Conjecture { n, z, gamma, sampling }) => {
                if z.0.len() != gamma.0.len() {
                    return usage("mc conjecture needs one --gamma entry per --z entry");
                }
                let pts: Vec<_> = z.0.into_iter().zip(gamma.0).collect();
                ("mc conjecture", commands::conjecture(&n.0, &pts, sampling.samples as usize, sampling.seed))
            }
        },
        Command::RhpSweep(a) => ("rhp-sweep", commands::rhp_sweep(&a.n.0, &a.x.0, &a.gamma.0, &a.r.0, a.k)),
    };

    let manifest = RunManifest {
        command: name.to_string(),
        argv: std::env::args().skip(1).collect(),
        grid: run.grid,
        seed: run.seed,
        samples: run.samples,
        precision: precision.name().to_string(),
        contour: ContourSettings { k: run.k, ..Default::default() },
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        exit_code: run.status as i32,
    };
    if let Err(e) = output::emit(cli.out.as_deref(), &run.body, &manifest) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(Status::CheckFailed as u8);
    }
    ExitCode::from(run.status as u8)
}
