mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use cerfmorse::algebra::{parse_rational, CoefficientRing};
use cerfmorse::Rational;
use clap::{Args, Parser, Subcommand};

pub use commands::CliError;

/// Cerf diagrams, flow counters and spectral traces from scenario files.
#[derive(Parser, Debug)]
#[command(name = "cerfmorse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Scenario file.
    pub scenario: PathBuf,
    /// Coefficient ring, overriding the file's `ring`.
    #[arg(long, value_parser = parse_ring)]
    pub coeff: Option<CoefficientRing>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Observe {
    /// Observation window `a=<profile>,b=<profile>`.
    #[arg(long)]
    pub window: Option<String>,
    /// Class representative, e.g. `c1 - c2`.
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Cerf tuple and the bifurcation axioms.
    Validate(Input),
    /// Print γ on every interval.
    Evolve(Input),
    /// Homology of every interval, windowed and along the ladder.
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        window: Option<String>,
    },
    /// Spectral trace of a class.
    Track {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        observe: Observe,
    },
    /// H1 and H2 reports and the escape budget of the tracked class.
    Escape {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        observe: Observe,
        /// Growth bound, e.g. `linear(c=1)` or `square(c=2), gap=(-1,1)`.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, value_parser = parse_q)]
        kappa: Option<Rational>,
        #[arg(long, value_parser = parse_q)]
        rho0: Option<Rational>,
    },
    /// Write a handle-slide cascade scenario.
    Cascade {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_parser = parse_q, default_value = "2")]
        ratio: Rational,
        #[arg(long, value_parser = parse_q, default_value = "1")]
        base: Rational,
        #[arg(long, value_parser = parse_q, default_value = "1")]
        delta: Rational,
        #[arg(long, value_parser = parse_ring, default_value = "z")]
        coeff: CoefficientRing,
        /// Output directory; the scenario goes to stdout without it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth estimates and invariance verdict of the `[rabinowitz]` model.
    Rabinowitz {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_q)]
        kappa: Option<Rational>,
        #[arg(long, value_parser = parse_q)]
        rho0: Option<Rational>,
    },
    /// Cerf diagram and spectral trace as SVG.
    Plot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        observe: Observe,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Random valid scenarios checked against the structural invariants.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_parser = parse_ring, default_value = "z2")]
        coeff: CoefficientRing,
        /// Directory receiving the generated scenarios.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_ring(s: &str) -> Result<CoefficientRing, String> {
    s.parse()
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational number"))
}

fn run(command: Command, out: &mut String) -> Result<(), CliError> {
    match command {
        Command::Validate(input) => commands::validate(&input, out),
        Command::Evolve(input) => commands::evolve(&input, out),
        Command::Homology { input, window } => commands::homology(&input, window.as_deref(), out),
        Command::Track { input, observe } => commands::track(&input, &observe, out),
        Command::Escape { input, observe, phi, kappa, rho0 } => {
            commands::escape(&input, &observe, phi.as_deref(), kappa, rho0, out)
        }
        Command::Cascade { n, ratio, base, delta, coeff, out: dir } => {
            commands::cascade(n, &ratio, &base, &delta, coeff, dir.as_deref(), out)
        }
        Command::Rabinowitz { input, kappa, rho0 } => commands::rabinowitz(&input, kappa, rho0, out),
        Command::Plot { input, observe, out: dir } => commands::plot(&input, &observe, &dir, out),
        Command::Fuzz { seed, count, coeff, out: dir } => commands::fuzz(seed, count, coeff, dir.as_deref(), out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let result = run(cli.command, &mut out);
    print!("{out}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
