use std::path::PathBuf;
use std::process::ExitCode;

use cadual_cli::suites::report_path;
use cadual_cli::{emit_report, exit_code, run, Command, Format, RunConfig, USAGE_EXIT};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verification suites and simulations for cellular-automaton models of
/// quantum systems.
#[derive(Parser)]
#[command(name = "cadual", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Conjugate-variable and (q, p) commutator checks on a truncated window.
    VerifyPq(Flags),
    /// Classical wave round trip, energy conservation and mover commutators.
    VerifyField(Flags),
    /// Evolve integer strings with exchange; `--output` receives the trajectory.
    SimulateString(Flags),
    /// Evolve a Boolean field and check the fermion chain; `--output` receives the trajectory.
    SimulateFermion(Flags),
    /// Hamiltonian of a rule table given with `--input`.
    ExtractHamiltonian(Flags),
    /// Every suite at its default size.
    VerifyAll(Flags),
}

#[derive(Args)]
struct Flags {
    /// Truncation window half-width N.
    #[arg(long)]
    window: Option<u32>,
    /// Lattice sites (operator ring, string length or Boolean ring).
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Distance from the window edge for interior checks.
    #[arg(long, allow_negative_numbers = true)]
    margin: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    /// Jordan–Wigner chain length.
    #[arg(long)]
    chain: Option<usize>,
    /// String slope α′.
    #[arg(long = "alpha-prime", allow_negative_numbers = true)]
    alpha_prime: Option<f64>,
    /// Seed for ChaCha8-generated test states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

fn config(sub: Sub) -> RunConfig {
    let (command, f) = match sub {
        Sub::VerifyPq(f) => (Command::VerifyPq, f),
        Sub::VerifyField(f) => (Command::VerifyField, f),
        Sub::SimulateString(f) => (Command::SimulateString, f),
        Sub::SimulateFermion(f) => (Command::SimulateFermion, f),
        Sub::ExtractHamiltonian(f) => (Command::ExtractHamiltonian, f),
        Sub::VerifyAll(f) => (Command::VerifyAll, f),
    };
    RunConfig {
        command,
        window: f.window,
        sites: f.sites,
        steps: f.steps,
        margin: f.margin,
        tolerance: f.tolerance,
        chain: f.chain,
        alpha_prime: f.alpha_prime,
        seed: f.seed,
        input: f.input,
        output: f.output,
        format: match f.format {
            FormatArg::Human => Format::Human,
            FormatArg::Machine => Format::Machine,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = config(cli.command);
    let outcome = run(&cfg).and_then(|report| {
        emit_report(&report, report_path(&cfg), cfg.format)?;
        Ok(exit_code(&report))
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("cadual: {e}");
            ExitCode::from(USAGE_EXIT as u8)
        }
    }
}
