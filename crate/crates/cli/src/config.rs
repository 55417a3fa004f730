use std::path::PathBuf;

use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyPq,
    VerifyField,
    SimulateString,
    SimulateFermion,
    ExtractHamiltonian,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyPq => "verify-pq",
            Command::VerifyField => "verify-field",
            Command::SimulateString => "simulate-string",
            Command::SimulateFermion => "simulate-fermion",
            Command::ExtractHamiltonian => "extract-hamiltonian",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Summary lines followed by the machine-readable section.
    #[default]
    Human,
    /// The machine-readable section alone.
    Machine,
}

/// Everything a run needs. Unset numeric fields take per-command defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub window: Option<u32>,
    pub sites: Option<usize>,
    pub steps: Option<u64>,
    pub margin: Option<i64>,
    pub tolerance: Option<f64>,
    pub chain: Option<usize>,
    pub alpha_prime: Option<f64>,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            window: None,
            sites: None,
            steps: None,
            margin: None,
            tolerance: None,
            chain: None,
            alpha_prime: None,
            seed: 0,
            input: None,
            output: None,
            format: Format::Human,
        }
    }

    /// Fill in defaults and check ranges that no module checks itself.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let c = self.command;
        let window = self.window.unwrap_or(match c {
            Command::VerifyField => 2,
            _ => 16,
        });
        let sites = self.sites.unwrap_or(match c {
            Command::VerifyField => 3,
            Command::SimulateFermion => 8,
            _ => 16,
        });
        let steps = self.steps.unwrap_or(100);
        let margin = self.margin.unwrap_or(window as i64 / 2);
        let tolerance = self.tolerance.unwrap_or(match c {
            Command::ExtractHamiltonian => 1e-10,
            _ => 1e-12,
        });
        let chain = self.chain.unwrap_or(8);
        let alpha_prime = self.alpha_prime.unwrap_or(1.0);

        if window == 0 {
            return Err(CliError::usage("window", "N must be >= 1"));
        }
        if matches!(c, Command::VerifyPq | Command::VerifyAll) && window < 8 {
            return Err(CliError::usage(
                "window",
                format!("{window}: the decay check compares N/4, N/2 and N, so N must be >= 8"),
            ));
        }
        if !(0..window as i64).contains(&margin) {
            return Err(CliError::usage(
                "margin",
                format!("{margin} is outside 0..{window}"),
            ));
        }
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(CliError::usage("tolerance", format!("{tolerance} is not a positive number")));
        }
        if matches!(c, Command::SimulateString | Command::SimulateFermion) && sites < 3 {
            return Err(CliError::usage("sites", format!("{sites}: rings need at least 3 sites")));
        }
        if self.input.is_none() && c == Command::ExtractHamiltonian {
            return Err(CliError::usage("input", "extract-hamiltonian needs a rule table (--input)"));
        }
        Ok(Resolved {
            command: c,
            window,
            sites,
            steps,
            margin,
            tolerance,
            chain,
            alpha_prime,
            seed: self.seed,
            input: self.input.as_ref().map(|p| p.display().to_string()),
        })
    }
}

/// Parameters after defaults; echoed in the machine-readable section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub command: Command,
    pub window: u32,
    pub sites: usize,
    pub steps: u64,
    pub margin: i64,
    pub tolerance: f64,
    pub chain: usize,
    pub alpha_prime: f64,
    pub seed: u64,
    pub input: Option<String>,
}
