use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::config::{Command, Format, Resolved};
use crate::CliError;

/// One verified contract.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    /// Invariant identifier from the suite manifest.
    pub id: &'static str,
    pub check: String,
    /// The relation being tested, written out.
    pub tag: &'static str,
    pub value: f64,
    /// Per-size values for checks that compare several sizes.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<f64>,
    pub contract: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    fn new(id: &'static str, check: impl Into<String>, tag: &'static str, value: f64) -> Self {
        Self {
            id,
            check: check.into(),
            tag,
            value,
            series: Vec::new(),
            contract: String::new(),
            pass: false,
            note: None,
        }
    }

    /// `value <= tol`.
    pub fn at_most(id: &'static str, check: impl Into<String>, tag: &'static str, value: f64, tol: f64) -> Self {
        Self {
            contract: format!("<= {tol:e}"),
            pass: value <= tol,
            ..Self::new(id, check, tag, value)
        }
    }

    /// `value == 0` with no tolerance.
    pub fn exact(id: &'static str, check: impl Into<String>, tag: &'static str, value: f64) -> Self {
        Self {
            contract: "== 0".into(),
            pass: value == 0.0,
            ..Self::new(id, check, tag, value)
        }
    }

    /// Count of violating cases, which must be zero.
    pub fn violations(id: &'static str, check: impl Into<String>, tag: &'static str, count: usize) -> Self {
        Self {
            contract: "0 violations".into(),
            pass: count == 0,
            ..Self::new(id, check, tag, count as f64)
        }
    }

    /// Strictly decreasing series; `value` is the last entry.
    pub fn decreasing(id: &'static str, check: impl Into<String>, tag: &'static str, series: Vec<f64>) -> Self {
        let pass = series.windows(2).all(|w| w[1] < w[0]);
        Self {
            contract: "strictly decreasing".into(),
            pass,
            series: series.clone(),
            ..Self::new(id, check, tag, series.last().copied().unwrap_or(f64::NAN))
        }
    }

    /// A measurement kept for comparison between runs; always passes.
    pub fn measured(id: &'static str, check: impl Into<String>, tag: &'static str, value: f64) -> Self {
        Self {
            contract: "recorded".into(),
            pass: true,
            ..Self::new(id, check, tag, value)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// The part of a report that depends only on configuration and seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: Resolved,
    pub records: Vec<Record>,
    /// Command-specific results (eigenvalue lists, event counts, ...).
    pub outputs: BTreeMap<String, serde_json::Value>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub machine: MachineReport,
    /// Seconds since the Unix epoch at the start of the run.
    pub started: u64,
    pub runtime: Duration,
    /// Side files written by the run (trajectory tables).
    pub artifacts: Vec<PathBuf>,
}

impl Report {
    pub fn new(
        config: Resolved,
        records: Vec<Record>,
        outputs: BTreeMap<String, serde_json::Value>,
        started: u64,
        runtime: Duration,
    ) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
        };
        Self {
            machine: MachineReport {
                tool: "cadual",
                version: env!("CARGO_PKG_VERSION"),
                command: config.command,
                config,
                records,
                outputs,
                summary,
            },
            started,
            runtime,
            artifacts: Vec::new(),
        }
    }

    pub fn render_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.machine).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn render_human(&self) -> String {
        let m = &self.machine;
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", m.tool, m.command.name(), m.version);
        let _ = writeln!(s, "started {} (unix), runtime {:.3} s", self.started, self.runtime.as_secs_f64());
        let c = &m.config;
        let _ = writeln!(
            s,
            "window={} sites={} steps={} margin={} tolerance={:e} chain={} alpha'={} seed={}",
            c.window, c.sites, c.steps, c.margin, c.tolerance, c.chain, c.alpha_prime, c.seed
        );
        for a in &self.artifacts {
            let _ = writeln!(s, "wrote {}", a.display());
        }
        for r in &m.records {
            let _ = writeln!(
                s,
                "{}  {:<34} {:<44} {:<12.4e} {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.id,
                r.check,
                r.value,
                r.contract
            );
        }
        let _ = writeln!(
            s,
            "{} checks, {} passed, {} failed",
            m.summary.total, m.summary.passed, m.summary.failed
        );
        s.push_str(MACHINE_MARKER);
        s.push('\n');
        s.push_str(&self.render_machine());
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.render_human(),
            Format::Machine => self.render_machine(),
        }
    }
}

const MACHINE_MARKER: &str = "--- machine-readable ---";

/// The machine-readable part of a rendered report in either format.
pub fn machine_section(text: &str) -> &str {
    match text.find(MACHINE_MARKER) {
        Some(at) => text[at + MACHINE_MARKER.len()..].trim_start_matches('\n'),
        None => text,
    }
}

/// Write the report to `path`, or to stdout when no path is given.
pub fn emit_report(report: &Report, path: Option<&Path>, format: Format) -> Result<(), CliError> {
    let text = report.render(format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}
