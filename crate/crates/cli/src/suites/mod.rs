//! Verification suites and simulations, one module per library area.

mod ca;
mod fermion;
mod field;
mod linalg;
mod pq;
mod string;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, RunConfig};
use crate::report::{Record, Report};
use crate::CliError;

/// A property the driver verifies, keyed by the `id` of its records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Invariant {
    pub id: &'static str,
    pub statement: &'static str,
}

const fn inv(id: &'static str, statement: &'static str) -> Invariant {
    Invariant { id, statement }
}

/// Every property `verify-all` covers, in report order.
pub const MANIFEST: &[Invariant] = &[
    inv("linalg.unitary-reconstruction", "Σ e^{-iθ_k}|v_k⟩⟨v_k| reproduces U within 10·tol"),
    inv("linalg.phase-homomorphism", "phase(x)·phase(y) = phase(x+y) for |x|,|y| <= 1e3"),
    inv("linalg.commutator-antisymmetry", "[A,B] = -[B,A] exactly"),
    inv("ca.unitary-order", "U is an exact permutation matrix and U^order = I exactly"),
    inv("ca.hamiltonian-round-trip", "exp(-iH dt) = U within 1e-10, H Hermitian, spectrum in [0, 2π/dt)"),
    inv("ca.heisenberg-consistency", "Tr(UρU† O) = Tr(ρ U†OU) within 1e-12"),
    inv("ca.diagonal-preservation", "U†DU is diagonal for diagonal D"),
    inv("pq.eta-hermitian", "η = η† entrywise"),
    inv("pq.eta-spectrum", "max |spec η| <= 1/2 + 2/N"),
    inv("pq.eta-commutator", "[η,Q] = (i/2π)(I - |ψ⟩⟨ψ|) within tol"),
    inv("pq.qp-hermitian", "q = q† and p = p† entrywise"),
    inv("pq.edge-orthogonal-decay", "[q,p]v - (i/2π)v shrinks with N for v ⟂ edge state"),
    inv("pq.fourier-quadrature", "α_N matches quadrature of ∫η e^{-2πiNη} dη within 1e-10"),
    inv("pq.qp-interior-defect", "interior deviation of [q,p] from (i/2π)(I - |ψ_edge⟩⟨ψ_edge|), recorded"),
    inv("field.wave-round-trip", "mover-shifted integer fields solve the lattice wave equation exactly"),
    inv("field.energy-conservation", "total Hamilton density is unchanged by mover shifts"),
    inv("field.lattice-commutators", "mover commutators meet their same-site, nearest, distant and cross contracts"),
    inv("field.mover-hermiticity", "every quantum mover operator is Hermitian exactly"),
    inv("string.mover-conservation", "left and right mover contents are preserved up to rotation"),
    inv("string.reversibility", "k steps forward then k back restore the configuration"),
    inv("string.exchange-conservation", "exchange conserves sites and coordinate multisets; a second swap undoes it"),
    inv("string.wave-residual", "X(σ,τ+a) + X(σ,τ-a) - X(σ+a,τ) - X(σ-a,τ) = 0 at interior sites"),
    inv("string.lattice-constant", "a = 2π√α′"),
    inv("boolean.reversibility", "the product rule solved for the bottom slice inverts the step"),
    inv("boolean.factorization", "factorizable slice pairs stay factorizable; exhaustive for L <= 6"),
    inv("boolean.mover-conservation", "s_L and s_R keep their contents up to rotation and gauge"),
    inv("fermion.car", "{c_i, c_j†} = δ_ij and {c_i, c_j} = 0 entrywise"),
    inv("fermion.parity", "every c_i flips fermion parity"),
];

/// Records and side results gathered by a run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub outputs: BTreeMap<String, serde_json::Value>,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    fn output(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).expect("outputs serialise");
        self.outputs.insert(key.to_string(), v);
    }
}

/// Stream `k` of ChaCha8 seeded with `seed`; each suite owns one stream.
pub fn suite_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Where the report goes: simulations send `--output` to the trajectory
/// table and print the report; every other command writes it to `--output`.
pub fn report_path(config: &RunConfig) -> Option<&Path> {
    match config.command {
        Command::SimulateString | Command::SimulateFermion => None,
        _ => config.output.as_deref(),
    }
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let params = config.resolve()?;
    let mut out = Outcome::default();
    let trajectory = match config.command {
        Command::SimulateString | Command::SimulateFermion => config.output.as_deref(),
        _ => None,
    };
    match params.command {
        Command::VerifyPq => pq::suite(&params, &mut out)?,
        Command::VerifyField => field::suite(params.sites, params.window, &params, &mut out)?,
        Command::SimulateString => {
            let ensemble = match &config.input {
                Some(p) => crate::inputs::read_ensemble(p)?.build()?,
                None => string::default_ensemble(&params)?,
            };
            string::simulate(ensemble, &params, trajectory, &mut out)?;
        }
        Command::SimulateFermion => {
            let field = match &config.input {
                Some(p) => crate::inputs::read_boolean(p)?.build()?,
                None => fermion::default_field(&params)?,
            };
            fermion::simulate(field, &params, trajectory, &mut out)?;
        }
        Command::ExtractHamiltonian => {
            let path = config.input.as_deref().expect("checked by resolve");
            ca::extract(crate::inputs::read_rule_table(path)?, &params, &mut out)?;
        }
        Command::VerifyAll => {
            linalg::suite(&params, &mut out)?;
            ca::suite(&params, &mut out)?;
            pq::suite(&params, &mut out)?;
            field::suite(3, 2, &params, &mut out)?;
            string::suite(&params, &mut out)?;
            fermion::suite(&params, &mut out)?;
        }
    }
    let mut report = Report::new(params, out.records, out.outputs, started, clock.elapsed());
    report.artifacts = out.artifacts;
    Ok(report)
}
