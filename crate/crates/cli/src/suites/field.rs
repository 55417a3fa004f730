use cadual_core::field::{
    compose_quantum_movers, hamilton_density, shift_evolve, split_movers,
    verify_lattice_commutators, wave_equation_residual, IntegerWave, LatticeCommutatorReport,
    LatticeField1D,
};
use cadual_core::pq::TruncationWindow;
use rand::Rng;

use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::report::Record;
use crate::CliError;

/// Ring length for the classical checks; the operator checks use `--sites`.
const CLASSICAL_SITES: usize = 32;

fn push_commutators(out: &mut Outcome, r: &LatticeCommutatorReport, tol: f64) {
    let label = format!("{} sites, N = {}", r.sites, r.window);
    let id = "field.lattice-commutators";
    out.push(Record::exact(id, format!("same site, {label}"), "[a(x), a(x)] = 0", r.same_site));
    out.push(Record::at_most(
        id,
        format!("nearest left, {label}"),
        "[a^L(x), a^L(x+1)] = (i/2π)(I - P_edge(x+1))",
        r.nearest_left,
        tol,
    ));
    out.push(Record::at_most(
        id,
        format!("nearest right, {label}"),
        "[a^R(x), a^R(x+1)] = -(i/2π)(I - P_edge(x))",
        r.nearest_right,
        tol,
    ));
    if let Some(d) = r.distant {
        out.push(Record::exact(id, format!("distant, {label}"), "[a(x), a(y)] = 0 for |x-y| >= 2", d));
    }
    out.push(Record::exact(id, format!("cross chirality, {label}"), "[a^L(x), a^R(y)] = 0", r.cross));
}

pub(super) fn suite(sites: usize, window: u32, params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 4);
    let n = CLASSICAL_SITES;

    // integer round trip against the plain second-order recursion
    let phi0: Vec<i64> = (0..n).map(|_| rng.random_range(-50..=50)).collect();
    let phi1: Vec<i64> = (0..n).map(|_| rng.random_range(-50..=50)).collect();
    let mut wave = IntegerWave::from_slices(&phi0, &phi1)?;
    let (mut a, mut b) = (phi0, phi1);
    let (mut residual, mut mismatched) = (0i64, 0usize);
    for _ in 0..params.steps {
        let next = wave.advance(1);
        residual = residual
            .max(wave_equation_residual(&wave.slice, &next.slice, &next.next_slice()))
            .max(next.right_mover_mismatch());
        let c: Vec<i64> = (0..n).map(|x| b[(x + 1) % n] + b[(x + n - 1) % n] - a[x]).collect();
        a = std::mem::replace(&mut b, c);
        wave = next;
        mismatched += usize::from(wave.slice != a);
    }
    out.push(Record::exact(
        "field.wave-round-trip",
        format!("worst residual, {n} sites, {} steps", params.steps),
        "φ(x,t+1) + φ(x,t-1) = φ(x+1,t) + φ(x-1,t)",
        residual as f64,
    ));
    out.push(Record::violations(
        "field.wave-round-trip",
        "slices differing from the direct recursion",
        "φ(x,t+1) = φ(x-1,t) + ℓ_t(x), ℓ rotated each step",
        mismatched,
    ));

    // dyadic data keep every sum exact, so conservation is checked with ==
    let dyadic = |rng: &mut rand_chacha::ChaCha8Rng| f64::from(rng.random_range(-64i32..=64)) / 16.0;
    let phi: Vec<f64> = (0..n).map(|_| dyadic(&mut rng)).collect();
    let pi: Vec<f64> = (0..n).map(|_| dyadic(&mut rng)).collect();
    let movers = split_movers(&LatticeField1D::new(phi, pi)?);
    let e0: f64 = hamilton_density(&movers).iter().sum();
    let drift = [1i64, params.steps as i64, -(params.steps as i64), 7 * n as i64 + 3]
        .iter()
        .map(|&k| (hamilton_density(&shift_evolve(&movers, k)).iter().sum::<f64>() - e0).abs())
        .fold(0.0, f64::max);
    out.push(Record::exact(
        "field.energy-conservation",
        format!("|ΔE| under shifts, {n} dyadic sites"),
        "H = ¼Σ((a^L)² + (a^R)²)",
        drift,
    ));

    let w = TruncationWindow::new(window)?;
    let report = verify_lattice_commutators(sites, w)?;
    push_commutators(out, &report, params.tolerance);
    if report.distant.is_none() {
        // a ring needs 4 sites before any pair sits two apart
        let extra = verify_lattice_commutators(4, TruncationWindow::new(1)?)?;
        push_commutators(out, &extra, params.tolerance);
    }

    let (left, right) = compose_quantum_movers(sites, w)?;
    let herm = left
        .iter()
        .chain(&right)
        .map(|m| m.hermiticity_defect())
        .fold(0.0, f64::max);
    out.push(Record::exact(
        "field.mover-hermiticity",
        format!("a^L, a^R on {sites} sites, N = {window}"),
        "a^L(x) = A(x) + η(x+1), a^R(x) = A(x) + η(x-1)",
        herm,
    ));
    out.output("sector_dim", report.sector_dim);
    Ok(())
}
