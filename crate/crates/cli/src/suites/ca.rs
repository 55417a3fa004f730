use std::f64::consts::TAU;

use cadual_core::automaton::{
    build_evolution, expectation, extract_hamiltonian, AutomatonSpec, OntologicalDensityMatrix,
    RuleTable,
};
use cadual_core::linalg::{eigh, expm_hermitian, Basis, ComplexMatrix};
use rand::Rng;

use super::linalg::{random_hermitian, random_rule};
use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::report::Record;
use crate::CliError;

/// Worst deviations of one automaton's Hamiltonian.
struct HamiltonianCheck {
    round_trip: f64,
    hermiticity: f64,
    /// Closed-form energies outside `[0, 2π/dt)`.
    out_of_range: usize,
    /// Largest gap between sorted `eigh(H)` and the closed-form energies.
    spectrum: f64,
    eigenvalues: Vec<f64>,
}

fn check_hamiltonian(spec: &AutomatonSpec) -> Result<HamiltonianCheck, CliError> {
    let dt = spec.dt();
    let u = build_evolution(spec)?;
    let h = extract_hamiltonian(&u, dt)?;
    let round_trip = expm_hermitian(&h, dt)?.max_abs_diff(u.matrix())?;
    let mut energies = u.energies(dt);
    energies.sort_by(f64::total_cmp);
    let out_of_range = energies.iter().filter(|&&e| !(0.0..TAU / dt).contains(&e)).count();
    let mut eigenvalues = eigh(&h)?.values;
    eigenvalues.sort_by(f64::total_cmp);
    let spectrum = eigenvalues
        .iter()
        .zip(&energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(HamiltonianCheck {
        round_trip,
        hermiticity: h.hermiticity_defect(),
        out_of_range,
        spectrum,
        eigenvalues,
    })
}

fn order_defect(spec: &AutomatonSpec) -> Result<(f64, f64), CliError> {
    let u = build_evolution(spec)?;
    let full = u.power(spec.order());
    let id = ComplexMatrix::identity(u.basis());
    Ok((u.matrix().unitarity_defect(), full.matrix().max_abs_diff(&id)?))
}

fn push_hamiltonian(out: &mut Outcome, label: &str, c: &HamiltonianCheck, tol: f64) {
    out.push(Record::at_most(
        "ca.hamiltonian-round-trip",
        format!("exp(-iH dt) vs U, {label}"),
        "exp(-iH dt) = U",
        c.round_trip,
        tol,
    ));
    out.push(Record::at_most(
        "ca.hamiltonian-round-trip",
        format!("H hermiticity, {label}"),
        "H = H†",
        c.hermiticity,
        1e-12,
    ));
    out.push(Record::violations(
        "ca.hamiltonian-round-trip",
        format!("energies outside [0, 2π/dt), {label}"),
        "0 <= E_k < 2π/dt",
        c.out_of_range,
    ));
    out.push(Record::at_most(
        "ca.hamiltonian-round-trip",
        format!("eigh(H) vs closed-form energies, {label}"),
        "spec H = {2πk/(m dt)} per cycle of length m",
        c.spectrum,
        tol,
    ));
}

pub(super) fn suite(params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 2);
    let sizes = [1usize, 2, 7, 64, 200, 512];
    let specs: Vec<AutomatonSpec> = sizes
        .iter()
        .map(|&n| AutomatonSpec::from_rule(random_rule(n, &mut rng), rng.random_range(0.25..2.0)))
        .collect::<Result<_, _>>()?;

    let (mut unitary, mut order) = (0.0f64, 0.0f64);
    for s in &specs {
        let (a, b) = order_defect(s)?;
        unitary = unitary.max(a);
        order = order.max(b);
    }
    out.push(Record::exact("ca.unitary-order", "unitarity defect, random rules n <= 512", "U†U = I", unitary));
    out.push(Record::exact("ca.unitary-order", "U^order - I, random rules n <= 512", "U^order = I", order));

    let mut agg = HamiltonianCheck {
        round_trip: 0.0,
        hermiticity: 0.0,
        out_of_range: 0,
        spectrum: 0.0,
        eigenvalues: Vec::new(),
    };
    for s in &specs {
        let c = check_hamiltonian(s)?;
        agg.round_trip = agg.round_trip.max(c.round_trip);
        agg.hermiticity = agg.hermiticity.max(c.hermiticity);
        agg.out_of_range += c.out_of_range;
        agg.spectrum = agg.spectrum.max(c.spectrum);
    }
    push_hamiltonian(out, "random rules n <= 512", &agg, 1e-10);

    let mut worst = 0.0f64;
    for n in [2usize, 9, 32] {
        let spec = AutomatonSpec::from_rule(random_rule(n, &mut rng), 1.0)?;
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let rho = OntologicalDensityMatrix::new(raw.iter().map(|w| w / total).collect())?;
        let o = random_hermitian(n, &mut rng);
        for steps in 0..6u128 {
            let u = build_evolution(&spec)?.power(steps);
            let forward = expectation(&rho.evolve(&u)?, &o)?;
            let backward = expectation(&rho, &u.conjugate(&o)?)?;
            worst = worst.max((forward - backward).norm());
        }
    }
    out.push(Record::at_most(
        "ca.heisenberg-consistency",
        "random ρ, random Hermitian O, 0..5 steps",
        "Tr(UρU† O) = Tr(ρ U†OU)",
        worst,
        1e-12,
    ));

    let mut off = 0.0f64;
    for n in [3usize, 16, 48] {
        let spec = AutomatonSpec::from_rule(random_rule(n, &mut rng), 1.0)?;
        let u = build_evolution(&spec)?;
        let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let c = u.conjugate(&ComplexMatrix::diagonal(&Basis::indexed(n), &diag)?)?;
        for r in 0..n {
            for k in 0..n {
                if r != k {
                    off = off.max(c.get(r, k).norm());
                }
            }
        }
    }
    out.push(Record::exact(
        "ca.diagonal-preservation",
        "largest off-diagonal entry of U†DU",
        "U†DU diagonal for diagonal D",
        off,
    ));
    Ok(())
}

pub(super) fn extract(table: RuleTable, params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let spec = table.into_spec()?;
    let (unitary, order) = order_defect(&spec)?;
    out.push(Record::exact("ca.unitary-order", "unitarity defect", "U†U = I", unitary));
    out.push(Record::exact("ca.unitary-order", "U^order - I", "U^order = I", order));
    let c = check_hamiltonian(&spec)?;
    push_hamiltonian(out, &format!("{} states", spec.state_count()), &c, params.tolerance);
    out.output("states", spec.state_count());
    out.output("dt", spec.dt());
    out.output("order", spec.order().to_string());
    out.output("eigenvalues", &c.eigenvalues);
    Ok(())
}
