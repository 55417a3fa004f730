//! Randomised invariants of the automaton and linear-algebra layers.

use cadual_core::automaton::{
    build_evolution, expectation, extract_hamiltonian, AutomatonSpec, OntologicalDensityMatrix,
};
use cadual_core::field::{hamilton_density, shift_evolve, split_movers, IntegerWave, LatticeField1D, wave_equation_residual};
use cadual_core::linalg::{
    commutator, eigendecompose_unitary, expm_hermitian, phase, Basis, Complex64, ComplexMatrix,
    DEFAULT_TOL,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rule(n: usize, seed: u64) -> Vec<usize> {
    let mut rule: Vec<usize> = (0..n).collect();
    rule.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    rule
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(&Basis::indexed(n), |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let a = random_matrix(n, rng);
    a.add(&a.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn evolution_returns_to_identity_after_its_order(n in 1usize..=96, seed in any::<u64>()) {
        let spec = AutomatonSpec::from_rule(random_rule(n, seed), 1.0).unwrap();
        let u = build_evolution(&spec).unwrap();
        let full = u.power(spec.order());
        let id = ComplexMatrix::identity(u.basis());
        prop_assert_eq!(full.matrix().max_abs_diff(&id).unwrap(), 0.0);
        prop_assert_eq!(u.matrix().unitarity_defect(), 0.0);
    }

    #[test]
    fn hamiltonian_reproduces_the_step(n in 1usize..=64, seed in any::<u64>(), dt in 0.1f64..3.0) {
        let spec = AutomatonSpec::from_rule(random_rule(n, seed), dt).unwrap();
        let u = build_evolution(&spec).unwrap();
        let h = extract_hamiltonian(&u, dt).unwrap();
        prop_assert!(h.hermiticity_defect() <= 1e-12);
        let back = expm_hermitian(&h, dt).unwrap();
        prop_assert!(back.max_abs_diff(u.matrix()).unwrap() <= 1e-10);
    }

    #[test]
    fn heisenberg_and_schrodinger_pictures_agree(n in 2usize..=48, seed in any::<u64>(), steps in 0u128..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = AutomatonSpec::from_rule(random_rule(n, seed ^ 0x5a5a), 1.0).unwrap();
        let u = build_evolution(&spec).unwrap().power(steps);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let rho = OntologicalDensityMatrix::new(weights).unwrap();
        let o = random_hermitian(n, &mut rng);
        let forward = expectation(&rho.evolve(&u).unwrap(), &o).unwrap();
        let backward = expectation(&rho, &u.conjugate(&o).unwrap()).unwrap();
        prop_assert!((forward - backward).norm() <= 1e-12);
    }

    #[test]
    fn ontological_diagonals_stay_diagonal(n in 1usize..=48, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = AutomatonSpec::from_rule(random_rule(n, seed), 1.0).unwrap();
        let u = build_evolution(&spec).unwrap();
        let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let o = ComplexMatrix::diagonal(&Basis::indexed(n), &diag).unwrap();
        let c = u.conjugate(&o).unwrap();
        for r in 0..n {
            for col in 0..n {
                if r != col {
                    prop_assert_eq!(c.get(r, col), Complex64::new(0.0, 0.0));
                }
            }
        }
        // the conjugated diagonal is a relabelling of the original one
        let mut before = diag.clone();
        let mut after: Vec<f64> = (0..n).map(|q| c.get(q, q).re).collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn phases_multiply(x in -1e3f64..1e3, y in -1e3f64..1e3) {
        prop_assert!((phase(x) * phase(y) - phase(x + y)).norm() <= 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric(n in 1usize..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(n, &mut rng);
        let b = random_matrix(n, &mut rng);
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn unitary_eigendecomposition_reconstructs(n in 1usize..=24, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, &mut rng);
        let u = expm_hermitian(&h, rng.random_range(0.1..4.0)).unwrap();
        let eig = eigendecompose_unitary(&u, DEFAULT_TOL).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&u).unwrap() <= 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn permutation_eigendecomposition_reconstructs(n in 1usize..=64, seed in any::<u64>()) {
        let spec = AutomatonSpec::from_rule(random_rule(n, seed), 1.0).unwrap();
        let u = build_evolution(&spec).unwrap();
        let eig = eigendecompose_unitary(u.matrix(), DEFAULT_TOL).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(u.matrix()).unwrap() <= 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn integer_wave_round_trips_and_obeys_the_wave_equation(
        n in 3usize..=40, seed in any::<u64>(), steps in 1u64..200
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi0: Vec<i64> = (0..n).map(|_| rng.random_range(-50..=50)).collect();
        let phi1: Vec<i64> = (0..n).map(|_| rng.random_range(-50..=50)).collect();
        let w0 = IntegerWave::from_slices(&phi0, &phi1).unwrap();
        let mut w = w0.clone();
        for _ in 0..steps {
            let next = w.advance(1);
            let after = next.next_slice();
            prop_assert_eq!(wave_equation_residual(&w.slice, &next.slice, &after), 0);
            prop_assert_eq!(next.right_mover_mismatch(), 0);
            w = next;
        }
        // the same trajectory from the plain second-order recursion
        let (mut a, mut b) = (phi0.clone(), phi1.clone());
        for _ in 0..steps {
            let c: Vec<i64> = (0..n).map(|x| b[(x + 1) % n] + b[(x + n - 1) % n] - a[x]).collect();
            a = std::mem::replace(&mut b, c);
        }
        prop_assert_eq!(&w.slice, &a);
        prop_assert_eq!(w.next_slice(), b);
        prop_assert_eq!(w0.advance(steps).slice, w.slice);
    }

    #[test]
    fn mover_energy_is_conserved(n in 2usize..=64, seed in any::<u64>(), steps in -200i64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = split_movers(&LatticeField1D::new(phi, pi).unwrap());
        let e0: f64 = hamilton_density(&m).iter().sum();
        let e1: f64 = hamilton_density(&shift_evolve(&m, steps)).iter().sum();
        prop_assert!((e0 - e1).abs() <= 1e-12 * e0.abs().max(1.0));
    }
}

#[test]
fn twenty_rules_up_to_256_states_round_trip() {
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let n = 13 * (k as usize) + 9;
        let n = n.min(256);
        let spec = AutomatonSpec::from_rule(random_rule(n, 1000 + k), 1.0).unwrap();
        let u = build_evolution(&spec).unwrap();
        let h = extract_hamiltonian(&u, 1.0).unwrap();
        worst = worst.max(expm_hermitian(&h, 1.0).unwrap().max_abs_diff(u.matrix()).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("worst {worst:e} in {elapsed:.2}s");
    assert!(worst <= 1e-10);
    assert!(n_ok(256));
}

fn n_ok(n: usize) -> bool {
    let spec = AutomatonSpec::from_rule(random_rule(n, 7), 1.0).unwrap();
    let u = build_evolution(&spec).unwrap();
    let h = extract_hamiltonian(&u, 1.0).unwrap();
    expm_hermitian(&h, 1.0).unwrap().max_abs_diff(u.matrix()).unwrap() <= 1e-10
}
