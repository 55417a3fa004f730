use cadual_core::automaton::{build_evolution, AutomatonSpec};
use cadual_core::linalg::{
    commutator, eigendecompose_unitary, expm_hermitian, phase, Basis, Complex64, ComplexMatrix,
    DEFAULT_TOL,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::report::Record;
use crate::CliError;

pub(super) fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(&Basis::indexed(n), |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub(super) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let a = random_matrix(n, rng);
    let h = a.add(&a.adjoint()).expect("same basis");
    h.scale(Complex64::new(0.5, 0.0))
}

pub(super) fn random_rule(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut rule: Vec<usize> = (0..n).collect();
    rule.shuffle(rng);
    rule
}

pub(super) fn suite(params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 1);

    let mut worst = 0.0f64;
    for n in [1usize, 2, 5, 12, 24, 32] {
        let h = random_hermitian(n, &mut rng);
        let u = expm_hermitian(&h, rng.random_range(0.1..4.0))?;
        let eig = eigendecompose_unitary(&u, DEFAULT_TOL)?;
        worst = worst.max(eig.reconstruct().max_abs_diff(&u)?);
    }
    // permutations have heavily degenerate phases
    for n in [16usize, 64] {
        let spec = AutomatonSpec::from_rule(random_rule(n, &mut rng), 1.0)?;
        let u = build_evolution(&spec)?;
        let eig = eigendecompose_unitary(u.matrix(), DEFAULT_TOL)?;
        worst = worst.max(eig.reconstruct().max_abs_diff(u.matrix())?);
    }
    out.push(Record::at_most(
        "linalg.unitary-reconstruction",
        "random unitaries and permutations, n <= 64",
        "U = Σ_k e^{-iθ_k} |v_k⟩⟨v_k|",
        worst,
        10.0 * DEFAULT_TOL,
    ));

    let worst = (0..10_000)
        .map(|_| {
            let x = rng.random_range(-1e3..1e3);
            let y = rng.random_range(-1e3..1e3);
            (phase(x) * phase(y) - phase(x + y)).norm()
        })
        .fold(0.0, f64::max);
    out.push(Record::at_most(
        "linalg.phase-homomorphism",
        "10000 random pairs in [-1e3, 1e3]",
        "e^{2πix} e^{2πiy} = e^{2πi(x+y)}",
        worst,
        1e-12,
    ));

    let mut worst = 0.0f64;
    for n in [1usize, 3, 8, 16] {
        let a = random_matrix(n, &mut rng);
        let b = random_matrix(n, &mut rng);
        worst = worst.max(commutator(&a, &b)?.add(&commutator(&b, &a)?)?.max_abs());
    }
    out.push(Record::exact(
        "linalg.commutator-antisymmetry",
        "random complex matrices, n <= 16",
        "[A,B] + [B,A] = 0",
        worst,
    ));
    Ok(())
}
