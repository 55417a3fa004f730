use std::f64::consts::TAU;

use cadual_core::linalg::{eigh, Complex64, ComplexVector};
use cadual_core::pq::{
    build_eta, build_p, build_q, commutator_action_deviation, edge_state_pq, eta_commutator_check,
    eta_fourier_coefficient, qp_commutator_defect, PQLattice, TruncationWindow,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{suite_rng, Outcome};
use crate::config::Resolved;
use crate::report::Record;
use crate::CliError;

/// Composite Simpson rule on `[-1/2, 1/2]` for `∫ η e^{-2πinη} dη`.
fn fourier_quadrature(n: i64, panels: usize) -> Complex64 {
    let h = 1.0 / panels as f64;
    let f = |eta: f64| Complex64::from_polar(eta, -TAU * n as f64 * eta);
    let mut acc = f(-0.5) + f(0.5);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(-0.5 + k as f64 * h) * w;
    }
    acc * (h / 3.0)
}

/// Random vector on `|Q|, |P| <= 1` with the edge-state component removed.
fn edge_orthogonal_probe(lattice: &PQLattice, weights: &[f64; 9]) -> Result<ComplexVector, CliError> {
    let psi = edge_state_pq(lattice);
    let mut v = vec![0.0; lattice.dim()];
    let mut k = 0;
    for q in -1..=1 {
        for p in -1..=1 {
            v[lattice.index(q, p).expect("window >= 1")] = weights[k];
            k += 1;
        }
    }
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
    let overlap: f64 = support.iter().map(|&i| psi.get(i).re * v[i]).sum();
    let norm: f64 = support.iter().map(|&i| psi.get(i).re.powi(2)).sum();
    for &i in &support {
        v[i] -= overlap / norm * psi.get(i).re;
    }
    Ok(ComplexVector::from_real(lattice.basis().clone(), &v)?)
}

fn random_weights(rng: &mut ChaCha8Rng) -> [f64; 9] {
    std::array::from_fn(|_| rng.random_range(0.5..1.5))
}

pub(super) fn suite(params: &Resolved, out: &mut Outcome) -> Result<(), CliError> {
    let mut rng = suite_rng(params.seed, 3);
    let n = params.window;
    let window = TruncationWindow::new(n)?;
    let lattice = PQLattice::square(n)?;

    let eta = build_eta(window);
    out.push(Record::exact(
        "pq.eta-hermitian",
        format!("η - η†, N = {n}"),
        "η(Q1,Q2) = (i/2π)(-1)^{Q1-Q2}/(Q1-Q2)",
        eta.hermiticity_defect(),
    ));
    let spread = eigh(&eta)?.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    out.push(Record::at_most(
        "pq.eta-spectrum",
        format!("max |eigenvalue of η|, N = {n}"),
        "spec η ⊂ [-1/2, 1/2] up to O(1/N)",
        spread,
        0.5 + 2.0 / n as f64,
    ));
    out.push(Record::at_most(
        "pq.eta-commutator",
        format!("entrywise deviation, N = {n}"),
        "[η,Q] = (i/2π)(I - |ψ⟩⟨ψ|), ψ(Q) = (-1)^Q",
        eta_commutator_check(window),
        params.tolerance,
    ));

    let worst = (-64i64..=64)
        .map(|k| (fourier_quadrature(k, 1 << 18) - eta_fourier_coefficient(k)).norm())
        .fold(0.0, f64::max);
    out.push(Record::at_most(
        "pq.fourier-quadrature",
        "|N| <= 64, Simpson with 2^18 panels",
        "α_N = ∫ η e^{-2πiNη} dη = i(-1)^N/(2πN)",
        worst,
        1e-10,
    ));

    let q = build_q(&lattice);
    let p = build_p(&lattice);
    out.push(Record::exact(
        "pq.qp-hermitian",
        format!("max(|q - q†|, |p - p†|), N = {n}"),
        "q = Q + a_Q, p = P + a_P",
        q.hermiticity_defect().max(p.hermiticity_defect()),
    ));
    drop((q, p));

    let weights = random_weights(&mut rng);
    let sizes = [n / 4, n / 2, n];
    let series = sizes
        .iter()
        .map(|&m| {
            let l = PQLattice::square(m)?;
            let v = edge_orthogonal_probe(&l, &weights)?;
            Ok(commutator_action_deviation(&l, &v, m as i64 / 2)?)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    out.push(
        Record::decreasing(
            "pq.edge-orthogonal-decay",
            format!("random v ⟂ ψ_edge on |Q|,|P| <= 1, N = {sizes:?}"),
            "[q,p]v = (i/2π)v for v ⟂ ψ_edge",
            series,
        )
        .with_note("deviation measured on states at least N/2 inside the window"),
    );

    let d = qp_commutator_defect(&lattice, params.margin)?;
    out.push(
        Record::measured(
            "pq.qp-interior-defect",
            format!("N = {n}, margin = {}", params.margin),
            "[q,p] = (i/2π)(I - |ψ_edge⟩⟨ψ_edge|), ψ_edge = (-1)^{Q+P}",
            d.defect,
        )
        .with_note(format!(
            "edge overlap {:.6}, {} interior states",
            d.edge_overlap, d.interior
        )),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_a_known_coefficient() {
        // α_1 = -i/2π
        let got = fourier_quadrature(1, 1 << 12);
        assert!((got - Complex64::new(0.0, -1.0 / TAU)).norm() < 1e-12);
    }

    #[test]
    fn probe_is_edge_orthogonal() {
        let l = PQLattice::square(4).unwrap();
        let v = edge_orthogonal_probe(&l, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]).unwrap();
        assert!(edge_state_pq(&l).inner(&v).unwrap().norm() < 1e-13);
        assert!(v.norm() > 1.0);
    }
}
