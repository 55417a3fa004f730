//! Closed forms checked against independent numerical evaluations.

use std::f64::consts::{PI, TAU};

use cadual_core::linalg::{phase, Complex64, ComplexVector};
use cadual_core::pq::{
    eta_fourier_coefficient, midpoint_kappa_grid, p_basis_kernel, transform_to_p_basis,
    PQLattice, TruncationWindow,
};

/// Composite Simpson rule on `[a, b]` with `panels` (even) sub-intervals.
fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + k as f64 * h) * w;
    }
    acc * (h / 3.0)
}

#[test]
fn fourier_coefficients_match_quadrature() {
    let mut worst = 0.0f64;
    for n in -64i64..=64 {
        let integral = simpson(
            |eta| Complex64::from_polar(eta, -TAU * n as f64 * eta),
            -0.5,
            0.5,
            1 << 18,
        );
        worst = worst.max((integral - eta_fourier_coefficient(n)).norm());
    }
    assert!(worst <= 1e-10, "worst deviation {worst:e}");
}

#[test]
fn minus_two_coefficient_is_minus_i_over_4pi() {
    let integral = simpson(|eta| Complex64::from_polar(eta, 4.0 * PI * eta), -0.5, 0.5, 1 << 16);
    let want = Complex64::new(0.0, -1.0 / (4.0 * PI));
    assert!((integral - want).norm() < 1e-12);
    assert!((eta_fourier_coefficient(-2) - want).norm() < 1e-17);
}

#[test]
fn kernel_matches_fourier_integral() {
    // ⟨K,κ|Q,P⟩ = e^{-2πiκQ} ∫_{-1/2}^{1/2} e^{2πi(K-P+κ)y} dy
    for (k, kappa, q, p) in [(0, 0.25, 0, 0), (2, -0.3, 1, -1), (-1, 0.5, 3, 2), (0, 0.0, 2, 0), (1, 0.1, -2, 4)] {
        let d = (k - p) as f64 + kappa;
        let integral = simpson(|y| phase(d * y), -0.5, 0.5, 1 << 12);
        let want = phase(-kappa * q as f64) * integral;
        let got = p_basis_kernel(k, kappa, q, p);
        assert!((got - want).norm() < 1e-12, "({k},{kappa},{q},{p}): {got} vs {want}");
    }
}

fn gaussian_ratio(n: u32) -> f64 {
    let lattice = PQLattice::square(n).unwrap();
    let sigma = n as f64 / 4.0;
    let amps: Vec<f64> = (0..lattice.dim())
        .map(|i| {
            let (q, p) = lattice.coords(i);
            (-((q * q + p * p) as f64) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let psi = ComplexVector::from_real(lattice.basis().clone(), &amps).unwrap().normalized();
    let grid = midpoint_kappa_grid(400);
    let out = transform_to_p_basis(&lattice, &psi, lattice.window_p(), &grid).unwrap();
    out.norm_sqr() / psi.norm().powi(2)
}

#[test]
fn p_basis_transform_preserves_the_norm_of_smooth_states() {
    let ratios: Vec<f64> = [8u32, 16, 32].iter().map(|&n| gaussian_ratio(n)).collect();
    println!("norm ratios {ratios:?}");
    assert!((ratios[1] - 1.0).abs() <= 0.05);
    assert!((ratios[2] - 1.0).abs() <= (ratios[0] - 1.0).abs() + 1e-12);
}

#[test]
fn window_of_width_one_is_the_smallest() {
    assert!(TruncationWindow::new(1).is_ok());
}
