//! Integer operators and their bounded conjugates on truncated windows.
//!
//! An integer operator `Q` with spectrum `ℤ` has a conjugate `η ∈ (-1/2, 1/2]`
//! whose matrix elements in the `Q` basis are
//!
//! ```text
//! ⟨Q₁|η|Q₂⟩ = (i/2π) (-1)^{Q₁-Q₂} / (Q₁ - Q₂),   ⟨Q|η|Q⟩ = 0,
//! ```
//!
//! and `[η, Q] = (i/2π)(I - |ψ⟩⟨ψ|)` with the unnormalised edge state
//! `⟨Q|ψ⟩ = (-1)^Q`. For a pair of integers `(Q, P)` the real operators
//! `q = Q + a_Q`, `p = P + a_P` obey `[q, p] = (i/2π)(I - |ψ_edge⟩⟨ψ_edge|)`
//! on `ℤ²`, with `⟨Q,P|ψ_edge⟩ = (-1)^{P+Q}`. Everything here is realised on
//! symmetric windows `[-N, N]`, where the truncation shows up near the edges.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, gemm, phase, Basis, Complex64, ComplexMatrix, ComplexVector, Label, ZERO,
};

/// Prefactor `i/2π` of every commutator in this module.
pub const I_OVER_2PI: Complex64 = Complex64::new(0.0, 1.0 / TAU);

/// Largest `(Q, P)` lattice for which dense `q` and `p` are built
/// (`N = 32` on a square window).
pub const MAX_PQ_DIM: usize = 65 * 65;

fn check_pq_budget(lattice: &PQLattice) -> Result<()> {
    if lattice.dim() > MAX_PQ_DIM {
        return Err(Error::BudgetExceeded {
            what: "dense (Q, P) lattice",
            required: lattice.dim() as u128,
            limit: MAX_PQ_DIM as u128,
        });
    }
    Ok(())
}

/// Integers `-N..=N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationWindow {
    n: u32,
}

impl TruncationWindow {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("window half-width N", n, "N >= 1"));
        }
        Ok(Self { n })
    }

    pub fn half_width(&self) -> i64 {
        self.n as i64
    }

    pub fn dim(&self) -> usize {
        2 * self.n as usize + 1
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.half_width();
        -n..=n
    }

    pub fn index_of(&self, q: i64) -> Option<usize> {
        let n = self.half_width();
        (-n..=n).contains(&q).then(|| (q + n) as usize)
    }

    pub fn value_at(&self, index: usize) -> i64 {
        index as i64 - self.half_width()
    }

    pub fn basis(&self) -> Basis {
        Basis::integer_range(-self.half_width(), self.half_width())
    }

    /// Distance from `q` to the nearer end of the window.
    pub fn depth(&self, q: i64) -> i64 {
        self.half_width() - q.abs()
    }
}

/// `(-1)^k`.
fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Pairs `(Q, P)` with `Q` the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct PQLattice {
    window_q: TruncationWindow,
    window_p: TruncationWindow,
    basis: Basis,
}

impl PQLattice {
    pub fn new(window_q: TruncationWindow, window_p: TruncationWindow) -> Self {
        let basis = Basis::product(&[window_q.basis(), window_p.basis()]);
        Self {
            window_q,
            window_p,
            basis,
        }
    }

    pub fn square(n: u32) -> Result<Self> {
        let w = TruncationWindow::new(n)?;
        Ok(Self::new(w, w))
    }

    pub fn window_q(&self) -> TruncationWindow {
        self.window_q
    }

    pub fn window_p(&self) -> TruncationWindow {
        self.window_p
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, q: i64, p: i64) -> Option<usize> {
        Some(self.window_q.index_of(q)? * self.window_p.dim() + self.window_p.index_of(p)?)
    }

    pub fn coords(&self, index: usize) -> (i64, i64) {
        let np = self.window_p.dim();
        (
            self.window_q.value_at(index / np),
            self.window_p.value_at(index % np),
        )
    }

    /// Smallest distance to the window edge in either direction.
    pub fn depth(&self, index: usize) -> i64 {
        let (q, p) = self.coords(index);
        self.window_q.depth(q).min(self.window_p.depth(p))
    }

    /// Basis indices lying at least `margin` inside the window.
    pub fn interior(&self, margin: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.depth(i) >= margin).collect()
    }
}

/// `⟨Q|ψ⟩ = (-1)^Q`, unnormalised.
pub fn edge_state_q(window: TruncationWindow) -> ComplexVector {
    let entries: Vec<f64> = window.indices().map(sign).collect();
    ComplexVector::from_real(window.basis(), &entries).expect("sizes agree")
}

/// `⟨Q,P|ψ_edge⟩ = (-1)^{P+Q}`, unnormalised.
pub fn edge_state_pq(lattice: &PQLattice) -> ComplexVector {
    let entries: Vec<f64> = (0..lattice.dim())
        .map(|i| {
            let (q, p) = lattice.coords(i);
            sign(q + p)
        })
        .collect();
    ComplexVector::from_real(lattice.basis().clone(), &entries).expect("sizes agree")
}

/// The diagonal integer operator on a window.
pub fn integer_operator(window: TruncationWindow) -> ComplexMatrix {
    let diag: Vec<f64> = window.indices().map(|q| q as f64).collect();
    ComplexMatrix::diagonal(&window.basis(), &diag).expect("sizes agree")
}

fn eta_entry(d: i64) -> Complex64 {
    if d == 0 {
        ZERO
    } else {
        Complex64::new(0.0, sign(d) / (TAU * d as f64))
    }
}

/// The conjugate `η` of `Q`, truncated to the window.
pub fn build_eta(window: TruncationWindow) -> ComplexMatrix {
    let n = window.half_width();
    ComplexMatrix::from_fn(&window.basis(), |r, c| eta_entry((r as i64 - n) - (c as i64 - n)))
}

/// `∫_{-1/2}^{1/2} η e^{-2πiNη} dη = i(-1)^N / (2πN)`, zero for `N = 0`.
pub fn eta_fourier_coefficient(n: i64) -> Complex64 {
    if n == 0 {
        ZERO
    } else {
        Complex64::new(0.0, sign(n) / (TAU * n as f64))
    }
}

/// `max |[η, Q] - (i/2π)(I - |ψ⟩⟨ψ|)|`.
pub fn eta_commutator_check(window: TruncationWindow) -> f64 {
    let eta = build_eta(window);
    let q = integer_operator(window);
    let c = commutator(&eta, &q).expect("same basis");
    let psi = edge_state_q(window);
    let d = window.dim();
    let mut worst = 0.0f64;
    for r in 0..d {
        for s in 0..d {
            let delta = if r == s { 1.0 } else { 0.0 };
            let want = I_OVER_2PI * (delta - (psi.get(r) * psi.get(s).conj()).re);
            worst = worst.max((c.get(r, s) - want).norm());
        }
    }
    worst
}

/// `(-1)^{P+Q+1} iP / 2π(P²+Q²)` at offsets `Q = Q₂-Q₁`, `P = P₂-P₁`.
fn a_q_entry(dq: i64, dp: i64) -> Complex64 {
    if dq == 0 && dp == 0 {
        return ZERO;
    }
    let r2 = (dq * dq + dp * dp) as f64;
    Complex64::new(0.0, -sign(dq + dp) * dp as f64 / (TAU * r2))
}

/// `(-1)^{P+Q} iQ / 2π(P²+Q²)`.
fn a_p_entry(dq: i64, dp: i64) -> Complex64 {
    if dq == 0 && dp == 0 {
        return ZERO;
    }
    let r2 = (dq * dq + dp * dp) as f64;
    Complex64::new(0.0, sign(dq + dp) * dq as f64 / (TAU * r2))
}

fn offset_operator(lattice: &PQLattice, entry: fn(i64, i64) -> Complex64) -> ComplexMatrix {
    let coords: Vec<(i64, i64)> = (0..lattice.dim()).map(|i| lattice.coords(i)).collect();
    ComplexMatrix::from_fn(lattice.basis(), |r, c| {
        let (q1, p1) = coords[r];
        let (q2, p2) = coords[c];
        entry(q2 - q1, p2 - p1)
    })
}

pub fn build_a_q(lattice: &PQLattice) -> ComplexMatrix {
    offset_operator(lattice, a_q_entry)
}

pub fn build_a_p(lattice: &PQLattice) -> ComplexMatrix {
    offset_operator(lattice, a_p_entry)
}

/// `q = Q + a_Q`.
pub fn build_q(lattice: &PQLattice) -> ComplexMatrix {
    let diag: Vec<f64> = (0..lattice.dim()).map(|i| lattice.coords(i).0 as f64).collect();
    let q = ComplexMatrix::diagonal(lattice.basis(), &diag).expect("sizes agree");
    q.add(&build_a_q(lattice)).expect("same basis")
}

/// `p = P + a_P`.
pub fn build_p(lattice: &PQLattice) -> ComplexMatrix {
    let diag: Vec<f64> = (0..lattice.dim()).map(|i| lattice.coords(i).1 as f64).collect();
    let p = ComplexMatrix::diagonal(lattice.basis(), &diag).expect("sizes agree");
    p.add(&build_a_p(lattice)).expect("same basis")
}

/// Interior deviation of `[q, p]` from its continuum form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorDefect {
    /// `max |[q,p] - (i/2π)(I - |ψ_edge⟩⟨ψ_edge|)|` over the interior block.
    pub defect: f64,
    /// Least-squares weight of `-(i/2π)|ψ_edge⟩⟨ψ_edge|` in
    /// `[q,p] - (i/2π)I` over the interior block; 1 when the edge term is
    /// fully present.
    pub edge_overlap: f64,
    /// Number of interior basis states.
    pub interior: usize,
}

/// Measure `[q, p]` on basis states at least `margin` inside the window.
///
/// Only the interior rows of `q`, `p` and interior columns are multiplied;
/// the intermediate sum still runs over the whole window.
pub fn qp_commutator_defect(lattice: &PQLattice, margin: i64) -> Result<CommutatorDefect> {
    let limit = lattice
        .window_q
        .half_width()
        .min(lattice.window_p.half_width());
    if margin < 0 || margin >= limit {
        return Err(Error::out_of_range(
            "interior margin",
            margin,
            format!("0 <= margin < {limit}"),
        ));
    }
    check_pq_budget(lattice)?;
    let q = build_q(lattice);
    let p = build_p(lattice);
    let inner = lattice.interior(margin);
    let d = lattice.dim();
    let k = inner.len();
    let rows = |m: &ComplexMatrix| DMatrix::from_fn(k, d, |r, c| m.get(inner[r], c));
    let cols = |m: &ComplexMatrix| DMatrix::from_fn(d, k, |r, c| m.get(r, inner[c]));
    let c = gemm(&rows(&q), &cols(&p)) - gemm(&rows(&p), &cols(&q));

    let psi = edge_state_pq(lattice);
    let mut defect = 0.0f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..k {
        for b in 0..k {
            let delta = if a == b { 1.0 } else { 0.0 };
            let proj = psi.get(inner[a]).re * psi.get(inner[b]).re;
            let target = I_OVER_2PI * (delta - proj);
            defect = defect.max((c[(a, b)] - target).norm());
            let edge = -I_OVER_2PI * proj;
            let rest = c[(a, b)] - I_OVER_2PI * delta;
            num += (edge.conj() * rest).re;
            den += edge.norm_sqr();
        }
    }
    Ok(CommutatorDefect {
        defect,
        edge_overlap: num / den,
        interior: k,
    })
}

/// `max |([q,p] v - (i/2π) v)(Q,P)|` over basis states at least `margin`
/// inside the window. Meant for `v` orthogonal to the edge state.
pub fn commutator_action_deviation(
    lattice: &PQLattice,
    v: &ComplexVector,
    margin: i64,
) -> Result<f64> {
    if v.basis() != lattice.basis() {
        return Err(Error::BasisMismatch {
            op: "commutator_action_deviation",
        });
    }
    check_pq_budget(lattice)?;
    let q = build_q(lattice);
    let p = build_p(lattice);
    let w = q.apply(&p.apply(v)?)?.sub(&p.apply(&q.apply(v)?)?)?;
    Ok(lattice
        .interior(margin)
        .into_iter()
        .map(|i| (w.get(i) - I_OVER_2PI * v.get(i)).norm())
        .fold(0.0, f64::max))
}

/// `x = integer + frac` with `frac ∈ (-1/2, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealDecomposition {
    pub integer: i64,
    pub frac: f64,
}

/// Nearest-integer split, ties `n + 1/2` going to `n`.
pub fn decompose_real(x: f64) -> Result<RealDecomposition> {
    if !x.is_finite() || x.abs() >= 2f64.powi(62) {
        return Err(Error::out_of_range("real to decompose", x, "finite, |x| < 2^62"));
    }
    let mut integer = (x - 0.5).ceil();
    let mut frac = x - integer;
    if frac > 0.5 {
        integer += 1.0;
        frac = x - integer;
    } else if frac <= -0.5 {
        integer -= 1.0;
        frac = x - integer;
    }
    Ok(RealDecomposition {
        integer: integer as i64,
        frac,
    })
}

/// `sin(πd)/(πd)`, with the removable point handled explicitly.
fn sinc(d: f64) -> f64 {
    if d.abs() < 1e-12 {
        1.0
    } else {
        (PI * d).sin() / (PI * d)
    }
}

/// `⟨K,κ|Q,P⟩ = (sin πκ / π) (-1)^{K-P} e^{-2πiκQ} / (K - P + κ)`.
pub fn p_basis_kernel(k: i64, kappa: f64, q: i64, p: i64) -> Complex64 {
    let d = (k - p) as f64 + kappa;
    let radial = if d.abs() < 1e-12 {
        sinc(d)
    } else {
        (PI * kappa).sin() / PI * sign(k - p) / d
    };
    phase(-kappa * q as f64) * radial
}

/// Values `⟨K,κ|ψ⟩` on a grid of `K` and `κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PBasisGrid {
    pub k: Vec<i64>,
    pub kappa: Vec<f64>,
    /// `values[a][b]` is the amplitude at `(k[a], kappa[b])`.
    pub values: Vec<Vec<Complex64>>,
}

impl PBasisGrid {
    /// `Σ_K Σ_κ |⟨K,κ|ψ⟩|² Δκ` for a uniform `κ` grid spanning one period.
    pub fn norm_sqr(&self) -> f64 {
        let dk = 1.0 / self.kappa.len() as f64;
        self.values
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            * dk
    }
}

/// Midpoints of `m` equal cells of `(-1/2, 1/2]`.
pub fn midpoint_kappa_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| -0.5 + (j as f64 + 0.5) / m as f64).collect()
}

/// Apply the `(Q,P) → (K,κ)` kernel to a lattice state.
pub fn transform_to_p_basis(
    lattice: &PQLattice,
    state: &ComplexVector,
    k_window: TruncationWindow,
    kappa_grid: &[f64],
) -> Result<PBasisGrid> {
    if state.basis() != lattice.basis() {
        return Err(Error::BasisMismatch {
            op: "transform_to_p_basis",
        });
    }
    if let Some(bad) = kappa_grid.iter().find(|&&k| !(k > -0.5 && k <= 0.5)) {
        return Err(Error::out_of_range("kappa", bad, "(-1/2, 1/2]"));
    }
    let wp = lattice.window_p;
    // g(P, κ) = Σ_Q e^{-2πiκQ} ψ(Q, P)
    let g: Vec<Vec<Complex64>> = wp
        .indices()
        .map(|p| {
            kappa_grid
                .iter()
                .map(|&kappa| {
                    lattice
                        .window_q
                        .indices()
                        .map(|q| {
                            let i = lattice.index(q, p).expect("inside window");
                            phase(-kappa * q as f64) * state.get(i)
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let values = k_window
        .indices()
        .map(|k| {
            kappa_grid
                .iter()
                .enumerate()
                .map(|(b, &kappa)| {
                    wp.indices()
                        .zip(&g)
                        .map(|(p, row)| p_basis_kernel(k, kappa, 0, p) * row[b])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(PBasisGrid {
        k: k_window.indices().collect(),
        kappa: kappa_grid.to_vec(),
        values,
    })
}

/// Label `(Q, P)` as used by the lattice basis.
pub fn pq_label(q: i64, p: i64) -> Label {
    Label(vec![q, p])
}
