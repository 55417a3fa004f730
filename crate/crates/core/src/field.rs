//! Free scalar field on a 1+1 dimensional lattice.
//!
//! Classically the field splits into movers `a^L = p + Dφ`, `a^R = p - Dφ`
//! that only shift under time evolution. On the quantum side each site
//! carries an integer operator `A(x)` with conjugate `η(x)`, and
//!
//! ```text
//! a^L(x) = A^L(x) + η^L(x+1),   a^R(x) = A^R(x) + η^R(x-1)
//! ```
//!
//! reproduce the lattice commutators `[a^L(x), a^L(x±1)] = ±i/2π` up to
//! per-site edge projectors, with the opposite sign for `a^R`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, Basis, Complex64, ComplexMatrix, ZERO};
use crate::pq::{build_eta, edge_state_q, integer_operator, TruncationWindow, I_OVER_2PI};

/// Field `φ` and momentum `p` on a periodic ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeField1D {
    pub phi: Vec<f64>,
    pub pi: Vec<f64>,
    #[serde(default = "unit_spacing")]
    pub spacing: f64,
}

fn unit_spacing() -> f64 {
    1.0
}

impl LatticeField1D {
    pub fn new(phi: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        Self::with_spacing(phi, pi, 1.0)
    }

    pub fn with_spacing(phi: Vec<f64>, pi: Vec<f64>, spacing: f64) -> Result<Self> {
        if phi.is_empty() || phi.len() != pi.len() {
            return Err(Error::Invalid(format!(
                "field needs equal, non-zero site counts (phi {}, pi {})",
                phi.len(),
                pi.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::out_of_range("lattice spacing", spacing, "> 0"));
        }
        Ok(Self { phi, pi, spacing })
    }

    pub fn sites(&self) -> usize {
        self.phi.len()
    }

    /// `(φ(x+1) - φ(x-1)) / 2a`, periodic.
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.sites();
        (0..n)
            .map(|x| (self.phi[(x + 1) % n] - self.phi[(x + n - 1) % n]) / (2.0 * self.spacing))
            .collect()
    }

    /// `½(p² + (Dφ)²)` per site.
    pub fn canonical_density(&self) -> Vec<f64> {
        self.pi
            .iter()
            .zip(self.gradient())
            .map(|(p, d)| 0.5 * (p * p + d * d))
            .collect()
    }
}

/// Left and right movers on a ring (or on the interior of a segment).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoverFields {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl MoverFields {
    /// `p = (a^L + a^R)/2`.
    pub fn momentum(&self) -> Vec<f64> {
        self.left
            .iter()
            .zip(&self.right)
            .map(|(l, r)| (l + r) / 2.0)
            .collect()
    }

    /// `Dφ = (a^L - a^R)/2`.
    pub fn gradient(&self) -> Vec<f64> {
        self.left
            .iter()
            .zip(&self.right)
            .map(|(l, r)| (l - r) / 2.0)
            .collect()
    }
}

fn movers_from(pi: &[f64], grad: &[f64]) -> MoverFields {
    MoverFields {
        left: pi.iter().zip(grad).map(|(p, d)| p + d).collect(),
        right: pi.iter().zip(grad).map(|(p, d)| p - d).collect(),
    }
}

pub fn split_movers(field: &LatticeField1D) -> MoverFields {
    movers_from(&field.pi, &field.gradient())
}

/// Movers at the interior sites `1..n-1` of an open segment.
pub fn split_movers_open(phi: &[f64], pi: &[f64]) -> Result<MoverFields> {
    if phi.len() != pi.len() || phi.len() < 3 {
        return Err(Error::Invalid(
            "open segment needs equal site counts and at least 3 sites".into(),
        ));
    }
    let grad: Vec<f64> = phi.windows(3).map(|w| (w[2] - w[0]) / 2.0).collect();
    Ok(movers_from(&pi[1..pi.len() - 1], &grad))
}

/// `¼((a^L)² + (a^R)²)` per site.
pub fn hamilton_density(movers: &MoverFields) -> Vec<f64> {
    movers
        .left
        .iter()
        .zip(&movers.right)
        .map(|(l, r)| 0.25 * (l * l + r * r))
        .collect()
}

fn rotate<T: Copy>(values: &[T], by: i64) -> Vec<T> {
    let n = values.len() as i64;
    (0..n)
        .map(|x| values[(x + by).rem_euclid(n) as usize])
        .collect()
}

/// Periodic evolution: `a^L(x) ← a^L(x + k)`, `a^R(x) ← a^R(x - k)`.
pub fn shift_evolve(movers: &MoverFields, steps: i64) -> MoverFields {
    MoverFields {
        left: rotate(&movers.left, steps),
        right: rotate(&movers.right, -steps),
    }
}

/// Exact integer solution of `φ(x,t+1) + φ(x,t-1) = φ(x+1,t) + φ(x-1,t)`
/// on a ring, carried by integer movers
///
/// ```text
/// ℓ_t(x) = φ(x, t+1) - φ(x-1, t),   r_t(x) = φ(x, t+1) - φ(x+1, t),
/// ```
///
/// which are functions of `x + t` and `x - t` respectively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerWave {
    /// `φ(·, t)`.
    pub slice: Vec<i64>,
    pub left: Vec<i64>,
    pub right: Vec<i64>,
    pub time: i64,
}

impl IntegerWave {
    /// Movers from two consecutive slices `φ(·,0)`, `φ(·,1)`.
    pub fn from_slices(phi0: &[i64], phi1: &[i64]) -> Result<Self> {
        let n = phi0.len();
        if n < 3 || phi1.len() != n {
            return Err(Error::Invalid(
                "wave needs two slices of equal length >= 3".into(),
            ));
        }
        let left = (0..n).map(|x| phi1[x] - phi0[(x + n - 1) % n]).collect();
        let right = (0..n).map(|x| phi1[x] - phi0[(x + 1) % n]).collect();
        Ok(Self {
            slice: phi0.to_vec(),
            left,
            right,
            time: 0,
        })
    }

    pub fn sites(&self) -> usize {
        self.slice.len()
    }

    /// `φ(·, t+1)` from the slice and the left movers.
    pub fn next_slice(&self) -> Vec<i64> {
        let n = self.sites();
        (0..n)
            .map(|x| self.slice[(x + n - 1) % n] + self.left[x])
            .collect()
    }

    /// Advance by shifting the movers; the field is rebuilt from them.
    pub fn advance(&self, steps: u64) -> Self {
        let mut w = self.clone();
        for _ in 0..steps {
            let next = w.next_slice();
            w.left = rotate(&w.left, 1);
            w.right = rotate(&w.right, -1);
            w.slice = next;
            w.time += 1;
        }
        w
    }

    /// `φ(x, t+1) - φ(x+1, t) - r_t(x)` should vanish; returns the worst.
    pub fn right_mover_mismatch(&self) -> i64 {
        let n = self.sites();
        let next = self.next_slice();
        (0..n)
            .map(|x| (next[x] - self.slice[(x + 1) % n] - self.right[x]).abs())
            .max()
            .unwrap_or(0)
    }
}

/// Worst `|φ(x,t+1) + φ(x,t-1) - φ(x+1,t) - φ(x-1,t)|` over a ring.
pub fn wave_equation_residual(prev: &[i64], cur: &[i64], next: &[i64]) -> i64 {
    let n = cur.len();
    (0..n)
        .map(|x| (next[x] + prev[x] - cur[(x + 1) % n] - cur[(x + n - 1) % n]).abs())
        .max()
        .unwrap_or(0)
}

/// Largest dense sector handled by the operator construction.
pub const MAX_SECTOR_DIM: usize = 1024;

/// Per-site operator realisation of one chirality sector.
#[derive(Clone, Debug)]
pub struct IntegerMoverOperators {
    pub sites: usize,
    pub window: TruncationWindow,
    pub basis: Basis,
    /// `A(x)` per site.
    pub a: Vec<ComplexMatrix>,
    /// `η(x)` per site.
    pub eta: Vec<ComplexMatrix>,
}

impl IntegerMoverOperators {
    pub fn new(sites: usize, window: TruncationWindow) -> Result<Self> {
        if sites < 3 {
            return Err(Error::out_of_range("site count", sites, ">= 3"));
        }
        let dim = (window.dim() as u128).saturating_pow(sites as u32);
        if dim > MAX_SECTOR_DIM as u128 {
            return Err(Error::BudgetExceeded {
                what: "mover sector",
                required: dim,
                limit: MAX_SECTOR_DIM as u128,
            });
        }
        let a = (0..sites)
            .map(|x| embed(&integer_operator(window), x, sites, window))
            .collect();
        let eta = (0..sites)
            .map(|x| embed(&build_eta(window), x, sites, window))
            .collect();
        let basis = Basis::product(&vec![window.basis(); sites]);
        Ok(Self {
            sites,
            window,
            basis,
            a,
            eta,
        })
    }

    fn wrap(&self, x: i64) -> usize {
        x.rem_euclid(self.sites as i64) as usize
    }

    /// `a^L(x) = A(x) + η(x+1)`.
    pub fn left(&self, x: usize) -> ComplexMatrix {
        let y = self.wrap(x as i64 + 1);
        self.a[x].add(&self.eta[y]).expect("same basis")
    }

    /// `a^R(x) = A(x) + η(x-1)`.
    pub fn right(&self, x: usize) -> ComplexMatrix {
        let y = self.wrap(x as i64 - 1);
        self.a[x].add(&self.eta[y]).expect("same basis")
    }

    /// `I - |ψ⟩⟨ψ|` on site `x`, identity elsewhere.
    pub fn edge_complement(&self, x: usize) -> ComplexMatrix {
        let psi = edge_state_q(self.window);
        let d = self.window.dim();
        let single = ComplexMatrix::from_fn(&self.window.basis(), |r, c| {
            let delta = if r == c { 1.0 } else { 0.0 };
            Complex64::new(delta - psi.get(r).re * psi.get(c).re, 0.0)
        });
        debug_assert_eq!(single.nrows(), d);
        embed(&single, x, self.sites, self.window)
    }
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` on factor `site`.
fn embed(op: &ComplexMatrix, site: usize, sites: usize, window: TruncationWindow) -> ComplexMatrix {
    let id = ComplexMatrix::identity(&window.basis());
    let mut out: Option<ComplexMatrix> = None;
    for s in 0..sites {
        let factor = if s == site { op } else { &id };
        out = Some(match out {
            None => factor.clone(),
            Some(acc) => acc.kron(factor),
        });
    }
    out.expect("at least one site")
}

/// Left and right mover operators for every site.
pub fn compose_quantum_movers(
    sites: usize,
    window: TruncationWindow,
) -> Result<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
    let ops = IntegerMoverOperators::new(sites, window)?;
    let left = (0..sites).map(|x| ops.left(x)).collect();
    let right = (0..sites).map(|x| ops.right(x)).collect();
    Ok((left, right))
}

/// `max |[X ⊗ I, I ⊗ Y]|` with the joint space built densely.
pub fn cross_commutator_dense(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let lx = x.kron(&ComplexMatrix::identity(y.row_basis()));
    let ry = ComplexMatrix::identity(x.row_basis()).kron(y);
    Ok(commutator(&lx, &ry)?.max_abs())
}

/// Same quantity without the joint space: every entry of the commutator is
/// `X_ij Y_kl - Y_kl X_ij` (or a difference of zeros), so only pairs of
/// non-zero entries are visited.
pub fn cross_commutator_kronecker(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let xs = nonzeros(x.data());
    let ys = nonzeros(y.data());
    let mut worst = 0.0f64;
    for &b in &ys {
        for &a in &xs {
            worst = worst.max((a * b - b * a).norm());
        }
    }
    worst
}

/// Worst deviations per commutator category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCommutatorReport {
    pub sites: usize,
    pub window: u32,
    pub sector_dim: usize,
    /// `[a(x), a(x)]`, both chiralities.
    pub same_site: f64,
    /// `[a^L(x), a^L(x+1)] - (i/2π)(I - P_edge(x+1))`.
    pub nearest_left: f64,
    /// `[a^R(x), a^R(x+1)] + (i/2π)(I - P_edge(x))`.
    pub nearest_right: f64,
    /// Pairs at ring distance ≥ 2; `None` when the ring has none.
    pub distant: Option<f64>,
    /// `[a^L(x), a^R(y)]` on the joint space `L ⊗ R`, all `x, y`.
    pub cross: f64,
    /// Largest `|O - O†|` over all mover operators.
    pub hermiticity: f64,
}

fn ring_distance(x: usize, y: usize, n: usize) -> usize {
    let d = x.abs_diff(y);
    d.min(n - d)
}

/// Check every commutator category on a ring of `sites` sites.
pub fn verify_lattice_commutators(
    sites: usize,
    window: TruncationWindow,
) -> Result<LatticeCommutatorReport> {
    let ops = IntegerMoverOperators::new(sites, window)?;
    let left: Vec<ComplexMatrix> = (0..sites).map(|x| ops.left(x)).collect();
    let right: Vec<ComplexMatrix> = (0..sites).map(|x| ops.right(x)).collect();

    let mut same_site = 0.0f64;
    let mut nearest_left = 0.0f64;
    let mut nearest_right = 0.0f64;
    let mut distant: Option<f64> = None;
    for x in 0..sites {
        for y in 0..sites {
            let cl = commutator(&left[x], &left[y])?;
            let cr = commutator(&right[x], &right[y])?;
            if x == y {
                same_site = same_site.max(cl.max_abs()).max(cr.max_abs());
                continue;
            }
            match ring_distance(x, y, sites) {
                1 => {
                    // orient the pair as (x, x+1)
                    let forward = (x + 1) % sites == y;
                    let (lo, hi) = if forward { (x, y) } else { (y, x) };
                    let s = if forward { 1.0 } else { -1.0 };
                    let want_l = ops.edge_complement(hi).scale(I_OVER_2PI * s);
                    let want_r = ops.edge_complement(lo).scale(-I_OVER_2PI * s);
                    nearest_left = nearest_left.max(cl.max_abs_diff(&want_l)?);
                    nearest_right = nearest_right.max(cr.max_abs_diff(&want_r)?);
                }
                _ => {
                    let d = cl.max_abs().max(cr.max_abs());
                    distant = Some(distant.unwrap_or(0.0).max(d));
                }
            }
        }
    }

    // The joint L ⊗ R space squares the sector dimension, so the cross
    // commutators are evaluated entrywise from the Kronecker structure.
    let cross = left
        .iter()
        .flat_map(|l| right.iter().map(move |r| cross_commutator_kronecker(l, r)))
        .fold(0.0, f64::max);

    let hermiticity = left
        .iter()
        .chain(&right)
        .map(|m| m.hermiticity_defect())
        .fold(0.0, f64::max);

    Ok(LatticeCommutatorReport {
        sites,
        window: window.half_width() as u32,
        sector_dim: ops.basis.len(),
        same_site,
        nearest_left,
        nearest_right,
        distant,
        cross,
        hermiticity,
    })
}

fn nonzeros(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    m.iter().copied().filter(|z| *z != ZERO).collect()
}
