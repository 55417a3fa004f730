//! Dense complex operators on labelled finite bases.
//!
//! Every operator in the crate is a [`ComplexMatrix`] whose rows and columns
//! carry a [`Basis`]: an ordered list of integer-tuple labels such as `Q`,
//! `(Q, P)`, an automaton state index, or an occupation pattern. Products and
//! commutators refuse to mix operators that live on different bases.
//!
//! Unitary matrices are diagonalised through the Cayley transform
//!
//! ```text
//! K = i (I - W)(I + W)^-1,   W = e^{iφ} U,
//! ```
//!
//! which is Hermitian with eigenvalue `-tan((θ - φ)/2)` for each eigenphase
//! `θ` of `U` (`U v = e^{-iθ} v`). The map is injective on the circle minus the
//! point `θ = φ + π`, so `φ` is chosen to put that point in the middle of the
//! widest gap of the spectrum.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for unitarity and eigen-residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A basis label: a tuple of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub Vec<i64>);

impl Label {
    pub fn scalar(value: i64) -> Self {
        Label(vec![value])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [v] => write!(f, "{v}"),
            vs => {
                write!(f, "(")?;
                for (k, v) in vs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct BasisInner {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

/// Ordered, duplicate-free list of labels. Cheap to clone.
#[derive(Clone)]
pub struct Basis(Arc<BasisInner>);

impl Basis {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Invalid("a basis needs at least one label".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (k, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), k).is_some() {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
        }
        Ok(Basis(Arc::new(BasisInner { labels, index })))
    }

    /// Labels `0, 1, …, n-1`.
    pub fn indexed(n: usize) -> Self {
        Self::integer_range(0, n as i64 - 1)
    }

    /// Labels `lo, lo+1, …, hi`.
    pub fn integer_range(lo: i64, hi: i64) -> Self {
        assert!(hi >= lo, "empty integer range {lo}..={hi}");
        Self::new((lo..=hi).map(Label::scalar).collect()).expect("integer labels are distinct")
    }

    /// Tensor-product basis; the first factor is the slowest-varying index.
    pub fn product(factors: &[Basis]) -> Self {
        let mut labels = vec![Label(Vec::new())];
        for factor in factors {
            let mut next = Vec::with_capacity(labels.len() * factor.len());
            for head in &labels {
                for tail in factor.labels() {
                    let mut l = head.0.clone();
                    l.extend_from_slice(&tail.0);
                    next.push(Label(l));
                }
            }
            labels = next;
        }
        Self::new(labels).expect("product of distinct labels is distinct")
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.0.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.0.labels
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.0.index.get(label).copied()
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.labels().iter().take(4).map(|l| l.to_string()).collect();
        let more = if self.len() > 4 { ", …" } else { "" };
        write!(f, "Basis[{}]{{{}{}}}", self.len(), shown.join(", "), more)
    }
}

/// Dense complex matrix with labelled rows and columns.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    rows: Basis,
    cols: Basis,
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: Basis, cols: Basis, data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != rows.len() || data.ncols() != cols.len() {
            return Err(Error::DimensionMismatch {
                op: "ComplexMatrix::new",
                left_rows: rows.len(),
                left_cols: cols.len(),
                right_rows: data.nrows(),
                right_cols: data.ncols(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn square(basis: Basis, data: DMatrix<Complex64>) -> Result<Self> {
        Self::new(basis.clone(), basis, data)
    }

    pub fn from_fn(basis: &Basis, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = basis.len();
        Self {
            rows: basis.clone(),
            cols: basis.clone(),
            data: DMatrix::from_fn(n, n, |r, c| f(r, c)),
        }
    }

    pub fn zeros(basis: &Basis) -> Self {
        Self::from_fn(basis, |_, _| ZERO)
    }

    pub fn identity(basis: &Basis) -> Self {
        Self::from_fn(basis, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn diagonal(basis: &Basis, diag: &[f64]) -> Result<Self> {
        if diag.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                op: "ComplexMatrix::diagonal",
                left_rows: basis.len(),
                left_cols: basis.len(),
                right_rows: diag.len(),
                right_cols: 1,
            });
        }
        Ok(Self::from_fn(basis, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols() && self.rows == self.cols
    }

    pub fn row_basis(&self) -> &Basis {
        &self.rows
    }

    pub fn col_basis(&self) -> &Basis {
        &self.cols
    }

    /// The basis of a square operator.
    pub fn basis(&self) -> &Basis {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[(r, c)]
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    fn require_square(&self, op: &'static str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                op,
                rows: self.nrows(),
                cols: self.ncols(),
            })
        }
    }

    fn require_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::DimensionMismatch {
                op,
                left_rows: self.nrows(),
                left_cols: self.ncols(),
                right_rows: other.nrows(),
                right_cols: other.ncols(),
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::BasisMismatch { op });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left_rows: self.nrows(),
                left_cols: self.ncols(),
                right_rows: other.nrows(),
                right_cols: other.ncols(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::BasisMismatch { op: "matmul" });
        }
        Ok(Self {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            data: gemm(&self.data, &other.data),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "add")?;
        Ok(Self {
            data: &self.data + &other.data,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "sub")?;
        Ok(Self {
            data: &self.data - &other.data,
            ..self.clone()
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
            ..self.clone()
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// `max |A - A†|`; zero iff the matrix is exactly Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.nrows();
        if n != self.ncols() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        if self.nrows() != self.ncols() {
            return f64::INFINITY;
        }
        let g = self.data.adjoint() * &self.data;
        let mut worst = 0.0f64;
        for ((r, c), z) in g.iter().enumerate().map(|(k, z)| ((k % g.nrows(), k / g.nrows()), z)) {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((z - target).norm());
        }
        worst
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.ncols() != v.dim() {
            return Err(Error::DimensionMismatch {
                op: "apply",
                left_rows: self.nrows(),
                left_cols: self.ncols(),
                right_rows: v.dim(),
                right_cols: 1,
            });
        }
        if self.cols != v.basis {
            return Err(Error::BasisMismatch { op: "apply" });
        }
        Ok(ComplexVector {
            basis: self.rows.clone(),
            data: &self.data * &v.data,
        })
    }

    /// `A ⊗ B` on the product bases (first factor slowest).
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            rows: Basis::product(&[self.rows.clone(), other.rows.clone()]),
            cols: Basis::product(&[self.cols.clone(), other.cols.clone()]),
            data: self.data.kronecker(&other.data),
        }
    }
}

/// Complex vector with a labelled basis.
#[derive(Clone, Debug)]
pub struct ComplexVector {
    basis: Basis,
    data: DVector<Complex64>,
}

impl ComplexVector {
    pub fn new(basis: Basis, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                op: "ComplexVector::new",
                left_rows: basis.len(),
                left_cols: 1,
                right_rows: entries.len(),
                right_cols: 1,
            });
        }
        Ok(Self {
            basis,
            data: DVector::from_vec(entries),
        })
    }

    pub fn from_real(basis: Basis, entries: &[f64]) -> Result<Self> {
        Self::new(basis, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(basis: &Basis) -> Self {
        Self {
            basis: basis.clone(),
            data: DVector::from_element(basis.len(), ZERO),
        }
    }

    pub fn basis_state(basis: &Basis, index: usize) -> Self {
        let mut v = Self::zeros(basis);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn entries(&self) -> &[Complex64] {
        self.data.as_slice()
    }

    pub fn data(&self) -> &DVector<Complex64> {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            basis: self.basis.clone(),
            data: self.data.map(|z| z * factor),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { op: "inner" });
        }
        Ok(self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { op: "sub" });
        }
        Ok(Self {
            basis: self.basis.clone(),
            data: &self.data - &other.data,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.data.iter().fold(0.0, |m, z| m.max(z.norm())))
    }
}

/// Complex product through four real products, which run on the optimised
/// `f64` kernel. Vanishing real or imaginary parts are skipped.
pub(crate) fn gemm(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let re = |m: &DMatrix<Complex64>| m.map(|z| z.re);
    let im = |m: &DMatrix<Complex64>| m.map(|z| z.im);
    let (ar, ai, br, bi) = (re(a), im(a), re(b), im(b));
    let nonzero = |m: &DMatrix<f64>| m.iter().any(|&x| x != 0.0);
    let (has_ar, has_ai, has_br, has_bi) = (nonzero(&ar), nonzero(&ai), nonzero(&br), nonzero(&bi));
    let zeros = || DMatrix::<f64>::zeros(a.nrows(), b.ncols());
    let prod = |x: &DMatrix<f64>, hx: bool, y: &DMatrix<f64>, hy: bool| {
        if hx && hy {
            x * y
        } else {
            zeros()
        }
    };
    let real = prod(&ar, has_ar, &br, has_br) - prod(&ai, has_ai, &bi, has_bi);
    let imag = prod(&ar, has_ar, &bi, has_bi) + prod(&ai, has_ai, &br, has_br);
    DMatrix::from_fn(a.nrows(), b.ncols(), |r, c| Complex64::new(real[(r, c)], imag[(r, c)]))
}

/// `AB - BA`.
///
/// `AB` and `BA` are each formed once and subtracted, so
/// `commutator(a, b)` is the exact negation of `commutator(b, a)`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square("commutator")?;
    b.require_square("commutator")?;
    a.require_same_shape(b, "commutator")?;
    let ab = gemm(&a.data, &b.data);
    let ba = gemm(&b.data, &a.data);
    Ok(ComplexMatrix {
        rows: a.rows.clone(),
        cols: a.cols.clone(),
        data: ab - ba,
    })
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square("anticommutator")?;
    b.require_square("anticommutator")?;
    a.require_same_shape(b, "anticommutator")?;
    let ab = gemm(&a.data, &b.data);
    let ba = gemm(&b.data, &a.data);
    Ok(ComplexMatrix {
        rows: a.rows.clone(),
        cols: a.cols.clone(),
        data: ab + ba,
    })
}

/// `|v⟩⟨w|`, entry `(a, b) = v_a · conj(w_b)`.
pub fn outer(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix {
        rows: v.basis.clone(),
        cols: w.basis.clone(),
        data: &v.data * w.data.adjoint(),
    }
}

/// The base `ε = e^{2π}` of the phase convention `ε^{ix} = e^{2πix}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseBase {
    epsilon: f64,
}

impl Default for PhaseBase {
    fn default() -> Self {
        Self {
            epsilon: TAU.exp(),
        }
    }
}

impl PhaseBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `ε^{ix}`. The argument is reduced modulo 1 before the trig call, which
    /// keeps `|x|` up to ~10³ at full precision.
    pub fn phase(&self, x: f64) -> Complex64 {
        let frac = x - x.round();
        let (s, c) = (TAU * frac).sin_cos();
        Complex64::new(c, s)
    }
}

/// `e^{2πix}`.
pub fn phase(x: f64) -> Complex64 {
    PhaseBase::default().phase(x)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns; column basis is `0..n`.
    pub vectors: ComplexMatrix,
}

pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    h.require_square("eigh")?;
    let n = h.nrows();
    let max_iter = 1000 * n.max(10);
    let eig = SymmetricEigen::try_new(h.data.clone(), f64::EPSILON, max_iter).ok_or(
        Error::Convergence {
            what: "Hermitian eigen-decomposition",
            residual: f64::NAN,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let data = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::new(h.rows.clone(), Basis::indexed(n), data)?,
    })
}

/// `exp(-i H t)` for Hermitian `H`, through its spectral decomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    let v = eig.vectors.data();
    let n = v.nrows();
    let mut scaled = v.clone();
    for (c, &lambda) in eig.values.iter().enumerate() {
        let f = Complex64::from_polar(1.0, -lambda * t);
        for r in 0..n {
            scaled[(r, c)] *= f;
        }
    }
    ComplexMatrix::square(h.rows.clone(), scaled * v.adjoint())
}

/// Eigenphases `θ_k ∈ [0, 2π)` and eigenvectors with `U v_k = e^{-iθ_k} v_k`.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns; column basis is `0..n`.
    pub vectors: ComplexMatrix,
    /// Largest `‖U v_k - e^{-iθ_k} v_k‖_∞` observed.
    pub residual: f64,
}

impl UnitaryEigen {
    /// `Σ_k e^{-iθ_k} |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.vectors.data();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (c, &theta) in self.phases.iter().enumerate() {
            let f = Complex64::from_polar(1.0, -theta);
            for r in 0..n {
                scaled[(r, c)] *= f;
            }
        }
        let basis = self.vectors.row_basis().clone();
        ComplexMatrix::square(basis, scaled * v.adjoint()).expect("square by construction")
    }
}

/// Diagonalise a unitary matrix.
///
/// Phases are sorted ascending; phases equal within `tol` are ordered by a
/// lexicographic comparison of their (phase-normalised) eigenvectors.
pub fn eigendecompose_unitary(u: &ComplexMatrix, tol: f64) -> Result<UnitaryEigen> {
    u.require_square("eigendecompose_unitary")?;
    let defect = u.unitarity_defect();
    if defect > tol {
        return Err(Error::NotUnitary { defect, tol });
    }
    let n = u.nrows();
    let shift = cayley_shift(u)?;

    let w = u.data.map(|z| z * Complex64::from_polar(1.0, shift));
    let id = DMatrix::<Complex64>::identity(n, n);
    let lu = (&id + &w).lu();
    let x = lu.solve(&(&id - &w)).ok_or(Error::Convergence {
        what: "Cayley transform (I + W singular)",
        residual: f64::INFINITY,
    })?;
    let k = x.map(|z| z * I);
    let k = (&k + k.adjoint()).map(|z| z * 0.5);
    let k = ComplexMatrix::square(u.rows.clone(), k)?;
    let eig = eigh(&k)?;

    let vecs = eig.vectors.data();
    let mut columns: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for c in 0..n {
        let mut col: Vec<Complex64> = vecs.column(c).iter().copied().collect();
        normalize_global_phase(&mut col);
        let v = DVector::from_column_slice(&col);
        let uv = &u.data * &v;
        let rayleigh: Complex64 = v.iter().zip(uv.iter()).map(|(a, b)| a.conj() * b).sum();
        let mut theta = (-rayleigh.arg()).rem_euclid(TAU);
        if TAU - theta <= tol {
            theta = 0.0;
        }
        let lambda = Complex64::from_polar(1.0, -theta);
        let r = uv
            .iter()
            .zip(v.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - lambda * b).norm()));
        residual = residual.max(r);
        columns.push((theta, col));
    }
    if residual > tol {
        return Err(Error::Convergence {
            what: "unitary eigen-decomposition",
            residual,
        });
    }

    columns.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut start = 0;
    while start < columns.len() {
        let mut end = start + 1;
        while end < columns.len() && columns[end].0 - columns[end - 1].0 <= tol {
            end += 1;
        }
        columns[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        start = end;
    }

    let phases = columns.iter().map(|(t, _)| *t).collect();
    let data = DMatrix::from_fn(n, n, |r, c| columns[c].1[r]);
    Ok(UnitaryEigen {
        phases,
        vectors: ComplexMatrix::new(u.rows.clone(), Basis::indexed(n), data)?,
        residual,
    })
}

/// A rotation angle `φ` such that `-e^{-iφ}` sits in the widest gap of the
/// spectrum of `U`. Candidate eigenphases come from the Hermitian part
/// `(U + U†)/2`, whose eigenvalues are `cos θ`.
fn cayley_shift(u: &ComplexMatrix) -> Result<f64> {
    let herm = (&u.data + u.data.adjoint()).map(|z| z * 0.5);
    let herm = ComplexMatrix::square(u.rows.clone(), herm)?;
    let cosines = eigh(&herm)?.values;
    let mut angles: Vec<f64> = cosines
        .iter()
        .flat_map(|&c| {
            let t = c.clamp(-1.0, 1.0).acos();
            [t, (TAU - t).rem_euclid(TAU)]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut best_gap = angles[0] + TAU - angles[angles.len() - 1];
    let mut centre = (angles[angles.len() - 1] + best_gap / 2.0).rem_euclid(TAU);
    for pair in angles.windows(2) {
        let gap = pair[1] - pair[0];
        if gap > best_gap {
            best_gap = gap;
            centre = pair[0] + gap / 2.0;
        }
    }
    // e^{iφ} e^{-iθ} = -1 exactly when θ = φ + π.
    Ok(centre - std::f64::consts::PI)
}

/// Rotate so the first component of non-negligible size is real and positive.
fn normalize_global_phase(v: &mut [Complex64]) {
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-6 * max) {
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord.is_ne() {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(basis: &Basis, rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_fn(basis, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let err = Basis::new(vec![Label::scalar(1), Label::scalar(1)]).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("1".into()));
    }

    #[test]
    fn product_basis_orders_first_factor_slowest() {
        let b = Basis::product(&[Basis::integer_range(-1, 1), Basis::indexed(2)]);
        assert_eq!(b.len(), 6);
        assert_eq!(b.label(0), &Label(vec![-1, 0]));
        assert_eq!(b.label(1), &Label(vec![-1, 1]));
        assert_eq!(b.label(5), &Label(vec![1, 1]));
        assert_eq!(b.position(&Label(vec![0, 1])), Some(3));
    }

    #[test]
    fn commutator_with_identity_and_self_vanishes() {
        let b = Basis::indexed(3);
        let a = ComplexMatrix::from_fn(&b, |r, c| Complex64::new(r as f64 - c as f64, (r * c) as f64));
        let id = ComplexMatrix::identity(&b);
        assert_eq!(commutator(&id, &a).unwrap().max_abs(), 0.0);
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_of_x_and_z() {
        let b = Basis::indexed(2);
        let x = real(&b, &[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = real(&b, &[&[1.0, 0.0], &[0.0, -1.0]]);
        let expected = real(&b, &[&[0.0, -2.0], &[2.0, 0.0]]);
        assert_eq!(commutator(&x, &z).unwrap().max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatched_operands() {
        let a = ComplexMatrix::identity(&Basis::indexed(2));
        let b = ComplexMatrix::identity(&Basis::indexed(3));
        assert!(matches!(commutator(&a, &b), Err(Error::DimensionMismatch { .. })));
        let c = ComplexMatrix::identity(&Basis::integer_range(1, 2));
        assert!(matches!(commutator(&a, &c), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn phase_at_simple_points() {
        let base = PhaseBase::new();
        assert!((base.epsilon() - 535.491_655_524_764_7).abs() < 1e-9);
        assert_eq!(base.phase(0.0), ONE);
        assert!((base.phase(0.5) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((base.phase(0.25) - I).norm() < 1e-15);
    }

    #[test]
    fn outer_products() {
        let b = Basis::indexed(2);
        let e0 = ComplexVector::basis_state(&b, 0);
        let p = outer(&e0, &e0);
        assert_eq!(p.get(0, 0), ONE);
        assert_eq!(p.get(0, 1) + p.get(1, 0) + p.get(1, 1), ZERO);

        let h = 1.0 / 2f64.sqrt();
        let plus = ComplexVector::from_real(b.clone(), &[h, h]).unwrap();
        let pp = outer(&plus, &plus);
        for r in 0..2 {
            for c in 0..2 {
                assert!((pp.get(r, c) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }

        let v = ComplexVector::new(b.clone(), vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3)]).unwrap();
        let w = ComplexVector::new(b, vec![Complex64::new(0.2, -1.0), Complex64::new(3.0, 0.5)]).unwrap();
        let tr = outer(&v, &w).trace();
        assert!((tr - w.inner(&v).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn eigenphases_of_small_permutations() {
        let b2 = Basis::indexed(2);
        let id = ComplexMatrix::identity(&b2);
        let e = eigendecompose_unitary(&id, DEFAULT_TOL).unwrap();
        assert_eq!(e.phases, vec![0.0, 0.0]);

        let swap = real(&b2, &[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eigendecompose_unitary(&swap, DEFAULT_TOL).unwrap();
        assert!(e.phases[0].abs() < 1e-12);
        assert!((e.phases[1] - PI).abs() < 1e-12);

        let b3 = Basis::indexed(3);
        let cycle = ComplexMatrix::from_fn(&b3, |r, c| if r == (c + 1) % 3 { ONE } else { ZERO });
        let e = eigendecompose_unitary(&cycle, DEFAULT_TOL).unwrap();
        for (got, want) in e.phases.iter().zip([0.0, TAU / 3.0, 2.0 * TAU / 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(e.reconstruct().max_abs_diff(&cycle).unwrap() < 1e-12);
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let b = Basis::indexed(2);
        let m = real(&b, &[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(
            eigendecompose_unitary(&m, DEFAULT_TOL),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let b = Basis::indexed(4);
        let u = expm_hermitian(&ComplexMatrix::zeros(&b), 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(&b)).unwrap() < 1e-15);
    }
}
