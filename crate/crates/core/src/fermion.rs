//! Boolean automaton with ±1 degrees of freedom and the Jordan–Wigner chain.
//!
//! The update `s(x,t+1) = s(x-1,t) s(x+1,t) s(x,t-1)` is the multiplicative
//! image of the integer string equation. Its solutions factorise into
//! movers `s(x,t) = s_L(x+t) s_R(x-t)`. On the quantum side a chain of `n`
//! modes carries `c_i = Z_0 ⋯ Z_{i-1} σ⁻_i`, kept as signed partial
//! permutations of the `2^n` occupation basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Basis, Complex64, ComplexMatrix, ComplexVector, Label};
use crate::worldsheet::Boundary;

/// Two consecutive ±1 slices with one value per site and component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanField {
    pub boundary: Boundary,
    /// `s(·, t-1)`, indexed `[site][component]`.
    pub prev: Vec<Vec<i8>>,
    /// `s(·, t)`.
    pub cur: Vec<Vec<i8>>,
    pub time: i64,
}

fn check_spins(slice: &[Vec<i8>], components: usize) -> Result<()> {
    for row in slice {
        if row.len() != components {
            return Err(Error::Invalid(format!(
                "every site needs {components} components"
            )));
        }
        if let Some(v) = row.iter().find(|v| v.abs() != 1) {
            return Err(Error::out_of_range("Boolean value", v, "±1"));
        }
    }
    Ok(())
}

impl BooleanField {
    pub fn new(boundary: Boundary, prev: Vec<Vec<i8>>, cur: Vec<Vec<i8>>) -> Result<Self> {
        let min = match boundary {
            Boundary::Periodic => 3,
            Boundary::Free => 2,
        };
        if cur.len() < min || prev.len() != cur.len() {
            return Err(Error::Invalid(format!(
                "slices need equal lengths >= {min} (got {} and {})",
                prev.len(),
                cur.len()
            )));
        }
        let components = cur[0].len();
        if components == 0 {
            return Err(Error::Invalid("at least one component".into()));
        }
        check_spins(&prev, components)?;
        check_spins(&cur, components)?;
        Ok(Self {
            boundary,
            prev,
            cur,
            time: 0,
        })
    }

    /// Single-component ring.
    pub fn ring(prev: &[i8], cur: &[i8]) -> Result<Self> {
        let wrap = |s: &[i8]| s.iter().map(|&v| vec![v]).collect();
        Self::new(Boundary::Periodic, wrap(prev), wrap(cur))
    }

    pub fn sites(&self) -> usize {
        self.cur.len()
    }

    pub fn components(&self) -> usize {
        self.cur[0].len()
    }

    fn advance(&self, slice: &[Vec<i8>], other: &[Vec<i8>]) -> Vec<Vec<i8>> {
        let n = self.sites();
        (0..n)
            .map(|x| {
                let (d, u) = neighbours(n, self.boundary, x);
                (0..self.components())
                    .map(|m| slice[d][m] * slice[u][m] * other[x][m])
                    .collect()
            })
            .collect()
    }

    pub fn step(&self) -> Self {
        Self {
            prev: self.cur.clone(),
            cur: self.advance(&self.cur, &self.prev),
            time: self.time + 1,
            boundary: self.boundary,
        }
    }

    /// The product rule solved for the bottom slice.
    pub fn step_back(&self) -> Self {
        Self {
            prev: self.advance(&self.prev, &self.cur),
            cur: self.prev.clone(),
            time: self.time - 1,
            boundary: self.boundary,
        }
    }

    pub fn evolve(&self, steps: u64) -> Self {
        (0..steps).fold(self.clone(), |f, _| f.step())
    }

    fn ring_slices(&self) -> (Vec<Vec<i8>>, Vec<Vec<i8>>) {
        match self.boundary {
            Boundary::Periodic => (self.prev.clone(), self.cur.clone()),
            Boundary::Free => {
                let unfold = |s: &[Vec<i8>]| {
                    let mut out = s.to_vec();
                    out.extend(s[1..s.len() - 1].iter().rev().cloned());
                    out
                };
                (unfold(&self.prev), unfold(&self.cur))
            }
        }
    }
}

fn neighbours(n: usize, boundary: Boundary, x: usize) -> (usize, usize) {
    match boundary {
        Boundary::Periodic => ((x + n - 1) % n, (x + 1) % n),
        Boundary::Free => (
            if x == 0 { 1 } else { x - 1 },
            if x + 1 == n { n - 2 } else { x + 1 },
        ),
    }
}

pub fn boolean_step(field: &BooleanField) -> BooleanField {
    field.step()
}

/// `s(x,t) = s_L(x+t) s_R(x-t)` with both movers periodic on the ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanMovers {
    /// `s_L(u)`, indexed by `u mod P`, `[u][component]`.
    pub left: Vec<Vec<i8>>,
    /// `s_R(v)`, indexed by `v mod P`.
    pub right: Vec<Vec<i8>>,
}

impl BooleanMovers {
    pub fn period(&self) -> usize {
        self.left.len()
    }

    pub fn value(&self, x: i64, t: i64) -> Vec<i8> {
        let p = self.period() as i64;
        let l = &self.left[(x + t).rem_euclid(p) as usize];
        let r = &self.right[(x - t).rem_euclid(p) as usize];
        l.iter().zip(r).map(|(a, b)| a * b).collect()
    }

    /// Slice at time `t` on the first `len` sites.
    pub fn slice(&self, t: i64, len: usize) -> Vec<Vec<i8>> {
        (0..len as i64).map(|x| self.value(x, t)).collect()
    }
}

/// Factorise both slices.
///
/// From `s(x,t) = s_L(u) s_R(v)` and `s(x,t-1) = s_L(u-1) s_R(v+1)` one gets
/// `s_L(u+1) = s_L(u-1) s(x,t-1) s(x+1,t)` with `u = x+t`, a recursion that
/// steps by two. The gauge `s_L(t) = +1` (and `s_L(t+1) = +1` when the ring
/// length is even, since the two sublattices are then independent) fixes
/// the freedom `(s_L, s_R) → (±s_L, ±s_R)`. Slice pairs whose recursion does
/// not close around the ring are rejected.
pub fn split_boolean_movers(field: &BooleanField) -> Result<BooleanMovers> {
    let (prev, cur) = field.ring_slices();
    let p = cur.len();
    let pi = p as i64;
    let t = field.time;
    let comps = field.components();
    let wrap = |x: i64| x.rem_euclid(pi) as usize;

    let mut left: Vec<Option<Vec<i8>>> = vec![None; p];
    let anchors: Vec<i64> = if p % 2 == 0 { vec![t, t + 1] } else { vec![t] };
    for &a in &anchors {
        left[wrap(a)] = Some(vec![1; comps]);
        let mut u = a;
        loop {
            // s_L(u+2) from s_L(u): x = u + 1 - t
            let x = u + 1 - t;
            let from = left[wrap(u)].clone().expect("filled");
            let next: Vec<i8> = (0..comps)
                .map(|m| from[m] * prev[wrap(x)][m] * cur[wrap(x + 1)][m])
                .collect();
            let slot = wrap(u + 2);
            match &left[slot] {
                Some(existing) if *existing != next => {
                    return Err(Error::Inconsistent(format!(
                        "Boolean slices do not factorise into periodic movers (closure fails at u = {})",
                        u + 2
                    )));
                }
                Some(_) => break,
                None => left[slot] = Some(next),
            }
            u += 2;
        }
    }
    let left: Vec<Vec<i8>> = left.into_iter().map(|v| v.expect("all filled")).collect();
    let mut right = vec![vec![1; comps]; p];
    for x in 0..pi {
        let l = &left[wrap(x + t)];
        right[wrap(x - t)] = (0..comps).map(|m| l[m] * cur[x as usize][m]).collect();
    }
    let movers = BooleanMovers { left, right };
    if movers.slice(t, p) != cur || movers.slice(t - 1, p) != prev {
        return Err(Error::Inconsistent(
            "Boolean slices do not factorise into periodic movers".into(),
        ));
    }
    Ok(movers)
}

/// Largest chain handled.
pub const MAX_CHAIN: usize = 12;

/// Largest chain whose anticommutators are also checked by dense products.
pub const MAX_DENSE_CHAIN: usize = 8;

/// A matrix with at most one non-zero entry `±1` per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMap {
    /// `image[b] = Some((r, s))` means column `b` holds `s` in row `r`.
    pub image: Vec<Option<(usize, i8)>>,
}

impl SignedMap {
    pub fn dim(&self) -> usize {
        self.image.len()
    }

    /// `self · other`.
    pub fn compose(&self, other: &SignedMap) -> SignedMap {
        SignedMap {
            image: other
                .image
                .iter()
                .map(|e| {
                    e.and_then(|(r, s)| self.image[r].map(|(r2, s2)| (r2, s * s2)))
                })
                .collect(),
        }
    }

    pub fn transpose(&self) -> SignedMap {
        let mut image = vec![None; self.dim()];
        for (c, e) in self.image.iter().enumerate() {
            if let Some((r, s)) = *e {
                image[r] = Some((c, s));
            }
        }
        SignedMap { image }
    }

    pub fn to_matrix(&self, basis: &Basis) -> ComplexMatrix {
        ComplexMatrix::from_fn(basis, |r, c| match self.image[c] {
            Some((row, s)) if row == r => Complex64::new(s as f64, 0.0),
            _ => Complex64::new(0.0, 0.0),
        })
    }
}

/// Largest entrywise deviation of `AB + BA` from `target · I`, exact.
fn anticommutator_defect(a: &SignedMap, b: &SignedMap, target: i32) -> f64 {
    let ab = a.compose(b);
    let ba = b.compose(a);
    let mut worst = 0i32;
    for col in 0..a.dim() {
        let mut entries: Vec<(usize, i32)> = Vec::with_capacity(3);
        for (r, s) in ab.image[col].into_iter().chain(ba.image[col]) {
            match entries.iter_mut().find(|(row, _)| *row == r) {
                Some(e) => e.1 += s as i32,
                None => entries.push((r, s as i32)),
            }
        }
        match entries.iter_mut().find(|(row, _)| *row == col) {
            Some(e) => e.1 -= target,
            None => entries.push((col, -target)),
        }
        worst = worst.max(entries.iter().map(|(_, v)| v.abs()).max().unwrap_or(0));
    }
    worst as f64
}

/// Deviations from the canonical anticommutation relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarReport {
    pub n: usize,
    /// `max |{c_i, c_j†} - δ_ij I|`.
    pub mixed: f64,
    /// `max |{c_i, c_j}|`.
    pub annihilators: f64,
    /// `max |{c_i†, c_j†}|`.
    pub creators: f64,
    /// Relations checked.
    pub relations: usize,
}

impl CarReport {
    pub fn worst(&self) -> f64 {
        self.mixed.max(self.annihilators).max(self.creators)
    }
}

/// `c_i` and `c_i†` on the occupation basis.
///
/// Basis states are occupation tuples `(n_0, …, n_{n-1})` in lexicographic
/// order (site 0 most significant); a basis index is therefore the
/// occupation pattern read as a binary number and index 0 is the vacuum.
#[derive(Clone, Debug)]
pub struct FermionChain {
    n: usize,
    basis: Basis,
    annihilators: Vec<SignedMap>,
}

pub fn jordan_wigner(n: usize) -> Result<FermionChain> {
    if n == 0 || n > MAX_CHAIN {
        return Err(Error::out_of_range("chain length", n, format!("1..={MAX_CHAIN}")));
    }
    let dim = 1usize << n;
    let labels = (0..dim)
        .map(|b| Label((0..n).map(|i| ((b >> (n - 1 - i)) & 1) as i64).collect()))
        .collect();
    let basis = Basis::new(labels)?;
    let annihilators = (0..n)
        .map(|i| {
            let bit = 1usize << (n - 1 - i);
            let lower = !((bit << 1) - 1) & (dim - 1);
            SignedMap {
                image: (0..dim)
                    .map(|b| {
                        (b & bit != 0).then(|| {
                            let string = (b & lower).count_ones();
                            (b ^ bit, if string % 2 == 0 { 1 } else { -1 })
                        })
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(FermionChain {
        n,
        basis,
        annihilators,
    })
}

impl FermionChain {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn annihilator(&self, i: usize) -> &SignedMap {
        &self.annihilators[i]
    }

    pub fn creator(&self, i: usize) -> SignedMap {
        self.annihilators[i].transpose()
    }

    pub fn annihilator_matrix(&self, i: usize) -> ComplexMatrix {
        self.annihilators[i].to_matrix(&self.basis)
    }

    pub fn creator_matrix(&self, i: usize) -> ComplexMatrix {
        self.creator(i).to_matrix(&self.basis)
    }

    /// `N = Σ c_i† c_i`, diagonal with the occupation count.
    pub fn number_operator(&self) -> ComplexMatrix {
        let diag: Vec<f64> = (0..self.dim()).map(|b| b.count_ones() as f64).collect();
        ComplexMatrix::diagonal(&self.basis, &diag).expect("sizes agree")
    }

    /// All anticommutators through exact composition of signed maps.
    pub fn car_check(&self) -> CarReport {
        let creators: Vec<SignedMap> = (0..self.n).map(|i| self.creator(i)).collect();
        let mut rep = CarReport {
            n: self.n,
            mixed: 0.0,
            annihilators: 0.0,
            creators: 0.0,
            relations: 0,
        };
        for i in 0..self.n {
            for j in 0..self.n {
                let delta = i32::from(i == j);
                let c = &self.annihilators;
                rep.mixed = rep.mixed.max(anticommutator_defect(&c[i], &creators[j], delta));
                rep.annihilators = rep.annihilators.max(anticommutator_defect(&c[i], &c[j], 0));
                rep.creators = rep
                    .creators
                    .max(anticommutator_defect(&creators[i], &creators[j], 0));
                rep.relations += 3;
            }
        }
        rep
    }

    /// The same relations from dense matrix products.
    pub fn car_check_dense(&self) -> Result<CarReport> {
        if self.n > MAX_DENSE_CHAIN {
            return Err(Error::BudgetExceeded {
                what: "dense anticommutator check",
                required: self.dim() as u128,
                limit: 1 << MAX_DENSE_CHAIN,
            });
        }
        let c: Vec<ComplexMatrix> = (0..self.n).map(|i| self.annihilator_matrix(i)).collect();
        let cd: Vec<ComplexMatrix> = c.iter().map(|m| m.adjoint()).collect();
        let id = ComplexMatrix::identity(&self.basis);
        let zero = ComplexMatrix::zeros(&self.basis);
        let mut rep = CarReport {
            n: self.n,
            mixed: 0.0,
            annihilators: 0.0,
            creators: 0.0,
            relations: 0,
        };
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { &id } else { &zero };
                let ac = |a: &ComplexMatrix, b: &ComplexMatrix| {
                    crate::linalg::anticommutator(a, b).expect("same basis")
                };
                rep.mixed = rep.mixed.max(ac(&c[i], &cd[j]).max_abs_diff(target)?);
                rep.annihilators = rep.annihilators.max(ac(&c[i], &c[j]).max_abs());
                rep.creators = rep.creators.max(ac(&cd[i], &cd[j]).max_abs());
                rep.relations += 3;
            }
        }
        Ok(rep)
    }

    /// Non-zero entries of any `c_i` that connect states of equal parity.
    pub fn parity_violations(&self) -> usize {
        self.annihilators
            .iter()
            .flat_map(|m| m.image.iter().enumerate())
            .filter(|(c, e)| {
                e.is_some_and(|(r, _)| (r.count_ones() + c.count_ones()) % 2 == 0)
            })
            .count()
    }

    /// Same check on the dense matrices.
    pub fn parity_violations_dense(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            let m = self.annihilator_matrix(i);
            for r in 0..self.dim() {
                for c in 0..self.dim() {
                    if m.get(r, c).norm() != 0.0 && (r.count_ones() + c.count_ones()) % 2 == 0 {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// Occupation basis state with site `i` occupied iff `s_i = -1`.
pub fn encode_boolean_state(slice: &[i8], chain: &FermionChain) -> Result<ComplexVector> {
    if slice.len() != chain.n {
        return Err(Error::DimensionMismatch {
            op: "encode_boolean_state",
            left_rows: chain.n,
            left_cols: 1,
            right_rows: slice.len(),
            right_cols: 1,
        });
    }
    if let Some(v) = slice.iter().find(|v| v.abs() != 1) {
        return Err(Error::out_of_range("Boolean value", v, "±1"));
    }
    let index = slice
        .iter()
        .fold(0usize, |acc, &s| (acc << 1) | usize::from(s == -1));
    Ok(ComplexVector::basis_state(&chain.basis, index))
}
