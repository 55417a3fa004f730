//! Reversible finite automata and their quantum-mechanical description.
//!
//! A deterministic bijective step rule on `n` ontological states is realised
//! as the permutation matrix `U` with `U|j⟩ = |rule(j)⟩`. A Hamiltonian with
//! `U = exp(-iH δt)` is read off cycle by cycle: a cycle of length `m`
//! contributes the Fourier modes
//!
//! ```text
//! v_k = m^{-1/2} Σ_r e^{iθ_k r} |j_r⟩,   θ_k = 2πk/m,   U v_k = e^{-iθ_k} v_k,
//! ```
//!
//! with energy `θ_k/δt ∈ [0, 2π/δt)`. Summed in closed form, the block of `H`
//! on the cycle is the circulant `H(j_r, j_s) = h(r - s mod m)` with
//!
//! ```text
//! h(0) = π(m-1) / (m δt),   h(d) = 2π / (m δt (e^{2πid/m} - 1)).
//! ```

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{phase, Basis, Complex64, ComplexMatrix, ComplexVector, ONE, ZERO};

/// Largest state count for which matrices are materialised.
pub const MAX_DENSE_STATES: usize = 4096;

/// Largest state count enumerated when checking a cellular rule.
pub const MAX_CELLULAR_STATES: usize = 1 << 22;

/// A periodic ring of cells updated by a neighbourhood lookup table.
///
/// Cell configurations are numbered in base `alphabet` with cell 0 as the most
/// significant digit; a neighbourhood `(x-r, …, x+r)` is encoded the same way
/// to index `table`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellLattice {
    pub cells: usize,
    pub alphabet: usize,
    pub radius: usize,
    pub table: Vec<usize>,
}

impl CellLattice {
    fn validate(&self) -> Result<usize> {
        if self.cells == 0 || self.alphabet < 2 {
            return Err(Error::Invalid(format!(
                "cell lattice needs cells >= 1 and alphabet >= 2 (got {} cells, alphabet {})",
                self.cells, self.alphabet
            )));
        }
        let window = 2 * self.radius + 1;
        let expected = checked_pow(self.alphabet, window)
            .ok_or_else(|| Error::Invalid("neighbourhood table too large".into()))?;
        if self.table.len() != expected {
            return Err(Error::Invalid(format!(
                "lookup table has {} entries, alphabet^(2r+1) = {expected}",
                self.table.len()
            )));
        }
        if let Some(bad) = self.table.iter().find(|&&v| v >= self.alphabet) {
            return Err(Error::Invalid(format!("lookup value {bad} outside the alphabet")));
        }
        match checked_pow(self.alphabet, self.cells) {
            Some(n) if n <= MAX_CELLULAR_STATES => Ok(n),
            _ => Err(Error::BudgetExceeded {
                what: "cellular state space",
                required: (self.alphabet as u128).saturating_pow(self.cells as u32),
                limit: MAX_CELLULAR_STATES as u128,
            }),
        }
    }

    pub fn decode(&self, mut state: usize) -> Vec<usize> {
        let mut cells = vec![0; self.cells];
        for slot in cells.iter_mut().rev() {
            *slot = state % self.alphabet;
            state /= self.alphabet;
        }
        cells
    }

    pub fn encode(&self, cells: &[usize]) -> usize {
        cells.iter().fold(0, |acc, &c| acc * self.alphabet + c)
    }

    /// One synchronous update of every cell.
    pub fn update(&self, cells: &[usize]) -> Vec<usize> {
        let n = cells.len() as isize;
        let r = self.radius as isize;
        (0..n)
            .map(|x| {
                let key = (-r..=r).fold(0, |acc, dx| {
                    acc * self.alphabet + cells[(x + dx).rem_euclid(n) as usize]
                });
                self.table[key]
            })
            .collect()
    }

    fn global_map(&self, states: usize) -> Vec<usize> {
        (0..states)
            .map(|s| self.encode(&self.update(&self.decode(s))))
            .collect()
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Rule tables as accepted from structured text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleTable {
    /// Explicit `(state, next_state)` pairs.
    Pairs {
        pairs: Vec<(usize, usize)>,
        #[serde(default = "unit_dt")]
        dt: f64,
    },
    /// Neighbourhood lookup table on a periodic ring of cells.
    Cellular {
        #[serde(flatten)]
        lattice: CellLattice,
        #[serde(default = "unit_dt")]
        dt: f64,
    },
}

fn unit_dt() -> f64 {
    1.0
}

impl RuleTable {
    pub fn into_spec(self) -> Result<AutomatonSpec> {
        match self {
            RuleTable::Pairs { pairs, dt } => AutomatonSpec::from_pairs(&pairs, dt),
            RuleTable::Cellular { lattice, dt } => AutomatonSpec::from_cells(lattice, dt),
        }
    }
}

/// A finite set of ontological states with a bijective step rule.
#[derive(Clone, Debug, PartialEq)]
pub struct AutomatonSpec {
    rule: Vec<usize>,
    cells: Option<CellLattice>,
    dt: f64,
}

impl AutomatonSpec {
    /// `rule[j]` is the successor of state `j`.
    pub fn from_rule(rule: Vec<usize>, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        if rule.is_empty() {
            return Err(Error::Invalid("an automaton needs at least one state".into()));
        }
        check_bijection(&rule)?;
        Ok(Self {
            rule,
            cells: None,
            dt,
        })
    }

    pub fn from_pairs(pairs: &[(usize, usize)], dt: f64) -> Result<Self> {
        let n = pairs.len();
        let mut rule = vec![usize::MAX; n];
        for &(from, to) in pairs {
            if from >= n || to >= n {
                return Err(Error::out_of_range(
                    "rule-table state",
                    from.max(to),
                    format!("0..{n}"),
                ));
            }
            if rule[from] != usize::MAX {
                return Err(Error::Invalid(format!("state {from} listed twice")));
            }
            rule[from] = to;
        }
        Self::from_rule(rule, dt)
    }

    pub fn from_cells(lattice: CellLattice, dt: f64) -> Result<Self> {
        let states = lattice.validate()?;
        let rule = lattice.global_map(states);
        let mut spec = Self::from_rule(rule, dt)?;
        spec.cells = Some(lattice);
        Ok(spec)
    }

    pub fn identity(n: usize, dt: f64) -> Result<Self> {
        Self::from_rule((0..n).collect(), dt)
    }

    /// `j → j + 1 mod n`.
    pub fn cyclic(n: usize, dt: f64) -> Result<Self> {
        Self::from_rule((0..n).map(|j| (j + 1) % n).collect(), dt)
    }

    pub fn state_count(&self) -> usize {
        self.rule.len()
    }

    pub fn cells(&self) -> Option<&CellLattice> {
        self.cells.as_ref()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rule(&self) -> &[usize] {
        &self.rule
    }

    pub fn step(&self, state: usize) -> usize {
        self.rule[state]
    }

    /// Cycles of the permutation, each starting at its smallest state, listed
    /// in order of that state.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.rule)
    }

    /// Order of the permutation (lcm of cycle lengths).
    pub fn order(&self) -> u128 {
        self.cycles()
            .iter()
            .fold(1u128, |acc, c| lcm(acc, c.len() as u128))
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::out_of_range("dt", dt, "dt > 0"))
    }
}

fn check_bijection(rule: &[usize]) -> Result<()> {
    let n = rule.len();
    let mut preimage = vec![usize::MAX; n];
    for (j, &image) in rule.iter().enumerate() {
        if image >= n {
            return Err(Error::out_of_range("rule image", image, format!("0..{n}")));
        }
        if preimage[image] != usize::MAX {
            return Err(Error::NonBijective {
                first: preimage[image],
                second: j,
                image,
            });
        }
        preimage[image] = j;
    }
    Ok(())
}

fn cycles_of(rule: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; rule.len()];
    let mut cycles = Vec::new();
    for start in 0..rule.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cycle.push(j);
            j = rule[j];
        }
        cycles.push(cycle);
    }
    cycles
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

/// The permutation matrix of one time step.
#[derive(Clone, Debug)]
pub struct EvolutionOperator {
    rule: Vec<usize>,
    matrix: ComplexMatrix,
}

/// `U` with entry `(rule(j), j) = 1`.
pub fn build_evolution(spec: &AutomatonSpec) -> Result<EvolutionOperator> {
    let n = spec.state_count();
    if n > MAX_DENSE_STATES {
        return Err(Error::BudgetExceeded {
            what: "dense evolution operator",
            required: n as u128,
            limit: MAX_DENSE_STATES as u128,
        });
    }
    let basis = Basis::indexed(n);
    let rule = spec.rule.clone();
    let matrix = ComplexMatrix::from_fn(&basis, |r, c| if rule[c] == r { ONE } else { ZERO });
    Ok(EvolutionOperator { rule, matrix })
}

impl EvolutionOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn permutation(&self) -> &[usize] {
        &self.rule
    }

    pub fn basis(&self) -> &Basis {
        self.matrix.basis()
    }

    pub fn dim(&self) -> usize {
        self.rule.len()
    }

    /// `U^k` by composing the permutation.
    pub fn power(&self, k: u128) -> EvolutionOperator {
        let n = self.rule.len();
        let mut rule = vec![0; n];
        for cycle in cycles_of(&self.rule) {
            let m = cycle.len();
            let shift = (k % m as u128) as usize;
            for (r, &j) in cycle.iter().enumerate() {
                rule[j] = cycle[(r + shift) % m];
            }
        }
        let matrix = ComplexMatrix::from_fn(self.basis(), |r, c| if rule[c] == r { ONE } else { ZERO });
        EvolutionOperator { rule, matrix }
    }

    /// `U† O U`, computed by re-indexing: `(U†OU)(a, b) = O(rule a, rule b)`.
    pub fn conjugate(&self, o: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operator(o)?;
        Ok(ComplexMatrix::from_fn(self.basis(), |a, b| {
            o.get(self.rule[a], self.rule[b])
        }))
    }

    fn check_operator(&self, o: &ComplexMatrix) -> Result<()> {
        if o.nrows() != self.dim() || o.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "evolution operator",
                left_rows: self.dim(),
                left_cols: self.dim(),
                right_rows: o.nrows(),
                right_cols: o.ncols(),
            });
        }
        Ok(())
    }

    /// Exact spectrum of the extracted Hamiltonian, ascending.
    pub fn energies(&self, dt: f64) -> Vec<f64> {
        let mut e: Vec<f64> = cycles_of(&self.rule)
            .iter()
            .flat_map(|c| {
                let m = c.len();
                (0..m).map(move |k| TAU * k as f64 / (m as f64 * dt))
            })
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Hermitian `H` with `exp(-iH dt) = U` and spectrum in `[0, 2π/dt)`.
pub fn extract_hamiltonian(u: &EvolutionOperator, dt: f64) -> Result<ComplexMatrix> {
    check_dt(dt)?;
    let n = u.dim();
    let mut h = nalgebra::DMatrix::from_element(n, n, ZERO);
    for cycle in cycles_of(&u.rule) {
        let m = cycle.len();
        let kernel = circulant_kernel(m, dt);
        for (r, &jr) in cycle.iter().enumerate() {
            for (s, &js) in cycle.iter().enumerate() {
                h[(jr, js)] = kernel[(r + m - s) % m];
            }
        }
    }
    ComplexMatrix::square(u.basis().clone(), h)
}

/// `h(d)` for `d = 0..m`, built so that `h(m - d) = conj(h(d))` holds exactly.
fn circulant_kernel(m: usize, dt: f64) -> Vec<Complex64> {
    let mf = m as f64;
    let mut k = vec![ZERO; m];
    k[0] = Complex64::new(PI * (mf - 1.0) / (mf * dt), 0.0);
    for d in 1..=m / 2 {
        let w = phase(d as f64 / mf);
        let mut v = Complex64::new(TAU / (mf * dt), 0.0) / (w - ONE);
        if 2 * d == m {
            v.im = 0.0;
        }
        k[d] = v;
        k[m - d] = v.conj();
    }
    k
}

/// `U^steps |ψ⟩`, applied as an exact permutation of amplitudes.
pub fn evolve_state(u: &EvolutionOperator, psi: &ComplexVector, steps: u64) -> Result<ComplexVector> {
    if psi.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            op: "evolve_state",
            left_rows: u.dim(),
            left_cols: u.dim(),
            right_rows: psi.dim(),
            right_cols: 1,
        });
    }
    let p = u.power(steps as u128);
    let mut out = vec![ZERO; psi.dim()];
    for (j, z) in psi.entries().iter().enumerate() {
        out[p.rule[j]] = *z;
    }
    ComplexVector::new(psi.basis().clone(), out)
}

/// `ρ = Σ_Q ρ_Q |Q⟩⟨Q|` on the ontological basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OntologicalDensityMatrix {
    weights: Vec<f64>,
}

impl OntologicalDensityMatrix {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("density matrix needs at least one state".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::out_of_range("density weight", w, "finite, >= 0"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::out_of_range("density weight sum", total, "1 ± 1e-12"));
        }
        Ok(Self { weights })
    }

    pub fn pure(n: usize, state: usize) -> Result<Self> {
        if state >= n {
            return Err(Error::out_of_range("state", state, format!("0..{n}")));
        }
        let mut w = vec![0.0; n];
        w[state] = 1.0;
        Self::new(w)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diagonal(&Basis::indexed(self.dim()), &self.weights).expect("sizes agree")
    }

    /// `U ρ U†`: weights carried along the permutation.
    pub fn evolve(&self, u: &EvolutionOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "evolve density",
                left_rows: u.dim(),
                left_cols: u.dim(),
                right_rows: self.dim(),
                right_cols: self.dim(),
            });
        }
        let mut w = vec![0.0; self.dim()];
        for (j, &x) in self.weights.iter().enumerate() {
            w[u.rule[j]] = x;
        }
        Ok(Self { weights: w })
    }
}

/// `Tr(ρ O) = Σ_Q ρ_Q ⟨Q|O|Q⟩`.
pub fn expectation(rho: &OntologicalDensityMatrix, o: &ComplexMatrix) -> Result<Complex64> {
    if o.nrows() != rho.dim() || o.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            op: "expectation",
            left_rows: rho.dim(),
            left_cols: rho.dim(),
            right_rows: o.nrows(),
            right_cols: o.ncols(),
        });
    }
    Ok(rho
        .weights
        .iter()
        .enumerate()
        .map(|(q, &w)| o.get(q, q) * w)
        .sum())
}

/// `‖U ψ - exp(-iH dt) ψ‖₂`.
pub fn schrodinger_residual(
    u: &EvolutionOperator,
    h: &ComplexMatrix,
    dt: f64,
    psi: &ComplexVector,
) -> Result<f64> {
    let exact = u.matrix().apply(psi)?;
    let propagated = crate::linalg::expm_hermitian(h, dt)?.apply(psi)?;
    Ok(exact.sub(&propagated)?.norm())
}
