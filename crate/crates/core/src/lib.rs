//! Numerical laboratory for integer/real operator dualities and reversible
//! automata.
//!
//! - [`linalg`]: labelled dense complex operators, commutators, unitary and
//!   Hermitian eigen-decompositions, the `ε = e^{2π}` phase convention.
//! - [`automaton`]: reversible finite automata, their permutation evolution
//!   operators, Hamiltonians and diagonal density matrices.
//! - [`pq`]: the truncated `(Q, P)` lattice, the conjugate `η` of an integer
//!   operator, and the commutator defects of the lattice `q`, `p`.
//! - [`field`]: 1+1 dimensional lattice fields, integer movers and their
//!   quantum counterparts.
//! - [`worldsheet`]: integer string automata, their movers and the
//!   exchange interaction of coinciding strings.
//! - [`fermion`]: the Boolean string automaton and Jordan–Wigner fermions.

pub mod automaton;
pub mod error;
pub mod fermion;
pub mod field;
pub mod linalg;
pub mod pq;
pub mod worldsheet;

pub use error::{Error, Result};
