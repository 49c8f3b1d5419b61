//! Degree equations, their solver, and the classification built on it.

mod classify;
mod degrees;
mod search;
mod system;
mod witness;

use thiserror::Error;

use crate::abelian::AbelianError;
use crate::complex::ComplexError;
use crate::lattice::LatticeError;

pub use classify::{classify, is_equivalent, EquivalenceClass};
pub use degrees::{degree_set, infer_progressions, APUnion, DegreeEntry, DegreeReport};
pub use search::{check_degree, check_system, residue_search, Certificate, SearchParams, Verdict};
pub use system::{
    binomial2, build_system, verify_witness, BilinearEquation, ConstraintSystem, GroupEquation,
    ParityEquation,
};
pub use witness::{compose_witness, det_star, WitnessMatrix};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("complexes are over different tables (n = {0} and n = {1})")]
    TableMismatch(i64, i64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("witness is {k}x{m}, expected a square one")]
    NonSquare { k: usize, m: usize },
    #[error("bad search parameters: {0}")]
    BadParams(String),
    #[error("undecided within search bounds: {0}")]
    Undecided(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}
