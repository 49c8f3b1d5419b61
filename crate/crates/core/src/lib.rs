//! Degrees of maps between torsion-free `(n-2)`-connected `(2n-1)`-dimensional
//! Poincaré complexes.
//!
//! A complex of rank `k` is described by the homotopy invariants of its top
//! cell attaching map: `k` elements of `π_{2n-2}(S^{n-1})`, `k` elements of
//! `π_{2n-2}(S^n)` and a strictly upper triangular array of mod-2 bits. A map
//! of degree `d` between two such complexes exists exactly when a system of
//! group-valued, mod-2 and bilinear integer equations in the coefficients of
//! the map on the `(2n-2)`-skeleton has an integral solution. The [`solver`]
//! module builds and decides that system.

pub mod abelian;
pub mod complex;
pub mod lattice;
pub mod solver;
pub mod tables;

pub use abelian::{AbGroup, AbelianError, GroupElement, GroupHom, HomViolation};
pub use complex::{ComplexDoc, ComplexError, ComplexSpec};
pub use lattice::{AffineLattice, IntMatrix, LatticeError};
pub use solver::{
    APUnion, Certificate, ConstraintSystem, DegreeReport, EquivalenceClass, SearchParams,
    SolverError, Verdict, WitnessMatrix,
};
pub use tables::{GroupTable, Moduli, TableDoc, TableError};
