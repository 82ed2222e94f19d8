//! Numerical core of liftkit.
//!
//! Takes tuples of complex matrices that almost satisfy *-algebraic relations
//! (projections, unitaries, partial isometries, matrix units, commutation) and
//! returns tuples that satisfy them exactly, up to the [`EXACTNESS`] contract.
//! Also models tracial ultraproducts at finite truncation so that the lifting
//! procedures for projections, spectral chains, partial isometries and matrix
//! units can be run index by index.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod correct;
pub mod ensembles;
mod error;
pub mod matcore;
pub mod ncfun;
mod num;
pub mod ultra;

pub use error::{Error, Result};
pub use matcore::{BlockAlgebra, Mat, ScalarFn, C64};
pub use ncfun::{DefectReport, NcExpr};

/// Relative tolerance of the exactness contract: a relation counts as exactly
/// satisfied when its operator-norm defect is at most `EXACTNESS * dim`.
pub const EXACTNESS: f64 = 1e-10;

/// Tolerance on `‖A − A*‖` (times `dim`) accepted by the Hermitian functional calculus.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Exactness threshold for a `dim × dim` matrix.
pub fn exact_tol(dim: usize) -> f64 {
    EXACTNESS * dim.max(1) as f64
}
