//! Complex matrices, tracial block algebras, norms and the Hermitian
//! functional calculus.

mod algebra;
mod eig;
mod mat;
mod scalar_fn;
mod svd;

pub use algebra::BlockAlgebra;
pub use eig::{eigh, eigvalsh, HermEig};
pub use mat::Mat;
pub use scalar_fn::{Formula, Outside, Piece, ScalarFn};
pub use svd::{svd, Svd};

pub type C64 = num_complex::Complex64;

use crate::num;
use crate::{Error, Result, HERMITIAN_TOL};

/// Largest singular value.
pub fn op_norm(a: &Mat) -> Result<f64> {
    a.check_finite()?;
    Ok(op_norm_unchecked(a))
}

pub(crate) fn op_norm_unchecked(a: &Mat) -> f64 {
    let top = eigvalsh(&a.adjoint_mul(a)).last().copied().unwrap_or(0.0);
    num::sqrt(top.max(0.0))
}

/// Operator norm of a Hermitian matrix: its spectral radius.
pub fn herm_norm(h: &Mat) -> f64 {
    let v = eigvalsh(h);
    match (v.first(), v.last()) {
        (Some(&lo), Some(&hi)) => num::abs(lo).max(num::abs(hi)),
        _ => 0.0,
    }
}

/// `‖A − A*‖` in operator norm.
pub fn hermitian_defect(a: &Mat) -> f64 {
    // i(A − A*) is Hermitian, so its spectral radius is the norm.
    2.0 * herm_norm(&a.skew_part())
}

/// `‖P − P*‖ + ‖P − P²‖`
pub fn projection_defect(p: &Mat) -> f64 {
    hermitian_defect(p) + op_norm_unchecked(&(p - &p.matmul(p)))
}

/// True when `p` is a projection within the exactness contract.
pub fn is_projection(p: &Mat) -> bool {
    projection_defect(p) <= crate::exact_tol(p.dim())
}

/// Rank of an (exact) projection, read off its trace.
pub fn projection_rank(p: &Mat) -> usize {
    num::round(p.trace().re).max(0.0) as usize
}

pub(crate) fn check_hermitian(a: &Mat) -> Result<Mat> {
    a.check_finite()?;
    let tol = HERMITIAN_TOL * a.dim() as f64;
    // Cheap Frobenius bound first; fall back to the exact norm when it is inconclusive.
    let mut skew_f = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            skew_f += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    if num::sqrt(skew_f) > tol {
        let defect = hermitian_defect(a);
        if defect > tol {
            return Err(Error::Symmetry { defect });
        }
    }
    Ok(a.hermitian_part())
}

/// `g(A) = U g(D) U*` for Hermitian `A = U D U*`.
pub fn herm_calculus(a: &Mat, g: &ScalarFn) -> Result<Mat> {
    let h = check_hermitian(a)?;
    let e = eigh(&h);
    calculus_from_eig(&e, g)
}

/// Functional calculus with an already computed eigendecomposition.
pub fn calculus_from_eig(e: &HermEig, g: &ScalarFn) -> Result<Mat> {
    let vals = e
        .values
        .iter()
        .map(|&l| g.eval(l))
        .collect::<Result<alloc::vec::Vec<f64>>>()?;
    let mut k = 0;
    Ok(e.reconstruct_with(|_| {
        let v = vals[k];
        k += 1;
        C64::new(v, 0.0)
    }))
}

/// Functional calculus with an arbitrary complex-valued function.
pub fn herm_apply(a: &Mat, mut g: impl FnMut(f64) -> Result<C64>) -> Result<Mat> {
    let h = check_hermitian(a)?;
    let e = eigh(&h);
    let vals = e
        .values
        .iter()
        .map(|&l| g(l))
        .collect::<Result<alloc::vec::Vec<C64>>>()?;
    let mut k = 0;
    Ok(e.reconstruct_with(|_| {
        let v = vals[k];
        k += 1;
        v
    }))
}
