use alloc::vec::Vec;

use crate::matcore::{
    calculus_from_eig, eigh, is_projection, op_norm_unchecked, projection_defect,
    projection_rank, svd, HermEig, Mat, ScalarFn,
};
use crate::num;
use crate::{exact_tol, Error, Result, C64};

/// `max(‖V*V − P‖, ‖VV* − Q‖)`
pub fn partial_isometry_defect(v: &Mat, p: &Mat, q: &Mat) -> f64 {
    let src = op_norm_unchecked(&(&v.adjoint_mul(v) - p));
    let rng = op_norm_unchecked(&(&v.matmul(&v.adjoint()) - q));
    src.max(rng)
}

/// `‖U*U − 1‖`
pub fn unitary_defect(u: &Mat) -> f64 {
    op_norm_unchecked(&(&u.adjoint_mul(u) - &Mat::identity(u.dim())))
}

/// `max(max_j ‖A_j − A_j*‖ + ‖A_j − A_j²‖, ‖Σ A_j − 1‖)`
pub fn resolution_defect(ps: &[Mat]) -> f64 {
    let Some(first) = ps.first() else { return 0.0 };
    let mut sum = Mat::zeros(first.dim());
    let mut worst: f64 = 0.0;
    for p in ps {
        worst = worst.max(projection_defect(p));
        sum += p;
    }
    worst.max(op_norm_unchecked(&(&sum - &Mat::identity(first.dim()))))
}

fn check_dims(ms: &[&Mat]) -> Result<usize> {
    let d = ms[0].dim();
    for m in ms {
        m.check_finite()?;
        if m.dim() != d {
            return Err(Error::Shape {
                expected: d,
                found: m.dim(),
            });
        }
    }
    Ok(d)
}

/// Eigendecomposition of `(A + A*)/2` with the projection gap checked.
fn gapped_eig(a: &Mat) -> Result<HermEig> {
    let e = eigh(&a.hermitian_part());
    if let Some(&t) = e
        .values
        .iter()
        .find(|&&t| (1.0 / 3.0..=2.0 / 3.0).contains(&t))
    {
        return Err(Error::SpectralGap { eigenvalue: t });
    }
    Ok(e)
}

/// `h((A + A*)/2)` for the spectral retraction `h`.
///
/// Returns `A` itself when it already is a projection.
pub fn correct_projection(a: &Mat) -> Result<Mat> {
    a.check_finite()?;
    if is_projection(a) {
        return Ok(a.clone());
    }
    let e = gapped_eig(a)?;
    calculus_from_eig(&e, &ScalarFn::projection_retraction())
}

/// Unitary polar factor `A (A*A)^{-1/2}`.
pub fn correct_unitary(a: &Mat) -> Result<Mat> {
    a.check_finite()?;
    if unitary_defect(a) <= exact_tol(a.dim()) {
        return Ok(a.clone());
    }
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    let bottom = d.s.last().copied().unwrap_or(0.0);
    if !(bottom > 1e-12 * top.max(1.0)) {
        return Err(Error::RankDeficient { sigma_min: bottom });
    }
    Ok(d.polar_isometry(0.0).0)
}

/// `ψ(P, Q, A) = f(QAPA*Q)·QAP`: a partial isometry with source `P` and
/// range `Q` near `A`.
pub fn correct_partial_isometry(p: &Mat, q: &Mat, a: &Mat) -> Result<Mat> {
    let d = check_dims(&[p, q, a])?;
    for m in [p, q] {
        let defect = projection_defect(m);
        if defect > exact_tol(d) {
            return Err(Error::NotProjection { defect });
        }
    }
    let (rp, rq) = (projection_rank(p), projection_rank(q));
    if rp != rq {
        return Err(Error::RankMismatch {
            source_rank: rp,
            range_rank: rq,
        });
    }
    if partial_isometry_defect(a, p, q) <= exact_tol(d) {
        return Ok(a.clone());
    }
    let qap = q.matmul(a).matmul(p);
    let x = qap.matmul(&qap.adjoint());
    let e = eigh(&x);
    if let Some(&t) = e.values.iter().find(|&&t| t > 0.25 && t < 0.75) {
        return Err(Error::SpectralGap { eigenvalue: t });
    }
    let v = calculus_from_eig(&e, &ScalarFn::partial_isometry_normalizer())?.matmul(&qap);
    let defect = partial_isometry_defect(&v, p, q);
    if defect > exact_tol(d) {
        return Err(Error::DeltaTooLarge { defect });
    }
    Ok(v)
}

/// Pairwise orthogonal projections summing to 1, each close to its input.
///
/// Each input is rounded to a projection, the overlaps are removed with
/// `S^{-1/2} P_j S^{-1/2}` for `S = Σ P_j`, and the results are rounded again.
pub fn correct_resolution(as_: &[Mat]) -> Result<Vec<Mat>> {
    if as_.is_empty() {
        return Err(Error::InvalidInput("empty resolution".into()));
    }
    let d = check_dims(&as_.iter().collect::<Vec<_>>())?;
    if resolution_defect(as_) <= exact_tol(d) {
        return Ok(as_.to_vec());
    }
    let ps = as_
        .iter()
        .enumerate()
        .map(|(j, a)| correct_projection(a).map_err(|e| e.at_index(j + 1)))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = ps.iter().map(projection_rank).sum();
    if total != d {
        return Err(Error::RankMismatch {
            source_rank: total,
            range_rank: d,
        });
    }
    let mut s = Mat::zeros(d);
    for p in &ps {
        s += p;
    }
    let e = eigh(&s);
    let smallest = e.values[0];
    if !(smallest > 1e-6) {
        return Err(Error::SpectralGap {
            eigenvalue: smallest,
        });
    }
    let root = e.reconstruct_with(|v| C64::new(1.0 / num::sqrt(v), 0.0));
    ps.iter()
        .enumerate()
        .map(|(j, p)| {
            correct_projection(&root.matmul(p).matmul(&root)).map_err(|e| e.at_index(j + 1))
        })
        .collect()
}
