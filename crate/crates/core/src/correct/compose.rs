use alloc::vec::Vec;

use super::{correct_partial_isometry, CorrectorFamily};
use crate::matcore::{eigh, calculus_from_eig, Mat, ScalarFn};
use crate::{Error, Result};

/// Output of [`correct_direct_sum`].
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub first: Vec<Mat>,
    pub second: Vec<Mat>,
    /// The exact central projection `E = f((Q + Q*)/2)`.
    pub central: Mat,
}

/// Splits a tuple living near `A ⊕ B` exactly along a central projection.
///
/// `E = f((Q_c + Q_c*)/2)` with `f` the central cutoff; the first family is
/// corrected and compressed by `E`, the second by `1 − E`. Missing
/// correctors act as the identity.
pub fn correct_direct_sum(
    ss: &[Mat],
    ts: &[Mat],
    qc: &Mat,
    corr_s: Option<&CorrectorFamily>,
    corr_t: Option<&CorrectorFamily>,
) -> Result<DirectSum> {
    qc.check_finite()?;
    for m in ss.iter().chain(ts) {
        qc.check_same_dim(m)?;
        m.check_finite()?;
    }
    let eig = eigh(&qc.hermitian_part());
    if let Some(&t) = eig.values.iter().find(|&&t| t > 0.25 && t < 0.75) {
        return Err(Error::SpectralGap { eigenvalue: t });
    }
    let e = calculus_from_eig(&eig, &ScalarFn::central_cutoff())?;
    let f = &Mat::identity(qc.dim()) - &e;
    let run = |fam: Option<&CorrectorFamily>, xs: &[Mat]| -> Result<Vec<Mat>> {
        match fam {
            Some(c) if !xs.is_empty() => c.apply(xs),
            _ => Ok(xs.to_vec()),
        }
    };
    let first = run(corr_s, ss)?
        .iter()
        .map(|s| e.matmul(s).matmul(&e))
        .collect();
    let second = run(corr_t, ts)?
        .iter()
        .map(|t| f.matmul(t).matmul(&f))
        .collect();
    Ok(DirectSum {
        first,
        second,
        central: e,
    })
}

/// Partial isometries `W_i` near `V_i` whose sources satisfy the relation of
/// `corr_p` and whose ranges satisfy that of `corr_q`.
///
/// The source tuple `(V_i*V_i)` and range tuple `(V_iV_i*)` are corrected by
/// their families, then each `V_i` by the partial-isometry corrector.
/// Errors carry the one-based index `i`.
pub fn glue(corr_p: &CorrectorFamily, corr_q: &CorrectorFamily, vs: &[Mat]) -> Result<Vec<Mat>> {
    if let Some(v0) = vs.first() {
        for v in vs {
            v0.check_same_dim(v)?;
            v.check_finite()?;
        }
    }
    let sources: Vec<Mat> = vs.iter().map(|v| v.adjoint_mul(v)).collect();
    let ranges: Vec<Mat> = vs.iter().map(|v| v.matmul(&v.adjoint())).collect();
    let ps = corr_p.apply(&sources)?;
    let qs = corr_q.apply(&ranges)?;
    vs.iter()
        .zip(ps.iter().zip(&qs))
        .enumerate()
        .map(|(i, (v, (p, q)))| correct_partial_isometry(p, q, v).map_err(|e| e.at_index(i + 1)))
        .collect()
}

/// Applies `base` to block matrices assembled from an `m × m` array of
/// entries per variable, then splits the result back into entries.
///
/// `entries[k]` holds the `m²` entries of variable `k` in row-major order.
pub fn correct_blockwise(
    entries: &[Vec<Mat>],
    m: usize,
    base: &CorrectorFamily,
) -> Result<Vec<Vec<Mat>>> {
    let assembled = entries
        .iter()
        .map(|blocks| assemble_blocks(blocks, m))
        .collect::<Result<Vec<_>>>()?;
    let fixed = base.apply(&assembled)?;
    let size = entries
        .first()
        .and_then(|b| b.first())
        .map_or(0, |b| b.dim());
    Ok(fixed.iter().map(|a| extract_blocks(a, m, size)).collect())
}

pub fn assemble_blocks(blocks: &[Mat], m: usize) -> Result<Mat> {
    if blocks.len() != m * m || m == 0 {
        return Err(Error::Shape {
            expected: m * m,
            found: blocks.len(),
        });
    }
    for b in blocks {
        blocks[0].check_same_dim(b)?;
    }
    Ok(Mat::from_blocks(m, blocks))
}

pub fn extract_blocks(a: &Mat, m: usize, size: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(a.block(i, j, size));
        }
    }
    out
}
