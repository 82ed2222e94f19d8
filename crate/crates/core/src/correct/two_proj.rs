use alloc::vec::Vec;

use super::correct_projection;
use crate::matcore::{eigh, op_norm_unchecked, projection_defect, Mat};
use crate::ncfun::{rel_projection, NcExpr};
use crate::num;
use crate::{exact_tol, Error, Result, C64};

/// Relation in `(P₁, P₂)`: both are projections and
/// `(P₁P₂P₁)² = c·P₁P₂P₁`, `(P₂P₁P₂)² = c·P₂P₁P₂`.
pub fn rel_two_projections(c: f64) -> NcExpr {
    let p1 = NcExpr::var(2, 0);
    let p2 = NcExpr::var(2, 1);
    let angle = |a: &NcExpr, b: &NcExpr| {
        let aba = NcExpr::product(&[a.clone(), b.clone(), a.clone()]);
        aba.clone().square().sub(&aba.scale_real(c)).gram()
    };
    let proj = rel_projection();
    NcExpr::sum(
        2,
        &[
            proj.relabel(2, &[0]).expect("arity 1"),
            proj.relabel(2, &[1]).expect("arity 1"),
            angle(&p1, &p2),
            angle(&p2, &p1),
        ],
    )
    .with_name("two_projections")
}

fn two_projection_defect(p1: &Mat, p2: &Mat, c: f64) -> f64 {
    let angle = |a: &Mat, b: &Mat| {
        let aba = a.matmul(b).matmul(a);
        op_norm_unchecked(&(&aba.matmul(&aba) - &aba.scale_real(c)))
    };
    projection_defect(p1)
        .max(projection_defect(p2))
        .max(angle(p1, p2))
        .max(angle(p2, p1))
}

/// Orthonormal basis of the range of an exact projection.
fn range_basis(p: &Mat) -> Vec<Vec<C64>> {
    let e = eigh(p);
    (0..p.dim())
        .filter(|&j| e.values[j] > 0.5)
        .map(|j| e.vector(j))
        .collect()
}

/// Exact pair of projections whose angle operator has spectrum in `{0, c}`.
///
/// Both inputs are rounded to projections. `P₁` is kept; each principal
/// vector `u` of `ran P₂` is rotated within `span{P₁u, (1 − P₁)u}` so that
/// `‖P₁u‖²` becomes exactly `c` (or 0 for the vectors already nearly
/// orthogonal to `ran P₁`).
pub fn correct_two_projections(a1: &Mat, a2: &Mat, c: f64) -> Result<(Mat, Mat)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter { name: "c", value: c });
    }
    a1.check_same_dim(a2)?;
    let d = a1.dim();
    if two_projection_defect(a1, a2, c) <= exact_tol(d) {
        return Ok((a1.clone(), a2.clone()));
    }
    let p1 = correct_projection(a1).map_err(|e| e.at_index(1))?;
    let p2 = correct_projection(a2).map_err(|e| e.at_index(2))?;
    let y = range_basis(&p2);
    let r = y.len();
    // Compression of P₁ to ran P₂ in the basis y.
    let p1y: Vec<Vec<C64>> = y.iter().map(|v| matvec(&p1, v)).collect();
    let g = Mat::from_fn(r.max(1), |i, j| {
        if i < r && j < r {
            y[i].iter().zip(&p1y[j]).map(|(a, b)| a.conj() * b).sum()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let e = eigh(&g);
    let band = 0.5 * c.min(1.0 - c);
    let mut out = Mat::zeros(d);
    for k in 0..r {
        let s2 = e.values[k];
        let z = e.vector(k);
        let u = combine(&y, &z);
        let pu = matvec(&p1, &u);
        let qu: Vec<C64> = u.iter().zip(&pu).map(|(a, b)| a - b).collect();
        let v = if (s2 - c).abs() <= band {
            let a = num::sqrt(c) / norm(&pu);
            let b = num::sqrt(1.0 - c) / norm(&qu);
            pu.iter().zip(&qu).map(|(x, y)| x * a + y * b).collect::<Vec<_>>()
        } else if s2 < 0.5 * c {
            let b = 1.0 / norm(&qu);
            qu.iter().map(|x| x * b).collect()
        } else {
            return Err(Error::SpectralGap { eigenvalue: s2 });
        };
        out.add_outer(C64::new(1.0, 0.0), &v, &v);
    }
    Ok((p1, out))
}

fn matvec(m: &Mat, v: &[C64]) -> Vec<C64> {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

fn combine(basis: &[Vec<C64>], z: &[C64]) -> Vec<C64> {
    let d = basis[0].len();
    (0..d)
        .map(|i| basis.iter().zip(z).map(|(b, zk)| b[i] * zk).sum())
        .collect()
}

fn norm(v: &[C64]) -> f64 {
    num::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}
