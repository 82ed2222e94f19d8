//! One-sided (Hestenes) Jacobi SVD for complex square matrices.
//!
//! Slower than bidiagonalization but computes tiny singular values to high
//! relative accuracy, which the partial-isometry cutoff depends on.

use alloc::vec::Vec;

use super::Mat;
use crate::num;
use crate::C64;

/// `A = Σ_j s_j u_j v_j*` with `s` descending. `u[j]` is only meaningful
/// where `s[j] > 0`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub s: Vec<f64>,
    pub u: Vec<Vec<C64>>,
    pub v: Vec<Vec<C64>>,
}

impl Svd {
    /// `Σ_{s_j > cutoff} u_j v_j*`, the partial isometry of the polar decomposition.
    pub fn polar_isometry(&self, cutoff: f64) -> (Mat, usize) {
        let n = self.v.first().map_or(0, |v| v.len());
        let mut out = Mat::zeros(n);
        let mut kept = 0;
        for (j, &s) in self.s.iter().enumerate() {
            if s > cutoff {
                out.add_outer(C64::new(1.0, 0.0), &self.u[j], &self.v[j]);
                kept += 1;
            }
        }
        (out, kept)
    }
}

pub fn svd(a: &Mat) -> Svd {
    const MAX_SWEEPS: usize = 80;
    let n = a.dim();
    let mut x: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut c = alloc::vec![C64::new(0.0, 0.0); n];
            c[j] = C64::new(1.0, 0.0);
            c
        })
        .collect();
    let tol = 1e-15;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = x[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = x[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = x[p].iter().zip(&x[q]).map(|(a, b)| a.conj() * b).sum();
                let g = num::cabs(gamma);
                if g == 0.0 || g <= tol * num::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = rotation(alpha, beta, gamma);
                rotate_pair(&mut x, p, q, c, s, ph);
                rotate_pair(&mut v, p, q, c, s, ph);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut s: Vec<f64> = x
        .iter()
        .map(|c| num::sqrt(c.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let u: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| {
            let sj = s[j];
            if sj > 0.0 {
                x[j].iter().map(|z| z / sj).collect()
            } else {
                x[j].clone()
            }
        })
        .collect();
    let v = order.iter().map(|&j| v[j].clone()).collect();
    s = order.iter().map(|&j| s[j]).collect();
    Svd { s, u, v }
}

/// Jacobi rotation annihilating the off-diagonal of `[[alpha, gamma], [conj(gamma), beta]]`.
/// Returns `(c, s, e^{-iφ})` with `φ = arg(gamma)`.
pub(crate) fn rotation(alpha: f64, beta: f64, gamma: C64) -> (f64, f64, C64) {
    let g = num::cabs(gamma);
    let ph = (gamma / g).conj();
    let zeta = (beta - alpha) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + num::sqrt(1.0 + zeta * zeta))
    } else {
        -1.0 / (-zeta + num::sqrt(1.0 + zeta * zeta))
    };
    let c = 1.0 / num::sqrt(1.0 + t * t);
    (c, c * t, ph)
}

/// `[x_p, x_q] ← [x_p, e^{-iφ} x_q] · [[c, s], [-s, c]]`
fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, ph: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    let xp = &mut lo[p];
    let xq = &mut hi[0];
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let yp = *a;
        let yq = *b * ph;
        *a = yp * c - yq * s;
        *b = yp * s + yq * c;
    }
}
