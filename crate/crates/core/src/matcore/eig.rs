//! Hermitian eigendecomposition.
//!
//! Householder reduction to a complex tridiagonal matrix, a diagonal phase
//! change that makes the off-diagonal real, then implicit QL with Wilkinson
//! style shifts on the real tridiagonal matrix.

use alloc::vec;
use alloc::vec::Vec;

use super::Mat;
use crate::num;
use crate::C64;

/// `A = V diag(values) V*` with eigenvalues ascending and eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl HermEig {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }

    /// `V diag(g(λ)) V*`
    pub fn reconstruct_with(&self, mut g: impl FnMut(f64) -> C64) -> Mat {
        let n = self.values.len();
        let v = &self.vectors;
        let gv: Vec<C64> = self.values.iter().map(|&l| g(l)).collect();
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = v[(i, k)] * gv[k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
pub fn eigh(a: &Mat) -> HermEig {
    let n = a.dim();
    let mut w = a.hermitian_part();
    let mut q = Mat::identity(n);

    if n >= 3 {
        for k in 0..n - 2 {
            householder_step(&mut w, &mut q, k);
        }
    }

    let d: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut phase = vec![C64::new(1.0, 0.0); n];
    let mut sub = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let s = w[(i + 1, i)];
        let r = num::cabs(s);
        sub[i + 1] = r;
        phase[i + 1] = if r > 0.0 { phase[i] * (s / r) } else { phase[i] };
    }

    let (values, zt) = tql2(d, sub);

    // vectors = Q · diag(phase) · Z
    let mut qd = q;
    for i in 0..n {
        for j in 0..n {
            qd[(i, j)] *= phase[j];
        }
    }
    let mut vectors = Mat::zeros(n);
    for r in 0..n {
        for (col, zcol) in zt.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += qd[(r, i)] * zcol[i];
            }
            vectors[(r, col)] = acc;
        }
    }
    HermEig { values, vectors }
}

/// Eigenvalues only.
pub fn eigvalsh(a: &Mat) -> Vec<f64> {
    eigh(a).values
}

fn householder_step(w: &mut Mat, q: &mut Mat, k: usize) {
    let n = w.dim();
    let m = n - k - 1;
    let tail: f64 = (k + 2..n).map(|i| w[(i, k)].norm_sqr()).sum();
    if tail == 0.0 {
        return;
    }
    let x0 = w[(k + 1, k)];
    let xnorm = num::sqrt(tail + x0.norm_sqr());
    let ax0 = num::cabs(x0);
    let ph = if ax0 > 0.0 { x0 / ax0 } else { C64::new(1.0, 0.0) };
    let alpha = -ph * xnorm;

    let mut v: Vec<C64> = (0..m).map(|i| w[(k + 1 + i, k)]).collect();
    v[0] -= alpha;
    let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vn2 == 0.0 {
        return;
    }
    let tau = 2.0 / vn2;

    // p = τ A22 v
    let mut p = vec![C64::new(0.0, 0.0); m];
    for i in 0..m {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            acc += w[(k + 1 + i, k + 1 + j)] * v[j];
        }
        p[i] = acc * tau;
    }
    let vp: C64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
    let beta = 0.5 * tau * vp.re;
    let qv: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * beta).collect();

    // A22 ← A22 − v q* − q v*
    for i in 0..m {
        for j in 0..m {
            w[(k + 1 + i, k + 1 + j)] -= v[i] * qv[j].conj() + qv[i] * v[j].conj();
        }
    }
    w[(k + 1, k)] = alpha;
    w[(k, k + 1)] = alpha.conj();
    for i in k + 2..n {
        w[(i, k)] = C64::new(0.0, 0.0);
        w[(k, i)] = C64::new(0.0, 0.0);
    }

    // Q[:, k+1..] ← Q[:, k+1..] − τ (Q v) v*
    for r in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            acc += q[(r, k + 1 + j)] * v[j];
        }
        acc *= tau;
        for j in 0..m {
            q[(r, k + 1 + j)] -= acc * v[j].conj();
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e[i] = T[i, i-1]` (`e[0]` unused). Returns ascending
/// eigenvalues and eigenvectors stored one per row.
fn tql2(mut d: Vec<f64>, mut e: Vec<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    const MAX_ITER: usize = 100;
    let n = d.len();
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    if n == 0 {
        return (d, z);
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(num::abs(d[l]) + num::abs(e[l]));
        let mut m = l;
        while m < n - 1 {
            if num::abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = num::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = num::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let zi = &mut lo[i];
                    let zi1 = &mut hi[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if num::abs(e[l]) <= eps * tst1 || iter >= MAX_ITER {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&i| core::mem::take(&mut z[i])).collect();
    (values, vectors)
}
