use alloc::vec::Vec;

use crate::matcore::{eigh, op_norm_unchecked, BlockAlgebra, Mat, ScalarFn};
use crate::num;
use crate::{exact_tol, Error, Result, C64};

use super::correct_unitary;

const MAX_SWEEPS: usize = 200;

/// Result of a joint approximate diagonalization.
#[derive(Debug, Clone)]
pub struct JointDiagonalization {
    /// Unitary `W` whose columns nearly diagonalize every input.
    pub basis: Mat,
    /// Diagonals of `W* A_j W`.
    pub diagonals: Vec<Vec<C64>>,
    /// `(Σ_j Σ_{p≠q} |(W* A_j W)_pq|²)^{1/2}` at exit.
    pub off_mass: f64,
    pub sweeps: usize,
    /// Whether the off-diagonal mass fell below `1e-12 · dim`.
    pub converged: bool,
}

fn off_mass(ms: &[Mat]) -> f64 {
    let mut acc = 0.0;
    for m in ms {
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m[(i, j)].norm_sqr();
                }
            }
        }
    }
    num::sqrt(acc)
}

/// Real principal eigenvector of a symmetric 3×3 matrix, first entry ≥ 0.
fn principal(g: &[[f64; 3]; 3]) -> [f64; 3] {
    let m = Mat::from_fn(3, |i, j| C64::new(g[i][j], 0.0));
    let e = eigh(&m);
    let v = e.vector(2);
    let big = (0..3)
        .max_by(|&a, &b| v[a].norm_sqr().total_cmp(&v[b].norm_sqr()))
        .unwrap_or(0);
    let phase = v[big].conj() / num::cabs(v[big]);
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = (v[k] * phase).re;
    }
    let n = num::sqrt(out.iter().map(|x| x * x).sum());
    let sign = if out[0] < 0.0 { -1.0 } else { 1.0 };
    for x in out.iter_mut() {
        *x *= sign / n;
    }
    out
}

/// Jacobi-style joint diagonalization: row-cyclic sweeps of 2×2 unitary
/// rotations, each maximizing the diagonal mass of all Hermitian and
/// skew-Hermitian parts at once.
pub fn joint_diagonalize(mats: &[Mat]) -> Result<JointDiagonalization> {
    let Some(first) = mats.first() else {
        return Err(Error::InvalidInput("nothing to diagonalize".into()));
    };
    let n = first.dim();
    for m in mats {
        first.check_same_dim(m)?;
        m.check_finite()?;
    }
    let mut a: Vec<Mat> = mats.to_vec();
    let mut w = Mat::identity(n);
    let target = 1e-12 * n as f64;
    let mut sweeps = 0;
    let mut mass = off_mass(&a);
    while mass >= target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut g = [[0.0f64; 3]; 3];
                for m in &a {
                    let (app, aqq, apq, aqp) = (m[(p, p)], m[(q, q)], m[(p, q)], m[(q, p)]);
                    let herm = (apq + aqp.conj()) * 0.5;
                    let skew = (apq - aqp.conj()) * C64::new(0.0, -0.5);
                    let hs = [
                        [app.re - aqq.re, 2.0 * herm.re, -2.0 * herm.im],
                        [app.im - aqq.im, 2.0 * skew.re, -2.0 * skew.im],
                    ];
                    for h in hs {
                        for i in 0..3 {
                            for j in 0..3 {
                                g[i][j] += h[i] * h[j];
                            }
                        }
                    }
                }
                let v = principal(&g);
                let c = num::sqrt(0.5 * (1.0 + v[0]));
                let s = C64::new(v[1], v[2]) / (2.0 * c);
                if num::cabs(s) <= 1e-13 {
                    continue;
                }
                rotated = true;
                for m in a.iter_mut() {
                    rotate(m, p, q, c, s);
                }
                rotate_cols(&mut w, p, q, c, s);
            }
        }
        mass = off_mass(&a);
        if !rotated {
            break;
        }
    }
    Ok(JointDiagonalization {
        basis: w,
        diagonals: a.iter().map(|m| m.diagonal()).collect(),
        off_mass: mass,
        sweeps,
        converged: mass < target,
    })
}

/// `M ← R* M R` for `R = [[c, −s̄], [s, c]]` acting on coordinates `p, q`.
fn rotate(m: &mut Mat, p: usize, q: usize, c: f64, s: C64) {
    rotate_cols(m, p, q, c, s);
    let n = m.dim();
    for j in 0..n {
        let (mp, mq) = (m[(p, j)], m[(q, j)]);
        m[(p, j)] = mp * c + mq * s.conj();
        m[(q, j)] = -mp * s + mq * c;
    }
}

fn rotate_cols(m: &mut Mat, p: usize, q: usize, c: f64, s: C64) {
    let n = m.dim();
    for i in 0..n {
        let (mp, mq) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = mp * c + mq * s;
        m[(i, q)] = -mp * s.conj() + mq * c;
    }
}

/// `W diag(d) W*`
fn assemble(w: &Mat, d: &[C64]) -> Mat {
    let n = w.dim();
    let mut out = Mat::zeros(n);
    for k in 0..n {
        let col = w.column(k);
        out.add_outer(d[k], &col, &col);
    }
    out
}

/// Corrected family with its diagnostics.
#[derive(Debug, Clone)]
pub struct CommutingNormals {
    pub outputs: Vec<Mat>,
    pub basis: Mat,
    /// `Σ_j ‖A_j − B_j‖_p` in the normalized trace of the ambient algebra.
    pub distance: f64,
    pub converged: bool,
    pub off_mass: f64,
}

/// Commuting normal matrices `B_j = W diag(W* A_j W) W*` near `A_j`.
pub fn correct_commuting_normals(as_: &[Mat], p: f64) -> Result<CommutingNormals> {
    let jd = joint_diagonalize(as_)?;
    let alg = BlockAlgebra::matrix(jd.basis.dim());
    let outputs: Vec<Mat> = jd.diagonals.iter().map(|d| assemble(&jd.basis, d)).collect();
    let mut distance = 0.0;
    for (a, b) in as_.iter().zip(&outputs) {
        distance += alg.p_norm(&(a - b), p)?;
    }
    Ok(CommutingNormals {
        outputs,
        basis: jd.basis,
        distance,
        converged: jd.converged,
        off_mass: jd.off_mass,
    })
}

/// Largest commutator or normality defect in a family.
pub fn commutation_defect(bs: &[Mat]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in bs.iter().enumerate() {
        worst = worst.max(op_norm_unchecked(&a.commutator(&a.adjoint())));
        for b in &bs[i + 1..] {
            worst = worst.max(op_norm_unchecked(&a.commutator(b)));
        }
    }
    worst
}

/// Complex-valued piecewise-linear function of a real variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    pub re: ScalarFn,
    pub im: ScalarFn,
}

impl Interpolant {
    pub fn eval(&self, t: f64) -> Result<C64> {
        Ok(C64::new(self.re.eval(t)?, self.im.eval(t)?))
    }

    /// `f(C)` for Hermitian `C`.
    pub fn apply(&self, c: &Mat) -> Result<Mat> {
        crate::matcore::herm_apply(c, |t| self.eval(t))
    }
}

/// A Hermitian `C` with eigenvalues `1, …, m` on the joint eigenspaces of a
/// commuting normal family, and interpolants with `f_j(C) = B_j`.
pub fn single_generator(bs: &[Mat]) -> Result<(Mat, Vec<Interpolant>)> {
    let Some(first) = bs.first() else {
        return Err(Error::InvalidInput("empty family".into()));
    };
    let n = first.dim();
    for b in bs {
        first.check_same_dim(b)?;
        b.check_finite()?;
    }
    let defect = commutation_defect(bs);
    if defect > exact_tol(n) {
        return Err(Error::Commutation { defect });
    }
    let jd = joint_diagonalize(bs)?;
    let point = |k: usize| -> Vec<C64> { jd.diagonals.iter().map(|d| d[k]).collect() };
    let close = |a: &[C64], b: &[C64]| a.iter().zip(b).all(|(x, y)| num::cabs(x - y) <= 1e-8);
    let mut groups: Vec<(Vec<C64>, Vec<usize>)> = Vec::new();
    for k in 0..n {
        let pk = point(k);
        match groups.iter_mut().find(|(rep, _)| close(rep, &pk)) {
            Some((_, members)) => members.push(k),
            None => groups.push((pk, alloc::vec![k])),
        }
    }
    groups.sort_by(|(a, _), (b, _)| {
        for (x, y) in a.iter().zip(b) {
            let cmp = |a: f64, b: f64| {
                if num::abs(a - b) <= 1e-8 {
                    core::cmp::Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            };
            let o = cmp(x.re, y.re).then(cmp(x.im, y.im));
            if o.is_ne() {
                return o;
            }
        }
        core::cmp::Ordering::Equal
    });
    let mut labels = alloc::vec![C64::new(0.0, 0.0); n];
    for (g, (_, members)) in groups.iter().enumerate() {
        for &k in members {
            labels[k] = C64::new((g + 1) as f64, 0.0);
        }
    }
    let c = assemble(&jd.basis, &labels).hermitian_part();
    let xs: Vec<f64> = (1..=groups.len()).map(|g| g as f64).collect();
    let fs = (0..bs.len())
        .map(|j| {
            let mean = |(_, members): &(Vec<C64>, Vec<usize>)| -> C64 {
                let s: C64 = members.iter().map(|&k| jd.diagonals[j][k]).sum();
                s / members.len() as f64
            };
            let re: Vec<f64> = groups.iter().map(|g| mean(g).re).collect();
            let im: Vec<f64> = groups.iter().map(|g| mean(g).im).collect();
            Ok(Interpolant {
                re: ScalarFn::interpolate(&xs, &re)?,
                im: ScalarFn::interpolate(&xs, &im)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((c, fs))
}

/// Finite Haar unitary near `U`: the polar factor of `U` with its
/// eigenvalue phases replaced by a rotated set of `n`-th roots of unity.
///
/// Eigenvalues are matched to targets in sorted-phase order and the common
/// rotation `θ*` is the least-squares fit. Several blocks are allowed only
/// when the trace weights are proportional to block dimension, since only
/// then do the roots of unity give `τ(V^k) = 0`.
pub fn correct_haar(u: &Mat, alg: &BlockAlgebra) -> Result<Mat> {
    alg.check_compatible(u)?;
    if !alg.is_proportional() {
        return Err(Error::InvalidInput(
            "finite Haar correction needs dimension-proportional trace weights".into(),
        ));
    }
    let n = u.dim();
    let mut phases: Vec<(f64, usize, Vec<C64>)> = Vec::with_capacity(n);
    for (o, blk) in alg.offsets().into_iter().zip(alg.blocks_of(u)) {
        let v = correct_unitary(&blk)?;
        let jd = joint_diagonalize(core::slice::from_ref(&v))?;
        let bn = v.dim();
        for k in 0..bn {
            let mut theta = num::arg(jd.diagonals[0][k]);
            if theta < 0.0 {
                theta += 2.0 * core::f64::consts::PI;
            }
            let mut vec = alloc::vec![C64::new(0.0, 0.0); n];
            for i in 0..bn {
                vec[o + i] = jd.basis[(i, k)];
            }
            phases.push((theta, o, vec));
        }
    }
    phases.sort_by(|a, b| a.0.total_cmp(&b.0));
    let step = 2.0 * core::f64::consts::PI / n as f64;
    let fit: C64 = phases
        .iter()
        .enumerate()
        .map(|(j, (theta, _, _))| num::cis(theta - step * j as f64))
        .sum();
    let theta_star = num::arg(fit);
    let mut out = Mat::zeros(n);
    for (j, (_, _, vec)) in phases.iter().enumerate() {
        out.add_outer(num::cis(theta_star + step * j as f64), vec, vec);
    }
    Ok(out)
}
