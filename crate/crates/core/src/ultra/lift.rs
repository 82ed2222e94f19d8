use alloc::format;
use alloc::vec::Vec;

use super::RepSequence;
use crate::correct::partial_isometry_defect;
use crate::matcore::{
    check_hermitian, eigh, projection_defect, projection_rank, svd, BlockAlgebra, Mat,
};
use crate::{exact_tol, Error, Result, C64};

/// Singular values at or below this are treated as zero in polar factors.
pub const POLAR_CUTOFF: f64 = 1e-8;

const ONE: C64 = C64::new(1.0, 0.0);

/// Nested projections `P(t_0) ≤ … ≤ P(t_m)` with their traces.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralChain {
    pub parameters: Vec<f64>,
    pub projections: Vec<Mat>,
    pub traces: Vec<f64>,
}

impl SpectralChain {
    /// Largest `|τ(P(t)) − t|`.
    pub fn trace_error(&self) -> f64 {
        self.parameters
            .iter()
            .zip(&self.traces)
            .map(|(t, tr)| (t - tr).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `‖P(t_k) P(t_{k+1}) − P(t_k)‖` along the chain.
    pub fn nesting_defect(&self) -> f64 {
        self.projections
            .windows(2)
            .map(|w| crate::matcore::op_norm_unchecked(&(&w[0].matmul(&w[1]) - &w[0])))
            .fold(0.0, f64::max)
    }
}

fn check_projection(p: &Mat) -> Result<()> {
    let defect = projection_defect(p);
    if defect > exact_tol(p.dim()) {
        return Err(Error::NotProjection { defect });
    }
    Ok(())
}

/// Orthonormal eigenvectors of a projection's block `[off, off + n)`, split
/// into range and kernel, embedded in the ambient space.
fn split_block(p: &Mat, off: usize, n: usize) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let e = eigh(&p.principal_block(off, n).hermitian_part());
    let d = p.dim();
    let mut range = Vec::new();
    let mut kernel = Vec::new();
    for (j, &l) in e.values.iter().enumerate().rev() {
        let mut v = alloc::vec![C64::new(0.0, 0.0); d];
        v[off..off + n].copy_from_slice(&e.vector(j));
        if l > 0.5 {
            range.push(v);
        } else {
            kernel.push(v);
        }
    }
    kernel.reverse();
    (range, kernel)
}

/// Atom counts per block, bounded by `caps`, whose total is closest to `gap`.
fn pick_atoms(atoms: &[f64], caps: &[usize], gap: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| atoms[b].total_cmp(&atoms[a]));
    let mut counts = alloc::vec![0usize; atoms.len()];
    let mut rest = gap;
    for &b in &order {
        let n = ((rest / atoms[b]) * (1.0 + 1e-12)) as usize;
        let n = n.min(caps[b]);
        counts[b] = n;
        rest -= n as f64 * atoms[b];
    }
    let extra = order
        .iter()
        .rev()
        .copied()
        .find(|&b| counts[b] < caps[b] && (rest - atoms[b]).abs() < rest);
    if let Some(b) = extra {
        counts[b] += 1;
    }
    counts
}

fn lift_trace_one(alg: &BlockAlgebra, a: &Mat, t: f64) -> Result<Mat> {
    check_projection(a)?;
    alg.check_compatible(a)?;
    let atoms = alg.atoms();
    let offs = alg.offsets();
    let parts: Vec<_> = offs
        .iter()
        .zip(alg.block_dims())
        .map(|(&o, &n)| split_block(a, o, n))
        .collect();
    let tau: f64 = parts
        .iter()
        .zip(&atoms)
        .map(|((r, _), w)| r.len() as f64 * w)
        .sum();
    let grow = t >= tau;
    let caps: Vec<usize> = parts
        .iter()
        .map(|(r, k)| if grow { k.len() } else { r.len() })
        .collect();
    let counts = pick_atoms(&atoms, &caps, (t - tau).abs());
    if counts.iter().all(|&c| c == 0) {
        return Ok(a.clone());
    }
    let mut p = a.clone();
    let sign = if grow { ONE } else { -ONE };
    for ((range, kernel), &c) in parts.iter().zip(&counts) {
        let pool = if grow { kernel } else { range };
        for v in pool.iter().take(c) {
            p.add_outer(sign, v, v);
        }
    }
    Ok(p)
}

/// Per index, a projection comparable with `A_i` whose trace is as close to
/// `t` as adding or removing eigenvectors allows.
///
/// For comparable projections `‖A − P‖₂² = |τ(P) − τ(A)|`.
pub fn lift_projection_trace(a: &RepSequence, t: f64) -> Result<RepSequence> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let reps = a
        .algebras()
        .iter()
        .zip(a.reps())
        .enumerate()
        .map(|(i, (alg, x))| lift_trace_one(alg, x, t).map_err(|e| e.at_index(i + 1)))
        .collect::<Result<Vec<_>>>()?;
    RepSequence::new(a.algebras().to_vec(), reps, 1.0)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    for (k, &t) in grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter { name: "grid", value: t });
        }
        if k > 0 && t <= grid[k - 1] {
            return Err(Error::InvalidInput(format!(
                "grid must be increasing; entry {} is {t}",
                k + 1
            )));
        }
    }
    Ok(())
}

fn chain_one(alg: &BlockAlgebra, t: &Mat, grid: &[f64]) -> Result<SpectralChain> {
    alg.check_compatible(t)?;
    let h = check_hermitian(t)?;
    let d = h.dim();
    let atoms = alg.atoms();
    let mut pairs: Vec<(f64, usize, Vec<C64>)> = Vec::with_capacity(d);
    for (b, (&o, &n)) in alg.offsets().iter().zip(alg.block_dims()).enumerate() {
        let e = eigh(&h.principal_block(o, n));
        for (j, &l) in e.values.iter().enumerate() {
            if !(-1e-8..=1.0 + 1e-8).contains(&l) {
                return Err(Error::Domain { eigenvalue: l });
            }
            let mut v = alloc::vec![C64::new(0.0, 0.0); d];
            v[o..o + n].copy_from_slice(&e.vector(j));
            pairs.push((l, b, v));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut cumulative = alloc::vec![0.0];
    for (_, b, _) in &pairs {
        let last = *cumulative.last().unwrap_or(&0.0);
        cumulative.push(last + atoms[*b]);
    }
    let mut projections = Vec::with_capacity(grid.len());
    let mut traces = Vec::with_capacity(grid.len());
    let mut p = Mat::zeros(d);
    let mut taken = 0;
    for &s in grid {
        let mut best = taken;
        for j in taken..cumulative.len() {
            if (cumulative[j] - s).abs() < (cumulative[best] - s).abs() {
                best = j;
            }
        }
        for (_, _, v) in &pairs[taken..best] {
            p.add_outer(ONE, v, v);
        }
        taken = best;
        traces.push(alg.trace(&p).re);
        projections.push(p.clone());
    }
    Ok(SpectralChain {
        parameters: grid.to_vec(),
        projections,
        traces,
    })
}

/// Per index, nested spectral projections of `T_i` padded to traces nearest
/// the grid values: eigenvectors are taken in increasing eigenvalue order
/// and `P_i(t)` is the prefix whose trace is closest to `t`.
pub fn lift_chain(t: &RepSequence, grid: &[f64]) -> Result<Vec<SpectralChain>> {
    check_grid(grid)?;
    t.algebras()
        .iter()
        .zip(t.reps())
        .enumerate()
        .map(|(i, (alg, x))| chain_one(alg, x, grid).map_err(|e| e.at_index(i + 1)))
        .collect()
}

/// The dyadic grid `k / 2^bits`, `k = 0, …, 2^bits`.
pub fn dyadic_grid(bits: u32) -> Vec<f64> {
    let n = 1usize << bits;
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn block_ranks(alg: &BlockAlgebra, p: &Mat) -> Vec<usize> {
    alg.blocks_of(p).iter().map(projection_rank).collect()
}

/// Polar partial isometry of `F W E`, which maps `E` onto `F` exactly when
/// the compression keeps full rank.
pub(crate) fn polar_lift(e: &Mat, f: &Mat, w: &Mat) -> Result<Mat> {
    e.check_same_dim(f)?;
    e.check_same_dim(w)?;
    check_projection(e)?;
    check_projection(f)?;
    let (re, rf) = (projection_rank(e), projection_rank(f));
    if re != rf {
        return Err(Error::RankMismatch {
            source_rank: re,
            range_rank: rf,
        });
    }
    if partial_isometry_defect(w, e, f) <= exact_tol(w.dim()) {
        return Ok(w.clone());
    }
    let x = f.matmul(w).matmul(e);
    let (v, kept) = svd(&x).polar_isometry(POLAR_CUTOFF);
    if kept != re {
        return Err(Error::DegenerateCompression { rank: re, kept });
    }
    Ok(v)
}

/// Per index, the partial isometry from `E_i` to `F_i` nearest the
/// compression of `W_i`, with the profile `‖V_i − W_i‖₂`.
pub fn lift_partial_isometry(
    e: &RepSequence,
    f: &RepSequence,
    w: &RepSequence,
) -> Result<(RepSequence, Vec<f64>)> {
    e.check_aligned(f)?;
    e.check_aligned(w)?;
    let mut reps = Vec::with_capacity(e.len());
    let mut profile = Vec::with_capacity(e.len());
    for (i, alg) in e.algebras().iter().enumerate() {
        let (ei, fi, wi) = (&e.reps()[i], &f.reps()[i], &w.reps()[i]);
        let one = || -> Result<Mat> {
            check_projection(ei)?;
            check_projection(fi)?;
            let (re, rf) = (block_ranks(alg, ei), block_ranks(alg, fi));
            if let Some((a, b)) = re.iter().zip(&rf).find(|(a, b)| a != b) {
                return Err(Error::RankMismatch {
                    source_rank: *a,
                    range_rank: *b,
                });
            }
            polar_lift(ei, fi, wi)
        };
        let v = one().map_err(|err| err.at_index(i + 1))?;
        profile.push(alg.two_norm(&(&v - wi)));
        reps.push(v);
    }
    Ok((RepSequence::new(e.algebras().to_vec(), reps, 1.0)?, profile))
}
