use alloc::vec::Vec;

use super::{eigvalsh, Mat};
use crate::num;
use crate::{Error, Result, C64};

/// Finite direct sum `M_{n_1} ⊕ … ⊕ M_{n_k}` carrying the tracial state
/// `τ(a) = Σ_j α_j · tr(a_j) / n_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
    weights: Vec<f64>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>, weights: Vec<f64>) -> Result<BlockAlgebra> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidInput("block dimensions must be positive".into()));
        }
        if weights.len() != block_dims.len() {
            return Err(Error::Shape {
                expected: block_dims.len(),
                found: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "trace weight",
                value: w,
            });
        }
        let total: f64 = weights.iter().sum();
        if num::abs(total - 1.0) > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "sum of trace weights",
                value: total,
            });
        }
        Ok(BlockAlgebra {
            block_dims,
            weights,
        })
    }

    /// Weights proportional to block dimension, i.e. the normalized trace of
    /// the ambient matrix algebra.
    pub fn proportional(block_dims: Vec<usize>) -> Result<BlockAlgebra> {
        let total: usize = block_dims.iter().sum();
        let weights = block_dims
            .iter()
            .map(|&n| n as f64 / total.max(1) as f64)
            .collect();
        BlockAlgebra::new(block_dims, weights)
    }

    /// `M_n` with its normalized trace.
    pub fn matrix(n: usize) -> BlockAlgebra {
        BlockAlgebra {
            block_dims: alloc::vec![n],
            weights: alloc::vec![1.0],
        }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.block_dims
            .iter()
            .map(|&n| {
                let o = off;
                off += n;
                o
            })
            .collect()
    }

    /// Trace of a rank-one projection in each block.
    pub fn atoms(&self) -> Vec<f64> {
        self.block_dims
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| w / n as f64)
            .collect()
    }

    pub fn max_atom(&self) -> f64 {
        self.atoms().into_iter().fold(0.0, f64::max)
    }

    /// True when the weights are (numerically) dimension proportional.
    pub fn is_proportional(&self) -> bool {
        let atoms = self.atoms();
        atoms
            .iter()
            .all(|a| num::abs(a - atoms[0]) <= 1e-12 * atoms[0])
    }

    /// Checks that `a` has the ambient dimension and vanishes off the blocks.
    pub fn check_compatible(&self, a: &Mat) -> Result<()> {
        let n = self.total_dim();
        if a.dim() != n {
            return Err(Error::Shape {
                expected: n,
                found: a.dim(),
            });
        }
        if self.block_dims.len() > 1 {
            let block_of = self.block_index();
            let scale = a.max_abs().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    if block_of[i] != block_of[j] && num::cabs(a[(i, j)]) > 1e-12 * scale {
                        return Err(Error::InvalidInput(alloc::format!(
                            "entry ({i}, {j}) lies outside the diagonal blocks"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn block_index(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .enumerate()
            .flat_map(|(b, &n)| core::iter::repeat(b).take(n))
            .collect()
    }

    /// Diagonal blocks of `a`.
    pub fn blocks_of(&self, a: &Mat) -> Vec<Mat> {
        self.offsets()
            .iter()
            .zip(&self.block_dims)
            .map(|(&o, &n)| a.principal_block(o, n))
            .collect()
    }

    /// `τ(a)`
    pub fn trace(&self, a: &Mat) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for ((&o, &n), &w) in self.offsets().iter().zip(&self.block_dims).zip(&self.weights) {
            let t: C64 = (o..o + n).map(|i| a[(i, i)]).sum();
            acc += t * (w / n as f64);
        }
        acc
    }

    /// `‖a‖_p = τ((a*a)^{p/2})^{1/p}`
    pub fn p_norm(&self, a: &Mat, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
            });
        }
        a.check_finite()?;
        self.check_compatible(a)?;
        let mut acc = 0.0;
        for (blk, (&n, &w)) in self
            .blocks_of(a)
            .iter()
            .zip(self.block_dims.iter().zip(&self.weights))
        {
            let s: f64 = if p == 2.0 {
                blk.as_slice().iter().map(|z| z.norm_sqr()).sum()
            } else {
                eigvalsh(&blk.adjoint_mul(blk))
                    .into_iter()
                    .map(|l| num::pow(l.max(0.0), p / 2.0))
                    .sum()
            };
            acc += w * s / n as f64;
        }
        Ok(num::pow(acc, 1.0 / p))
    }

    /// 2-norm, skipping validation.
    pub fn two_norm(&self, a: &Mat) -> f64 {
        let mut acc = 0.0;
        for ((&o, &n), &w) in self.offsets().iter().zip(&self.block_dims).zip(&self.weights) {
            let mut s = 0.0;
            for i in o..o + n {
                for j in o..o + n {
                    s += a[(i, j)].norm_sqr();
                }
            }
            acc += w * s / n as f64;
        }
        num::sqrt(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_weights() {
        assert!(BlockAlgebra::new(alloc::vec![2, 3], alloc::vec![0.5, 0.6]).is_err());
        assert!(BlockAlgebra::new(alloc::vec![2, 3], alloc::vec![1.0, 0.0]).is_err());
        assert!(BlockAlgebra::new(alloc::vec![2, 0], alloc::vec![0.5, 0.5]).is_err());
        let a = BlockAlgebra::proportional(alloc::vec![2, 3]).unwrap();
        assert_eq!(a.weights(), &[0.4, 0.6]);
        assert!(a.is_proportional());
    }

    #[test]
    fn trace_of_unit_is_one() {
        let a = BlockAlgebra::new(alloc::vec![1, 4], alloc::vec![0.3, 0.7]).unwrap();
        assert!((a.trace(&Mat::identity(5)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spec_examples() {
        let m2 = BlockAlgebra::matrix(2);
        let p = Mat::diag_real(&[1.0, 0.0]);
        assert!((m2.p_norm(&p, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let d = Mat::diag_real(&[1.0, 2.0]);
        assert!((m2.p_norm(&d, 1.0).unwrap() - 1.5).abs() < 1e-14);
        for p in [1.0, 1.5, 2.0, 3.0, 7.5] {
            assert!((BlockAlgebra::matrix(5).p_norm(&Mat::identity(5), p).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn p_norm_errors() {
        let m2 = BlockAlgebra::matrix(2);
        assert!(matches!(
            m2.p_norm(&Mat::identity(2), 0.5),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            m2.p_norm(&Mat::identity(3), 2.0),
            Err(Error::Shape { .. })
        ));
        let two = BlockAlgebra::proportional(alloc::vec![1, 1]).unwrap();
        let off = Mat::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(two.p_norm(&off, 2.0).is_err());
    }
}
