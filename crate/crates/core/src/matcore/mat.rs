use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::num;
use crate::{Error, Result, C64};

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Mat {
        Mat {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Mat {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Mat {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Mat { dim, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Mat> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Mat { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Mat> {
        Mat::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[C64]) -> Mat {
        let n = values.len();
        let mut m = Mat::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Mat {
        let n = values.len();
        let mut m = Mat::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<C64>]) -> Mat {
        let mut m = Mat::zeros(dim);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m.data[i * dim + j] = c[i];
            }
        }
        m
    }

    /// `Σ v v*` over the given vectors.
    pub fn projector_onto(dim: usize, vecs: &[Vec<C64>]) -> Mat {
        let mut m = Mat::zeros(dim);
        for v in vecs {
            m.add_outer(C64::new(1.0, 0.0), v, v);
        }
        m
    }

    /// `self += c · u v*`
    pub fn add_outer(&mut self, c: C64, u: &[C64], v: &[C64]) {
        let n = self.dim;
        for i in 0..n {
            let ui = c * u[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for (x, vj) in row.iter_mut().zip(v) {
                *x += ui * vj.conj();
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            None => Ok(()),
            Some(k) => Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                k / self.dim,
                k % self.dim
            ))),
        }
    }

    pub fn check_same_dim(&self, other: &Mat) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// `(A + A*) / 2`
    pub fn hermitian_part(&self) -> Mat {
        Mat::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `(A − A*) / 2i`
    pub fn skew_part(&self) -> Mat {
        let half_i = C64::new(0.0, -0.5);
        Mat::from_fn(self.dim, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half_i)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        num::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| num::cabs(z)).fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, c: C64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Mat { dim: n, data: out }
    }

    /// `A* B` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for k in 0..n {
            let arow = &self.data[k * n..(k + 1) * n];
            let brow = &other.data[k * n..(k + 1) * n];
            for i in 0..n {
                let a = arow[i].conj();
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Mat { dim: n, data: out }
    }

    /// `A B − B A`
    pub fn commutator(&self, other: &Mat) -> Mat {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `W* A W`
    pub fn conjugate_by(&self, w: &Mat) -> Mat {
        w.adjoint_mul(&self.matmul(w))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (a, b) = (self.dim, other.dim);
        Mat::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    /// Block-diagonal direct sum of the given matrices.
    pub fn direct_sum(blocks: &[&Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Mat::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.dim;
        }
        m
    }

    /// Principal diagonal block starting at `start` of size `size`.
    pub fn principal_block(&self, start: usize, size: usize) -> Mat {
        Mat::from_fn(size, |i, j| self[(start + i, start + j)])
    }

    /// Block `(bi, bj)` of size `size` when the matrix is viewed as a grid of blocks.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Mat {
        Mat::from_fn(size, |i, j| self[(bi * size + i, bj * size + j)])
    }

    /// Assembles an `m × m` grid of equally sized blocks given row-major.
    pub fn from_blocks(m: usize, blocks: &[Mat]) -> Mat {
        assert_eq!(blocks.len(), m * m, "block grid size mismatch");
        let d = blocks[0].dim;
        Mat::from_fn(m * d, |i, j| blocks[(i / d) * m + j / d][(i % d, j % d)])
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &Mat {
    type Output = Mat;

    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;

    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;

    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs)
    }
}

impl Neg for &Mat {
    type Output = Mat;

    fn neg(self) -> Mat {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Mat> for Mat {
    fn add_assign(&mut self, rhs: &Mat) {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Mat> for Mat {
    fn sub_assign(&mut self, rhs: &Mat) {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}
