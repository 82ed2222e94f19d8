use alloc::vec::Vec;

use super::{correct_partial_isometry, correct_resolution};
use crate::matcore::{eigh, op_norm_unchecked, Mat};
use crate::{exact_tol, Error, Result, C64};

/// Matrix units `e^{(b)}_{st}` of a direct sum of full matrix algebras, all
/// acting on one ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixUnitSystem {
    blocks: Vec<usize>,
    /// Per block, the `n_b × n_b` units in row-major order.
    units: Vec<Vec<Mat>>,
}

impl MatrixUnitSystem {
    pub fn new(blocks: Vec<usize>, units: Vec<Vec<Mat>>) -> Result<MatrixUnitSystem> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        if units.len() != blocks.len() {
            return Err(Error::Shape {
                expected: blocks.len(),
                found: units.len(),
            });
        }
        let mut dim = None;
        for (n, us) in blocks.iter().zip(&units) {
            if us.len() != n * n {
                return Err(Error::Shape {
                    expected: n * n,
                    found: us.len(),
                });
            }
            for u in us {
                u.check_finite()?;
                let d = *dim.get_or_insert(u.dim());
                if u.dim() != d {
                    return Err(Error::Shape {
                        expected: d,
                        found: u.dim(),
                    });
                }
            }
        }
        Ok(MatrixUnitSystem { blocks, units })
    }

    /// Standard units of `M_{n_1} ⊕ … ⊕ M_{n_k}` acting on `ℂ^{Σ n_b}`,
    /// tensored with the identity of `ℂ^mult`.
    pub fn standard(blocks: &[usize], mult: usize) -> MatrixUnitSystem {
        let total: usize = blocks.iter().sum();
        let mut off = 0;
        let mut units = Vec::new();
        for &n in blocks {
            let mut us = Vec::with_capacity(n * n);
            for s in 0..n {
                for t in 0..n {
                    let mut e = Mat::zeros(total);
                    e[(off + s, off + t)] = C64::new(1.0, 0.0);
                    us.push(e.kron(&Mat::identity(mult)));
                }
            }
            units.push(us);
            off += n;
        }
        MatrixUnitSystem {
            blocks: blocks.to_vec(),
            units,
        }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.units[0][0].dim()
    }

    /// `e^{(b)}_{st}`, zero-based.
    pub fn unit(&self, b: usize, s: usize, t: usize) -> &Mat {
        &self.units[b][s * self.blocks[b] + t]
    }

    pub fn units(&self) -> &[Vec<Mat>] {
        &self.units
    }

    pub fn into_units(self) -> Vec<Vec<Mat>> {
        self.units
    }

    /// All diagonal units, block by block.
    pub fn diagonals(&self) -> Vec<Mat> {
        let mut out = Vec::new();
        for (b, &n) in self.blocks.iter().enumerate() {
            for s in 0..n {
                out.push(self.unit(b, s, s).clone());
            }
        }
        out
    }

    /// Largest operator-norm violation of the matrix-unit relations:
    /// products, adjoints, and the diagonal units summing to 1.
    pub fn defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let mut sum = Mat::zeros(d);
        for (b, &n) in self.blocks.iter().enumerate() {
            for s in 0..n {
                sum += self.unit(b, s, s);
                for t in 0..n {
                    let e = self.unit(b, s, t);
                    worst = raise(worst, &(&e.adjoint() - self.unit(b, t, s)));
                    for u in 0..n {
                        for v in 0..n {
                            let prod = e.matmul(self.unit(b, u, v));
                            let want = if t == u {
                                self.unit(b, s, v).clone()
                            } else {
                                Mat::zeros(d)
                            };
                            worst = raise(worst, &(&prod - &want));
                        }
                    }
                }
            }
        }
        raise(worst, &(&sum - &Mat::identity(d)))
    }

    pub fn is_exact(&self) -> bool {
        self.defect() <= exact_tol(self.dim())
    }

    /// Largest operator-norm distance between corresponding units.
    pub fn distance(&self, other: &MatrixUnitSystem) -> f64 {
        self.units
            .iter()
            .flatten()
            .zip(other.units.iter().flatten())
            .fold(0.0, |w, (a, b)| raise(w, &(a - b)))
    }
}

/// Exact matrix units near an approximate system.
///
/// The diagonal units are corrected as a resolution of the identity, each
/// `e_{1j}` as a partial isometry from `e_{jj}` to `e_{11}`, and the rest are
/// the products `e_{st} = e_{1s}* e_{1t}`.
pub fn correct_matrix_units(approx: &MatrixUnitSystem) -> Result<MatrixUnitSystem> {
    if approx.is_exact() {
        return Ok(approx.clone());
    }
    let diag = correct_resolution(&approx.diagonals()).map_err(|e| match e {
        Error::AtIndex { index, source } => {
            let (b, s) = locate(approx.blocks(), index - 1);
            source.at_unit(b + 1, s + 1, s + 1)
        }
        e => e,
    })?;
    let mut units = Vec::with_capacity(approx.blocks().len());
    let mut k = 0;
    for (b, &n) in approx.blocks().iter().enumerate() {
        let dd = &diag[k..k + n];
        k += n;
        let mut first_row = Vec::with_capacity(n);
        first_row.push(dd[0].clone());
        for j in 1..n {
            let v = correct_partial_isometry(&dd[j], &dd[0], approx.unit(b, 0, j))
                .map_err(|e| e.at_unit(b + 1, 1, j + 1))?;
            first_row.push(v);
        }
        let mut us = Vec::with_capacity(n * n);
        for s in 0..n {
            for t in 0..n {
                us.push(if s == t {
                    dd[s].clone()
                } else if s == 0 {
                    first_row[t].clone()
                } else if t == 0 {
                    first_row[s].adjoint()
                } else {
                    first_row[s].adjoint_mul(&first_row[t])
                });
            }
        }
        units.push(us);
    }
    MatrixUnitSystem::new(approx.blocks().to_vec(), units)
}

/// `max(worst, ‖m‖)`, skipping the spectral norm when `‖m‖_F ≤ worst`.
fn raise(worst: f64, m: &Mat) -> f64 {
    if m.frobenius_norm() <= worst {
        worst
    } else {
        worst.max(op_norm_unchecked(m))
    }
}

fn locate(blocks: &[usize], mut flat: usize) -> (usize, usize) {
    for (b, &n) in blocks.iter().enumerate() {
        if flat < n {
            return (b, flat);
        }
        flat -= n;
    }
    (blocks.len(), 0)
}

/// `Σ k·e_kk + i·Σ_{k≥2} (e_1k + e_k1)` for units of a single block.
pub fn matrix_generator(units: &MatrixUnitSystem) -> Mat {
    let n = units.blocks()[0];
    let mut y = Mat::zeros(units.dim());
    for k in 0..n {
        y += &units.unit(0, k, k).scale_real((k + 1) as f64);
        if k > 0 {
            let sym = units.unit(0, 0, k) + units.unit(0, k, 0);
            y += &sym.scale(C64::new(0.0, 1.0));
        }
    }
    y
}

/// Approximate units read off a near-generator `S` of `M_n`: spectral
/// projections of `Re S` at `1, …, n` and `e_1k ≈ E_1 (Im S) E_k`.
pub fn units_from_generator(s: &Mat, n: usize) -> Result<MatrixUnitSystem> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "block size",
            value: 0.0,
        });
    }
    s.check_finite()?;
    let d = s.dim();
    let e = eigh(&s.hermitian_part());
    let mut diag = alloc::vec![Mat::zeros(d); n];
    for (j, &lambda) in e.values.iter().enumerate() {
        let k = libm::round(lambda);
        if (lambda - k).abs() >= 1.0 / 3.0 || k < 1.0 || k > n as f64 {
            return Err(Error::SpectralGap { eigenvalue: lambda });
        }
        let v = e.vector(j);
        diag[k as usize - 1].add_outer(C64::new(1.0, 0.0), &v, &v);
    }
    let im = s.skew_part();
    let mut units = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            units.push(if a == b {
                diag[a].clone()
            } else if a == 0 {
                diag[0].matmul(&im).matmul(&diag[b])
            } else if b == 0 {
                diag[a].matmul(&im).matmul(&diag[0])
            } else {
                Mat::zeros(d)
            });
        }
    }
    MatrixUnitSystem::new(alloc::vec![n], alloc::vec![units])
}

/// Exact tensor decomposition `A ⊗ M_n` near `(T_1, …, T_m, S)`.
///
/// `S` is corrected to an exact generator through its matrix units, and each
/// `T_k` is replaced by `Σ_j e_j1 T_k e_1j`, which commutes exactly with
/// those units.
pub fn correct_tensor(ts: &[Mat], s: &Mat, n: usize) -> Result<(Vec<Mat>, Mat)> {
    for t in ts {
        s.check_same_dim(t)?;
        t.check_finite()?;
    }
    let units = correct_matrix_units(&units_from_generator(s, n)?)?;
    let hats = ts
        .iter()
        .map(|t| {
            let mut acc = Mat::zeros(s.dim());
            for j in 0..n {
                acc += &units.unit(0, j, 0).matmul(t).matmul(units.unit(0, 0, j));
            }
            acc
        })
        .collect();
    Ok((hats, matrix_generator(&units)))
}
