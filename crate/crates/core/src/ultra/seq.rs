use alloc::format;
use alloc::vec::Vec;

use crate::matcore::{op_norm, BlockAlgebra, Mat};
use crate::num;
use crate::{Error, Result};

/// A finite stretch `(a_1, …, a_N)` of a bounded representative sequence,
/// each term living in its own tracial algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSequence {
    algebras: Vec<BlockAlgebra>,
    reps: Vec<Mat>,
    bound: f64,
}

impl RepSequence {
    pub fn new(algebras: Vec<BlockAlgebra>, reps: Vec<Mat>, bound: f64) -> Result<RepSequence> {
        if algebras.len() != reps.len() {
            return Err(Error::Shape {
                expected: algebras.len(),
                found: reps.len(),
            });
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::InvalidParameter {
                name: "bound",
                value: bound,
            });
        }
        for (i, (alg, a)) in algebras.iter().zip(&reps).enumerate() {
            let check = || -> Result<()> {
                a.check_finite()?;
                alg.check_compatible(a)?;
                let n = op_norm(a)?;
                if n > bound * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "norm {n:.6} exceeds the bound {bound}"
                    )));
                }
                Ok(())
            };
            check().map_err(|e| e.at_index(i + 1))?;
        }
        Ok(RepSequence {
            algebras,
            reps,
            bound,
        })
    }

    /// Each term in the full matrix algebra of its own dimension.
    pub fn over_matrices(reps: Vec<Mat>, bound: f64) -> Result<RepSequence> {
        let algebras = reps.iter().map(|a| BlockAlgebra::matrix(a.dim())).collect();
        RepSequence::new(algebras, reps, bound)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn algebras(&self) -> &[BlockAlgebra] {
        &self.algebras
    }

    pub fn reps(&self) -> &[Mat] {
        &self.reps
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn into_reps(self) -> Vec<Mat> {
        self.reps
    }

    pub(crate) fn check_aligned(&self, other: &RepSequence) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: other.len(),
            });
        }
        for (i, (a, b)) in self.algebras.iter().zip(&other.algebras).enumerate() {
            if a != b {
                return Err(Error::InvalidInput(format!(
                    "algebras differ at index {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Nested index sets `E_1 ⊇ E_2 ⊇ …` with `E_1` everything, standing in for
/// a decreasing sequence of ultrafilter members. Indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFilter {
    sets: Vec<Vec<usize>>,
}

impl TailFilter {
    pub fn new(len: usize, mut sets: Vec<Vec<usize>>) -> Result<TailFilter> {
        for s in sets.iter_mut() {
            s.sort_unstable();
            s.dedup();
            if let Some(&i) = s.last() {
                if i >= len {
                    return Err(Error::InvalidInput(format!(
                        "index {} outside 1..={len}",
                        i + 1
                    )));
                }
            }
        }
        match sets.first() {
            Some(first) if first.len() == len => {}
            _ => {
                return Err(Error::InvalidInput(
                    "the first set must contain every index".into(),
                ))
            }
        }
        for (n, w) in sets.windows(2).enumerate() {
            if !w[1].iter().all(|i| w[0].binary_search(i).is_ok()) {
                return Err(Error::InvalidInput(format!(
                    "set {} is not contained in set {}",
                    n + 2,
                    n + 1
                )));
            }
        }
        Ok(TailFilter { sets })
    }

    /// `E_n = {i : i ≥ n − 1}` for `n = 1, …, levels`.
    pub fn tails(len: usize, levels: usize) -> TailFilter {
        TailFilter {
            sets: (0..levels).map(|n| (n.min(len)..len).collect()).collect(),
        }
    }

    pub fn levels(&self) -> usize {
        self.sets.len()
    }

    /// `E_n`, one-based level.
    pub fn set(&self, n: usize) -> &[usize] {
        &self.sets[n - 1]
    }

    fn contains(&self, n: usize, i: usize) -> bool {
        self.sets[n - 1].binary_search(&i).is_ok()
    }
}

/// Per-index `p`-norms with the value at the last index as the limit estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProfile {
    pub profile: Vec<f64>,
    pub estimate: f64,
}

impl TailProfile {
    /// Membership in the trace ideal at tolerance `theta`.
    pub fn in_ideal(&self, theta: f64) -> bool {
        self.estimate < theta
    }
}

pub fn tail_p_norm(x: &RepSequence, p: f64) -> Result<TailProfile> {
    let profile = x
        .algebras
        .iter()
        .zip(&x.reps)
        .map(|(alg, a)| alg.p_norm(a, p))
        .collect::<Result<Vec<f64>>>()?;
    let estimate = profile.last().copied().unwrap_or(0.0);
    Ok(TailProfile { profile, estimate })
}

fn pow4(n: usize) -> f64 {
    num::pow(4.0, -(n as f64))
}

/// Diagonal sequence `X_i = A_{k(i), i}` through a 2-norm Cauchy array of rows
/// `A_1, A_2, …`, where `k(i)` is the deepest level `n` with `i ∈ F_n` and
///
/// `F_n = {i ∈ E_n : ‖A_{ki} − A_{ni}‖₂ < 4^{-n} + 4^{-k} for all k ≤ n}`.
///
/// Then `‖A_{ni} − X_i‖₂ ≤ 2·4^{-n}` for every `i ∈ F_n`.
pub fn diagonal_completion(rows: &[RepSequence], filter: &TailFilter) -> Result<RepSequence> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidInput("no rows".into()));
    };
    for r in rows {
        first.check_aligned(r)?;
    }
    if filter.levels() < rows.len() {
        return Err(Error::Shape {
            expected: rows.len(),
            found: filter.levels(),
        });
    }
    if filter.set(1).len() != first.len() {
        return Err(Error::Shape {
            expected: first.len(),
            found: filter.set(1).len(),
        });
    }
    let dist = |n: usize, m: usize, i: usize| -> f64 {
        let alg = &first.algebras[i];
        alg.two_norm(&(&rows[n - 1].reps[i] - &rows[m - 1].reps[i]))
    };
    let levels = rows.len();
    for m in 2..=levels {
        for &i in filter.set(m) {
            for n in 1..m {
                let d = dist(n, m, i);
                let bound = pow4(n) + pow4(m);
                if d > bound * (1.0 + 1e-12) {
                    return Err(Error::NonCauchy {
                        n,
                        m,
                        index: i + 1,
                        distance: d,
                        bound,
                    });
                }
            }
        }
    }
    let in_f = |n: usize, i: usize| -> bool {
        filter.contains(n, i) && (1..n).all(|k| dist(k, n, i) < pow4(n) + pow4(k))
    };
    let mut reps = Vec::with_capacity(first.len());
    for i in 0..first.len() {
        let memberships: Vec<bool> = (1..=levels).map(|n| in_f(n, i)).collect();
        let k = memberships.iter().rposition(|&b| b).map_or(1, |p| p + 1);
        let x = rows[k - 1].reps[i].clone();
        for (n, _) in memberships.iter().enumerate().filter(|(_, &b)| b) {
            let n = n + 1;
            debug_assert!(
                first.algebras[i].two_norm(&(&rows[n - 1].reps[i] - &x)) <= 2.0 * pow4(n),
                "completion bound at level {n}, index {}",
                i + 1
            );
        }
        reps.push(x);
    }
    let bound = rows.iter().map(|r| r.bound).fold(0.0, f64::max);
    Ok(RepSequence {
        algebras: first.algebras.clone(),
        reps,
        bound,
    })
}
