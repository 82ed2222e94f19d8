use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{
    correct_matrix_units, correct_projection, correct_resolution, correct_two_projections,
    rel_two_projections, MatrixUnitSystem,
};
use crate::matcore::{herm_calculus, Mat, ScalarFn};
use crate::ncfun::{rel_projection, NcExpr};
use crate::{Error, Result};

type Corrector = dyn Fn(&[Mat]) -> Result<Vec<Mat>> + Send + Sync;

/// A relation together with a corrector that maps approximate solutions
/// (relation defect below `delta`) to exact ones.
#[derive(Clone)]
pub struct CorrectorFamily {
    name: String,
    relation: NcExpr,
    corrector: Arc<Corrector>,
    fixed_point: bool,
    delta: f64,
}

impl fmt::Debug for CorrectorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorrectorFamily")
            .field("name", &self.name)
            .field("arity", &self.relation.arity())
            .field("fixed_point", &self.fixed_point)
            .field("delta", &self.delta)
            .finish()
    }
}

impl CorrectorFamily {
    pub fn new(
        name: &str,
        relation: NcExpr,
        fixed_point: bool,
        delta: f64,
        corrector: impl Fn(&[Mat]) -> Result<Vec<Mat>> + Send + Sync + 'static,
    ) -> CorrectorFamily {
        CorrectorFamily {
            name: String::from(name),
            relation,
            corrector: Arc::new(corrector),
            fixed_point,
            delta,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn relation(&self) -> &NcExpr {
        &self.relation
    }

    pub fn arity(&self) -> usize {
        self.relation.arity()
    }

    pub fn fixed_point(&self) -> bool {
        self.fixed_point
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn apply(&self, args: &[Mat]) -> Result<Vec<Mat>> {
        if args.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                found: args.len(),
            });
        }
        (self.corrector)(args)
    }

    /// Leaves every argument as it is; the relation is identically zero.
    pub fn identity(arity: usize) -> CorrectorFamily {
        CorrectorFamily::new(
            "identity",
            NcExpr::zero(arity).with_name("none"),
            true,
            f64::INFINITY,
            |args| Ok(args.to_vec()),
        )
    }

    /// One projection, corrected by the spectral retraction.
    pub fn projection() -> CorrectorFamily {
        CorrectorFamily::new("projection", rel_projection(), true, 1.0 / 9.0, |args| {
            Ok(vec![correct_projection(&args[0])?])
        })
    }

    /// `k` pairwise orthogonal projections summing to 1.
    pub fn resolution(k: usize) -> CorrectorFamily {
        CorrectorFamily::new("resolution", rel_resolution(k, true), true, 0.05, |args| {
            correct_resolution(args)
        })
    }

    /// `k` pairwise orthogonal projections, not necessarily summing to 1.
    /// Corrected as a resolution together with the complement of their sum.
    pub fn orthogonal_projections(k: usize) -> CorrectorFamily {
        CorrectorFamily::new(
            "orthogonal_projections",
            rel_resolution(k, false),
            true,
            0.05,
            move |args| {
                let d = args[0].dim();
                let mut all = args.to_vec();
                let mut rest = Mat::identity(d);
                for a in args {
                    rest -= &a.hermitian_part();
                }
                all.push(rest);
                let mut out = correct_resolution(&all)?;
                out.truncate(k);
                Ok(out)
            },
        )
    }

    /// Two projections with angle operator spectrum in `{0, c}`.
    pub fn two_projections(c: f64) -> CorrectorFamily {
        CorrectorFamily::new("two_projections", rel_two_projections(c), true, 0.05, move |args| {
            let (p1, p2) = correct_two_projections(&args[0], &args[1], c)?;
            Ok(vec![p1, p2])
        })
    }

    /// Triple `(P₁, P₂, P₃)` generating `M₂`: `P₁ = e₁₁`,
    /// `P₂ = ½[[1, 1], [1, 1]]` and `P₃` the unit of the copy, which is the
    /// support of `P₁ + P₂`.
    pub fn m2_triple() -> CorrectorFamily {
        let support = ScalarFn::ramp(0.05, 0.1);
        let rel = {
            let pair = rel_two_projections(0.5);
            let p1 = NcExpr::var(3, 0);
            let p2 = NcExpr::var(3, 1);
            let p3 = NcExpr::var(3, 2);
            let unit = p3.sub(&p1.add(&p2).real_part().calculus(support.clone()));
            NcExpr::sum(
                3,
                &[
                    pair.relabel(3, &[0, 1]).expect("arity 2"),
                    rel_projection().relabel(3, &[2]).expect("arity 1"),
                    unit.gram(),
                ],
            )
            .with_name("m2_triple")
        };
        CorrectorFamily::new("m2_triple", rel, true, 0.02, move |args| {
            let (p1, p2) = correct_two_projections(&args[0], &args[1], 0.5)?;
            let p3 = herm_calculus(&(&p1 + &p2), &support)?;
            let p3 = correct_projection(&p3).map_err(|e| e.at_index(3))?;
            Ok(vec![p1, p2, p3])
        })
    }

    /// Triple `(Q₁, Q₂, Q₃)` generating `M₃`: `Q₁ = e₁₁`, `Q₂ = e₂₂` and
    /// `Q₃` the projection onto `(1, 1, 1)/√3`.
    ///
    /// With `R` the support of `Q₁ + Q₂ + Q₃`, the approximate units are
    /// `e₁₁ = Q₁`, `e₂₂ = Q₂`, `e₃₃ = R − Q₁ − Q₂`, `e₁ⱼ ≈ 3·Q₁Q₃eⱼⱼ`,
    /// plus `1 − R` as a one-unit block. After correction `Q₃ = ⅓ Σ e_st`.
    pub fn m3_triple() -> CorrectorFamily {
        let support = ScalarFn::ramp(0.05, 0.1);
        let rel = {
            let q: Vec<NcExpr> = (0..3).map(|j| NcExpr::var(3, j)).collect();
            let third = 1.0 / 3.0;
            let compress = |a: &NcExpr, b: &NcExpr| {
                NcExpr::product(&[a.clone(), b.clone(), a.clone()])
                    .sub(&a.clone().scale_real(third))
                    .gram()
            };
            let r = NcExpr::sum(3, &q).real_part().calculus(support.clone());
            let e33 = r.sub(&q[0]).sub(&q[1]);
            let proj = rel_projection();
            NcExpr::sum(
                3,
                &[
                    proj.relabel(3, &[0]).expect("arity 1"),
                    proj.relabel(3, &[1]).expect("arity 1"),
                    proj.relabel(3, &[2]).expect("arity 1"),
                    q[0].mul(&q[1]).gram(),
                    compress(&q[0], &q[2]),
                    compress(&q[1], &q[2]),
                    compress(&q[2], &q[0]),
                    compress(&q[2], &q[1]),
                    compress(&q[2], &e33),
                ],
            )
            .with_name("m3_triple")
        };
        CorrectorFamily::new("m3_triple", rel, true, 0.02, move |args| {
            let d = args[0].dim();
            let q: Vec<Mat> = args
                .iter()
                .enumerate()
                .map(|(j, a)| correct_projection(a).map_err(|e| e.at_index(j + 1)))
                .collect::<Result<_>>()?;
            let r = herm_calculus(&(&(&q[0] + &q[1]) + &q[2]), &support)?;
            let r = correct_projection(&r)?;
            let e33 = &(&r - &q[0]) - &q[1];
            let diag = [q[0].clone(), q[1].clone(), e33];
            let mut units = Vec::with_capacity(9);
            for s in 0..3 {
                for t in 0..3 {
                    units.push(if s == t {
                        diag[s].clone()
                    } else {
                        diag[s].matmul(&q[2]).matmul(&diag[t]).scale_real(3.0)
                    });
                }
            }
            let rest = &Mat::identity(d) - &r;
            let approx = MatrixUnitSystem::new(vec![3, 1], vec![units, vec![rest]])?;
            let exact = correct_matrix_units(&approx)?;
            let mut q3 = Mat::zeros(d);
            for u in &exact.units()[0] {
                q3 += u;
            }
            Ok(vec![
                exact.unit(0, 0, 0).clone(),
                exact.unit(0, 1, 1).clone(),
                q3.scale_real(1.0 / 3.0),
            ])
        })
    }
}

/// Projections `x_j` that are pairwise orthogonal and, when `unital`, sum to 1.
pub fn rel_resolution(k: usize, unital: bool) -> NcExpr {
    let proj = rel_projection();
    let mut terms: Vec<NcExpr> = (0..k)
        .map(|j| proj.relabel(k, &[j]).expect("arity 1"))
        .collect();
    for i in 0..k {
        for j in i + 1..k {
            terms.push(NcExpr::var(k, i).mul(&NcExpr::var(k, j)).gram());
        }
    }
    if unital {
        let xs: Vec<NcExpr> = (0..k).map(|j| NcExpr::var(k, j)).collect();
        terms.push(NcExpr::sum(k, &xs).sub(&NcExpr::unit(k)).gram());
    }
    NcExpr::sum(k, &terms).with_name(if unital { "resolution" } else { "orthogonal_projections" })
}
