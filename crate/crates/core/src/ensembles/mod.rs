//! Seeded random instances of approximate solutions with a calibrated defect.

mod rng;

pub use rng::{derive_seed, splitmix64, Stream};

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::matcore::{op_norm, BlockAlgebra, Mat};
use crate::ncfun::{defect, DefectReport, NcExpr};
use crate::num;
use crate::{Error, Result, C64};

/// Largest defect target accepted for perturbative kinds.
pub const MAX_DELTA: f64 = 0.2;

const MAX_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    NearProjection,
    NearUnitary,
    NearPartialIsometry,
    NearMatrixUnits,
    AlmostCommutingPair,
    ClockShift,
    HaarUnitary,
    NearResolution,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::NearProjection,
        Kind::NearUnitary,
        Kind::NearPartialIsometry,
        Kind::NearMatrixUnits,
        Kind::AlmostCommutingPair,
        Kind::ClockShift,
        Kind::HaarUnitary,
        Kind::NearResolution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::NearProjection => "near_projection",
            Kind::NearUnitary => "near_unitary",
            Kind::NearPartialIsometry => "near_partial_isometry",
            Kind::NearMatrixUnits => "near_matrix_units",
            Kind::AlmostCommutingPair => "almost_commuting_pair",
            Kind::ClockShift => "clock_shift",
            Kind::HaarUnitary => "haar_unitary",
            Kind::NearResolution => "near_resolution",
        }
    }

    /// Whether the defect is set by `delta` rather than by the dimension.
    pub fn is_perturbative(self) -> bool {
        !matches!(self, Kind::ClockShift | Kind::HaarUnitary)
    }

    /// Number of matrices in a generated tuple.
    pub fn arity(self) -> usize {
        match self {
            Kind::NearProjection | Kind::NearUnitary | Kind::HaarUnitary => 1,
            Kind::AlmostCommutingPair | Kind::ClockShift => 2,
            Kind::NearPartialIsometry | Kind::NearResolution => 3,
            Kind::NearMatrixUnits => 4,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidInput(format!("unknown ensemble '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub kind: Kind,
    pub dim: usize,
    pub delta: f64,
    pub seed: u64,
}

/// A generated tuple with its measured defect.
///
/// `report` evaluates [`relation`], a sum of terms `r_k* r_k`; `defect_op`
/// and `defect_2` are `max_k ‖r_k‖` in the operator and 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub spec: EnsembleSpec,
    pub inputs: Vec<Mat>,
    pub report: DefectReport,
    pub defect_op: f64,
    pub defect_2: f64,
}

fn residual_sum(name: &str, arity: usize, residuals: &[NcExpr]) -> NcExpr {
    let terms: Vec<NcExpr> = residuals.iter().map(|r| r.clone().gram()).collect();
    NcExpr::sum(arity, &terms).with_name(name)
}

fn unitary_residuals(x: &NcExpr, one: &NcExpr) -> [NcExpr; 2] {
    [
        x.clone().adjoint().mul(x).sub(one),
        x.mul(&x.clone().adjoint()).sub(one),
    ]
}

/// The relation whose residuals a generated tuple of `kind` nearly satisfies.
pub fn relation(kind: Kind) -> NcExpr {
    let n = kind.arity();
    let x = |j: usize| NcExpr::var(n, j);
    let one = NcExpr::unit(n);
    match kind {
        Kind::NearProjection => {
            let a = x(0);
            residual_sum(
                kind.name(),
                n,
                &[a.sub(&a.clone().adjoint()), a.sub(&a.clone().square())],
            )
        }
        Kind::NearUnitary | Kind::HaarUnitary => {
            residual_sum(kind.name(), n, &unitary_residuals(&x(0), &one))
        }
        Kind::NearPartialIsometry => {
            let (p, q, a) = (x(0), x(1), x(2));
            residual_sum(
                kind.name(),
                n,
                &[
                    a.clone().adjoint().mul(&a).sub(&p),
                    a.mul(&a.clone().adjoint()).sub(&q),
                ],
            )
        }
        Kind::NearMatrixUnits => {
            let e = |s: usize, t: usize| x(2 * s + t);
            let mut rs = Vec::new();
            for s in 0..2 {
                for t in 0..2 {
                    rs.push(e(s, t).adjoint().sub(&e(t, s)));
                    for u in 0..2 {
                        for v in 0..2 {
                            let prod = e(s, t).mul(&e(u, v));
                            rs.push(if t == u { prod.sub(&e(s, v)) } else { prod });
                        }
                    }
                }
            }
            rs.push(e(0, 0).add(&e(1, 1)).sub(&one));
            residual_sum(kind.name(), n, &rs)
        }
        Kind::AlmostCommutingPair | Kind::ClockShift => {
            let (a, b) = (x(0), x(1));
            let mut rs = alloc::vec![a.mul(&b).sub(&b.mul(&a))];
            if kind == Kind::AlmostCommutingPair {
                for m in [a, b] {
                    let adj = m.clone().adjoint();
                    rs.push(adj.mul(&m).sub(&m.mul(&adj)));
                }
            }
            residual_sum(kind.name(), n, &rs)
        }
        Kind::NearResolution => {
            let mut rs = Vec::new();
            for j in 0..n {
                let a = x(j);
                rs.push(a.sub(&a.clone().adjoint()));
                rs.push(a.sub(&a.clone().square()));
            }
            let total = NcExpr::sum(n, &(0..n).map(x).collect::<Vec<_>>());
            rs.push(total.sub(&one));
            residual_sum(kind.name(), n, &rs)
        }
    }
}

/// Report for `inputs` against the relation of `kind`, with `max_k ‖r_k‖`
/// in the operator and 2-norm.
pub fn measure(kind: Kind, inputs: &[Mat]) -> Result<(DefectReport, f64, f64)> {
    let dim = inputs.first().map_or(0, |m| m.dim());
    let report = defect(&relation(kind), inputs, &BlockAlgebra::matrix(dim.max(1)), &[1.0])?;
    let op = report
        .summands
        .iter()
        .map(|t| num::sqrt(t.op))
        .fold(0.0, f64::max);
    let two = report
        .summands
        .iter()
        .filter_map(|t| t.p_norms.first().map(|&(_, v)| num::sqrt(v)))
        .fold(0.0, f64::max);
    Ok((report, op, two))
}

fn unit_direction(m: Mat) -> Mat {
    let n = op_norm(&m).unwrap_or(0.0);
    if n > 0.0 {
        m.scale_real(1.0 / n)
    } else {
        m
    }
}

fn clock_shift(n: usize) -> [Mat; 2] {
    let w = 2.0 * core::f64::consts::PI / n as f64;
    let u = Mat::diag(&(0..n).map(|k| num::cis(w * k as f64)).collect::<Vec<_>>());
    let v = Mat::from_fn(n, |i, j| {
        if i == (j + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    [u, v]
}

fn random_normal_diag(s: &mut Stream, n: usize) -> Mat {
    Mat::diag(
        &(0..n)
            .map(|_| {
                let r = num::sqrt(s.uniform()) * 0.9;
                C64::from_polar(r, 2.0 * core::f64::consts::PI * s.uniform())
            })
            .collect::<Vec<_>>(),
    )
}

/// Exact solution and perturbation direction of a perturbative kind.
fn base_and_direction(kind: Kind, dim: usize, s: &mut Stream) -> (Vec<Mat>, Vec<Mat>) {
    let zero = Mat::zeros(dim);
    match kind {
        Kind::NearProjection => {
            let rank = 1 + s.below(dim - 1);
            let p = s.projection(dim, rank);
            (alloc::vec![p], alloc::vec![unit_direction(s.hermitian(dim))])
        }
        Kind::NearUnitary => {
            let u = s.haar_unitary(dim);
            let h = unit_direction(s.hermitian(dim));
            let dir = u.matmul(&h);
            (alloc::vec![u], alloc::vec![dir])
        }
        Kind::NearPartialIsometry => {
            let rank = 1 + s.below(dim - 1);
            let p = s.projection(dim, rank);
            let u = s.haar_unitary(dim);
            let v = u.matmul(&p);
            let q = v.matmul(&v.adjoint()).hermitian_part();
            let mut dir = unit_direction(q.matmul(&s.ginibre(dim)).matmul(&p));
            // An inward direction makes the defect rise, vanish and rise again.
            if v.adjoint_mul(&dir).trace().re < 0.0 {
                dir = dir.scale_real(-1.0);
            }
            (
                alloc::vec![p, q, v],
                alloc::vec![zero.clone(), zero, dir],
            )
        }
        Kind::NearMatrixUnits => {
            let u = s.haar_unitary(dim);
            let std = crate::correct::MatrixUnitSystem::standard(&[2], dim / 2);
            let units: Vec<Mat> = std.units()[0].iter().map(|e| e.conjugate_by(&u)).collect();
            let dirs = (0..4).map(|_| unit_direction(s.ginibre(dim))).collect();
            (units, dirs)
        }
        Kind::AlmostCommutingPair => {
            let w = s.haar_unitary(dim);
            let a = random_normal_diag(s, dim).conjugate_by(&w);
            let b = random_normal_diag(s, dim).conjugate_by(&w);
            let dirs = alloc::vec![unit_direction(s.ginibre(dim)), unit_direction(s.ginibre(dim))];
            (alloc::vec![a, b], dirs)
        }
        Kind::NearResolution => {
            let u = s.haar_unitary(dim);
            let first = 1 + s.below(dim - 1);
            let second = if dim - first > 1 { s.below(dim - first) } else { 0 };
            let bounds = [0, first, first + second, dim];
            let ps = (0..3)
                .map(|j| {
                    let cols: Vec<Vec<C64>> = (bounds[j]..bounds[j + 1]).map(|c| u.column(c)).collect();
                    Mat::projector_onto(dim, &cols)
                })
                .collect();
            let dirs = (0..3).map(|_| unit_direction(s.hermitian(dim))).collect();
            (ps, dirs)
        }
        Kind::ClockShift | Kind::HaarUnitary => unreachable!("not perturbative"),
    }
}

fn perturb(base: &[Mat], dirs: &[Mat], scale: f64) -> Vec<Mat> {
    base.iter()
        .zip(dirs)
        .map(|(b, d)| b + &d.scale_real(scale))
        .collect()
}

fn check_spec(spec: &EnsembleSpec) -> Result<()> {
    if spec.dim < 2 {
        return Err(Error::InvalidParameter {
            name: "dim",
            value: spec.dim as f64,
        });
    }
    if spec.kind == Kind::NearMatrixUnits && spec.dim % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "near_matrix_units needs an even dimension, got {}",
            spec.dim
        )));
    }
    if spec.kind.is_perturbative() && !(0.0..=MAX_DELTA).contains(&spec.delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: spec.delta,
        });
    }
    Ok(())
}

/// Draws an instance of `spec`, deterministic in the seed.
///
/// Perturbative kinds add `s·D` to an exact solution along a random
/// direction `D`. The scale `s` follows secant steps in log-log coordinates,
/// bisecting once `δ` is bracketed, until the measured operator-norm defect
/// lies within 5% of `δ`; after 20 attempts any value in `[δ/2, 2δ]` is
/// accepted and anything else is a calibration error.
pub fn generate(spec: &EnsembleSpec) -> Result<Instance> {
    check_spec(spec)?;
    let mut s = Stream::new(spec.seed);
    let dim = spec.dim;
    let finish = |inputs: Vec<Mat>| -> Result<Instance> {
        let (report, defect_op, defect_2) = measure(spec.kind, &inputs)?;
        Ok(Instance {
            spec: *spec,
            inputs,
            report,
            defect_op,
            defect_2,
        })
    };
    match spec.kind {
        Kind::ClockShift => return finish(clock_shift(dim).to_vec()),
        Kind::HaarUnitary => return finish(alloc::vec![s.haar_unitary(dim)]),
        _ => {}
    }
    let (base, dirs) = base_and_direction(spec.kind, dim, &mut s);
    let delta = spec.delta;
    if delta == 0.0 {
        return finish(base);
    }
    let mut scale = delta;
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let inputs = perturb(&base, &dirs, scale);
        let (_, measured, _) = measure(spec.kind, &inputs)?;
        if num::abs(measured - delta) <= 0.05 * delta {
            return finish(inputs);
        }
        last = Some((inputs, measured));
        if !(measured > 0.0) || !measured.is_finite() {
            break;
        }
        let point = (num::ln(scale), num::ln(measured));
        if measured < delta {
            lo = Some(point);
        } else {
            hi = Some(point);
        }
        let slope = match prev {
            Some((ls, lm)) if num::abs(point.0 - ls) > 1e-12 => {
                ((point.1 - lm) / (point.0 - ls)).clamp(0.5, 3.0)
            }
            _ => 1.0,
        };
        prev = Some(point);
        let mut next = point.0 + (num::ln(delta) - point.1) / slope;
        if let (Some(l), Some(h)) = (lo, hi) {
            let (a, b) = if l.0 < h.0 { (l.0, h.0) } else { (h.0, l.0) };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
        }
        scale = num::exp(next);
    }
    match last {
        Some((inputs, m)) if m >= 0.5 * delta && m <= 2.0 * delta => finish(inputs),
        Some((_, m)) => Err(Error::Calibration {
            target: delta,
            measured: m,
        }),
        None => Err(Error::Calibration {
            target: delta,
            measured: 0.0,
        }),
    }
}

/// Mean of `|τ(U^k)|` for `k = 1, …, kmax` over `samples` Haar unitaries.
pub fn haar_moments(dim: usize, kmax: usize, samples: usize, seed: u64) -> Vec<f64> {
    let mut acc = alloc::vec![0.0; kmax];
    for j in 0..samples {
        let mut s = Stream::new(derive_seed(&[seed, j as u64]));
        let u = s.haar_unitary(dim);
        let mut pow = Mat::identity(dim);
        for slot in acc.iter_mut() {
            pow = pow.matmul(&u);
            *slot += num::cabs(pow.trace()) / dim as f64;
        }
    }
    acc.iter().map(|a| a / samples.max(1) as f64).collect()
}
