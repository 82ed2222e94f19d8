use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::ensembles::Stream;
use crate::matcore::{op_norm, BlockAlgebra, ScalarFn};
use crate::C64;

fn shift2() -> Mat {
    Mat::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
}

fn clock_shift(n: usize) -> (Mat, Mat) {
    let w = 2.0 * core::f64::consts::PI / n as f64;
    let u = Mat::diag(&(0..n).map(|k| C64::from_polar(1.0, w * k as f64)).collect::<Vec<_>>());
    let v = Mat::from_fn(n, |i, j| {
        if i == (j + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (u, v)
}

#[test]
fn gram_of_shift() {
    let e = NcExpr::var(1, 0).gram();
    let out = e.eval(&[shift2()]).unwrap();
    assert!((&out - &Mat::diag_real(&[0.0, 1.0])).max_abs() == 0.0);
}

#[test]
fn calculus_node_rounds() {
    let e = NcExpr::var(1, 0)
        .real_part()
        .calculus(ScalarFn::projection_retraction());
    let out = e.eval(&[Mat::diag_real(&[0.05, 0.95])]).unwrap();
    assert!((&out - &Mat::diag_real(&[0.0, 1.0])).max_abs() < 1e-15);
}

#[test]
fn projection_relation_values() {
    let phi = rel_projection();
    assert!(phi.eval(&[Mat::diag_real(&[1.0, 0.0])]).unwrap().max_abs() == 0.0);
    let half = phi.eval(&[Mat::diag_real(&[0.5])]).unwrap();
    assert!((half[(0, 0)].re - 0.0625).abs() < 1e-16);
    // (x − x*)² = −1 and (x − x²)*(x − x²) = x*x = diag(0, 1) for the shift.
    let s = phi.eval(&[shift2()]).unwrap();
    assert!((&s - &Mat::diag_real(&[-1.0, 0.0])).max_abs() < 1e-15);
    assert!((op_norm(&s).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn arity_and_shape_errors() {
    let phi = rel_projection();
    assert!(matches!(
        phi.eval(&[Mat::identity(2), Mat::identity(2)]),
        Err(crate::Error::Arity { .. })
    ));
    let c = rel_commutator();
    assert!(matches!(
        c.eval(&[Mat::identity(2), Mat::identity(3)]),
        Err(crate::Error::Shape { .. })
    ));
    assert!(rel_glue(&phi, &c, 2).is_err());
}

#[test]
fn scalar_defect_report() {
    let r = defect(
        &rel_projection(),
        &[Mat::diag_real(&[0.5])],
        &BlockAlgebra::matrix(1),
        &[2.0],
    )
    .unwrap();
    assert!((r.op() - 0.0625).abs() < 1e-16);
    assert!((r.p_norm(2.0).unwrap() - 0.0625).abs() < 1e-16);
    assert_eq!(r.summands.len(), 2);
}

#[test]
fn clock_shift_commutator_defect() {
    let (u, v) = clock_shift(8);
    let r = defect(&rel_commutator(), &[u, v], &BlockAlgebra::matrix(8), &[2.0]).unwrap();
    let expected = 2.0 * (core::f64::consts::PI / 8.0).sin();
    assert!((r.p_norm(2.0).unwrap() - expected).abs() < 1e-12);
    assert!((expected - 0.7654).abs() < 1e-4);
}

#[test]
fn glue_vanishes_on_exact_partial_isometries() {
    // V₁ = e₁₂ in M₂: V*V = e₂₂, VV* = e₁₁, both projections.
    let phi = rel_projection();
    let g = rel_glue(&phi, &phi, 1).unwrap();
    let r = defect(&g, &[shift2()], &BlockAlgebra::matrix(2), &[]).unwrap();
    assert!(r.is_exact());
    let mut s = Stream::new(7);
    let a = s.ginibre(4).scale_real(0.3);
    let r = defect(&g, &[a], &BlockAlgebra::matrix(4), &[]).unwrap();
    assert!(r.op() > 1e-3);
}

#[test]
fn direct_sum_relation_vanishes_on_central_projection() {
    let phi = rel_projection();
    let ds = rel_direct_sum(&phi, &phi).unwrap();
    assert_eq!(ds.arity(), 3);
    let x = Mat::diag_real(&[1.0, 0.0, 0.0, 0.0]);
    let y = Mat::diag_real(&[0.0, 0.0, 0.0, 1.0]);
    let p = Mat::diag_real(&[1.0, 1.0, 0.0, 0.0]);
    let (total, parts) = ds.eval_with_summands(&[x, y, p]).unwrap();
    assert_eq!(parts.len(), 7);
    assert!(total.max_abs() < 1e-15);
}

#[test]
fn direct_sum_defect_linear_in_perturbation() {
    let phi = rel_projection();
    let ds = rel_direct_sum(&phi, &phi).unwrap();
    let x = Mat::diag_real(&[1.0, 0.0, 0.0, 0.0]);
    let y = Mat::diag_real(&[0.0, 0.0, 0.0, 1.0]);
    let p = Mat::diag_real(&[1.0, 1.0, 0.0, 0.0]);
    let mut s = Stream::new(11);
    let h = s.hermitian(4);
    let at = |eps: f64| {
        let pe = &p + &h.scale_real(eps);
        op_norm(&ds.eval(&[x.clone(), y.clone(), pe]).unwrap()).unwrap()
    };
    let ratio = at(2e-4) / at(1e-4);
    // Quadratic summands make the defect O(ε²); the square root is O(ε).
    assert!(at(1e-4).sqrt() < 10.0 * 1e-4 * op_norm(&h).unwrap());
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
}

fn generator(n: usize) -> Mat {
    Mat::from_fn(n, |i, j| {
        if i == j {
            C64::new((i + 1) as f64, 0.0)
        } else if (i == 0) != (j == 0) {
            C64::new(0.0, 1.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[test]
fn matrix_generator_relation() {
    for n in 1..=4 {
        let rho = rel_matrix_generator(n).unwrap();
        let y = generator(n).kron(&Mat::identity(2));
        let out = rho.eval(&[y.clone()]).unwrap();
        assert!(out.max_abs() < 1e-9, "n = {n}: {}", out.max_abs());
        let bent = &y + &Mat::diag_real(&vec![0.1; 2 * n]);
        assert!(rho.eval(&[bent]).unwrap().max_abs() > 1e-3);
    }
}

#[test]
fn tensor_relation_on_exact_tensor() {
    let phi = rel_projection();
    let rho = rel_matrix_generator(2).unwrap();
    let t = rel_tensor(&phi, &rho).unwrap();
    let x = Mat::diag_real(&[1.0, 0.0, 0.0]).kron(&Mat::identity(2));
    let y = Mat::identity(3).kron(&generator(2));
    assert!(t.eval(&[x.clone(), y.clone()]).unwrap().max_abs() < 1e-9);
    let bad = Mat::from_real(3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0])
        .unwrap()
        .kron(&Mat::diag_real(&[1.0, 0.0]));
    assert!(t.eval(&[bad, y]).unwrap().max_abs() > 1e-2);
}

#[test]
fn compose_shares_substitutes() {
    let x = NcExpr::var(1, 0);
    let sq = x.mul(&x);
    let sub = NcExpr::var(1, 0).gram();
    let c = sq.compose(&[sub]).unwrap();
    let a = shift2();
    let want = a.adjoint_mul(&a).matmul(&a.adjoint_mul(&a));
    assert!((&c.eval(&[a]).unwrap() - &want).max_abs() == 0.0);
    // Two leaf nodes of the substitute (var, adjoint, product) plus one product.
    assert_eq!(c.nodes().len(), 4);
}

#[test]
fn from_parts_rejects_forward_references() {
    assert!(NcExpr::from_parts(1, vec![Node::Adjoint(1), Node::Var(0)], 0).is_err());
    assert!(NcExpr::from_parts(1, vec![Node::Var(1)], 0).is_err());
    assert!(NcExpr::from_parts(1, vec![Node::Var(0)], 3).is_err());
}

#[test]
fn chebyshev_approximants_converge() {
    let e = NcExpr::var(1, 0)
        .real_part()
        .calculus(ScalarFn::projection_retraction());
    let mut s = Stream::new(3);
    let samples: Vec<Mat> = (0..6)
        .map(|_| {
            let h = s.hermitian(5);
            let n = op_norm(&h).unwrap();
            h.scale_real(0.9 / n)
        })
        .collect();
    let mut last = f64::INFINITY;
    for k in [4, 16, 64, 256] {
        let poly = e.polynomial_approximant(k, -1.0, 1.0).unwrap();
        assert!(poly
            .nodes()
            .iter()
            .all(|n| !matches!(n, Node::Calculus(..))));
        let err = samples
            .iter()
            .map(|a| {
                let diff = &poly.eval(&[a.clone()]).unwrap() - &e.eval(&[a.clone()]).unwrap();
                op_norm(&diff).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(err < last, "degree {k}: {err} ≥ {last}");
        last = err;
    }
    assert!(last < 0.05);
}
