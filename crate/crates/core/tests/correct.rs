use liftkit_core::correct::*;
use liftkit_core::ensembles::Stream;
use liftkit_core::matcore::{op_norm, projection_defect, BlockAlgebra};
use liftkit_core::ncfun::{defect, rel_glue};
use liftkit_core::{exact_tol, Error, Mat, C64};

fn dist(a: &Mat, b: &Mat) -> f64 {
    op_norm(&(a - b)).unwrap()
}

fn dist2(a: &Mat, b: &Mat) -> f64 {
    BlockAlgebra::matrix(a.dim()).two_norm(&(a - b))
}

fn noise(s: &mut Stream, d: usize) -> Mat {
    let g = s.ginibre(d);
    let n = op_norm(&g).unwrap();
    g.scale_real(1.0 / n)
}

fn herm_unit(s: &mut Stream, d: usize) -> Mat {
    let h = s.hermitian(d);
    let n = op_norm(&h).unwrap();
    h.scale_real(1.0 / n)
}

#[test]
fn projection_fixed_point_and_rounding() {
    let p = Mat::diag_real(&[1.0, 0.0]);
    assert_eq!(correct_projection(&p).unwrap(), p);
    let a = Mat::diag_real(&[0.95, 0.05]);
    let out = correct_projection(&a).unwrap();
    assert!(dist(&out, &p) < 1e-15);
    assert!((dist(&a, &out) - 0.05).abs() < 1e-15);
    assert!(0.05 < (0.0475f64).sqrt());
}

#[test]
fn projection_of_perturbed_random_projection() {
    let mut s = Stream::new(1);
    for rank in [1, 5, 11] {
        let p = s.projection(16, rank);
        let a = &p + &herm_unit(&mut s, 16).scale_real(0.01);
        let out = correct_projection(&a).unwrap();
        assert!(projection_defect(&out) <= exact_tol(16));
        assert!(dist2(&out, &p) <= 0.05);
    }
}

#[test]
fn projection_gap_error_names_eigenvalue() {
    let a = Mat::diag_real(&[0.5, 1.0]);
    assert_eq!(
        correct_projection(&a),
        Err(Error::SpectralGap { eigenvalue: 0.5 })
    );
}

#[test]
fn unitary_examples() {
    let mut s = Stream::new(2);
    let u = s.haar_unitary(6);
    assert_eq!(correct_unitary(&u).unwrap(), u);
    let a = Mat::diag_real(&[0.9, 1.1]);
    let out = correct_unitary(&a).unwrap();
    assert!(dist(&out, &Mat::identity(2)) < 1e-14);
    assert!((dist(&a, &out) - 0.1).abs() < 1e-14);
    for _ in 0..5 {
        let u0 = s.haar_unitary(8);
        let a = u0.matmul(&(&Mat::identity(8) + &herm_unit(&mut s, 8).scale_real(0.05)));
        let v = correct_unitary(&a).unwrap();
        assert!(unitary_defect(&v) <= exact_tol(8));
        assert!(dist2(&v, &a) <= 0.06);
    }
    assert!(matches!(
        correct_unitary(&Mat::diag_real(&[1.0, 0.0])),
        Err(Error::RankDeficient { .. })
    ));
}

#[test]
fn partial_isometry_examples() {
    let one = Mat::identity(1);
    let v = correct_partial_isometry(&one, &one, &Mat::diag_real(&[0.9])).unwrap();
    assert!((v[(0, 0)].re - 1.0).abs() < 1e-15);

    let e = correct_partial_isometry(
        &Mat::diag_real(&[1.0, 0.0]),
        &Mat::identity(2),
        &Mat::diag_real(&[0.95, 0.0]),
    );
    assert_eq!(
        e,
        Err(Error::RankMismatch {
            source_rank: 1,
            range_rank: 2
        })
    );

    let mut s = Stream::new(3);
    let u = s.haar_unitary(6);
    let p = s.projection(6, 2);
    let q = p.conjugate_by(&u.adjoint());
    let v0 = u.matmul(&p);
    assert!(partial_isometry_defect(&v0, &p, &q) < 1e-14);
    assert_eq!(correct_partial_isometry(&p, &q, &v0).unwrap(), v0);

    let g = s.ginibre(6);
    let a = &v0 + &q.matmul(&g).matmul(&p).scale_real(0.02);
    let v = correct_partial_isometry(&p, &q, &a).unwrap();
    assert!(partial_isometry_defect(&v, &p, &q) <= exact_tol(6));
    assert!(dist(&v, &a) < 0.2);
}

#[test]
fn partial_isometry_rejects_non_projections() {
    let half = Mat::diag_real(&[0.5]);
    assert!(matches!(
        correct_partial_isometry(&half, &Mat::identity(1), &Mat::identity(1)),
        Err(Error::NotProjection { .. })
    ));
}

#[test]
fn resolution_examples() {
    let exact = vec![Mat::diag_real(&[1.0, 0.0, 0.0]), Mat::diag_real(&[0.0, 1.0, 1.0])];
    assert_eq!(correct_resolution(&exact).unwrap(), exact);
    let out = correct_resolution(&[Mat::diag_real(&[0.9]), Mat::diag_real(&[0.1])]).unwrap();
    assert!((out[0][(0, 0)].re - 1.0).abs() < 1e-15);
    assert!(out[1][(0, 0)].norm() < 1e-15);

    let mut s = Stream::new(4);
    let u = s.haar_unitary(12);
    let sizes = [3, 4, 5];
    let mut start = 0;
    let mut ps = Vec::new();
    for n in sizes {
        let cols: Vec<Vec<C64>> = (start..start + n).map(|j| u.column(j)).collect();
        ps.push(Mat::projector_onto(12, &cols));
        start += n;
    }
    let noisy: Vec<Mat> = ps
        .iter()
        .map(|p| p + &herm_unit(&mut s, 12).scale_real(0.05))
        .collect();
    let out = correct_resolution(&noisy).unwrap();
    assert!(resolution_defect(&out) <= exact_tol(12));
    for (a, b) in noisy.iter().zip(&out) {
        assert!(dist(a, b) <= 0.15, "{}", dist(a, b));
    }
}

#[test]
fn matrix_units_examples() {
    let exact = MatrixUnitSystem::standard(&[2], 2);
    assert!(exact.is_exact());
    assert_eq!(correct_matrix_units(&exact).unwrap(), exact);

    let mut s = Stream::new(5);
    let h = herm_unit(&mut s, 4);
    let x = &Mat::identity(4) + &h.scale_real(0.03);
    let inv = inverse_near_identity(&h.scale_real(0.03));
    let units: Vec<Mat> = exact.units()[0]
        .iter()
        .map(|e| x.matmul(e).matmul(&inv))
        .collect();
    let approx = MatrixUnitSystem::new(vec![2], vec![units]).unwrap();
    let fixed = correct_matrix_units(&approx).unwrap();
    assert!(fixed.is_exact());
    assert!(fixed.distance(&approx) <= 0.1);

    // Diagonal ranks 1 and 3 cannot be matched by a partial isometry.
    let d1 = Mat::diag_real(&[1.0, 0.0, 0.0, 0.0]);
    let d2 = Mat::diag_real(&[0.0, 1.0, 1.0, 1.0]);
    let bad = MatrixUnitSystem::new(
        vec![2],
        vec![vec![d1, Mat::zeros(4), Mat::zeros(4), d2]],
    )
    .unwrap();
    let err = correct_matrix_units(&bad).unwrap_err();
    assert!(matches!(err.root(), Error::RankMismatch { .. }), "{err}");
}

/// `(1 + H)^{-1}` by Neumann series, for small `H`.
fn inverse_near_identity(h: &Mat) -> Mat {
    let d = h.dim();
    let mut term = Mat::identity(d);
    let mut acc = Mat::identity(d);
    for _ in 0..60 {
        term = term.matmul(h).scale_real(-1.0);
        acc += &term;
    }
    acc
}

fn generator(n: usize) -> Mat {
    matrix_generator(&MatrixUnitSystem::standard(&[n], 1))
}

#[test]
fn tensor_examples() {
    let mut s = Stream::new(6);
    let t = s.ginibre(3).kron(&Mat::identity(2));
    let y = Mat::identity(3).kron(&generator(2));
    let (ts, sh) = correct_tensor(&[t.clone()], &y, 2).unwrap();
    assert!(dist(&ts[0], &t) < 1e-12);
    assert!(dist(&sh, &y) < 1e-12);

    let tn = &t + &noise(&mut s, 6).scale_real(0.02);
    let yn = &y + &noise(&mut s, 6).scale_real(0.02);
    let (ts, sh) = correct_tensor(&[tn.clone()], &yn, 2).unwrap();
    let units = units_from_generator(&sh, 2).unwrap();
    assert!(units.is_exact());
    for a in 0..2 {
        for b in 0..2 {
            let e = units.unit(0, a, b);
            assert!(op_norm(&ts[0].commutator(e)).unwrap() <= exact_tol(6));
        }
    }
    assert!(dist(&ts[0], &tn) <= 0.1);
    // The distance is dominated by the commutators with the corrected units.
    let bound: f64 = (0..2)
        .map(|j| op_norm(&tn.commutator(units.unit(0, 0, j))).unwrap())
        .sum();
    assert!(dist(&ts[0], &tn) <= bound + 1e-12);

    let far = Mat::diag_real(&[1.0, 1.5, 2.0, 1.0, 1.0, 2.0]);
    assert!(matches!(
        correct_tensor(&[], &far, 2),
        Err(Error::SpectralGap { .. })
    ));
}

#[test]
fn direct_sum_examples() {
    let q = Mat::diag_real(&[1.0, 1.0, 0.0]);
    let sblk = Mat::from_real(3, &[0.2, 0.5, 0.0, 0.1, 0.3, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let tblk = Mat::diag_real(&[0.0, 0.0, 0.7]);
    let out = correct_direct_sum(&[sblk.clone()], &[tblk.clone()], &q, None, None).unwrap();
    assert!(dist(&out.first[0], &sblk) < 1e-14);
    assert!(dist(&out.second[0], &tblk) < 1e-14);

    let out = correct_direct_sum(&[], &[], &Mat::diag_real(&[0.95, 0.9, 0.05]), None, None).unwrap();
    assert!(dist(&out.central, &q) < 1e-15);

    let mut s = Stream::new(7);
    let e = Mat::diag_real(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let f = &Mat::identity(8) - &e;
    let p = s.projection(4, 2);
    let pin = Mat::direct_sum(&[&p, &Mat::zeros(4)]);
    let qn = &e + &herm_unit(&mut s, 8).scale_real(0.02);
    let sn = &pin + &herm_unit(&mut s, 8).scale_real(0.02);
    let tb = f.matmul(&s.ginibre(8)).matmul(&f).scale_real(0.3);
    let tn = &tb + &noise(&mut s, 8).scale_real(0.02);
    let proj = CorrectorFamily::projection();
    let out = correct_direct_sum(&[sn.clone()], &[tn.clone()], &qn, Some(&proj), None).unwrap();
    let ec = &out.central;
    assert!(projection_defect(ec) <= exact_tol(8));
    let sh = &out.first[0];
    let th = &out.second[0];
    assert!(dist(&sh.matmul(ec), sh) <= exact_tol(8));
    assert!(dist(&ec.matmul(sh), sh) <= exact_tol(8));
    assert!(op_norm(&th.matmul(ec)).unwrap() <= exact_tol(8));
    assert!(op_norm(&ec.matmul(th)).unwrap() <= exact_tol(8));
    assert!(dist(sh, &sn) <= 0.1);
    assert!(dist(th, &tn) <= 0.1);

    assert!(matches!(
        correct_direct_sum(&[], &[], &Mat::diag_real(&[0.5, 1.0]), None, None),
        Err(Error::SpectralGap { .. })
    ));
}

fn m2_pair() -> (Mat, Mat) {
    (
        Mat::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap(),
        Mat::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
    )
}

#[test]
fn two_projection_examples() {
    let (p1, p2) = m2_pair();
    let (a, b) = correct_two_projections(&p1, &p2, 0.5).unwrap();
    assert_eq!((a, b), (p1.clone(), p2.clone()));

    let e = correct_two_projections(&p1, &p1, 0.5).unwrap_err();
    assert!(matches!(e, Error::SpectralGap { .. }));

    let mut s = Stream::new(8);
    let n1 = &p1 + &herm_unit(&mut s, 2).scale_real(0.01);
    let n2 = &p2 + &herm_unit(&mut s, 2).scale_real(0.01);
    let (a, b) = correct_two_projections(&n1, &n2, 0.5).unwrap();
    let rel = rel_two_projections(0.5);
    let r = defect(&rel, &[a.clone(), b.clone()], &BlockAlgebra::matrix(2), &[]).unwrap();
    assert!(r.is_exact(), "{}", r.op());
    assert!(dist2(&a, &p1) <= 0.05 && dist2(&b, &p2) <= 0.05);

    // Several copies plus an orthogonal piece, rotated at random.
    let u = s.haar_unitary(7);
    let big1 = Mat::direct_sum(&[&p1, &p1, &p1, &Mat::zeros(1)]).conjugate_by(&u);
    let big2 = Mat::direct_sum(&[&p2, &p2, &p2, &Mat::identity(1)]).conjugate_by(&u);
    let nb1 = &big1 + &herm_unit(&mut s, 7).scale_real(0.01);
    let nb2 = &big2 + &herm_unit(&mut s, 7).scale_real(0.01);
    let (a, b) = correct_two_projections(&nb1, &nb2, 0.5).unwrap();
    let r = defect(&rel, &[a.clone(), b.clone()], &BlockAlgebra::matrix(7), &[]).unwrap();
    assert!(r.is_exact(), "{}", r.op());
    assert!(dist2(&a, &big1) <= 0.05 && dist2(&b, &big2) <= 0.05);
}

#[test]
fn blockwise_examples() {
    let mut s = Stream::new(9);
    let proj = CorrectorFamily::projection();
    let a = &s.projection(4, 2) + &herm_unit(&mut s, 4).scale_real(0.02);
    let one = correct_blockwise(&[vec![a.clone()]], 1, &proj).unwrap();
    assert_eq!(one[0][0], correct_projection(&a).unwrap());

    let p = s.projection(6, 3);
    let noisy = &p + &herm_unit(&mut s, 6).scale_real(0.02);
    let blocks = extract_blocks(&noisy, 2, 3);
    let out = correct_blockwise(&[blocks.clone()], 2, &proj).unwrap();
    let back = assemble_blocks(&out[0], 2).unwrap();
    assert!(projection_defect(&back) <= exact_tol(6));

    let g = s.ginibre(6);
    assert_eq!(assemble_blocks(&extract_blocks(&g, 2, 3), 2).unwrap(), g);
    assert_eq!(assemble_blocks(&extract_blocks(&g, 3, 2), 3).unwrap(), g);
}

fn clock_shift(n: usize) -> (Mat, Mat) {
    let w = 2.0 * std::f64::consts::PI / n as f64;
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
fn commuting_normals_examples() {
    let d1 = Mat::diag(&[C64::new(0.3, 0.1), C64::new(-0.5, 0.0), C64::new(0.2, 0.4)]);
    let d2 = Mat::diag_real(&[0.1, 0.1, -0.7]);
    let out = correct_commuting_normals(&[d1.clone(), d2.clone()], 2.0).unwrap();
    assert!(dist(&out.outputs[0], &d1) < 1e-10 && dist(&out.outputs[1], &d2) < 1e-10);

    let (u, v) = clock_shift(8);
    let out = correct_commuting_normals(&[u.clone(), v.clone()], 2.0).unwrap();
    assert!(commutation_defect(&out.outputs) <= exact_tol(8));
    for (a, b) in [&u, &v].iter().zip(&out.outputs) {
        assert!(op_norm(b).unwrap() <= op_norm(a).unwrap() + 1e-10);
    }

    let mut s = Stream::new(10);
    let da = Mat::diag_real(&(0..10).map(|k| (k as f64 * 0.37).sin() * 0.9).collect::<Vec<_>>());
    let db = Mat::diag(
        &(0..10)
            .map(|k| C64::from_polar(0.8, k as f64 * 0.61))
            .collect::<Vec<_>>(),
    );
    let a1 = &da + &s.ginibre(10).scale_real(0.01);
    let a2 = &db + &s.ginibre(10).scale_real(0.01);
    let out = correct_commuting_normals(&[a1, a2], 2.0).unwrap();
    assert!(commutation_defect(&out.outputs) <= exact_tol(10));
    assert!(out.distance <= 0.1, "{}", out.distance);
}

#[test]
fn single_generator_examples() {
    let b = Mat::diag_real(&[0.0, 1.0]);
    let (c, fs) = single_generator(&[b.clone()]).unwrap();
    assert!(dist(&c, &Mat::diag_real(&[1.0, 2.0])) < 1e-12);
    assert!(fs[0].eval(1.0).unwrap().norm() < 1e-15);
    assert!((fs[0].eval(2.0).unwrap().re - 1.0).abs() < 1e-15);

    let b1 = Mat::diag_real(&[1.0, 1.0, 2.0]);
    let b2 = Mat::diag_real(&[3.0, 4.0, 4.0]);
    let (c, fs) = single_generator(&[b1.clone(), b2.clone()]).unwrap();
    assert!(dist(&c, &Mat::diag_real(&[1.0, 2.0, 3.0])) < 1e-12);
    assert!(dist(&fs[0].apply(&c).unwrap(), &b1) < 1e-10);
    assert!(dist(&fs[1].apply(&c).unwrap(), &b2) < 1e-10);

    let mut s = Stream::new(11);
    let w = s.haar_unitary(6);
    let bs = [
        Mat::diag(&[1.0, 1.0, 2.0, 2.0, 0.5, 1.0].map(|x| C64::new(x, 0.3 * x))).conjugate_by(&w),
        Mat::diag_real(&[0.0, 0.0, 1.0, 1.0, 1.0, 2.0]).conjugate_by(&w),
    ];
    let (c, fs) = single_generator(&bs).unwrap();
    let mut vals = liftkit_core::matcore::eigvalsh(&c);
    vals.iter_mut().for_each(|v| *v = v.round());
    assert_eq!(vals, vec![1.0, 2.0, 2.0, 3.0, 4.0, 4.0]);
    for (f, b) in fs.iter().zip(&bs) {
        let e = dist(&f.apply(&c).unwrap(), b);
        assert!(e < 1e-10, "{e}");
    }

    let x = Mat::from_real(2, &[0.0, 0.1, 0.1, 0.0]).unwrap();
    let z = Mat::diag_real(&[0.0, 0.1]);
    assert!(matches!(
        single_generator(&[x, z]),
        Err(Error::Commutation { .. })
    ));
}

#[test]
fn haar_examples() {
    let alg2 = BlockAlgebra::matrix(2);
    let u = Mat::diag(&[C64::from_polar(1.0, 0.1), C64::from_polar(1.0, std::f64::consts::PI + 0.1)]);
    assert!(dist(&correct_haar(&u, &alg2).unwrap(), &u) < 1e-12);

    let u = Mat::diag(&[C64::new(1.0, 0.0), C64::from_polar(1.0, std::f64::consts::PI + 0.2)]);
    let v = correct_haar(&u, &alg2).unwrap();
    let want = Mat::diag(&[C64::from_polar(1.0, 0.1), C64::from_polar(1.0, std::f64::consts::PI + 0.1)]);
    assert!(dist(&v, &want) < 1e-12);

    let mut s = Stream::new(12);
    let w = s.haar_unitary(5);
    let roots = Mat::diag(
        &(0..5)
            .map(|k| C64::from_polar(1.0, 0.3 + 2.0 * std::f64::consts::PI * k as f64 / 5.0))
            .collect::<Vec<_>>(),
    )
    .conjugate_by(&w);
    let alg5 = BlockAlgebra::matrix(5);
    assert!(dist(&correct_haar(&roots, &alg5).unwrap(), &roots) < 1e-10);

    let u = &s.haar_unitary(7) + &s.ginibre(7).scale_real(0.01);
    let alg7 = BlockAlgebra::matrix(7);
    let v = correct_haar(&u, &alg7).unwrap();
    assert!(unitary_defect(&v) <= exact_tol(7));
    let mut pow = Mat::identity(7);
    for _ in 1..7 {
        pow = pow.matmul(&v);
        assert!(alg7.trace(&pow).norm() < 1e-10);
    }

    let blocks = BlockAlgebra::proportional(vec![2, 3]).unwrap();
    let ub = Mat::direct_sum(&[&s.haar_unitary(2), &s.haar_unitary(3)]);
    let vb = correct_haar(&ub, &blocks).unwrap();
    blocks.check_compatible(&vb).unwrap();
    let uneven = BlockAlgebra::new(vec![2, 3], vec![0.5, 0.5]).unwrap();
    assert!(correct_haar(&ub, &uneven).is_err());
}

fn embed(a: &Mat, at: usize, d: usize) -> Mat {
    let mut out = Mat::zeros(d);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            out[(at + i, at + j)] = a[(i, j)];
        }
    }
    out
}

/// Partial isometry `|f⟩⟨e|` in `ℂ^d`.
fn rank_one(f: &[C64], e: &[C64]) -> Mat {
    let mut m = Mat::zeros(f.len());
    m.add_outer(C64::new(1.0, 0.0), f, e);
    m
}

fn basis(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

#[test]
fn glue_two_realizable_pairs() {
    // Sources in ℂ² ⊕ 0, ranges in 0 ⊕ ℂ³: V₁ = |f₁⟩⟨e₁|, V₂ = |f₂⟩⟨(e₁+e₂)/√2|.
    let d = 5;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mix: Vec<C64> = (0..d)
        .map(|k| if k < 2 { C64::new(r, 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    let v1 = rank_one(&basis(d, 2), &basis(d, 0));
    let v2 = rank_one(&basis(d, 3), &mix);
    let corr_p = CorrectorFamily::two_projections(0.5);
    let corr_q = CorrectorFamily::orthogonal_projections(2);
    let exact = vec![v1, v2];
    let out = glue(&corr_p, &corr_q, &exact).unwrap();
    assert_eq!(out, exact);

    let rel = rel_glue(corr_p.relation(), corr_q.relation(), 2).unwrap();
    let alg = BlockAlgebra::matrix(d);
    let mut s = Stream::new(13);
    for _ in 0..10 {
        let noisy: Vec<Mat> = exact
            .iter()
            .map(|v| v + &s.ginibre(d).scale_real(0.01 / (d as f64).sqrt()))
            .collect();
        let out = glue(&corr_p, &corr_q, &noisy).unwrap();
        let rep = defect(&rel, &out, &alg, &[]).unwrap();
        assert!(rep.op() <= 1e-9, "{}", rep.op());
        for (a, b) in out.iter().zip(&noisy) {
            assert!(dist2(a, b) <= 0.05);
        }
        // Each summand is dominated by the square root of the total.
        for part in &rep.summands {
            assert!(part.op <= rep.op().sqrt() + 1e-10);
        }
    }
}

#[test]
fn glue_rank_incompatible() {
    // Source e₁₁ (rank 1) but range of rank 2 cannot be matched.
    let d = 3;
    let mut v = Mat::zeros(d);
    v[(1, 0)] = C64::new(1.0, 0.0);
    v[(2, 0)] = C64::new(1.0, 0.0);
    let a = v.scale_real(std::f64::consts::FRAC_1_SQRT_2);
    let family = CorrectorFamily::projection();
    let q_family = CorrectorFamily::new("inflate", family.relation().clone(), false, 0.1, |_| {
        Ok(vec![Mat::diag_real(&[0.0, 1.0, 1.0])])
    });
    let err = glue(&family, &q_family, &[a]).unwrap_err();
    assert!(matches!(err, Error::AtIndex { index: 1, .. }));
    assert!(matches!(err.root(), Error::RankMismatch { .. }));
}

#[test]
fn example_triples_are_fixed_by_their_families() {
    let (p1, p2) = m2_pair();
    let p = [p1, p2, Mat::identity(2)];
    let fam = CorrectorFamily::m2_triple();
    let out = fam.apply(&p).unwrap();
    for (a, b) in out.iter().zip(&p) {
        assert!(dist(a, b) < 1e-12);
    }
    let alg2 = BlockAlgebra::matrix(2);
    assert!(defect(fam.relation(), &p, &alg2, &[]).unwrap().is_exact());

    let third = 1.0 / 3.0;
    let q = [
        Mat::diag_real(&[1.0, 0.0, 0.0]),
        Mat::diag_real(&[0.0, 1.0, 0.0]),
        Mat::from_real(3, &[third; 9]).unwrap(),
    ];
    let fam = CorrectorFamily::m3_triple();
    let alg3 = BlockAlgebra::matrix(3);
    assert!(defect(fam.relation(), &q, &alg3, &[]).unwrap().is_exact());
    let out = fam.apply(&q).unwrap();
    for (a, b) in out.iter().zip(&q) {
        assert!(dist(a, b) < 1e-12, "{}", dist(a, b));
    }
    // Embedded in a larger space, with noise.
    let mut s = Stream::new(14);
    let qe: Vec<Mat> = q
        .iter()
        .map(|m| &embed(m, 2, 5) + &herm_unit(&mut s, 5).scale_real(0.01))
        .collect();
    let out = fam.apply(&qe).unwrap();
    let alg5 = BlockAlgebra::matrix(5);
    assert!(defect(fam.relation(), &out, &alg5, &[]).unwrap().is_exact());
}
