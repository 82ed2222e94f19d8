use alloc::vec::Vec;

use super::NcExpr;
use crate::{Error, Result, C64};

/// `φ(x) = (x − x*)² + (x − x²)*(x − x²)`, vanishing exactly on projections.
pub fn rel_projection() -> NcExpr {
    let x = NcExpr::var(1, 0);
    let skew = x.sub(&x.clone().adjoint()).square();
    let idem = x.sub(&x.mul(&x)).gram();
    NcExpr::sum(1, &[skew, idem]).with_name("projection")
}

/// `x₁x₂ − x₂x₁`
pub fn rel_commutator() -> NcExpr {
    let x = NcExpr::var(2, 0);
    let y = NcExpr::var(2, 1);
    x.mul(&y).sub(&y.mul(&x)).with_name("commutator")
}

/// Relation in one variable `y` whose solutions are the generators
/// `y = Σ k·e_kk + i·Σ_{k≥2}(e_1k + e_k1)` of a copy of `M_n` (tensored
/// with an identity).
///
/// With `D = Re y` and `K = Im y`, the diagonal units are the Lagrange
/// polynomials `E_k(D)` and the off-diagonal units are `e_1k = E_1 K E_k`.
pub fn rel_matrix_generator(n: usize) -> Result<NcExpr> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "matrix size",
            value: 0.0,
        });
    }
    let d = NcExpr::var(2, 0);
    let k = NcExpr::var(2, 1);
    let one = NcExpr::unit(2);
    let shifted = |j: usize| d.sub(&one.clone().scale_real(j as f64));
    let minimal = NcExpr::product(&(1..=n).map(shifted).collect::<Vec<_>>());
    let unit = |s: usize| -> NcExpr {
        let factors: Vec<NcExpr> = (1..=n)
            .filter(|&j| j != s)
            .map(|j| shifted(j).scale_real(1.0 / (s as f64 - j as f64)))
            .collect();
        if factors.is_empty() {
            one.clone()
        } else {
            NcExpr::product(&factors)
        }
    };
    let e1 = unit(1);
    let mut terms = alloc::vec![minimal.gram()];
    let mut off = Vec::new();
    for s in 2..=n {
        let es = unit(s);
        let e1s = NcExpr::product(&[e1.clone(), k.clone(), es.clone()]);
        terms.push(e1s.clone().adjoint().mul(&e1s).sub(&es).gram());
        terms.push(e1s.mul(&e1s.clone().adjoint()).sub(&e1).gram());
        off.push(e1s.add(&e1s.clone().adjoint()));
    }
    terms.push(k.sub(&NcExpr::sum(2, &off)).gram());
    let in_dk = NcExpr::sum(2, &terms);
    let y = NcExpr::var(1, 0);
    let re = y.clone().real_part();
    let im = y.sub(&y.clone().adjoint()).scale(C64::new(0.0, -0.5));
    Ok(in_dk.compose(&[re, im])?.with_name("matrix_generator"))
}

/// Glued relation on partial isometries `V₁,…,V_n`:
/// `φ(V*V)*φ(V*V) + ψ(VV*)*ψ(VV*)`.
pub fn rel_glue(phi: &NcExpr, psi: &NcExpr, n: usize) -> Result<NcExpr> {
    for e in [phi, psi] {
        if e.arity() != n {
            return Err(Error::Arity {
                expected: n,
                found: e.arity(),
            });
        }
    }
    let sources: Vec<NcExpr> = (0..n).map(|i| NcExpr::var(n, i).gram()).collect();
    let ranges: Vec<NcExpr> = (0..n)
        .map(|i| NcExpr::var(n, i).adjoint().gram())
        .collect();
    let a = phi.compose(&sources)?.gram();
    let b = psi.compose(&ranges)?.gram();
    Ok(NcExpr::sum(n, &[a, b]).with_name("glue"))
}

/// Relation for `A ⊗ M_n` in variables `x₁,…,x_m, y`:
/// commutators of every `x_i` with `y` and `y*`, plus both constituent relations.
pub fn rel_tensor(phi: &NcExpr, rho: &NcExpr) -> Result<NcExpr> {
    if rho.arity() != 1 {
        return Err(Error::Arity {
            expected: 1,
            found: rho.arity(),
        });
    }
    let m = phi.arity();
    let arity = m + 1;
    let y = NcExpr::var(arity, m);
    let ys = y.clone().adjoint();
    let comm = |a: &NcExpr, b: &NcExpr| a.mul(b).sub(&b.mul(a)).gram();
    let xs: Vec<NcExpr> = (0..m).map(|i| NcExpr::var(arity, i)).collect();
    let with_y: Vec<NcExpr> = xs.iter().map(|x| comm(x, &y)).collect();
    let with_ys: Vec<NcExpr> = xs.iter().map(|x| comm(x, &ys)).collect();
    let phi_part = phi.relabel(arity, &(0..m).collect::<Vec<_>>())?.gram();
    let rho_part = rho.relabel(arity, &[m])?.gram();
    Ok(NcExpr::sum(
        arity,
        &[
            NcExpr::sum(arity, &with_y),
            NcExpr::sum(arity, &with_ys),
            phi_part,
            rho_part,
        ],
    )
    .with_name("tensor"))
}

/// Relation for `A ⊕ B` in variables `x₁,…,x_m, y₁,…,y_n, p`, with seven
/// summands: both constituent relations, self-adjointness and idempotence
/// of `p`, `p` commuting with every `x_j`, `x_j` living under `p`, and `p`
/// commuting with every `y_j`.
pub fn rel_direct_sum(phi: &NcExpr, psi: &NcExpr) -> Result<NcExpr> {
    let m = phi.arity();
    let n = psi.arity();
    let arity = m + n + 1;
    let p = NcExpr::var(arity, m + n);
    let xs: Vec<NcExpr> = (0..m).map(|j| NcExpr::var(arity, j)).collect();
    let ys: Vec<NcExpr> = (m..m + n).map(|j| NcExpr::var(arity, j)).collect();
    let comm = |a: &NcExpr| p.mul(a).sub(&a.mul(&p)).gram();
    let terms = [
        phi.relabel(arity, &(0..m).collect::<Vec<_>>())?.gram(),
        psi.relabel(arity, &(m..m + n).collect::<Vec<_>>())?.gram(),
        p.sub(&p.clone().adjoint()).gram(),
        p.sub(&p.mul(&p)).gram(),
        NcExpr::sum(arity, &xs.iter().map(comm).collect::<Vec<_>>()),
        NcExpr::sum(
            arity,
            &xs.iter().map(|x| p.mul(x).sub(x).gram()).collect::<Vec<_>>(),
        ),
        NcExpr::sum(arity, &ys.iter().map(comm).collect::<Vec<_>>()),
    ];
    Ok(NcExpr::sum(arity, &terms).with_name("direct_sum"))
}

/// Sum of the given relations, each re-embedded on the listed variables.
pub fn rel_all(arity: usize, parts: &[(NcExpr, Vec<usize>)]) -> Result<NcExpr> {
    let terms = parts
        .iter()
        .map(|(e, vars)| e.relabel(arity, vars))
        .collect::<Result<Vec<_>>>()?;
    Ok(NcExpr::sum(arity, &terms))
}
