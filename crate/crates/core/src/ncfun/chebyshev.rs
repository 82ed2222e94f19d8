use alloc::vec;
use alloc::vec::Vec;

use super::{NcExpr, Node};
use crate::matcore::ScalarFn;
use crate::num;
use crate::{Error, Result, C64};

/// Coefficients `c_k` of the degree-`degree` Chebyshev interpolant of `g` on
/// `[a, b]`, so that `g(t) ≈ Σ c_k T_k(u)` with `u = (2t − a − b)/(b − a)`.
pub fn chebyshev_coefficients(g: &ScalarFn, a: f64, b: f64, degree: usize) -> Result<Vec<f64>> {
    if !(a < b) {
        return Err(Error::InvalidParameter {
            name: "interval length",
            value: b - a,
        });
    }
    let m = degree + 1;
    let pi = core::f64::consts::PI;
    let samples = (0..m)
        .map(|j| {
            let theta = pi * (j as f64 + 0.5) / m as f64;
            let t = 0.5 * (a + b) + 0.5 * (b - a) * num::cos(theta);
            g.eval(t).map(|v| (theta, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..m)
        .map(|k| {
            let s: f64 = samples
                .iter()
                .map(|&(theta, v)| v * num::cos(k as f64 * theta))
                .sum();
            let c = 2.0 * s / m as f64;
            if k == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect())
}

impl NcExpr {
    /// Replaces every functional-calculus node by the Chebyshev interpolant
    /// of its function on `[a, b]`, leaving a pure *-polynomial.
    pub fn polynomial_approximant(&self, degree: usize, a: f64, b: f64) -> Result<NcExpr> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut map = Vec::with_capacity(self.nodes().len());
        let push = |nodes: &mut Vec<Node>, n: Node| {
            nodes.push(n);
            nodes.len() - 1
        };
        for node in self.nodes() {
            let idx = match node {
                Node::Calculus(g, c) => {
                    let coeffs = chebyshev_coefficients(g, a, b, degree)?;
                    let x = map[*c];
                    let one = push(&mut nodes, Node::Unit);
                    let sx = push(&mut nodes, Node::Scale(C64::new(2.0 / (b - a), 0.0), x));
                    let shift = push(
                        &mut nodes,
                        Node::Scale(C64::new(-(a + b) / (b - a), 0.0), one),
                    );
                    let u = push(&mut nodes, Node::Sum(vec![sx, shift]));
                    let mut ts = vec![one, u];
                    for k in 2..coeffs.len() {
                        let prod = push(&mut nodes, Node::Product(vec![u, ts[k - 1]]));
                        let twice = push(&mut nodes, Node::Scale(C64::new(2.0, 0.0), prod));
                        let back = push(&mut nodes, Node::Scale(C64::new(-1.0, 0.0), ts[k - 2]));
                        ts.push(push(&mut nodes, Node::Sum(vec![twice, back])));
                    }
                    let terms = coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, &ck)| push(&mut nodes, Node::Scale(C64::new(ck, 0.0), ts[k])))
                        .collect();
                    push(&mut nodes, Node::Sum(terms))
                }
                other => {
                    let m = |c: &usize| map[*c];
                    let n = match other {
                        Node::Var(j) => Node::Var(*j),
                        Node::Unit => Node::Unit,
                        Node::Adjoint(c) => Node::Adjoint(map[*c]),
                        Node::Sum(cs) => Node::Sum(cs.iter().map(m).collect()),
                        Node::Product(cs) => Node::Product(cs.iter().map(m).collect()),
                        Node::Scale(z, c) => Node::Scale(*z, map[*c]),
                        Node::Calculus(..) => unreachable!(),
                    };
                    push(&mut nodes, n)
                }
            };
            map.push(idx);
        }
        Ok(NcExpr::from_parts(self.arity(), nodes, map[self.root()])?.with_name(self.name()))
    }
}
