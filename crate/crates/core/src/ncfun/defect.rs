use alloc::string::String;
use alloc::vec::Vec;

use super::NcExpr;
use crate::matcore::{op_norm, BlockAlgebra, Mat};
use crate::Result;

/// Norms of one evaluated relation term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDefect {
    pub op: f64,
    /// `(p, ‖value‖_p)` for each requested `p`.
    pub p_norms: Vec<(f64, f64)>,
}

/// How far a tuple is from satisfying a relation.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub relation: String,
    pub dim: usize,
    pub total: TermDefect,
    /// One entry per summand when the relation's root is a sum.
    pub summands: Vec<TermDefect>,
}

impl DefectReport {
    pub fn op(&self) -> f64 {
        self.total.op
    }

    pub fn p_norm(&self, p: f64) -> Option<f64> {
        self.total
            .p_norms
            .iter()
            .find(|(q, _)| *q == p)
            .map(|&(_, v)| v)
    }

    /// True when the operator-norm defect is within the exactness contract.
    pub fn is_exact(&self) -> bool {
        self.total.op <= crate::exact_tol(self.dim)
    }
}

fn measure(m: &Mat, alg: &BlockAlgebra, ps: &[f64]) -> Result<TermDefect> {
    Ok(TermDefect {
        op: op_norm(m)?,
        p_norms: ps
            .iter()
            .map(|&p| alg.p_norm(m, p).map(|v| (p, v)))
            .collect::<Result<_>>()?,
    })
}

/// Operator norm and requested p-norms of `e(args)`.
pub fn defect(e: &NcExpr, args: &[Mat], alg: &BlockAlgebra, ps: &[f64]) -> Result<DefectReport> {
    let (value, parts) = e.eval_with_summands(args)?;
    Ok(DefectReport {
        relation: String::from(e.name()),
        dim: value.dim(),
        total: measure(&value, alg, ps)?,
        summands: parts
            .iter()
            .map(|m| measure(m, alg, ps))
            .collect::<Result<_>>()?,
    })
}
