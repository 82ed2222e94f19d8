//! Noncommutative continuous functions as expression DAGs, the standard
//! relations, and defect measurement.

mod chebyshev;
mod defect;
mod expr;
mod relations;

pub use chebyshev::chebyshev_coefficients;
pub use defect::{defect, DefectReport, TermDefect};
pub use expr::{NcExpr, Node};
pub use relations::{
    rel_all, rel_commutator, rel_direct_sum, rel_glue, rel_matrix_generator, rel_projection,
    rel_tensor,
};

use crate::matcore::Mat;
use crate::Result;

pub fn eval(e: &NcExpr, args: &[Mat]) -> Result<Mat> {
    e.eval(args)
}

/// Looks up a parameter-free relation by name.
pub fn relation_by_name(name: &str) -> Option<NcExpr> {
    match name {
        "projection" => Some(rel_projection()),
        "commutator" => Some(rel_commutator()),
        _ => None,
    }
}

#[cfg(test)]
mod tests;
