//! Correctors and relations addressable by name.

use liftkit_core::correct::{
    correct_commuting_normals, correct_haar, correct_matrix_units, correct_partial_isometry,
    correct_projection, correct_resolution, correct_two_projections, correct_unitary,
    rel_resolution, rel_two_projections, MatrixUnitSystem,
};
use liftkit_core::ensembles::{self, Kind};
use liftkit_core::ncfun::{
    rel_commutator, rel_direct_sum, rel_glue, rel_matrix_generator, rel_projection, rel_tensor,
};
use liftkit_core::{BlockAlgebra, Mat, NcExpr};
use serde::Deserialize;

use crate::doc::{AlgebraDoc, ExprDoc};
use crate::{usage, Outcome};

pub const CORRECTORS: [&str; 8] = [
    "projection",
    "unitary",
    "partial_isometry",
    "resolution",
    "two_projections",
    "matrix_units",
    "commuting_normals",
    "haar",
];

/// Extra corrector parameters read from the input document.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct Params {
    /// Target angle of `two_projections`.
    #[serde(default)]
    pub c: Option<f64>,
    /// Block sizes of `matrix_units`; defaults to one square block.
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
    /// Tracial algebra for norms and for `haar`; defaults to `M_dim`.
    #[serde(default)]
    pub algebra: Option<AlgebraDoc>,
    /// Size of the copy of `M_n` for `matrix_generator`.
    #[serde(default)]
    pub n: Option<usize>,
}

pub fn check_corrector(name: &str) -> Outcome<()> {
    if CORRECTORS.contains(&name) {
        Ok(())
    } else {
        Err(usage(format!(
            "unknown corrector '{name}'; registered: {}",
            CORRECTORS.join(", ")
        )))
    }
}

fn want_arity(name: &str, expected: usize, found: usize) -> Outcome<()> {
    if expected == found {
        Ok(())
    } else {
        Err(usage(format!("{name} takes {expected} matrices, found {found}")))
    }
}

fn square_root(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n && r > 0).then_some(r)
}

fn unit_blocks(params: &Params, count: usize) -> Outcome<Vec<usize>> {
    match &params.blocks {
        Some(b) => {
            let need: usize = b.iter().map(|n| n * n).sum();
            if need != count {
                return Err(usage(format!("blocks {b:?} need {need} units, found {count}")));
            }
            Ok(b.clone())
        }
        None => square_root(count)
            .map(|n| vec![n])
            .ok_or_else(|| usage(format!("{count} units do not form one square block; give \"blocks\""))),
    }
}

fn split_units(blocks: &[usize], flat: &[Mat]) -> Vec<Vec<Mat>> {
    let mut rest = flat;
    blocks
        .iter()
        .map(|&n| {
            let (head, tail) = rest.split_at(n * n);
            rest = tail;
            head.to_vec()
        })
        .collect()
}

/// Runs the named corrector. The output tuple has the same length and
/// meaning as the input tuple.
pub fn apply(name: &str, inputs: &[Mat], params: &Params) -> Outcome<Vec<Mat>> {
    check_corrector(name)?;
    if inputs.is_empty() {
        return Err(usage("no input matrices"));
    }
    let k = inputs.len();
    Ok(match name {
        "projection" => {
            want_arity(name, 1, k)?;
            vec![correct_projection(&inputs[0])?]
        }
        "unitary" => {
            want_arity(name, 1, k)?;
            vec![correct_unitary(&inputs[0])?]
        }
        "partial_isometry" => {
            want_arity(name, 3, k)?;
            let v = correct_partial_isometry(&inputs[0], &inputs[1], &inputs[2])?;
            vec![inputs[0].clone(), inputs[1].clone(), v]
        }
        "resolution" => correct_resolution(inputs)?,
        "two_projections" => {
            want_arity(name, 2, k)?;
            let c = params.c.ok_or_else(|| usage("two_projections needs \"c\""))?;
            let (p1, p2) = correct_two_projections(&inputs[0], &inputs[1], c)?;
            vec![p1, p2]
        }
        "matrix_units" => {
            let blocks = unit_blocks(params, k)?;
            let sys = MatrixUnitSystem::new(blocks.clone(), split_units(&blocks, inputs))?;
            correct_matrix_units(&sys)?.into_units().into_iter().flatten().collect()
        }
        "commuting_normals" => correct_commuting_normals(inputs, 2.0)?.outputs,
        "haar" => {
            want_arity(name, 1, k)?;
            let alg = algebra(params, inputs[0].dim());
            vec![correct_haar(&inputs[0], &alg)?]
        }
        _ => unreachable!(),
    })
}

pub fn algebra(params: &Params, dim: usize) -> BlockAlgebra {
    params
        .algebra
        .as_ref()
        .map_or_else(|| BlockAlgebra::matrix(dim), |a| a.0.clone())
}

fn residual_sum(name: &str, arity: usize, rs: &[NcExpr]) -> NcExpr {
    let terms: Vec<NcExpr> = rs.iter().map(|r| r.clone().gram()).collect();
    NcExpr::sum(arity, &terms).with_name(name)
}

/// Matrix units of `⊕_b M_{n_b}` in variables ordered block by block, each
/// block row-major.
pub fn rel_matrix_units(blocks: &[usize]) -> NcExpr {
    let arity: usize = blocks.iter().map(|n| n * n).sum();
    let mut index = Vec::new();
    let mut off = 0;
    for (b, &n) in blocks.iter().enumerate() {
        for s in 0..n {
            for t in 0..n {
                index.push((b, s, t, off + s * n + t));
            }
        }
        off += n * n;
    }
    let x = |j: usize| NcExpr::var(arity, j);
    let mut rs = Vec::new();
    for &(b, s, t, j) in &index {
        let n = blocks[b];
        let mirror = j - (s * n + t) + t * n + s;
        rs.push(x(j).adjoint().sub(&x(mirror)));
        for &(c, u, v, k) in &index {
            let prod = x(j).mul(&x(k));
            rs.push(if b == c && t == u {
                prod.sub(&x(j - (s * n + t) + s * n + v))
            } else {
                prod
            });
        }
    }
    let diag: Vec<NcExpr> = index.iter().filter(|e| e.1 == e.2).map(|e| x(e.3)).collect();
    rs.push(NcExpr::sum(arity, &diag).sub(&NcExpr::unit(arity)));
    residual_sum("matrix_units", arity, &rs)
}

/// Normal, pairwise commuting matrices.
pub fn rel_commuting_normals(k: usize) -> NcExpr {
    let x = |j: usize| NcExpr::var(k, j);
    let mut rs = Vec::new();
    for i in 0..k {
        let adj = x(i).adjoint();
        rs.push(adj.mul(&x(i)).sub(&x(i).mul(&adj)));
        for j in i + 1..k {
            rs.push(x(i).mul(&x(j)).sub(&x(j).mul(&x(i))));
        }
    }
    residual_sum("commuting_normals", k, &rs)
}

/// Relation named `name` on `arity` variables, if the name is known.
pub fn named_relation(name: &str, arity: Option<usize>, params: &Params) -> Outcome<NcExpr> {
    let need = || arity.ok_or_else(|| usage(format!("relation '{name}' needs an arity")));
    Ok(match name {
        "projection" => rel_projection(),
        "commutator" => rel_commutator(),
        "unitary" | "haar" => ensembles::relation(Kind::NearUnitary).with_name("unitary"),
        "partial_isometry" => ensembles::relation(Kind::NearPartialIsometry).with_name("partial_isometry"),
        "resolution" => rel_resolution(need()?, true),
        "orthogonal_projections" => rel_resolution(need()?, false),
        "two_projections" => {
            rel_two_projections(params.c.ok_or_else(|| usage("two_projections needs \"c\""))?)
        }
        "matrix_units" => rel_matrix_units(&unit_blocks(params, need()?)?),
        "commuting_normals" => rel_commuting_normals(need()?),
        "matrix_generator" => {
            rel_matrix_generator(params.n.ok_or_else(|| usage("matrix_generator needs \"n\""))?)?
        }
        other => match other.parse::<Kind>() {
            Ok(kind) => ensembles::relation(kind),
            Err(_) => return Err(usage(format!("unknown relation '{other}'"))),
        },
    })
}

/// A relation given by name, by a builder over other relations, or as an
/// explicit expression arena.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RelationDoc {
    Name(String),
    Builder(Box<BuilderDoc>),
    Expr(ExprDoc),
}

/// `{"builder": "glue" | "tensor" | "direct_sum", …}` or a named relation
/// with parameters, e.g. `{"builder": "two_projections", "c": 0.5}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderDoc {
    pub builder: String,
    #[serde(default)]
    pub phi: Option<RelationDoc>,
    #[serde(default)]
    pub psi: Option<RelationDoc>,
    #[serde(default)]
    pub rho: Option<RelationDoc>,
    #[serde(default)]
    pub arity: Option<usize>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
}

impl RelationDoc {
    /// Builds the relation; `arity` is the number of variables it will be
    /// evaluated on, when known.
    pub fn resolve(&self, arity: Option<usize>) -> Outcome<NcExpr> {
        match self {
            RelationDoc::Name(n) => named_relation(n, arity, &Params::default()),
            RelationDoc::Expr(e) => Ok(e.0.clone()),
            RelationDoc::Builder(b) => b.resolve(arity),
        }
    }
}

impl BuilderDoc {
    fn part<'a>(&'a self, field: &str, r: &'a Option<RelationDoc>) -> Outcome<&'a RelationDoc> {
        r.as_ref()
            .ok_or_else(|| usage(format!("builder '{}' needs \"{field}\"", self.builder)))
    }

    fn resolve(&self, arity: Option<usize>) -> Outcome<NcExpr> {
        let arity = self.arity.or(arity);
        match self.builder.as_str() {
            "glue" => {
                let n = self.n.or(arity).ok_or_else(|| usage("glue needs \"n\""))?;
                let phi = self.part("phi", &self.phi)?.resolve(Some(n))?;
                let psi = self.part("psi", &self.psi)?.resolve(Some(n))?;
                Ok(rel_glue(&phi, &psi, n)?)
            }
            "tensor" => {
                let phi = self.part("phi", &self.phi)?.resolve(arity.map(|a| a.saturating_sub(1)))?;
                let rho = self.part("rho", &self.rho)?.resolve(Some(1))?;
                Ok(rel_tensor(&phi, &rho)?)
            }
            "direct_sum" => {
                let phi = self.part("phi", &self.phi)?.resolve(None)?;
                let psi = self.part("psi", &self.psi)?.resolve(None)?;
                Ok(rel_direct_sum(&phi, &psi)?)
            }
            name => {
                let params = Params {
                    c: self.c,
                    blocks: self.blocks.clone(),
                    algebra: None,
                    n: self.n,
                };
                named_relation(name, arity, &params)
            }
        }
    }
}

/// Relation a corrector's output satisfies exactly.
pub fn corrector_relation(name: &str, arity: usize, params: &Params) -> Outcome<NcExpr> {
    check_corrector(name)?;
    named_relation(name, Some(arity), params)
}

/// Ensemble kind a corrector is swept over by default.
pub fn default_kind(corrector: &str) -> Outcome<Kind> {
    check_corrector(corrector)?;
    Ok(match corrector {
        "projection" => Kind::NearProjection,
        "unitary" => Kind::NearUnitary,
        "partial_isometry" => Kind::NearPartialIsometry,
        "resolution" => Kind::NearResolution,
        "matrix_units" => Kind::NearMatrixUnits,
        "commuting_normals" => Kind::AlmostCommutingPair,
        "haar" => Kind::HaarUnitary,
        _ => {
            return Err(usage(format!(
                "corrector '{corrector}' has no ensemble; name one in \"ensemble\""
            )))
        }
    })
}
