//! JSON documents for the core types.
//!
//! Each `*Doc` newtype wraps a core value and (de)serializes through a plain
//! mirror struct, validating on the way in.

use liftkit_core::correct::MatrixUnitSystem;
use liftkit_core::ensembles::{EnsembleSpec, Instance, Kind};
use liftkit_core::matcore::{Formula, Outside, Piece};
use liftkit_core::ncfun::{Node, TermDefect};
use liftkit_core::ultra::{Inclusion, RepSequence};
use liftkit_core::{BlockAlgebra, DefectReport, Error, Mat, NcExpr, ScalarFn, C64};
use serde::{Deserialize, Serialize};

/// `{"dim": n, "re": [[…]], "im": [[…]]}`, rows first; `im` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatJson", into = "MatJson")]
pub struct MatDoc(pub Mat);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<MatJson> for MatDoc {
    type Error = String;

    fn try_from(m: MatJson) -> Result<MatDoc, String> {
        let n = m.dim;
        let rows_ok = |rows: &Vec<Vec<f64>>, part: &str| -> Result<(), String> {
            if rows.len() != n {
                return Err(format!("{part}: expected {n} rows, found {}", rows.len()));
            }
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(format!("{part}: row {} has {} entries, expected {n}", i + 1, r.len()));
            }
            Ok(())
        };
        rows_ok(&m.re, "re")?;
        if let Some(im) = &m.im {
            rows_ok(im, "im")?;
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let im = m.im.as_ref().map_or(0.0, |im| im[i][j]);
                data.push(C64::new(m.re[i][j], im));
            }
        }
        Mat::new(n, data).map(MatDoc).map_err(|e| e.to_string())
    }
}

impl From<MatDoc> for MatJson {
    fn from(m: MatDoc) -> MatJson {
        let n = m.0.dim();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            m.0.as_slice().chunks(n).map(|r| r.iter().map(f).collect()).collect()
        };
        let re = rows(|z| z.re);
        let imag = m.0.as_slice().iter().any(|z| z.im != 0.0);
        MatJson {
            dim: n,
            re,
            im: imag.then(|| rows(|z| z.im)),
        }
    }
}

pub fn mats(ms: &[Mat]) -> Vec<MatDoc> {
    ms.iter().cloned().map(MatDoc).collect()
}

pub fn unwrap_mats(ms: Vec<MatDoc>) -> Vec<Mat> {
    ms.into_iter().map(|m| m.0).collect()
}

/// `{"blocks": [n₁, …], "weights": [α₁, …]}`; weights default to
/// dimension-proportional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson", into = "AlgebraJson")]
pub struct AlgebraDoc(pub BlockAlgebra);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    blocks: Vec<usize>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<AlgebraJson> for AlgebraDoc {
    type Error = String;

    fn try_from(a: AlgebraJson) -> Result<AlgebraDoc, String> {
        match a.weights {
            Some(w) => BlockAlgebra::new(a.blocks, w),
            None => BlockAlgebra::proportional(a.blocks),
        }
        .map(AlgebraDoc)
        .map_err(|e| e.to_string())
    }
}

impl From<AlgebraDoc> for AlgebraJson {
    fn from(a: AlgebraDoc) -> AlgebraJson {
        AlgebraJson {
            blocks: a.0.block_dims().to_vec(),
            weights: Some(a.0.weights().to_vec()),
        }
    }
}

/// `{"algebras": […], "reps": […], "bound": b}`. Without `algebras` every
/// term lives in the full matrix algebra; `bound` defaults to the largest
/// operator norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceJson", into = "SequenceJson")]
pub struct SequenceDoc(pub RepSequence);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceJson {
    #[serde(default)]
    algebras: Option<Vec<AlgebraDoc>>,
    reps: Vec<MatDoc>,
    #[serde(default)]
    bound: Option<f64>,
}

impl TryFrom<SequenceJson> for SequenceDoc {
    type Error = String;

    fn try_from(s: SequenceJson) -> Result<SequenceDoc, String> {
        let reps = unwrap_mats(s.reps);
        let algebras = match s.algebras {
            Some(a) => a.into_iter().map(|a| a.0).collect(),
            None => reps.iter().map(|m| BlockAlgebra::matrix(m.dim())).collect(),
        };
        let bound = match s.bound {
            Some(b) => b,
            None => {
                let mut worst: f64 = 0.0;
                for m in &reps {
                    worst = worst.max(liftkit_core::matcore::op_norm(m).map_err(|e| e.to_string())?);
                }
                worst
            }
        };
        RepSequence::new(algebras, reps, bound)
            .map(SequenceDoc)
            .map_err(|e| e.to_string())
    }
}

impl From<SequenceDoc> for SequenceJson {
    fn from(s: SequenceDoc) -> SequenceJson {
        SequenceJson {
            algebras: Some(s.0.algebras().iter().cloned().map(AlgebraDoc).collect()),
            bound: Some(s.0.bound()),
            reps: mats(s.0.reps()),
        }
    }
}

/// `{"a_blocks", "b_blocks", "mult", "b_weights"}`; `mult[b][a]` counts
/// copies of block `a` inside block `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InclusionJson", into = "InclusionJson")]
pub struct InclusionDoc(pub Inclusion);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InclusionJson {
    a_blocks: Vec<usize>,
    b_blocks: Vec<usize>,
    mult: Vec<Vec<usize>>,
    #[serde(default)]
    b_weights: Option<Vec<f64>>,
}

impl TryFrom<InclusionJson> for InclusionDoc {
    type Error = String;

    fn try_from(i: InclusionJson) -> Result<InclusionDoc, String> {
        match i.b_weights {
            Some(w) => Inclusion::with_weights(i.a_blocks, i.b_blocks, i.mult, w),
            None => Inclusion::new(i.a_blocks, i.b_blocks, i.mult),
        }
        .map(InclusionDoc)
        .map_err(|e| e.to_string())
    }
}

impl From<InclusionDoc> for InclusionJson {
    fn from(i: InclusionDoc) -> InclusionJson {
        InclusionJson {
            a_blocks: i.0.a_blocks().to_vec(),
            b_blocks: i.0.b_blocks().to_vec(),
            mult: i.0.mult().to_vec(),
            b_weights: Some(i.0.b_weights().to_vec()),
        }
    }
}

/// `{"blocks": [n₁, …], "units": [[e₁₁, e₁₂, …], …]}`, units of each block
/// row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitsJson", into = "UnitsJson")]
pub struct UnitsDoc(pub MatrixUnitSystem);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitsJson {
    blocks: Vec<usize>,
    units: Vec<Vec<MatDoc>>,
}

impl TryFrom<UnitsJson> for UnitsDoc {
    type Error = String;

    fn try_from(u: UnitsJson) -> Result<UnitsDoc, String> {
        let units = u.units.into_iter().map(unwrap_mats).collect();
        MatrixUnitSystem::new(u.blocks, units)
            .map(UnitsDoc)
            .map_err(|e| e.to_string())
    }
}

impl From<UnitsDoc> for UnitsJson {
    fn from(u: UnitsDoc) -> UnitsJson {
        UnitsJson {
            blocks: u.0.blocks().to_vec(),
            units: u.0.units().iter().map(|us| mats(us)).collect(),
        }
    }
}

/// `{"kind": name, "dim": n, "delta": δ, "seed": s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct SpecDoc(pub EnsembleSpec);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    kind: String,
    dim: usize,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<SpecJson> for SpecDoc {
    type Error = String;

    fn try_from(s: SpecJson) -> Result<SpecDoc, String> {
        let kind: Kind = s.kind.parse().map_err(|e: Error| e.to_string())?;
        Ok(SpecDoc(EnsembleSpec {
            kind,
            dim: s.dim,
            delta: s.delta,
            seed: s.seed,
        }))
    }
}

impl From<SpecDoc> for SpecJson {
    fn from(s: SpecDoc) -> SpecJson {
        SpecJson {
            kind: s.0.kind.name().to_string(),
            dim: s.0.dim,
            delta: s.0.delta,
            seed: s.0.seed,
        }
    }
}

/// A generated ensemble instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceDoc {
    pub spec: SpecDoc,
    pub inputs: Vec<MatDoc>,
    pub defect_op: f64,
    pub defect_2: f64,
    pub report: ReportDoc,
}

impl From<&Instance> for InstanceDoc {
    fn from(i: &Instance) -> InstanceDoc {
        InstanceDoc {
            spec: SpecDoc(i.spec),
            inputs: mats(&i.inputs),
            defect_op: i.defect_op,
            defect_2: i.defect_2,
            report: ReportDoc::from(&i.report),
        }
    }
}

/// Interval ends of a piece; `null` stands for an infinite end.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceJson {
    lo: Option<f64>,
    hi: Option<f64>,
    formula: FormulaJson,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FormulaJson {
    Constant(f64),
    Affine { slope: f64, intercept: f64 },
    InvSqrt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarFnJson {
    pieces: Vec<PieceJson>,
    #[serde(default = "default_outside")]
    outside: String,
}

fn default_outside() -> String {
    "error".into()
}

fn fn_to_json(g: &ScalarFn) -> ScalarFnJson {
    let end = |x: f64| x.is_finite().then_some(x);
    ScalarFnJson {
        pieces: g
            .pieces()
            .iter()
            .map(|p| PieceJson {
                lo: end(p.lo),
                hi: end(p.hi),
                formula: match p.formula {
                    Formula::Constant(c) => FormulaJson::Constant(c),
                    Formula::Affine { slope, intercept } => FormulaJson::Affine { slope, intercept },
                    Formula::InvSqrt => FormulaJson::InvSqrt,
                },
            })
            .collect(),
        outside: match g.outside() {
            Outside::Error => "error",
            Outside::Clamp => "clamp",
        }
        .into(),
    }
}

fn fn_from_json(g: ScalarFnJson) -> Result<ScalarFn, String> {
    let outside = match g.outside.as_str() {
        "error" => Outside::Error,
        "clamp" => Outside::Clamp,
        o => return Err(format!("unknown outside rule '{o}', expected error or clamp")),
    };
    let pieces = g
        .pieces
        .into_iter()
        .map(|p| Piece {
            lo: p.lo.unwrap_or(f64::NEG_INFINITY),
            hi: p.hi.unwrap_or(f64::INFINITY),
            formula: match p.formula {
                FormulaJson::Constant(c) => Formula::Constant(c),
                FormulaJson::Affine { slope, intercept } => Formula::Affine { slope, intercept },
                FormulaJson::InvSqrt => Formula::InvSqrt,
            },
        })
        .collect();
    ScalarFn::new(pieces, outside).map_err(|e| e.to_string())
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum NodeJson {
    Var(usize),
    Unit,
    Adjoint(usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Scale { re: f64, im: f64, of: usize },
    Calculus { function: ScalarFnJson, of: usize },
}

/// Expression arena `{"name", "arity", "root", "nodes": [...]}` where each
/// node is one of `{"var": j}`, `"unit"`, `{"adjoint": k}`, `{"sum": [k, …]}`,
/// `{"product": [k, …]}`, `{"scale": {"re", "im", "of"}}` or
/// `{"calculus": {"function", "of"}}`, children referring to earlier nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExprJson", into = "ExprJson")]
pub struct ExprDoc(pub NcExpr);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprJson {
    #[serde(default)]
    name: Option<String>,
    arity: usize,
    root: usize,
    nodes: Vec<NodeJson>,
}

impl TryFrom<ExprJson> for ExprDoc {
    type Error = String;

    fn try_from(e: ExprJson) -> Result<ExprDoc, String> {
        let nodes = e
            .nodes
            .into_iter()
            .map(|n| {
                Ok(match n {
                    NodeJson::Var(j) => Node::Var(j),
                    NodeJson::Unit => Node::Unit,
                    NodeJson::Adjoint(k) => Node::Adjoint(k),
                    NodeJson::Sum(ks) => Node::Sum(ks),
                    NodeJson::Product(ks) => Node::Product(ks),
                    NodeJson::Scale { re, im, of } => Node::Scale(C64::new(re, im), of),
                    NodeJson::Calculus { function, of } => Node::Calculus(fn_from_json(function)?, of),
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let expr = NcExpr::from_parts(e.arity, nodes, e.root).map_err(|e| e.to_string())?;
        Ok(ExprDoc(match e.name {
            Some(n) => expr.with_name(&n),
            None => expr,
        }))
    }
}

impl From<ExprDoc> for ExprJson {
    fn from(e: ExprDoc) -> ExprJson {
        let nodes = e
            .0
            .nodes()
            .iter()
            .map(|n| match n {
                Node::Var(j) => NodeJson::Var(*j),
                Node::Unit => NodeJson::Unit,
                Node::Adjoint(k) => NodeJson::Adjoint(*k),
                Node::Sum(ks) => NodeJson::Sum(ks.clone()),
                Node::Product(ks) => NodeJson::Product(ks.clone()),
                Node::Scale(z, k) => NodeJson::Scale {
                    re: z.re,
                    im: z.im,
                    of: *k,
                },
                Node::Calculus(g, k) => NodeJson::Calculus {
                    function: fn_to_json(g),
                    of: *k,
                },
            })
            .collect();
        ExprJson {
            name: Some(e.0.name().to_string()),
            arity: e.0.arity(),
            root: e.0.root(),
            nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormDoc {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermDoc {
    pub op: f64,
    pub p_norms: Vec<NormDoc>,
}

impl From<&TermDefect> for TermDoc {
    fn from(t: &TermDefect) -> TermDoc {
        TermDoc {
            op: t.op,
            p_norms: t.p_norms.iter().map(|&(p, value)| NormDoc { p, value }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
    pub relation: String,
    pub dim: usize,
    pub exact: bool,
    pub total: TermDoc,
    pub summands: Vec<TermDoc>,
}

impl From<&DefectReport> for ReportDoc {
    fn from(r: &DefectReport) -> ReportDoc {
        ReportDoc {
            relation: r.relation.clone(),
            dim: r.dim,
            exact: r.is_exact(),
            total: TermDoc::from(&r.total),
            summands: r.summands.iter().map(TermDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDoc {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorDoc {
    fn from(e: &Error) -> ErrorDoc {
        ErrorDoc {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}
