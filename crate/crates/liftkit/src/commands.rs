//! The `correct`, `defect`, `gen` and `ultra` subcommands.

use std::path::{Path, PathBuf};

use liftkit_core::ensembles::{self, EnsembleSpec, Kind};
use liftkit_core::matcore::op_norm;
use liftkit_core::ncfun::defect;
use liftkit_core::ultra::{
    bratteli_lift, diagonal_completion, dyadic_grid, extend_matrix_units, lift_chain,
    lift_partial_isometry, lift_projection_trace, Inclusion, RepSequence, TailFilter,
};
use liftkit_core::{BlockAlgebra, Mat};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::doc::*;
use crate::registry::{self, Params, RelationDoc};
use crate::{emit, read_json, to_json, usage, Failure, Outcome};

fn from_value<T: DeserializeOwned>(v: Value, origin: &str) -> Outcome<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        usage(format!("{origin}: at {path}: {}", e.into_inner()))
    })
}

/// A tuple of matrices with optional parameters: a single matrix, an array
/// of matrices, or an object with `"inputs"`.
#[derive(Deserialize)]
struct TupleDoc {
    inputs: Vec<MatDoc>,
    #[serde(default)]
    relation: Option<RelationDoc>,
    #[serde(flatten)]
    params: Params,
}

fn read_tuple(path: &Path) -> Outcome<TupleDoc> {
    let origin = path.display().to_string();
    let v: Value = read_json(path)?;
    match v {
        Value::Array(_) => Ok(TupleDoc {
            inputs: from_value(v, &origin)?,
            relation: None,
            params: Params::default(),
        }),
        Value::Object(ref m) if m.contains_key("inputs") => from_value(v, &origin),
        Value::Object(_) => Ok(TupleDoc {
            inputs: vec![from_value(v, &origin)?],
            relation: None,
            params: Params::default(),
        }),
        _ => Err(usage(format!("{origin}: expected a matrix, an array of matrices or an object with \"inputs\""))),
    }
}

fn with_two(ps: &[f64]) -> Vec<f64> {
    let mut all = vec![2.0];
    for &p in ps {
        if !all.contains(&p) {
            all.push(p);
        }
    }
    all
}

#[derive(Serialize)]
pub struct DistanceDoc {
    pub op: f64,
    #[serde(rename = "2")]
    pub two: f64,
    pub p_norms: Vec<NormDoc>,
}

/// `max_k` of `‖out_k − in_k‖` in the operator norm and each p-norm.
pub fn distance(alg: &BlockAlgebra, before: &[Mat], after: &[Mat], ps: &[f64]) -> Outcome<DistanceDoc> {
    let mut d = DistanceDoc {
        op: 0.0,
        two: 0.0,
        p_norms: ps.iter().map(|&p| NormDoc { p, value: 0.0 }).collect(),
    };
    for (a, b) in before.iter().zip(after) {
        let diff = a - b;
        d.op = d.op.max(op_norm(&diff)?);
        d.two = d.two.max(alg.two_norm(&diff));
        for n in d.p_norms.iter_mut() {
            n.value = n.value.max(alg.p_norm(&diff, n.p)?);
        }
    }
    Ok(d)
}

#[derive(Serialize)]
struct CorrectDoc {
    op: String,
    outputs: Option<Vec<MatDoc>>,
    before: ReportDoc,
    after: Option<ReportDoc>,
    distance: Option<DistanceDoc>,
    error: Option<ErrorDoc>,
}

pub fn correct(op: &str, input: &Path, out: Option<&Path>, ps: &[f64]) -> Outcome<()> {
    registry::check_corrector(op)?;
    let doc = read_tuple(input)?;
    let inputs = unwrap_mats(doc.inputs);
    let dim = inputs.first().map_or(0, |m| m.dim());
    if dim == 0 {
        return Err(usage("no input matrices"));
    }
    let alg = registry::algebra(&doc.params, dim);
    let rel = registry::corrector_relation(op, inputs.len(), &doc.params)?;
    let norms = with_two(ps);
    let before = ReportDoc::from(&defect(&rel, &inputs, &alg, &norms)?);
    match registry::apply(op, &inputs, &doc.params) {
        Ok(outputs) => {
            let after = ReportDoc::from(&defect(&rel, &outputs, &alg, &norms)?);
            let report = CorrectDoc {
                op: op.into(),
                distance: Some(distance(&alg, &inputs, &outputs, ps)?),
                outputs: Some(mats(&outputs)),
                before,
                after: Some(after),
                error: None,
            };
            emit(out, &to_json(&report))
        }
        Err(Failure::Math(e)) => {
            let report = CorrectDoc {
                op: op.into(),
                outputs: None,
                before,
                after: None,
                distance: None,
                error: Some(ErrorDoc::from(&e)),
            };
            emit(out, &to_json(&report))?;
            Err(Failure::Math(e))
        }
        Err(f) => Err(f),
    }
}

pub fn defect_cmd(input: &Path, op: Option<&str>, out: Option<&Path>, ps: &[f64]) -> Outcome<()> {
    let doc = read_tuple(input)?;
    let inputs = unwrap_mats(doc.inputs);
    let arity = inputs.len();
    let rel = match (op, &doc.relation) {
        (Some(name), _) => registry::named_relation(name, Some(arity), &doc.params)?,
        (None, Some(r)) => r.resolve(Some(arity))?,
        (None, None) => return Err(usage("no relation: pass --op or give \"relation\"")),
    };
    let dim = inputs.first().map_or(1, |m| m.dim());
    let alg = registry::algebra(&doc.params, dim);
    let report = defect(&rel, &inputs, &alg, &with_two(ps))?;
    emit(out, &to_json(&ReportDoc::from(&report)))
}

/// Ensemble generation from a spec file or from flags; `seed` overrides.
pub fn gen(
    input: Option<&Path>,
    kind: Option<&str>,
    dim: Option<usize>,
    delta: Option<f64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Outcome<()> {
    let mut spec = match input {
        Some(p) => read_json::<SpecDoc>(p)?.0,
        None => EnsembleSpec {
            kind: kind
                .ok_or_else(|| usage("gen needs --in or --op <kind>"))?
                .parse::<Kind>()
                .map_err(|e| usage(e.to_string()))?,
            dim: dim.ok_or_else(|| usage("gen needs --dim"))?,
            delta: delta.unwrap_or(0.0),
            seed: 0,
        },
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    let inst = ensembles::generate(&spec)?;
    emit(out, &to_json(&InstanceDoc::from(&inst)))
}

/// Arguments shared by the `ultra` subcommands.
#[derive(Debug, Clone, Default)]
pub struct UltraArgs {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub inclusion: Option<PathBuf>,
    pub pi: Option<PathBuf>,
    pub chain: Option<PathBuf>,
    pub depth: Option<usize>,
    pub ambient: Vec<usize>,
    pub t: Option<f64>,
    pub brief: bool,
}

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> Outcome<&'a T> {
    v.as_ref().ok_or_else(|| usage(format!("missing --{flag}")))
}

pub const ULTRA: [&str; 6] = [
    "diagonal-completion",
    "projection-trace",
    "chain",
    "partial-isometry",
    "extend-units",
    "bratteli",
];

pub fn ultra(sub: &str, args: &UltraArgs) -> Outcome<()> {
    let text = match sub {
        "diagonal-completion" => completion(args)?,
        "projection-trace" => projection_trace(args)?,
        "chain" => chain(args)?,
        "partial-isometry" => partial_isometry(args)?,
        "extend-units" => extend(args)?,
        "bratteli" => bratteli(args)?,
        other => {
            return Err(usage(format!(
                "unknown ultra command '{other}'; expected one of {}",
                ULTRA.join(", ")
            )))
        }
    };
    emit(args.out.as_deref(), &text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompletionIn {
    rows: Vec<SequenceDoc>,
    /// One-based index sets `E_1 ⊇ E_2 ⊇ …`; defaults to tails.
    #[serde(default)]
    sets: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct LevelDoc {
    level: usize,
    max_distance_2: f64,
    bound: f64,
}

#[derive(Serialize)]
struct CompletionOut {
    completion: SequenceDoc,
    levels: Vec<LevelDoc>,
}

fn completion(args: &UltraArgs) -> Outcome<String> {
    let doc: CompletionIn = read_json(need(&args.input, "in")?)?;
    let rows: Vec<RepSequence> = doc.rows.into_iter().map(|r| r.0).collect();
    let len = rows.first().map_or(0, |r| r.len());
    let filter = match doc.sets {
        Some(sets) => {
            let zero_based = sets
                .into_iter()
                .map(|s| {
                    s.into_iter()
                        .map(|i| i.checked_sub(1).ok_or_else(|| usage("indices in \"sets\" are one-based")))
                        .collect::<Outcome<Vec<_>>>()
                })
                .collect::<Outcome<Vec<_>>>()?;
            TailFilter::new(len, zero_based)?
        }
        None => TailFilter::tails(len, rows.len()),
    };
    let x = diagonal_completion(&rows, &filter)?;
    let levels = (1..=rows.len().min(filter.levels()))
        .map(|n| {
            let row = &rows[n - 1];
            let worst = filter
                .set(n)
                .iter()
                .map(|&i| row.algebras()[i].two_norm(&(&row.reps()[i] - &x.reps()[i])))
                .fold(0.0, f64::max);
            LevelDoc {
                level: n,
                max_distance_2: worst,
                bound: 0.5f64.powi(n as i32),
            }
        })
        .collect();
    Ok(to_json(&CompletionOut {
        completion: SequenceDoc(x),
        levels,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceIn {
    sequence: SequenceDoc,
    #[serde(default)]
    t: Option<f64>,
}

#[derive(Serialize)]
struct TraceIndexDoc {
    index: usize,
    trace_in: f64,
    trace_out: f64,
    distance_2: f64,
    identity_residual: f64,
}

#[derive(Serialize)]
struct TraceOut {
    t: f64,
    lifted: SequenceDoc,
    indices: Vec<TraceIndexDoc>,
}

fn projection_trace(args: &UltraArgs) -> Outcome<String> {
    let doc: TraceIn = read_json(need(&args.input, "in")?)?;
    let t = args.t.or(doc.t).ok_or_else(|| usage("missing target trace: --t or \"t\""))?;
    let a = doc.sequence.0;
    let p = lift_projection_trace(&a, t)?;
    let indices = a
        .algebras()
        .iter()
        .zip(a.reps().iter().zip(p.reps()))
        .enumerate()
        .map(|(i, (alg, (x, y)))| {
            let (ti, to) = (alg.trace(x).re, alg.trace(y).re);
            let d = alg.two_norm(&(x - y));
            TraceIndexDoc {
                index: i + 1,
                trace_in: ti,
                trace_out: to,
                distance_2: d,
                identity_residual: (d - (to - ti).abs().sqrt()).abs(),
            }
        })
        .collect();
    Ok(to_json(&TraceOut {
        t,
        lifted: SequenceDoc(p),
        indices,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainIn {
    sequence: SequenceDoc,
    #[serde(default)]
    grid: Option<Vec<f64>>,
    #[serde(default)]
    bits: Option<u32>,
}

#[derive(Serialize)]
struct ChainDoc {
    index: usize,
    parameters: Vec<f64>,
    traces: Vec<f64>,
    trace_error: f64,
    nesting_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    projections: Option<Vec<MatDoc>>,
}

fn chain(args: &UltraArgs) -> Outcome<String> {
    let doc: ChainIn = read_json(need(&args.input, "in")?)?;
    let grid = doc.grid.unwrap_or_else(|| dyadic_grid(doc.bits.unwrap_or(6)));
    let chains = lift_chain(&doc.sequence.0, &grid)?;
    let out: Vec<ChainDoc> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| ChainDoc {
            index: i + 1,
            trace_error: c.trace_error(),
            nesting_defect: c.nesting_defect(),
            parameters: c.parameters.clone(),
            traces: c.traces.clone(),
            projections: (!args.brief).then(|| mats(&c.projections)),
        })
        .collect();
    Ok(to_json(&out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialIsometryIn {
    e: SequenceDoc,
    f: SequenceDoc,
    w: SequenceDoc,
}

#[derive(Serialize)]
struct PartialIsometryOut {
    lifted: SequenceDoc,
    profile_2: Vec<f64>,
}

fn partial_isometry(args: &UltraArgs) -> Outcome<String> {
    let doc: PartialIsometryIn = read_json(need(&args.input, "in")?)?;
    let (v, profile) = lift_partial_isometry(&doc.e.0, &doc.f.0, &doc.w.0)?;
    Ok(to_json(&PartialIsometryOut {
        lifted: SequenceDoc(v),
        profile_2: profile,
    }))
}

/// Either a bare array or `{"key": [...]}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum ListDoc<T> {
    Bare(Vec<T>),
    Systems { systems: Vec<T> },
    Chain { chain: Vec<T> },
    Targets { targets: Vec<T> },
}

impl<T> ListDoc<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            ListDoc::Bare(v) | ListDoc::Systems { systems: v } | ListDoc::Chain { chain: v } => v,
            ListDoc::Targets { targets: v } => v,
        }
    }
}

#[derive(Serialize)]
struct ExtendCheck {
    index: usize,
    defect: f64,
    restriction_error: f64,
    /// Normalized trace of each block's first diagonal unit.
    unit_traces: Vec<f64>,
}

#[derive(Serialize)]
struct ExtendOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    systems: Option<Vec<UnitsDoc>>,
    checks: Vec<ExtendCheck>,
}

fn unit_traces(sys: &liftkit_core::correct::MatrixUnitSystem) -> Vec<f64> {
    let d = sys.dim() as f64;
    (0..sys.blocks().len())
        .map(|b| sys.unit(b, 0, 0).trace().re / d)
        .collect()
}

fn extend(args: &UltraArgs) -> Outcome<String> {
    let inc: Inclusion = read_json::<InclusionDoc>(need(&args.inclusion, "inclusion")?)?.0;
    let pis: Vec<_> = read_json::<ListDoc<UnitsDoc>>(need(&args.pi, "pi")?)?
        .into_vec()
        .into_iter()
        .map(|u| u.0)
        .collect();
    let targets: Option<Vec<Mat>> = match &args.input {
        Some(p) => Some(unwrap_mats(read_json::<ListDoc<MatDoc>>(p)?.into_vec())),
        None => None,
    };
    let rhos = extend_matrix_units(&inc, &pis, targets.as_deref())?;
    let mut checks = Vec::with_capacity(rhos.len());
    for (i, (rho, pi)) in rhos.iter().zip(&pis).enumerate() {
        let back = inc.restrict(rho)?;
        checks.push(ExtendCheck {
            index: i + 1,
            defect: rho.defect(),
            restriction_error: back.distance(pi),
            unit_traces: unit_traces(rho),
        });
    }
    Ok(to_json(&ExtendOut {
        systems: (!args.brief).then(|| rhos.into_iter().map(UnitsDoc).collect()),
        checks,
    }))
}

#[derive(Serialize)]
struct TowerSystem {
    ambient: usize,
    defect: f64,
    unit_traces: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    units: Option<UnitsDoc>,
}

#[derive(Serialize)]
struct TowerLevel {
    level: usize,
    blocks: Vec<usize>,
    systems: Vec<TowerSystem>,
}

fn bratteli(args: &UltraArgs) -> Outcome<String> {
    let chain: Vec<Inclusion> = read_json::<ListDoc<InclusionDoc>>(need(&args.chain, "chain")?)?
        .into_vec()
        .into_iter()
        .map(|i| i.0)
        .collect();
    if args.ambient.is_empty() {
        return Err(usage("missing --ambient"));
    }
    let depth = args.depth.unwrap_or(chain.len());
    let tower = bratteli_lift(&chain, depth, &args.ambient)?;
    let levels = tower
        .into_iter()
        .enumerate()
        .map(|(l, systems)| TowerLevel {
            level: l + 1,
            blocks: chain[l].b_blocks().to_vec(),
            systems: systems
                .into_iter()
                .zip(&args.ambient)
                .map(|(s, &d)| TowerSystem {
                    ambient: d,
                    defect: s.defect(),
                    unit_traces: unit_traces(&s),
                    units: (!args.brief).then(|| UnitsDoc(s)),
                })
                .collect(),
        })
        .collect::<Vec<_>>();
    Ok(to_json(&levels))
}
