//! ε–δ sweeps: generate instances on a (dim, δ, trial) grid, correct them,
//! post-check exactness and record defects and distances.
//!
//! CSV columns, in order: `dim, delta, trial, defect_in_op, defect_in_2,
//! defect_out_op, dist_op, dist_2, dist_p<p>…, runtime_ms, error`.
//! `runtime_ms` is left empty unless timing is requested, so that repeated
//! runs give identical bytes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use liftkit_core::ensembles::{self, derive_seed, EnsembleSpec, Kind};
use liftkit_core::{exact_tol, BlockAlgebra, Error};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::distance;
use crate::doc::NormDoc;
use crate::registry::{self, Params};
use crate::{emit, parse_json, to_json, usage, Failure, Outcome};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleTemplate {
    pub kind: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub corrector: String,
    /// Defaults to the corrector's own ensemble.
    #[serde(default)]
    pub ensemble: Option<EnsembleTemplate>,
    pub deltas: Vec<f64>,
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Extra p-norms for the distance columns.
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
    #[serde(default)]
    pub timing: bool,
}

impl SweepConfig {
    pub fn parse(text: &str, origin: &str) -> Outcome<SweepConfig> {
        let cfg: SweepConfig = parse_json(text, origin)?;
        cfg.validate().map_err(|m| usage(format!("{origin}: {m}")))?;
        Ok(cfg)
    }

    pub fn kind(&self) -> Outcome<Kind> {
        match &self.ensemble {
            Some(t) => t
                .kind
                .parse()
                .map_err(|e: Error| usage(format!("ensemble.kind: {e}"))),
            None => registry::default_kind(&self.corrector),
        }
    }

    fn validate(&self) -> Result<(), String> {
        registry::check_corrector(&self.corrector).map_err(|f| format!("corrector: {f}"))?;
        self.kind().map_err(|f| f.to_string())?;
        if self.deltas.is_empty() {
            return Err("deltas: the grid is empty".into());
        }
        for (i, w) in self.deltas.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(format!("deltas[{i}]: {w} is not positive"));
            }
        }
        if let Some(i) = self.deltas.windows(2).position(|w| w[1] <= w[0]) {
            return Err(format!("deltas[{}]: the grid must increase", i + 1));
        }
        if self.dims.is_empty() {
            return Err("dims: no dimensions".into());
        }
        if let Some(i) = self.dims.iter().position(|&d| d < 2) {
            return Err(format!("dims[{i}]: dimensions start at 2"));
        }
        if self.trials == 0 {
            return Err("trials: at least one trial per cell".into());
        }
        if let Some(i) = self.p.iter().position(|&p| !(p >= 1.0) || !p.is_finite()) {
            return Err(format!("p[{i}]: p-norms need p ≥ 1"));
        }
        Ok(())
    }
}

/// One CSV row; `None` fields are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub dim: usize,
    pub delta: f64,
    pub trial: usize,
    pub defect_in_op: Option<f64>,
    pub defect_in_2: Option<f64>,
    pub defect_out_op: Option<f64>,
    pub dist_op: Option<f64>,
    pub dist_2: Option<f64>,
    pub dist_p: Vec<Option<f64>>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

fn failure_code(f: &Failure) -> String {
    match f {
        Failure::Math(e) => e.code().into(),
        Failure::Usage(_) => "usage".into(),
    }
}

pub fn trial_seed(master: u64, dim: usize, delta_index: usize, trial: usize) -> u64 {
    derive_seed(&[master, dim as u64, delta_index as u64, trial as u64])
}

fn run_trial(cfg: &SweepConfig, kind: Kind, dim: usize, di: usize, trial: usize) -> Row {
    let delta = cfg.deltas[di];
    let mut row = Row {
        dim,
        delta,
        trial,
        defect_in_op: None,
        defect_in_2: None,
        defect_out_op: None,
        dist_op: None,
        dist_2: None,
        dist_p: vec![None; cfg.p.len()],
        runtime_ms: None,
        error: None,
    };
    let spec = EnsembleSpec {
        kind,
        dim,
        delta,
        seed: trial_seed(cfg.seed, dim, di, trial),
    };
    let inst = match ensembles::generate(&spec) {
        Ok(i) => i,
        Err(e) => {
            row.error = Some(e.code().into());
            return row;
        }
    };
    row.defect_in_op = Some(inst.defect_op);
    row.defect_in_2 = Some(inst.defect_2);
    let start = cfg.timing.then(Instant::now);
    let outputs = match registry::apply(&cfg.corrector, &inst.inputs, &Params::default()) {
        Ok(o) => o,
        Err(f) => {
            row.error = Some(failure_code(&f));
            return row;
        }
    };
    row.runtime_ms = start.map(|s| s.elapsed().as_secs_f64() * 1e3);
    let post = ensembles::measure(kind, &outputs).map_err(Failure::from);
    let alg = BlockAlgebra::matrix(dim);
    let dist = distance(&alg, &inst.inputs, &outputs, &cfg.p);
    match (post, dist) {
        (Ok((_, out_op, _)), Ok(d)) => {
            row.defect_out_op = Some(out_op);
            row.dist_op = Some(d.op);
            row.dist_2 = Some(d.two);
            row.dist_p = d.p_norms.iter().map(|n| Some(n.value)).collect();
            if out_op > exact_tol(dim) {
                row.error = Some("not_exact".into());
            }
        }
        (Err(f), _) | (_, Err(f)) => row.error = Some(failure_code(&f)),
    }
    row
}

/// Worker pool honoring `LIFTKIT_THREADS`.
fn pool() -> Outcome<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("LIFTKIT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("LIFTKIT_THREADS: '{v}' is not a thread count")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| usage(format!("thread pool: {e}")))
}

/// All rows, ordered by (dim, δ, trial) whatever the schedule.
pub fn run(cfg: &SweepConfig) -> Outcome<Vec<Row>> {
    let kind = cfg.kind()?;
    let mut cells = Vec::new();
    for &dim in &cfg.dims {
        for di in 0..cfg.deltas.len() {
            for t in 0..cfg.trials {
                cells.push((dim, di, t));
            }
        }
    }
    let rows = pool()?.install(|| {
        cells
            .par_iter()
            .map(|&(dim, di, t)| run_trial(cfg, kind, dim, di, t))
            .collect::<Vec<_>>()
    });
    Ok(rows)
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:e}"))
}

pub fn header(ps: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "dim",
        "delta",
        "trial",
        "defect_in_op",
        "defect_in_2",
        "defect_out_op",
        "dist_op",
        "dist_2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(ps.iter().map(|p| format!("dist_p{p}")));
    h.push("runtime_ms".into());
    h.push("error".into());
    h
}

pub fn to_csv(rows: &[Row], ps: &[f64]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header(ps)).expect("in-memory write");
    for r in rows {
        let mut rec = vec![
            r.dim.to_string(),
            r.delta.to_string(),
            r.trial.to_string(),
            num(r.defect_in_op),
            num(r.defect_in_2),
            num(r.defect_out_op),
            num(r.dist_op),
            num(r.dist_2),
        ];
        rec.extend(r.dist_p.iter().map(|&v| num(v)));
        rec.push(num(r.runtime_ms));
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub dim: usize,
    pub delta: f64,
    pub successes: usize,
    pub failures: usize,
    pub median_defect_in_op: Option<f64>,
    pub median_defect_out_op: Option<f64>,
    pub median_dist_op: Option<f64>,
    pub median_dist_2: Option<f64>,
    pub median_dist_p: Vec<NormDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub dim: usize,
    pub deltas: Vec<f64>,
    pub median_dist_2: Vec<Option<f64>>,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub corrector: String,
    pub kind: String,
    pub seed: u64,
    pub trials: usize,
    pub cells: Vec<Cell>,
    pub curves: Vec<Curve>,
    /// Whether the median 2-norm distance is nondecreasing in δ for every dim.
    pub monotone: bool,
}

pub fn summarize(cfg: &SweepConfig, rows: &[Row]) -> Outcome<Summary> {
    let mut cells = Vec::new();
    let mut curves = Vec::new();
    for &dim in &cfg.dims {
        let mut meds = Vec::new();
        for &delta in &cfg.deltas {
            let here: Vec<&Row> = rows.iter().filter(|r| r.dim == dim && r.delta == delta).collect();
            let good: Vec<&&Row> = here.iter().filter(|r| r.ok()).collect();
            let med = |f: &dyn Fn(&Row) -> Option<f64>| {
                median(&mut good.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            let cell = Cell {
                dim,
                delta,
                successes: good.len(),
                failures: here.len() - good.len(),
                median_defect_in_op: med(&|r| r.defect_in_op),
                median_defect_out_op: med(&|r| r.defect_out_op),
                median_dist_op: med(&|r| r.dist_op),
                median_dist_2: med(&|r| r.dist_2),
                median_dist_p: cfg
                    .p
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| NormDoc {
                        p,
                        value: med(&|r| r.dist_p[k]).unwrap_or(f64::NAN),
                    })
                    .collect(),
            };
            meds.push(cell.median_dist_2);
            cells.push(cell);
        }
        let nondecreasing = meds
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a <= b));
        curves.push(Curve {
            dim,
            deltas: cfg.deltas.clone(),
            median_dist_2: meds,
            nondecreasing,
        });
    }
    Ok(Summary {
        corrector: cfg.corrector.clone(),
        kind: cfg.kind()?.name().into(),
        seed: cfg.seed,
        trials: cfg.trials,
        monotone: curves.iter().all(|c| c.nondecreasing),
        cells,
        curves,
    })
}

fn summary_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.summary.json"))
}

/// The `sweep` subcommand: flags override the config's output, seed and
/// p-norms.
pub fn sweep_cmd(config: &Path, out: Option<&Path>, seed: Option<u64>, ps: &[f64]) -> Outcome<()> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| usage(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = SweepConfig::parse(&text, &config.display().to_string())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if !ps.is_empty() {
        cfg.p = ps.to_vec();
    }
    if let Some(o) = out {
        cfg.output = Some(o.to_path_buf());
    }
    let rows = run(&cfg)?;
    let csv = to_csv(&rows, &cfg.p);
    let summary = to_json(&summarize(&cfg, &rows)?);
    emit(cfg.output.as_deref(), &csv)?;
    let target = cfg
        .summary
        .clone()
        .or_else(|| cfg.output.as_deref().map(summary_path));
    match target {
        Some(p) => emit(Some(&p), &summary),
        None => {
            eprint!("{summary}");
            Ok(())
        }
    }
}
