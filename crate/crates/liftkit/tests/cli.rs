use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liftkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn unit(d: usize, i: usize, j: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; d]; d];
    m[i][j] = 1.0;
    m
}

fn add(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().zip(b).map(|(r, q)| r.iter().zip(q).map(|(x, y)| x + y).collect()).collect()
}

fn mat(rows: Vec<Vec<f64>>) -> Value {
    json!({"dim": rows.len(), "re": rows})
}

#[test]
fn projection_rounds_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", &json!({"dim": 2, "re": [[0.95, 0.0], [0.0, 0.05]]}));
    let out = dir.path().join("fixed.json");
    let o = run(&["correct", "--op", "projection", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    assert_eq!(doc["outputs"][0]["re"], json!([[1.0, 0.0], [0.0, 0.0]]));
    assert_eq!(doc["after"]["exact"], json!(true));
    assert_eq!(doc["before"]["exact"], json!(false));
    assert!((doc["distance"]["op"].as_f64().unwrap() - 0.05).abs() < 1e-15);
}

#[test]
fn spectral_gap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", &json!({"dim": 2, "re": [[0.5, 0.0], [0.0, 0.05]]}));
    let out = dir.path().join("r.json");
    let o = run(&["correct", "--op", "projection", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let doc = read(&out);
    assert_eq!(doc["error"]["code"], json!("spectral_gap"));
    assert!(doc["outputs"].is_null());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", &json!({"dim": 2, "re": [[1.0, 0.0], [0.0, 0.0]]}));
    let o = run(&["correct", "--op", "nonsense", "--in", s(&input)]);
    assert_eq!(o.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("projection") && msg.contains("commuting_normals"), "{msg}");

    let broken = write(dir.path(), "b.json", &json!({"dim": 2, "re": [[1.0, 0.0]]}));
    let o = run(&["correct", "--op", "projection", "--in", s(&broken)]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["correct", "--op", "projection", "--in", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn clock_shift_pair_commutes_after_correction() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    let o = run(&["gen", "--op", "clock_shift", "--dim", "8", "--out", s(&pair)]);
    assert!(o.status.success());
    let want = 2.0 * (std::f64::consts::PI / 8.0).sin();
    assert!((read(&pair)["defect_2"].as_f64().unwrap() - want).abs() < 1e-12);
    let out = dir.path().join("fixed.json");
    let o = run(&["correct", "--op", "commuting_normals", "--p", "2", "--in", s(&pair), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    assert_eq!(doc["after"]["exact"], json!(true));
    let dist = &doc["distance"]["p_norms"][0];
    assert_eq!(dist["p"], json!(2.0));
    assert!(dist["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn partial_isometry_from_generated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let o = run(&["gen", "--op", "near_partial_isometry", "--dim", "6", "--delta", "0.05", "--seed", "3", "--out", s(&inst)]);
    assert!(o.status.success());
    let out = dir.path().join("v.json");
    let o = run(&["correct", "--op", "partial_isometry", "--in", s(&inst), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    assert_eq!(doc["outputs"].as_array().unwrap().len(), 3);
    assert_eq!(doc["after"]["exact"], json!(true));
}

#[test]
fn defect_by_name_and_by_builder() {
    let dir = tempfile::tempdir().unwrap();
    let p = mat(vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    let q = mat(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
    let input = write(dir.path(), "t.json", &json!({"inputs": [p, q]}));
    let out = dir.path().join("r.json");
    let o = run(&["defect", "--op", "commutator", "--in", s(&input), "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(read(&out)["total"]["op"], json!(0.0));

    let rel = json!({"builder": "direct_sum", "phi": "projection", "psi": "projection"});
    let sum = mat(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]);
    let input = write(
        dir.path(),
        "d.json",
        &json!({"relation": rel, "inputs": [sum.clone(), mat(vec![vec![0.0; 3]; 3]), sum]}),
    );
    let o = run(&["defect", "--in", s(&input), "--out", s(&out), "--p", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    assert_eq!(r["relation"], json!("direct_sum"));
    assert_eq!(r["summands"].as_array().unwrap().len(), 7);
    assert_eq!(r["exact"], json!(true));

    let o = run(&["defect", "--in", s(&input), "--op", "unknown_rel"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &json!({"kind": "near_unitary", "dim": 5, "delta": 0.01, "seed": 9}));
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(run(&["gen", "--in", s(&spec), "--out", s(&a)]).status.success());
    assert!(run(&["gen", "--in", s(&spec), "--out", s(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let d = read(&a)["defect_op"].as_f64().unwrap();
    assert!((0.005..=0.02).contains(&d));
    let bad = write(dir.path(), "bad.json", &json!({"kind": "nope", "dim": 5}));
    assert_eq!(run(&["gen", "--in", s(&bad)]).status.code(), Some(1));
}

fn sweep_config(dir: &Path, trials: usize) -> PathBuf {
    write(
        dir,
        "sweep.json",
        &json!({
            "corrector": "projection",
            "deltas": [0.001, 0.01, 0.05],
            "dims": [8, 32],
            "trials": trials,
            "p": [1, 4],
            "seed": 5
        }),
    )
}

#[test]
fn projection_sweep_rows_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sweep_config(dir.path(), 200);
    let out = dir.path().join("rows.csv");
    let o = run(&["sweep", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "dim", "delta", "trial", "defect_in_op", "defect_in_2", "defect_out_op", "dist_op", "dist_2",
            "dist_p1", "dist_p4", "runtime_ms", "error"
        ]
    );
    let mut count = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let dim: f64 = rec[0].parse().unwrap();
        assert_eq!(&rec[11], "");
        let out_defect: f64 = rec[5].parse().unwrap();
        assert!(out_defect <= 1e-10 * dim);
        count += 1;
    }
    assert_eq!(count, 1200);
    let summary = read(&dir.path().join("rows.summary.json"));
    assert_eq!(summary["monotone"], json!(true));
    assert_eq!(summary["cells"].as_array().unwrap().len(), 6);
}

#[test]
fn sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.json",
        &json!({"corrector": "unitary", "deltas": [0.01], "dims": [6], "trials": 1, "seed": 11}),
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(run(&["sweep", "--config", s(&cfg), "--out", s(&a)]).status.success());
    let o = bin()
        .args(["sweep", "--config", s(&cfg), "--out", s(&b)])
        .env("LIFTKIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(!bytes.contains(&b'\r'));
}

#[test]
fn sweep_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.json", &json!({"corrector": "projection", "deltas": [], "dims": [8], "trials": 1}));
    let o = run(&["sweep", "--config", s(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deltas"));

    let typo = write(dir.path(), "t.json", &json!({"corrector": "projection", "deltas": [0.1], "dims": [8], "trials": "two"}));
    let o = run(&["sweep", "--config", s(&typo)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));

    let order = write(dir.path(), "o.json", &json!({"corrector": "projection", "deltas": [0.1, 0.01], "dims": [8], "trials": 1}));
    assert_eq!(run(&["sweep", "--config", s(&order)]).status.code(), Some(1));
}

#[test]
fn ultra_completion_of_constant_array() {
    let dir = tempfile::tempdir().unwrap();
    let row = json!({"reps": (0..6).map(|k| mat(vec![vec![0.1 * k as f64, 0.0], vec![0.0, 0.5]])).collect::<Vec<_>>()});
    let input = write(dir.path(), "array.json", &json!({"rows": [row.clone(), row.clone(), row]}));
    let out = dir.path().join("x.json");
    let o = run(&["ultra", "diagonal-completion", "--in", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    for k in 0..6 {
        assert_eq!(doc["completion"]["reps"][k]["re"][0][0], json!(0.1 * k as f64));
    }
    for level in doc["levels"].as_array().unwrap() {
        assert_eq!(level["max_distance_2"], json!(0.0));
    }
}

/// Standard units of `M₂ ⊕ M₃` acting on `ℂ⁹` through the inclusion into
/// `M₄ ⊕ M₅` with multiplicities `[[2, 0], [1, 1]]`.
fn restricted_units() -> Value {
    let m2: Vec<Value> = (0..2)
        .flat_map(|s| (0..2).map(move |t| (s, t)))
        .map(|(s, t)| mat(add(&add(&unit(9, s, t), &unit(9, s + 2, t + 2)), &unit(9, s + 4, t + 4))))
        .collect();
    let m3: Vec<Value> = (0..3)
        .flat_map(|s| (0..3).map(move |t| (s, t)))
        .map(|(s, t)| mat(unit(9, s + 6, t + 6)))
        .collect();
    json!({"blocks": [2, 3], "units": [m2, m3]})
}

#[test]
fn ultra_extends_units() {
    let dir = tempfile::tempdir().unwrap();
    let inc = write(dir.path(), "inc.json", &json!({"a_blocks": [2, 3], "b_blocks": [4, 5], "mult": [[2, 0], [1, 1]]}));
    let pi = write(dir.path(), "pi.json", &json!({"systems": [restricted_units()]}));
    let out = dir.path().join("rho.json");
    let o = run(&["ultra", "extend-units", "--inclusion", s(&inc), "--pi", s(&pi), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&out);
    let check = &doc["checks"][0];
    assert!(check["defect"].as_f64().unwrap() <= 1e-9);
    assert!(check["restriction_error"].as_f64().unwrap() <= 1e-10);
    assert_eq!(doc["systems"][0]["blocks"], json!([4, 5]));

    let bad = write(dir.path(), "bad.json", &json!({"a_blocks": [2, 3], "b_blocks": [4, 5], "mult": [[1, 0], [1, 1]]}));
    let o = run(&["ultra", "extend-units", "--inclusion", s(&bad), "--pi", s(&pi)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inconsistent inclusion"));
}

#[test]
fn ultra_bratteli_tower_has_dyadic_traces() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(
        dir.path(),
        "car.json",
        &json!([
            {"a_blocks": [1], "b_blocks": [2], "mult": [[2]]},
            {"a_blocks": [2], "b_blocks": [4], "mult": [[2]]},
            {"a_blocks": [4], "b_blocks": [8], "mult": [[2]]}
        ]),
    );
    let out = dir.path().join("tower.json");
    let o = run(&["ultra", "bratteli", "--chain", s(&chain), "--depth", "3", "--ambient", "64", "--brief", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let levels = read(&out);
    for (l, level) in levels.as_array().unwrap().iter().enumerate() {
        let sys = &level["systems"][0];
        let tr = sys["unit_traces"][0].as_f64().unwrap();
        assert!((tr - 0.5f64.powi(l as i32 + 1)).abs() < 1e-12);
        assert!(sys["defect"].as_f64().unwrap() <= 64e-10);
    }
    let o = run(&["ultra", "bratteli", "--chain", s(&chain), "--ambient", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quantization"));
}

#[test]
fn ultra_lifts_traces_and_chains() {
    let dir = tempfile::tempdir().unwrap();
    let seq = json!({"reps": [
        mat(vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
        mat(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]])
    ]});
    let input = write(dir.path(), "t.json", &json!({"sequence": seq, "t": 0.5}));
    let out = dir.path().join("p.json");
    assert!(run(&["ultra", "projection-trace", "--in", s(&input), "--out", s(&out)]).status.success());
    for idx in read(&out)["indices"].as_array().unwrap() {
        assert!(idx["identity_residual"].as_f64().unwrap() <= 1e-10);
    }

    let h = json!({"reps": [mat(vec![vec![0.1, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.9]])]});
    let input = write(dir.path(), "c.json", &json!({"sequence": h, "bits": 2}));
    let o = run(&["ultra", "chain", "--in", s(&input), "--brief"]);
    assert!(o.status.success());
    let chains: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(chains[0]["nesting_defect"], json!(0.0));
    assert_eq!(run(&["ultra", "nope"]).status.code(), Some(1));
}
