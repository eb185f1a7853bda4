//! End-to-end checks of the `loopgroup` binary: exit codes, determinism,
//! dumps and the check catalog.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loopgroup"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

fn dump(cfg: &Path, target: &str, out: &Path) -> Output {
    bin().args(["dump", "--config"]).arg(cfg).args(["--target", target, "--out"]).arg(out).output().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn body(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

#[test]
fn identity_frame_passes_with_zero_defects() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&config("akns_identity.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["summary"]["pass"], Value::Bool(true));
    // Probes that bring their own data (a stabilizer element h, a constant k,
    // a generic tangent) carry rounding from that data; everything else is exact.
    let probes = ["stabilizer_invariance", "conjugation_covariance", "tau_shift_constancy"];
    for rec in r["records"].as_array().unwrap() {
        if rec["role"] != "check" {
            continue;
        }
        let defect = rec["max_defect"].as_f64().unwrap();
        if probes.contains(&rec["name"].as_str().unwrap()) || rec["case"] == "generic tangent" {
            assert!(defect <= 1e-15, "{}", rec["name"]);
        } else {
            assert_eq!(defect, 0.0, "{}", rec["name"]);
        }
    }
}

#[test]
fn unipotent_fixture_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(run(&config("akns_e21.json"), &out, &[]).status.code(), Some(0));
    let r = read_json(&out);
    assert_eq!(r["notes"]["u_at_origin"], "[0+0i, 0+0i; 0+2i, 0+0i]");
    assert_eq!(r["notes"]["u_nonconstant_sup"], "0.000e0");
    assert_eq!(r["notes"]["lntau_sup"], "0.000e0");
    let t2 = r["records"].as_array().unwrap().iter().find(|x| x["name"] == "flow_akns_t2").unwrap();
    assert_eq!(t2["max_defect"].as_f64().unwrap(), 0.0);
}

#[test]
fn every_suite_contributes_and_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let cfg = config("vector_recovery.json");
    assert_eq!(run(&cfg, &a, &[]).status.code(), Some(0));
    assert_eq!(run(&cfg, &b, &[]).status.code(), Some(0));
    let (ra, rb) = (read_json(&a), read_json(&b));
    assert_eq!(serde_json::to_string(&body(ra.clone())).unwrap(), serde_json::to_string(&body(rb)).unwrap());
    assert_eq!(ra["schema_version"], 1);
    assert!(ra["scenario"]["prng"].as_str().unwrap().starts_with("chacha8"));
    let names: Vec<&str> = ra["records"].as_array().unwrap().iter().map(|x| x["name"].as_str().unwrap()).collect();
    for must in ["factorization", "flow_consistency", "tau_closedness", "recovery"] {
        assert!(names.contains(&must), "{must}");
    }
}

#[test]
fn seed_and_order_overrides_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(run(&config("akns_seeded.json"), &out, &["--seed", "99", "--order", "3"]).status.code(), Some(0));
    let r = read_json(&out);
    assert_eq!(r["scenario"]["f"]["seeded"]["seed"], 99);
    assert_eq!(r["scenario"]["order"], 3);
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut base: Value = read_json(&config("akns_seeded.json"));
    base["suites"] = serde_json::json!(["factorization"]);

    // Check failure: a zero tolerance on a defect at rounding level.
    let mut v = base.clone();
    v["tolerances"] = serde_json::json!({"factorization": 0.0});
    let o = run(&write_config(dir.path(), "fail.json", &v), &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(read_json(&out)["summary"]["pass"], Value::Bool(false));

    // Config errors.
    let mut v = base.clone();
    v["family"] = "gl_n".into();
    v["n"] = 3.into();
    v["a"] = serde_json::json!([[1, 0], [1, 0], [0, 1]]);
    assert_eq!(run(&write_config(dir.path(), "dup.json", &v), &out, &[]).status.code(), Some(2));
    let mut v = base.clone();
    v["family"] = "kdv_twisted".into();
    v["n"] = 3.into();
    v["variant"] = "kdv_twisted".into();
    assert_eq!(run(&write_config(dir.path(), "kdv3.json", &v), &out, &[]).status.code(), Some(2));
    let mut v = base.clone();
    v["f"] = serde_json::json!({"explicit": {"terms": [{"degree": 0, "re": [[2, 0], [0, 1]]}]}});
    assert_eq!(run(&write_config(dir.path(), "notminus.json", &v), &out, &[]).status.code(), Some(2));
    let mut v = base.clone();
    v["schema_version"] = 7.into();
    assert_eq!(run(&write_config(dir.path(), "schema.json", &v), &out, &[]).status.code(), Some(2));
    assert_eq!(run(&dir.path().join("missing.json"), &out, &[]).status.code(), Some(2));

    // Numerical failure: a storage window too shallow for the requested jets.
    let mut v = base.clone();
    v["window_lo"] = (-4).into();
    let o = run(&write_config(dir.path(), "shallow.json", &v), &out, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("factorization"));
}

#[test]
fn explicit_frame_must_satisfy_its_reality_condition() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = read_json(&config("nls.json"));
    // I + λ⁻¹e₂₁ is not unitary on the circle.
    v["f"] = serde_json::json!({"explicit": {"terms": [
        {"degree": 0, "re": [[1, 0], [0, 1]]},
        {"degree": -1, "re": [[0, 0], [1, 0]]}
    ]}});
    let o = run(&write_config(dir.path(), "c.json", &v), &dir.path().join("r.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

fn data_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["multi_index", "lambda_degree", "row", "col", "re", "im"]);
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn dump_of_identity_potential_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    assert_eq!(dump(&config("akns_identity.json"), "u", &out).status.code(), Some(0));
    let rows = data_rows(&out);
    assert!(!rows.is_empty());
    let mut orders = std::collections::BTreeSet::new();
    for r in &rows {
        assert_eq!(r[1], "");
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[5].parse::<f64>().unwrap(), 0.0);
        orders.insert(r[0].split(';').map(|e| e.parse::<u32>().unwrap()).sum::<u32>());
    }
    assert_eq!(orders.into_iter().max(), Some(4));
}

#[test]
fn dump_of_unipotent_potential_has_one_nonzero_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    assert_eq!(dump(&config("akns_e21.json"), "u", &out).status.code(), Some(0));
    let nonzero: Vec<Vec<String>> = data_rows(&out)
        .into_iter()
        .filter(|r| r[4].parse::<f64>().unwrap() != 0.0 || r[5].parse::<f64>().unwrap() != 0.0)
        .collect();
    assert_eq!(nonzero, vec![vec!["0;0;0", "", "2", "1", "0", "2"]]);
}

#[test]
fn dumps_are_sorted_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["M", "E", "lntau"] {
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        assert_eq!(dump(&config("akns_seeded.json"), target, &a).status.code(), Some(0));
        assert_eq!(dump(&config("akns_seeded.json"), target, &b).status.code(), Some(0));
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let keys: Vec<(Vec<u32>, Option<i32>, u32, u32)> = data_rows(&a)
            .iter()
            .map(|r| {
                let mi = r[0].split(';').map(|e| e.parse().unwrap()).collect();
                (mi, r[1].parse().ok(), r[2].parse().unwrap(), r[3].parse().unwrap())
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted, "{target}");
    }
    let v = dir.path().join("v.csv");
    assert_eq!(dump(&config("gl2_virasoro.json"), "v", &v).status.code(), Some(0));
    assert_eq!(dump(&config("akns_seeded.json"), "v", &v).status.code(), Some(2));
    assert_eq!(dump(&config("akns_seeded.json"), "Q", &v).status.code(), Some(2));
}

#[test]
fn reloaded_dump_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("M.csv");
    let cfg = config("akns_seeded.json");
    assert_eq!(dump(&cfg, "M", &m).status.code(), Some(0));
    let mut v: Value = read_json(&cfg);
    v["f"] = serde_json::json!({"explicit": {"csv": "M.csv"}});
    let reload = write_config(dir.path(), "reload.json", &v);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(run(&cfg, &a, &[]).status.code(), Some(0));
    assert_eq!(run(&reload, &b, &[]).status.code(), Some(0));
    let (ra, rb) = (read_json(&a), read_json(&b));
    assert_eq!(ra["records"], rb["records"]);
    assert_eq!(ra["notes"], rb["notes"]);
    assert_eq!(ra["summary"], rb["summary"]);
}

#[test]
fn catalog_listing() {
    let o = bin().arg("list-checks").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 20);
    let entry = lines.iter().find(|l| l.starts_with("thm7.1_tau_uu\t")).unwrap();
    assert!(entry.ends_with("(ln τ_f)_{t_{i,1}t_{k,1}} = −v_{ik}v_{ki}"));
    assert!(lines.iter().any(|l| l.starts_with("virasoro_bracket\t")));
}
