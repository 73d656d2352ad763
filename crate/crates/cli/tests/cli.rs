//! End-to-end runs of the `ucc-synth` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ucc-synth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn example1_writes_region_and_sweep() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["--out", s(&out), "example1", "--p", "0.1", "--q", "0.1", "--theta-points", "400"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out.join("region.json"));
    let doc = &doc["example1"];
    let min = doc["structured_min"].as_f64().unwrap();
    assert!(min <= 0.9596 + 1e-3, "structured min {min}");
    assert!(doc["unstructured_min"].as_f64().unwrap() > min);
    let sweep = fs::read_to_string(out.join("theta_sweep.csv")).unwrap();
    let header = sweep.lines().next().unwrap();
    for col in ["theta", "sum_rate", "feasible"] {
        assert!(header.split(',').any(|h| h == col), "missing {col} in {header}");
    }
    assert!(sweep.lines().count() > 400);
    assert!(out.join("run_manifest.json").exists());
}

#[test]
fn full_rank_coset_codebook_covers_exactly() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "soft.json",
        r#"{ "mode": "soft-cover", "seed": 5, "trials": 4,
             "soft_cover": { "source": { "kind": "binary", "px": 0.3, "flip": 0.2 },
                             "n": [3, 5], "rates": [1.0], "coset": true } }"#,
    );
    let out = tmp.path().join("out");
    let o = run(&["--out", s(&out), "soft-cover", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("results.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let [ens, tv, seed] = ["ensemble", "tv", "seed"].map(|c| h.iter().position(|x| x == c).unwrap());
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    let coset: Vec<_> = rows.iter().filter(|x| &x[ens] == "coset").collect();
    assert_eq!(coset.len(), 8);
    for row in coset {
        assert!(row[tv].parse::<f64>().unwrap() < 1e-12, "tv {}", &row[tv]);
        assert!(!row[seed].is_empty());
    }
}

#[test]
fn independent_output_gives_zero_tv() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "soft.json",
        r#"{ "mode": "soft-cover", "trials": 3,
             "soft_cover": { "source": { "kind": "binary", "px": 0.5, "flip": 0.5 },
                             "n": [2, 4], "rates": [0.2, 0.6] } }"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(code(&run(&["--out", s(&out), "soft-cover", "--config", s(&cfg)])), 0);
    let mut r = csv::Reader::from_path(out.join("results.csv")).unwrap();
    let tv = r.headers().unwrap().iter().position(|x| x == "tv").unwrap();
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|x| x[tv].parse::<f64>().unwrap() < 1e-12));
}

fn synth_config(dir: &Path, budget: Option<usize>) -> PathBuf {
    let budget = budget.map(|b| format!(r#", "budget": {b}"#)).unwrap_or_default();
    write(
        dir,
        "synth.json",
        &format!(
            r#"{{ "mode": "synthesize", "seed": 3, "trials": 3,
                 "source": {{ "kind": "binary", "p_flip": 0.1, "theta1": 0.2, "theta2": 0.2, "out_flip": 0.05 }},
                 "delta": 1.5, "eta": 0.1,
                 "codes": [ {{ "n": 2, "k": 1, "l1": 1, "l2": 1 }},
                            {{ "n": 4, "k": 1, "l1": 2, "l2": 2, "N1": 2, "N2": 2 }} ]{budget} }}"#
        ),
    )
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = synth_config(tmp.path(), None);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run(&["--out", s(&a), "synthesize", "--config", s(&cfg)])), 0);
    let manifest = a.join("run_manifest.json");
    let m = read_json(&manifest);
    assert_eq!(m["seeds"], serde_json::json!([3, 4, 5]));
    let o = run(&["--out", s(&b), "synthesize", "--config", s(&manifest)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    // every row carries its seed
    let csv = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| !l.split(',').nth(7).unwrap().is_empty()));

    let c = tmp.path().join("c");
    let o = run(&["--seed", "3", "--jobs", "1", "--out", s(&c), "synthesize", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.join("results.csv")).unwrap(), fs::read(c.join("results.csv")).unwrap());
}

#[test]
fn over_budget_points_give_partial_exit() {
    let tmp = TempDir::new().unwrap();
    let cfg = synth_config(tmp.path(), Some(1000));
    let out = tmp.path().join("out");
    let o = run(&["--out", s(&out), "synthesize", "--config", s(&cfg)]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.matches(",ok").count(), 3);
    assert_eq!(csv.matches("over_budget").count(), 3);
}

#[test]
fn validate_reports_named_violations() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();

    let o = run(&["validate", "--config", "../../configs/example1.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["problems"].as_array().unwrap().len(), 0);

    write(dir, "bad.json", r#"{ "alphabets": [["0", "1"]], "probs": [0.5, 0.6] }"#);
    let cfg = write(
        dir,
        "sc.json",
        r#"{ "mode": "soft-cover", "soft_cover": { "source": { "kind": "files", "joint": "bad.json", "q": "bad.json" },
             "n": [2], "rates": [0.5] } }"#,
    );
    let o = run(&["validate", "--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("soft_cover.source"), "{text}");

    let cfg = synth_config(dir, Some(50));
    let o = run(&["validate", "--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let msgs: Vec<&str> = report["problems"].as_array().unwrap().iter().map(|p| p["message"].as_str().unwrap()).collect();
    assert!(msgs.iter().any(|m| m.contains("enumeration budget exceeded") && m.contains("cells")), "{msgs:?}");
    assert!(report["costs"].as_array().unwrap().len() >= 2);

    let broken = write(dir, "broken.json", "{\n  \"mode\": \"synthesize\",\n  \"trials\": x\n}");
    let o = run(&["synthesize", "--config", s(&broken)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.json:3:"));
}

#[test]
fn mode_mismatch_is_invalid() {
    let o = run(&["--out", "/nonexistent/never", "synthesize", "--config", "../../configs/example1.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn plot_data_reshapes_results() {
    let tmp = TempDir::new().unwrap();
    let cfg = synth_config(tmp.path(), None);
    let out = tmp.path().join("out");
    assert_eq!(code(&run(&["--out", s(&out), "synthesize", "--config", s(&cfg)])), 0);
    let tidy = tmp.path().join("tidy.csv");
    let o = run(&["plot-data", "--input", s(&out.join("results.csv")), "--kind", "tv-vs-n", "--output", s(&tidy)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&tidy).unwrap();
    assert_eq!(text.lines().next().unwrap(), "series,n,seed,tv");
    assert_eq!(text.lines().count(), 1 + 2 * 3);

    let empty = write(tmp.path(), "empty.csv", "");
    let o = run(&["plot-data", "--input", s(&empty), "--kind", "theta-sweep"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "theta,sum_rate,feasible,curve");

    let o = run(&["plot-data", "--input", s(&empty), "--kind", "scatter"]);
    assert_eq!(code(&o), 2);
}
