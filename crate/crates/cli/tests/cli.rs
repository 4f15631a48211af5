use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mccm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mccm")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn clusters(dir: &Path) -> (String, String) {
    let data = dir.join("data");
    let out = mccm(&["gen", "clusters", "--dim", "3", "--out", s(&data)]);
    assert!(out.status.success());
    (
        data.join("train.jsonl").to_str().unwrap().into(),
        data.join("test.jsonl").to_str().unwrap().into(),
    )
}

#[test]
fn threads_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = clusters(dir.path());
    for v in ["fm", "cs", "le"] {
        let one = json(&mccm(&["classify", "--train", &train, "--test", &test, "--variant", v]));
        let four = json(&mccm(&["classify", "--train", &train, "--test", &test, "--variant", v, "--threads", "4"]));
        let (a, b) = (one["queries"].as_array().unwrap(), four["queries"].as_array().unwrap());
        assert_eq!(a.len(), b.len());
        for (qa, qb) in a.iter().zip(b) {
            assert_eq!(qa["predicted"], qb["predicted"]);
            for (da, db) in qa["distances"].as_array().unwrap().iter().zip(qb["distances"].as_array().unwrap()) {
                assert!((da.as_f64().unwrap() - db.as_f64().unwrap()).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn weights_flag_adds_simplex_weights() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = clusters(dir.path());
    let r = json(&mccm(&["classify", "--train", &train, "--test", &test, "--weights"]));
    let w = &r["queries"][0]["weights"];
    assert_eq!(w.as_array().unwrap().len(), 3);
    let sum: f64 = w[0].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-10);
    let plain = json(&mccm(&["classify", "--train", &train, "--test", &test]));
    assert!(plain["queries"][0].get("weights").is_none());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = clusters(dir.path());
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"variant":"le","threads":2}"#).unwrap();
    let r = json(&mccm(&["classify", "--train", &train, "--test", &test, "--config", s(&cfg)]));
    assert_eq!(r["variant"], "le");
    let r = json(&mccm(&["classify", "--train", &train, "--test", &test, "--config", s(&cfg), "--variant", "cs"]));
    assert_eq!(r["variant"], "cs");

    fs::write(&cfg, r#"{"bogus":1}"#).unwrap();
    let out = mccm(&["classify", "--train", &train, "--test", &test, "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
}

#[test]
fn bad_inputs_give_structured_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = clusters(dir.path());
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"label\":\"a\",\"dim\":2,\"matrix\":[1,0,0,1]}\n{\"label\":\"a\",\"dim\":2,\"matrix\":[1,2,2,1]}\n").unwrap();
    let out = mccm(&["classify", "--train", &train, "--test", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["schema"], 1);
    assert_eq!(err["error"]["line"], 2);

    let out = mccm(&["classify", "--train", &train, "--test", s(&dir.path().join("missing.jsonl"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");

    let out = mccm(&["descriptor", "--recipe", "sift", &train]);
    assert_eq!(out.status.code(), Some(2));
    let out = mccm(&["classify", "--train", &train]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure1_split_separates_nn_from_fm() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("fig");
    assert!(mccm(&["gen", "figure1", "--seed", "3", "--out", s(&data)]).status.success());
    let (train, test) = (data.join("train.jsonl"), data.join("test.jsonl"));
    let nn = json(&mccm(&["classify", "--train", s(&train), "--test", s(&test), "--variant", "geo-nn"]));
    let fm = json(&mccm(&["classify", "--train", s(&train), "--test", s(&test), "--variant", "fm"]));
    assert_eq!(nn["queries"][0]["predicted"], "c1");
    assert_eq!(fm["queries"][0]["predicted"], "c2");
}

#[test]
fn benchmark_lists_requested_variants() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = clusters(dir.path());
    let r = json(&mccm(&["benchmark", "--train", &train, "--test", &test, "--variants", "le,fm"]));
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["variant"], "le");
    assert_eq!(rows[1]["accuracy"], 1.0);
    assert_eq!(r["queries"], 15);
}

#[test]
fn synthetic_report_is_reproducible() {
    let args = ["synthetic", "--trials", "3", "--multipliers", "5,10"];
    let a = json(&mccm(&args));
    let b = json(&mccm(&[&args[..], &["--threads", "3"]].concat()));
    assert_eq!(a["mean_error"], b["mean_error"]);
    assert_eq!(a["mean_error"]["fm"].as_array().unwrap().len(), 2);
    assert_eq!(a["config"]["seed"], 20_170_501);
    let c = json(&mccm(&[&args[..], &["--seed", "1"]].concat()));
    assert_ne!(a["mean_error"], c["mean_error"]);
}

fn write_grid(path: &Path, blocks: usize, seed: u64) {
    let mut text = String::new();
    for b in 0..blocks {
        if b > 0 {
            text.push('\n');
        }
        for r in 0..8u64 {
            let row: Vec<String> = (0..8u64)
                .map(|c| {
                    let v = ((r * 7 + c * 3 + seed * 11 + b as u64 * 5) % 13) as f64 + 0.1 * (r * c) as f64;
                    v.to_string()
                })
                .collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
    }
    fs::write(path, text).unwrap();
}

#[test]
fn descriptor_recipes_produce_loadable_records() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gray: Vec<_> = (0..3).map(|i| p.join(format!("g{i}.csv"))).collect();
    for (i, g) in gray.iter().enumerate() {
        write_grid(g, 1, i as u64);
    }
    let rgb = p.join("img.csv");
    write_grid(&rgb, 3, 7);

    let out = p.join("brodatz.jsonl");
    let mut args = vec!["descriptor", "--recipe", "brodatz", "--label", "tex", "--out", s(&out)];
    args.extend(gray.iter().map(|g| s(g)));
    assert!(mccm(&args).status.success());
    let recs: Vec<Value> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["dim"], 5);
    assert_eq!(recs[0]["label"], "tex");
    assert!(recs[0]["ridge"].as_f64().unwrap() > 0.0);
    assert!(mccm_cli::dataset::load_dataset(&out).is_ok());

    let out = mccm(&["descriptor", "--recipe", "ethz", "--resize", "6x6", "--unit-variance", s(&rgb)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["dim"], 11);
    assert_eq!(rec["label"], "img");

    let mut args = vec!["descriptor", "--recipe", "dct-set", "--dct-k", "2", "--subtract-mean-frame", "--ridge", "0.01"];
    args.extend(gray.iter().map(|g| s(g)));
    let out = mccm(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["dim"], 2);
    assert_eq!(rec["ridge"], 0.01);
}
