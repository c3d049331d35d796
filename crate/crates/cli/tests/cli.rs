//! End-to-end runs of the `gridcolor` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gridcolor"));
    cmd.env_remove("GRIDCOLOR_CACHE");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_check(name: &str, doc: &Value) {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?} in {doc}");
}

fn json_out(args: &[&str], schema: &str) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = run(&full);
    let doc: Value = serde_json::from_str(stdout(&o).trim()).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    schema_check(schema, &doc);
    (code(&o), doc)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gridcolor-cli-{}-{name}", std::process::id()))
}

#[test]
fn two_color_chart_text() {
    let o = run(&["chart", "2", "--rows", "2..8", "--cols", "2..8"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<String> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split('|').nth(1).unwrap().split_whitespace().collect())
        .collect();
    let want = [
        "CCCCCCC", "CCCCCNN", "CCCCCNN", "CCCNNNN", "CCCNNNN", "CNNNNNN", "CNNNNNN",
    ];
    assert_eq!(rows, want);
}

#[test]
fn chart_json() {
    let (c, doc) = json_out(&["chart", "3", "--rows", "9..12", "--cols", "9..12"], "chart");
    assert_eq!(c, 0);
    assert_eq!(doc["cells"][1][2], "N");
    assert_eq!(doc["cells"][1][1], "C");
    assert_eq!(doc["cells"][0][2], "C");
    assert_eq!(doc["n_range"], serde_json::json!([9, 12]));
}

#[test]
fn classify_exit_codes() {
    let (c, doc) = json_out(&["classify", "19", "17", "4"], "verdict");
    assert_eq!(
        (c, doc["status"].as_str(), doc["rule"].as_str()),
        (1, Some("NotColorable"), Some("profile-cascade"))
    );
    let (c, doc) = json_out(&["classify", "15", "6", "3"], "verdict");
    assert_eq!((c, doc["status"].as_str()), (0, Some("Colorable")));
    assert!(doc["witness_ref"].is_string());
    let (c, doc) = json_out(&["classify", "18", "18", "4", "--nodes", "20000"], "verdict");
    assert_eq!((c, doc["status"].as_str()), (2, Some("Unknown")));
}

#[test]
fn verify_bundled_and_files() {
    assert_eq!(code(&run(&["verify", "bundled/g10x10-3col.grid"])), 0);
    let (c, doc) = json_out(&["verify", "bundled/g21x12-rfset-b.cells"], "verify");
    assert_eq!(c, 1);
    assert!(doc["violation"].is_object());
    let (c, doc) = json_out(&["verify", "bundled/g6x15-strong4-2", "--strong", "2"], "verify");
    assert_eq!((c, doc["strong"].as_bool()), (0, Some(true)));

    let bad = scratch("bad.grid");
    std::fs::write(&bad, "2 2 1\n1 1\n1 1\n").unwrap();
    assert_eq!(code(&run(&["verify", bad.to_str().unwrap()])), 1);
    std::fs::write(&bad, "2 2 1\n1 1\n").unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    schema_check("error", &err);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn construct_then_verify() {
    let strong = scratch("strong.grid");
    let wide = scratch("wide.grid");
    let o = run(&[
        "construct",
        "cplusgen",
        "--c",
        "4",
        "--c-prime",
        "2",
        "-o",
        strong.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["verify", strong.to_str().unwrap(), "--strong", "2"])), 0);
    let o = run(&[
        "construct",
        "expand",
        strong.to_str().unwrap(),
        "--c-prime",
        "2",
        "-o",
        wide.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (c, doc) = json_out(&["verify", wide.to_str().unwrap()], "verify");
    assert_eq!((c, doc["c"].as_u64()), (0, Some(4)));
    let o = run(&["construct", "primepower", "--p", "3", "--s", "1", "--d", "2"]);
    assert!(stdout(&o).starts_with("9 12 3\n"));
    assert_eq!(
        code(&run(&["construct", "primepower", "--p", "4", "--s", "1", "--d", "2"])),
        1
    );
    let _ = std::fs::remove_file(strong);
    let _ = std::fs::remove_file(wide);
}

#[test]
fn maxrf_modes() {
    let (c, doc) = json_out(&["maxrf", "6", "8"], "maxrf");
    assert_eq!(
        (c, doc["lower"].as_u64(), doc["provenance"].as_str()),
        (0, Some(19), Some("closed-form"))
    );
    let (c, doc) = json_out(&["maxrf", "11", "10", "--exact", "--deterministic"], "maxrf");
    assert_eq!((c, doc["upper"].as_u64()), (0, Some(36)));
    let (c, doc) = json_out(&["maxrf", "11", "10", "--bounds"], "maxrf");
    assert_eq!((c, doc["upper"].as_u64()), (2, Some(36)));
}

#[test]
fn obs_and_ramsey() {
    let (c, doc) = json_out(&["obs", "2", "--max-dim", "8"], "obs");
    assert_eq!(c, 0);
    assert_eq!(doc["minimal"], serde_json::json!([[3, 7], [5, 5], [7, 3]]));
    let (c, doc) = json_out(&["ramsey", "3"], "ramsey");
    assert_eq!(
        (c, doc["lower"].as_u64(), doc["upper"].as_u64()),
        (0, Some(11), Some(11))
    );
    let (c, doc) = json_out(&["obs", "4", "--nodes", "20000"], "obs");
    assert_eq!(c, 2);
    assert_eq!(doc["unknown"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["classify", "x", "1", "2"][..],
        &["chart", "2", "--rows", "5..2", "--cols", "2..8"],
        &["frobnicate"],
        &["classify", "5", "5", "0"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 64, "{args:?}");
        let err: Value = serde_json::from_slice(&o.stderr).unwrap();
        schema_check("error", &err);
        assert_eq!(err["error"], "usage");
    }
}

#[test]
fn deterministic_output_is_stable() {
    let args = [
        "classify",
        "12",
        "9",
        "3",
        "--deterministic",
        "--format",
        "json",
        "--nodes",
        "5000",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
}

#[test]
fn config_file_and_cache() {
    let cache = scratch("cache.json");
    let cfg = scratch("cfg.toml");
    let _ = std::fs::remove_file(&cache);
    std::fs::write(
        &cfg,
        format!(
            "format = \"json\"\ncache = {:?}\n[budget]\nnodes = 1000\n",
            cache.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = run(&["classify", "11", "10", "3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let doc: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    schema_check("verdict", &doc);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&cache).unwrap()).unwrap();
    assert_eq!(stored["10,11,3"]["status"], "NotColorable");

    // Env var names the cache when no flag does; a containing grid is settled from it.
    let o = bin()
        .env("GRIDCOLOR_CACHE", &cache)
        .args(["classify", "12", "11", "3", "--format", "json"])
        .output()
        .unwrap();
    let doc: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(doc["rule"], "containment");

    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(code(&run(&["ramsey", "2", "--config", cfg.to_str().unwrap()])), 64);
    let _ = std::fs::remove_file(cache);
    let _ = std::fs::remove_file(cfg);
}
