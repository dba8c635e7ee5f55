mod common;

use std::process::Command;

use serde_json::Value;

use common::{cli, core_fixtures, tests_dir};

fn path(p: std::path::PathBuf) -> String {
    p.to_str().unwrap().to_string()
}

fn tiny() -> String {
    path(tests_dir().join("fixtures/tiny.csv"))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(tests_dir().join("golden").join(name)).unwrap()
}

#[test]
fn validate_exit_codes() {
    let fertility = path(core_fixtures().join("data/fertility.csv"));
    let (code, out, err) = cli(&["validate", &path(core_fixtures().join("scaffolds/fig3c.json")), "--data", &fertility]);
    assert_eq!(code, 1);
    assert!(err.contains("MalformedRange"), "{err}");
    let diags: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(diags[0]["code"], "MalformedRange");

    let (code, _, err) = cli(&["validate", &path(core_fixtures().join("scaffolds/fig3c-ordered.json")), "--data", &fertility]);
    assert_eq!(code, 0, "warnings alone pass: {err}");
    assert!(err.contains("OutOfExtent"));

    let good = path(tests_dir().join("fixtures/tiny-highlights.json"));
    let (code, out, err) = cli(&["validate", &good, "--data", &tiny()]);
    assert_eq!((code, out.trim(), err.as_str()), (0, "[]", ""));

    let bad = path(tests_dir().join("fixtures/tiny-bad-range.json"));
    let (code, _, err) = cli(&["validate", &bad, "--data", &tiny()]);
    assert_eq!(code, 1);
    assert_eq!(err, golden("validate_bad_range.stderr").replace("{scaffolds}", &bad));

    assert_eq!(cli(&["validate", "/no/such/file.json", "--data", &tiny()]).0, 2);
    assert_eq!(cli(&["validate", &tiny(), "--data", &tiny()]).0, 2, "a CSV is not a scaffold set");
    assert_eq!(cli(&["validate", &good]).0, 2, "--data is required");
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&["render", "/no/such.csv"]).0, 2);
    assert_eq!(cli(&["bins", &tiny(), "--field", "nope", "--mock", "tiny-origin"]).0, 2);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["ingest", "bins", "highlights", "validate", "render", "serve"] {
        assert!(out.contains(sub), "{sub}");
    }
}

#[test]
fn ingest_prints_summary() {
    let (code, out, _) = cli(&["ingest", &tiny()]);
    assert_eq!(code, 0);
    let summary: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["datasetId"], "ds-31abecc37489f752");
    assert_eq!(summary["rowCount"], 5);
    let measures: Vec<&str> = summary["fields"].as_array().unwrap().iter().map(|f| f["measure"].as_str().unwrap()).collect();
    assert_eq!(measures, ["nominal", "nominal", "quantitative", "temporal"]);
}

#[test]
fn render_outlines() {
    let cars = path(core_fixtures().join("data/cars.csv"));
    let (code, out, _) = cli(&["render", &cars, "--depth", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("Dataset — Dataset with 406 records"));

    let highlights = path(tests_dir().join("fixtures/tiny-highlights.json"));
    let (code, out, _) = cli(&["render", &tiny(), "--scaffolds", &highlights, "--depth", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("render_tiny_depth2.txt"));

    let (code, out, _) = cli(&["render", &tiny(), "--json"]);
    assert_eq!(code, 0);
    let tree: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(tree["kind"], "root");

    let bad = path(tests_dir().join("fixtures/tiny-bad-range.json"));
    let (code, _, err) = cli(&["render", &tiny(), "--scaffolds", &bad]);
    assert_eq!(code, 1);
    assert!(err.contains("MalformedRange"));
}

#[test]
fn generation_with_mocks() {
    let cars = path(core_fixtures().join("data/cars.csv"));
    let mock = path(core_fixtures().join("mock"));
    let (code, out, err) = cli(&["--fixtures-dir", &mock, "bins", &cars, "--field", "Origin", "--mock", "cars-origin"]);
    assert_eq!(code, 0, "{err}");
    let set: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(set["kind"], "bins");
    assert_eq!(set["field"], "Origin");
    assert_eq!(set["groups"].as_array().unwrap().len(), 3);

    let (code, out, _) = cli(&["--fixtures-dir", &mock, "highlights", &cars, "--mock", "cars-highlights"]);
    assert_eq!(code, 0);
    assert!(out.contains("Fuel Efficient Japanese Cars"));

    let barley = path(core_fixtures().join("data/barley.json"));
    let (code, out, err) = cli(&["--fixtures-dir", &mock, "bins", &barley, "--field", "variety", "--mock", "barley-variety-overlap"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("NonExclusiveGroups") && err.contains("after 3 attempt(s)"), "{err}");

    let (code, _, err) = cli(&["--fixtures-dir", &mock, "highlights", &cars, "--mock", "no-such-fixture"]);
    assert_eq!(code, 2, "{err}");

    let (code, out, _) = cli(&["bins", &cars, "--field", "Miles_per_Gallon", "--k", "4"]);
    assert_eq!(code, 0);
    let set: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(set["groups"].as_array().unwrap().len(), 4);
    assert_eq!(set["provenance"]["type"], "fallback");
}

#[test]
fn built_binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_scaffold");
    let fertility = path(core_fixtures().join("data/fertility.csv"));
    let fig = path(core_fixtures().join("scaffolds/fig3c.json"));
    let status = Command::new(bin).args(["validate", &fig, "--data", &fertility]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("MalformedRange"));

    let status = Command::new(bin).args(["validate", "missing.json", "--data", &fertility]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));

    // the default fixture dir is the one shipped with the sources
    let cars = path(core_fixtures().join("data/cars.csv"));
    let status = Command::new(bin)
        .env_remove("SCAFFOLD_FIXTURES_DIR")
        .args(["bins", &cars, "--field", "Origin", "--mock", "cars-origin"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));

    let status = Command::new(bin)
        .env("SCAFFOLD_LLM_BASE_URL", common::dead_endpoint())
        .env_remove("SCAFFOLD_LLM_API_KEY")
        .args(["highlights", &cars])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3), "{}", String::from_utf8_lossy(&status.stderr));
}
