use std::path::PathBuf;
use std::process::Command;

use kahler_core::geometry::{curvature, ChartPoint};
use kahler_core::models::{catalog, load_model, ModelSpec};
use kahler_core::report::VerificationReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kahler-verify"))
}

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

#[test]
fn shipped_model_files_match_the_catalog() {
    for e in catalog() {
        let path = models_dir().join(format!("{}.toml", e.name));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(ModelSpec::from_toml(&text).unwrap(), e.spec, "{}", e.name);
        let from_file = load_model(path.to_str().unwrap()).unwrap();
        let from_catalog = load_model(e.name).unwrap();
        assert_eq!(from_file.name(), e.name);
        let p = ChartPoint::new(0, from_catalog.sampling_center());
        let a = curvature(&from_file, &p, 0).unwrap();
        let b = curvature(&from_catalog, &p, 0).unwrap();
        assert!(a.riemann.iter().zip(b.riemann.iter()).all(|(x, y)| x == y));
    }
}

#[test]
fn toml_roundtrip_and_validation() {
    let spec = ModelSpec::conformal(0.2, 0.4, ModelSpec::product(vec![
        ModelSpec::fubini_study(1, 1.0),
        ModelSpec::complex_hyperbolic(1, -1.0),
    ]));
    assert_eq!(ModelSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    assert!(ModelSpec::from_toml("kind = \"fubini_study\"\ncomplex_dim = 2\nc = 1.0\nextra = 3\n").is_err());
    assert!(ModelSpec::from_toml("kind = \"round_sphere\"\ndim = 0\n").map(|s| s.validate()).map_or(true, |r| r.is_err()));
}

fn verify(args: &[&str]) -> (i32, String) {
    let out = bin().arg("verify").args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn verify_emits_parseable_json_lines() {
    let (code, out) = verify(&["--suite", "berger", "--model", "cp2", "--points", "3", "--seed", "4"]);
    assert_eq!(code, 0);
    let reports: Vec<VerificationReport> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.pass && r.model == "cp2" && r.point.is_some()));
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let args = ["--suite", "variance", "--model", "cp1xcp1", "--points", "4", "--seed", "9", "--no-timing"];
    let (_, a) = verify(&args);
    let (_, b) = verify(&args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let (_, c) = verify(&["--suite", "variance", "--model", "cp1xcp1", "--points", "4", "--seed", "10", "--no-timing"]);
    assert_ne!(a, c);
}

#[test]
fn csv_has_report_columns() {
    let (code, out) = verify(&["--suite", "rayleigh", "--model", "cp1xcp1", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["identity", "model", "point", "lhs", "rhs", "relation", "abs_error", "rel_error", "tol", "pass", "runtime_ms", "note"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[2][0], "rayleigh_bound");
    assert_eq!(&rows[2][5], "le");
}

#[test]
fn out_file_and_table_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let (code, out) = verify(&["--suite", "theorem4", "--model", "cp1xcp1", "--points", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    let (_, table) = verify(&["--suite", "theorem4", "--model", "cp1xcp1", "--points", "2", "--format", "table"]);
    assert!(table.trim_end().ends_with("2/2 passed"));
}

#[test]
fn exit_codes() {
    assert_eq!(verify(&["--suite", "berger", "--model", "no_such_model"]).0, 2);
    assert_eq!(verify(&["--suite", "no_such_suite"]).0, 2);
    // a space form has no Rayleigh quotient to bound
    let (code, out) = verify(&["--suite", "rayleigh", "--model", "cp2"]);
    assert_eq!(code, 1);
    let r: VerificationReport = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert!(!r.pass && r.note.unwrap().contains("constant"));
}

#[test]
fn suite_names_accept_gray_l_spelling() {
    assert_eq!(verify(&["--suite", "gray-L", "--model", "cp2", "--points", "2"]).0, 0);
    assert_eq!(verify(&["--suite", "gray-l", "--model", "cp2", "--points", "2"]).0, 0);
}

#[test]
fn curvature_and_stats_dump_json() {
    let out = bin().args(["curvature", "--model", "cp2", "--point", "0.1,-0.2,0.0,0.3", "--deriv-order", "1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["curvature"]["scalar"].as_f64().unwrap() - 6.0).abs() < 1e-10);
    assert!((v["star"]["star_scalar"].as_f64().unwrap() - 6.0).abs() < 1e-10);
    let out = bin().args(["stats", "--model", "cp1xcp1"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["h_av"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    let out = bin().args(["curvature", "--model", "ch2", "--point", "0.99,0,0,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_names_every_catalog_model() {
    let out = bin().arg("list").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for e in catalog() {
        assert!(text.lines().any(|l| l.starts_with(e.name)), "{}", e.name);
    }
}
