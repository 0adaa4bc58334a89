use std::fs;
use std::path::Path;
use std::process::Command;

use onebit_cli::{run_with, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, EXIT_VALIDITY};
use onebit_core::{BitCode, CodeSet};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn onebit(args: &[&str]) -> Run {
    let mut argv = vec!["onebit"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_table_reports_union_bound() {
    let r = onebit(&["bounds", "--n", "800", "--delta", "0.2", "--eps", "0.01"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let line = r.stdout.lines().find(|l| l.starts_with("rip_union")).unwrap();
    assert!(line.split_whitespace().any(|f| f == "225"), "{line}");
    assert!(r.stdout.contains("linear_jl"));
    assert!(r.stdout.contains("q = 12.15319661"));
}

#[test]
fn bounds_csv_and_validity() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bounds.csv");
    let r = onebit(&["bounds", "--n", "800", "--delta", "0.2", "--eps1", "0.5", "--eps2", "0.1", "--out", path(&csv)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("formula_id,n,delta,eps1,eps2,m_value,m_int,validity_note\n"));
    assert!(text.contains("rip_m_eps1,800,0.2,0.5,0.1,115.3051718,116,"));

    let r = onebit(&["bounds", "--n", "100", "--delta", "0.2", "--eps1", "0.5", "--eps2", "0.1"]);
    assert_eq!(r.code, EXIT_VALIDITY);
    assert!(r.stderr.contains("--n"), "{}", r.stderr);
    let r = onebit(&["bounds", "--n", "100", "--delta", "0.2", "--eps1", "0.5", "--eps2", "0.1", "--force"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("forced"));
    let r = onebit(&["bounds", "--n", "5", "--eps1", "0.5", "--eps2", "0.1"]);
    assert_eq!(r.code, EXIT_VALIDITY);
}

#[test]
fn usage_errors_name_the_flag() {
    let r = onebit(&["bounds", "--n", "10", "--eps", "1.5"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("--eps"), "{}", r.stderr);
    assert_eq!(onebit(&["bounds", "--n", "10"]).code, EXIT_USAGE);
    assert_eq!(onebit(&["bounds", "--n", "10", "--eps1", "0.5"]).code, EXIT_USAGE);
    assert_eq!(onebit(&["frobnicate"]).code, EXIT_USAGE);
    let r = onebit(&["sweep", "--n", "4", "--m-grid", "9:3:1"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("--m-grid"));
    let r = onebit(&["simulate", "--n", "4", "--m", "4", "--boundary", "closed"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(onebit(&["simulate", "--n", "4", "--m", "4", "--threads", "0", "--seed", "1"]).code, EXIT_USAGE);
}

#[test]
fn help_and_version_succeed() {
    let r = onebit(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("figure"));
    assert_eq!(onebit(&["--version"]).code, EXIT_OK);
    assert_eq!(onebit(&["oracle", "--help"]).code, EXIT_OK);
}

#[test]
fn oracle_outputs() {
    let r = onebit(&["oracle", "birthday", "--n", "10", "--m", "7"]);
    assert_eq!(r.stdout.trim(), "0.697260009173 = 50242878679888125/72057594037927936");
    let r = onebit(&["oracle", "tail", "--m", "10", "--a", "7"]);
    assert_eq!(r.stdout.trim(), "0.171875000000 = 11/64");
    let r = onebit(&["oracle", "tail", "--m", "10", "--delta", "0.2"]);
    assert_eq!(r.stdout.trim(), "0.343750000000 = 11/32");
    let r = onebit(&["oracle", "rip3", "--m", "1", "--delta", "0.4"]);
    assert_eq!(r.stdout, "strict: 0.000000000000 = 0/1\ninclusive: 0.000000000000 = 0/1\n");
    let r = onebit(&["oracle", "eta", "--n", "10", "--m", "7"]);
    assert!(r.stdout.contains("eta_pairwise: 0.002746582031 contains=false"), "{}", r.stdout);
    assert!(r.stdout.contains("eta_general:  0.09063720703 contains=true"));
}

#[test]
fn check_reports_identical_codes() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("two_orthogonal.csv");
    fs::write(&points, "1,0,0\n0,1,0\n").unwrap();
    let codes = dir.path().join("equal_codes.bin");
    let code = BitCode::parse("0110").unwrap();
    CodeSet::new(vec![code.clone(), code]).unwrap().write_binary(fs::File::create(&codes).unwrap()).unwrap();

    let r = onebit(&["check", "--points", path(&points), "--codes", path(&codes), "--delta", "0.4"]);
    assert_eq!(r.code, EXIT_CHECK_FAILED);
    assert!(r.stdout.contains("max_deviation: 0.5"), "{}", r.stdout);
    assert!(r.stdout.contains("deviation=-0.5"));
    let r = onebit(&["check", "--points", path(&points), "--codes", path(&codes)]);
    assert_eq!(r.code, EXIT_CHECK_FAILED);
    assert!(r.stdout.contains("(0, 1)"));

    let half = dir.path().join("half.bin");
    let codes = vec![BitCode::parse("0110").unwrap(), BitCode::parse("0101").unwrap()];
    CodeSet::new(codes).unwrap().write_binary(fs::File::create(&half).unwrap()).unwrap();
    let r = onebit(&["check", "--points", path(&points), "--codes", path(&half), "--delta", "0.1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);

    let r = onebit(&["check", "--points", path(&points), "--codes", path(&dir.path().join("missing.bin"))]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("missing.bin"));
}

#[test]
fn embed_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.csv");
    fs::write(&points, "1,0,0,0\n0,1,0,0\n0,0,1,0\n0.6,0.8,0,0\n").unwrap();
    let codes = dir.path().join("codes.bin");
    let pairs = dir.path().join("pairs.csv");
    let args = ["embed", "--points", path(&points), "--m", "4000", "--seed", "3", "--codes", path(&codes), "--out", path(&pairs)];
    let r = onebit(&args);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stderr.contains("seed: 3"));
    let first = fs::read(&codes).unwrap();
    let set = CodeSet::read_binary(first.as_slice()).unwrap();
    assert_eq!((set.len(), set.m()), (4, 4000));
    let table = fs::read_to_string(&pairs).unwrap();
    assert_eq!(table.lines().next().unwrap(), "i,j,hamming,geodesic,deviation");
    assert_eq!(table.lines().count(), 7);

    assert_eq!(onebit(&args).code, EXIT_OK);
    assert_eq!(fs::read(&codes).unwrap(), first);

    let r = onebit(&["check", "--points", path(&points), "--codes", path(&codes), "--delta", "0.1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
}

#[test]
fn embed_rejects_non_unit_rows() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.csv");
    fs::write(&points, "1,0\n2,0\n").unwrap();
    let codes = dir.path().join("c.bin");
    let r = onebit(&["embed", "--points", path(&points), "--m", "8", "--seed", "1", "--codes", path(&codes)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("row 2"), "{}", r.stderr);
    let r = onebit(&["embed", "--points", path(&points), "--m", "8", "--seed", "1", "--codes", path(&codes), "--normalize"]);
    assert_eq!(r.code, EXIT_OK);
}

#[test]
fn simulate_and_sweep_are_reproducible() {
    let a = onebit(&["simulate", "--n", "10", "--m", "7", "--trials", "5000", "--seed", "4", "--threads", "1"]);
    let b = onebit(&["simulate", "--n", "10", "--m", "7", "--trials", "5000", "--seed", "4", "--threads", "8"]);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with("m,trials,successes,p_hat,ci_lo,ci_hi,window_lo,window_hi,eta_form\n7,5000,"));

    let args = ["sweep", "--n", "20", "--delta", "0.2", "--m-grid", "20:60:20", "--trials", "500", "--seed", "4"];
    let a = onebit(&args);
    let b = onebit(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 4);
    assert!(a.stdout.lines().nth(1).unwrap().ends_with(",general"));
}

#[test]
fn simulate_explicit_points() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.csv");
    fs::write(&points, "1,0,0\n0,1,0\n0,0,1\n").unwrap();
    let r = onebit(&["simulate", "--points", path(&points), "--m", "8", "--delta", "0.2", "--trials", "200", "--seed", "2"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let r = onebit(&["simulate", "--points", path(&points), "--n", "4", "--m", "8", "--seed", "2"]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn budget_guard() {
    let r = onebit(&["simulate", "--n", "800", "--m", "200", "--delta", "0.2", "--trials", "1000", "--budget", "1e6", "--seed", "1"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("budget"), "{}", r.stderr);
}

#[test]
fn figure_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let args = ["figure", "--trials", "10", "--m-grid", "100:220:40", "--seed", "5", "--out", path(&csv)];
    let r = onebit(&args);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("closed form (eps1, red):   m = 115.3051718"));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,trials,successes,p_hat,ci_lo,ci_hi,window_lo,window_hi,eta_form");
    let ms: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ms, ["100", "140", "180", "220"]);

    let svg = fs::read_to_string(csv.with_extension("svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let polylines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(polylines.len(), 1);
    assert_eq!(polylines[0].attribute("points").unwrap().split(' ').count(), 4);
    let rules: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("rule")).collect();
    let colours: Vec<_> = rules.iter().map(|n| n.attribute("stroke").unwrap()).collect();
    assert_eq!(colours, ["red", "green"]);
    let labels: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("rule-label"))
        .map(|n| n.text().unwrap().to_string())
        .collect();
    assert_eq!(labels, ["eps1 = 0.5: m = 115.3", "eps2 = 0.1: m = 203.2"]);

    assert_eq!(onebit(&args).code, EXIT_OK);
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);
    assert_eq!(onebit(&["figure", "--n", "100", "--out", path(&csv)]).code, EXIT_VALIDITY);
}

#[test]
fn binary_takes_seed_from_environment() {
    let exe = env!("CARGO_BIN_EXE_onebit");
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(exe);
        cmd.args(["simulate", "--n", "5", "--m", "6", "--trials", "2000"]).args(extra);
        match env {
            Some(seed) => cmd.env("ONEBIT_SEED", seed),
            None => cmd.env_remove("ONEBIT_SEED"),
        };
        cmd.output().unwrap()
    };
    let a = run(Some("17"), &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&a.stderr).lines().next(), Some("seed: 17"));
    let b = run(None, &["--seed", "17"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(Some("99"), &["--seed", "17"]);
    assert_eq!(a.stdout, c.stdout);
    let d = run(None, &[]);
    assert!(String::from_utf8_lossy(&d.stderr).starts_with("seed: "));

    let bad = Command::new(exe).args(["check"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
