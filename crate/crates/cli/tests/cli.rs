use lti_reach::exact::FOFormula;
use lti_reach::model::parse_problem;
use std::io::Write;
use std::process::{Command, Output};

fn reach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reach")).args(args).output().expect("run reach")
}

fn code(args: &[&str]) -> i32 {
    reach(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    let out = reach(args);
    String::from_utf8(out.stdout).unwrap()
}

fn temp_doc(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("reach-cli-{}-{}.json", std::process::id(), name));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn verdict_exit_codes() {
    assert_eq!(code(&["--fixture", "diag_b1", "--target", "0,0", "decide"]), 0);
    assert_eq!(code(&["--fixture", "diag_b1", "decide"]), 2);
    assert_eq!(code(&["--fixture", "diag_b1", "--target", "5,5", "decide"]), 1);
    assert_eq!(code(&["--fixture", "diag_b1", "--target", "21/10,31/10", "decide"]), 1);
    assert_eq!(code(&["--fixture", "spring", "decide"]), 0);
    assert_eq!(code(&["--fixture", "sqrt2_pair", "decide"]), 2);
}

#[test]
fn bounded_boundary_hit_is_reachable() {
    let out = reach(&["--fixture", "car", "decide"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reachable: true"), "{}", text);
}

#[test]
fn error_exit_codes() {
    assert_eq!(code(&["decide"]), 64);
    assert_eq!(code(&["no-such-command"]), 64);
    assert_eq!(code(&["--fixture", "nope", "decide"]), 64);
    assert_eq!(code(&["-i", "/nonexistent/problem.json", "decide"]), 66);
    let bad = temp_doc("bad", "{\"A\": [[1]]");
    assert_eq!(code(&["-i", bad.to_str().unwrap(), "decide"]), 65);
    let wide = temp_doc("wide", r#"{"A": [["-1", "0"], ["0", "-1"]], "B": [["1"]], "target": {"point": ["0", "0"]}}"#);
    assert_eq!(code(&["-i", wide.to_str().unwrap(), "decide"]), 65);
    assert_eq!(code(&["--fixture", "diag_b1", "--tau", "10", "formula", "--theory", "r0"]), 69);
    assert_eq!(code(&["--fixture", "diag_b1", "--precision", "40", "--time-limit", "0.05", "approx"]), 75);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn support_prints_exact_corner() {
    let text = stdout(&["--fixture", "diag_b1", "support", "--dir", "1,1"]);
    assert!(text.contains("(2, 3)"), "{}", text);
}

#[test]
fn document_output_is_json() {
    let text = stdout(&["--fixture", "diag_b1", "--format", "document", "decide"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "BoundaryHit");
    assert_eq!(v["boundary_witness"]["point"], serde_json::json!(["2", "3"]));
}

#[test]
fn formula_output_parses_back() {
    let text = stdout(&["--fixture", "diag_b1", "formula", "--theory", "r0"]);
    let f = FOFormula::parse(text.trim()).unwrap();
    assert_eq!(f.to_string().trim(), text.trim());
    let smt = stdout(&["--fixture", "diag_b1", "formula", "--theory", "r0", "--smtlib"]);
    assert!(smt.contains("(assert"), "{}", smt);
}

#[test]
fn fixtures_are_valid_documents() {
    let list = stdout(&["fixtures"]);
    for name in ["diag_b1", "diag_b2", "diag_sum", "sqrt2_pair", "car", "spring"] {
        assert!(list.contains(name));
        let doc = stdout(&["fixtures", name]);
        parse_problem(&doc).unwrap_or_else(|e| panic!("{}: {}", name, e));
    }
}

#[test]
fn same_seed_same_output() {
    let run = |seed: &str| stdout(&["--fixture", "diag_sum", "--seed", seed, "--samples", "50", "simulate"]);
    let a = run("3");
    assert_eq!(a, run("3"));
    assert_ne!(a, run("4"));
    assert_eq!(a.lines().count(), 51);
    let jobs = stdout(&["--fixture", "diag_sum", "--seed", "3", "--samples", "50", "--jobs", "1", "simulate"]);
    assert_eq!(a, jobs);
}

#[test]
fn approx_formats() {
    let csv = stdout(&["--fixture", "diag_b1", "--precision", "3", "--format", "csv", "approx"]);
    assert!(csv.starts_with("c0,c1,support_lo,support_hi,width"));
    let svg = stdout(&["--fixture", "diag_b1", "--precision", "3", "--samples", "20", "--format", "svg", "approx"]);
    assert!(svg.trim_start().starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn skolem_reduction_with_claims() {
    let out = reach(&["--fixture", "skolem_cos", "skolem-reduce", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["(b)", "(c)", "(e)", "(f)"] {
        let line = text.lines().find(|l| l.starts_with(id)).unwrap_or_else(|| panic!("no claim {} in {}", id, text));
        assert!(line.contains(": pass"), "{}", line);
    }
}

#[test]
fn sample_files_match_bundled_fixtures() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for name in ["diag_b1", "diag_b2", "diag_sum", "sqrt2_pair", "car", "spring", "skolem_cos"] {
        let file = std::fs::read_to_string(dir.join(format!("{}.json", name))).unwrap();
        assert_eq!(file, stdout(&["fixtures", name]), "{}", name);
    }
    let car = dir.join("car.json");
    assert_eq!(code(&["-i", car.to_str().unwrap(), "decide"]), 2);
}
