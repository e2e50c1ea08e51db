use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const QUOT_TRS: &str = include_str!("../../core/tests/fixtures/quot.trs");
const QUOT_CERT: &str = include_str!("../../core/tests/fixtures/quot.cert.xml");
const SWAP_TRS: &str = include_str!("../../core/tests/fixtures/swap.trs");
const SWAP_HDE: &str = include_str!("../../core/tests/fixtures/swap.hde.cert.xml");
const SWAP_UNIF: &str = include_str!("../../core/tests/fixtures/swap.unif.cert.xml");

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }
}

fn termcert(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_termcert"))
        .args(args)
        .output()
        .unwrap()
}

macro_rules! run {
    ($($arg:expr),* $(,)?) => {
        termcert(&[$(std::ffi::OsStr::new(&$arg)),*])
    };
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn accepted_certificate_exits_zero() {
    let f = Files::new();
    let trs = f.put("quot.trs", QUOT_TRS);
    let cert = f.put("quot.cert.xml", QUOT_CERT);
    let out = run!("check", trs, cert);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "ACCEPTED");
}

#[test]
fn rejected_certificate_names_the_failing_step() {
    let f = Files::new();
    let trs = f.put("quot.trs", QUOT_TRS);
    let mutated = QUOT_CERT.replacen("<monomial coef=\"2\"></monomial>", "", 1);
    assert_ne!(mutated, QUOT_CERT);
    let cert = f.put("mutated.cert.xml", &mutated);
    let out = run!("check", trs, cert);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("/dp/decomp/component[0]/manna_ness"), "{err}");
    assert!(
        err.contains("quot(succ(x0),succ(x1)) -> succ(quot(minus(x0),succ(x1)))"),
        "{err}"
    );
    assert!(err.contains("-x_2 - 1"), "{err}");
}

#[test]
fn input_errors_exit_two() {
    let f = Files::new();
    let trs = f.put("quot.trs", QUOT_TRS);
    let cert = f.put("quot.cert.xml", QUOT_CERT);
    let bad_trs = f.put("bad.trs", "(VAR x) (RULES f(x) -> f(x,x))");
    let bad_cert = f.put("bad.cert.xml", "<dp><trivial/>");
    let missing = f.0.path().join("missing.trs");

    let out = run!("check", bad_trs, cert);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("arities"), "{}", stderr(&out));

    let out = run!("check", trs, bad_cert);
    assert_eq!(out.status.code(), Some(2));

    let out = run!("check", missing, cert);
    assert_eq!(out.status.code(), Some(2));

    let out = run!("dp", missing);
    assert_eq!(out.status.code(), Some(2));

    let out = run!("check", trs);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dp_prints_three_pairs() {
    let f = Files::new();
    let trs = f.put("quot.trs", QUOT_TRS);
    let out = run!("dp", trs);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    assert_eq!(
        lines,
        [
            "minus#(succ(x)) -> minus#(x)",
            "quot#(succ(x),succ(y)) -> quot#(minus(x),succ(y))",
            "quot#(succ(x),succ(y)) -> minus#(x)",
        ]
    );
}

#[test]
fn graph_json_report() {
    let f = Files::new();
    let trs = f.put("quot.trs", QUOT_TRS);
    let out = run!("graph", trs, "--approx", "hde", "--json");
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["approx"], "hde");
    assert_eq!(report["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(
        report["edges"],
        serde_json::json!([[0, 0], [1, 1], [1, 2], [2, 0]])
    );
    assert_eq!(report["sccs"], serde_json::json!([[0], [2], [1]]));
    assert_eq!(report["acyclic"], false);

    let out = run!("graph", trs, "--approx", "rpo");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn graph_text_for_unif() {
    let f = Files::new();
    let trs = f.put("swap.trs", SWAP_TRS);
    let hde = stdout(&run!("graph", trs, "--approx", "hde"));
    let unif = stdout(&run!("graph", trs, "--approx", "unif"));
    assert!(hde.contains("  0 -> 0"), "{hde}");
    assert!(!unif.contains("->  "), "{unif}");
    assert!(!unif.contains("  0 -> 0"), "{unif}");
}

#[test]
fn json_check_report_and_several_certificates() {
    let f = Files::new();
    let trs = f.put("swap.trs", SWAP_TRS);
    let hde = f.put("hde.cert.xml", SWAP_HDE);
    let unif = f.put("unif.cert.xml", SWAP_UNIF);

    let out = run!("--json", "check", trs, hde);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"], "rejected");
    assert_eq!(report["path"], "/dp/decomp/component[0]");
    assert_eq!(
        report["steps"],
        serde_json::json!(["dp", "decomp", "component[0]"])
    );

    let out = run!("check", "--json", trs, unif, hde);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let verdicts: Vec<&str> = report
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["verdict"].as_str().unwrap())
        .collect();
    assert_eq!(verdicts, ["accepted", "rejected"]);
}
