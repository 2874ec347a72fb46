mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::{load_schema, prlab, validate, Run};
use serde_json::{json, Value};
use tempfile::TempDir;

const ID2: &str = r#"{"field":"rational","d":2,"m":2,"columns":[["1","0"],["0","1"]]}"#;
const ID3: &str =
    r#"{"field":"rational","d":3,"m":3,"columns":[["1","0","0"],["0","1","0"],["0","0","1"]]}"#;
const E1E2SUM: &str =
    r#"{"field":"rational","d":2,"m":3,"columns":[["1","0"],["0","1"],["1","1"]]}"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("id2.json", ID2);
        f.write("id3.json", ID3);
        f.write("e1e2sum.json", E1E2SUM);
        f
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

/// Checks the exit code, then the stdout document against the report schema.
fn expect(run: &Run, code: i32) -> Value {
    assert_eq!(
        run.code, code,
        "stdout: {}\nstderr: {}",
        run.stdout, run.stderr
    );
    let doc = run.json();
    if let Err(e) = validate(&load_schema("report.schema.json"), &doc) {
        panic!("report does not match the schema: {e}\n{}", run.stdout);
    }
    assert!(!run.stderr.trim().is_empty(), "summary missing on stderr");
    doc
}

fn expect_error(run: &Run) {
    assert_eq!(
        run.code, 2,
        "stdout: {}\nstderr: {}",
        run.stdout, run.stderr
    );
    assert!(run.stdout.is_empty(), "errors print nothing on stdout");
    assert!(!run.stderr.is_empty());
}

fn strings(v: &[&str]) -> Value {
    json!(v)
}

#[test]
fn ksparse_identity() {
    let fx = Fixture::new();
    let id3 = fx.path("id3.json");
    let ok = expect(
        &prlab(&["check", "ksparse", "--frame", &id3, "--k", "1"]),
        0,
    );
    assert_eq!(ok["verdict"], "retrievable");
    assert!(ok["witness"].is_null());

    let bad = expect(
        &prlab(&["check", "ksparse", "--frame", &id3, "--k", "2"]),
        3,
    );
    assert_eq!(bad["verdict"], "not_retrievable");
    assert_eq!(bad["witness"]["kind"], "collision");
    assert_eq!(bad["witness"]["validated"], true);
}

#[test]
fn full_check() {
    let fx = Fixture::new();
    let r = expect(
        &prlab(&["check", "full", "--frame", &fx.path("e1e2sum.json")]),
        0,
    );
    assert_eq!(r["verdict"], "retrievable");
    let r = expect(
        &prlab(&["check", "full", "--frame", &fx.path("id2.json")]),
        3,
    );
    assert_eq!(r["verdict"], "not_retrievable");
}

#[test]
fn classical_nsp() {
    let fx = Fixture::new();
    let one = fx.write("one.json", r#"{"field":"rational","columns":[["1","1"]]}"#);
    let r = expect(&prlab(&["check", "nsp", "--frame", &one, "--k", "1"]), 3);
    assert_eq!(r["witness"]["kind"], "nsp");
    assert_eq!(r["witness"]["margin"], "0");
    expect(
        &prlab(&[
            "check",
            "nsp",
            "--frame",
            &fx.path("e1e2sum.json"),
            "--k",
            "1",
        ]),
        0,
    );
}

#[test]
fn phaseless_nsp() {
    let fx = Fixture::new();
    let id2 = fx.path("id2.json");
    let r = expect(
        &prlab(&["check", "nsp-phaseless", "--frame", &id2, "--k", "1"]),
        0,
    );
    assert_eq!(r["verdict"], "holds");
    let r = expect(
        &prlab(&["check", "nsp-phaseless", "--frame", &id2, "--k", "2"]),
        3,
    );
    assert_eq!(r["witness"]["kind"], "phaseless-nsp");
    assert_eq!(r["witness"]["policy"], "all_subsets");
    let r = expect(
        &prlab(&[
            "check",
            "nsp-phaseless",
            "--frame",
            &id2,
            "--k",
            "2",
            "--policy",
            "cardinality_at_most_k",
        ]),
        3,
    );
    assert_eq!(r["command"]["policy"], "cardinality_at_most_k");
}

#[test]
fn phaseless_nsp_envelope_is_enforced() {
    let fx = Fixture::new();
    let big = fx.path("big.json");
    expect(
        &prlab(&["gen", "--d", "7", "--m", "3", "--bound", "2", "--out", &big]),
        0,
    );
    expect_error(&prlab(&[
        "check",
        "nsp-phaseless",
        "--frame",
        &big,
        "--k",
        "1",
    ]));
}

#[test]
fn solve_recovers_and_fails() {
    let fx = Fixture::new();
    let id2 = fx.path("id2.json");
    let r = expect(&prlab(&["solve", "--frame", &id2, "--x0", "[1,0]"]), 0);
    assert_eq!(r["verdict"], "recovered");
    assert_eq!(r["minimizers"], json!([["1", "0"]]));
    assert_eq!(r["unique"], true);

    let r = expect(&prlab(&["solve", "--frame", &id2, "--x0", "[1,1]"]), 3);
    assert_eq!(r["verdict"], "not_recovered");
    assert_eq!(r["minimizers"].as_array().unwrap().len(), 2);

    // rational strings and a comma list
    let r = expect(&prlab(&["solve", "--frame", &id2, "--x0", "-1/2,0"]), 0);
    assert_eq!(r["minimizers"], json!([["1/2", "0"]]));
}

#[test]
fn solve_from_magnitudes() {
    let fx = Fixture::new();
    let frame = fx.path("e1e2sum.json");
    let b = fx.write("b.json", r#"{"b":["1","1","5"]}"#);
    let r = expect(&prlab(&["solve", "--frame", &frame, "--b", &b]), 0);
    assert_eq!(r["optimal_value"], "infeasible");
    assert_eq!(r["verdict"], "solved");

    let b = fx.write("b2.json", r#"["1","2","3"]"#);
    let r = expect(&prlab(&["solve", "--frame", &frame, "--b", &b]), 0);
    assert_eq!(r["optimal_value"], "3");
    assert_eq!(r["minimizers"], json!([["1", "2"]]));

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    validate(&load_schema("magnitudes.schema.json"), &doc).unwrap();
}

#[test]
fn solve_pattern_cap_is_a_budget_error() {
    let fx = Fixture::new();
    expect_error(&prlab(&[
        "solve",
        "--frame",
        &fx.path("e1e2sum.json"),
        "--x0",
        "[1,2]",
        "--cap",
        "2",
    ]));
}

#[test]
fn collide_identity() {
    let fx = Fixture::new();
    let r = expect(
        &prlab(&["collide", "--frame", &fx.path("id3.json"), "--k", "2"]),
        0,
    );
    assert_eq!(r["witness"]["x"], strings(&["0", "1", "1"]));
    assert_eq!(r["witness"]["y"], strings(&["0", "-1", "1"]));
    // m >= 2k is a precondition failure
    expect_error(&prlab(&[
        "collide",
        "--frame",
        &fx.path("id2.json"),
        "--k",
        "1",
    ]));
}

#[test]
fn falsify_exit_codes() {
    let fx = Fixture::new();
    let real = fx.path("realcplx.json");
    expect(
        &prlab(&[
            "gen",
            "--d",
            "3",
            "--m",
            "6",
            "--field",
            "complex",
            "--real-entries",
            "--seed",
            "7",
            "--out",
            &real,
        ]),
        0,
    );
    let r = expect(
        &prlab(&[
            "falsify", "thm42", "--frame", &real, "--budget", "100000", "--seed", "1",
        ]),
        3,
    );
    assert_eq!(r["witness"]["kind"], "partition");
    assert!(r["witness"]["residual"].as_f64().unwrap() <= 1e-8);

    let generic = fx.path("cplx.json");
    expect(
        &prlab(&[
            "gen", "--d", "4", "--m", "6", "--field", "complex", "--seed", "7", "--out", &generic,
        ]),
        0,
    );
    let r = expect(
        &prlab(&[
            "falsify", "thm33", "--frame", &generic, "--k", "2", "--budget", "500", "--seed", "1",
        ]),
        4,
    );
    assert_eq!(r["inconclusive"], true);
    assert!(r["witness"].is_null());

    // missing --seed
    expect_error(&prlab(&[
        "falsify", "thm42", "--frame", &real, "--budget", "10",
    ]));
}

#[test]
fn bounds_values() {
    let r = expect(
        &prlab(&["bounds", "--k", "3", "--d", "6", "--field", "real"]),
        0,
    );
    assert_eq!(r["bound"], 6);
    assert_eq!(r["status"], "necessary-and-generically-sufficient");
    let r = expect(
        &prlab(&["bounds", "--k", "2", "--d", "4", "--field", "complex"]),
        0,
    );
    assert_eq!(r["status"], "generically-sufficient-minimality-conjectured");
}

#[test]
fn gen_writes_deterministic_frames() {
    let fx = Fixture::new();
    let (a, b) = (fx.path("a.json"), fx.path("b.json"));
    for out in [&a, &b] {
        expect(
            &prlab(&[
                "gen", "--d", "6", "--m", "8", "--field", "rational", "--seed", "42", "--out", out,
            ]),
            0,
        );
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let frame_schema = load_schema("frame.schema.json");
    validate(&frame_schema, &serde_json::from_str(&text).unwrap()).unwrap();

    let r = expect(
        &prlab(&[
            "gen", "--d", "3", "--m", "6", "--field", "complex", "--seed", "7",
        ]),
        0,
    );
    assert_eq!(r["frame"]["field"], "complex64");
    validate(&frame_schema, &r["frame"]).unwrap();
    // an embedded frame reads back as a frame file
    let c = fx.write("c.json", &r["frame"].to_string());
    expect(
        &prlab(&[
            "falsify", "thm42", "--frame", &c, "--budget", "10", "--seed", "0",
        ]),
        4,
    );
}

#[test]
fn usage_and_io_errors_exit_2() {
    let fx = Fixture::new();
    expect_error(&prlab(&["gen", "--d", "0", "--m", "3"]));
    expect_error(&prlab(&["gen", "--d", "3"]));
    expect_error(&prlab(&["frobnicate"]));
    expect_error(&prlab(&[
        "check",
        "ksparse",
        "--frame",
        &fx.path("missing.json"),
        "--k",
        "1",
    ]));
    let garbage = fx.write("garbage.json", "{not json");
    expect_error(&prlab(&["check", "full", "--frame", &garbage]));
    let bad_dims = fx.write(
        "dims.json",
        r#"{"field":"rational","d":3,"columns":[["1","0"]]}"#,
    );
    expect_error(&prlab(&["check", "full", "--frame", &bad_dims]));
    expect_error(&prlab(&["solve", "--frame", &fx.path("id2.json")]));
    expect_error(&prlab(&[
        "solve",
        "--frame",
        &fx.path("id2.json"),
        "--x0",
        "[1,x]",
    ]));
    expect_error(&prlab(&[
        "bounds",
        "--k",
        "3",
        "--d",
        "6",
        "--field",
        "quaternion",
    ]));
    expect_error(&prlab(&[
        "check",
        "ksparse",
        "--frame",
        &fx.path("id2.json"),
        "--k",
        "1",
        "--jobs",
        "0",
    ]));

    let cplx = fx.path("cplx.json");
    expect(
        &prlab(&[
            "gen", "--d", "2", "--m", "3", "--field", "complex", "--out", &cplx,
        ]),
        0,
    );
    expect_error(&prlab(&["check", "ksparse", "--frame", &cplx, "--k", "1"]));
}

#[test]
fn help_and_version_exit_0() {
    for flag in ["--help", "--version"] {
        let run = prlab(&[flag]);
        assert_eq!(run.code, 0);
        assert!(!run.stdout.is_empty());
    }
}

fn replay(doc: &Value, cwd: &Path) -> Run {
    let line = doc["command"]["replay"].as_str().unwrap();
    let rest = line.strip_prefix("prlab ").unwrap();
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_prlab"));
    let out = Command::new("sh")
        .arg("-c")
        .arg(format!("'{}' {rest}", bin.display()))
        .current_dir(cwd)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

#[test]
fn echoed_command_replays_identically() {
    let fx = Fixture::new();
    let (id2, id3) = (fx.path("id2.json"), fx.path("id3.json"));
    let runs = [
        vec!["check", "ksparse", "--frame", &id3, "--k", "2"],
        vec![
            "check",
            "nsp-phaseless",
            "--frame",
            &id2,
            "--k",
            "2",
            "--seed",
            "5",
        ],
        vec!["solve", "--frame", &id2, "--x0", "[1,-1/3]"],
        vec!["collide", "--frame", &id3, "--k", "2"],
        vec!["bounds", "--k", "2", "--d", "3", "--field", "real"],
        vec![
            "gen",
            "--d",
            "2",
            "--m",
            "3",
            "--seed",
            "9",
            "--bound",
            "4",
            "--denominator",
            "3",
        ],
    ];
    for args in runs {
        let first = prlab(&args);
        let doc = first.json();
        let again = replay(&doc, fx.dir.path());
        assert_eq!(again.code, first.code, "{args:?}");
        assert_eq!(again.stdout, first.stdout, "{args:?}");
    }
}

#[test]
fn timing_only_when_requested() {
    let fx = Fixture::new();
    let id3 = fx.path("id3.json");
    let plain = expect(
        &prlab(&["check", "ksparse", "--frame", &id3, "--k", "1"]),
        0,
    );
    assert!(plain.get("timing_ms").is_none());
    let timed = expect(
        &prlab(&["check", "ksparse", "--frame", &id3, "--k", "1", "--timing"]),
        0,
    );
    assert!(timed["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn jobs_do_not_change_output() {
    let fx = Fixture::new();
    let id3 = fx.path("id3.json");
    let base = prlab(&[
        "check",
        "nsp-phaseless",
        "--frame",
        &id3,
        "--k",
        "2",
        "--jobs",
        "1",
    ]);
    for jobs in ["2", "3", "8"] {
        let other = prlab(&[
            "check",
            "nsp-phaseless",
            "--frame",
            &id3,
            "--k",
            "2",
            "--jobs",
            jobs,
        ]);
        assert_eq!(other.stdout, base.stdout);
        assert_eq!(other.code, base.code);
    }
}
