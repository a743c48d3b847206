use std::process::{Command, Output};

fn tdlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdlc")).args(args).env_remove("TDLC_VERTEX_BUDGET").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

#[test]
fn matrix_scale_with_cross_checks() {
    let o = tdlc(&["scale", "--family", "matrix", "--p", "5", "--diag", "5,1/5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("25"));
    for method in ["index_at_tidy", "minimized_over_filtration", "lattice_coindex"] {
        assert!(out.contains(&format!("check {method} 25")), "{out}");
    }
}

#[test]
fn scale_json_is_byte_stable() {
    let args = ["scale", "--family", "matrix", "--p", "5", "--diag", "25,5,1/125", "--json"];
    let a = tdlc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, tdlc(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["value"], "9765625");
}

#[test]
fn shift_tidy_reaches_all_o() {
    let o = tdlc(&["tidy", "--family", "shift", "--F", "S3", "--O", "A3", "--constraint", "0:trivial"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("output_is_all_o true"), "{out}");
    assert!(out.contains("scale 1\n") && out.contains("scale_inverse 1\n"), "{out}");
}

#[test]
fn matrix_coset_tree_dot_has_out_degree_four() {
    let o = tdlc(&["tree", "--family", "matrix", "--p", "2", "--diag", "2,1/2", "--depth", "2", "--format", "dot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    let mut out_degree = std::collections::BTreeMap::<String, usize>::new();
    for line in dot.lines().filter(|l| l.contains("->")) {
        let from = line.trim().split("->").next().unwrap().trim().to_string();
        *out_degree.entry(from).or_default() += 1;
    }
    // the root V^(0) is expanded fully, so it has all four children
    assert!(out_degree.values().any(|&d| d == 4), "{out_degree:?}");
    assert!(out_degree.values().all(|&d| d <= 4));
}

#[test]
fn tree_scale_is_q_to_the_l() {
    let o = tdlc(&["scale", "--family", "tree", "--q", "3", "--l", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("9"));
    let o = tdlc(&["scale", "--family", "tree", "--q", "3", "--l", "2", "--inverse"]);
    assert_eq!(stdout(&o).lines().next(), Some("9"));
}

#[test]
fn membership_verdicts() {
    let o = tdlc(&["member", "--family", "matrix", "--p", "5", "--diag", "5,1/5", "--x", "1,7;0,1", "--target", "U"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("U yes"));
    let o = tdlc(&["member", "--family", "shift", "--x", "0:(12)", "--target", "P", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdicts"]["P"]["verdict"], "no");
}

#[test]
fn errors_are_single_coded_lines() {
    let cases: [(&[&str], &str); 5] = [
        (&["tidy", "--family", "shift", "--constraint", "0:set:(12),(13)"], "E_NOT_SUBGROUP"),
        (&["scale", "--family", "matrix", "--p", "6", "--diag", "6,1"], "E_NOT_PRIME"),
        (&["tree", "--family", "shift", "--budget", "3"], "E_BUDGET"),
        (&["scale", "--family", "shift", "--O", "C7"], "E_NOT_SUBGROUP"),
        (&["suite", "--check", "C99"], "E_UNKNOWN_CHECK"),
    ];
    for (args, code) in cases {
        let o = tdlc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with(&format!("{code}: ")), "{args:?}: {err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn budget_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_tdlc"))
        .args(["tree", "--family", "shift"])
        .env("TDLC_VERTEX_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_BUDGET"));
}

#[test]
fn suite_subset_passes() {
    let o = tdlc(&["suite", "--cases", "5", "--check", "C1", "--check", "C6", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn unipotent_scale_is_one() {
    let o = tdlc(&["scale", "--family", "matrix", "--p", "5", "--matrix", "1,1;0,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("1"));
    assert!(out.contains("check lattice_coindex 1"), "{out}");
    // tidying needs the eigenbasis
    let o = tdlc(&["tidy", "--family", "matrix", "--p", "5", "--matrix", "1,1;0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_NO_DIAGONAL_FORM"));
}
