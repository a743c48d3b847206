use std::collections::BTreeSet;

use tdlc::suite::{case_seed, run_check, run_suite, FamilyConfig, SuiteOptions};

fn options(seed: u64) -> SuiteOptions {
    SuiteOptions { seed, cases: 6, ids: vec!["C1".into(), "C5".into(), "C12".into(), "X1".into()] }
}

#[test]
fn same_seed_same_report() {
    for seed in [1, 7, 1 << 40] {
        let a = run_suite(&options(seed)).unwrap().to_json();
        let b = run_suite(&options(seed)).unwrap().to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn single_cases_replay() {
    let cfg = FamilyConfig::shift("S3", "A3");
    for i in 0..4 {
        let seed = case_seed(3, 0, i);
        assert_eq!(run_check("C1", &cfg, seed).unwrap(), run_check("C1", &cfg, seed).unwrap());
    }
}

#[test]
fn case_seeds_are_distinct() {
    let seeds: BTreeSet<u64> = (0..13).flat_map(|c| (0..50).map(move |i| case_seed(1, c, i))).collect();
    assert_eq!(seeds.len(), 13 * 50);
}

#[test]
fn traceability_rows_are_unique() {
    let report = run_suite(&SuiteOptions { cases: 1, ..SuiteOptions::default() }).unwrap();
    let ids: BTreeSet<&str> = report.traceability.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids.len(), report.traceability.len());
    assert_eq!(ids.len(), report.checks.len());
    assert!(report.traceability.iter().all(|r| !r.statement.is_empty() && !r.method.is_empty()));
}

#[test]
fn unknown_ids_are_errors() {
    let err = run_suite(&SuiteOptions { ids: vec!["C99".into()], ..SuiteOptions::default() }).unwrap_err();
    assert_eq!(err.code(), "E_UNKNOWN_CHECK");
}
