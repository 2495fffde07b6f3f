//! Acceptance suite: runs every verification criterion at its stated
//! tolerance and prints one pass/fail line per criterion.

use regfall::verify::{run_suite, Suite, VerifyConfig};

#[test]
fn acceptance_criteria() {
    let cfg = VerifyConfig {
        kmax: 10,
        seed: 7,
        threads: 1,
    };
    let results = run_suite(Suite::All, cfg);
    assert_eq!(results.len(), 11);
    let mut all_ok = true;
    for r in &results {
        println!("{}", r.line());
        all_ok &= r.passed;
    }
    assert!(all_ok, "at least one acceptance criterion failed");
}
