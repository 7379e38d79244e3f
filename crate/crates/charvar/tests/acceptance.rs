//! The acceptance suite: one line of output per criterion.

use charvar::audit::{run_all, CRITERIA};
use charvar::Limits;

#[test]
fn acceptance_criteria() {
    let results = run_all(&Limits::default());
    assert_eq!(results.len(), CRITERIA);
    let mut failures = Vec::new();
    for r in &results {
        println!(
            "criterion {:>2}: {} - {} ({})",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        if !r.pass {
            failures.push(r.id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
