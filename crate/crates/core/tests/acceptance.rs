//! The eight acceptance criteria at their pinned tolerances and budgets.

use std::io::Write;

use semifn::suite;

#[test]
fn acceptance_criteria() {
    // the stderr handle is not captured by the test harness
    let mut err = std::io::stderr();
    let outcomes: Vec<suite::Outcome> = suite::CRITERIA
        .iter()
        .map(|(id, _)| {
            let o = suite::run(*id);
            writeln!(err, "{o}").expect("write to stderr");
            o
        })
        .collect();
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
