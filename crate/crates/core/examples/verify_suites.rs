//! Runs every property suite at (3,2) and replays one failure record.
//!
//! cargo run --release --example verify_suites

use symplectica::verify::{replay, run_suite, Mode, SuiteId, SuiteSpec};

fn main() {
    let mut first_failure = None;
    for suite in SuiteId::ALL {
        let levels: Vec<Option<usize>> = if matches!(suite, SuiteId::A | SuiteId::B) { vec![None] } else { (1..4).map(Some).collect() };
        for k in levels {
            let spec = SuiteSpec::new(suite, 3, 2, k, Mode::Exhaustive);
            let r = run_suite(&spec).unwrap();
            println!(
                "{suite} ({:<25}) k={:<4} {} {:>6} checks {:>4} failures {:>5} ms",
                suite.title(),
                k.map_or("-".into(), |k| k.to_string()),
                if r.pass { "PASS" } else { "FAIL" },
                r.checks_run,
                r.failures.len(),
                r.elapsed_ms
            );
            if let Some(notes) = r.details.get("notes") {
                println!("    notes: {notes}");
            }
            if first_failure.is_none() {
                first_failure = r.failures.first().cloned().map(|f| (spec, f));
            }
        }
    }
    if let Some((spec, record)) = first_failure {
        println!("replaying {} on {:?}", record.check, record.inputs);
        println!("holds on replay: {}", replay(&spec, &record).unwrap());
    }
}
