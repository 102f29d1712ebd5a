//! Verification reports: failure records replay on their own, and reports
//! serialize identically apart from timing.

use symplectica::verify::{replay, run_suite, FailureRecord, Mode, SuiteId, SuiteSpec, VerificationReport, VerifyError};

fn without_timing(mut r: VerificationReport) -> String {
    r.elapsed_ms = 0;
    serde_json::to_string(&r).unwrap()
}

#[test]
fn genuine_failures_replay_as_failures() {
    let spec = SuiteSpec::new(SuiteId::D, 3, 2, Some(1), Mode::Exhaustive);
    let r = run_suite(&spec).unwrap();
    assert!(!r.pass);
    let mut sorted = r.failures.clone();
    sorted.sort();
    assert_eq!(sorted, r.failures);
    for f in r.failures.iter().take(20) {
        assert!(!replay(&spec, f).unwrap(), "{f:?} should fail again");
        // the record survives a JSON round trip
        let back: FailureRecord = serde_json::from_str(&serde_json::to_string(f).unwrap()).unwrap();
        assert!(!replay(&spec, &back).unwrap());
    }
}

#[test]
fn injected_faults_clear_without_injection() {
    let mut spec = SuiteSpec::new(SuiteId::B, 3, 2, None, Mode::Sampled { seed: 3, count: 5 });
    spec.inject_fault = Some("B.triangle-span".into());
    let r = run_suite(&spec).unwrap();
    assert_eq!(r.failures.len(), 5);
    let clean = SuiteSpec { inject_fault: None, ..spec.clone() };
    for f in &r.failures {
        assert!(!replay(&spec, f).unwrap());
        assert!(replay(&clean, f).unwrap());
    }
}

#[test]
fn reports_repeat_exactly() {
    for suite in [SuiteId::A, SuiteId::E, SuiteId::G] {
        let k = if suite == SuiteId::A { None } else { Some(2) };
        let spec = SuiteSpec::new(suite, 3, 2, k, Mode::Sampled { seed: 42, count: 10 });
        let a = run_suite(&spec).unwrap();
        let b = run_suite(&spec).unwrap();
        assert!(a.pass, "{suite}: {:?}", a.failures);
        assert_eq!(without_timing(a), without_timing(b));
    }
}

#[test]
fn different_seeds_draw_different_samples() {
    let draw = |seed| {
        let spec = SuiteSpec::new(SuiteId::C, 3, 2, Some(2), Mode::Sampled { seed, count: 10 });
        let mut spec = spec;
        spec.inject_fault = Some("C.adjacency".into());
        run_suite(&spec).unwrap().failures
    };
    assert_ne!(draw(1), draw(2));
}

#[test]
fn bad_records_are_rejected() {
    let spec = SuiteSpec::new(SuiteId::C, 3, 2, Some(2), Mode::Exhaustive);
    let wrong_arity = FailureRecord { check: "C.adjacency".into(), inputs: vec![] };
    assert!(matches!(replay(&spec, &wrong_arity), Err(VerifyError::MalformedRecord(_))));
    // an isotropic line is not a point of (T-R)_2
    let isotropic = FailureRecord {
        check: "C.adjacency".into(),
        inputs: vec![vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]], vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]],
    };
    assert!(matches!(replay(&spec, &isotropic), Err(VerifyError::MalformedRecord(_))));
}
