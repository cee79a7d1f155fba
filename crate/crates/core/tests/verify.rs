use kprab::kspecial::SeriesControl;
use kprab::operators::Grid1D;
use kprab::verify::{
    default_suite, reports_to_json, run_identity, run_suite, CaseParams, IdentityCase, IdentityId, TestFunction,
};

fn ctrl() -> SeriesControl<f64> {
    SeriesControl::default()
}

fn grid(n: usize) -> kprab::Grid {
    Grid1D::uniform(2.0, n).unwrap()
}

#[test]
fn nu_one_endpoint_is_algebraic() {
    let case = IdentityCase::new(
        IdentityId::ReduceNu1,
        CaseParams::new(1.5, 0.8, 0.6, 0.4, -0.5),
        TestFunction::OnePlusT,
    );
    let r = run_identity(&case, &grid(1024), &ctrl());
    assert!(r.passed && r.max_rel_err <= 1e-10, "{r:?}");
    assert!(r.refined_rel_err.is_none());
}

#[test]
fn kernel_duality_and_classical_kernel() {
    let p = CaseParams::new(1.5, 0.8, 0.6, 0.4, -0.5).nu(0.4);
    let d = run_identity(
        &IdentityCase::new(IdentityId::Duality, p.at(0.7), TestFunction::Kernel),
        &grid(64),
        &ctrl(),
    );
    assert!(d.max_rel_err <= 1e-12, "{d:?}");
    let c = CaseParams::new(1.0, 1.5, 1.3, 2.0, 0.7);
    let k1 = run_identity(
        &IdentityCase::new(IdentityId::ReduceK1Classical, c, TestFunction::Kernel),
        &grid(64),
        &ctrl(),
    );
    assert!(k1.max_rel_err <= 1e-12, "{k1:?}");
}

#[test]
fn both_sides_take_different_paths() {
    let reports = run_suite(&default_suite(), &grid(512), &ctrl());
    for r in &reports {
        assert_ne!(r.lhs_path, r.rhs_path, "{:?}", r.case);
        assert!(!r.lhs_path.is_empty());
    }
}

#[test]
fn suite_is_deterministic() {
    let cases: Vec<_> = default_suite()
        .into_iter()
        .filter(|c| c.identity_id == IdentityId::Composition)
        .collect();
    let a = reports_to_json(&run_suite(&cases, &grid(256), &ctrl()));
    let mut rev = cases.clone();
    rev.reverse();
    let b = reports_to_json(&run_suite(&rev, &grid(256), &ctrl()));
    assert_eq!(a, b);
}

#[test]
fn invalid_case_fails_with_diagnostic() {
    // the kernel is not an operand for operator-level identities
    let case = IdentityCase::new(
        IdentityId::Composition,
        CaseParams::new(1.0, 1.0, 0.5, 0.2, 0.0).second(0.1, 0.3),
        TestFunction::Kernel,
    );
    let r = run_identity(&case, &grid(64), &ctrl());
    assert!(!r.passed);
    assert!(r.diagnostic.is_some());
    assert!(run_suite(&[], &grid(64), &ctrl()).is_empty());
}

#[test]
fn coarse_grid_fails_operator_checks() {
    let case = IdentityCase::new(
        IdentityId::Composition,
        CaseParams::new(1.5, 0.8, 0.6, 0.4, -0.5).second(0.3, 0.9),
        TestFunction::Sin,
    );
    assert!(!run_identity(&case, &grid(8), &ctrl()).passed);
}

#[test]
fn report_json_round_trips() {
    let cases: Vec<_> = default_suite().into_iter().take(3).collect();
    let reports = run_suite(&cases, &grid(128), &ctrl());
    let back: Vec<kprab::verify::IdentityReport> = serde_json::from_str(&reports_to_json(&reports)).unwrap();
    assert_eq!(back, reports);
}
