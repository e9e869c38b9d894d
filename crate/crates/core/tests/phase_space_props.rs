use nhtwist_core::deformations::{DeformationSpec, Family, Variant};
use nhtwist_core::phase_space::{
    from_noncommutative, poisson_bracket, to_noncommutative, verify_deformed_brackets,
    verify_jacobi, CanonicalState, NcCoord, DEFAULT_STEP,
};
use proptest::prelude::*;

fn any_spec() -> impl Strategy<Value = DeformationSpec> {
    (
        prop::sample::select(Family::ALL.to_vec()),
        prop::sample::select(Variant::ALL.to_vec()),
        -1.0..1.0f64,
        0.5..5.0f64,
    )
        .prop_map(|(f, v, k, tau)| DeformationSpec::new(f, v, k, Some(tau)).unwrap())
}

fn any_state() -> impl Strategy<Value = CanonicalState> {
    (
        0.0..3.0f64,
        prop::array::uniform3(-2.0..2.0f64),
        prop::array::uniform3(-2.0..2.0f64),
    )
        .prop_map(|(t, x, p)| CanonicalState::new(t, x, p))
}

#[test]
fn k6_newton_hooke_plus_passes_both_checks() {
    let spec = DeformationSpec::newton_hooke(Family::K6, Variant::NhPlus, 0.1, 2.0).unwrap();
    let at = CanonicalState::new(1.3, [0.4, -1.1, 0.7], [0.2, 0.9, -0.5]);
    let brackets = verify_deformed_brackets(&spec, &at, 1e-6);
    let jacobi = verify_jacobi(&spec, &at, 1e-6);
    assert_eq!(brackets.checks.len(), 15);
    assert_eq!(jacobi.checks.len(), 20);
    assert!(
        brackets.passed && jacobi.passed,
        "{} {}",
        brackets.max_residual,
        jacobi.max_residual
    );
}

#[test]
fn report_json_shape() {
    let at = CanonicalState::new(0.0, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let report = verify_deformed_brackets(&DeformationSpec::canonical(0.3), &at, 1e-6);
    let v: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert!(v["checks"][0]["name"].is_string());
    assert!(v["checks"][0]["residual"].is_number());
    assert!(v["max_residual"].is_number());
    assert_eq!(v["passed"], true);
}

#[test]
fn non_finite_observable_is_an_error() {
    let at = CanonicalState::new(0.0, [0.0; 3], [0.0; 3]);
    assert!(poisson_bracket(|_| f64::NAN, |s| s.x[0], &at, DEFAULT_STEP).is_err());
    assert!(poisson_bracket(|s| s.x[0], |s| s.p[0], &at, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_map_roundtrip(spec in any_spec(), state in any_state()) {
        let back = from_noncommutative(&to_noncommutative(&state, &spec), state.t, &spec);
        for i in 0..6 {
            prop_assert!((back.coord(i) - state.coord(i)).abs() <= 1e-12 * (1.0 + state.coord(i).abs()));
        }
    }

    #[test]
    fn position_bracket_is_the_deformation(spec in any_spec(), state in any_state()) {
        let value = poisson_bracket(
            |s| NcCoord::X(0).eval(s, &spec),
            |s| NcCoord::X(1).eval(s, &spec),
            &state,
            DEFAULT_STEP,
        ).unwrap();
        let f = spec.f(state.t);
        prop_assert!((value - f).abs() <= 1e-6 * (1.0 + f.abs()), "{} vs {}", value, f);
    }

    #[test]
    fn deformed_algebra_holds(spec in any_spec(), state in any_state()) {
        let report = verify_deformed_brackets(&spec, &state, 1e-6);
        prop_assert!(report.passed, "{}", report.max_residual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_identity_holds(spec in any_spec(), state in any_state()) {
        let report = verify_jacobi(&spec, &state, 1e-6);
        prop_assert!(report.passed, "{}", report.max_residual);
    }
}
