use nhtwist_core::constant_force::{ConstantForceModel, ConstantForceParams, InitialData};
use nhtwist_core::deformations::{DeformationSpec, Family, Variant};
use nhtwist_core::integrator::{estimate_order, integrate, IntegrationConfig, Method, StateRate};
use nhtwist_core::oscillator::{OscillatorModel, OscillatorParams};
use nhtwist_core::phase_space::CanonicalState;
use nhtwist_core::vector::{norm, sub};
use proptest::prelude::*;

fn distance(a: &CanonicalState, b: &CanonicalState) -> f64 {
    (0..6)
        .map(|i| (a.coord(i) - b.coord(i)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// The same system run in reversed time `s = −t`.
fn reversed<F>(rhs: F) -> impl Fn(&CanonicalState) -> StateRate
where
    F: Fn(&CanonicalState) -> StateRate,
{
    move |s: &CanonicalState| {
        let r = rhs(&CanonicalState { t: -s.t, ..*s });
        StateRate {
            x_dot: r.x_dot.map(|v| -v),
            p_dot: r.p_dot.map(|v| -v),
        }
    }
}

fn constant_force(spec: DeformationSpec) -> ConstantForceModel {
    ConstantForceModel::new(
        ConstantForceParams::new(1.3, [0.7, -0.4, 0.2]).unwrap(),
        spec,
    )
    .unwrap()
}

fn oscillator(spec: DeformationSpec) -> OscillatorModel {
    OscillatorModel::new(OscillatorParams::new(1.1, 1.5).unwrap(), spec).unwrap()
}

fn init() -> InitialData {
    InitialData {
        x0: [0.6, -0.2, 0.4],
        v0: [-0.3, 0.5, 0.1],
    }
}

#[test]
fn both_models_converge_at_fourth_order() {
    let cf = constant_force(
        DeformationSpec::newton_hooke(Family::K1, Variant::NhMinus, 0.8, 1.5).unwrap(),
    );
    let order = estimate_order(
        |s: &CanonicalState| cf.eom_rhs(s),
        &cf.initial_state(&init()),
        8.0,
    )
    .unwrap()
    .unwrap();
    assert!((3.5..=4.5).contains(&order), "constant force: {order}");

    let osc =
        oscillator(DeformationSpec::newton_hooke(Family::K2, Variant::NhMinus, 0.3, 2.0).unwrap());
    let order = estimate_order(
        |s: &CanonicalState| osc.eom_rhs(s),
        &osc.initial_state(&init()),
        8.0,
    )
    .unwrap()
    .unwrap();
    assert!((3.5..=4.5).contains(&order), "oscillator: {order}");
}

#[test]
fn zero_rate_is_not_estimable() {
    let zero = |_: &CanonicalState| StateRate::default();
    let start = CanonicalState::new(0.0, [1.0, 2.0, 3.0], [0.0; 3]);
    assert_eq!(estimate_order(zero, &start, 1.0).unwrap(), None);
}

#[test]
fn halving_the_step_cuts_the_error_by_eight() {
    let model = constant_force(
        DeformationSpec::newton_hooke(Family::K3, Variant::NhMinus, 0.9, 0.8).unwrap(),
    );
    let init = init();
    let max_error = |step: f64| {
        let cfg = IntegrationConfig::new(0.0, 10.0, step);
        integrate(
            |s: &CanonicalState| model.eom_rhs(s),
            &model.initial_state(&init),
            &cfg,
        )
        .unwrap()
        .samples
        .iter()
        .map(|s| norm(&sub(&s.x, &model.analytic_solution(s.t, &init))))
        .fold(0.0, f64::max)
    };
    let (coarse, fine) = (max_error(0.1), max_error(0.05));
    assert!(coarse > 1e-9, "error too small to compare: {coarse}");
    assert!(coarse / fine >= 8.0, "{coarse} / {fine}");
}

#[test]
fn halved_method_reports_error_estimates() {
    let model = oscillator(DeformationSpec::canonical(0.4));
    let cfg = IntegrationConfig::new(0.0, 5.0, 0.05).with_method(Method::Rk4Halved);
    let tr = integrate(
        |s: &CanonicalState| model.eom_rhs(s),
        &model.initial_state(&init()),
        &cfg,
    )
    .unwrap();
    assert!(tr.diagnostics.iter().all(|d| d.error_estimate.is_some()));
    let last = tr.diagnostics.last().unwrap().error_estimate.unwrap();
    assert!(last > 0.0 && last < 1e-5);
}

#[test]
fn rejects_bad_windows() {
    let rhs = |_: &CanonicalState| StateRate::default();
    let start = CanonicalState::default();
    for cfg in [
        IntegrationConfig::new(1.0, 0.0, 0.1),
        IntegrationConfig::new(0.0, 1.0, -0.1),
        IntegrationConfig::new(0.0, 1.0, 2.0),
        IntegrationConfig::new(0.0, 1.0, 0.1).recording_every(0),
    ] {
        assert!(integrate(rhs, &start, &cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn times_are_uniform_and_increasing() {
    let rhs = |_: &CanonicalState| StateRate::default();
    let tr = integrate(
        rhs,
        &CanonicalState::default(),
        &IntegrationConfig::new(0.5, 2.5, 0.01).recording_every(7),
    )
    .unwrap();
    let times: Vec<f64> = tr.times().collect();
    assert_eq!(times[0], 0.5);
    assert_eq!(*times.last().unwrap(), 2.5);
    for w in times.windows(2) {
        assert!(w[1] > w[0]);
    }
    for w in times[..times.len() - 1].windows(2) {
        assert!((w[1] - w[0] - 0.07).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_then_backward_returns_home(
        family in prop::sample::select(Family::ALL.to_vec()),
        variant in prop::sample::select(Variant::ALL.to_vec()),
        kappa in -0.5..0.5f64,
        tau in 1.0..4.0f64,
        oscillating in any::<bool>(),
    ) {
        let spec = DeformationSpec::new(family, variant, kappa, Some(tau)).unwrap();
        let t_end = 2.0;
        let cfg = IntegrationConfig::new(0.0, t_end, 0.02).with_method(Method::Rk4Halved);
        let back_cfg = IntegrationConfig::new(-t_end, 0.0, 0.02).with_method(Method::Rk4Halved);
        let (start, forward_error, home) = if oscillating {
            let m = oscillator(spec);
            let start = m.initial_state(&init());
            let fwd = integrate(|s: &CanonicalState| m.eom_rhs(s), &start, &cfg).unwrap();
            let back = integrate(reversed(|s: &CanonicalState| m.eom_rhs(s)), fwd.last().unwrap(), &back_cfg).unwrap();
            (start, fwd.diagnostics.last().unwrap().error_estimate.unwrap(), *back.last().unwrap())
        } else {
            let m = constant_force(spec);
            let start = m.initial_state(&init());
            let fwd = integrate(|s: &CanonicalState| m.eom_rhs(s), &start, &cfg).unwrap();
            let back = integrate(reversed(|s: &CanonicalState| m.eom_rhs(s)), fwd.last().unwrap(), &back_cfg).unwrap();
            (start, fwd.diagnostics.last().unwrap().error_estimate.unwrap(), *back.last().unwrap())
        };
        let returned = CanonicalState { t: 0.0, ..home };
        let scale = (0..6).map(|i| start.coord(i).abs()).fold(1.0, f64::max);
        // roundoff floor for problems RK4 integrates exactly
        let bound = 100.0 * forward_error + 1e-12 * scale;
        prop_assert!(distance(&returned, &start) <= bound, "{} > {}", distance(&returned, &start), bound);
    }
}
