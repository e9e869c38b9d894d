use nhtwist_core::constant_force::InitialData;
use nhtwist_core::deformations::{DeformationSpec, Family, Variant};
use nhtwist_core::integrator::{integrate, IntegrationConfig};
use nhtwist_core::oscillator::{
    classify_conservative, hamiltonian_via_map, OscillatorModel, OscillatorParams,
};
use nhtwist_core::phase_space::{poisson_bracket, CanonicalState, DEFAULT_STEP};
use nhtwist_core::vector::norm;
use proptest::prelude::*;

fn model(m: f64, omega: f64, spec: DeformationSpec) -> OscillatorModel {
    OscillatorModel::new(OscillatorParams::new(m, omega).unwrap(), spec).unwrap()
}

fn any_spec() -> impl Strategy<Value = DeformationSpec> {
    (
        prop::sample::select(Family::ALL.to_vec()),
        prop::sample::select(Variant::ALL.to_vec()),
        -0.5..0.5f64,
        1.0..5.0f64,
    )
        .prop_map(|(f, v, k, tau)| DeformationSpec::new(f, v, k, Some(tau)).unwrap())
}

fn run(model: &OscillatorModel, init: &InitialData, t_end: f64, step: f64) -> Vec<CanonicalState> {
    let cfg = IntegrationConfig::new(0.0, t_end, step);
    integrate(
        |s: &CanonicalState| model.eom_rhs(s),
        &model.initial_state(init),
        &cfg,
    )
    .unwrap()
    .samples
}

fn init() -> InitialData {
    InitialData {
        x0: [0.8, -0.3, 0.5],
        v0: [0.2, 0.6, -0.4],
    }
}

#[test]
fn canonical_energy_is_conserved() {
    let model = model(1.1, 1.4, DeformationSpec::canonical(0.7));
    let samples = run(&model, &init(), 20.0, 1e-3);
    let e0 = model.hamiltonian(&samples[0]);
    for s in &samples {
        assert!((model.hamiltonian(s) - e0).abs() <= 1e-8 * (1.0 + e0.abs()));
    }
}

#[test]
fn vertical_motion_is_a_plain_oscillator() {
    let (m, w) = (1.1, 1.4);
    let init = init();
    for spec in DeformationSpec::all_configurations(0.4, 2.0).unwrap() {
        // growing deformations turn stiff; keep their window short
        let bounded = spec.variant() == Variant::NhMinus || spec.is_time_independent();
        let t_end = if bounded { 20.0 } else { 4.0 };
        let samples = run(&model(m, w, spec), &init, t_end, 1e-3);
        for s in samples.iter().step_by(50) {
            let exact = init.x0[2] * (w * s.t).cos() + init.v0[2] / w * (w * s.t).sin();
            assert!((s.x[2] - exact).abs() < 1e-8, "{spec} t={}", s.t);
        }
    }
}

#[test]
fn initial_velocity_is_respected() {
    for spec in DeformationSpec::all_configurations(0.9, 1.2).unwrap() {
        let m = model(0.7, 1.3, spec);
        for t0 in [0.0, 0.8] {
            let v = m.velocity(&m.initial_state_at(&init(), t0));
            for i in 0..3 {
                assert!((v[i] - init().v0[i]).abs() < 1e-14, "{spec}");
            }
        }
    }
}

#[test]
fn curl_vanishes_only_for_constant_deformations() {
    let m = 1.2;
    let w = 0.9;
    for spec in DeformationSpec::all_configurations(0.3, 2.0).unwrap() {
        let model = model(m, w, spec);
        let peak = (0..=60)
            .map(|i| norm(&model.curl_h_analytic(0.05 * i as f64)))
            .fold(0.0, f64::max);
        if classify_conservative(&spec) {
            assert!(peak <= 1e-12, "{spec}");
        } else {
            assert!(peak > 1e-3, "{spec}: {peak}");
        }
    }
}

#[test]
fn hamiltonian_agrees_with_representation_map() {
    let at = CanonicalState::new(0.9, [0.2, -1.0, 0.5], [1.1, 0.3, -0.8]);
    for spec in DeformationSpec::all_configurations(-0.7, 1.5).unwrap() {
        let m = model(1.4, 0.8, spec);
        let h = m.hamiltonian(&at);
        assert!(
            (hamiltonian_via_map(&m, &at) - h).abs() < 1e-12 * (1.0 + h.abs()),
            "{spec}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn curl_formula_matches_finite_differences(spec in any_spec(), m in 0.5..2.0f64, w in 0.5..2.0f64,
                                               t in 0.0..2.0f64, x in prop::array::uniform3(-2.0..2.0f64),
                                               v in prop::array::uniform3(-2.0..2.0f64)) {
        let model = model(m, w, spec);
        let fd = model.curl_h_fd(&x, &v, t, 1e-3);
        let exact = model.curl_h_analytic(t);
        for i in 0..3 {
            prop_assert!((fd[i] - exact[i]).abs() <= 1e-6 * (1.0 + exact[i].abs()), "{} vs {}", fd[i], exact[i]);
        }
    }

    #[test]
    fn equations_of_motion_are_hamiltonian(spec in any_spec(), m in 0.5..2.0f64, w in 0.5..2.0f64,
                                           t in 0.0..2.0f64, x in prop::array::uniform3(-2.0..2.0f64),
                                           p in prop::array::uniform3(-2.0..2.0f64)) {
        let model = model(m, w, spec);
        let at = CanonicalState::new(t, x, p);
        let rate = model.eom_rhs(&at);
        let h = |s: &CanonicalState| model.hamiltonian(s);
        for i in 0..3 {
            let xi = poisson_bracket(|s| s.x[i], h, &at, DEFAULT_STEP).unwrap();
            let pi = poisson_bracket(|s| s.p[i], h, &at, DEFAULT_STEP).unwrap();
            prop_assert!((xi - rate.x_dot[i]).abs() <= 1e-7 * (1.0 + rate.x_dot[i].abs()));
            prop_assert!((pi - rate.p_dot[i]).abs() <= 1e-7 * (1.0 + rate.p_dot[i].abs()));
        }
    }

    #[test]
    fn effective_mass_is_bounded(spec in any_spec(), m in 0.1..5.0f64, w in 0.1..5.0f64, t in -5.0..5.0f64) {
        let mass = model(m, w, spec).effective_mass(t);
        prop_assert!(mass > 0.0 && mass <= m);
        prop_assert_eq!(mass == m, spec.f(t) == 0.0 || (m * w * spec.f(t)).powi(2) < 4.0 * f64::EPSILON);
    }

    #[test]
    fn time_partial_matches_frozen_difference(spec in any_spec(), m in 0.5..2.0f64, w in 0.5..2.0f64,
                                              t in 0.1..2.0f64, x in prop::array::uniform3(-2.0..2.0f64),
                                              p in prop::array::uniform3(-2.0..2.0f64)) {
        let model = model(m, w, spec);
        let at = CanonicalState::new(t, x, p);
        let h = 1e-5;
        let fd = (model.hamiltonian(&CanonicalState { t: t + h, ..at }) - model.hamiltonian(&CanonicalState { t: t - h, ..at })) / (2.0 * h);
        let exact = model.hamiltonian_time_partial(&at);
        prop_assert!((fd - exact).abs() <= 1e-7 * (1.0 + exact.abs()), "{} vs {}", fd, exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn newton_form_matches_integration(spec in any_spec(), m in 0.5..2.0f64, w in 0.5..2.0f64) {
        let model = model(m, w, spec);
        let samples = run(&model, &init(), 2.0, 1e-4);
        let h = 2e-4;
        for k in (4..samples.len() - 4).step_by(397) {
            let b = &samples[k];
            let force = model.force_h(&b.x, &model.velocity(b), b.t);
            // five-point stencil; the three-point one is too coarse where f is large
            let x = |j: usize| samples[k + 2 * j - 4].x;
            for i in 0..3 {
                let acc = (-x(0)[i] + 16.0 * x(1)[i] - 30.0 * x(2)[i] + 16.0 * x(3)[i] - x(4)[i]) / (12.0 * h * h);
                prop_assert!((m * acc - force[i]).abs() <= 1e-4 * (1.0 + force[i].abs()),
                    "{} t={} {} vs {}", spec, b.t, m * acc, force[i]);
            }
        }
    }

    #[test]
    fn energy_changes_only_through_explicit_time_dependence(spec in any_spec(), m in 0.5..2.0f64, w in 0.5..2.0f64) {
        let model = model(m, w, spec);
        let samples = run(&model, &init(), 2.0, 1e-4);
        for k in (1..samples.len() - 1).step_by(499) {
            let dt = samples[k + 1].t - samples[k - 1].t;
            let along = (model.hamiltonian(&samples[k + 1]) - model.hamiltonian(&samples[k - 1])) / dt;
            let partial = model.hamiltonian_time_partial(&samples[k]);
            prop_assert!((along - partial).abs() <= 1e-5 * (1.0 + partial.abs()), "{} vs {}", along, partial);
        }
    }
}
