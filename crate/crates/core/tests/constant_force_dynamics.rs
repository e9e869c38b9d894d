use nhtwist_core::checks::oracle_deviation;
use nhtwist_core::constant_force::{
    hamiltonian_via_map, ConstantForceModel, ConstantForceParams, InitialData,
};
use nhtwist_core::deformations::{DeformationSpec, Family, Variant};
use nhtwist_core::integrator::{integrate, IntegrationConfig};
use nhtwist_core::phase_space::{poisson_bracket, CanonicalState, DEFAULT_STEP};
use nhtwist_core::vector::{dot, gradient_fd, norm, sub};
use proptest::prelude::*;

fn model(m: f64, force: [f64; 3], spec: DeformationSpec) -> ConstantForceModel {
    ConstantForceModel::new(ConstantForceParams::new(m, force).unwrap(), spec).unwrap()
}

fn spec_strategy(
    kappa: std::ops::Range<f64>,
    tau: std::ops::Range<f64>,
) -> impl Strategy<Value = DeformationSpec> {
    (
        prop::sample::select(Family::ALL.to_vec()),
        prop::sample::select(Variant::ALL.to_vec()),
        kappa,
        tau,
    )
        .prop_map(|(f, v, k, tau)| DeformationSpec::new(f, v, k, Some(tau)).unwrap())
}

fn setup() -> impl Strategy<Value = (f64, [f64; 3], InitialData)> {
    (
        0.5..2.0f64,
        prop::array::uniform3(-1.0..1.0f64),
        prop::array::uniform3(-1.0..1.0f64),
        prop::array::uniform3(-1.0..1.0f64),
    )
        .prop_map(|(m, force, x0, v0)| (m, force, InitialData { x0, v0 }))
}

fn run(
    model: &ConstantForceModel,
    init: &InitialData,
    t_end: f64,
    step: f64,
) -> Vec<CanonicalState> {
    let cfg = IntegrationConfig::new(0.0, t_end, step);
    integrate(
        |s: &CanonicalState| model.eom_rhs(s),
        &model.initial_state(init),
        &cfg,
    )
    .unwrap()
    .samples
}

#[test]
fn rk4_matches_closed_form_for_every_configuration() {
    let init = InitialData {
        x0: [0.3, -0.7, 1.1],
        v0: [-0.4, 0.25, 0.6],
    };
    for spec in DeformationSpec::all_configurations(0.6, 2.5).unwrap() {
        let model = model(1.3, [0.8, -0.45, 0.3], spec);
        let dev = oracle_deviation(&model, &init, 10.0, 1e-3).unwrap();
        assert!(dev <= 1e-6, "{spec}: {dev}");
    }
}

#[test]
fn initial_velocity_is_respected() {
    let init = InitialData {
        x0: [0.0; 3],
        v0: [0.5, -1.5, 2.0],
    };
    for spec in DeformationSpec::all_configurations(0.9, 1.2).unwrap() {
        let m = model(0.7, [1.0, 2.0, -1.0], spec);
        let v = m.velocity(&m.initial_state(&init));
        assert!(norm(&sub(&v, &init.v0)) < 1e-14, "{spec}");
    }
}

#[test]
fn canonical_deformation_is_classical() {
    let init = InitialData {
        x0: [1.0, 2.0, -0.5],
        v0: [0.1, 0.0, 0.3],
    };
    let force = [0.4, -0.9, 0.2];
    let deformed = run(
        &model(1.2, force, DeformationSpec::canonical(0.8)),
        &init,
        5.0,
        1e-2,
    );
    let classical = run(
        &model(1.2, force, DeformationSpec::undeformed()),
        &init,
        5.0,
        1e-2,
    );
    for (a, b) in deformed.iter().zip(&classical) {
        assert!(norm(&sub(&a.x, &b.x)) < 1e-10);
    }
}

#[test]
fn lie_algebraic_deformation_gives_constant_acceleration() {
    let model = model(
        1.0,
        [1.0, 0.0, 0.0],
        DeformationSpec::galilean(Family::K2, 0.5),
    );
    for t in [0.0, 1.0, 7.5] {
        let g = model.force_g(t);
        assert!(norm(&sub(&g, &[1.0, 0.25, 0.0])) < 1e-15);
    }
}

#[test]
fn hamiltonian_agrees_with_representation_map() {
    let at = CanonicalState::new(1.7, [0.2, -1.0, 0.5], [1.1, 0.3, -0.8]);
    for spec in DeformationSpec::all_configurations(-0.7, 1.5).unwrap() {
        let m = model(1.4, [0.3, 0.6, -0.2], spec);
        assert!(
            (m.hamiltonian(&at) - hamiltonian_via_map(&m, &at)).abs() < 1e-12,
            "{spec}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectory_oracle(spec in spec_strategy(-1.0..1.0, 0.5..5.0), (m, force, init) in setup()) {
        let model = model(m, force, spec);
        let dev = oracle_deviation(&model, &init, 10.0, 1e-3).unwrap();
        prop_assert!(dev <= 1e-6, "{}: {}", spec, dev);
    }

    #[test]
    fn force_is_curl_free(spec in spec_strategy(-1.0..1.0, 0.5..5.0), (m, force, _) in setup(),
                          t in 0.0..10.0f64, x in prop::array::uniform3(-10.0..10.0f64)) {
        let model = model(m, force, spec);
        prop_assert!(norm(&model.curl_g(t, &x, 1e-4)) <= 1e-9);
    }

    #[test]
    fn force_is_minus_gradient_of_potential(spec in spec_strategy(-1.0..1.0, 0.5..5.0), (m, force, _) in setup(),
                                            t in 0.0..3.0f64, x in prop::array::uniform3(-5.0..5.0f64)) {
        let model = model(m, force, spec);
        let grad = gradient_fd(|y| model.potential(y, t), &x, 1e-3);
        let g = model.force_g(t);
        for i in 0..3 {
            prop_assert!((-grad[i] - g[i]).abs() <= 1e-9 * (1.0 + g[i].abs()), "{} {}", -grad[i], g[i]);
        }
    }

    #[test]
    fn equations_of_motion_are_hamiltonian(spec in spec_strategy(-1.0..1.0, 0.5..5.0), (m, force, _) in setup(),
                                           t in 0.0..3.0f64, x in prop::array::uniform3(-2.0..2.0f64),
                                           p in prop::array::uniform3(-2.0..2.0f64)) {
        let model = model(m, force, spec);
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
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn work_energy_balance(spec in spec_strategy(-1.0..1.0, 1.0..5.0), (m, force, init) in setup()) {
        let model = model(m, force, spec);
        let samples = run(&model, &init, 3.0, 1e-3);
        let mut work = 0.0;
        for w in samples.windows(2) {
            let (g0, g1) = (model.force_g(w[0].t), model.force_g(w[1].t));
            let dx = sub(&w[1].x, &w[0].x);
            work += 0.5 * (dot(&g0, &dx) + dot(&g1, &dx));
        }
        let kinetic = |s: &CanonicalState| {
            let v = model.velocity(s);
            0.5 * m * dot(&v, &v)
        };
        let delta = kinetic(samples.last().unwrap()) - kinetic(&samples[0]);
        prop_assert!((work - delta).abs() <= 1e-5 * (1.0 + delta.abs()), "{} vs {}", work, delta);
    }

    #[test]
    fn newton_second_law(spec in spec_strategy(-1.0..1.0, 1.0..5.0), (m, force, init) in setup()) {
        let model = model(m, force, spec);
        let samples = run(&model, &init, 3.0, 1e-3);
        // second difference over ten integration steps
        let stride = 10;
        let h = 1e-2;
        for k in (stride..samples.len() - stride).step_by(37) {
            let (a, b, c) = (&samples[k - stride], &samples[k], &samples[k + stride]);
            let g = model.force_g(b.t);
            for i in 0..3 {
                let acc = (a.x[i] - 2.0 * b.x[i] + c.x[i]) / (h * h);
                prop_assert!((m * acc - g[i]).abs() <= 1e-4 * (1.0 + g[i].abs()), "t={} {} vs {}", b.t, m * acc, g[i]);
            }
        }
    }
}
