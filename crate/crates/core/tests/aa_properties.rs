use dkit_core::automorphy::{bochner_test, classify, ClassifyParams, FnSignal, ShiftPlan, Signal, Verdict};
use dkit_core::generator::{GeneratorSpec, Harmonic};
use dkit_core::{presets, TimeWindow, Vector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn fixed(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn w(lo: i64, hi: i64) -> TimeWindow {
    TimeWindow::new(lo, hi).unwrap()
}

fn params(plan: ShiftPlan) -> ClassifyParams {
    ClassifyParams {
        eps_grid: vec![0.5, 0.25],
        tau_max: 200,
        scan_window: w(-1000, 1000),
        plan,
        probe: w(-30, 30),
        tol: 1e-3,
    }
}

fn triptych() -> Vec<(GeneratorSpec, Verdict)> {
    vec![
        (GeneratorSpec::sines(vec![Harmonic::sin(1.0, 0.5)]), Verdict::Periodic),
        (presets::two_tone_sine(), Verdict::NumericallyAlmostPeriodic),
        (GeneratorSpec::sign_cos(presets::golden_theta(), 1.0), Verdict::NumericallyAlmostAutomorphic),
    ]
}

fn verdict_of<S: Signal + ?Sized>(s: &S) -> Verdict {
    classify(s, &params(ShiftPlan::fibonacci(5, 22).unwrap())).unwrap().verdict
}

#[test]
fn verdicts_survive_shifts_and_reflection() {
    for (g, expected) in triptych() {
        assert_eq!(verdict_of(&g), expected);
        for k in [1_i64, 7, -13] {
            let gk = g.clone();
            let shifted = FnSignal::new(1, move |t| Vector::from_element(1, gk.eval(t + k)));
            assert_eq!(verdict_of(&shifted), expected, "shift {k}");
        }
        let gr = g.clone();
        let reflected = FnSignal::new(1, move |t| Vector::from_element(1, gr.eval(-t)));
        assert_eq!(verdict_of(&reflected), expected, "reflection");
    }
}

proptest! {
    #![proptest_config(fixed(24))]

    // a single irrational tone is almost periodic, and then also passes Bochner
    // along the convergent denominators of its frequency
    #[test]
    fn almost_periodic_implies_bochner(
        freq in 0.05..0.95_f64,
        amp in 0.5..2.0_f64,
        phase in 0.0..2.0_f64,
    ) {
        prop_assume!(dkit_core::generator::rational_witness(freq, 1000).is_none());
        let g = GeneratorSpec::sines(vec![Harmonic { amplitude: amp, freq: 2.0 * freq, phase, wave: Default::default() }]);
        let plan = ShiftPlan::convergent_denominators(freq, 10_000_000, 1).unwrap();
        prop_assume!(plan.shifts.len() >= 4);
        let c = classify(&g, &ClassifyParams { tol: 1e-2, ..params(plan.clone()) }).unwrap();
        prop_assert_eq!(c.verdict, Verdict::NumericallyAlmostPeriodic);
        prop_assert!(bochner_test(&g, &plan, w(-30, 30), 1e-2).unwrap().passed);
    }

    #[test]
    fn limit_never_exceeds_the_signal(amp in 0.1..3.0_f64, theta_shift in 0.0..0.05_f64) {
        let theta = presets::golden_theta() + theta_shift;
        prop_assume!(dkit_core::generator::rational_witness(theta, 1_000_000).is_none());
        let g = GeneratorSpec::sign_cos(theta, amp);
        let plan = ShiftPlan::convergent_denominators(theta, 100_000, 1).unwrap();
        let r = bochner_test(&g, &plan, w(-30, 30), 1e-3).unwrap();
        prop_assert!(r.fbar.sup_norm() <= amp + 1e-3);
    }

    #[test]
    fn sums_pass_with_a_common_plan(a in -2.0..2.0_f64, b in -2.0..2.0_f64, lag in -20i64..20) {
        let theta = presets::golden_theta();
        let f1 = GeneratorSpec::sign_cos(theta, a);
        let f2 = GeneratorSpec::sign_cos(theta, b);
        let plan = ShiftPlan::fibonacci(5, 22).unwrap();
        let probe = w(-30, 30);
        let g2 = f2.clone();
        let second = FnSignal::new(1, move |t| Vector::from_element(1, g2.eval(t + lag)));
        prop_assert!(bochner_test(&f1, &plan, probe, 1e-3).unwrap().passed);
        prop_assert!(bochner_test(&second, &plan, probe, 1e-3).unwrap().passed);
        let sum = FnSignal::new(1, move |t| Vector::from_element(1, f1.eval(t) + f2.eval(t + lag)));
        prop_assert!(bochner_test(&sum, &plan, probe, 1e-3).unwrap().passed);
    }
}
