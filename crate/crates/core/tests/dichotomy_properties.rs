use dkit_core::dichotomy::{
    bounded_solution_test, bounded_subspace_projector, certify, estimate_constants, estimate_projector,
    shifted_kernel_limit,
};
use dkit_core::norm::{row_sum_norm, sup_norm};
use dkit_core::{presets, DichotomyCertificate, DichotomyConstants, Matrix, SystemSpec, TimeWindow, TransitionKernel, Vector};
use nalgebra::linalg::QR;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn fixed(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn w(lo: i64, hi: i64) -> TimeWindow {
    TimeWindow::new(lo, hi).unwrap()
}

/// Symmetric `QDQᵀ` with eigenvalue moduli in `[0.2, 0.5]` (stable) or `[2, 4]` (unstable).
fn split_system() -> impl Strategy<Value = Matrix> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(-1.0..1.0_f64, n * n),
                proptest::collection::vec((any::<bool>(), any::<bool>(), 0.0..1.0_f64), n),
            )
        })
        .prop_map(|(entries, modes)| {
            let n = modes.len();
            let mut g = Matrix::from_vec(n, n, entries);
            g += Matrix::identity(n, n) * 3.0; // keep the QR factor well defined
            let q = QR::new(g).q();
            let d = Vector::from_iterator(
                n,
                modes.iter().map(|&(unstable, negative, u)| {
                    let m = if unstable { 2.0 + 2.0 * u } else { 0.2 + 0.3 * u };
                    if negative { -m } else { m }
                }),
            );
            &q * Matrix::from_diagonal(&d) * q.transpose()
        })
}

proptest! {
    #![proptest_config(fixed(64))]

    #[test]
    fn projector_estimates_agree_and_certify(a in split_system()) {
        let kernel = TransitionKernel::new(SystemSpec::constant(a), 0);
        let window = w(0, 20);
        let p = estimate_projector(&kernel, window, 0.0).unwrap();
        prop_assert!(row_sum_norm(&(&p * &p - &p)) <= 1e-10);
        let q = bounded_subspace_projector(&kernel, window, 10.0).unwrap();
        prop_assert!(row_sum_norm(&(&p - &q)) <= 1e-8, "{} vs {}", p, q);

        let cw = w(-8, 8);
        let c = estimate_constants(&kernel, &p, cw).unwrap();
        let (cert, report) = certify(&kernel, DichotomyCertificate::new(p, c, cw)).unwrap();
        prop_assert!(report.passed);
        prop_assert!(cert.max_slack >= -1e-12 * c.beta1.max(c.beta2));
    }

    #[test]
    fn nonzero_solutions_are_unbounded(a in split_system(), xs in proptest::collection::vec(-1.0..1.0_f64, 20 * 3)) {
        let n = a.nrows();
        let kernel = TransitionKernel::new(SystemSpec::constant(a), 0);
        let window = w(-20, 20);
        for chunk in xs.chunks(3).take(20) {
            let xi = Vector::from_iterator(n, chunk.iter().copied().take(n));
            prop_assume!(sup_norm(&xi) > 1e-3);
            let g = bounded_solution_test(&kernel, &xi, window, 1e3 * sup_norm(&xi));
            prop_assert!(g.unbounded, "ξ = {} not flagged: {:?}", xi, g);
        }
    }

    #[test]
    fn limit_kernel_keeps_the_constants(t in 0i64..6, gap in 0i64..5) {
        let spec = presets::example_one(presets::golden_theta(), 1).unwrap();
        let cert = DichotomyCertificate::new(Matrix::identity(2, 2), DichotomyConstants::symmetric(1.0, 1.0), w(-10, 10));
        let shifts: Vec<i64> = dkit_core::automorphy::ShiftPlan::fibonacci(12, 30).unwrap().shifts;
        let tr = shifted_kernel_limit(&spec, &cert, 0, &shifts, &[(t + gap, t)], 1e-6).unwrap();
        prop_assert!(tr.limit_satisfies_bound);
        prop_assert!(tr.limit_slack >= -1e-8);
    }
}

#[test]
fn example_one_certificate_from_fitted_constants() {
    let kernel = TransitionKernel::new(presets::example_one(presets::golden_theta(), 1).unwrap(), 0);
    let window = w(-30, 30);
    let p = estimate_projector(&kernel, window, 0.0).unwrap();
    assert_eq!(p, Matrix::identity(2, 2));
    let c = estimate_constants(&kernel, &p, window).unwrap();
    let (_, report) = certify(&kernel, DichotomyCertificate::new(p, c, window)).unwrap();
    assert!(report.passed);
    let q = bounded_subspace_projector(&kernel, w(0, 40), 10.0).unwrap();
    assert!(row_sum_norm(&(q - Matrix::identity(2, 2))) <= 1e-8);
}
