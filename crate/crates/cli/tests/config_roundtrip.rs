use std::path::Path;

use dkit_cli::config::{AutoKeyword, DichotomyConfig, OutputConfig, ProjectorMode, RunConfig, SolverConfig, TruncationConfig};
use dkit_core::generator::{GeneratorSpec, Harmonic, Wave};
use dkit_core::system::{AffineSystem, CoefficientSpec, DelaySpec, ForcingSpec, NeutralSpec};
use dkit_core::{DichotomyConstants, TimeWindow};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn fixed(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

#[test]
fn shipped_examples_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = RunConfig::load(&path).unwrap();
            let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(cfg, again, "{}", path.display());
            assert_eq!(cfg.to_toml(), again.to_toml());
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

fn finite() -> impl Strategy<Value = f64> {
    -1e3..1e3_f64
}

fn generator() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![
        finite().prop_map(GeneratorSpec::constant),
        proptest::collection::vec(finite(), 1..5).prop_map(|values| GeneratorSpec::PeriodicTable { values }),
        proptest::collection::vec((finite(), finite(), finite(), any::<bool>()), 0..3).prop_map(|terms| {
            GeneratorSpec::sines(
                terms
                    .into_iter()
                    .map(|(amplitude, freq, phase, cos)| Harmonic {
                        amplitude,
                        freq,
                        phase,
                        wave: if cos { Wave::Cos } else { Wave::Sin },
                    })
                    .collect(),
            )
        }),
        (0.01..0.99_f64, finite()).prop_map(|(theta, amp)| GeneratorSpec::sign_cos(theta, amp)),
    ]
}

fn system() -> impl Strategy<Value = AffineSystem> {
    (1usize..3).prop_flat_map(|dim| {
        (
            prop_oneof![
                generator().prop_map(|diagonal| CoefficientSpec::Diagonal { diagonal }),
                proptest::collection::vec(proptest::collection::vec(generator(), dim), dim)
                    .prop_map(|entries| CoefficientSpec::Entries { entries }),
            ],
            prop_oneof![
                (0usize..4).prop_map(DelaySpec::Constant),
                proptest::collection::vec(0usize..4, 1..4).prop_map(|table| DelaySpec::Table { table }),
            ],
            (finite(), proptest::collection::vec(generator(), 0..=dim)),
            (finite(), finite(), proptest::collection::vec(generator(), 0..=dim)),
            proptest::option::of(0.0..1.0_f64),
            proptest::option::of(0.0..10.0_f64),
        )
            .prop_map(move |(coefficient, delay, (scale, n_off), (current, delayed, g_off), e1, a)| AffineSystem {
                dim,
                coefficient,
                delay,
                neutral: NeutralSpec { scale, offset: n_off },
                forcing: ForcingSpec { current, delayed, offset: g_off },
                e1,
                e2: e1.map(|e| e / 2.0),
                a,
                b: None,
            })
    })
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    (
        system(),
        (-500i64..0, 0i64..500),
        prop_oneof![
            Just(TruncationConfig::Keyword(AutoKeyword::Auto)),
            (1e-14..1e-2_f64).prop_map(|auto| TruncationConfig::Auto { auto }),
            (1usize..200, 1usize..200).prop_map(|(n_past, n_future)| TruncationConfig::Fixed { n_past, n_future }),
        ],
        (1e-14..1e-2_f64, 1usize..10_000),
        (
            prop_oneof![Just(ProjectorMode::Estimate), Just(ProjectorMode::Identity), Just(ProjectorMode::Zero)],
            proptest::option::of((0.1..5.0_f64, 0.5..5.0_f64)),
            -5i64..5,
            any::<bool>(),
        ),
    )
        .prop_map(|(system, (lo, hi), truncation, (tol, max_iter), (projector, ab, t0, with_paths))| RunConfig {
            system,
            window: TimeWindow::new(lo, hi).unwrap(),
            dichotomy: DichotomyConfig {
                projector,
                constants: ab.map(|(alpha, beta)| DichotomyConstants::symmetric(alpha, beta)),
                window: None,
                t0,
                rate_threshold: 0.0,
            },
            truncation,
            solver: SolverConfig { tol, max_iter },
            outputs: if with_paths {
                OutputConfig { solution: Some("run/x.csv".into()), ..Default::default() }
            } else {
                OutputConfig::default()
            },
        })
}

proptest! {
    #![proptest_config(fixed(128))]

    #[test]
    fn parse_serialize_parse_is_identity(cfg in run_config()) {
        let text = cfg.to_toml();
        let parsed = RunConfig::from_toml(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_toml(), text);
    }
}
