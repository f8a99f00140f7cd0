use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dkit_core::generator::{GeneratorSpec, Harmonic};
use dkit_core::{presets, SequenceWindow, TimeWindow, Vector};
use serde_json::Value;

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn dkit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkit"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("DKIT_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(|c| c.parse().unwrap()).collect()).collect()
}

fn ex(name: &str) -> String {
    example(name).to_str().unwrap().to_string()
}

#[test]
fn repro_ex1_prints_the_ball_radius() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["repro", "ex1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("M0_min = 30"), "{}", stdout(&o));
    let r = json(&dir.path().join("repro_ex1.json"));
    assert_eq!(r["certificate"]["projector"][0][0].as_f64(), Some(1.0));
    assert!((r["condition"]["m0_min"].as_f64().unwrap() - 30.0).abs() < 1e-9);
    assert!(r["solve"]["final_sup_norm"].as_f64().unwrap() <= 30.0);
}

#[test]
fn repro_ex2_separates_inverse_and_forward_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["repro", "ex2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("repro_ex2.json")).unwrap();
    assert!(text.contains("SingularCoefficient"));
    assert!(text.contains("verified"));
    assert!(stdout(&o).contains("SingularCoefficient"));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn repro_rejects_unknown_names() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&dkit(dir.path(), &["repro", "bogus"])), 1);
}

#[test]
fn dichotomy_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["dichotomy", &ex("ex1.toml")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&dir.path().join("dichotomy.json"));
    assert_eq!(r["status"], "verified");
    assert_eq!(r["certificate"]["projector"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));

    let o = dkit(dir.path(), &["dichotomy", &ex("doubling.toml")]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("dichotomy.json"))["status"], "no_dichotomy");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "window = { lo = 0 }\n[system]\ndim = \"two\"\n").unwrap();
    assert_eq!(code(&dkit(dir.path(), &["dichotomy", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&dkit(dir.path(), &["dichotomy", "/nonexistent/config.toml"])), 1);
}

#[test]
fn solve_example_one_stays_in_the_ball() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["solve", &ex("ex1.toml")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("solution.csv"));
    assert!(rows.len() > 300);
    let sup = rows.iter().flat_map(|r| r[1..].iter()).fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(sup > 0.0 && sup <= 30.0, "sup {sup}");

    let d = json(&dir.path().join("diagnostics.json"));
    assert_eq!(d["status"], "converged");
    assert!((d["condition"]["m0_min"].as_f64().unwrap() - 30.0).abs() < 1e-9);
    let tol = 1e-10;
    assert!(d["truncation"]["tail_past"].as_f64().unwrap() < tol / 10.0);
    assert!(d["truncation"]["tail_future"].as_f64().unwrap() < tol / 10.0);
    assert!(d["solve"]["max_interior_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn zero_forcing_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["solve", &ex("zero_forcing.toml")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("solution.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
}

#[test]
fn solve_failure_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkit(dir.path(), &["solve", &ex("neutral_e1_one.toml")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("E1 = 1"), "{}", stderr(&o));

    let text = std::fs::read_to_string(example("ex1.toml")).unwrap().replace("max_iter = 500", "max_iter = 3");
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = dkit(dir.path(), &["solve", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let d = json(&dir.path().join("diagnostics.json"));
    assert_eq!(d["status"], "max_iter_exceeded");
    assert_eq!(d["residual_history"].as_array().unwrap().len(), 3);

    assert_eq!(code(&dkit(dir.path(), &["solve", &ex("doubling.toml")])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(code(&dkit(dir.path(), &["repro", "ex1"])), 0);
        assert_eq!(code(&dkit(dir.path(), &["solve", &ex("ex2.toml")])), 0);
    }
    for file in ["repro_ex1.json", "diagnostics.json", "solution.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs between runs");
    }
    // every float carries 17 significant digits
    let text = std::fs::read_to_string(a.path().join("repro_ex1.json")).unwrap();
    assert!(text.contains("\"kernel_sum\": 3.0000000000000000e0"), "{text}");
}

#[test]
fn probe_seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_dkit"))
            .arg("--out-dir")
            .arg(dir.path())
            .args(["solve", &ex("ex2.toml")])
            .env("DKIT_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("7")), 0);
    let d = json(&dir.path().join("diagnostics.json"));
    assert_eq!(d["probes"]["seed"], 7);
    assert_eq!(code(&run("seven")), 1);
}

fn write_signal(path: &Path, f: impl Fn(i64) -> Vector) {
    let x = SequenceWindow::from_fn(TimeWindow::new(0, 3000).unwrap(), f);
    let bytes = dkit_cli::report::sequence_csv(&x, "v").unwrap();
    std::fs::write(path, bytes).unwrap();
}

#[test]
fn classify_separates_the_three_classes() {
    let dir = tempfile::tempdir().unwrap();
    let sign = GeneratorSpec::sign_cos(presets::golden_theta(), 1.0);
    let tone = presets::two_tone_sine();
    let period = GeneratorSpec::sines(vec![Harmonic::sin(1.0, 0.5)]);
    let cases: [(&str, &GeneratorSpec, &str); 3] = [
        ("periodic", &period, "periodic"),
        ("two_tone", &tone, "numerically_almost_periodic"),
        ("sign", &sign, "numerically_almost_automorphic"),
    ];
    for (name, g, verdict) in cases {
        let csv = dir.path().join(format!("{name}.csv"));
        write_signal(&csv, |t| Vector::from_element(1, g.eval(t)));
        let o = dkit(dir.path(), &["classify", csv.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let r = json(&dir.path().join(format!("{name}.classify.json")));
        assert_eq!(r["verdict"], verdict, "{name}");
        assert!(r["bochner"]["forward_discrepancy"].is_array());
        assert!(r["bohr_scans"].as_array().unwrap().len() == 2);
        assert_eq!(r["note"], "numerical evidence on finite data, not a proof");
    }
}

#[test]
fn classify_options_and_parse_failures() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sign.csv");
    let sign = GeneratorSpec::sign_cos(presets::golden_theta(), 1.0);
    write_signal(&csv, |t| Vector::from_element(1, sign.eval(t)));
    let out = dir.path().join("custom.json");
    let o = dkit(
        dir.path(),
        &[
            "classify",
            csv.to_str().unwrap(),
            "--eps",
            "0.5",
            "--tau-max",
            "100",
            "--shifts",
            "233,377,610,987,1597,99999",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["params"]["shifts"], serde_json::json!([233, 377, 610, 987, 1597]));
    assert_eq!(r["params"]["tau_max"], 100);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,v1\n0,1.0\n1,oops\n").unwrap();
    assert_eq!(code(&dkit(dir.path(), &["classify", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&dkit(dir.path(), &["classify", csv.to_str().unwrap(), "--shifts", "a,b"])), 1);
}
