//! Subcommand implementations. Each returns an [`Outcome`] carrying the
//! process exit code; only I/O failures escape as errors.

use std::path::{Path, PathBuf};

use dkit_core::automorphy::{classify, Classification, ClassifyParams, ShiftPlan};
use dkit_core::dichotomy::{certify, estimate_constants, estimate_projector, VerificationReport};
use dkit_core::operator::{lambda_cap, TruncationPlan};
use dkit_core::solver::{condition_report, solve_fixed_point, ConditionReport, SolveDiagnostics};
use dkit_core::system::ProbeReport;
use dkit_core::{
    presets, DichotomyCertificate, DichotomyConstants, Error, Matrix, SequenceWindow, SystemSpec, TimeWindow,
    TransitionKernel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ProjectorMode, RunConfig, TruncationConfig};
use crate::report::{matrix_rows, read_sequence_csv, sequence_csv, vector_values, write_atomic, write_json};

pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NO_DICHOTOMY: i32 = 2;
    pub const NOT_CONTRACTIVE: i32 = 3;
    pub const MAX_ITER: i32 = 4;
    pub const ASSERTION: i32 = 5;
}

/// Randomized constant probes per validation run.
const PROBES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Human-readable summary printed by the binary.
    pub lines: Vec<String>,
}

impl Outcome {
    fn new(code: i32, lines: Vec<String>) -> Self {
        Outcome { code, lines }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { code, lines: vec![msg.into()] }
    }
}

/// Exit code for a library error surfacing from a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SingularCoefficient { .. } | Error::AmbiguousSplit { .. } | Error::NoDichotomy { .. } => {
            exit::NO_DICHOTOMY
        }
        Error::NotContractive { .. } => exit::NOT_CONTRACTIVE,
        Error::MaxIterExceeded { .. } => exit::MAX_ITER,
        Error::Config(_)
        | Error::Domain(_)
        | Error::MissingIndex { .. }
        | Error::PremiseFailed { .. }
        | Error::Numeric(_) => exit::CONFIG,
    }
}

/// Seed for randomized probes, from `DKIT_SEED` (default 0).
pub fn probe_seed() -> Result<u64, String> {
    match std::env::var("DKIT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| format!("DKIT_SEED must be an unsigned integer, got `{s}`")),
        Err(_) => Ok(0),
    }
}

fn probe(spec: &SystemSpec, window: TimeWindow, radius: f64) -> Result<(u64, ProbeReport), Outcome> {
    let seed = probe_seed().map_err(|m| Outcome::fail(exit::CONFIG, m))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec.validate(window, PROBES, radius, &mut rng)
        .map(|r| (seed, r))
        .map_err(|e| Outcome::fail(exit_code(&e), format!("constant check failed: {e}")))
}

pub fn certificate_json(cert: &DichotomyCertificate) -> Value {
    json!({
        "projector": matrix_rows(&cert.projector),
        "constants": cert.constants,
        "window": cert.window,
        "kernel_sum": cert.kernel_sum(),
        "max_slack": cert.max_slack,
    })
}

/// Verification summary; only failing pairs are listed.
pub fn verification_json(r: &VerificationReport) -> Value {
    let failures: Vec<_> = r.failures().take(50).collect();
    json!({
        "passed": r.passed,
        "pairs_checked": r.pairs_checked,
        "max_slack": r.max_slack,
        "worst_pair": r.worst_pair,
        "failure_count": r.failures().count(),
        "failures": failures,
    })
}

struct Certified {
    spec: SystemSpec,
    kernel: TransitionKernel,
    cert: DichotomyCertificate,
    report: VerificationReport,
    fitted_constants: bool,
}

/// Builds the system and certifies its dichotomy per the config. On failure
/// returns the outcome and, when a dichotomy was attempted, a report body.
fn certify_config(cfg: &RunConfig) -> Result<Certified, (Outcome, Option<Value>)> {
    let spec = cfg
        .system
        .build()
        .map_err(|e| (Outcome::fail(exit::CONFIG, format!("invalid system: {e}")), None))?;
    let window = cfg.dichotomy_window();
    let kernel = TransitionKernel::new(spec.clone(), cfg.dichotomy.t0);
    let fail = |e: Error, stage: &str| {
        let code = exit_code(&e);
        let body = (code == exit::NO_DICHOTOMY).then(|| {
            json!({ "status": "no_dichotomy", "stage": stage, "error": e.to_string(), "error_kind": kind(&e) })
        });
        (Outcome::fail(code, format!("{stage}: {e}")), body)
    };
    let n = spec.dim();
    let projector = match cfg.dichotomy.projector {
        ProjectorMode::Identity => Matrix::identity(n, n),
        ProjectorMode::Zero => Matrix::zeros(n, n),
        ProjectorMode::Estimate => {
            estimate_projector(&kernel, window, cfg.dichotomy.rate_threshold).map_err(|e| fail(e, "projector"))?
        }
    };
    let (constants, fitted_constants) = match cfg.dichotomy.constants {
        Some(c) => (c, false),
        None => (estimate_constants(&kernel, &projector, window).map_err(|e| fail(e, "constants"))?, true),
    };
    let (cert, report) =
        certify(&kernel, DichotomyCertificate::new(projector, constants, window)).map_err(|e| fail(e, "verification"))?;
    Ok(Certified { spec, kernel, cert, report, fitted_constants })
}

fn kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn dichotomy_body(c: &Certified) -> Value {
    json!({
        "status": if c.report.passed { "verified" } else { "not_verified" },
        "fitted_constants": c.fitted_constants,
        "certificate": certificate_json(&c.cert),
        "verification": verification_json(&c.report),
    })
}

pub fn cmd_dichotomy(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let path = cfg.outputs.resolve(out).dichotomy;
    let c = match certify_config(cfg) {
        Ok(c) => c,
        Err((outcome, body)) => {
            if let Some(body) = body {
                write_json(&path, &body)?;
            }
            return Ok(outcome);
        }
    };
    write_json(&path, &dichotomy_body(&c))?;
    let p = &c.cert.projector;
    let mut lines = vec![
        format!("projector: {}", projector_name(p)),
        format!("constants: {:?}", c.cert.constants),
        format!("pairs checked: {}, min slack: {:e}", c.report.pairs_checked, c.report.max_slack),
    ];
    if c.report.passed {
        lines.push(format!("dichotomy verified on [{}, {}]", c.cert.window.lo, c.cert.window.hi));
        Ok(Outcome::new(exit::OK, lines))
    } else {
        lines.push(format!("dichotomy bound violated at {} pairs", c.report.failures().count()));
        Ok(Outcome::new(exit::NO_DICHOTOMY, lines))
    }
}

fn projector_name(p: &Matrix) -> String {
    let n = p.nrows();
    if *p == Matrix::identity(n, n) {
        "identity".into()
    } else if *p == Matrix::zeros(n, n) {
        "zero".into()
    } else {
        format!("rank-{} split", p.trace().round() as i64)
    }
}

fn plan_for(cfg: &RunConfig, constants: &DichotomyConstants, cap: f64) -> dkit_core::Result<TruncationPlan> {
    match (cfg.truncation, cfg.auto_tolerance()) {
        (TruncationConfig::Fixed { n_past, n_future }, _) => TruncationPlan::new(constants, cap, n_past, n_future),
        (_, Some(tol)) => TruncationPlan::auto(constants, cap, tol),
        (_, None) => unreachable!("non-fixed truncation always has a tolerance"),
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    status: &'a str,
    message: String,
    condition: &'a ConditionReport,
    certificate: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    probes: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<TruncationPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<&'a SolveDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_history: Option<&'a [f64]>,
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let paths = cfg.outputs.resolve(out);
    let c = match certify_config(cfg) {
        Ok(c) => c,
        Err((outcome, _)) => return Ok(outcome),
    };
    if !c.report.passed {
        return Ok(Outcome::fail(exit::NO_DICHOTOMY, "dichotomy certificate does not verify; run `dichotomy` for details"));
    }
    let cond = condition_report(&c.spec, &c.cert, cfg.window);
    let mut report = SolveReport {
        status: "",
        message: cond.verdict.clone(),
        condition: &cond,
        certificate: certificate_json(&c.cert),
        probes: None,
        truncation: None,
        solve: None,
        residual_history: None,
    };
    if !cond.feasible {
        report.status = "not_contractive";
        write_json(&paths.diagnostics, &report)?;
        return Ok(Outcome::fail(exit::NOT_CONTRACTIVE, cond.verdict.clone()));
    }
    let (seed, probes) = match probe(&c.spec, cfg.window, cond.m0_min.max(1.0)) {
        Ok(p) => p,
        Err(o) => return Ok(o),
    };
    report.probes = Some(json!({ "seed": seed, "report": probes }));
    let cap = lambda_cap(&c.spec, cond.norm_a, cond.m0_min);
    let plan = match plan_for(cfg, &c.cert.constants, cap) {
        Ok(p) => p,
        Err(e) => return Ok(Outcome::fail(exit_code(&e), format!("truncation: {e}"))),
    };
    report.truncation = Some(plan);
    let result = solve_fixed_point(&c.spec, &c.kernel, &c.cert, cfg.window, &plan, cfg.solver.tol, cfg.solver.max_iter);
    match result {
        Ok((x, d)) => {
            let interior = x.restrict(d.interior)?;
            write_atomic(&paths.solution, &sequence_csv(&interior, "x")?)?;
            report.status = "converged";
            report.message = format!("converged in {} iterations", d.iterations);
            report.solve = Some(&d);
            write_json(&paths.diagnostics, &report)?;
            Ok(Outcome::new(
                exit::OK,
                vec![
                    cond.verdict.clone(),
                    format!(
                        "converged in {} iterations; interior [{}, {}]",
                        d.iterations, d.interior.lo, d.interior.hi
                    ),
                    format!("sup-norm = {}", d.final_sup_norm),
                    format!("max interior residual = {:e}", d.max_interior_residual),
                    format!("solution written to {}", paths.solution.display()),
                ],
            ))
        }
        Err(Error::MaxIterExceeded { history }) => {
            report.status = "max_iter_exceeded";
            report.message = format!("no convergence to {} within {} iterations", cfg.solver.tol, cfg.solver.max_iter);
            report.residual_history = Some(&history);
            write_json(&paths.diagnostics, &report)?;
            Ok(Outcome::fail(exit::MAX_ITER, report.message.clone()))
        }
        Err(e) => Ok(Outcome::fail(exit_code(&e), format!("solver: {e}"))),
    }
}

/// Named checks for `repro`; the first failure decides the exit code.
struct Checks {
    lines: Vec<String>,
    passed: Vec<Value>,
}

impl Checks {
    fn new() -> Self {
        Checks { lines: Vec::new(), passed: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) -> Result<(), Outcome> {
        if ok {
            self.lines.push(format!("ok   {name}: {detail}"));
            self.passed.push(json!({ "assertion": name, "detail": detail }));
            Ok(())
        } else {
            let mut lines = std::mem::take(&mut self.lines);
            lines.push(format!("FAIL {name}: {detail}"));
            Err(Outcome::new(exit::ASSERTION, lines))
        }
    }

    fn require<T>(&mut self, name: &str, r: dkit_core::Result<T>) -> Result<T, Outcome> {
        match r {
            Ok(v) => Ok(v),
            Err(e) => {
                self.check(name, false, e.to_string())?;
                unreachable!()
            }
        }
    }
}

fn rounded(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

pub fn cmd_repro(name: &str, out: &Path) -> anyhow::Result<Outcome> {
    let run = match name {
        "ex1" => repro_ex1(),
        "ex2" => repro_ex2(),
        other => return Ok(Outcome::fail(exit::CONFIG, format!("unknown example `{other}`; expected ex1 or ex2"))),
    };
    match run {
        Ok((mut checks, body)) => {
            let path = out.join(format!("repro_{name}.json"));
            let mut body = body;
            body["assertions"] = Value::Array(std::mem::take(&mut checks.passed));
            write_json(&path, &body)?;
            checks.lines.push(format!("report written to {}", path.display()));
            Ok(Outcome::new(exit::OK, checks.lines))
        }
        Err(o) => Ok(o),
    }
}

fn repro_window() -> TimeWindow {
    TimeWindow { lo: -200, hi: 200 }
}

/// Pipeline shared by both examples once the certificate is fixed.
fn solve_and_check(
    checks: &mut Checks,
    spec: &SystemSpec,
    kernel: &TransitionKernel,
    cert: &DichotomyCertificate,
    expected_m0: f64,
) -> Result<(ConditionReport, TruncationPlan, SolveDiagnostics, SequenceWindow), Outcome> {
    let window = repro_window();
    let cond = condition_report(spec, cert, window);
    checks.check(
        "M0_min",
        (cond.m0_min - expected_m0).abs() <= 1e-9 * expected_m0,
        format!("M0_min = {} (K = {}, L = {})", rounded(cond.m0_min), rounded(cond.k), rounded(cond.l)),
    )?;
    let seed = probe_seed().map_err(|m| Outcome::fail(exit::CONFIG, m))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes = spec.validate(window, PROBES, cond.m0_min, &mut rng);
    let probes = checks.require("declared constants hold", probes)?;
    checks.check(
        "declared constants hold",
        true,
        format!(
            "{} probes, worst ratios {:.3} (Q) and {:.3} (G)",
            probes.probes, probes.worst_neutral_ratio, probes.worst_forcing_ratio
        ),
    )?;
    let plan = TruncationPlan::auto(&cert.constants, lambda_cap(spec, cond.norm_a, cond.m0_min), 1e-10);
    let plan = checks.require("truncation plan", plan)?;
    let solved = solve_fixed_point(spec, kernel, cert, window, &plan, 1e-10, 500);
    let (x, d) = checks.require("solver converges", solved)?;
    checks.check("solver converges", true, format!("{} iterations", d.iterations))?;
    checks.check(
        "solution stays in the ball",
        d.final_sup_norm <= cond.m0_min * (1.0 + 1e-12),
        format!("sup-norm {:.6} <= M0_min {}", d.final_sup_norm, rounded(cond.m0_min)),
    )?;
    checks.check(
        "solution satisfies the recurrence",
        d.max_interior_residual <= 1e-8,
        format!("max interior residual {:e}", d.max_interior_residual),
    )?;
    Ok((cond, plan, d, x))
}

fn unit_certificate(n: usize, window: TimeWindow) -> DichotomyCertificate {
    DichotomyCertificate::new(Matrix::identity(n, n), DichotomyConstants::symmetric(1.0, 1.0), window)
}

fn repro_ex1() -> Result<(Checks, Value), Outcome> {
    let mut checks = Checks::new();
    let theta = presets::golden_theta();
    let spec = checks.require("system builds", presets::example_one(theta, 1))?;
    let kernel = TransitionKernel::new(spec.clone(), 0);
    let vwin = TimeWindow { lo: -60, hi: 60 };

    let cert = unit_certificate(2, vwin);
    let verified = checks.require("certificate verifies", certify(&kernel, cert))?;
    let (cert, report) = verified;
    checks.check(
        "certificate verifies",
        report.passed,
        format!("P = I, alpha1 = beta1 = 1, {} pairs, min slack {:e}", report.pairs_checked, report.max_slack),
    )?;

    let estimated = checks.require("projector estimate", estimate_projector(&kernel, vwin, 0.0))?;
    checks.check(
        "estimated projector is the identity",
        estimated == Matrix::identity(2, 2),
        projector_name(&estimated),
    )?;

    let (cond, plan, d, x) = solve_and_check(&mut checks, &spec, &kernel, &cert, 30.0)?;
    let mut lines = vec![format!("M0_min = {}", rounded(cond.m0_min))];
    lines.append(&mut checks.lines);
    checks.lines = lines;
    let body = json!({
        "example": "ex1",
        "theta": theta,
        "delay": 1,
        "status": "verified",
        "certificate": certificate_json(&cert),
        "verification": verification_json(&report),
        "condition": cond,
        "truncation": plan,
        "solve": d,
        "solution_sample": sample_json(&x, d.interior, 5),
    });
    Ok((checks, body))
}

fn repro_ex2() -> Result<(Checks, Value), Outcome> {
    let mut checks = Checks::new();
    let spec = checks.require("system builds", presets::example_two())?;
    let kernel = TransitionKernel::new(spec.clone(), 0);

    // A(t) vanishes at even t, so any backward product across one fails
    let inverse = match kernel.backward_transition(1, 5) {
        Err(e @ Error::SingularCoefficient { .. }) => format!("{e:?}"),
        Err(e) => return Err(Outcome::fail(exit::ASSERTION, format!("FAIL inverse path is singular: {e}"))),
        Ok(_) => return Err(Outcome::fail(exit::ASSERTION, "FAIL inverse path is singular: inverse exists")),
    };
    checks.check("inverse path is singular", true, inverse.clone())?;

    let vwin = TimeWindow { lo: -60, hi: 60 };
    let (cert, report) = checks.require("forward certificate verifies", certify(&kernel, unit_certificate(2, vwin)))?;
    checks.check(
        "forward certificate verifies",
        report.passed,
        format!("verified with P = I, alpha1 = beta1 = 1 on [{}, {}]", vwin.lo, vwin.hi),
    )?;

    let (cond, plan, d, x) = solve_and_check(&mut checks, &spec, &kernel, &cert, 15.0)?;
    let body = json!({
        "example": "ex2",
        "forcing": "G(t, u, v) = (sin(pi t/2) + sin(pi t sqrt(2)/2)) (1, 1) + u/10",
        "inverse_path": { "status": "failed", "error": inverse },
        "forward_path": { "status": "verified", "certificate": certificate_json(&cert), "verification": verification_json(&report) },
        "condition": cond,
        "truncation": plan,
        "solve": d,
        "solution_sample": sample_json(&x, d.interior, 5),
    });
    Ok((checks, body))
}

/// A few points around the middle of `interior`.
fn sample_json(x: &SequenceWindow, interior: TimeWindow, half: i64) -> Value {
    let mid = interior.lo + (interior.hi - interior.lo) / 2;
    let pts: Vec<Value> = (mid - half..=mid + half)
        .filter_map(|t| x.get(t).ok().map(|v| json!({ "t": t, "x": vector_values(v) })))
        .collect();
    Value::Array(pts)
}

/// Which shifts `classify` should use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftChoice {
    Fibonacci,
    List(Vec<i64>),
}

impl std::str::FromStr for ShiftChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "fib" {
            return Ok(ShiftChoice::Fibonacci);
        }
        s.split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|_| format!("bad shift `{p}`; expected `fib` or a list like 8,13,21")))
            .collect::<Result<Vec<_>, _>>()
            .map(ShiftChoice::List)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyArgs {
    pub csv: PathBuf,
    pub eps: Vec<f64>,
    pub tau_max: Option<i64>,
    pub shifts: ShiftChoice,
    pub tol: f64,
    pub probe_len: Option<i64>,
    pub out: Option<PathBuf>,
}

/// Probe window at the start of the data; every shift must keep the shifted
/// probe inside the data.
fn classify_params(x: &SequenceWindow, a: &ClassifyArgs) -> Result<ClassifyParams, String> {
    let w = x.window();
    let len = w.len() as i64;
    let tau_max = a.tau_max.unwrap_or_else(|| 200.min((len - 1) / 2));
    if tau_max < 1 || 2 * tau_max >= len {
        return Err(format!("tau-max {tau_max} needs between 1 and {} for {len} samples", (len - 1) / 2));
    }
    let probe_len = a.probe_len.unwrap_or_else(|| 61.min(len / 4)).max(1);
    let probe = TimeWindow::new(w.lo, w.lo + probe_len - 1).map_err(|e| e.to_string())?;
    let room = w.hi - probe.hi;
    let plan = match &a.shifts {
        ShiftChoice::Fibonacci => ShiftPlan::fibonacci(3, 90).and_then(|p| p.truncated(room)),
        ShiftChoice::List(v) => {
            let mut v: Vec<i64> = v.iter().copied().filter(|&k| k > 0 && k <= room).collect();
            v.sort_unstable();
            v.dedup();
            ShiftPlan::explicit(v)
        }
    }
    .map_err(|e| format!("no usable shifts within {room} samples of the probe: {e}"))?;
    if plan.shifts.len() < 3 {
        return Err(format!("only {} shift(s) fit the data; at least 3 are needed", plan.shifts.len()));
    }
    if a.eps.is_empty() || a.eps.iter().any(|e| !(*e > 0.0)) {
        return Err("eps values must be positive".into());
    }
    Ok(ClassifyParams { eps_grid: a.eps.clone(), tau_max, scan_window: w, plan, probe, tol: a.tol })
}

fn classification_json(p: &ClassifyParams, c: &Classification) -> Value {
    let b = &c.bochner;
    json!({
        "verdict": c.verdict,
        "period": c.period,
        "note": c.note,
        "params": {
            "eps": p.eps_grid,
            "tau_max": p.tau_max,
            "scan_window": p.scan_window,
            "probe": p.probe,
            "tol": p.tol,
            "shifts": p.plan.shifts,
            "shift_source": p.plan.source,
        },
        "bohr_scans": c.scans,
        "bochner": {
            "passed": b.passed,
            "tol": b.tol,
            "forward_discrepancy": b.forward_discrepancy,
            "backward_discrepancy": b.backward_discrepancy,
            "fbar": b.fbar.iter().map(|(t, v)| json!({ "t": t, "v": vector_values(v) })).collect::<Vec<_>>(),
        },
    })
}

pub fn cmd_classify(a: &ClassifyArgs, out: &Path) -> anyhow::Result<Outcome> {
    let x = match read_sequence_csv(&a.csv) {
        Ok(x) => x,
        Err(e) => return Ok(Outcome::fail(exit::CONFIG, format!("cannot parse {}: {e:#}", a.csv.display()))),
    };
    let params = match classify_params(&x, a) {
        Ok(p) => p,
        Err(m) => return Ok(Outcome::fail(exit::CONFIG, m)),
    };
    let c = match classify(&x, &params) {
        Ok(c) => c,
        Err(e) => return Ok(Outcome::fail(exit_code(&e), format!("classify: {e}"))),
    };
    let path = match &a.out {
        Some(p) => p.clone(),
        None => {
            let stem = a.csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "signal".into());
            out.join(format!("{stem}.classify.json"))
        }
    };
    write_json(&path, &classification_json(&params, &c))?;
    let verdict = serde_json::to_value(c.verdict)?;
    Ok(Outcome::new(
        exit::OK,
        vec![
            format!("verdict: {}", verdict.as_str().unwrap_or_default()),
            format!("bochner passed: {} ({} shifts)", c.bochner.passed, params.plan.shifts.len()),
            format!("note: {}", c.note),
            format!("report written to {}", path.display()),
        ],
    ))
}
