//! Finite-data tests for almost periodicity and almost automorphy.
//!
//! Neither property is decidable from samples. The functions here fix a
//! falsifiable protocol (shift plan, probe window, tolerance) and report the
//! evidence; a verdict is never a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{convergents, GeneratorSpec};
use crate::norm::{sup_norm, Vector};
use crate::window::{SequenceWindow, TimeWindow};

/// Anything that can be sampled on an integer window.
pub trait Signal {
    fn dim(&self) -> usize;

    fn value(&self, t: i64) -> Result<Vector>;

    fn sample(&self, window: TimeWindow) -> Result<SequenceWindow> {
        let values = window.iter().map(|t| self.value(t)).collect::<Result<Vec<_>>>()?;
        SequenceWindow::new(window, values)
    }
}

impl Signal for GeneratorSpec {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, t: i64) -> Result<Vector> {
        Ok(Vector::from_element(1, self.eval(t)))
    }
}

/// Vector signal with one generator per component.
impl Signal for [GeneratorSpec] {
    fn dim(&self) -> usize {
        self.len()
    }

    fn value(&self, t: i64) -> Result<Vector> {
        Ok(Vector::from_iterator(self.len(), self.iter().map(|g| g.eval(t))))
    }
}

impl Signal for SequenceWindow {
    fn dim(&self) -> usize {
        SequenceWindow::dim(self)
    }

    fn value(&self, t: i64) -> Result<Vector> {
        self.get(t).cloned()
    }

    fn sample(&self, window: TimeWindow) -> Result<SequenceWindow> {
        self.restrict(window)
    }
}

/// Adapts a closure `t ↦ f(t)` into a [`Signal`].
pub struct FnSignal<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(i64) -> Vector> FnSignal<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSignal { dim, f }
    }
}

impl<F: Fn(i64) -> Vector> Signal for FnSignal<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, t: i64) -> Result<Vector> {
        Ok((self.f)(t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftSource {
    Explicit,
    Fibonacci,
    ConvergentDenominators { theta: f64 },
    JointReturns { freqs: Vec<f64>, modulus: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftPlan {
    pub shifts: Vec<i64>,
    pub source: ShiftSource,
}

impl ShiftPlan {
    pub fn explicit(shifts: Vec<i64>) -> Result<Self> {
        Self::checked(shifts, ShiftSource::Explicit)
    }

    fn checked(shifts: Vec<i64>, source: ShiftSource) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Config("shift plan is empty".into()));
        }
        if shifts[0] <= 0 || shifts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("shifts must be positive and strictly increasing".into()));
        }
        Ok(ShiftPlan { shifts, source })
    }

    /// `F_from, …, F_to` with `F_1 = F_2 = 1`; repeated values are dropped.
    pub fn fibonacci(from: usize, to: usize) -> Result<Self> {
        if from == 0 || from > to || to > 90 {
            return Err(Error::Config(format!("bad Fibonacci index range {from}..={to}")));
        }
        let mut fib = vec![0_i64, 1, 1];
        while fib.len() <= to {
            let n = fib.len();
            fib.push(fib[n - 1] + fib[n - 2]);
        }
        let mut shifts: Vec<i64> = fib[from..=to].to_vec();
        shifts.dedup();
        Self::checked(shifts, ShiftSource::Fibonacci)
    }

    /// Convergent denominators of `theta` up to `max_den`, times `multiplier`.
    pub fn convergent_denominators(theta: f64, max_den: u64, multiplier: i64) -> Result<Self> {
        let mut shifts: Vec<i64> =
            convergents(theta, max_den).iter().map(|&(_, q)| q as i64 * multiplier).collect();
        shifts.dedup();
        Self::checked(shifts, ShiftSource::ConvergentDenominators { theta })
    }

    /// Successive record returns of `k ↦ (k·f₁, …, k·f_m) mod 1` towards the
    /// origin, restricted to multiples of `modulus` and `k <= k_max`; the last
    /// `count` records are kept.
    pub fn joint_returns(freqs: &[f64], modulus: i64, k_max: i64, count: usize) -> Result<Self> {
        let shifts = joint_return_times(freqs, modulus, k_max, count);
        Self::checked(shifts, ShiftSource::JointReturns { freqs: freqs.to_vec(), modulus })
    }

    pub fn max_shift(&self) -> i64 {
        *self.shifts.last().unwrap()
    }

    /// Keeps only shifts `<= limit`.
    pub fn truncated(&self, limit: i64) -> Result<Self> {
        let shifts = self.shifts.iter().copied().filter(|&k| k <= limit).collect();
        Self::checked(shifts, self.source.clone())
    }
}

fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Record-setting `k` (multiples of `modulus`) for `max_i ‖k·freqs[i]‖`.
pub fn joint_return_times(freqs: &[f64], modulus: i64, k_max: i64, count: usize) -> Vec<i64> {
    let modulus = modulus.max(1);
    let mut best = f64::INFINITY;
    let mut records = Vec::new();
    let mut k = modulus;
    while k <= k_max {
        let d = freqs.iter().map(|f| dist_to_integer(k as f64 * f)).fold(0.0, f64::max);
        if d < best {
            best = d;
            records.push(k);
        }
        k += modulus;
    }
    let skip = records.len().saturating_sub(count);
    records.split_off(skip)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BohrScan {
    pub eps: f64,
    pub tau_max: i64,
    pub periods: Vec<i64>,
    /// Largest gap between consecutive accepted `τ`, counting from 0.
    pub max_gap: Option<i64>,
}

/// Integers `τ ∈ [1, tau_max]` with `sup_t ‖f(t+τ) − f(t)‖ < eps` over the
/// overlap of the window with its translate.
pub fn bohr_epsilon_periods(f: &SequenceWindow, eps: f64, tau_max: i64) -> Result<BohrScan> {
    let len = f.window().len() as i64;
    if tau_max < 1 || 2 * tau_max >= len {
        return Err(Error::Domain(format!(
            "tau_max = {tau_max} must lie in [1, window length / 2) with length {len}"
        )));
    }
    let v = f.values();
    let mut periods = Vec::new();
    for tau in 1..=tau_max {
        let tau_u = tau as usize;
        let ok = (0..v.len() - tau_u).all(|i| {
            v[i + tau_u].iter().zip(v[i].iter()).all(|(a, b)| (a - b).abs() < eps)
        });
        if ok {
            periods.push(tau);
        }
    }
    let max_gap = if periods.is_empty() {
        None
    } else {
        let mut prev = 0;
        let mut gap = 0;
        for &p in &periods {
            gap = gap.max(p - prev);
            prev = p;
        }
        Some(gap)
    };
    Ok(BohrScan { eps, tau_max, periods, max_gap })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BochnerResult {
    /// `f̄(t) = f(t + k_N)` on the probe window.
    pub fbar: SequenceWindow,
    /// `sup_{t ∈ probe} ‖f(t+k_n) − f̄(t)‖`.
    pub forward_discrepancy: Vec<f64>,
    /// `sup_{t ∈ probe} ‖f̄(t−k_n) − f(t)‖`.
    pub backward_discrepancy: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

fn tail_below(seq: &[f64], tol: f64) -> bool {
    seq.len() >= 3 && seq[seq.len() - 3..].iter().all(|d| *d < tol)
}

/// Empirical Bochner check: `f̄` is anchored at the largest shift, and the test
/// passes when the last three entries of both discrepancy sequences are below `tol`.
pub fn bochner_test<S: Signal + ?Sized>(
    f: &S,
    plan: &ShiftPlan,
    probe: TimeWindow,
    tol: f64,
) -> Result<BochnerResult> {
    let k_max = plan.max_shift();
    let fbar = f.sample(probe.shifted(k_max))?;
    let fbar = SequenceWindow::new(probe, fbar.values().to_vec())?;
    let base = f.sample(probe)?;
    let mut forward = Vec::with_capacity(plan.shifts.len());
    let mut backward = Vec::with_capacity(plan.shifts.len());
    for &k in &plan.shifts {
        let shifted = f.sample(probe.shifted(k))?;
        forward.push(
            shifted.values().iter().zip(fbar.values()).map(|(a, b)| sup_norm(&(a - b))).fold(0.0, f64::max),
        );
        // f̄(t − k) = f(t − k + k_N)
        let back = f.sample(probe.shifted(k_max - k))?;
        backward.push(
            back.values().iter().zip(base.values()).map(|(a, b)| sup_norm(&(a - b))).fold(0.0, f64::max),
        );
    }
    let passed = tail_below(&forward, tol) && tail_below(&backward, tol);
    Ok(BochnerResult { fbar, forward_discrepancy: forward, backward_discrepancy: backward, tol, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Periodic,
    NumericallyAlmostPeriodic,
    NumericallyAlmostAutomorphic,
    Unclassified,
}

/// Exact-period threshold for the periodic verdict.
pub const PERIOD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyParams {
    pub eps_grid: Vec<f64>,
    pub tau_max: i64,
    /// Window sampled for the Bohr scans.
    pub scan_window: TimeWindow,
    pub plan: ShiftPlan,
    pub probe: TimeWindow,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub period: Option<i64>,
    pub scans: Vec<BohrScan>,
    pub bochner: BochnerResult,
    pub note: &'static str,
}

pub const EVIDENCE_NOTE: &str = "numerical evidence on finite data, not a proof";

/// Periodic, then almost periodic (an ε-period found for every ε in the grid),
/// then almost automorphic (Bochner passes), else unclassified.
pub fn classify<S: Signal + ?Sized>(f: &S, params: &ClassifyParams) -> Result<Classification> {
    let samples = f.sample(params.scan_window)?;
    let exact = bohr_epsilon_periods(&samples, PERIOD_EPS, params.tau_max)?;
    let period = exact.periods.first().copied();
    let scans = params
        .eps_grid
        .iter()
        .map(|&eps| bohr_epsilon_periods(&samples, eps, params.tau_max))
        .collect::<Result<Vec<_>>>()?;
    let bochner = bochner_test(f, &params.plan, params.probe, params.tol)?;
    let verdict = if period.is_some() {
        Verdict::Periodic
    } else if !scans.is_empty() && scans.iter().all(|s| s.max_gap.is_some()) {
        Verdict::NumericallyAlmostPeriodic
    } else if bochner.passed {
        Verdict::NumericallyAlmostAutomorphic
    } else {
        Verdict::Unclassified
    };
    Ok(Classification { verdict, period, scans, bochner, note: EVIDENCE_NOTE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Harmonic;
    use crate::presets;

    fn w(lo: i64, hi: i64) -> TimeWindow {
        TimeWindow::new(lo, hi).unwrap()
    }

    fn quarter_sine() -> GeneratorSpec {
        GeneratorSpec::sines(vec![Harmonic::sin(1.0, 0.5)])
    }

    #[test]
    fn period_four_scan() {
        let f = quarter_sine().sample(w(-200, 200)).unwrap();
        let scan = bohr_epsilon_periods(&f, 1e-9, 50).unwrap();
        assert_eq!(scan.periods, (1..=12).map(|k| 4 * k).collect::<Vec<_>>());
        assert_eq!(scan.max_gap, Some(4));
        assert!(bohr_epsilon_periods(&f, 1e-9, 201).is_err());
    }

    #[test]
    fn two_tone_has_epsilon_periods() {
        let f = presets::two_tone_sine().sample(w(-2000, 2000)).unwrap();
        let scan = bohr_epsilon_periods(&f, 0.1, 500).unwrap();
        assert!(!scan.periods.is_empty() && scan.max_gap.is_some());
        // brute oracle: τ must be ≡ 0 mod 4 for the first tone to cancel
        assert!(scan.periods.iter().all(|p| p % 4 == 0));
    }

    #[test]
    fn sign_cos_has_no_half_periods() {
        let g = GeneratorSpec::sign_cos(presets::golden_theta(), 1.0);
        let scan = bohr_epsilon_periods(&g.sample(w(-2000, 2000)).unwrap(), 0.5, 200).unwrap();
        assert!(scan.periods.is_empty());
        assert_eq!(scan.max_gap, None);
    }

    #[test]
    fn bochner_trivial_cases() {
        let c = GeneratorSpec::constant(3.0);
        let r = bochner_test(&c, &ShiftPlan::fibonacci(5, 12).unwrap(), w(-10, 10), 1e-12).unwrap();
        assert!(r.passed);
        assert!(r.forward_discrepancy.iter().chain(&r.backward_discrepancy).all(|d| *d == 0.0));

        let p = GeneratorSpec::PeriodicTable { values: vec![0.3, -1.0, 2.0] };
        let plan = ShiftPlan::explicit(vec![3, 6, 9, 12, 300]).unwrap();
        let r = bochner_test(&p, &plan, w(-10, 10), 1e-12).unwrap();
        assert!(r.forward_discrepancy.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn sign_cos_passes_along_fibonacci() {
        let g = GeneratorSpec::sign_cos(presets::golden_theta(), 1.0);
        let r = bochner_test(&g, &ShiftPlan::fibonacci(5, 22).unwrap(), w(-50, 50), 1e-3).unwrap();
        assert!(r.passed, "{:?} {:?}", r.forward_discrepancy, r.backward_discrepancy);
    }

    #[test]
    fn fixed_windows_must_cover_shifts() {
        let f = quarter_sine().sample(w(0, 100)).unwrap();
        let plan = ShiftPlan::explicit(vec![4, 8, 200]).unwrap();
        assert!(matches!(bochner_test(&f, &plan, w(0, 10), 1e-9), Err(Error::MissingIndex { .. })));
    }

    #[test]
    fn plans() {
        assert_eq!(ShiftPlan::fibonacci(1, 8).unwrap().shifts, vec![1, 2, 3, 5, 8, 13, 21]);
        let c = ShiftPlan::convergent_denominators(presets::golden_theta(), 100, 1).unwrap();
        assert_eq!(c.shifts, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(ShiftPlan::explicit(vec![3, 3]).is_err());
        assert!(ShiftPlan::explicit(vec![0, 3]).is_err());
        let j = ShiftPlan::joint_returns(&[presets::golden_theta()], 1, 100, 3).unwrap();
        assert_eq!(j.shifts, vec![34, 55, 89]);
    }

    fn params(plan: ShiftPlan) -> ClassifyParams {
        ClassifyParams {
            eps_grid: vec![0.5, 0.25, 0.1],
            tau_max: 500,
            scan_window: w(-2000, 2000),
            plan,
            probe: w(-50, 50),
            tol: 1e-3,
        }
    }

    #[test]
    fn classification_triptych() {
        let c = classify(&quarter_sine(), &params(ShiftPlan::explicit(vec![4, 8, 12, 16]).unwrap())).unwrap();
        assert_eq!(c.verdict, Verdict::Periodic);
        assert_eq!(c.period, Some(4));

        let c = classify(&presets::two_tone_sine(), &params(ShiftPlan::fibonacci(5, 22).unwrap())).unwrap();
        assert_eq!(c.verdict, Verdict::NumericallyAlmostPeriodic);

        let g = GeneratorSpec::sign_cos(presets::golden_theta(), 1.0);
        let c = classify(&g, &params(ShiftPlan::fibonacci(5, 22).unwrap())).unwrap();
        assert_eq!(c.verdict, Verdict::NumericallyAlmostAutomorphic);
        assert_eq!(c.note, EVIDENCE_NOTE);
    }
}
