//! Feasibility check and fixed-point iteration for bounded solutions.
//!
//! With `K = β₁(1+α₁)/α₁ + β₂/α₂` the operator `H` is Lipschitz with
//! `L = E₁ + [(‖A‖+1)E₁ + 2E₂]·K`, and maps the ball of radius `M` into itself
//! whenever
//!
//! ```text
//! E₁M + b + [(‖A‖+1)(E₁M + b) + 2E₂M + a]·K <= M.
//! ```
//!
//! Plain iteration of `H` needs `L < 1`, which is stronger than what an
//! existence argument based on compactness requires; when it fails the
//! solver reports that instead of guessing.

use serde::{Deserialize, Serialize};

use crate::dichotomy::DichotomyCertificate;
use crate::error::{Error, Result};
use crate::operator::{lambda_cap, TruncationPlan, WindowedOperator};
use crate::system::{residual, SystemSpec};
use crate::transition::TransitionKernel;
use crate::window::{SequenceWindow, TimeWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub norm_a: f64,
    pub k: f64,
    pub l: f64,
    /// Smallest admissible ball radius; infinite when `L >= 1`.
    pub m0_min: f64,
    pub feasible: bool,
    pub verdict: String,
}

impl ConditionReport {
    /// Left side of the self-map inequality at radius `m`.
    pub fn self_map_lhs(&self, spec: &SystemSpec, m: f64) -> f64 {
        spec.e1 * m + spec.b + lambda_cap(spec, self.norm_a, m) * self.k
    }
}

pub fn condition_report(
    spec: &SystemSpec,
    cert: &DichotomyCertificate,
    window: TimeWindow,
) -> ConditionReport {
    let norm_a = spec.coefficient_norm_on(window);
    let k = cert.kernel_sum();
    let (e1, e2, a, b) = (spec.e1, spec.e2, spec.a, spec.b);
    let l = e1 + ((norm_a + 1.0) * e1 + 2.0 * e2) * k;
    let e1_ok = (0.0..1.0).contains(&e1);
    let contractive = l < 1.0;
    let m0_min = if contractive {
        (b + ((norm_a + 1.0) * b + a) * k) / (1.0 - l)
    } else {
        f64::INFINITY
    };
    let verdict = match (e1_ok, contractive) {
        (false, _) => format!("infeasible: E1 = {e1} lies outside [0, 1)"),
        (true, true) => format!("feasible: L = {l} < 1, M0 >= {m0_min}"),
        (true, false) => format!(
            "iterative scheme inapplicable: L = {l} >= 1; existence may still follow \
             from the contraction/compactness split but no fixed point is computed"
        ),
    };
    ConditionReport { norm_a, k, l, m0_min, feasible: e1_ok && contractive, verdict }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// Sup-difference between consecutive iterates over the whole window;
    /// shrinks by at least the factor `L` per step.
    pub residual_history: Vec<f64>,
    /// The same differences restricted to the interior (the stopping criterion).
    pub interior_history: Vec<f64>,
    pub final_sup_norm: f64,
    /// Certified bound on the effect of the truncated kernel sums at interior points.
    pub truncation_error: f64,
    pub max_interior_residual: f64,
    pub interior: TimeWindow,
}

impl SolveDiagnostics {
    /// Ratios of consecutive entries of the residual history.
    pub fn ratios(&self) -> Vec<f64> {
        self.residual_history
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Points at least `n_past + max delay` from the left edge and `n_future + 1`
/// from the right edge.
pub fn interior_window(spec: &SystemSpec, window: TimeWindow, plan: &TruncationPlan) -> Result<TimeWindow> {
    let lo = window.lo + (plan.n_past + spec.max_delay()) as i64;
    let hi = window.hi - plan.n_future as i64 - 1;
    TimeWindow::new(lo, hi).map_err(|_| {
        Error::Domain(format!(
            "window [{}, {}] is too short for truncation ({}, {}) and delay {}",
            window.lo,
            window.hi,
            plan.n_past,
            plan.n_future,
            spec.max_delay()
        ))
    })
}

fn interior_distance(a: &SequenceWindow, b: &SequenceWindow, interior: TimeWindow) -> f64 {
    interior
        .iter()
        .map(|t| crate::norm::sup_norm(&(a.get(t).unwrap() - b.get(t).unwrap())))
        .fold(0.0, f64::max)
}

/// Iterates `x_{k+1} = H(x_k)` from `x₀ ≡ 0` on `window` until consecutive
/// iterates agree to `tol` on the interior.
pub fn solve_fixed_point(
    spec: &SystemSpec,
    kernel: &TransitionKernel,
    cert: &DichotomyCertificate,
    window: TimeWindow,
    plan: &TruncationPlan,
    tol: f64,
    max_iter: usize,
) -> Result<(SequenceWindow, SolveDiagnostics)> {
    let report = condition_report(spec, cert, window);
    if !(report.l < 1.0) {
        return Err(Error::NotContractive { factor: report.l });
    }
    if !report.feasible {
        return Err(Error::Config(report.verdict));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let interior = interior_window(spec, window, plan)?;
    let op = WindowedOperator::new(spec, kernel, cert, window)?;

    let mut x = SequenceWindow::zeros(window, spec.dim());
    let mut history = Vec::new();
    let mut interior_history = Vec::new();
    loop {
        if history.len() >= max_iter {
            return Err(Error::MaxIterExceeded { history });
        }
        let next = op.apply(&x)?;
        let diff = interior_distance(&next, &x, interior);
        if !diff.is_finite() {
            return Err(Error::Numeric("iteration diverged".into()));
        }
        history.push(next.sup_distance(&x));
        interior_history.push(diff);
        x = next;
        if diff <= tol {
            break;
        }
    }
    let max_interior_residual = verify_solution_on(spec, &x, interior)?;
    let final_sup_norm = x.restrict(interior)?.sup_norm();
    let diagnostics = SolveDiagnostics {
        iterations: history.len(),
        residual_history: history,
        interior_history,
        final_sup_norm,
        truncation_error: plan.total_tail(),
        max_interior_residual,
        interior,
    };
    Ok((x, diagnostics))
}

fn verify_solution_on(spec: &SystemSpec, x: &SequenceWindow, range: TimeWindow) -> Result<f64> {
    let w = x.window();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for t in range.iter() {
        let lags_ok = t - spec.delay(t) as i64 >= w.lo && t + 1 - spec.delay(t + 1) as i64 >= w.lo;
        if t + 1 > w.hi || !lags_ok {
            continue;
        }
        worst = worst.max(residual(spec, x, t)?);
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::Domain("no admissible interior point to check".into()));
    }
    Ok(worst)
}

/// Largest recurrence residual over every `t` whose evaluation stays inside the window.
pub fn verify_solution(spec: &SystemSpec, x: &SequenceWindow) -> Result<f64> {
    let w = x.window();
    if w.len() < 2 + spec.max_delay() {
        return Err(Error::Domain(format!(
            "window of length {} is shorter than 2 + max delay {}",
            w.len(),
            spec.max_delay()
        )));
    }
    verify_solution_on(spec, x, w)
}
