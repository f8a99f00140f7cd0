//! The fixed-point operator `H = H₁ + H₂` whose fixed points are the bounded
//! solutions of the neutral system.
//!
//! ```text
//! Λ(j,x)   = (A(j) − I) Q(j, x(j−g(j))) + G(j, x(j), x(j−g(j)))
//! (H₁x)(t) = Q(t, x(t−g(t)))
//! (H₂x)(t) = Σ_{j<t} X(t)PX⁻¹(j+1) Λ(j,x) − Σ_{j>=t} X(t)(I−P)X⁻¹(j+1) Λ(j,x)
//! ```
//!
//! The bi-infinite sums are truncated; omitted terms are bounded by the
//! geometric remainders of the dichotomy estimate.

use serde::{Deserialize, Serialize};

use crate::dichotomy::{DichotomyCertificate, DichotomyConstants, ProjectedKernel};
use crate::error::{Error, Result};
use crate::norm::{identity, sup_norm, Matrix, Vector};
use crate::system::SystemSpec;
use crate::transition::TransitionKernel;
use crate::window::{SequenceWindow, TimeWindow};

/// Number of terms kept on each side of `t`, with certified bounds on what
/// was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub n_past: usize,
    pub n_future: usize,
    pub tail_past: f64,
    pub tail_future: f64,
}

impl TruncationPlan {
    pub fn new(
        constants: &DichotomyConstants,
        sup_lambda: f64,
        n_past: usize,
        n_future: usize,
    ) -> Result<Self> {
        let (tail_past, tail_future) = tail_bound(constants, sup_lambda, n_past, n_future)?;
        Ok(TruncationPlan { n_past, n_future, tail_past, tail_future })
    }

    /// Smallest `N` per side with a certified tail below `tol/10`.
    pub fn auto(constants: &DichotomyConstants, sup_lambda: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("truncation tolerance must be positive, got {tol}")));
        }
        let target = tol / 10.0;
        let mut n_past = 1;
        while tail_bound(constants, sup_lambda, n_past, 1)?.0 >= target {
            n_past += 1;
            if n_past > 100_000 {
                return Err(Error::Numeric("past tail does not reach tolerance".into()));
            }
        }
        let mut n_future = 1;
        while tail_bound(constants, sup_lambda, 1, n_future)?.1 >= target {
            n_future += 1;
            if n_future > 100_000 {
                return Err(Error::Numeric("future tail does not reach tolerance".into()));
            }
        }
        Self::new(constants, sup_lambda, n_past, n_future)
    }

    pub fn total_tail(&self) -> f64 {
        self.tail_past + self.tail_future
    }
}

/// Geometric remainders of the two kernel sums beyond `N_past` and `N_future`
/// terms: `sup_Λ·β₁(1+α₁)^(1−N_past)/α₁` and `sup_Λ·β₂(1+α₂)^(−N_future)/α₂`.
pub fn tail_bound(
    constants: &DichotomyConstants,
    sup_lambda: f64,
    n_past: usize,
    n_future: usize,
) -> Result<(f64, f64)> {
    let DichotomyConstants { alpha1, beta1, alpha2, beta2 } = *constants;
    if [alpha1, beta1, alpha2, beta2].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("dichotomy constants must be positive, got {constants:?}")));
    }
    if !(sup_lambda >= 0.0) {
        return Err(Error::Config(format!("sup of Λ must be nonnegative, got {sup_lambda}")));
    }
    if sup_lambda == 0.0 {
        return Ok((0.0, 0.0));
    }
    let past = sup_lambda * beta1 * (1.0 + alpha1).powf(1.0 - n_past as f64) / alpha1;
    let future = sup_lambda * beta2 * (1.0 + alpha2).powf(-(n_future as f64)) / alpha2;
    Ok((past, future))
}

fn lagged(spec: &SystemSpec, t: i64) -> i64 {
    t - spec.delay(t) as i64
}

/// `Λ(j,x) = (A(j) − I) Q(j, x(j−g(j))) + G(j, x(j), x(j−g(j)))`.
pub fn lambda_term(spec: &SystemSpec, x: &SequenceWindow, j: i64) -> Result<Vector> {
    let xj = x.get(j)?;
    let xd = x.get(lagged(spec, j))?;
    Ok(lambda_from(spec, j, xj, xd))
}

fn lambda_from(spec: &SystemSpec, j: i64, xj: &Vector, xd: &Vector) -> Vector {
    let n = spec.dim();
    let mut out = spec.forcing(j, xj, xd);
    if spec.has_neutral() {
        out += (spec.coefficient(j) - identity(n)) * spec.neutral(j, xd);
    }
    out
}

/// `(H₁x)(t) = Q(t, x(t−g(t)))`.
pub fn apply_h1(spec: &SystemSpec, x: &SequenceWindow, t: i64) -> Result<Vector> {
    Ok(spec.neutral(t, x.get(lagged(spec, t))?))
}

/// Global bound on `‖Λ(j,x)‖` for every `x` with `‖x‖_sup <= radius`:
/// `(‖A‖+1)(E₁·radius + b) + 2E₂·radius + a`.
pub fn lambda_cap(spec: &SystemSpec, norm_a: f64, radius: f64) -> f64 {
    (norm_a + 1.0) * (spec.e1 * radius + spec.b) + 2.0 * spec.e2 * radius + spec.a
}

/// Truncated `(H₂x)(t)` and a certified bound on the dropped terms.
pub fn apply_h2(
    spec: &SystemSpec,
    kernel: &TransitionKernel,
    cert: &DichotomyCertificate,
    x: &SequenceWindow,
    t: i64,
    plan: &TruncationPlan,
) -> Result<(Vector, f64)> {
    let pk = ProjectedKernel::new(kernel, &cert.projector)?;
    let n = spec.dim();
    let mut value = Vector::zeros(n);
    let mut sup_seen = 0.0_f64;
    if pk.has_stable() {
        for j in (t - plan.n_past as i64..t).rev() {
            let l = lambda_term(spec, x, j)?;
            sup_seen = sup_seen.max(sup_norm(&l));
            value += pk.stable(t, j + 1)? * l;
        }
    }
    if pk.has_unstable() {
        for j in t..t + plan.n_future as i64 {
            let l = lambda_term(spec, x, j)?;
            sup_seen = sup_seen.max(sup_norm(&l));
            value -= pk.unstable(t, j + 1)? * l;
        }
    }
    let norm_a = spec.coefficient_bound(x.window());
    let sup_lambda = sup_seen.max(lambda_cap(spec, norm_a, x.sup_norm()));
    let (past, future) = tail_bound(&cert.constants, sup_lambda, plan.n_past, plan.n_future)?;
    let error = if pk.has_stable() { past } else { 0.0 } + if pk.has_unstable() { future } else { 0.0 };
    Ok((value, error))
}

/// `(Hx)(t) = (H₁x)(t) + (H₂x)(t)`; the error bound comes from `H₂`.
pub fn apply_h(
    spec: &SystemSpec,
    kernel: &TransitionKernel,
    cert: &DichotomyCertificate,
    x: &SequenceWindow,
    t: i64,
    plan: &TruncationPlan,
) -> Result<(Vector, f64)> {
    let h1 = apply_h1(spec, x, t)?;
    let (h2, err) = apply_h2(spec, kernel, cert, x, t, plan)?;
    Ok((h1 + h2, err))
}

/// `H` restricted to a finite window: the kernel sums run over the window
/// only and states before its left edge read as zero. Kernels are tabulated
/// once, so repeated application (fixed-point iteration) is cheap.
///
/// The restricted operator telescopes exactly: a fixed point satisfies the
/// recurrence at every `t` whose delayed indices stay inside the window.
pub struct WindowedOperator {
    spec: SystemSpec,
    window: TimeWindow,
    // stable[t−lo][k] = K_P(t, t−k) for k = 0..=t−lo−1
    stable: Vec<Vec<Matrix>>,
    // unstable[t−lo][k] = K_{I−P}(t, t+1+k) for k = 0..=hi−1−t
    unstable: Vec<Vec<Matrix>>,
    has_stable: bool,
    has_unstable: bool,
}

impl WindowedOperator {
    pub fn new(
        spec: &SystemSpec,
        kernel: &TransitionKernel,
        cert: &DichotomyCertificate,
        window: TimeWindow,
    ) -> Result<Self> {
        let pk = ProjectedKernel::new(kernel, &cert.projector)?;
        let (lo, hi) = (window.lo, window.hi);
        let mut stable = Vec::with_capacity(window.len());
        let mut unstable = Vec::with_capacity(window.len());
        for t in window.iter() {
            let mut row = Vec::new();
            if pk.has_stable() {
                // s = j+1 ranges over (lo, t]
                for s in (lo + 1..=t).rev() {
                    row.push(pk.stable(t, s)?);
                }
            }
            stable.push(row);
            let mut row = Vec::new();
            if pk.has_unstable() {
                // s = j+1 ranges over (t, hi]
                for s in t + 1..=hi {
                    row.push(pk.unstable(t, s)?);
                }
            }
            unstable.push(row);
        }
        Ok(WindowedOperator {
            spec: spec.clone(),
            window,
            stable,
            unstable,
            has_stable: pk.has_stable(),
            has_unstable: pk.has_unstable(),
        })
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    fn state(&self, x: &SequenceWindow, t: i64) -> Vector {
        x.get(t).cloned().unwrap_or_else(|_| Vector::zeros(self.spec.dim()))
    }

    /// `Λ(j, x)` for every `j` in the window (zero-extended to the left).
    pub fn lambdas(&self, x: &SequenceWindow) -> Vec<Vector> {
        self.window
            .iter()
            .map(|j| {
                let xj = self.state(x, j);
                let xd = self.state(x, lagged(&self.spec, j));
                lambda_from(&self.spec, j, &xj, &xd)
            })
            .collect()
    }

    pub fn apply(&self, x: &SequenceWindow) -> Result<SequenceWindow> {
        if x.window() != self.window {
            return Err(Error::Domain("iterate window differs from the operator window".into()));
        }
        let lam = self.lambdas(x);
        let lo = self.window.lo;
        let values = self
            .window
            .iter()
            .map(|t| {
                let i = (t - lo) as usize;
                let mut v = self.spec.neutral(t, &self.state(x, lagged(&self.spec, t)));
                if self.has_stable {
                    // nearest j first: j = t−1, t−2, …, lo
                    for (k, m) in self.stable[i].iter().enumerate() {
                        v += m * &lam[i - 1 - k];
                    }
                }
                if self.has_unstable {
                    for (k, m) in self.unstable[i].iter().enumerate() {
                        v -= m * &lam[i + k];
                    }
                }
                v
            })
            .collect();
        SequenceWindow::new(self.window, values)
    }
}
