//! Discrete exponential dichotomies.
//!
//! A projector `P` and constants `α₁, α₂, β₁, β₂ > 0` such that
//!
//! ```text
//! ‖X(t) P X⁻¹(s)‖      <= β₁ (1+α₁)^(s−t),  t >= s
//! ‖X(t) (I−P) X⁻¹(s)‖  <= β₂ (1+α₂)^(t−s),  s >= t
//! ```
//!
//! The stable kernel is evaluated as `Φ(t,s)·P_s` with `P_s = X(s) P X⁻¹(s)`.
//! When `P = I` (or `P = 0`) the transport is trivial and no coefficient is
//! ever inverted; otherwise backward products are required.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{identity, is_identity, is_zero, row_sum_norm, sup_norm, Matrix, Vector};
use crate::system::SystemSpec;
use crate::transition::TransitionKernel;
use crate::window::TimeWindow;

/// Relative slack used when comparing kernel norms with their bounds.
pub const BOUND_RTOL: f64 = 1e-12;
/// Idempotence tolerance for projectors.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Growth rates closer than this to the split threshold are ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyConstants {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

impl DichotomyConstants {
    pub fn symmetric(alpha: f64, beta: f64) -> Self {
        DichotomyConstants { alpha1: alpha, beta1: beta, alpha2: alpha, beta2: beta }
    }

    /// `β₁(1+α₁)/α₁ + β₂/α₂`, the total mass of the Green kernel bound.
    pub fn kernel_sum(&self) -> f64 {
        self.beta1 * (1.0 + self.alpha1) / self.alpha1 + self.beta2 / self.alpha2
    }

    pub fn stable_bound(&self, t: i64, s: i64) -> f64 {
        self.beta1 * (1.0 + self.alpha1).powi((s - t) as i32)
    }

    pub fn unstable_bound(&self, t: i64, s: i64) -> f64 {
        self.beta2 * (1.0 + self.alpha2).powi((t - s) as i32)
    }

    fn validate(&self) -> Result<()> {
        let all = [self.alpha1, self.beta1, self.alpha2, self.beta2];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("dichotomy constants must be positive, got {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyCertificate {
    pub projector: Matrix,
    pub constants: DichotomyConstants,
    pub window: TimeWindow,
    /// Smallest `bound − ‖kernel‖` over the checked pairs (set by verification).
    pub max_slack: f64,
}

impl DichotomyCertificate {
    pub fn new(projector: Matrix, constants: DichotomyConstants, window: TimeWindow) -> Self {
        DichotomyCertificate { projector, constants, window, max_slack: f64::NAN }
    }

    pub fn kernel_sum(&self) -> f64 {
        self.constants.kernel_sum()
    }
}

/// Which part of the split a projector leaves non-trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorKind {
    Identity,
    Zero,
    General,
}

impl ProjectorKind {
    pub fn of(p: &Matrix) -> Self {
        if is_identity(p) {
            ProjectorKind::Identity
        } else if is_zero(p) {
            ProjectorKind::Zero
        } else {
            ProjectorKind::General
        }
    }
}

/// Green-kernel view of a transition kernel split by a projector.
pub struct ProjectedKernel<'a> {
    kernel: &'a TransitionKernel,
    projector: Matrix,
    kind: ProjectorKind,
}

impl<'a> ProjectedKernel<'a> {
    pub fn new(kernel: &'a TransitionKernel, projector: &Matrix) -> Result<Self> {
        let n = kernel.dim();
        if projector.nrows() != n || projector.ncols() != n {
            return Err(Error::Config(format!("projector must be {n}x{n}")));
        }
        let defect = row_sum_norm(&(projector * projector - projector));
        if defect > PROJECTOR_TOL {
            return Err(Error::Config(format!("P is not idempotent: ‖P²−P‖ = {defect:e}")));
        }
        Ok(ProjectedKernel { kernel, projector: projector.clone(), kind: ProjectorKind::of(projector) })
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn kernel(&self) -> &TransitionKernel {
        self.kernel
    }

    /// `P_s = X(s) P X⁻¹(s)`.
    pub fn transported(&self, s: i64) -> Result<Matrix> {
        let n = self.kernel.dim();
        match self.kind {
            ProjectorKind::Identity => Ok(identity(n)),
            ProjectorKind::Zero => Ok(Matrix::zeros(n, n)),
            ProjectorKind::General => Ok(self.kernel.fundamental(s)?
                * &self.projector
                * self.kernel.inverse_fundamental(s)?),
        }
    }

    /// `X(t) P X⁻¹(s)` for `t >= s`.
    pub fn stable(&self, t: i64, s: i64) -> Result<Matrix> {
        match self.kind {
            ProjectorKind::Zero => Ok(Matrix::zeros(self.kernel.dim(), self.kernel.dim())),
            ProjectorKind::Identity => self.kernel.transition(t, s),
            ProjectorKind::General => Ok(self.kernel.transition(t, s)? * self.transported(s)?),
        }
    }

    /// `X(t) (I−P) X⁻¹(s)` for `s >= t`.
    pub fn unstable(&self, t: i64, s: i64) -> Result<Matrix> {
        let n = self.kernel.dim();
        match self.kind {
            ProjectorKind::Identity => Ok(Matrix::zeros(n, n)),
            ProjectorKind::Zero => self.kernel.backward_transition(t, s),
            ProjectorKind::General => Ok(self.kernel.backward_transition(t, s)?
                * (identity(n) - self.transported(s)?)),
        }
    }

    pub fn has_stable(&self) -> bool {
        self.kind != ProjectorKind::Zero
    }

    pub fn has_unstable(&self) -> bool {
        self.kind != ProjectorKind::Identity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub t: i64,
    pub s: i64,
    pub branch: Branch,
    pub norm: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub pairs_checked: usize,
    /// Smallest `bound − norm` over all pairs.
    pub max_slack: f64,
    pub worst_pair: Option<(i64, i64)>,
    pub pairs: Vec<PairCheck>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|p| !p.holds)
    }
}

/// Checks both dichotomy inequalities at every pair of the certificate's window.
pub fn verify_certificate(
    kernel: &TransitionKernel,
    cert: &DichotomyCertificate,
) -> Result<VerificationReport> {
    cert.constants.validate()?;
    let pk = ProjectedKernel::new(kernel, &cert.projector)?;
    let w = cert.window;
    let mut pairs = Vec::with_capacity(w.len() * (w.len() + 1));
    for t in w.iter() {
        for s in w.lo..=t {
            let norm = if pk.has_stable() { row_sum_norm(&pk.stable(t, s)?) } else { 0.0 };
            let bound = cert.constants.stable_bound(t, s);
            pairs.push(PairCheck {
                t,
                s,
                branch: Branch::Stable,
                norm,
                bound,
                holds: norm <= bound * (1.0 + BOUND_RTOL),
            });
        }
        for s in t..=w.hi {
            let norm = if pk.has_unstable() { row_sum_norm(&pk.unstable(t, s)?) } else { 0.0 };
            let bound = cert.constants.unstable_bound(t, s);
            pairs.push(PairCheck {
                t,
                s,
                branch: Branch::Unstable,
                norm,
                bound,
                holds: norm <= bound * (1.0 + BOUND_RTOL),
            });
        }
    }
    let worst = pairs.iter().min_by(|a, b| (a.bound - a.norm).total_cmp(&(b.bound - b.norm)));
    Ok(VerificationReport {
        passed: pairs.iter().all(|p| p.holds),
        pairs_checked: pairs.len(),
        max_slack: worst.map_or(f64::INFINITY, |p| p.bound - p.norm),
        worst_pair: worst.map(|p| (p.t, p.s)),
        pairs,
    })
}

/// Verifies and, on success, stamps the certificate with the observed slack.
pub fn certify(
    kernel: &TransitionKernel,
    mut cert: DichotomyCertificate,
) -> Result<(DichotomyCertificate, VerificationReport)> {
    let report = verify_certificate(kernel, &cert)?;
    cert.max_slack = report.max_slack;
    Ok((cert, report))
}

fn growth_window(kernel: &TransitionKernel, window: TimeWindow) -> Result<(i64, i64)> {
    if window.len() < 8 {
        return Err(Error::Domain(format!("window needs at least 8 points, got {}", window.len())));
    }
    let t0 = kernel.t0();
    if !window.contains(t0) || window.hi <= t0 {
        return Err(Error::Domain(format!(
            "t0 = {t0} must lie in [{}, {}) for growth estimation",
            window.lo, window.hi
        )));
    }
    Ok((t0, window.hi))
}

/// Projector onto the directions whose average per-step log-growth under
/// `Φ(t_hi, t0)` is below `rate_threshold`, from the right singular vectors.
/// Returns `I` exactly when every mode decays and `0` when none does.
pub fn estimate_projector(
    kernel: &TransitionKernel,
    window: TimeWindow,
    rate_threshold: f64,
) -> Result<Matrix> {
    let (t0, hi) = growth_window(kernel, window)?;
    let n = kernel.dim();
    let phi = kernel.transition(hi, t0)?;
    let svd = phi
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested right singular vectors");
    let steps = (hi - t0) as f64;
    let mut stable = Vec::new();
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        let rate = if sigma > 0.0 { sigma.ln() / steps } else { f64::NEG_INFINITY };
        if (rate - rate_threshold).abs() < AMBIGUITY_MARGIN {
            return Err(Error::AmbiguousSplit { rate, threshold: rate_threshold });
        }
        if rate < rate_threshold {
            stable.push(v_t.row(i).transpose());
        }
    }
    if stable.len() == n {
        return Ok(identity(n));
    }
    let mut p = Matrix::zeros(n, n);
    for v in &stable {
        p += v * v.transpose();
    }
    Ok(p)
}

/// Independent projector estimate: orthogonal projector onto the eigenvectors
/// of `Φ(t_hi,t0)ᵀΦ(t_hi,t0)` whose forward trajectories stay below
/// `factor·‖ξ‖` on the whole window.
pub fn bounded_subspace_projector(
    kernel: &TransitionKernel,
    window: TimeWindow,
    factor: f64,
) -> Result<Matrix> {
    let (t0, hi) = growth_window(kernel, window)?;
    let n = kernel.dim();
    let phi = kernel.transition(hi, t0)?;
    let gram = phi.transpose() * &phi;
    let eig = gram.symmetric_eigen();
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        let xi: Vector = eig.eigenvectors.column(i).into_owned();
        let limit = factor * sup_norm(&xi);
        let mut x = xi.clone();
        let mut bounded = true;
        for t in t0..hi {
            x = kernel.spec().coefficient(t) * x;
            if sup_norm(&x) > limit {
                bounded = false;
                break;
            }
        }
        if bounded {
            p += &xi * xi.transpose();
        }
    }
    Ok(p)
}

fn fit_branch(samples: &[(f64, f64)], branch: &'static str) -> Result<Option<(f64, f64)>> {
    let logs: Vec<(f64, f64)> =
        samples.iter().filter(|(_, n)| *n > 0.0).map(|&(d, n)| (d, n.ln())).collect();
    if logs.is_empty() {
        return Ok(None);
    }
    let m = logs.len() as f64;
    let mean_d = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_d).powi(2)).sum();
    if sxx == 0.0 {
        // a single separation cannot fix a rate
        return Err(Error::NoDichotomy { alpha: f64::NAN, branch });
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_d) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let alpha = (-slope).exp() - 1.0;
    if !(alpha > 0.0) {
        return Err(Error::NoDichotomy { alpha, branch });
    }
    let beta = samples
        .iter()
        .map(|&(d, n)| n * (1.0 + alpha).powf(d))
        .fold(0.0, f64::max);
    Ok(Some((alpha, beta)))
}

/// Fits `(α, β)` per branch: `α` from the least-squares slope of
/// `log‖kernel(t,s)‖` against the separation, then `β` as the largest ratio
/// `‖kernel‖·(1+α)^separation`. A trivial branch inherits the other's constants.
pub fn estimate_constants(
    kernel: &TransitionKernel,
    projector: &Matrix,
    window: TimeWindow,
) -> Result<DichotomyConstants> {
    let pk = ProjectedKernel::new(kernel, projector)?;
    let mut stable = Vec::new();
    let mut unstable = Vec::new();
    for t in window.iter() {
        if pk.has_stable() {
            for s in window.lo..=t {
                stable.push(((t - s) as f64, row_sum_norm(&pk.stable(t, s)?)));
            }
        }
        if pk.has_unstable() {
            for s in t..=window.hi {
                unstable.push(((s - t) as f64, row_sum_norm(&pk.unstable(t, s)?)));
            }
        }
    }
    let st = fit_branch(&stable, "stable")?;
    let un = fit_branch(&unstable, "unstable")?;
    let ((alpha1, beta1), (alpha2, beta2)) = match (st, un) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => {
            return Err(Error::NoDichotomy { alpha: f64::NAN, branch: "stable" });
        }
    };
    Ok(DichotomyConstants { alpha1, beta1, alpha2, beta2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub xi_norm: f64,
    pub forward_sup: f64,
    /// `log(‖X(t_hi)ξ‖/‖ξ‖) / (t_hi − t0)`.
    pub forward_rate: f64,
    pub backward_sup: Option<f64>,
    pub backward_rate: Option<f64>,
    /// Index of the first non-invertible coefficient met while extending backward.
    pub backward_blocked_at: Option<i64>,
    pub exceeded_forward: bool,
    pub exceeded_backward: bool,
    pub unbounded: bool,
}

/// Sup of `‖X(t)ξ‖` over the window on both sides of `t0`.
pub fn bounded_solution_test(
    kernel: &TransitionKernel,
    xi: &Vector,
    window: TimeWindow,
    bound: f64,
) -> GrowthReport {
    let t0 = kernel.t0();
    let spec = kernel.spec();
    let xi_norm = sup_norm(xi);
    let rate = |end: f64, steps: i64| {
        if steps == 0 || xi_norm == 0.0 {
            0.0
        } else {
            (end / xi_norm).ln() / steps as f64
        }
    };

    let mut x = xi.clone();
    let mut forward_sup = if window.contains(t0) { xi_norm } else { 0.0 };
    let mut t = t0;
    while t < window.hi {
        x = spec.coefficient(t) * x;
        t += 1;
        if window.contains(t) {
            forward_sup = forward_sup.max(sup_norm(&x));
        }
    }
    let forward_rate = rate(sup_norm(&x), (window.hi - t0).max(0));

    let mut backward_sup = None;
    let mut backward_rate = None;
    let mut blocked = None;
    if window.lo < t0 {
        let mut y = xi.clone();
        let mut sup = if window.contains(t0) { xi_norm } else { 0.0 };
        let mut t = t0;
        let mut ok = true;
        while t > window.lo {
            match kernel.inverse_at(t - 1) {
                Ok(inv) => y = inv * y,
                Err(_) => {
                    blocked = Some(t - 1);
                    ok = false;
                    break;
                }
            }
            t -= 1;
            if window.contains(t) {
                sup = sup.max(sup_norm(&y));
            }
        }
        if ok || t < t0 {
            backward_sup = Some(sup);
            backward_rate = Some(rate(sup_norm(&y), t0 - t));
        }
    }
    let exceeded_forward = forward_sup > bound;
    let exceeded_backward = backward_sup.is_some_and(|s| s > bound);
    GrowthReport {
        xi_norm,
        forward_sup,
        forward_rate,
        backward_sup,
        backward_rate,
        backward_blocked_at: blocked,
        exceeded_forward,
        exceeded_backward,
        unbounded: exceeded_forward || exceeded_backward,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumDirection {
    /// `φ(t) Σ_{j<t} φ(j)⁻¹ <= μ`
    PastSum,
    /// `ψ(t) Σ_{j>=t} ψ(j)⁻¹ <= γ`
    FutureSum,
}

/// A positive scalar sequence with a claimed summability bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityWitness {
    pub window: TimeWindow,
    pub values: Vec<f64>,
    pub direction: SumDirection,
    pub bound: f64,
}

impl SummabilityWitness {
    pub fn from_fn(
        window: TimeWindow,
        direction: SumDirection,
        bound: f64,
        f: impl Fn(i64) -> f64,
    ) -> Self {
        SummabilityWitness { window, values: window.iter().map(f).collect(), direction, bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityOutcome {
    /// `μ/u(t0)` for past sums, `γ/v(t0)` for future sums.
    pub c: f64,
    pub holds: bool,
    /// Largest `value(t) / bound(t)` over the checked side of `t0`.
    pub worst_ratio: f64,
}

// Geometric extrapolation of Σ 1/value beyond the window edge; `inf` when the
// edge terms do not shrink.
fn edge_tail(inv_edge: f64, inv_next: f64) -> f64 {
    let r = inv_edge / inv_next;
    if r < 1.0 {
        inv_edge * r / (1.0 - r)
    } else {
        f64::INFINITY
    }
}

/// Turns a summability witness into the geometric bound
/// `φ(t) <= c(1+μ⁻¹)^(t0−t)` for `t >= t0` (or `ψ(t) <= c̃(1+γ⁻¹)^(t−t0)` for
/// `t <= t0`), after checking the premise on the window.
pub fn summability_bound_check(w: &SummabilityWitness, t0: i64) -> Result<SummabilityOutcome> {
    let n = w.window.len();
    if w.values.len() != n || n < 2 {
        return Err(Error::Domain("witness needs one value per window point, at least two".into()));
    }
    if !(w.bound > 0.0) || w.values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Config("witness values and bound must be strictly positive".into()));
    }
    if !w.window.contains(t0) {
        return Err(Error::Domain(format!("t0 = {t0} lies outside the witness window")));
    }
    let inv: Vec<f64> = w.values.iter().map(|v| 1.0 / v).collect();
    let idx = |t: i64| (t - w.window.lo) as usize;
    let slack = 1.0 + BOUND_RTOL;

    // sums[i] = u(lo+i) for past sums, v(lo+i) for future sums
    let sums: Vec<f64> = match w.direction {
        SumDirection::PastSum => {
            let mut acc = edge_tail(inv[0], inv[1]);
            let mut out = Vec::with_capacity(n);
            for k in 0..n {
                out.push(acc);
                acc += inv[k];
            }
            out
        }
        SumDirection::FutureSum => {
            let mut acc = edge_tail(inv[n - 1], inv[n - 2]);
            let mut out = vec![0.0; n];
            for k in (0..n).rev() {
                acc += inv[k];
                out[k] = acc;
            }
            out
        }
    };
    for (k, t) in w.window.iter().enumerate() {
        if !(w.values[k] * sums[k] <= w.bound * slack) {
            return Err(Error::PremiseFailed { t });
        }
    }
    let c = w.bound / sums[idx(t0)];
    let growth = 1.0 + 1.0 / w.bound;
    let side: Vec<i64> = match w.direction {
        SumDirection::PastSum => (t0..=w.window.hi).collect(),
        SumDirection::FutureSum => (w.window.lo..=t0).collect(),
    };
    let mut worst = 0.0_f64;
    for t in side {
        let bound = match w.direction {
            SumDirection::PastSum => c * growth.powi((t0 - t) as i32),
            SumDirection::FutureSum => c * growth.powi((t - t0) as i32),
        };
        worst = worst.max(w.values[idx(t)] / bound);
    }
    Ok(SummabilityOutcome { c, holds: worst <= slack, worst_ratio: worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub shifts: Vec<i64>,
    pub probes: Vec<(i64, i64)>,
    /// `kernels[k][i]` is the stable kernel at `probes[i]` shifted by `shifts[k]`.
    pub kernels: Vec<Vec<Matrix>>,
    /// Sup over probes of the change between consecutive shifts.
    pub differences: Vec<f64>,
    pub final_difference: f64,
    pub converged: bool,
    /// Smallest `β₁(1+α₁)^(s−t) − ‖K̄(t,s)‖` over the probes for the last kernel.
    pub limit_slack: f64,
    pub limit_satisfies_bound: bool,
}

impl ConvergenceTrace {
    pub fn limit(&self) -> &[Matrix] {
        self.kernels.last().map_or(&[], |v| v.as_slice())
    }
}

/// Slack allowed when checking the limit kernel against the original constants.
pub const LIMIT_SLACK: f64 = 1e-8;

/// Stable kernels `X(t+θ_k) P X⁻¹(s+θ_k)` along a shift sequence, their
/// consecutive sup-differences, and whether the final kernel still obeys the
/// stable inequality with the certificate's constants.
pub fn shifted_kernel_limit(
    spec: &SystemSpec,
    cert: &DichotomyCertificate,
    t0: i64,
    shifts: &[i64],
    probes: &[(i64, i64)],
    tol: f64,
) -> Result<ConvergenceTrace> {
    if let Some(&(t, s)) = probes.iter().find(|(t, s)| t < s) {
        return Err(Error::Domain(format!("probe ({t}, {s}) is not on the stable branch")));
    }
    let kernel = TransitionKernel::new(spec.clone(), t0);
    let pk = ProjectedKernel::new(&kernel, &cert.projector)?;
    let mut kernels = Vec::with_capacity(shifts.len());
    for &k in shifts {
        let row = probes
            .iter()
            .map(|&(t, s)| pk.stable(t + k, s + k))
            .collect::<Result<Vec<_>>>()?;
        kernels.push(row);
    }
    let differences: Vec<f64> = kernels
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| row_sum_norm(&(b - a)))
                .fold(0.0, f64::max)
        })
        .collect();
    let final_difference = differences.last().copied().unwrap_or(0.0);
    let limit_slack = kernels
        .last()
        .map(|lim| {
            lim.iter()
                .zip(probes)
                .map(|(m, &(t, s))| cert.constants.stable_bound(t, s) - row_sum_norm(m))
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(f64::INFINITY);
    Ok(ConvergenceTrace {
        shifts: shifts.to_vec(),
        probes: probes.to_vec(),
        kernels,
        differences,
        final_difference,
        converged: final_difference < tol,
        limit_slack,
        limit_satisfies_bound: limit_slack >= -LIMIT_SLACK,
    })
}
