//! Neutral delay difference systems
//!
//! ```text
//! x(t+1) = A(t)x(t) + Δ_t Q(t, x(t-g(t))) + G(t, x(t), x(t-g(t)))
//! ```
//!
//! `Δ_t` is the forward difference of the composite `t ↦ Q(t, x(t-g(t)))`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::norm::{row_sum_norm, sup_norm, Matrix, Vector};
use crate::window::{SequenceWindow, TimeWindow};

/// Absolute slack allowed when probing declared Lipschitz constants and bounds.
pub const PROBE_SLACK: f64 = 1e-12;

type CoefficientFn = dyn Fn(i64) -> Matrix + Send + Sync;
type DelayFn = dyn Fn(i64) -> usize + Send + Sync;
type NeutralFn = dyn Fn(i64, &Vector) -> Vector + Send + Sync;
type ForcingFn = dyn Fn(i64, &Vector, &Vector) -> Vector + Send + Sync;

/// A neutral system together with the constants the existence theory needs:
///
/// * `e1`: Lipschitz constant of `Q` in its state argument,
/// * `e2`: Lipschitz constant of `G` (sum of both state arguments),
/// * `a`: bound on `sup_t ‖G(t,0,0)‖`,
/// * `b`: bound on `sup_t ‖Q(t,0)‖`.
#[derive(Clone)]
pub struct SystemSpec {
    dim: usize,
    coefficient: Arc<CoefficientFn>,
    constant_coefficient: Option<Matrix>,
    coefficient_bound: Option<f64>,
    delay: Arc<DelayFn>,
    max_delay: usize,
    neutral: Option<Arc<NeutralFn>>,
    forcing: Option<Arc<ForcingFn>>,
    pub e1: f64,
    pub e2: f64,
    pub a: f64,
    pub b: f64,
}

impl fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemSpec")
            .field("dim", &self.dim)
            .field("max_delay", &self.max_delay)
            .field("e1", &self.e1)
            .field("e2", &self.e2)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

impl SystemSpec {
    /// Homogeneous system `x(t+1) = A(t)x(t)` with zero delay and `Q ≡ G ≡ 0`.
    pub fn linear(dim: usize, coefficient: impl Fn(i64) -> Matrix + Send + Sync + 'static) -> Self {
        SystemSpec {
            dim,
            coefficient: Arc::new(coefficient),
            constant_coefficient: None,
            coefficient_bound: None,
            delay: Arc::new(|_| 0),
            max_delay: 0,
            neutral: None,
            forcing: None,
            e1: 0.0,
            e2: 0.0,
            a: 0.0,
            b: 0.0,
        }
    }

    /// Constant coefficient `A(t) ≡ a`.
    pub fn constant(a: Matrix) -> Self {
        let bound = row_sum_norm(&a);
        let m = a.clone();
        let mut spec = Self::linear(a.nrows(), move |_| m.clone());
        spec.constant_coefficient = Some(a);
        spec.coefficient_bound = Some(bound);
        spec
    }

    /// Declares `sup_t |A(t)|`; used where a global bound on the
    /// coefficient is needed beyond any sampled window.
    pub fn with_coefficient_bound(mut self, bound: f64) -> Self {
        self.coefficient_bound = Some(bound);
        self
    }

    pub fn with_delay(
        mut self,
        max_delay: usize,
        delay: impl Fn(i64) -> usize + Send + Sync + 'static,
    ) -> Self {
        self.max_delay = max_delay;
        self.delay = Arc::new(delay);
        self
    }

    pub fn with_constant_delay(self, tau: usize) -> Self {
        self.with_delay(tau, move |_| tau)
    }

    /// Sets `Q` with Lipschitz constant `e1` and `sup_t ‖Q(t,0)‖ <= b`.
    pub fn with_neutral(
        mut self,
        e1: f64,
        b: f64,
        q: impl Fn(i64, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        self.e1 = e1;
        self.b = b;
        self.neutral = Some(Arc::new(q));
        self
    }

    /// Sets `G` with Lipschitz constant `e2` and `sup_t ‖G(t,0,0)‖ <= a`.
    pub fn with_forcing(
        mut self,
        e2: f64,
        a: f64,
        g: impl Fn(i64, &Vector, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        self.e2 = e2;
        self.a = a;
        self.forcing = Some(Arc::new(g));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_delay(&self) -> usize {
        self.max_delay
    }

    pub fn coefficient(&self, t: i64) -> Matrix {
        (self.coefficient)(t)
    }

    pub fn constant_coefficient(&self) -> Option<&Matrix> {
        self.constant_coefficient.as_ref()
    }

    pub fn declared_coefficient_bound(&self) -> Option<f64> {
        self.coefficient_bound
    }

    /// Declared `sup_t |A(t)|`, or the maximum over `window` when none was declared.
    pub fn coefficient_bound(&self, window: TimeWindow) -> f64 {
        self.coefficient_bound.unwrap_or_else(|| self.coefficient_norm_on(window))
    }

    pub fn coefficient_norm_on(&self, window: TimeWindow) -> f64 {
        window.iter().map(|t| row_sum_norm(&self.coefficient(t))).fold(0.0, f64::max)
    }

    pub fn delay(&self, t: i64) -> usize {
        (self.delay)(t)
    }

    pub fn has_neutral(&self) -> bool {
        self.neutral.is_some()
    }

    pub fn has_forcing(&self) -> bool {
        self.forcing.is_some()
    }

    pub fn neutral(&self, t: i64, u: &Vector) -> Vector {
        match &self.neutral {
            Some(q) => q(t, u),
            None => Vector::zeros(self.dim),
        }
    }

    pub fn forcing(&self, t: i64, u: &Vector, v: &Vector) -> Vector {
        match &self.forcing {
            Some(g) => g(t, u, v),
            None => Vector::zeros(self.dim),
        }
    }

    /// The same system observed from `t + k`: `A(·+k)`, `g(·+k)`, `Q(·+k, ·)`, `G(·+k, ·, ·)`.
    pub fn shifted(&self, k: i64) -> SystemSpec {
        let mut out = self.clone();
        let a = Arc::clone(&self.coefficient);
        out.coefficient = Arc::new(move |t| a(t + k));
        let g = Arc::clone(&self.delay);
        out.delay = Arc::new(move |t| g(t + k));
        if let Some(q) = self.neutral.clone() {
            out.neutral = Some(Arc::new(move |t, u| q(t + k, u)));
        }
        if let Some(f) = self.forcing.clone() {
            out.forcing = Some(Arc::new(move |t, u, v| f(t + k, u, v)));
        }
        out
    }

    /// Checks the declared `a`, `b`, coefficient bound and delay bound on every
    /// `t` in `window`, then runs `samples` randomized Lipschitz probes for
    /// `e1` and `e2` with states drawn from `[-radius, radius]^n`.
    pub fn validate<R: Rng + ?Sized>(
        &self,
        window: TimeWindow,
        samples: usize,
        radius: f64,
        rng: &mut R,
    ) -> Result<ProbeReport> {
        let zero = Vector::zeros(self.dim);
        let mut report = ProbeReport::default();
        for t in window.iter() {
            let a = self.coefficient(t);
            if a.nrows() != self.dim || a.ncols() != self.dim {
                return Err(Error::Config(format!("A({t}) is not {0}x{0}", self.dim)));
            }
            let na = row_sum_norm(&a);
            if let Some(bound) = self.coefficient_bound {
                if na > bound + PROBE_SLACK {
                    return Err(Error::Config(format!(
                        "|A({t})| = {na} exceeds the declared bound {bound}"
                    )));
                }
            }
            if self.delay(t) > self.max_delay {
                return Err(Error::Config(format!(
                    "g({t}) = {} exceeds the declared maximum delay {}",
                    self.delay(t),
                    self.max_delay
                )));
            }
            let g0 = sup_norm(&self.forcing(t, &zero, &zero));
            if g0 > self.a + PROBE_SLACK {
                return Err(Error::Config(format!("‖G({t},0,0)‖ = {g0} exceeds a = {}", self.a)));
            }
            let q0 = sup_norm(&self.neutral(t, &zero));
            if q0 > self.b + PROBE_SLACK {
                return Err(Error::Config(format!("‖Q({t},0)‖ = {q0} exceeds b = {}", self.b)));
            }
            report.max_forcing_at_zero = report.max_forcing_at_zero.max(g0);
            report.max_neutral_at_zero = report.max_neutral_at_zero.max(q0);
            report.max_coefficient_norm = report.max_coefficient_norm.max(na);
        }

        let draw = |rng: &mut R| -> Vector {
            Vector::from_fn(self.dim, |_, _| rng.random_range(-radius..=radius))
        };
        for _ in 0..samples {
            let t = rng.random_range(window.lo..=window.hi);
            let (z, p) = (draw(rng), draw(rng));
            let lhs = sup_norm(&(self.neutral(t, &z) - self.neutral(t, &p)));
            let dq = sup_norm(&(&z - &p));
            let rhs = self.e1 * dq;
            if lhs > rhs + PROBE_SLACK {
                return Err(Error::Config(format!(
                    "Q violates the Lipschitz bound e1 = {} at t = {t}: {lhs} > {rhs}",
                    self.e1
                )));
            }
            report.worst_neutral_ratio = report.worst_neutral_ratio.max(ratio(lhs, dq));

            let (u1, v1, u2, v2) = (draw(rng), draw(rng), draw(rng), draw(rng));
            let lhs = sup_norm(&(self.forcing(t, &u1, &v1) - self.forcing(t, &u2, &v2)));
            let dist = sup_norm(&(&u1 - &u2)) + sup_norm(&(&v1 - &v2));
            let rhs = self.e2 * dist;
            if lhs > rhs + PROBE_SLACK {
                return Err(Error::Config(format!(
                    "G violates the Lipschitz bound e2 = {} at t = {t}: {lhs} > {rhs}",
                    self.e2
                )));
            }
            report.worst_forcing_ratio = report.worst_forcing_ratio.max(ratio(lhs, dist));
            report.probes += 1;
        }
        Ok(report)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// What the validation probes observed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probes: usize,
    /// Largest observed `‖ΔQ‖ / ‖Δstate‖`, an empirical lower bound for `e1`.
    pub worst_neutral_ratio: f64,
    /// Largest observed `‖ΔG‖ / (‖Δu‖ + ‖Δv‖)`, an empirical lower bound for `e2`.
    pub worst_forcing_ratio: f64,
    pub max_forcing_at_zero: f64,
    pub max_neutral_at_zero: f64,
    pub max_coefficient_norm: f64,
}

/// Residual of the recurrence at `t`:
/// `‖x(t+1) − A(t)x(t) − [Q(t+1, x(t+1−g(t+1))) − Q(t, x(t−g(t)))] − G(t, x(t), x(t−g(t)))‖`.
pub fn residual(spec: &SystemSpec, x: &SequenceWindow, t: i64) -> Result<f64> {
    let lag_now = t - spec.delay(t) as i64;
    let lag_next = t + 1 - spec.delay(t + 1) as i64;
    let (xt, xn) = (x.get(t)?, x.get(t + 1)?);
    let (dt, dn) = (x.get(lag_now)?, x.get(lag_next)?);
    let r = xn
        - spec.coefficient(t) * xt
        - (spec.neutral(t + 1, dn) - spec.neutral(t, dt))
        - spec.forcing(t, xt, dt);
    Ok(sup_norm(&r))
}

/// Delay functions admitted by [`AffineSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DelaySpec {
    Constant(usize),
    /// `table[t mod len]`.
    Table { table: Vec<usize> },
}

impl Default for DelaySpec {
    fn default() -> Self {
        DelaySpec::Constant(0)
    }
}

impl DelaySpec {
    fn max(&self) -> usize {
        match self {
            DelaySpec::Constant(d) => *d,
            DelaySpec::Table { table } => table.iter().copied().max().unwrap_or(0),
        }
    }
}

/// Coefficient matrix built entry-wise from generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    /// `A(t) = gen(t)·I`.
    Diagonal { diagonal: GeneratorSpec },
    /// Row-major `n×n` grid of generators.
    Entries { entries: Vec<Vec<GeneratorSpec>> },
}

/// `Q(t, u) = scale·u + offset(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NeutralSpec {
    #[serde(default)]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offset: Vec<GeneratorSpec>,
}

/// `G(t, u, v) = offset(t) + current·u + delayed·v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ForcingSpec {
    #[serde(default)]
    pub current: f64,
    #[serde(default)]
    pub delayed: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offset: Vec<GeneratorSpec>,
}

/// The declarative system family: generator-built `A`, affine `Q` and `G`.
/// Missing constants are derived from the generator amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSystem {
    pub dim: usize,
    pub coefficient: CoefficientSpec,
    #[serde(default)]
    pub delay: DelaySpec,
    #[serde(default)]
    pub neutral: NeutralSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl AffineSystem {
    pub fn build(&self) -> Result<SystemSpec> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        let entries: Vec<Vec<GeneratorSpec>> = match &self.coefficient {
            CoefficientSpec::Diagonal { diagonal } => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { diagonal.clone() } else { GeneratorSpec::constant(0.0) })
                        .collect()
                })
                .collect(),
            CoefficientSpec::Entries { entries } => entries.clone(),
        };
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!("coefficient must be a {n}x{n} grid")));
        }
        for g in entries.iter().flatten() {
            g.validate()?;
        }
        let offsets = |v: &[GeneratorSpec], what: &str| -> Result<Vec<GeneratorSpec>> {
            if v.is_empty() {
                return Ok(vec![GeneratorSpec::constant(0.0); n]);
            }
            if v.len() != n {
                return Err(Error::Config(format!("{what} needs {n} components, got {}", v.len())));
            }
            v.iter().try_for_each(GeneratorSpec::validate)?;
            Ok(v.to_vec())
        };
        let q_off = offsets(&self.neutral.offset, "neutral offset")?;
        let g_off = offsets(&self.forcing.offset, "forcing offset")?;
        if let DelaySpec::Table { table } = &self.delay {
            if table.is_empty() {
                return Err(Error::Config("delay table must not be empty".into()));
            }
        }
        for (name, v) in [
            ("neutral scale", self.neutral.scale),
            ("forcing current", self.forcing.current),
            ("forcing delayed", self.forcing.delayed),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }

        let bound_of = |gens: &[GeneratorSpec]| gens.iter().map(|g| g.sup_bound()).fold(0.0, f64::max);
        let derived_a = bound_of(&g_off);
        let derived_b = bound_of(&q_off);
        let e1 = self.e1.unwrap_or(self.neutral.scale.abs());
        let e2 = self.e2.unwrap_or(self.forcing.current.abs().max(self.forcing.delayed.abs()));
        let a = self.a.unwrap_or(derived_a);
        let b = self.b.unwrap_or(derived_b);
        for (name, v) in [("e1", e1), ("e2", e2), ("a", a), ("b", b)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }

        let coefficient_bound = entries
            .iter()
            .map(|row| row.iter().map(|g| g.sup_bound()).sum::<f64>())
            .fold(0.0, f64::max);
        let constant = entries.iter().flatten().all(|g| g.is_constant());
        let grid = entries.clone();
        let mut spec = SystemSpec::linear(n, move |t| {
            Matrix::from_fn(n, n, |i, j| grid[i][j].eval(t))
        })
        .with_coefficient_bound(coefficient_bound);
        if constant {
            spec.constant_coefficient = Some(spec.coefficient(0));
        }

        let max_delay = self.delay.max();
        spec = match self.delay.clone() {
            DelaySpec::Constant(d) => spec.with_constant_delay(d),
            DelaySpec::Table { table } => spec.with_delay(max_delay, move |t| {
                table[t.rem_euclid(table.len() as i64) as usize]
            }),
        };

        let has_q = self.neutral.scale != 0.0 || q_off.iter().any(|g| !g.is_constant() || g.eval(0) != 0.0);
        if has_q {
            let scale = self.neutral.scale;
            spec = spec.with_neutral(e1, b, move |t, u| {
                Vector::from_fn(u.len(), |i, _| scale * u[i] + q_off[i].eval(t))
            });
        } else {
            spec.e1 = e1;
            spec.b = b;
        }
        let (c1, c2) = (self.forcing.current, self.forcing.delayed);
        spec = spec.with_forcing(e2, a, move |t, u, v| {
            Vector::from_fn(u.len(), |i, _| g_off[i].eval(t) + c1 * u[i] + c2 * v[i])
        });
        Ok(spec)
    }
}
