//! Transition products of `x(t+1) = A(t)x(t)`.
//!
//! Forward products `Φ(t,s) = A(t−1)⋯A(s)` never invert a coefficient, so they
//! are defined for singular `A`. Backward products are only formed on demand
//! and fail with [`Error::SingularCoefficient`] as soon as a factor is not
//! safely invertible.

use std::collections::HashMap;
use std::sync::RwLock;

use nalgebra::Schur;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::norm::{condition_number, identity, Matrix};
use crate::system::SystemSpec;

/// Factors with a larger 2-norm condition number are treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e12;

/// Principal fundamental matrix `X(t)` with `X(t0) = I`, plus memoized
/// two-parameter transition products.
pub struct TransitionKernel {
    spec: SystemSpec,
    t0: i64,
    // forward[s][d] = Φ(s+d, s)
    forward: RwLock<HashMap<i64, Vec<Matrix>>>,
    // backward[s][d] = A(s−d)⁻¹⋯A(s−1)⁻¹
    backward: RwLock<HashMap<i64, Vec<Matrix>>>,
    inverses: RwLock<HashMap<i64, std::result::Result<Matrix, f64>>>,
}

impl std::fmt::Debug for TransitionKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransitionKernel")
            .field("dim", &self.spec.dim())
            .field("t0", &self.t0)
            .finish_non_exhaustive()
    }
}

impl TransitionKernel {
    pub fn new(spec: SystemSpec, t0: i64) -> Self {
        TransitionKernel {
            spec,
            t0,
            forward: RwLock::new(HashMap::new()),
            backward: RwLock::new(HashMap::new()),
            inverses: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `Φ(t,s) = A(t−1)⋯A(s)` for `t >= s`, with `Φ(t,t) = I`.
    pub fn transition(&self, t: i64, s: i64) -> Result<Matrix> {
        if t < s {
            return Err(Error::Domain(format!(
                "forward transition needs t >= s, got t = {t}, s = {s}"
            )));
        }
        let d = (t - s) as usize;
        {
            let rows = self.forward.read().unwrap();
            if let Some(m) = rows.get(&s).and_then(|row| row.get(d)) {
                return Ok(m.clone());
            }
        }
        let mut rows = self.forward.write().unwrap();
        let row = rows.entry(s).or_insert_with(|| vec![identity(self.dim())]);
        while row.len() <= d {
            let k = row.len() as i64;
            let next = self.spec.coefficient(s + k - 1) * row.last().unwrap();
            row.push(next);
        }
        Ok(row[d].clone())
    }

    pub(crate) fn inverse_at(&self, j: i64) -> Result<Matrix> {
        if let Some(r) = self.inverses.read().unwrap().get(&j) {
            return r.clone().map_err(|condition| Error::SingularCoefficient { index: j, condition });
        }
        let a = self.spec.coefficient(j);
        let condition = condition_number(&a);
        let entry = if condition < SINGULARITY_THRESHOLD {
            a.try_inverse().ok_or(f64::INFINITY)
        } else {
            Err(condition)
        };
        self.inverses.write().unwrap().insert(j, entry.clone());
        entry.map_err(|condition| Error::SingularCoefficient { index: j, condition })
    }

    /// `A(t)⁻¹⋯A(s−1)⁻¹` for `s >= t`, the inverse of `Φ(s,t)`.
    pub fn backward_transition(&self, t: i64, s: i64) -> Result<Matrix> {
        if s < t {
            return Err(Error::Domain(format!(
                "backward transition needs s >= t, got t = {t}, s = {s}"
            )));
        }
        let d = (s - t) as usize;
        {
            let rows = self.backward.read().unwrap();
            if let Some(m) = rows.get(&s).and_then(|row| row.get(d)) {
                return Ok(m.clone());
            }
        }
        // report the smallest offending index
        for j in t..s {
            self.inverse_at(j)?;
        }
        let mut rows = self.backward.write().unwrap();
        let row = rows.entry(s).or_insert_with(|| vec![identity(self.dim())]);
        while row.len() <= d {
            let k = row.len() as i64;
            let next = self.inverse_at(s - k)? * row.last().unwrap();
            row.push(next);
        }
        Ok(row[d].clone())
    }

    /// `X(t)`: forward from `t0` when `t >= t0`, otherwise through inverses.
    pub fn fundamental(&self, t: i64) -> Result<Matrix> {
        if t >= self.t0 {
            self.transition(t, self.t0)
        } else {
            self.backward_transition(t, self.t0)
        }
    }

    /// `X(s)⁻¹`.
    pub fn inverse_fundamental(&self, s: i64) -> Result<Matrix> {
        if s >= self.t0 {
            self.backward_transition(self.t0, s)
        } else {
            self.transition(self.t0, s)
        }
    }

    /// `Φ(t,s)` through the Putzer closed form when the coefficient is constant.
    pub fn closed_form(&self, t: i64, s: i64) -> Option<Result<Matrix>> {
        let a = self.spec.constant_coefficient()?;
        if t < s {
            return Some(Err(Error::Domain(format!("closed form needs t >= s, got {t} < {s}"))));
        }
        Some(putzer_constant(a, (t - s) as u64))
    }
}

/// `A^k` by the Putzer recursion.
///
/// With eigenvalues `λ_1..λ_n`, `P_0 = I`, `P_j = (A − λ_j I)P_{j−1}` and scalar
/// sequences `r_1(k+1) = λ_1 r_1(k)`, `r_{j+1}(k+1) = λ_{j+1} r_{j+1}(k) + r_j(k)`
/// started from `r(0) = (1, 0, …, 0)`, `A^k = Σ_j r_{j+1}(k) P_j`.
pub fn putzer_constant(a: &Matrix, k: u64) -> Result<Matrix> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::Domain("putzer_constant needs a square matrix".into()));
    }
    if k == 0 {
        return Ok(identity(n));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    let mut lambda: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    lambda.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.im.total_cmp(&y.im)));

    let ac = a.map(|v| Complex::new(v, 0.0));
    let eye = nalgebra::DMatrix::<Complex<f64>>::identity(n, n);
    let mut p = Vec::with_capacity(n);
    p.push(eye.clone());
    for j in 1..n {
        let next = (&ac - &eye * lambda[j - 1]) * &p[j - 1];
        p.push(next);
    }

    let mut r = vec![Complex::new(0.0, 0.0); n];
    r[0] = Complex::new(1.0, 0.0);
    for _ in 0..k {
        for j in (1..n).rev() {
            r[j] = lambda[j] * r[j] + r[j - 1];
        }
        r[0] *= lambda[0];
    }

    let mut out = nalgebra::DMatrix::<Complex<f64>>::zeros(n, n);
    for (rj, pj) in r.iter().zip(&p) {
        out += pj * *rj;
    }
    if out.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::Numeric("Putzer recursion overflowed".into()));
    }
    Ok(out.map(|z| z.re))
}
