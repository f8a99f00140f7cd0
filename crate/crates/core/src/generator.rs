//! Scalar sequence families used to build coefficients and forcings.
//!
//! Every family is deterministic in `t`. Harmonic arguments are measured in
//! half-turns (multiples of π) and reduced modulo 2 before evaluation, so
//! lattice points such as `sin(π·t/2)` at even `t` come out as exact zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest denominator checked when rejecting rational rotation numbers.
pub const RATIONAL_DENOMINATOR_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    #[default]
    Sin,
    Cos,
}

/// `amplitude · wave(π·(freq·t + phase))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub wave: Wave,
}

impl Harmonic {
    pub fn sin(amplitude: f64, freq: f64) -> Self {
        Harmonic { amplitude, freq, phase: 0.0, wave: Wave::Sin }
    }

    pub fn cos(amplitude: f64, freq: f64) -> Self {
        Harmonic { amplitude, freq, phase: 0.0, wave: Wave::Cos }
    }

    fn eval(&self, t: i64) -> f64 {
        let arg = self.freq * t as f64 + self.phase;
        let v = match self.wave {
            Wave::Sin => sin_pi(arg),
            Wave::Cos => cos_pi(arg),
        };
        self.amplitude * v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Constant { value: f64 },
    /// `values[t mod p]`.
    PeriodicTable { values: Vec<f64> },
    SinCombination { terms: Vec<Harmonic> },
    /// `amplitude · sgn(cos 2πtθ)` with `sgn(0) = +1`.
    SignCosIrrational {
        theta: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl GeneratorSpec {
    pub fn constant(value: f64) -> Self {
        GeneratorSpec::Constant { value }
    }

    pub fn sign_cos(theta: f64, amplitude: f64) -> Self {
        GeneratorSpec::SignCosIrrational { theta, amplitude }
    }

    pub fn sines(terms: Vec<Harmonic>) -> Self {
        GeneratorSpec::SinCombination { terms }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Constant { value } => finite(*value, "constant value"),
            GeneratorSpec::PeriodicTable { values } => {
                if values.is_empty() {
                    return Err(Error::Config("periodic_table requires period >= 1".into()));
                }
                values.iter().try_for_each(|v| finite(*v, "periodic_table entry"))
            }
            GeneratorSpec::SinCombination { terms } => terms.iter().try_for_each(|h| {
                finite(h.amplitude, "harmonic amplitude")?;
                finite(h.freq, "harmonic frequency")?;
                finite(h.phase, "harmonic phase")
            }),
            GeneratorSpec::SignCosIrrational { theta, amplitude } => {
                finite(*amplitude, "sign_cos amplitude")?;
                finite(*theta, "theta")?;
                if let Some((p, q)) = rational_witness(*theta, RATIONAL_DENOMINATOR_LIMIT) {
                    return Err(Error::Config(format!(
                        "sign_cos_irrational needs an irrational theta, got {theta} = {p}/{q}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, t: i64) -> f64 {
        match self {
            GeneratorSpec::Constant { value } => *value,
            GeneratorSpec::PeriodicTable { values } => {
                values[t.rem_euclid(values.len() as i64) as usize]
            }
            GeneratorSpec::SinCombination { terms } => terms.iter().map(|h| h.eval(t)).sum(),
            GeneratorSpec::SignCosIrrational { theta, amplitude } => {
                let c = cos_pi(2.0 * t as f64 * theta);
                amplitude * if c >= 0.0 { 1.0 } else { -1.0 }
            }
        }
    }

    /// An upper bound on `sup_t |eval(t)|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            GeneratorSpec::Constant { value } => value.abs(),
            GeneratorSpec::PeriodicTable { values } => {
                values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
            }
            GeneratorSpec::SinCombination { terms } => terms.iter().map(|h| h.amplitude.abs()).sum(),
            GeneratorSpec::SignCosIrrational { amplitude, .. } => amplitude.abs(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            GeneratorSpec::Constant { .. } => true,
            GeneratorSpec::PeriodicTable { values } => values.windows(2).all(|w| w[0] == w[1]),
            GeneratorSpec::SinCombination { terms } => terms.iter().all(|h| h.amplitude == 0.0),
            GeneratorSpec::SignCosIrrational { amplitude, .. } => *amplitude == 0.0,
        }
    }
}

/// Free-function form of [`GeneratorSpec::eval`] that validates first.
pub fn eval_generator(gen: &GeneratorSpec, t: i64) -> Result<f64> {
    gen.validate()?;
    Ok(gen.eval(t))
}

fn finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be finite, got {v}")))
    }
}

/// `sin(πx)` with the argument reduced to `[0, 2)` and exact values at
/// half-integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == 1.5 {
        -1.0
    } else {
        (std::f64::consts::PI * r).sin()
    }
}

/// `cos(πx)`, reduced like [`sin_pi`].
pub fn cos_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.5 || r == 1.5 {
        0.0
    } else if r == 0.0 {
        1.0
    } else if r == 1.0 {
        -1.0
    } else {
        (std::f64::consts::PI * r).cos()
    }
}

/// Partial quotients `[a0; a1, a2, ...]` of `x`, stopping after `max_terms`
/// or when the remainder vanishes.
pub fn continued_fraction(x: f64, max_terms: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(max_terms);
    let mut r = x;
    for _ in 0..max_terms {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        out.push(a as i64);
        let frac = r - a;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Convergents `p/q` of `x` with `q <= max_den`, as `(p, q)` pairs.
pub fn convergents(x: f64, max_den: u64) -> Vec<(i64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1_i128, 0_i128, 0_i128, 1_i128);
    let mut out = Vec::new();
    for a in continued_fraction(x, 64) {
        let a = a as i128;
        let (p, q) = (a * p0 + p1, a * q0 + q1);
        if q > max_den as i128 {
            break;
        }
        out.push((p as i64, q as u64));
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
    }
    out
}

/// Returns a fraction `p/q` with `q <= max_den` that reproduces `x` to
/// floating-point resolution, if one exists.
pub fn rational_witness(x: f64, max_den: u64) -> Option<(i64, u64)> {
    let tol = 1e-14 * x.abs().max(1.0);
    convergents(x, max_den)
        .into_iter()
        .find(|&(p, q)| (x - p as f64 / q as f64).abs() <= tol)
}
