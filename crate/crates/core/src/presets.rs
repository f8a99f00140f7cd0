//! Ready-made systems used by the examples, tests and the `repro` command.

use crate::error::Result;
use crate::generator::{GeneratorSpec, Harmonic};
use crate::norm::{Matrix, Vector};
use crate::system::{AffineSystem, CoefficientSpec, DelaySpec, ForcingSpec, NeutralSpec, SystemSpec};

/// `(√5 − 1)/2`.
pub fn golden_theta() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `sin(πt/2) + sin(πt√2/2)`.
pub fn two_tone_sine() -> GeneratorSpec {
    GeneratorSpec::sines(vec![
        Harmonic::sin(1.0, 0.5),
        Harmonic::sin(1.0, std::f64::consts::SQRT_2 / 2.0),
    ])
}

/// `cos(πt) + cos(πt√2)`.
pub fn two_tone_cosine() -> GeneratorSpec {
    GeneratorSpec::sines(vec![
        Harmonic::cos(1.0, 1.0),
        Harmonic::cos(1.0, std::f64::consts::SQRT_2),
    ])
}

/// Two-dimensional neutral system with
/// `A(t) = ⅓·sgn(cos 2πtθ)·I`, `Q(t,u) = u/10` applied to `x(t−τ)`, and
/// `G(t,u,v) = (sin(πt/2)+sin(πt√2/2), cos πt + cos πt√2) + v/20`.
/// Constants: `E₁ = 1/10`, `E₂ = 1/20`, `a = 2`, `b = 0`.
pub fn example_one_description(theta: f64, tau: usize) -> AffineSystem {
    AffineSystem {
        dim: 2,
        coefficient: CoefficientSpec::Diagonal { diagonal: GeneratorSpec::sign_cos(theta, 1.0 / 3.0) },
        delay: DelaySpec::Constant(tau),
        neutral: NeutralSpec { scale: 0.1, offset: vec![] },
        forcing: ForcingSpec {
            current: 0.0,
            delayed: 0.05,
            offset: vec![two_tone_sine(), two_tone_cosine()],
        },
        e1: None,
        e2: None,
        a: None,
        b: None,
    }
}

pub fn example_one(theta: f64, tau: usize) -> Result<SystemSpec> {
    example_one_description(theta, tau).build()
}

/// `A(t) = ½·sin(πt/2)·I` (singular at every even `t`), no neutral part, and
/// the affine forcing `G(t,u,v) = h(t)(1,1) + u/10` with `h = sin(πt/2)+sin(πt√2/2)`.
/// Constants: `E₁ = 0`, `E₂ = 1/10`, `a = 2`, `b = 0`.
pub fn example_two_description() -> AffineSystem {
    AffineSystem {
        dim: 2,
        coefficient: CoefficientSpec::Diagonal {
            diagonal: GeneratorSpec::sines(vec![Harmonic::sin(0.5, 0.5)]),
        },
        delay: DelaySpec::Constant(0),
        neutral: NeutralSpec::default(),
        forcing: ForcingSpec {
            current: 0.1,
            delayed: 0.0,
            offset: vec![two_tone_sine(), two_tone_sine()],
        },
        e1: None,
        e2: None,
        a: None,
        b: None,
    }
}

pub fn example_two() -> Result<SystemSpec> {
    example_two_description().build()
}

/// Scalar `x(t+1) = ½x(t) + 1`, whose bounded solution is `x ≡ 2`.
pub fn half_plus_one() -> SystemSpec {
    SystemSpec::constant(Matrix::from_element(1, 1, 0.5))
        .with_forcing(0.0, 1.0, |_, _, _| Vector::from_element(1, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_constants() {
        let s = example_one(golden_theta(), 1).unwrap();
        assert_eq!((s.e1, s.e2, s.a, s.b), (0.1, 0.05, 2.0, 0.0));
        assert_eq!(s.declared_coefficient_bound(), Some(1.0 / 3.0));
        let s = example_two().unwrap();
        assert_eq!((s.e1, s.e2, s.a, s.b), (0.0, 0.1, 2.0, 0.0));
    }

    #[test]
    fn example_two_is_singular_at_even_times() {
        let s = example_two().unwrap();
        for t in -6..6 {
            let a = s.coefficient(t);
            if t % 2 == 0 {
                assert_eq!(a, Matrix::zeros(2, 2));
            } else {
                assert_eq!(a[(0, 0)].abs(), 0.5);
            }
        }
    }
}
