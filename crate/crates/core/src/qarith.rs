//! Scalar q-arithmetic: q-numbers, q-factorials, q-Pochhammer symbols and the
//! q-Gamma function at positive integers.
//!
//! Integer q-numbers are computed as the explicit power sum `1 + q + ... + q^(n-1)`
//! rather than `(1 - q^n)/(1 - q)`, which cancels catastrophically as `q -> 1-`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the kernel coefficients `Λ_{n+p}` are formed from `(μ, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaConvention {
    /// `Λ_{n+p} = [μ+1,q]_n / [n,q]!`, which tends to the Ruscheweyh
    /// coefficients `(μ+1)_n / n!` as `q -> 1-`.
    #[default]
    LimitConsistent,
    /// `Λ_{n+p} = [μ+1,q]_{n+p} / [n+p,q]!`.
    PaperLiteral,
}

/// Valence, deformation parameter and operator order shared by every operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    p: u32,
    q: f64,
    mu: f64,
    convention: LambdaConvention,
}

impl QContext {
    pub fn new(p: u32, q: f64, mu: f64) -> Result<Self> {
        Self::with_convention(p, q, mu, LambdaConvention::default())
    }

    pub fn with_convention(p: u32, q: f64, mu: f64, convention: LambdaConvention) -> Result<Self> {
        if p < 1 {
            return Err(Error::param("p", "valence must be a positive integer"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::param("q", format!("{q} is outside the open interval (0, 1)")));
        }
        if !(mu > -1.0) || !mu.is_finite() {
            return Err(Error::param("mu", format!("{mu} must be a finite real > -1")));
        }
        Ok(Self { p, q, mu, convention })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn convention(&self) -> LambdaConvention {
        self.convention
    }

    /// `[p,q]`.
    pub fn qp(&self) -> f64 {
        q_number(self.p, self.q)
    }
}

/// `[n,q] = 1 + q + ... + q^(n-1)`, with `[0,q] = 0`.
pub fn q_number(n: u32, q: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..n {
        sum += term;
        term *= q;
    }
    sum
}

/// `[x,q] = (1 - q^x)/(1 - q)` for real `x`.
///
/// Small non-negative integers go through [`q_number`]; other arguments use
/// `expm1`/`ln_1p` so the quotient stays accurate for `q` close to 1.
pub fn q_real(x: f64, q: f64) -> f64 {
    if (0.0..=4096.0).contains(&x) && x.fract() == 0.0 {
        return q_number(x as u32, q);
    }
    q_real_closed(x, q)
}

fn q_real_closed(x: f64, q: f64) -> f64 {
    let one_minus_q = 1.0 - q;
    let ln_q = (-one_minus_q).ln_1p();
    -(x * ln_q).exp_m1() / one_minus_q
}

/// `[n+p,q] - [p,q] = q^p [n,q]`, free of cancellation.
pub fn q_number_gap(p: u32, n: u32, q: f64) -> f64 {
    q.powi(p as i32) * q_number(n, q)
}

/// `[n,q]! = [1,q][2,q]...[n,q]`, with `[0,q]! = 1`.
pub fn q_factorial(n: u32, q: f64) -> f64 {
    (1..=n).map(|k| q_number(k, q)).product()
}

/// `[x,q]_n = [x,q][x+1,q]...[x+n-1,q]`, with `[x,q]_0 = 1`.
pub fn q_pochhammer(x: f64, n: u32, q: f64) -> f64 {
    (0..n).map(|j| q_real(x + j as f64, q)).product()
}

/// `Γ_q(n) = [n-1,q]!` for positive integers `n`.
pub fn q_gamma_int(n: u32, q: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("n", "q-Gamma is only defined here for positive integers"));
    }
    Ok(q_factorial(n - 1, q))
}

/// Classical rising factorial `(x)_n`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).map(|j| x + j as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn q_number_examples() {
        assert_eq!(q_number(0, 0.5), 0.0);
        assert_eq!(q_number(1, 0.3), 1.0);
        assert_eq!(q_number(3, 0.5), 1.75);
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, 0.7), 1.0);
        for q in [0.1, 0.5, 0.99] {
            assert_eq!(q_factorial(1, q), 1.0);
        }
        assert_eq!(q_factorial(3, 0.5), 2.625);
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(2.5, 0, 0.4), 1.0);
        assert_eq!(q_pochhammer(1.0, 3, 0.5), 2.625);
        assert_eq!(q_pochhammer(2.0, 2, 0.5), 1.5 * 1.75);
    }

    #[test]
    fn q_gamma_examples() {
        assert_eq!(q_gamma_int(1, 0.5).unwrap(), 1.0);
        assert_eq!(q_gamma_int(2, 0.5).unwrap(), 1.0);
        assert_eq!(q_gamma_int(4, 0.5).unwrap(), 2.625);
        assert!(q_gamma_int(0, 0.5).is_err());
    }

    #[test]
    fn context_rejects_bad_parameters() {
        assert!(QContext::new(1, 0.0, 0.0).is_err());
        assert!(QContext::new(1, 1.0, 0.0).is_err());
        assert!(QContext::new(1, -0.2, 0.0).is_err());
        assert!(QContext::new(0, 0.5, 0.0).is_err());
        assert!(QContext::new(1, 0.5, -1.0).is_err());
        assert!(QContext::new(1, f64::NAN, 0.0).is_err());
        assert!(QContext::new(2, 0.5, -0.5).is_ok());
    }

    #[test]
    fn classical_limit_of_q_numbers() {
        let q = 1.0 - 1e-8;
        for n in 0..=20 {
            assert!((q_number(n, q) - n as f64).abs() <= 1e-5);
        }
    }

    #[test]
    fn q_real_matches_integer_sum() {
        for q in [0.3, 0.5, 0.9, 1.0 - 1e-6] {
            for n in 0..12 {
                assert_relative_eq!(q_real_closed(n as f64, q), q_number(n, q), max_relative = 1e-9);
            }
        }
        assert_relative_eq!(q_real(0.5, 0.25), (1.0 - 0.5) / 0.75, max_relative = 1e-14);
    }

    #[test]
    fn gap_matches_difference() {
        for q in [0.2, 0.5, 0.9] {
            for p in 1..4 {
                for n in 1..9 {
                    let direct = q_number(n + p, q) - q_number(p, q);
                    assert_relative_eq!(q_number_gap(p, n, q), direct, max_relative = 1e-13);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q_number_recurrence(n in 0u32..64, q in 0.001f64..0.999) {
            let lhs = q_number(n + 1, q);
            let rhs = 1.0 + q * q_number(n, q);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.max(1.0));
        }

        #[test]
        fn q_number_matches_closed_form(n in 0u32..200, q in 0.001f64..0.999) {
            let sum = q_number(n, q);
            let closed = (1.0 - q.powi(n as i32)) / (1.0 - q);
            if n == 0 {
                prop_assert_eq!(sum, 0.0);
            } else {
                prop_assert!(((sum - closed) / closed).abs() <= 1e-12);
            }
        }

        #[test]
        fn q_number_increasing(n in 0u32..30, q in 0.3f64..0.999) {
            prop_assert!(q_number(n + 1, q) > q_number(n, q));
        }

        #[test]
        fn pochhammer_splits(x in 0.05f64..6.0, m in 0u32..=8, n in 0u32..=8, q in 0.05f64..0.95) {
            let whole = q_pochhammer(x, m + n, q);
            let split = q_pochhammer(x, m, q) * q_pochhammer(x + m as f64, n, q);
            prop_assert!(((whole - split) / whole).abs() <= 1e-12);
        }
    }
}
