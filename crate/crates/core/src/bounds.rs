//! Closed-form coefficient and Fekete-Szegő bounds for members of the class,
//! the functionals they bound, and their q-Bernardi transforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classify::JanowskiParams;
use crate::error::{Error, Result};
use crate::operators::{lambda_coeff, BernardiParams};
use crate::qarith::{q_number, q_number_gap, q_real, QContext};
use crate::series::NormalizedMember;

/// Absolute tolerance for bound comparisons.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// `ψ_n = [p,q] / ([n+p,q] - [p,q])`.
pub fn psi(n: u32, ctx: &QContext) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("n", "ψ is indexed from n = 1"));
    }
    Ok(psi_unchecked(n, ctx))
}

fn psi_unchecked(n: u32, ctx: &QContext) -> f64 {
    ctx.qp() / q_number_gap(ctx.p(), n, ctx.q())
}

/// `ψ_1 ... ψ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable {
    ctx: QContext,
    values: Vec<f64>,
}

impl PsiTable {
    pub fn new(ctx: &QContext, n_max: usize) -> Self {
        Self {
            ctx: *ctx,
            values: (1..=n_max as u32).map(|n| psi_unchecked(n, ctx)).collect(),
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    /// `ψ_n` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Observed functional value against its theorem bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub functional_value: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(functional_value: f64, bound: f64) -> Self {
        let slack = bound - functional_value;
        Self {
            functional_value,
            bound,
            satisfied: functional_value <= bound + BOUND_TOLERANCE,
            slack,
        }
    }
}

/// Bound on `|a_{p+n}|`:
/// `(A-B) ψ_n / Λ_{n+p} · Π_{t=1}^{n-1} (1 + (A-B) ψ_t)`.
pub fn coeff_bound(n: u32, ctx: &QContext, jp: &JanowskiParams) -> Result<f64> {
    let spread = jp.spread();
    let head = spread * psi(n, ctx)? / lambda_coeff(n, ctx)?;
    let product: f64 = (1..n)
        .map(|t| {
            let gap = q_number(ctx.p() + t, ctx.q()) - ctx.qp();
            1.0 + ctx.qp() * spread / gap
        })
        .product();
    Ok(head * product)
}

/// `υ = (B - (A-B)ψ_1) + (Λ_{p+2} ψ_1^2 / (Λ_{p+1}^2 ψ_2)) (A-B) λ`.
pub fn fekete_szego_upsilon(lambda: Complex64, ctx: &QContext, jp: &JanowskiParams) -> Complex64 {
    let spread = jp.spread();
    let (psi1, psi2) = (psi_unchecked(1, ctx), psi_unchecked(2, ctx));
    let l1 = lambda_coeff(1, ctx).expect("n = 1");
    let l2 = lambda_coeff(2, ctx).expect("n = 2");
    (jp.b() - spread * psi1) + lambda * (l2 * psi1 * psi1 / (l1 * l1 * psi2) * spread)
}

/// `(A-B) ψ_2 / Λ_{p+2} · max{1, |υ|}`.
pub fn fekete_szego_bound(lambda: Complex64, ctx: &QContext, jp: &JanowskiParams) -> f64 {
    let upsilon = fekete_szego_upsilon(lambda, ctx, jp);
    let l2 = lambda_coeff(2, ctx).expect("n = 2");
    jp.spread() * psi_unchecked(2, ctx) / l2 * upsilon.norm().max(1.0)
}

/// `|a_{p+2} - λ a_{p+1}^2|`.
pub fn fekete_szego_value(f: &NormalizedMember, lambda: Complex64) -> Result<f64> {
    let a1 = f.a_checked(1)?;
    let a2 = f.a_checked(2)?;
    Ok((a2 - lambda * a1 * a1).norm())
}

/// `|a_{p+3} - ((q+2)/(q^2+q+1)) (Λ_{1+p}Λ_{2+p}/Λ_{3+p}) a_{p+2}a_{p+1}
///  + (1/[3,q]) (Λ_{1+p}^3/Λ_{3+p}) a_{p+1}^3|`.
pub fn third_functional_value(f: &NormalizedMember) -> Result<f64> {
    let ctx = f.ctx();
    let q = ctx.q();
    let (a1, a2, a3) = (f.a_checked(1)?, f.a_checked(2)?, f.a_checked(3)?);
    let l1 = lambda_coeff(1, ctx)?;
    let l2 = lambda_coeff(2, ctx)?;
    let l3 = lambda_coeff(3, ctx)?;
    let middle = (q + 2.0) / (q * q + q + 1.0) * l1 * l2 / l3;
    let cubic = l1 * l1 * l1 / (q_number(3, q) * l3);
    Ok((a3 - a2 * a1 * middle + a1 * a1 * a1 * cubic).norm())
}

/// `4(2B-1)^2 + 1`, as stated with the bound.
pub fn third_bound_numerator(b: f64) -> f64 {
    4.0 * (2.0 * b - 1.0).powi(2) + 1.0
}

/// `16B^2 - 16B + 5`, the same quantity in expanded form.
pub fn third_bound_numerator_expanded(b: f64) -> f64 {
    16.0 * b * b - 16.0 * b + 5.0
}

/// `(A-B) (4(2B-1)^2 + 1) / (8 Λ_{3+p}) · ψ_3`.
pub fn third_functional_bound(ctx: &QContext, jp: &JanowskiParams) -> f64 {
    let l3 = lambda_coeff(3, ctx).expect("n = 3");
    jp.spread() * third_bound_numerator(jp.b()) / (8.0 * l3) * psi_unchecked(3, ctx)
}

/// `[η+p,q]/[η+p+n,q]` times [`coeff_bound`].
pub fn bernardi_coeff_bound(n: u32, bp: &BernardiParams, jp: &JanowskiParams) -> Result<f64> {
    Ok(bp.factor(n) * coeff_bound(n, bp.ctx(), jp)?)
}

/// `σ [η+p,q][η+p+2,q] / [η+p+1,q]^2`, the λ at which the transformed
/// Fekete-Szegő problem reduces to the untransformed one.
pub fn bernardi_effective_lambda(sigma: Complex64, bp: &BernardiParams) -> Complex64 {
    let base = bp.eta() + bp.ctx().p() as f64;
    let q = bp.ctx().q();
    let e0 = q_real(base, q);
    let e1 = q_real(base + 1.0, q);
    let e2 = q_real(base + 2.0, q);
    sigma * (e0 * e2 / (e1 * e1))
}

/// Bound on `|b_{p+2} - σ b_{p+1}^2|` for `F_{η,p}`, evaluated directly
/// from the transformed `υ`.
pub fn bernardi_fekete_bound(sigma: Complex64, bp: &BernardiParams, jp: &JanowskiParams) -> f64 {
    let ctx = bp.ctx();
    let spread = jp.spread();
    let base = bp.eta() + ctx.p() as f64;
    let q = ctx.q();
    let (e0, e1, e2) = (q_real(base, q), q_real(base + 1.0, q), q_real(base + 2.0, q));
    let (psi1, psi2) = (psi_unchecked(1, ctx), psi_unchecked(2, ctx));
    let l1 = lambda_coeff(1, ctx).expect("n = 1");
    let l2 = lambda_coeff(2, ctx).expect("n = 2");
    let upsilon = (jp.b() - spread * psi1)
        + sigma * (l2 * psi1 * psi1 / (l1 * l1 * psi2) * spread * (e0 * e2 / (e1 * e1)));
    e0 / e2 * spread * psi2 / l2 * upsilon.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::LambdaConvention;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u32, q: f64, mu: f64) -> QContext {
        QContext::new(p, q, mu).unwrap()
    }

    fn jp(a: f64, b: f64) -> JanowskiParams {
        JanowskiParams::new(a, b).unwrap()
    }

    const NEAR_ONE: f64 = 1.0 - 1e-8;

    #[test]
    fn psi_examples() {
        assert_relative_eq!(psi(1, &ctx(1, 0.5, 0.0)).unwrap(), 2.0, max_relative = 1e-15);
        assert!((psi(4, &ctx(2, NEAR_ONE, 0.0)).unwrap() - 0.5).abs() < 1e-6);
        assert_relative_eq!(psi(2, &ctx(1, 0.5, 0.0)).unwrap(), 4.0 / 3.0, max_relative = 1e-15);
        assert!(psi(0, &ctx(1, 0.5, 0.0)).is_err());
    }

    #[test]
    fn psi_table_decreasing_and_limit() {
        for q in [0.3, 0.5, 0.9, 0.99] {
            for p in 1..=3 {
                let t = PsiTable::new(&ctx(p, q, 0.0), 12);
                assert!(t.values().iter().all(|&v| v > 0.0));
                assert!(t.values().windows(2).all(|w| w[1] < w[0]));
            }
        }
        let t = PsiTable::new(&ctx(3, 1.0 - 1e-9, 0.0), 6);
        for n in 1..=6 {
            assert!((t.get(n) - 3.0 / n as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn coeff_bound_examples() {
        let c = ctx(1, 0.5, 0.0);
        let sj = jp(1.0, -1.0);
        assert_relative_eq!(coeff_bound(1, &c, &sj).unwrap(), 4.0, max_relative = 1e-15);
        assert_relative_eq!(coeff_bound(2, &c, &sj).unwrap(), 40.0 / 3.0, max_relative = 1e-14);
        let near = ctx(1, NEAR_ONE, 0.0);
        assert!((coeff_bound(1, &near, &sj).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn coeff_bound_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = ctx(rng.gen_range(1..4), rng.gen_range(0.1..0.95), rng.gen_range(-0.5..3.0));
            let b = rng.gen_range(-1.0..0.5);
            let j = jp(rng.gen_range(b + 0.01..1.0), b);
            let psi = PsiTable::new(&c, 8);
            for n in 1..=8usize {
                let product: f64 = (1..n).map(|t| 1.0 + j.spread() * psi.get(t)).product();
                let want = j.spread() * psi.get(n) / lambda_coeff(n as u32, &c).unwrap() * product;
                assert_relative_eq!(coeff_bound(n as u32, &c, &j).unwrap(), want, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn coeff_bound_satisfies_recursion_with_equality() {
        // plugging all earlier bounds into 1 + Σ Λ_{k+p} |a_{k+p}| reproduces the next bound
        for q in [0.3, 0.7, 0.99] {
            for p in 1..=3 {
                for mu in [0.0, 2.5] {
                    let c = ctx(p, q, mu);
                    let j = jp(0.5, -0.5);
                    let psi = PsiTable::new(&c, 8);
                    let mut acc = 1.0;
                    for n in 1..=8u32 {
                        let lam = lambda_coeff(n, &c).unwrap();
                        let via_recursion = j.spread() * psi.get(n as usize) / lam * acc;
                        let closed = coeff_bound(n, &c, &j).unwrap();
                        assert_relative_eq!(via_recursion, closed, max_relative = 1e-11);
                        acc += lam * closed;
                    }
                }
            }
        }
    }

    #[test]
    fn fekete_szego_examples() {
        let c = ctx(1, 0.5, 0.0);
        let sj = jp(1.0, -1.0);
        // λ* solves υ = 0
        let l1 = lambda_coeff(1, &c).unwrap();
        let l2 = lambda_coeff(2, &c).unwrap();
        let (p1, p2) = (psi(1, &c).unwrap(), psi(2, &c).unwrap());
        let lambda_star = -(sj.b() - sj.spread() * p1) * l1 * l1 * p2 / (sj.spread() * l2 * p1 * p1);
        assert!(fekete_szego_upsilon(Complex64::new(lambda_star, 0.0), &c, &sj).norm() < 1e-14);
        assert_relative_eq!(
            fekete_szego_bound(Complex64::new(lambda_star, 0.0), &c, &sj),
            sj.spread() * p2 / l2,
            max_relative = 1e-14
        );

        let near = ctx(1, NEAR_ONE, 0.0);
        let ups = fekete_szego_upsilon(Complex64::new(0.0, 0.0), &near, &sj);
        assert!((ups.re + 3.0).abs() < 1e-6);
        assert!((fekete_szego_bound(Complex64::new(0.0, 0.0), &near, &sj) - 3.0).abs() < 1e-6);

        let lin = jp(1.0, 0.0);
        assert_relative_eq!(fekete_szego_upsilon(Complex64::new(0.0, 0.0), &c, &lin).re, -2.0);
        assert_relative_eq!(
            fekete_szego_bound(Complex64::new(0.0, 0.0), &c, &lin),
            8.0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn fekete_szego_value_examples() {
        let c = ctx(2, 0.5, 0.0);
        let mono = NormalizedMember::from_tail(c, &[Complex64::new(0.0, 0.0); 2]);
        assert_eq!(fekete_szego_value(&mono, Complex64::new(3.0, 1.0)).unwrap(), 0.0);
        let f = NormalizedMember::from_tail(c, &[Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.4)]);
        for lambda in [-2.0, 0.0, 1.7] {
            assert_relative_eq!(fekete_szego_value(&f, Complex64::new(lambda, 0.0)).unwrap(), 0.5);
        }
        let short = NormalizedMember::from_tail(c, &[Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            fekete_szego_value(&short, Complex64::new(0.0, 0.0)),
            Err(Error::InsufficientOrder { needed: 4, available: 3 })
        ));
    }

    #[test]
    fn third_functional_examples() {
        let c = ctx(1, 0.5, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mono = NormalizedMember::from_tail(c, &[zero; 3]);
        assert_eq!(third_functional_value(&mono).unwrap(), 0.0);
        let only3 = NormalizedMember::from_tail(c, &[zero, zero, Complex64::new(0.6, -0.8)]);
        assert_relative_eq!(third_functional_value(&only3).unwrap(), 1.0, max_relative = 1e-15);
        assert!(third_functional_value(&NormalizedMember::from_tail(c, &[zero; 2])).is_err());
    }

    #[test]
    fn third_bound_examples() {
        for b in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            assert_eq!(third_bound_numerator(b), third_bound_numerator_expanded(b));
        }
        let c = ctx(2, 0.4, 1.0);
        let half = jp(1.0, 0.5);
        let l3 = lambda_coeff(3, &c).unwrap();
        assert_relative_eq!(
            third_functional_bound(&c, &half),
            0.5 * psi(3, &c).unwrap() / (8.0 * l3),
            max_relative = 1e-14
        );
        let near = ctx(1, NEAR_ONE, 0.0);
        assert!((third_functional_bound(&near, &jp(1.0, -1.0)) - 37.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn bernardi_bound_examples() {
        let sj = jp(1.0, -1.0);
        let c = ctx(1, 0.5, 0.0);
        let zero_eta = BernardiParams::new(0.0, c).unwrap();
        for n in 1..6 {
            assert!(bernardi_coeff_bound(n, &zero_eta, &sj).unwrap() < coeff_bound(n, &c, &sj).unwrap());
        }
        let one = BernardiParams::new(1.0, c).unwrap();
        assert_relative_eq!(
            bernardi_coeff_bound(1, &one, &sj).unwrap(),
            6.0 / 7.0 * 4.0,
            max_relative = 1e-14
        );
        let near = BernardiParams::new(1.0, ctx(1, NEAR_ONE, 0.0)).unwrap();
        assert!((bernardi_coeff_bound(1, &near, &sj).unwrap() - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn bernardi_fekete_reduces_to_effective_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sj = jp(1.0, -1.0);
        for conv in [LambdaConvention::LimitConsistent, LambdaConvention::PaperLiteral] {
            let c = QContext::with_convention(1, 0.5, 0.0, conv).unwrap();
            let bp = BernardiParams::new(1.0, c).unwrap();
            let zero = bernardi_fekete_bound(Complex64::new(0.0, 0.0), &bp, &sj);
            assert_relative_eq!(
                zero,
                bp.factor(2) * fekete_szego_bound(Complex64::new(0.0, 0.0), &c, &sj),
                max_relative = 1e-12
            );
            for _ in 0..50 {
                let sigma = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let direct = bernardi_fekete_bound(sigma, &bp, &sj);
                let via_lambda =
                    bp.factor(2) * fekete_szego_bound(bernardi_effective_lambda(sigma, &bp), &c, &sj);
                assert_relative_eq!(direct, via_lambda, max_relative = 1e-12);
            }
            let one = Complex64::new(1.0, 0.0);
            assert_relative_eq!(
                bernardi_fekete_bound(one, &bp, &sj),
                bp.factor(2) * fekete_szego_bound(bernardi_effective_lambda(one, &bp), &c, &sj),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn bounds_are_positive() {
        for q in [0.3, 0.5, 0.9, 0.99] {
            for p in 1..=3 {
                for mu in [0.0, 1.0, 2.5] {
                    let c = ctx(p, q, mu);
                    for j in [jp(1.0, -1.0), jp(1.0, 0.0), jp(0.5, -0.5), jp(0.75, -1.0), jp(1.0, 0.5)] {
                        for n in 1..=8 {
                            assert!(coeff_bound(n, &c, &j).unwrap() > 0.0);
                        }
                        assert!(fekete_szego_bound(Complex64::new(0.7, -0.2), &c, &j) > 0.0);
                        assert!(third_functional_bound(&c, &j) > 0.0);
                        let bp = BernardiParams::new(1.0, c).unwrap();
                        assert!(bernardi_fekete_bound(Complex64::new(-1.0, 0.0), &bp, &j) > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn report_tolerance() {
        assert!(BoundReport::new(1.0 + 5e-10, 1.0).satisfied);
        assert!(!BoundReport::new(1.0 + 5e-9, 1.0).satisfied);
        assert_relative_eq!(BoundReport::new(0.25, 1.0).slack, 0.75);
    }
}
