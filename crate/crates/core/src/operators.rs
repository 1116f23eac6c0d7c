//! The q-difference operator, the convolution operator `L_q^{μ+p-1}` built
//! from the kernel `Φ_p(q, μ; z)`, its classical Ruscheweyh limit, and the
//! q-Bernardi integral operator in series and Jackson-sum form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qarith::{q_factorial, q_number, q_pochhammer, q_real, LambdaConvention, QContext};
use crate::series::{hadamard, NormalizedMember, TruncSeries};

/// Jackson sums stop once `q^k` drops below this.
pub const JACKSON_CUTOFF: f64 = 1e-12;

/// Termwise q-derivative: `c_k z^k -> [k,q] c_k z^(k-1)`.
pub fn q_derivative(f: &TruncSeries, q: f64) -> TruncSeries {
    let scaled = z_q_derivative(f, q);
    if f.lead() > 0 {
        TruncSeries::new(f.lead() - 1, scaled.coeffs().to_vec()).expect("non-empty")
    } else if f.order() == 0 {
        TruncSeries::monomial(0, 0).scale(Complex64::new(0.0, 0.0))
    } else {
        // the constant term is annihilated
        TruncSeries::new(0, scaled.coeffs()[1..].to_vec()).expect("non-empty")
    }
}

/// `z ∂_q f`: `c_k z^k -> [k,q] c_k z^k`, keeping the leading exponent.
pub fn z_q_derivative(f: &TruncSeries, q: f64) -> TruncSeries {
    f.map_coeffs(|k, c| c * q_number(k, q))
}

/// `Λ_{n+p}` under the context's convention.
pub fn lambda_coeff(n: u32, ctx: &QContext) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("n", "Λ is indexed from n = 1"));
    }
    Ok(lambda_unchecked(n, ctx))
}

fn lambda_unchecked(n: u32, ctx: &QContext) -> f64 {
    let (q, a) = (ctx.q(), ctx.mu() + 1.0);
    match ctx.convention() {
        LambdaConvention::LimitConsistent => {
            // [a,q]_n / [n,q]! as a product of ratios to avoid overflow
            (0..n)
                .map(|j| q_real(a + j as f64, q) / q_number(j + 1, q))
                .product()
        }
        LambdaConvention::PaperLiteral => {
            let m = n + ctx.p();
            q_pochhammer(a, m, q) / q_factorial(m, q)
        }
    }
}

/// `Λ_{p+1} ... Λ_{p+N}`, computed once and shared read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    ctx: QContext,
    values: Vec<f64>,
}

impl LambdaTable {
    pub fn new(ctx: &QContext, n_max: usize) -> Self {
        let values = (1..=n_max as u32).map(|n| lambda_unchecked(n, ctx)).collect();
        Self { ctx: *ctx, values }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    /// `Λ_{n+p}` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The kernel `Φ_p(q, μ; z) = z^p + Σ Λ_{n+p} z^{n+p}` to relative order `order`.
pub fn phi_kernel(ctx: &QContext, order: usize) -> TruncSeries {
    let table = LambdaTable::new(ctx, order);
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    coeffs.extend(table.values().iter().map(|&v| Complex64::new(v, 0.0)));
    TruncSeries::new(ctx.p(), coeffs).expect("non-empty")
}

/// `L_q^{μ+p-1} f = Φ_p(q, μ; z) * f`.
pub fn apply_l(f: &NormalizedMember) -> TruncSeries {
    let kernel = phi_kernel(f.ctx(), f.order());
    hadamard(&kernel, f.series()).expect("kernel shares the member's valence")
}

/// `(μ+1)_n / n!`, the coefficient factor of `z^p/(1-z)^{μ+1}`.
pub fn ruscheweyh_factor(n: u32, mu: f64) -> f64 {
    (1..=n).map(|j| (mu + j as f64) / j as f64).product()
}

/// Classical limit `f * z^p/(1-z)^{μ+1}`; used as the `q -> 1-` oracle.
pub fn ruscheweyh_classical(f: &TruncSeries, mu: f64) -> TruncSeries {
    let lead = f.lead();
    f.map_coeffs(|k, c| c * ruscheweyh_factor(k - lead, mu))
}

/// How `t^(η-1)` is evaluated inside the Jackson sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Only integer `η`, where the power is single-valued.
    #[default]
    IntegerOnly,
    /// Principal branch for non-integer `η`. Experimental.
    Principal,
}

/// Order `η > -p` of the q-Bernardi operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernardiParams {
    eta: f64,
    ctx: QContext,
}

impl BernardiParams {
    pub fn new(eta: f64, ctx: QContext) -> Result<Self> {
        if !eta.is_finite() || !(eta + ctx.p() as f64 > 0.0) {
            return Err(Error::param(
                "eta",
                format!("{eta} must exceed -p = -{}", ctx.p()),
            ));
        }
        Ok(Self { eta, ctx })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    /// `[η+p,q] / [η+p+n,q]`.
    pub fn factor(&self, n: u32) -> f64 {
        let base = self.eta + self.ctx.p() as f64;
        q_real(base, self.ctx.q()) / q_real(base + n as f64, self.ctx.q())
    }
}

/// `F_{η,p}(z) = z^p + Σ ([η+p,q]/[η+p+n,q]) a_{n+p} z^{n+p}`.
pub fn bernardi_series(f: &NormalizedMember, bp: &BernardiParams) -> TruncSeries {
    let p = f.ctx().p();
    f.series().map_coeffs(|k, c| c * bp.factor(k - p))
}

/// Number of Jackson-sum terms needed for `q^terms < JACKSON_CUTOFF`.
pub fn jackson_terms_for(q: f64) -> usize {
    (JACKSON_CUTOFF.ln() / q.ln()).ceil() as usize + 1
}

/// `([η+p,q]/z^η) ∫_0^z t^{η-1} f(t) d_q t` with the Jackson integral
/// `z(1-q) Σ_k q^k g(q^k z)`, summed until `q^k < 1e-12` or `k = terms`.
pub fn bernardi_jackson(
    f: &NormalizedMember,
    bp: &BernardiParams,
    z: Complex64,
    terms: usize,
    branch: Branch,
) -> Result<Complex64> {
    let eta = bp.eta();
    let integer_eta = eta.fract() == 0.0;
    if !integer_eta && branch == Branch::IntegerOnly {
        return Err(Error::BranchRequired { eta });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let q = bp.ctx().q();
    let series = f.series();
    let lead = series.lead() as i32;
    let power = |t: Complex64, e: f64| -> Complex64 {
        if integer_eta {
            t.powi(e as i32)
        } else {
            t.powf(e)
        }
    };
    // g(t) = t^(η-1) f(t) = Σ c_k t^(k+η-1); every exponent k+η-1 >= p+η-1 > -1
    let g = |t: Complex64| -> Complex64 {
        let body = series
            .coeffs()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c);
        body * power(t, lead as f64 + eta - 1.0)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..terms {
        if qk < JACKSON_CUTOFF {
            break;
        }
        sum += g(z * qk) * qk;
        qk *= q;
    }
    let integral = z * (1.0 - q) * sum;
    Ok(integral * q_real(eta + lead as f64, q) / power(z, eta))
}
