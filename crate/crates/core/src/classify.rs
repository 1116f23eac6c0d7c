//! Membership tests for the class of q-starlike functions subordinate to the
//! Janowski function `(1+Az)/(1+Bz)` under `L_q^{μ+p-1}`.
//!
//! Three tests of different strength are provided:
//!
//! - [`sufficiency_test`]: the coefficient inequality. A pass proves
//!   membership, a failure proves nothing.
//! - [`boundary_sample_test`]: evaluates the modulus form of the subordination
//!   on a circle `|z| = r`, and counts zeros of its denominator inside the
//!   circle with the argument principle. A failure is a non-membership witness.
//! - [`convolution_test`]: searches the `(θ, z)` grid for zeros of the
//!   convolution expression, polishing grid minima into polynomial roots.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{apply_l, z_q_derivative, LambdaTable};
use crate::qarith::{q_number, LambdaConvention, QContext};
use crate::series::{evaluate, hadamard, ratio, tail_bound, Majorant, NormalizedMember, TruncSeries};

/// `|value| < ZERO_TOLERANCE` counts as a zero of the convolution expression.
pub const ZERO_TOLERANCE: f64 = 1e-7;

pub const DEFAULT_RADIUS: f64 = 0.9;
pub const DEFAULT_SAMPLES: usize = 720;

/// `(N, L) = (0, 1)`, tested in addition to the `θ` family.
pub const DEGENERATE_KERNEL: (Complex64, Complex64) =
    (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));

/// Parameters of the Janowski function, `-1 <= B < A <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JanowskiParams {
    a: f64,
    b: f64,
}

impl JanowskiParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::param("A/B", "Janowski parameters must be finite"));
        }
        if !(-1.0 <= b && b < a && a <= 1.0) {
            return Err(Error::param(
                "A/B",
                format!("need -1 <= B < A <= 1, got A = {a}, B = {b}"),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `A - B`, the disk radius parameter; always positive.
    pub fn spread(&self) -> f64 {
        self.a - self.b
    }
}

/// `(1 + Az) / (1 + Bz)`.
pub fn janowski_value(z: Complex64, jp: &JanowskiParams) -> Result<Complex64> {
    let den = 1.0 + z * jp.b;
    if den.norm() <= 1e-300 {
        return Err(Error::JanowskiPole { z });
    }
    Ok((1.0 + z * jp.a) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    SufficiencyPass,
    SufficiencyFail,
    BoundaryPass,
    BoundaryFail,
    /// Sampled modulus within the truncation allowance of 1.
    BoundaryInconclusive,
    ConvolutionPass,
    ConvolutionFail,
}

impl VerdictKind {
    pub fn is_fail(self) -> bool {
        matches!(
            self,
            VerdictKind::SufficiencyFail | VerdictKind::BoundaryFail | VerdictKind::ConvolutionFail
        )
    }

    pub fn is_pass(self) -> bool {
        matches!(
            self,
            VerdictKind::SufficiencyPass | VerdictKind::BoundaryPass | VerdictKind::ConvolutionPass
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Point([f64; 2]),
    Index(u32),
}

impl Witness {
    pub fn point(z: Complex64) -> Self {
        Witness::Point([z.re, z.im])
    }
}

/// Outcome of one membership test. Fail verdicts carry a witness and a
/// negative margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub kind: VerdictKind,
    pub margin: f64,
    pub witness: Option<Witness>,
}

impl MembershipVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serialization cannot fail")
    }
}

/// Coefficient test: `Σ Λ_{n+p}([n+p,q](1-B) - [p,q](1-A)) |a_{n+p}| <= [p,q](A-B)`
/// over the stored coefficients `n = 1..=N`.
pub fn sufficiency_test(f: &NormalizedMember, jp: &JanowskiParams) -> MembershipVerdict {
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    let qp = q_number(p, q);
    let rhs = qp * jp.spread();
    let table = LambdaTable::new(ctx, f.order());
    let mut lhs = 0.0;
    let mut first_excess = None;
    for n in 1..=f.order() {
        let weight = q_number(n as u32 + p, q) * (1.0 - jp.b) - qp * (1.0 - jp.a);
        lhs += table.get(n) * weight * f.a(n).norm();
        if first_excess.is_none() && lhs > rhs {
            first_excess = Some(n as u32);
        }
    }
    let margin = rhs - lhs;
    if margin >= 0.0 {
        MembershipVerdict {
            kind: VerdictKind::SufficiencyPass,
            margin,
            witness: None,
        }
    } else {
        MembershipVerdict {
            kind: VerdictKind::SufficiencyFail,
            margin,
            witness: first_excess.map(Witness::Index),
        }
    }
}

/// The `p = 1, μ = 0` form `Σ_{n>=2} ([n,q](1-B) - 1 + A)|a_n| <= A - B`,
/// written over exponents so it shares no code with [`sufficiency_test`].
pub fn corollary_reduction(f: &NormalizedMember, jp: &JanowskiParams) -> Result<MembershipVerdict> {
    let ctx = f.ctx();
    if ctx.p() != 1 || ctx.mu() != 0.0 || ctx.convention() != LambdaConvention::LimitConsistent {
        return Err(Error::param(
            "ctx",
            "the reduced criterion needs p = 1, mu = 0 and the limit-consistent convention",
        ));
    }
    let series = f.series();
    let (a, b, q) = (jp.a(), jp.b(), ctx.q());
    let mut lhs = 0.0;
    let mut first_excess = None;
    for exponent in 2..=series.max_exponent() {
        let an = series.coeff(exponent).unwrap_or_default();
        let qn = (1.0 - q.powi(exponent as i32)) / (1.0 - q);
        lhs += (qn * (1.0 - b) - 1.0 + a) * an.norm();
        if first_excess.is_none() && lhs > a - b {
            first_excess = Some(exponent - 1);
        }
    }
    let margin = (a - b) - lhs;
    Ok(if margin >= 0.0 {
        MembershipVerdict {
            kind: VerdictKind::SufficiencyPass,
            margin,
            witness: None,
        }
    } else {
        MembershipVerdict {
            kind: VerdictKind::SufficiencyFail,
            margin,
            witness: first_excess.map(Witness::Index),
        }
    })
}

/// Sampling setup for [`boundary_sample_test_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptions {
    pub radius: f64,
    pub samples: usize,
    /// Majorant for the coefficients of `L f` beyond its truncation when the
    /// member stands for an infinite series. `None` treats it as a polynomial.
    pub lf_tail: Option<Majorant>,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self {
            radius: DEFAULT_RADIUS,
            samples: DEFAULT_SAMPLES,
            lf_tail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub verdict: MembershipVerdict,
    /// Largest sampled modulus on the circle.
    pub max_modulus: f64,
    /// Zeros of `A [p,q] L f - B z ∂_q L f` (divided by `z^p`) inside the circle.
    pub poles_inside: usize,
}

/// Modulus form of the subordination,
/// `|(h - 1)/(A - B h)| < 1` with `h = z ∂_q L f / ([p,q] L f)`.
pub fn boundary_sample_test(
    f: &NormalizedMember,
    jp: &JanowskiParams,
    r: f64,
    m: usize,
) -> Result<BoundaryReport> {
    boundary_sample_test_with(
        f,
        jp,
        &BoundaryOptions {
            radius: r,
            samples: m,
            lf_tail: None,
        },
    )
}

struct ModulusParts {
    lf: TruncSeries,
    numerator: TruncSeries,
    denominator: TruncSeries,
}

impl ModulusParts {
    fn new(f: &NormalizedMember, jp: &JanowskiParams) -> Self {
        let ctx = f.ctx();
        let qp = Complex64::new(ctx.qp(), 0.0);
        let lf = apply_l(f);
        let u = z_q_derivative(&lf, ctx.q());
        let one = Complex64::new(1.0, 0.0);
        // numerator U - [p]V, denominator A[p]V - BU, with V = L f
        let numerator = u.linear_combination(one, &lf, -qp).expect("same lead");
        let denominator = lf
            .linear_combination(qp * jp.a, &u, Complex64::new(-jp.b, 0.0))
            .expect("same lead");
        Self {
            lf,
            numerator,
            denominator,
        }
    }

    fn modulus(&self, z: Complex64) -> f64 {
        evaluate(&self.numerator, z).norm() / evaluate(&self.denominator, z).norm()
    }
}

pub fn boundary_sample_test_with(
    f: &NormalizedMember,
    jp: &JanowskiParams,
    opts: &BoundaryOptions,
) -> Result<BoundaryReport> {
    let r = opts.radius;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("{r} is outside (0, 1)")));
    }
    if opts.samples < 8 {
        return Err(Error::param("m", "need at least 8 samples"));
    }
    let ctx = f.ctx();
    let parts = ModulusParts::new(f, jp);

    // truncation allowances on |U - [p]V| and |A[p]V - BU|
    let (err_num, err_den) = match opts.lf_tail {
        None => (0.0, 0.0),
        Some(major) => {
            let tau_v = tail_bound(&parts.lf, r, major)?;
            // [k,q] < 1/(1-q) bounds the extra factor in z ∂_q
            let tau_u = tau_v / (1.0 - ctx.q());
            let qp = ctx.qp();
            (tau_u + qp * tau_v, jp.a.abs() * qp * tau_v + jp.b.abs() * tau_u)
        }
    };

    let scale_lf: f64 = parts
        .lf
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm() * r.powi((ctx.p() as usize + j) as i32))
        .sum();
    let scale_den: f64 = parts
        .denominator
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm() * r.powi((ctx.p() as usize + j) as i32))
        .sum();

    let points = circle(r, opts.samples);
    let samples: Vec<(Complex64, f64, f64)> = points
        .par_iter()
        .map(|&z| {
            let lf = evaluate(&parts.lf, z);
            if lf.norm() <= 1e-13 * scale_lf {
                return Err(Error::VanishingOperator { z });
            }
            let num = evaluate(&parts.numerator, z).norm();
            let den = evaluate(&parts.denominator, z).norm();
            if den <= 1e-13 * scale_den {
                return Err(Error::VanishingDenominator { z });
            }
            let hi = if den > err_den {
                (num + err_num) / (den - err_den)
            } else {
                f64::INFINITY
            };
            let lo = (num - err_num).max(0.0) / (den + err_den);
            Ok((z, hi, lo))
        })
        .collect::<Result<_>>()?;

    let max_modulus = points
        .iter()
        .map(|&z| parts.modulus(z))
        .fold(0.0, f64::max);
    let den_body = body(&parts.denominator);
    let winding_stable = samples
        .iter()
        .all(|&(z, _, _)| evaluate(&parts.denominator, z).norm() > err_den);
    let poles_inside = winding_number(&den_body, r, opts.samples);

    if winding_stable && poles_inside > 0 {
        if let Some((z, modulus)) = interior_witness(&parts, &den_body, r) {
            return Ok(BoundaryReport {
                verdict: MembershipVerdict {
                    kind: VerdictKind::BoundaryFail,
                    margin: 1.0 - modulus,
                    witness: Some(Witness::point(z)),
                },
                max_modulus,
                poles_inside,
            });
        }
    }

    let (worst_z, worst_lo) = samples
        .iter()
        .map(|&(z, _, lo)| (z, lo))
        .fold((points[0], f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if worst_lo >= 1.0 {
        return Ok(BoundaryReport {
            verdict: MembershipVerdict {
                kind: VerdictKind::BoundaryFail,
                margin: 1.0 - worst_lo,
                witness: Some(Witness::point(worst_z)),
            },
            max_modulus,
            poles_inside,
        });
    }

    let (hi_z, worst_hi) = samples
        .iter()
        .map(|&(z, hi, _)| (z, hi))
        .fold((points[0], f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let verdict = if worst_hi < 1.0 && winding_stable && poles_inside == 0 {
        MembershipVerdict {
            kind: VerdictKind::BoundaryPass,
            margin: 1.0 - worst_hi,
            witness: None,
        }
    } else {
        MembershipVerdict {
            kind: VerdictKind::BoundaryInconclusive,
            margin: 0.0,
            witness: Some(Witness::point(hi_z)),
        }
    };
    Ok(BoundaryReport {
        verdict,
        max_modulus,
        poles_inside,
    })
}

/// Near a zero of the denominator inside the circle the modulus is
/// unbounded; returns a nearby point where it is at least 1.
fn interior_witness(parts: &ModulusParts, den_body: &TruncSeries, r: f64) -> Option<(Complex64, f64)> {
    let roots = poly_roots(den_body.coeffs());
    roots
        .into_iter()
        .filter(|z0| z0.norm() < r)
        .filter_map(|z0| {
            let eps = 1e-6 * z0.norm().max(1e-3);
            circle(eps, 32)
                .into_iter()
                .map(|dz| {
                    let z = z0 + dz;
                    (z, parts.modulus(z))
                })
                .filter(|&(z, m)| m.is_finite() && m >= 1.0 && z.norm() < r && z.norm() > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

fn circle(r: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(r, TAU * k as f64 / m as f64))
        .collect()
}

/// The series re-indexed to start at `z^0` (division by `z^lead`).
fn body(s: &TruncSeries) -> TruncSeries {
    TruncSeries::new(0, s.coeffs().to_vec()).expect("non-empty")
}

/// Number of zeros of the polynomial inside `|z| < r` by the argument
/// principle, refining the sampling until consecutive phase steps stay small.
fn winding_number(poly: &TruncSeries, r: f64, m: usize) -> usize {
    let mut m = m;
    loop {
        let values: Vec<Complex64> = circle(r, m).into_iter().map(|z| evaluate(poly, z)).collect();
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        for k in 0..m {
            let step = (values[(k + 1) % m] / values[k]).arg();
            max_step = max_step.max(step.abs());
            total += step;
        }
        if max_step < 1.0 || m >= 1 << 20 {
            return (total / TAU).round().max(0.0) as usize;
        }
        m *= 4;
    }
}

/// Evaluates a polynomial (ascending coefficients) and its derivative.
fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// All roots of a polynomial given by ascending coefficients, by the
/// Aberth-Ehrlich iteration.
pub(crate) fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= 1e-14 * scale {
        end -= 1;
    }
    let coeffs = &coeffs[..end];
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    // Cauchy bound on root moduli
    let bound = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let start = bound.clamp(0.5, 1e3);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(start, TAU * (k as f64 + 0.25) / degree as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..degree {
            let (value, deriv) = eval_with_derivative(coeffs, z[i]);
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let newton = value / deriv;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = newton / (1.0 - newton * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    // a few plain Newton steps to polish
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (value, deriv) = eval_with_derivative(coeffs, *root);
            if deriv.norm() == 0.0 {
                break;
            }
            let step = value / deriv;
            if step.re.is_finite() && step.im.is_finite() {
                *root -= step;
            }
        }
    }
    z
}

/// The pair `(N_θ, L_θ)` of the convolution criterion.
pub fn convolution_kernel(
    theta: f64,
    jp: &JanowskiParams,
    ctx: &QContext,
) -> Result<(Complex64, Complex64)> {
    let qp = ctx.qp();
    let denom = qp * jp.a - jp.b;
    if denom.abs() <= 1e-300 {
        return Err(Error::KernelUndefined);
    }
    let e = Complex64::from_polar(1.0, -theta);
    Ok(((qp - 1.0) * e / denom, (e + qp * jp.a) / denom))
}

/// `((N+1) z^p - q L z^{p+1}) / ((1-z)(1-qz))` to relative order `order`.
pub fn convolution_kernel_series(
    n: Complex64,
    l: Complex64,
    ctx: &QContext,
    order: usize,
) -> TruncSeries {
    let q = ctx.q();
    let mut top = vec![Complex64::new(0.0, 0.0); order + 1];
    top[0] = n + 1.0;
    if order >= 1 {
        top[1] = -l * q;
    }
    let mut bottom = vec![Complex64::new(0.0, 0.0); order + 1];
    bottom[0] = Complex64::new(1.0, 0.0);
    if order >= 1 {
        bottom[1] = Complex64::new(-(1.0 + q), 0.0);
    }
    if order >= 2 {
        bottom[2] = Complex64::new(q, 0.0);
    }
    let top = TruncSeries::new(ctx.p(), top).expect("non-empty");
    let bottom = TruncSeries::new(0, bottom).expect("non-empty");
    ratio(&top, &bottom).expect("unit constant term")
}

/// Sampling setup for [`convolution_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionGrid {
    pub theta_samples: usize,
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for ConvolutionGrid {
    fn default() -> Self {
        Self {
            theta_samples: 64,
            radii: vec![0.3, 0.6, 0.9],
            angles: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionReport {
    pub verdict: MembershipVerdict,
    /// Smallest `|value|` found, over grid samples and polished roots.
    pub min_value: f64,
    /// `θ` of the kernel attaining the minimum; `None` for `(N, L) = (0, 1)`.
    pub theta: Option<f64>,
}

/// Searches for zeros of
/// `(e^{iθ}(B - [p,q]A)/z) [L f * ((N+1)z^p - qLz^{p+1})/((1-z)(1-qz))]`
/// over the `θ` grid plus `(N, L) = (0, 1)`, and over `z` in the sampled
/// annuli. Grid minima are refined by locating the roots of the polynomial
/// `[L f * K] / z^p` inside the largest sampled radius.
pub fn convolution_test(
    f: &NormalizedMember,
    jp: &JanowskiParams,
    grid: &ConvolutionGrid,
) -> Result<ConvolutionReport> {
    let ctx = *f.ctx();
    if grid.theta_samples == 0 || grid.angles == 0 || grid.radii.is_empty() {
        return Err(Error::param("grid", "empty convolution grid"));
    }
    if grid.radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::param("grid", "radii must lie in (0, 1)"));
    }
    let lf = apply_l(f);
    let order = lf.order();
    let r_max = grid.radii.iter().copied().fold(0.0, f64::max);
    let qp = ctx.qp();

    let mut kernels: Vec<(Option<f64>, Complex64, Complex64)> = (0..grid.theta_samples)
        .map(|j| {
            let theta = TAU * j as f64 / grid.theta_samples as f64;
            convolution_kernel(theta, jp, &ctx).map(|(n, l)| (Some(theta), n, l))
        })
        .collect::<Result<_>>()?;
    kernels.push((None, DEGENERATE_KERNEL.0, DEGENERATE_KERNEL.1));

    let points: Vec<Complex64> = grid
        .radii
        .iter()
        .flat_map(|&r| circle(r, grid.angles))
        .collect();
    let p_minus_one = ctx.p() - 1;

    let best = kernels
        .par_iter()
        .map(|&(theta, n, l)| {
            let scale = Complex64::from_polar(1.0, theta.unwrap_or(0.0)) * (jp.b - qp * jp.a);
            let kernel = convolution_kernel_series(n, l, &ctx, order);
            let conv = body(&hadamard(&lf, &kernel).expect("same lead"));
            let value = |z: Complex64| (scale * z.powu(p_minus_one) * evaluate(&conv, z)).norm();
            let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
            for &z in &points {
                let v = value(z);
                if v < best.0 {
                    best = (v, z);
                }
            }
            for root in poly_roots(conv.coeffs()) {
                if root.norm() <= r_max && root.norm() > 0.0 {
                    let v = value(root);
                    if v < best.0 {
                        best = (v, root);
                    }
                }
            }
            (best.0, best.1, theta)
        })
        .reduce(
            || (f64::INFINITY, Complex64::new(0.0, 0.0), None),
            |a, b| if b.0 < a.0 { b } else { a },
        );

    let (min_value, z, theta) = best;
    let margin = min_value - ZERO_TOLERANCE;
    let verdict = if min_value < ZERO_TOLERANCE {
        MembershipVerdict {
            kind: VerdictKind::ConvolutionFail,
            margin,
            witness: Some(Witness::point(z)),
        }
    } else {
        MembershipVerdict {
            kind: VerdictKind::ConvolutionPass,
            margin,
            witness: None,
        }
    };
    Ok(ConvolutionReport {
        verdict,
        min_value,
        theta,
    })
}
