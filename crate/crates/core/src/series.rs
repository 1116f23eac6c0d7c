//! Truncated power series `c_lead z^lead + ... + c_{lead+N} z^{lead+N}` with
//! complex coefficients, and the normalized members `z^p + a_{p+1} z^{p+1} + ...`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::QContext;

/// Default number of coefficients kept beyond the leading term.
pub const DEFAULT_ORDER: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A truncated power series. Entry `j` of `coeffs` multiplies `z^(lead + j)`,
/// and the series is known up to `z^(lead + order)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries {
    lead: u32,
    coeffs: Vec<Complex64>,
}

impl TruncSeries {
    pub fn new(lead: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parse("a series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Parse("series coefficients must be finite".into()));
        }
        Ok(Self { lead, coeffs })
    }

    pub fn from_real(lead: u32, coeffs: &[f64]) -> Result<Self> {
        Self::new(lead, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z^lead`, padded with zeros through relative order `order`.
    pub fn monomial(lead: u32, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = ONE;
        Self { lead, coeffs }
    }

    /// `z^lead / (1 - z)` truncated at relative order `order`.
    pub fn geometric(lead: u32, order: usize) -> Self {
        Self {
            lead,
            coeffs: vec![ONE; order + 1],
        }
    }

    pub fn lead(&self) -> u32 {
        self.lead
    }

    /// Number of coefficients kept beyond the leading one.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Highest exponent that is represented.
    pub fn max_exponent(&self) -> u32 {
        self.lead + self.order() as u32
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^exponent`; zero below the leading exponent, `None`
    /// beyond the truncation.
    pub fn coeff(&self, exponent: u32) -> Option<Complex64> {
        if exponent < self.lead {
            return Some(ZERO);
        }
        self.coeffs.get((exponent - self.lead) as usize).copied()
    }

    /// Pads with zeros (declaring the series a polynomial) or truncates so
    /// that exactly `order + 1` coefficients remain.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Self {
            lead: self.lead,
            coeffs,
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: u32) -> Self {
        Self {
            lead: self.lead + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Re-expresses the series with a smaller leading exponent by inserting
    /// explicit zero coefficients, keeping the same highest exponent.
    pub fn relead(&self, lead: u32) -> Self {
        assert!(lead <= self.lead, "relead can only lower the leading exponent");
        let gap = (self.lead - lead) as usize;
        let mut coeffs = vec![ZERO; gap];
        coeffs.extend_from_slice(&self.coeffs);
        Self { lead, coeffs }
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(u32, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| f(self.lead + j as u32, c))
            .collect();
        Self {
            lead: self.lead,
            coeffs,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_coeffs(|_, c| c * factor)
    }

    /// `alpha * self + beta * other` on series with the same leading exponent,
    /// truncated to the shorter of the two.
    pub fn linear_combination(
        &self,
        alpha: Complex64,
        other: &Self,
        beta: Complex64,
    ) -> Result<Self> {
        self.check_same_lead(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            lead: self.lead,
            coeffs,
        })
    }

    fn check_same_lead(&self, other: &Self) -> Result<()> {
        if self.lead != other.lead {
            return Err(Error::IncompatibleValence {
                left: self.lead,
                right: other.lead,
            });
        }
        Ok(())
    }

    /// Largest `|c_k|` over the stored coefficients.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficientwise (Hadamard) product of two series with the same leading
/// exponent, truncated to the shorter one.
pub fn hadamard(f: &TruncSeries, g: &TruncSeries) -> Result<TruncSeries> {
    f.check_same_lead(g)?;
    let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b).collect();
    Ok(TruncSeries {
        lead: f.lead,
        coeffs,
    })
}

/// Ordinary product; the result is known to relative order `min(N_f, N_g)`.
pub fn cauchy_product(f: &TruncSeries, g: &TruncSeries) -> TruncSeries {
    let order = f.order().min(g.order());
    let mut coeffs = vec![ZERO; order + 1];
    for (i, &a) in f.coeffs.iter().enumerate().take(order + 1) {
        for (j, &b) in g.coeffs.iter().enumerate().take(order + 1 - i) {
            coeffs[i + j] += a * b;
        }
    }
    TruncSeries {
        lead: f.lead + g.lead,
        coeffs,
    }
}

/// The series `h` with `h * g = f`, known to relative order `min(N_f, N_g)`.
///
/// Requires `f.lead >= g.lead`; the result has leading exponent
/// `f.lead - g.lead`.
pub fn ratio(f: &TruncSeries, g: &TruncSeries) -> Result<TruncSeries> {
    let g0 = g.coeffs[0];
    if g0 == ZERO {
        return Err(Error::DivisionByZero);
    }
    if f.lead < g.lead {
        return Err(Error::param(
            "ratio",
            format!(
                "numerator starts at z^{} below the denominator's z^{}",
                f.lead, g.lead
            ),
        ));
    }
    let order = f.order().min(g.order());
    let inv_g0 = g0.inv();
    let mut h: Vec<Complex64> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = f.coeffs[k];
        for j in 1..=k {
            acc -= g.coeffs[j] * h[k - j];
        }
        h.push(acc * inv_g0);
    }
    Ok(TruncSeries {
        lead: f.lead - g.lead,
        coeffs: h,
    })
}

/// Evaluates the truncated polynomial at `z` by Horner's rule.
pub fn evaluate(f: &TruncSeries, z: Complex64) -> Complex64 {
    let body = f.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c);
    body * z.powu(f.lead)
}

/// Geometric bound `|c_{lead+j}| <= scale * ratio^j` on the coefficients
/// beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorant {
    pub scale: f64,
    pub ratio: f64,
}

impl Majorant {
    pub const ZERO: Majorant = Majorant {
        scale: 0.0,
        ratio: 0.0,
    };
}

/// Upper bound on `|sum_{j > N} c_{lead+j} z^{lead+j}|` for `|z| <= r`, given a
/// geometric majorant for the omitted coefficients.
pub fn tail_bound(f: &TruncSeries, r: f64, majorant: Majorant) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("{r} is outside (0, 1)")));
    }
    if majorant.scale == 0.0 {
        return Ok(0.0);
    }
    let sr = majorant.ratio * r;
    if sr >= 1.0 {
        return Err(Error::UnboundedTail {
            ratio: majorant.ratio,
            limit: 1.0 / r,
        });
    }
    Ok(majorant.scale * sr.powi(f.order() as i32 + 1) / (1.0 - sr))
}

/// A series `z^p + a_{p+1} z^{p+1} + ...` tied to the context it is examined in.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMember {
    ctx: QContext,
    series: TruncSeries,
}

impl NormalizedMember {
    pub fn new(ctx: QContext, series: TruncSeries) -> Result<Self> {
        if series.lead != ctx.p() || series.coeffs[0] != ONE {
            return Err(Error::NotNormalized { lead: ctx.p() });
        }
        Ok(Self { ctx, series })
    }

    /// `z^p + sum_{n=1}^{N} a_{p+n} z^{p+n}` from the non-leading coefficients.
    pub fn from_tail(ctx: QContext, tail: &[Complex64]) -> Self {
        let mut coeffs = Vec::with_capacity(tail.len() + 1);
        coeffs.push(ONE);
        coeffs.extend_from_slice(tail);
        Self {
            ctx,
            series: TruncSeries {
                lead: ctx.p(),
                coeffs,
            },
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn into_series(self) -> TruncSeries {
        self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// `a_{p+n}`; zero beyond the truncation (the member is a polynomial).
    pub fn a(&self, n: usize) -> Complex64 {
        self.series.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// `a_{p+n}`, or an error when `n` exceeds the truncation order.
    pub fn a_checked(&self, n: usize) -> Result<Complex64> {
        self.series
            .coeffs
            .get(n)
            .copied()
            .ok_or(Error::InsufficientOrder {
                needed: self.ctx.p() + n as u32,
                available: self.series.max_exponent(),
            })
    }

    /// Same coefficients examined under a different context with the same valence.
    pub fn with_ctx(&self, ctx: QContext) -> Result<Self> {
        Self::new(ctx, self.series.clone())
    }
}

/// On-disk form: `{ "lead": int, "coeffs": [[re, im], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub lead: u32,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&TruncSeries> for SeriesFile {
    fn from(s: &TruncSeries) -> Self {
        Self {
            lead: s.lead,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<SeriesFile> for TruncSeries {
    type Error = Error;

    fn try_from(file: SeriesFile) -> Result<Self> {
        TruncSeries::new(
            file.lead,
            file.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl TruncSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesFile::from(self)).expect("series serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SeriesFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
