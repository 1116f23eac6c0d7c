//! Ground-truth class members built from Schwarz polynomials.
//!
//! A member is obtained by fixing `w`, expanding `(1+Aw)/(1+Bw)` and solving
//! the coefficient recursion of `z ∂_q L f = [p,q] L f · (1+Aw)/(1+Bw)` for
//! `a_{p+1}, a_{p+2}, ...`. Nothing here calls the membership tests.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::JanowskiParams;
use crate::error::{Error, Result};
use crate::operators::{apply_l, z_q_derivative, LambdaTable};
use crate::qarith::{q_number_gap, QContext};
use crate::series::{evaluate, ratio, NormalizedMember, TruncSeries};

/// Order used for corpus members unless told otherwise.
pub const DEFAULT_MEMBER_ORDER: usize = 12;

/// `w(z) = w_1 z + ... + w_k z^k` with `Σ|w_j| <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct SchwarzPoly {
    coeffs: Vec<Complex64>,
}

impl SchwarzPoly {
    /// Rejects any coefficient list whose absolute sum exceeds 1.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("w", "coefficients must be finite"));
        }
        let sum: f64 = coeffs.iter().map(|c| c.norm()).sum();
        if sum > 1.0 {
            return Err(Error::NotSchwarz { sum });
        }
        Ok(Self { coeffs })
    }

    /// `w(z) = z`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `w(z) = z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs[k - 1] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// `w_1 ... w_k`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `w_j`, zero past the end.
    pub fn w(&self, j: usize) -> Complex64 {
        if j == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(j - 1).copied().unwrap_or_default()
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| (acc + c) * z)
    }

    /// `w` as a power series `0 + w_1 z + ...` with `order` coefficients.
    fn as_series(&self, order: usize) -> Vec<Complex64> {
        (0..order).map(|j| self.w(j)).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for SchwarzPoly {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<SchwarzPoly> for Vec<[f64; 2]> {
    fn from(w: SchwarzPoly) -> Self {
        w.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

/// `d_1 ... d_N` with `1 + Σ d_n z^n = (1+Aw)/(1+Bw)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JanowskiExpansion {
    d: Vec<Complex64>,
}

impl JanowskiExpansion {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.d
    }

    /// `d_n` for `1 <= n <= N`.
    pub fn d(&self, n: usize) -> Complex64 {
        self.d[n - 1]
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Largest `|d_n| - (A-B)`; non-positive (up to rounding) by Rogosinski.
    pub fn rogosinski_excess(&self, jp: &JanowskiParams) -> f64 {
        self.d
            .iter()
            .map(|d| d.norm() - jp.spread())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `1 + Σ d_n z^n` as a series.
    pub fn series(&self) -> TruncSeries {
        let mut c = Vec::with_capacity(self.d.len() + 1);
        c.push(Complex64::new(1.0, 0.0));
        c.extend_from_slice(&self.d);
        TruncSeries::new(0, c).expect("finite coefficients")
    }
}

/// Taylor coefficients of `(1+Aw)/(1+Bw)` up to `z^N`.
pub fn janowski_expand(w: &SchwarzPoly, jp: &JanowskiParams, n: usize) -> JanowskiExpansion {
    let ws = w.as_series(n + 1);
    let one = Complex64::new(1.0, 0.0);
    let num: Vec<Complex64> = ws.iter().map(|&c| c * jp.a()).collect();
    let den: Vec<Complex64> = ws.iter().map(|&c| c * jp.b()).collect();
    let mut num = num;
    let mut den = den;
    num[0] = one;
    den[0] = one;
    let q = ratio(
        &TruncSeries::new(0, num).expect("finite"),
        &TruncSeries::new(0, den).expect("finite"),
    )
    .expect("unit constant term");
    let expansion = JanowskiExpansion {
        d: q.coeffs()[1..].to_vec(),
    };
    debug_assert!(expansion.rogosinski_excess(jp) <= 1e-12 * (1.0 + jp.spread()));
    expansion
}

/// Solves `Λ_{n+p}([n+p]-[p]) a_{n+p} = [p](d_n + Σ_{k<n} Λ_{k+p} a_{k+p} d_{n-k})`
/// for `n = 1..=N`.
pub fn schwarz_to_member(
    w: &SchwarzPoly,
    ctx: &QContext,
    jp: &JanowskiParams,
    n: usize,
) -> NormalizedMember {
    let d = janowski_expand(w, jp, n);
    let lambda = LambdaTable::new(ctx, n);
    let qp = ctx.qp();
    // la[k] = Λ_{k+p} a_{k+p}
    let mut la: Vec<Complex64> = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    for m in 1..=n {
        let mut s = d.d(m);
        for k in 1..m {
            s += la[k - 1] * d.d(m - k);
        }
        let gap = q_number_gap(ctx.p(), m as u32, ctx.q());
        let lam = lambda.get(m);
        let am = s * (qp / (lam * gap));
        la.push(am * lam);
        a.push(am);
    }
    NormalizedMember::from_tail(*ctx, &a)
}

/// Draws `k` coefficients and rescales so `Σ|w_j|` equals a uniform draw in `(0, 1]`.
pub fn random_schwarz(k: usize, seed: u64) -> Result<SchwarzPoly> {
    if k < 1 {
        return Err(Error::param("k", "need at least one coefficient"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<Complex64> = (0..k)
        .map(|_| {
            let modulus: f64 = rng.gen();
            let arg: f64 = rng.gen::<f64>() * TAU;
            Complex64::from_polar(modulus, arg)
        })
        .collect();
    let target = 1.0 - rng.gen::<f64>();
    let sum: f64 = raw.iter().map(|c| c.norm()).sum();
    let mut scale = if sum > 0.0 { target / sum } else { 0.0 };
    let mut coeffs: Vec<Complex64> = raw.iter().map(|&c| c * scale).collect();
    // rounding can push the sum a hair above the target
    while coeffs.iter().map(|c| c.norm()).sum::<f64>() > 1.0 {
        scale *= 1.0 - f64::EPSILON;
        coeffs = raw.iter().map(|&c| c * scale).collect();
    }
    SchwarzPoly::new(coeffs)
}

/// `(|w_2 - λ w_1^2|, max{1, |λ|}, |w_3 + w_1 w_2/4 + w_1^3/16|)`.
pub fn lemma2_check(w: &SchwarzPoly, lambda: Complex64) -> (f64, f64, f64) {
    let (w1, w2, w3) = (w.w(1), w.w(2), w.w(3));
    let lhs1 = (w2 - lambda * w1 * w1).norm();
    let rhs1 = lambda.norm().max(1.0);
    let lhs2 = (w3 + w1 * w2 / 4.0 + w1 * w1 * w1 / 16.0).norm();
    (lhs1, rhs1, lhs2)
}

/// Largest deviation on `|z| = r` between the truncated series of
/// `z ∂_q L f / ([p,q] L f)` and of `(1+Aw)/(1+Bw)`.
pub fn round_trip_deviation(
    f: &NormalizedMember,
    w: &SchwarzPoly,
    jp: &JanowskiParams,
    r: f64,
    samples: usize,
) -> Result<f64> {
    let ctx = f.ctx();
    let lf = apply_l(f);
    let h = ratio(&z_q_derivative(&lf, ctx.q()), &lf)?.scale(Complex64::new(1.0 / ctx.qp(), 0.0));
    let k = janowski_expand(w, jp, f.order()).series();
    Ok((0..samples)
        .map(|j| Complex64::from_polar(r, TAU * j as f64 / samples as f64))
        .map(|z| (evaluate(&h, z) - evaluate(&k, z)).norm())
        .fold(0.0, f64::max))
}

/// One corpus entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMember {
    pub seed: u64,
    pub w: SchwarzPoly,
    pub member: NormalizedMember,
}

/// Corpus layout: every `k` in `ks` paired with seeds `base_seed .. base_seed + seeds_per_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub ks: Vec<usize>,
    pub seeds_per_k: u64,
    pub base_seed: u64,
    pub order: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            ks: vec![1, 2, 3, 4],
            seeds_per_k: 50,
            base_seed: 0,
            order: DEFAULT_MEMBER_ORDER,
        }
    }
}

impl CorpusSpec {
    pub fn len(&self) -> usize {
        self.ks.len() * self.seeds_per_k as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the corpus in parallel; output order is fixed by `(k, seed)`.
pub fn generate_corpus(ctx: &QContext, jp: &JanowskiParams, spec: &CorpusSpec) -> Result<Vec<OracleMember>> {
    let jobs: Vec<(usize, u64)> = spec
        .ks
        .iter()
        .flat_map(|&k| (0..spec.seeds_per_k).map(move |s| (k, spec.base_seed + s)))
        .collect();
    jobs.par_iter()
        .map(|&(k, seed)| {
            let w = random_schwarz(k, seed)?;
            let member = schwarz_to_member(&w, ctx, jp, spec.order);
            Ok(OracleMember { seed, w, member })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CorpusLine {
    seed: u64,
    w: Vec<[f64; 2]>,
    coeffs: Vec<[f64; 2]>,
}

/// One JSON object per line: `{"seed", "w", "coeffs"}`, where `coeffs`
/// starts at the leading `z^p` coefficient.
pub fn write_jsonl(members: &[OracleMember], mut out: impl Write) -> Result<()> {
    for m in members {
        let line = CorpusLine {
            seed: m.seed,
            w: m.w.clone().into(),
            coeffs: m.member.series().coeffs().iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads back a dump written by [`write_jsonl`].
pub fn read_jsonl(text: &str, ctx: &QContext) -> Result<Vec<OracleMember>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let line: CorpusLine = serde_json::from_str(l)?;
            let w = SchwarzPoly::try_from(line.w)?;
            let coeffs = line.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let member = NormalizedMember::new(*ctx, TruncSeries::new(ctx.p(), coeffs)?)?;
            Ok(OracleMember { seed: line.seed, w, member })
        })
        .collect()
}
