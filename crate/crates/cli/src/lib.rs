//! Command-line front end for the `qstar` toolkit.

// `!(x > c)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qstar::bounds::{
    bernardi_coeff_bound, bernardi_fekete_bound, coeff_bound, fekete_szego_bound, fekete_szego_value,
    third_functional_bound, third_functional_value,
};
use qstar::classify::{
    boundary_sample_test, convolution_test, sufficiency_test, BoundaryReport, ConvolutionGrid,
    ConvolutionReport, MembershipVerdict, Witness,
};
use qstar::grid::{default_grid, GridPoint};
use qstar::operators::{apply_l, bernardi_series, ruscheweyh_classical};
use qstar::oracle::{generate_corpus, read_jsonl, schwarz_to_member, write_jsonl, CorpusSpec, OracleMember};
use qstar::qarith::{q_real, LambdaConvention};
use qstar::series::{NormalizedMember, SeriesFile, TruncSeries};
use qstar::{BernardiParams, Complex64, JanowskiParams, QContext};

use output::{fmt_g, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qstar::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// Every error is an input or environment problem.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qstar", version, about = "q-calculus toolkit for multivalent q-starlike Janowski functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the q-number [n,q].
    Qnum {
        #[arg(long)]
        n: f64,
    },
    /// Coefficient, Fekete-Szegő and third-coefficient bounds against the
    /// oracle corpus, over the default grid or a single parameter point.
    BoundsTable,
    /// Run the sufficiency, boundary and convolution tests on a series file.
    Check,
    /// Write an oracle corpus as JSON lines.
    Generate {
        /// Seeds per Schwarz-polynomial degree k = 1..4.
        #[arg(long, default_value_t = 50)]
        count: u64,
    },
    /// Fekete-Szegő bound versus the corpus maximum over a λ grid
    /// (σ grid of the Bernardi transform when --eta is given).
    FsSweep {
        /// `start:stop:step`.
        #[arg(long, default_value = "-2:2:0.1", allow_hyphen_values = true)]
        lambda_grid: String,
    },
    /// Compare L at q = 1 - eps with the classical Ruscheweyh operator.
    LimitCompare {
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// q-Bernardi transform of a series file, with its coefficient bounds.
    Bernardi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Limit,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long = "A", global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Truncation order / number of coefficients.
    #[arg(long = "N", global = true)]
    pub n_order: Option<usize>,
    /// Sampling radius of the boundary test.
    #[arg(long, global = true, default_value_t = qstar::classify::DEFAULT_RADIUS)]
    pub r: f64,
    /// Number of boundary samples.
    #[arg(long, global = true, default_value_t = qstar::classify::DEFAULT_SAMPLES)]
    pub m: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Limit)]
    pub convention: ConventionArg,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output: Option<PathBuf>,
}

const DEFAULT_P: u32 = 1;
const DEFAULT_Q: f64 = 0.5;
const DEFAULT_MU: f64 = 0.0;
const DEFAULT_A: f64 = 1.0;
const DEFAULT_B: f64 = -1.0;
const DEFAULT_TABLE_N: usize = 6;

impl Params {
    fn convention(&self) -> LambdaConvention {
        match self.convention {
            ConventionArg::Limit => LambdaConvention::LimitConsistent,
            ConventionArg::Literal => LambdaConvention::PaperLiteral,
        }
    }

    fn ctx(&self) -> CliResult<QContext> {
        Ok(QContext::with_convention(
            self.p.unwrap_or(DEFAULT_P),
            self.q.unwrap_or(DEFAULT_Q),
            self.mu.unwrap_or(DEFAULT_MU),
            self.convention(),
        )?)
    }

    fn jp(&self) -> CliResult<JanowskiParams> {
        Ok(JanowskiParams::new(self.a.unwrap_or(DEFAULT_A), self.b.unwrap_or(DEFAULT_B))?)
    }

    fn single_point(&self) -> bool {
        self.p.is_some() || self.q.is_some() || self.mu.is_some() || self.a.is_some() || self.b.is_some()
    }

    /// The explicit point if any parameter was given, else the default grid.
    fn points(&self) -> CliResult<Vec<GridPoint>> {
        if self.single_point() {
            Ok(vec![GridPoint {
                ctx: self.ctx()?,
                jp: self.jp()?,
            }])
        } else {
            Ok(default_grid(self.convention())?)
        }
    }

    fn order(&self, default: usize) -> CliResult<usize> {
        match self.n_order {
            Some(0) => Err(CliError::Usage("--N must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    fn read_input(&self) -> CliResult<String> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --in PATH".into()))?;
        fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
    }

    /// Reads a series file; its leading exponent fixes `p` unless `--p` disagrees.
    fn read_member(&self) -> CliResult<NormalizedMember> {
        let text = self.read_input()?;
        let series = TruncSeries::from_json(&text)?;
        if let Some(p) = self.p {
            if p != series.lead() {
                return Err(CliError::Usage(format!(
                    "--p {p} disagrees with the series' leading exponent {}",
                    series.lead()
                )));
            }
        }
        let ctx = QContext::with_convention(
            series.lead(),
            self.q.unwrap_or(DEFAULT_Q),
            self.mu.unwrap_or(DEFAULT_MU),
            self.convention(),
        )?;
        Ok(NormalizedMember::new(ctx, series)?)
    }

    fn corpus(&self, ctx: &QContext, jp: &JanowskiParams, order: usize) -> CliResult<Vec<OracleMember>> {
        if self.input.is_some() {
            let members = read_jsonl(&self.read_input()?, ctx)?;
            if let Some(short) = members.iter().find(|m| m.member.order() < order) {
                return Err(CliError::Usage(format!(
                    "corpus member with seed {} has order {} < {order}",
                    short.seed,
                    short.member.order()
                )));
            }
            return Ok(members);
        }
        let spec = CorpusSpec {
            base_seed: self.seed,
            order,
            ..CorpusSpec::default()
        };
        Ok(generate_corpus(ctx, jp, &spec)?)
    }
}

/// What a command produced.
enum Artifact {
    Table(Table),
    Json(Value),
    Text(String),
}

/// Runs the command, writing to `--out` or `stdout`. Returns the exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<u8> {
    let params = &cli.params;
    let (artifact, status) = match &cli.command {
        Command::Qnum { n } => {
            let q = params.q.ok_or_else(|| CliError::Usage("qnum needs --q".into()))?;
            QContext::new(1, q, 0.0)?;
            (Artifact::Text(format!("{}\n", fmt_g(q_real(*n, q)))), 0)
        }
        Command::BoundsTable => (Artifact::Table(bounds_table(params)?), 0),
        Command::Check => check(params)?,
        Command::Generate { count } => (Artifact::Text(generate(params, *count)?), 0),
        Command::FsSweep { lambda_grid } => (Artifact::Table(fs_sweep(params, lambda_grid)?), 0),
        Command::LimitCompare { eps } => (Artifact::Table(limit_compare(params, *eps)?), 0),
        Command::Bernardi => (bernardi(params)?, 0),
    };

    let mut buf = Vec::new();
    match artifact {
        Artifact::Text(s) => buf.extend_from_slice(s.as_bytes()),
        Artifact::Table(t) => match params.format.unwrap_or(Format::Csv) {
            Format::Csv => t.write_csv(&mut buf)?,
            Format::Json => writeln!(buf, "{}", t.to_json())?,
        },
        Artifact::Json(v) => writeln!(buf, "{v}")?,
    }
    match &params.output {
        Some(path) => fs::write(path, &buf)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(&buf)?,
    }
    Ok(status)
}

fn point_cells(g: &GridPoint) -> Vec<Cell> {
    vec![
        g.ctx.q().into(),
        g.ctx.p().into(),
        g.ctx.mu().into(),
        g.jp.a().into(),
        g.jp.b().into(),
    ]
}

fn max_over<'a>(corpus: &'a [OracleMember], f: impl Fn(&'a NormalizedMember) -> f64) -> f64 {
    corpus.iter().map(|m| f(&m.member)).fold(0.0, f64::max)
}

fn bounds_table(params: &Params) -> CliResult<Table> {
    let n_max = params.order(DEFAULT_TABLE_N)?;
    let order = n_max.max(3);
    let mut table = Table::new(&["q", "p", "mu", "A", "B", "quantity", "index", "bound", "observed", "slack"]);
    let bp_eta = params.eta;
    for g in params.points()? {
        let corpus = params.corpus(&g.ctx, &g.jp, order)?;
        let mut row = |quantity: &str, index: u32, bound: f64, observed: f64| {
            let mut cells = point_cells(&g);
            cells.extend([
                quantity.into(),
                index.into(),
                bound.into(),
                observed.into(),
                (bound - observed).into(),
            ]);
            table.push(cells);
        };
        for n in 1..=n_max as u32 {
            let observed = max_over(&corpus, |f| f.a(n as usize).norm());
            row("coeff", n, coeff_bound(n, &g.ctx, &g.jp)?, observed);
        }
        let zero = Complex64::new(0.0, 0.0);
        let fs_obs = corpus
            .iter()
            .map(|m| fekete_szego_value(&m.member, zero))
            .collect::<qstar::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        row("fekete_szego_lambda0", 2, fekete_szego_bound(zero, &g.ctx, &g.jp), fs_obs);
        let third_obs = corpus
            .iter()
            .map(|m| third_functional_value(&m.member))
            .collect::<qstar::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        row("third", 3, third_functional_bound(&g.ctx, &g.jp), third_obs);
        if let Some(eta) = bp_eta {
            let bp = BernardiParams::new(eta, g.ctx)?;
            let transformed: Vec<TruncSeries> = corpus.iter().map(|m| bernardi_series(&m.member, &bp)).collect();
            for n in 1..=n_max as u32 {
                let observed = transformed
                    .iter()
                    .map(|s| s.coeff(g.ctx.p() + n).unwrap_or_default().norm())
                    .fold(0.0, f64::max);
                row("bernardi_coeff", n, bernardi_coeff_bound(n, &bp, &g.jp)?, observed);
            }
        }
    }
    Ok(table)
}

fn verdict_json(v: &MembershipVerdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        None => String::new(),
        Some(Witness::Index(n)) => n.to_string(),
        Some(Witness::Point([re, im])) => format!("{}{:+}i", fmt_g(*re), im),
    }
}

fn check(params: &Params) -> CliResult<(Artifact, u8)> {
    let f = params.read_member()?;
    let jp = params.jp()?;
    let suff = sufficiency_test(&f, &jp);
    let boundary: BoundaryReport = boundary_sample_test(&f, &jp, params.r, params.m)?;
    let conv: ConvolutionReport = convolution_test(&f, &jp, &ConvolutionGrid::default())?;
    let failed = [suff.kind, boundary.verdict.kind, conv.verdict.kind]
        .iter()
        .any(|k| k.is_fail());
    let status = u8::from(failed);
    let artifact = match params.format.unwrap_or(Format::Json) {
        Format::Json => Artifact::Json(json!({
            "sufficiency": verdict_json(&suff),
            "boundary": {
                "verdict": verdict_json(&boundary.verdict),
                "max_modulus": output::round_g(boundary.max_modulus),
                "poles_inside": boundary.poles_inside,
            },
            "convolution": {
                "verdict": verdict_json(&conv.verdict),
                "min_value": output::round_g(conv.min_value),
                "theta": conv.theta.map(output::round_g),
            },
        })),
        Format::Csv => {
            let mut t = Table::new(&["test", "kind", "margin", "witness"]);
            for (name, v) in [("sufficiency", &suff), ("boundary", &boundary.verdict), ("convolution", &conv.verdict)] {
                t.push(vec![
                    name.into(),
                    format!("{:?}", v.kind).as_str().into(),
                    v.margin.into(),
                    Cell::Text(witness_text(&v.witness)),
                ]);
            }
            Artifact::Table(t)
        }
    };
    Ok((artifact, status))
}

fn generate(params: &Params, count: u64) -> CliResult<String> {
    let ctx = params.ctx()?;
    let jp = params.jp()?;
    let spec = CorpusSpec {
        seeds_per_k: count,
        base_seed: params.seed,
        order: params.order(qstar::oracle::DEFAULT_MEMBER_ORDER)?,
        ..CorpusSpec::default()
    };
    let corpus = generate_corpus(&ctx, &jp, &spec)?;
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf)?;
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

/// Parses `start:stop:step` into the points `start + k*step <= stop`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid `{spec}` is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        return Err(CliError::Usage(format!("grid `{spec}` has too many points")));
    }
    // k*step rather than repeated addition keeps the points reproducible
    Ok((0..=count).map(|k| output::round_g(start + k as f64 * step)).collect())
}

fn fs_sweep(params: &Params, grid: &str) -> CliResult<Table> {
    let values = parse_grid(grid)?;
    let ctx = params.ctx()?;
    let jp = params.jp()?;
    let corpus = params.corpus(&ctx, &jp, params.order(qstar::oracle::DEFAULT_MEMBER_ORDER)?.max(2))?;
    let g = GridPoint { ctx, jp };
    match params.eta {
        None => {
            let mut t = Table::new(&["q", "p", "mu", "A", "B", "lambda", "bound", "observed", "slack"]);
            for lambda in values {
                let l = Complex64::new(lambda, 0.0);
                let bound = fekete_szego_bound(l, &ctx, &jp);
                let observed = corpus
                    .iter()
                    .map(|m| fekete_szego_value(&m.member, l))
                    .collect::<qstar::Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let mut cells = point_cells(&g);
                cells.extend([lambda.into(), bound.into(), observed.into(), (bound - observed).into()]);
                t.push(cells);
            }
            Ok(t)
        }
        Some(eta) => {
            let bp = BernardiParams::new(eta, ctx)?;
            let transformed = corpus
                .iter()
                .map(|m| NormalizedMember::new(ctx, bernardi_series(&m.member, &bp)))
                .collect::<qstar::Result<Vec<_>>>()?;
            let mut t = Table::new(&["q", "p", "mu", "A", "B", "eta", "sigma", "bound", "observed", "slack"]);
            for sigma in values {
                let s = Complex64::new(sigma, 0.0);
                let bound = bernardi_fekete_bound(s, &bp, &jp);
                let observed = transformed
                    .iter()
                    .map(|f| fekete_szego_value(f, s))
                    .collect::<qstar::Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let mut cells = point_cells(&g);
                cells.extend([eta.into(), sigma.into(), bound.into(), observed.into(), (bound - observed).into()]);
                t.push(cells);
            }
            Ok(t)
        }
    }
}

fn limit_compare(params: &Params, eps: f64) -> CliResult<Table> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps {eps} is outside (0, 1)")));
    }
    let q = 1.0 - eps;
    let mus = match params.mu {
        Some(mu) => vec![mu],
        None => vec![0.0, 1.0, 2.5],
    };
    let mut t = Table::new(&["q", "p", "mu", "max_abs_dev", "max_rel_dev"]);
    for mu in mus {
        let (series, p) = if params.input.is_some() {
            let s = TruncSeries::from_json(&params.read_input()?)?;
            let p = s.lead();
            (s, p)
        } else {
            let p = params.p.unwrap_or(DEFAULT_P);
            let ctx = QContext::new(p, q, mu)?;
            let w = qstar::oracle::random_schwarz(3, params.seed)?;
            let member = schwarz_to_member(&w, &ctx, &params.jp()?, params.order(8)?);
            (member.into_series(), p)
        };
        let ctx = QContext::new(p, q, mu)?;
        let f = NormalizedMember::new(ctx, series)?;
        let lf = apply_l(&f);
        let classical = ruscheweyh_classical(f.series(), mu);
        let (mut abs, mut rel) = (0.0f64, 0.0f64);
        for (x, y) in lf.coeffs().iter().zip(classical.coeffs()) {
            let d = (x - y).norm();
            abs = abs.max(d);
            if y.norm() > 0.0 {
                rel = rel.max(d / y.norm());
            }
        }
        t.push(vec![q.into(), p.into(), mu.into(), abs.into(), rel.into()]);
    }
    Ok(t)
}

fn bernardi(params: &Params) -> CliResult<Artifact> {
    let eta = params.eta.unwrap_or(1.0);
    let f = params.read_member()?;
    let bp = BernardiParams::new(eta, *f.ctx())?;
    let transformed = bernardi_series(&f, &bp);
    Ok(match params.format.unwrap_or(Format::Json) {
        Format::Json => Artifact::Json(serde_json::to_value(SeriesFile::from(&transformed)).expect("series")),
        Format::Csv => {
            let jp = params.jp()?;
            let mut t = Table::new(&["exponent", "re", "im", "abs", "bound"]);
            let p = f.ctx().p();
            for (k, c) in transformed.coeffs().iter().enumerate() {
                let bound = if k == 0 { 1.0 } else { bernardi_coeff_bound(k as u32, &bp, &jp)? };
                t.push(vec![(p + k as u32).into(), c.re.into(), c.im.into(), c.norm().into(), bound.into()]);
            }
            Artifact::Table(t)
        }
    })
}
