//! Command-line front end. `run` parses arguments, dispatches and returns the
//! process exit code.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::approx::{
    bernstein_1924_bracket, bernstein_1924_event, demoivre_clt, laplace_corrected, laplace_correction,
    local_normal_pmf, skew_corrected_tail_1914, uspensky_bracket, StandardizedRange,
};
use crate::bayes::{
    bayes_estimator, bernstein_inversion_bound, beta_cell_masses, chebyshev_discrete_posterior,
    laplace_consistency_scan, posterior_interval_exact_with, posterior_normal_interval, total_variation,
    CredibleQuery, PosteriorSpec,
};
use crate::bounds::{
    bernoulli_1713_n, bernstein_1911_lower, bernstein_exponential_bound, bienayme_chebyshev_bound,
    bienayme_chebyshev_n, chebyshev_1846_n, markov_inequality, BernoulliProblem, BoundResult, ChebyshevProblem,
};
use crate::error::{Error, Result};
use crate::exact::{
    big_rational_to_f64, deviation_prob, interval_prob, pmf, upper_tail, BinomialModel,
    DeviationQuery, IntegerInterval, RationalOracle,
};
use crate::inversion::{minimal_n_clt, minimal_n_exact, minimal_n_worstcase, verify_window, PrecisionTarget};
use crate::rational::{self, parse_rational};
use crate::reproduce::{reproduce_rows, ReportRow, DEFAULT_SEED};
use crate::schemes::{lln_certificate, simulate_replicates, SchemeSpec};
use crate::special::PrecisionConfig;

#[derive(Debug, Parser)]
#[command(name = "lln", version, about = "Binomial probabilities, bounds, approximations and sample sizes")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Absolute tolerance for iterative special functions.
    #[arg(long, global = true)]
    pub precision: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact binomial probabilities.
    Prob(ProbArgs),
    /// Classical bounds and sample sizes.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Normal approximations and brackets.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Smallest sample size for a precision target.
    Invert(InvertArgs),
    /// Posterior probabilities under uniform priors.
    #[command(subcommand)]
    Bayes(BayesCmd),
    /// Seeded simulation of a trial scheme.
    Simulate(SimulateArgs),
    /// Recompute every published value and compare.
    Reproduce,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(short = 'n', long)]
    pub trials: u64,
    /// Success probability, as a decimal or a fraction such as 18/35.
    #[arg(short = 'p', long)]
    pub p: String,
}

impl ModelArgs {
    fn model(&self) -> Result<BinomialModel> {
        BinomialModel::parse(self.trials, &self.p)
    }
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, requires = "hi", allow_negative_numbers = true)]
    pub lo: Option<i64>,
    #[arg(long, requires = "lo", allow_negative_numbers = true)]
    pub hi: Option<i64>,
    /// P(|X/n - p| <= eps).
    #[arg(short = 'e', long, conflicts_with_all = ["lo", "pmf"])]
    pub epsilon: Option<String>,
    /// P(X = x).
    #[arg(long, conflicts_with = "lo")]
    pub pmf: Option<i64>,
    /// Also compute the value in exact rational arithmetic (slow for large n).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    /// Trials sufficient for odds `c` that the frequency lies within 1/t of r/t.
    Bernoulli {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        odds: f64,
    },
    /// Sample size from the 1846 tail estimate.
    Chebyshev {
        #[arg(short = 'p', long)]
        p: f64,
        #[arg(short = 'z', long)]
        z: f64,
        /// Admissible failure probability.
        #[arg(long, conflicts_with = "odds", required_unless_present = "odds")]
        failure: Option<f64>,
        #[arg(long)]
        odds: Option<f64>,
    },
    /// P(|S - E S| >= eps) <= Var / eps^2.
    Bienayme {
        #[arg(long)]
        variance: f64,
        #[arg(short = 'e', long)]
        epsilon: f64,
    },
    /// Sample size from the variance inequality for a frequency.
    BienaymeN {
        #[arg(short = 'p', long)]
        p: f64,
        #[arg(short = 'e', long)]
        epsilon: f64,
        #[arg(long)]
        odds: f64,
    },
    /// P(X >= u) <= E X / u.
    Markov {
        #[arg(long)]
        mean: f64,
        #[arg(short = 'u', long)]
        threshold: f64,
    },
    /// Exponential bound on P(X >= np + excess).
    Exponential {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        excess: f64,
    },
    /// Lower bound for the symmetric binomial at an odd n.
    Bernstein1911 {
        #[arg(short = 'n', long)]
        trials: u64,
        #[arg(short = 'z', long)]
        z: f64,
    },
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long, requires = "t2", conflicts_with = "half_width", allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long, requires = "t1", allow_negative_numbers = true)]
    pub t2: Option<f64>,
    /// Symmetric range of this many counts around np.
    #[arg(long)]
    pub half_width: Option<f64>,
}

impl RangeArgs {
    fn range(&self, model: Option<&BinomialModel>) -> Result<StandardizedRange> {
        match (self.t1, self.t2, self.half_width, model) {
            (Some(t1), Some(t2), _, _) => StandardizedRange::new(t1, t2),
            (_, _, Some(w), Some(m)) => StandardizedRange::around_mean(m, w),
            _ => Err(Error::Parse("give --t1 and --t2, or --half-width with a model".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ApproxCmd {
    /// Plain normal probability of a standardized range.
    Demoivre {
        #[arg(short = 'n', long, requires = "p")]
        trials: Option<u64>,
        #[arg(short = 'p', long)]
        p: Option<String>,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Normal value with the continuity correction, range |X - np| <= t sqrt(npq).
    Laplace {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 't', long, conflicts_with = "half_width", required_unless_present = "half_width")]
        t: Option<f64>,
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Skew-corrected upper tail at np + z sqrt(2npq).
    Skew {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 'z', long)]
        z: f64,
    },
    /// Normal value with an explicit error bound.
    Uspensky {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Bracket for the shifted range at 2 Phi(t) - 1.
    Bernstein1924 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 't', long)]
        t: f64,
    },
    /// Normal density approximation to P(X = m).
    Local {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 'm', long)]
        m: i64,
    },
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(short = 'p', long)]
    pub p: String,
    #[arg(short = 'e', long)]
    pub epsilon: String,
    /// Confidence c/(c+1).
    #[arg(long, conflicts_with = "confidence", required_unless_present = "confidence")]
    pub odds: Option<f64>,
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub clt: bool,
    #[arg(long)]
    pub corrected: bool,
    #[arg(long)]
    pub worst_case: bool,
    #[arg(long)]
    pub chebyshev: bool,
    /// Check the exact criterion over [n, n + window] after the exact search.
    #[arg(long, requires = "exact")]
    pub window: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub successes: u64,
    #[arg(long)]
    pub failures: u64,
}

#[derive(Debug, Subcommand)]
pub enum BayesCmd {
    /// Posterior probability of an interval for the unknown chance.
    Interval {
        #[command(flatten)]
        counts: CountArgs,
        /// Around the observed frequency, clipped to [0, 1].
        #[arg(long, conflicts_with = "lo", required_unless_present = "lo")]
        half_width: Option<f64>,
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
    },
    /// Posterior mean and the (r + 1)/(n + 1) form.
    Estimator {
        #[command(flatten)]
        counts: CountArgs,
    },
    /// Normal approximation to the posterior.
    Normal {
        #[arg(short = 'r', long)]
        successes: u64,
        #[arg(short = 'n', long)]
        trials: u64,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// Posterior on the atoms i/s against Beta cell masses.
    Discrete {
        #[arg(short = 's', long)]
        atoms: u64,
        #[arg(short = 'n', long)]
        trials: u64,
        #[arg(short = 'r', long)]
        successes: u64,
    },
    /// Lower bound on the posterior mass within w of the frequency.
    Bernstein {
        #[arg(short = 'n', long)]
        trials: u64,
        #[arg(long)]
        n0: u64,
        #[arg(short = 'w', long)]
        w: f64,
    },
    /// First multiple k of a success:failure ratio with posterior mass above 1 - delta.
    Consistency {
        #[arg(long)]
        ratio_s: u64,
        #[arg(long)]
        ratio_f: u64,
        #[arg(short = 'w', long)]
        w: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100_000)]
        max_k: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Iid,
    PoissonFixed,
    PoissonCauses,
    Persistence,
    Markov,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    pub scheme: Option<SchemeName>,
    /// Full scheme as JSON, e.g. {"scheme":"iid_bernoulli","p":0.6}.
    #[arg(long, conflicts_with = "scheme")]
    pub spec: Option<String>,
    /// Comma-separated probabilities; one value for iid.
    #[arg(long, value_delimiter = ',')]
    pub probs: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub block_len: u64,
    /// Transition matrix rows separated by ';', entries by ','.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub initial: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub size: u64,
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    #[arg(short = 'e', long)]
    pub epsilon: Option<f64>,
    /// Compare the deviation frequency with the Chebyshev bound.
    #[arg(long, requires = "epsilon")]
    pub certificate: bool,
}

impl SimulateArgs {
    fn scheme(&self) -> Result<SchemeSpec> {
        if let Some(json) = &self.spec {
            let spec: SchemeSpec = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
            spec.validate()?;
            return Ok(spec);
        }
        let probs = self.probs.clone();
        let spec = match self.scheme.expect("clap requires scheme or spec") {
            SchemeName::Iid => match probs.as_slice() {
                [p] => SchemeSpec::IidBernoulli { p: *p },
                _ => return Err(Error::Parse("iid takes exactly one --probs value".into())),
            },
            SchemeName::PoissonFixed => SchemeSpec::PoissonFixed { probs },
            SchemeName::PoissonCauses => SchemeSpec::PoissonCauses { probs },
            SchemeName::Persistence => SchemeSpec::BienaymePersistence {
                probs,
                block_len: self.block_len,
            },
            SchemeName::Markov => {
                let text = self.matrix.as_deref().ok_or_else(|| Error::Parse("markov needs --matrix".into()))?;
                let matrix = text
                    .split(';')
                    .map(|row| {
                        row.split(',')
                            .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let k = matrix.len();
                SchemeSpec::FiniteMarkov {
                    matrix,
                    initial: if self.initial.is_empty() { vec![1.0 / k as f64; k] } else { self.initial.clone() },
                    values: if self.values.is_empty() { (0..k).map(|i| i as f64).collect() } else { self.values.clone() },
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Fields(Vec<(String, Value)>),
    Rows(Vec<ReportRow>),
}

#[derive(Default)]
struct Fields(Vec<(String, Value)>);

impl Fields {
    fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.push((key.into(), value.into()));
        self
    }

    fn bound(&mut self, b: &BoundResult) -> &mut Self {
        let role = serde_json::to_value(b.role).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        self.put("role", role).put("value", b.value).put("raw", b.raw)
    }

    fn done(self) -> Output {
        Output::Fields(self.0)
    }
}

/// Ten significant digits; integers print without a fraction.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == x.trunc() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let s = format!("{:.*}", (9 - e).max(0) as usize, x);
        let s = s.trim_end_matches('0');
        s.trim_end_matches('.').to_string()
    } else {
        let s = format!("{x:.9e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", mantissa.trim_end_matches('0').trim_end_matches('.'))
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Num(x) => fmt_sig(*x),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
    }
}

fn value_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Num(x) => serde_json::Number::from_f64(*x).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null),
        Value::Int(i) => (*i).into(),
        Value::Text(s) => s.clone().into(),
        Value::Bool(b) => (*b).into(),
    }
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

/// Renders an output in the requested format.
pub fn render(output: &Output, format: Format) -> std::io::Result<String> {
    let mut buf = Vec::new();
    match (output, format) {
        (Output::Fields(fields), Format::Table) => {
            let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in fields {
                writeln!(buf, "{k:<width$}  {}", value_text(v))?;
            }
        }
        (Output::Fields(fields), Format::Csv) => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["field", "value"]).map_err(csv_error)?;
            for (k, v) in fields {
                w.write_record([k.as_str(), &value_text(v)]).map_err(csv_error)?;
            }
            w.flush()?;
        }
        (Output::Fields(fields), Format::Json) => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.clone(), value_json(v))).collect();
            serde_json::to_writer_pretty(&mut buf, &map)?;
            buf.push(b'\n');
        }
        (Output::Rows(rows), Format::Table) => {
            let cells: Vec<[String; 6]> = rows
                .iter()
                .map(|r| {
                    [
                        r.id.clone(),
                        r.method.clone(),
                        fmt_sig(r.computed),
                        fmt_sig(r.reference),
                        fmt_sig(r.tolerance),
                        r.status.as_str().to_string(),
                    ]
                })
                .collect();
            let header = ["id", "method", "computed", "reference", "tolerance", "status"].map(String::from);
            let mut widths = header.clone().map(|h| h.len());
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            for row in std::iter::once(&header).chain(&cells) {
                let line: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
                writeln!(buf, "{}", line.join("  ").trim_end())?;
            }
        }
        (Output::Rows(rows), Format::Csv) => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["id", "method", "computed", "reference", "tolerance", "status"]).map_err(csv_error)?;
            for r in rows {
                w.write_record([
                    r.id.as_str(),
                    &r.method,
                    &fmt_sig(r.computed),
                    &fmt_sig(r.reference),
                    &fmt_sig(r.tolerance),
                    r.status.as_str(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
        }
        (Output::Rows(rows), Format::Json) => {
            serde_json::to_writer_pretty(&mut buf, rows)?;
            buf.push(b'\n');
        }
    }
    Ok(String::from_utf8(buf).expect("formatter writes UTF-8"))
}

fn precision(cli: &Cli) -> Result<PrecisionConfig> {
    match cli.precision {
        Some(tol) => PrecisionConfig::default().with_abs_tol(tol),
        None => Ok(PrecisionConfig::default()),
    }
}

fn prob(args: &ProbArgs) -> Result<Output> {
    let m = args.model.model()?;
    let mut f = Fields::default();
    f.put("n", m.n()).put("p", m.p().to_string());
    let (event, value, oracle) = if let Some(x) = args.pmf {
        let iv = IntegerInterval::new(x, x)?;
        (format!("X = {x}"), pmf(&m, x)?, Some(iv))
    } else if let Some(eps) = &args.epsilon {
        let q = DeviationQuery::new(parse_rational(eps)?)?;
        let value = deviation_prob(&m, &q)?;
        (format!("|X/n - p| <= {}", q.epsilon()), value, q.interval(&m))
    } else if let (Some(lo), Some(hi)) = (args.lo, args.hi) {
        let iv = IntegerInterval::new(lo, hi)?;
        (format!("{lo} <= X <= {hi}"), interval_prob(&m, iv)?, Some(iv))
    } else {
        return Err(Error::Parse("give --lo/--hi, --epsilon or --pmf".into()));
    };
    f.put("event", event).put("probability", value);
    if args.oracle {
        match oracle {
            Some(iv) => {
                let exact = RationalOracle::with_capacity(m.n()).interval(&m, iv)?;
                f.put("oracle", big_rational_to_f64(&exact));
            }
            None => {
                f.put("oracle", 0.0);
            }
        }
    }
    Ok(f.done())
}

fn bound(cmd: &BoundCmd) -> Result<Output> {
    let mut f = Fields::default();
    match cmd {
        BoundCmd::Bernoulli { r, s, odds } => {
            let problem = BernoulliProblem::new(*r, *s, *odds)?;
            let out = bernoulli_1713_n(&problem);
            f.put("p", problem.p())
                .put("epsilon", problem.epsilon())
                .put("confidence", problem.confidence())
                .put("first", out.first)
                .put("second", out.second)
                .put("raw", out.raw)
                .put("n", out.n);
        }
        BoundCmd::Chebyshev { p, z, failure, odds } => {
            let failure = match (failure, odds) {
                (Some(q), _) => *q,
                (None, Some(c)) => 1.0 / (c + 1.0),
                _ => unreachable!("clap requires one of them"),
            };
            let out = chebyshev_1846_n(&ChebyshevProblem::new(*p, *z, failure)?)?;
            f.put("upper_arm", out.upper_arm).put("lower_arm", out.lower_arm).put("raw", out.raw).put("n_min", out.n_min);
        }
        BoundCmd::Bienayme { variance, epsilon } => {
            f.bound(&bienayme_chebyshev_bound(*variance, *epsilon)?);
        }
        BoundCmd::BienaymeN { p, epsilon, odds } => {
            if !(*p > 0.0 && *p < 1.0 && *epsilon > 0.0 && *odds > 0.0) {
                return Err(Error::Domain("need 0 < p < 1, eps > 0, odds > 0".into()));
            }
            f.put("n", bienayme_chebyshev_n(*p, *epsilon, *odds));
        }
        BoundCmd::Markov { mean, threshold } => {
            f.bound(&markov_inequality(*mean, *threshold)?);
        }
        BoundCmd::Exponential { model, excess } => {
            let m = model.model()?;
            f.bound(&bernstein_exponential_bound(&m, *excess)?);
            f.put("exact", upper_tail(&m, (m.mean_f64() + excess).ceil() as i64));
        }
        BoundCmd::Bernstein1911 { trials, z } => {
            let out = bernstein_1911_lower(*trials, *z)?;
            let exact = interval_prob(&BinomialModel::new(*trials, rational::Rational::new(1, 2))?, out.event)?;
            f.bound(&out.bound).put("lo", out.event.lo).put("hi", out.event.hi).put("exact", exact);
        }
    }
    Ok(f.done())
}

fn approx(cmd: &ApproxCmd) -> Result<Output> {
    let mut f = Fields::default();
    match cmd {
        ApproxCmd::Demoivre { trials, p, range } => {
            let model = match (trials, p) {
                (Some(n), Some(p)) => Some(BinomialModel::parse(*n, p)?),
                _ => None,
            };
            let r = range.range(model.as_ref())?;
            f.put("t1", r.t1()).put("t2", r.t2()).put("value", demoivre_clt(&r));
        }
        ApproxCmd::Laplace { model, t, half_width } => {
            let m = model.model()?;
            let t = match (t, half_width) {
                (Some(t), _) => *t,
                (None, Some(w)) => w / m.sd(),
                _ => unreachable!("clap requires one of them"),
            };
            f.put("t", t)
                .put("correction", laplace_correction(&m, t))
                .put("value", laplace_corrected(&m, t)?);
        }
        ApproxCmd::Skew { model, z } => {
            let m = model.model()?;
            let out = skew_corrected_tail_1914(&m, *z)?;
            f.put("plain", out.plain).put("correction", out.correction).put("value", out.value);
        }
        ApproxCmd::Uspensky { model, range } => {
            let m = model.model()?;
            let r = range.range(Some(&m))?;
            let b = uspensky_bracket(&m, &r)?;
            f.put("t1", r.t1())
                .put("t2", r.t2())
                .put("center", b.center)
                .put("lo", b.lo)
                .put("hi", b.hi)
                .put("omega_bound", b.omega_bound);
        }
        ApproxCmd::Bernstein1924 { model, t } => {
            let m = model.model()?;
            let b = bernstein_1924_bracket(&m, *t)?;
            f.put("center", b.center).put("lo", b.lo).put("hi", b.hi);
            for (name, alpha) in [("alpha_minus", -1.0), ("alpha_plus", 1.0)] {
                let exact = match bernstein_1924_event(&m, *t, alpha) {
                    Some(iv) => interval_prob(&m, iv)?,
                    None => 0.0,
                };
                f.put(&format!("exact_{name}"), exact);
            }
        }
        ApproxCmd::Local { model, m: x } => {
            let m = model.model()?;
            f.put("approx", local_normal_pmf(&m, *x)?).put("exact", pmf(&m, *x)?);
        }
    }
    Ok(f.done())
}

fn invert(args: &InvertArgs) -> Result<Output> {
    let eps = parse_rational(&args.epsilon)?;
    let target = match (args.odds, args.confidence) {
        (Some(c), _) => PrecisionTarget::from_odds(eps, c)?,
        (None, Some(conf)) => PrecisionTarget::new(eps, conf)?,
        _ => unreachable!("clap requires one of them"),
    };
    let p = parse_rational(&args.p)?;
    let any = args.exact || args.clt || args.corrected || args.worst_case || args.chebyshev;
    let mut f = Fields::default();
    f.put("confidence", target.confidence()).put("z0", target.z0()?);
    if args.exact || !any {
        let out = minimal_n_exact(p, &target)?;
        f.put("exact.n_min", out.n_min).put("exact.criterion", out.criterion_at_n);
        if let Some(w) = args.window {
            let check = verify_window(p, &target, out.n_min, w)?;
            f.put("exact.window_holds", check.holds).put("exact.window_min", check.min_value);
            if let Some(n) = check.first_failure {
                f.put("exact.window_first_failure", n);
            }
        }
    }
    if args.clt || !any {
        let out = minimal_n_clt(p, &target, false)?;
        f.put("clt.raw", out.raw.unwrap_or(f64::NAN)).put("clt.n_min", out.n_min);
    }
    if args.corrected || !any {
        let out = minimal_n_clt(p, &target, true)?;
        f.put("clt_corrected.n_min", out.n_min).put("clt_corrected.criterion", out.criterion_at_n);
    }
    if args.worst_case || !any {
        let out = minimal_n_worstcase(&target)?;
        f.put("worst_case.raw", out.raw.unwrap_or(f64::NAN)).put("worst_case.n_min", out.n_min);
    }
    if args.chebyshev {
        let problem = ChebyshevProblem::new(rational::to_f64(&p), target.epsilon_f64(), 1.0 - target.confidence())?;
        let out = chebyshev_1846_n(&problem)?;
        f.put("chebyshev.raw", out.raw).put("chebyshev.n_min", out.n_min);
    }
    Ok(f.done())
}

fn bayes(cmd: &BayesCmd, cfg: &PrecisionConfig) -> Result<Output> {
    let mut f = Fields::default();
    match cmd {
        BayesCmd::Interval {
            counts,
            half_width,
            lo,
            hi,
        } => {
            let spec = PosteriorSpec::uniform(counts.successes, counts.failures);
            let query = match (half_width, lo, hi) {
                (Some(w), _, _) => CredibleQuery::HalfWidth(*w),
                (None, Some(lo), Some(hi)) => CredibleQuery::Interval { lo: *lo, hi: *hi },
                _ => return Err(Error::Parse("give --half-width or --lo and --hi".into())),
            };
            f.put("probability", posterior_interval_exact_with(&spec, &query, cfg)?);
        }
        BayesCmd::Estimator { counts } => {
            let est = bayes_estimator(&PosteriorSpec::uniform(counts.successes, counts.failures))?;
            f.put("posterior_mean", est.posterior_mean).put("printed_ratio", est.printed_ratio);
        }
        BayesCmd::Normal {
            successes,
            trials,
            lo,
            hi,
        } => {
            f.put("probability", posterior_normal_interval(*successes, *trials, *lo, *hi)?);
        }
        BayesCmd::Discrete {
            atoms,
            trials,
            successes,
        } => {
            let post = chebyshev_discrete_posterior(*atoms, *trials, *successes)?;
            let cells = beta_cell_masses(*atoms, *trials, *successes)?;
            let (argmax, mass) = post
                .iter()
                .enumerate()
                .fold((0, 0.0), |best, (i, &w)| if w > best.1 { (i, w) } else { best });
            f.put("mode_atom", format!("{}/{}", argmax + 1, atoms))
                .put("mode_mass", mass)
                .put("total_variation", total_variation(&post, &cells));
        }
        BayesCmd::Bernstein { trials, n0, w } => {
            let out = bernstein_inversion_bound(*trials, *n0, *w)?;
            f.put("value", out.value).put("vacuous", out.vacuous);
        }
        BayesCmd::Consistency {
            ratio_s,
            ratio_f,
            w,
            delta,
            max_k,
        } => {
            let out = laplace_consistency_scan(*ratio_s, *ratio_f, *w, *delta, *max_k)?;
            f.put("k", out.k).put("probability", out.probability);
        }
    }
    Ok(f.done())
}

fn simulate(args: &SimulateArgs, seed: u64) -> Result<Output> {
    let scheme = args.scheme()?;
    let run = simulate_replicates(&scheme, args.size, args.replicates, args.epsilon, seed)?;
    let mut f = Fields::default();
    f.put("scheme", scheme.name())
        .put("seed", seed)
        .put("size", run.total_trials)
        .put("replicates", run.replicate_count)
        .put("mean", run.mean);
    if args.epsilon.is_some() {
        f.put("deviation_frequency", run.deviation_frequency);
    }
    if let (true, Some(eps)) = (args.certificate, args.epsilon) {
        let cert = lln_certificate(&scheme, eps, args.size, args.replicates, seed)?;
        f.put("chebyshev_bound", cert.chebyshev_bound)
            .put("tolerance", cert.tolerance)
            .put("certificate_holds", cert.holds());
    }
    Ok(f.done())
}

/// Runs a parsed command and returns its output.
pub fn execute(cli: &Cli) -> Result<Output> {
    let cfg = precision(cli)?;
    match &cli.command {
        Command::Prob(a) => prob(a),
        Command::Bound(c) => bound(c),
        Command::Approx(c) => approx(c),
        Command::Invert(a) => invert(a),
        Command::Bayes(c) => bayes(c, &cfg),
        Command::Simulate(a) => simulate(a, cli.seed),
        Command::Reproduce => Ok(Output::Rows(reproduce_rows()?)),
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_REPRODUCTION: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Parse(_) => EXIT_USAGE,
        Error::Precondition(_) | Error::Capacity { .. } | Error::NonConvergence { .. } | Error::DegenerateBound(_) => {
            EXIT_PRECONDITION
        }
    }
}

/// Parses `args` (program name first), runs, writes output and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let output = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = match render(&output, cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    match output {
        Output::Rows(rows) if rows.iter().any(ReportRow::failed) => EXIT_REPRODUCTION,
        _ => EXIT_OK,
    }
}
