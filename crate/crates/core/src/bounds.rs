//! Rigorous bounds on deviation probabilities and the sample sizes they
//! certify.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{BinomialModel, IntegerInterval};
use crate::special::normal_two_sided;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRole {
    LowerBound,
    UpperBound,
    Approximation,
    Bracket,
}

/// A number together with what it claims about the true probability.
///
/// `value` is clamped to `[0, 1]`; `raw` is the formula before clamping.
/// Brackets carry their enclosure in `lo`/`hi`; for the other roles both
/// equal `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub role: BoundRole,
    pub value: f64,
    pub raw: f64,
    pub lo: f64,
    pub hi: f64,
}

impl BoundResult {
    pub fn lower(raw: f64) -> Self {
        Self::single(BoundRole::LowerBound, raw)
    }

    pub fn upper(raw: f64) -> Self {
        Self::single(BoundRole::UpperBound, raw)
    }

    pub fn approximation(value: f64) -> Self {
        Self::single(BoundRole::Approximation, value)
    }

    pub fn bracket(lo: f64, center: f64, hi: f64) -> Self {
        BoundResult {
            role: BoundRole::Bracket,
            value: center,
            raw: center,
            lo,
            hi,
        }
    }

    fn single(role: BoundRole, raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        BoundResult {
            role,
            value,
            raw,
            lo: value,
            hi: value,
        }
    }

    /// Whether the claim is true of `exact`. Approximations claim nothing.
    pub fn holds_for(&self, exact: f64) -> bool {
        match self.role {
            BoundRole::LowerBound => self.value <= exact,
            BoundRole::UpperBound => self.value >= exact,
            BoundRole::Bracket => self.lo <= exact && exact <= self.hi,
            BoundRole::Approximation => true,
        }
    }
}

/// Urn with `r` fertile and `s` sterile tokens; odds `c` against failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliProblem {
    r: u64,
    s: u64,
    c: f64,
}

impl BernoulliProblem {
    pub fn new(r: u64, s: u64, c: f64) -> Result<Self> {
        if r < 2 || s < 2 {
            return Err(Error::domain(format!("need r >= 2 and s >= 2, got r={r}, s={s}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("odds c must be positive, got {c}")));
        }
        for (what, k) in [("c(s-1)", s), ("c(r-1)", r)] {
            if c * (k - 1) as f64 <= 1.0 {
                return Err(Error::domain(format!("{what} must exceed 1")));
            }
        }
        Ok(BernoulliProblem { r, s, c })
    }

    pub fn t(&self) -> u64 {
        self.r + self.s
    }

    pub fn p(&self) -> f64 {
        self.r as f64 / self.t() as f64
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.t() as f64
    }

    pub fn confidence(&self) -> f64 {
        self.c / (self.c + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliSampleSize {
    /// The two arguments of the max, before multiplying by `t`.
    pub first: f64,
    pub second: f64,
    pub raw: f64,
    pub n: u64,
}

fn bernoulli_arm(c: f64, a: u64, b: u64) -> f64 {
    // log(c(b-1)) / (log(a+1) - log a) * (1 + b/(a+1)) - b/(a+1)
    let (a, b) = (a as f64, b as f64);
    let m = (c * (b - 1.0)).ln() / (1.0 / a).ln_1p();
    let k = b / (a + 1.0);
    m * (1.0 + k) - k
}

pub fn bernoulli_1713_n(problem: &BernoulliProblem) -> BernoulliSampleSize {
    let first = bernoulli_arm(problem.c, problem.r, problem.s);
    let second = bernoulli_arm(problem.c, problem.s, problem.r);
    let raw = problem.t() as f64 * first.max(second);
    BernoulliSampleSize {
        first,
        second,
        raw,
        n: raw.ceil() as u64,
    }
}

/// Deviation `z` from `p` with failure mass `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevProblem {
    p: f64,
    z: f64,
    failure: f64,
}

impl ChebyshevProblem {
    pub fn new(p: f64, z: f64, failure: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
        }
        if !(z > 0.0 && z < p.min(1.0 - p)) {
            return Err(Error::domain(format!("z must lie in (0, min(p, 1-p)), got {z}")));
        }
        if !(failure > 0.0 && failure < 1.0) {
            return Err(Error::domain(format!("Q must lie in (0, 1), got {failure}")));
        }
        Ok(ChebyshevProblem { p, z, failure })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn failure(&self) -> f64 {
        self.failure
    }

    /// `(ln H, ln H1)`.
    pub fn log_h(&self) -> (f64, f64) {
        let (p, q, z) = (self.p, 1.0 - self.p, self.z);
        let upper = (p + z) * (p / (p + z)).ln() + (q - z) * (q / (q - z)).ln();
        let lower = (p - z) * (p / (p - z)).ln() + (q + z) * (q / (q + z)).ln();
        (upper, lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevSampleSize {
    pub upper_arm: f64,
    pub lower_arm: f64,
    pub raw: f64,
    pub n_min: u64,
}

pub fn chebyshev_1846_n(problem: &ChebyshevProblem) -> Result<ChebyshevSampleSize> {
    let (p, q, z, big_q) = (problem.p, 1.0 - problem.p, problem.z, problem.failure);
    let (log_h, log_h1) = problem.log_h();
    // H and H1 are below one whenever 0 < z < min(p, q); equality only
    // happens through rounding at extreme parameters
    if log_h >= 0.0 || log_h1 >= 0.0 {
        return Err(Error::DegenerateBound(format!(
            "H = {}, H1 = {} must both be below 1",
            log_h.exp(),
            log_h1.exp()
        )));
    }
    let upper_arm = (big_q * (z / q) * ((q - z) / (p + z)).sqrt()).ln() / log_h;
    let lower_arm = (big_q * (z / p) * ((p - z) / (q + z)).sqrt()).ln() / log_h1;
    let raw = upper_arm.max(lower_arm);
    Ok(ChebyshevSampleSize {
        upper_arm,
        lower_arm,
        raw,
        n_min: raw.ceil().max(1.0) as u64,
    })
}

/// `P(|T - E T| >= eps) <= Var(T) / eps^2`.
pub fn bienayme_chebyshev_bound(variance_of_statistic: f64, epsilon: f64) -> Result<BoundResult> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(variance_of_statistic >= 0.0) {
        return Err(Error::domain("variance must be non-negative"));
    }
    Ok(BoundResult::upper(variance_of_statistic / (epsilon * epsilon)))
}

/// Variance of a sum of pairwise uncorrelated terms.
pub fn bienayme_variance_of_sum(variances: &[f64]) -> f64 {
    variances.iter().sum()
}

/// Trials needed for the Bienaymé-Chebyshev bound on `X/n` to reach failure
/// mass `1/(c+1)`: `n >= pq (c+1) / eps^2`.
pub fn bienayme_chebyshev_n(p: f64, epsilon: f64, odds: f64) -> u64 {
    let raw = p * (1.0 - p) * (odds + 1.0) / (epsilon * epsilon);
    // guard against 600600.0000000001
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-9 * raw {
        nearest as u64
    } else {
        raw.ceil() as u64
    }
}

/// `P(U >= u) <= E U / u` for non-negative `U`.
pub fn markov_inequality(mean_of_nonnegative: f64, u: f64) -> Result<BoundResult> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be positive, got {u}")));
    }
    if !(mean_of_nonnegative >= 0.0) {
        return Err(Error::domain("mean of a non-negative variable must be non-negative"));
    }
    Ok(BoundResult::upper(mean_of_nonnegative / u))
}

const GOLDEN_UPPER: f64 = 50.0;
const GOLDEN_MAX_ITER: usize = 200;

/// Log of `(q + p e^eps)^n e^{-eps (np + threshold)}`.
pub fn bernstein_log_objective(model: &BinomialModel, threshold: f64, eps: f64) -> f64 {
    let (p, q, n) = (model.p_f64(), model.q_f64(), model.n() as f64);
    // n ln(q + p e^eps) = n (eps + ln(p + q e^-eps)) keeps large eps finite
    n * (eps + (p + q * (-eps).exp()).ln()) - eps * (n * p + threshold)
}

/// Exponential-moment bound on `P(X >= np + threshold)`, minimised over the
/// tilt `eps` in `(0, 50]` by golden-section search on the log.
pub fn bernstein_exponential_bound(model: &BinomialModel, threshold: f64) -> Result<BoundResult> {
    if !(threshold >= 0.0) {
        return Err(Error::domain(format!("threshold must be non-negative, got {threshold}")));
    }
    let f = |e: f64| bernstein_log_objective(model, threshold, e);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, GOLDEN_UPPER);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > 1e-10 * (1.0 + a.abs()) {
        if iterations == GOLDEN_MAX_ITER {
            return Err(Error::NonConvergence {
                what: "golden-section search",
                iterations,
            });
        }
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let best = [f(a), f(b), fc, fd].into_iter().fold(0.0f64, f64::min);
    Ok(BoundResult::upper(best.exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bernstein1911 {
    pub bound: BoundResult,
    /// `|X - n/2| <= z sqrt((n+1)/2)` as an integer range.
    pub event: IntegerInterval,
}

/// Lower bound `2 Phi(z sqrt 2) - 1` on `P(|X - n/2| <= z sqrt((n+1)/2))`
/// for `X ~ B(n, 1/2)`, valid when `n` is odd and `1/2 + z sqrt((n+1)/2)` is
/// an integer.
pub fn bernstein_1911_lower(n: u64, z: f64) -> Result<Bernstein1911> {
    if n % 2 == 0 {
        return Err(Error::precondition(format!("n must be odd, got {n}")));
    }
    if !(z > 0.0) {
        return Err(Error::domain(format!("z must be positive, got {z}")));
    }
    let reach = 0.5 + z * ((n + 1) as f64 / 2.0).sqrt();
    let k = reach.round();
    if (reach - k).abs() > 1e-9 * reach.max(1.0) {
        return Err(Error::precondition(format!(
            "1/2 + z*sqrt((n+1)/2) = {reach} is not an integer"
        )));
    }
    let k = k as i64;
    let half = (n as i64 + 1) / 2;
    let event = IntegerInterval::new((half - k).max(0), (half - 1 + k).min(n as i64))?;
    Ok(Bernstein1911 {
        bound: BoundResult::lower(normal_two_sided(z * std::f64::consts::SQRT_2)),
        event,
    })
}
