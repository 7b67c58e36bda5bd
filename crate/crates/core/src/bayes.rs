//! Posterior statements about an unknown success probability after `r`
//! successes in `n` trials.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{
    normal_interval, regularized_incomplete_beta, regularized_incomplete_beta_complement, PrecisionConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    ContinuousUniform,
    /// Uniform on the atoms `i/s`, `i = 1..s-1`.
    DiscreteUniform { s: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PosteriorSpec {
    pub successes: u64,
    pub failures: u64,
    pub prior: Prior,
}

impl PosteriorSpec {
    pub fn uniform(successes: u64, failures: u64) -> Self {
        PosteriorSpec {
            successes,
            failures,
            prior: Prior::ContinuousUniform,
        }
    }

    pub fn discrete(successes: u64, failures: u64, s: u64) -> Result<Self> {
        if s < 2 {
            return Err(Error::domain(format!("discrete prior needs s >= 2, got {s}")));
        }
        Ok(PosteriorSpec {
            successes,
            failures,
            prior: Prior::DiscreteUniform { s },
        })
    }

    pub fn trials(&self) -> u64 {
        self.successes + self.failures
    }

    /// Beta parameters of the posterior under the continuous uniform prior.
    pub fn beta_parameters(&self) -> (f64, f64) {
        (self.successes as f64 + 1.0, self.failures as f64 + 1.0)
    }

    /// Observed frequency `r/n`, or `1/2` before any trial.
    pub fn frequency(&self) -> f64 {
        if self.trials() == 0 {
            0.5
        } else {
            self.successes as f64 / self.trials() as f64
        }
    }

    fn require_continuous(&self) -> Result<()> {
        match self.prior {
            Prior::ContinuousUniform => Ok(()),
            Prior::DiscreteUniform { .. } => Err(Error::domain("operation needs the continuous uniform prior")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CredibleQuery {
    /// `|Theta - r/n| < w`, clipped to `[0, 1]`.
    HalfWidth(f64),
    Interval { lo: f64, hi: f64 },
}

impl CredibleQuery {
    fn resolve(&self, spec: &PosteriorSpec) -> Result<(f64, f64)> {
        match *self {
            CredibleQuery::HalfWidth(w) => {
                if !(w > 0.0) {
                    return Err(Error::domain(format!("half-width must be positive, got {w}")));
                }
                let c = spec.frequency();
                Ok(((c - w).max(0.0), (c + w).min(1.0)))
            }
            CredibleQuery::Interval { lo, hi } => {
                if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                    return Err(Error::domain(format!("interval ({lo}, {hi}) is not inside (0, 1)")));
                }
                Ok((lo, hi))
            }
        }
    }
}

/// Posterior mass of the query under the `Beta(r + 1, n - r + 1)` posterior.
pub fn posterior_interval_exact(spec: &PosteriorSpec, query: &CredibleQuery) -> Result<f64> {
    posterior_interval_exact_with(spec, query, &PrecisionConfig::default())
}

pub fn posterior_interval_exact_with(
    spec: &PosteriorSpec,
    query: &CredibleQuery,
    cfg: &PrecisionConfig,
) -> Result<f64> {
    spec.require_continuous()?;
    let (lo, hi) = query.resolve(spec)?;
    let (a, b) = spec.beta_parameters();
    let mean = a / (a + b);
    // difference of the two small tails, not of two numbers near one
    let value = if hi <= mean {
        regularized_incomplete_beta(a, b, hi, cfg)? - regularized_incomplete_beta(a, b, lo, cfg)?
    } else if lo >= mean {
        regularized_incomplete_beta_complement(a, b, lo, cfg)? - regularized_incomplete_beta_complement(a, b, hi, cfg)?
    } else {
        1.0 - regularized_incomplete_beta(a, b, lo, cfg)? - regularized_incomplete_beta_complement(a, b, hi, cfg)?
    };
    Ok(value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesEstimate {
    /// `(r + 1)/(n + 2)`, the mean of `Beta(r + 1, n - r + 1)`.
    pub posterior_mean: f64,
    /// `(r + 1)/(n + 1)`, the historically printed form.
    pub printed_ratio: f64,
}

pub fn bayes_estimator(spec: &PosteriorSpec) -> Result<BayesEstimate> {
    spec.require_continuous()?;
    let (r, n) = (spec.successes as f64, spec.trials() as f64);
    Ok(BayesEstimate {
        posterior_mean: (r + 1.0) / (n + 2.0),
        printed_ratio: (r + 1.0) / (n + 1.0),
    })
}

/// Posterior over the atoms `i/s`, `i = 1..s-1`, after `r` successes in `n`
/// trials under a uniform prior on the atoms.
pub fn chebyshev_discrete_posterior(s: u64, n: u64, r: u64) -> Result<Vec<f64>> {
    if s < 2 {
        return Err(Error::domain(format!("need s >= 2, got {s}")));
    }
    if r > n {
        return Err(Error::domain(format!("successes {r} exceed trials {n}")));
    }
    let (r, f) = (r as f64, (n - r) as f64);
    let logs: Vec<f64> = (1..s)
        .map(|i| {
            let theta = i as f64 / s as f64;
            r * theta.ln() + f * (-theta).ln_1p()
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Mass the continuous `Beta(r + 1, n - r + 1)` posterior puts on the cell of
/// each atom `i/s`: `[(i - 1/2)/s, (i + 1/2)/s]`, with the end cells running
/// out to 0 and 1.
pub fn beta_cell_masses(s: u64, n: u64, r: u64) -> Result<Vec<f64>> {
    if s < 2 || r > n {
        return Err(Error::domain("need s >= 2 and r <= n"));
    }
    let (a, b) = (r as f64 + 1.0, (n - r) as f64 + 1.0);
    let cfg = PrecisionConfig::default();
    let mut edges = vec![0.0];
    edges.extend((1..s - 1).map(|i| (i as f64 + 0.5) / s as f64));
    edges.push(1.0);
    let cdf = edges
        .iter()
        .map(|&x| regularized_incomplete_beta(a, b, x, &cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(cdf.windows(2).map(|w| w[1] - w[0]).collect())
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `P(lo < Theta < hi)` for `Theta ~ N(r/n, (r/n)(1 - r/n)/n)`.
pub fn posterior_normal_interval(r: u64, n: u64, lo: f64, hi: f64) -> Result<f64> {
    if !(0 < r && r < n) {
        return Err(Error::domain(format!("need 0 < r < n, got r={r}, n={n}")));
    }
    if !(lo < hi) {
        return Err(Error::domain(format!("need lo < hi, got ({lo}, {hi})")));
    }
    let f = r as f64 / n as f64;
    let sigma = (f * (1.0 - f) / n as f64).sqrt();
    Ok(normal_interval((lo - f) / sigma, (hi - f) / sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinInversion {
    /// `1 - 3(n0 + 1)/(16 n w^4 n0)`, unclamped.
    pub value: f64,
    pub vacuous: bool,
}

/// Lower bound on `P(|Theta - X/n| < w | X = m)` under the uniform prior,
/// for every `m` and every `n > n0`.
pub fn bernstein_inversion_bound(n: u64, n0: u64, w: f64) -> Result<BernsteinInversion> {
    if n0 < 1 || n <= n0 {
        return Err(Error::precondition(format!("need n > n0 >= 1, got n={n}, n0={n0}")));
    }
    if !(w > 0.0) {
        return Err(Error::domain(format!("w must be positive, got {w}")));
    }
    let (n, n0) = (n as f64, n0 as f64);
    let value = 1.0 - 3.0 * (n0 + 1.0) / (16.0 * n * w.powi(4) * n0);
    Ok(BernsteinInversion {
        value,
        vacuous: value <= 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyScan {
    pub k: u64,
    pub probability: f64,
}

/// First `k` at which `(successes, failures) = (ratio_s k, ratio_f k)` puts
/// posterior mass above `1 - delta` on `|Theta - ratio_s/(ratio_s + ratio_f)| < w`.
pub fn laplace_consistency_scan(ratio_s: u64, ratio_f: u64, w: f64, delta: f64, max_k: u64) -> Result<ConsistencyScan> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let centre = ratio_s as f64 / (ratio_s + ratio_f) as f64;
    let query = CredibleQuery::Interval {
        lo: (centre - w).max(0.0),
        hi: (centre + w).min(1.0),
    };
    let cfg = PrecisionConfig::default().with_max_iter(20_000)?;
    for k in 1..=max_k {
        let spec = PosteriorSpec::uniform(ratio_s * k, ratio_f * k);
        let probability = posterior_interval_exact_with(&spec, &query, &cfg)?;
        if probability > 1.0 - delta {
            return Ok(ConsistencyScan { k, probability });
        }
    }
    Err(Error::Capacity {
        what: "consistency scan",
        limit: max_k,
        requested: max_k + 1,
    })
}
