//! Smallest sample sizes meeting a precision/confidence target when `p` is
//! known (or bounded, for the worst case).

use serde::Serialize;

use crate::approx::laplace_corrected;
use crate::error::{Error, Result};
use crate::exact::{big_rational_to_f64, deviation_prob, BinomialModel, DeviationQuery, RationalOracle, MAX_TRIALS};
use crate::rational::{self, Rational};
use crate::special::{normal_quantile, PrecisionConfig};

/// Precision `eps` with confidence `c/(c+1)`, or a confidence given directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionTarget {
    #[serde(serialize_with = "serialize_rational")]
    epsilon: Rational,
    confidence: f64,
    odds: Option<f64>,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(rational::to_f64(r))
}

impl PrecisionTarget {
    pub fn new(epsilon: Rational, confidence: f64) -> Result<Self> {
        DeviationQuery::new(epsilon)?;
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::domain(format!("confidence must lie in (0, 1), got {confidence}")));
        }
        Ok(PrecisionTarget {
            epsilon,
            confidence,
            odds: None,
        })
    }

    /// Confidence `c/(c+1)`: the odds are `c` to one on the deviation staying
    /// within `eps`.
    pub fn from_odds(epsilon: Rational, odds: f64) -> Result<Self> {
        if !(odds > 0.0 && odds.is_finite()) {
            return Err(Error::domain(format!("odds must be positive, got {odds}")));
        }
        let mut target = Self::new(epsilon, odds / (odds + 1.0))?;
        target.odds = Some(odds);
        Ok(target)
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn epsilon_f64(&self) -> f64 {
        rational::to_f64(&self.epsilon)
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn odds(&self) -> Option<f64> {
        self.odds
    }

    /// `z0` with `P(|Z| <= z0) = confidence`.
    pub fn z0(&self) -> Result<f64> {
        // (1 + conf)/2 loses the low bits of conf near 1; go through the tail
        let tail = 0.5 * (1.0 - self.confidence);
        Ok(-normal_quantile(tail, &PrecisionConfig::default())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizingMethod {
    Exact,
    Clt,
    CltCorrected,
    WorstCase,
    Chebyshev1846,
    Bernoulli1713,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSizeResult {
    pub n_min: u64,
    /// The method's own criterion evaluated at `n_min`.
    pub criterion_at_n: f64,
    pub method: SizingMethod,
    pub raw: Option<f64>,
}

/// Below this many trials the criterion comes from the rational engine, so
/// ties such as `P = 1/2` against confidence `0.5` resolve exactly.
const RATIONAL_BELOW: u64 = 128;

fn exact_criterion(p: Rational, query: &DeviationQuery, n: u64) -> Result<f64> {
    let model = BinomialModel::new(n, p)?;
    if n < RATIONAL_BELOW {
        return Ok(big_rational_to_f64(&RationalOracle::default().deviation(&model, query)?));
    }
    deviation_prob(&model, query)
}

fn capacity(n: u64) -> Error {
    Error::Capacity {
        what: "sample-size search",
        limit: MAX_TRIALS,
        requested: n,
    }
}

/// Smallest `n` with `deviation_prob(n, p, eps) >= confidence`.
///
/// The probability oscillates in `n`, so "smallest" is searched, not
/// bisected: the scan starts 2% below the plain normal estimate and moves up
/// to the first passing `n`. If the start already passes, it walks down
/// while the predecessor passes too.
pub fn minimal_n_exact(p: Rational, target: &PrecisionTarget) -> Result<SampleSizeResult> {
    let query = DeviationQuery::new(target.epsilon)?;
    query.validate(&BinomialModel::new(1, p)?)?;
    let estimate = clt_raw(p, target)?;
    let mut n = ((0.98 * estimate).floor() as u64).max(1);
    if n > MAX_TRIALS {
        return Err(capacity(n));
    }
    let mut value = exact_criterion(p, &query, n)?;
    if value >= target.confidence {
        while n > 1 {
            let below = exact_criterion(p, &query, n - 1)?;
            if below < target.confidence {
                break;
            }
            n -= 1;
            value = below;
        }
    } else {
        while value < target.confidence {
            n += 1;
            if n > MAX_TRIALS {
                return Err(capacity(n));
            }
            value = exact_criterion(p, &query, n)?;
        }
    }
    Ok(SampleSizeResult {
        n_min: n,
        criterion_at_n: value,
        method: SizingMethod::Exact,
        raw: None,
    })
}

fn clt_raw(p: Rational, target: &PrecisionTarget) -> Result<f64> {
    let pq = rational::to_f64(&(p * (Rational::from_integer(1) - p)));
    let z0 = target.z0()?;
    let eps = target.epsilon_f64();
    Ok(z0 * z0 * pq / (eps * eps))
}

/// Normal-approximation sample size with `p` known.
///
/// Plain: `ceil(z0^2 pq / eps^2)`. Corrected: the first `n` at which the
/// continuity-corrected value with `t = eps sqrt(n / pq)` reaches the
/// confidence.
pub fn minimal_n_clt(p: Rational, target: &PrecisionTarget, corrected: bool) -> Result<SampleSizeResult> {
    DeviationQuery::new(target.epsilon)?.validate(&BinomialModel::new(1, p)?)?;
    let raw = clt_raw(p, target)?;
    if !corrected {
        let n = (raw.ceil() as u64).max(1);
        let t = target.epsilon_f64() * n as f64 / BinomialModel::new(n, p)?.sd();
        return Ok(SampleSizeResult {
            n_min: n,
            criterion_at_n: crate::special::normal_two_sided(t),
            method: SizingMethod::Clt,
            raw: Some(raw),
        });
    }
    let eps = target.epsilon_f64();
    for n in 1..=MAX_TRIALS {
        let model = BinomialModel::new(n, p)?;
        let value = laplace_corrected(&model, eps * n as f64 / model.sd())?;
        if value >= target.confidence {
            return Ok(SampleSizeResult {
                n_min: n,
                criterion_at_n: value,
                method: SizingMethod::CltCorrected,
                raw: Some(raw),
            });
        }
    }
    Err(capacity(MAX_TRIALS + 1))
}

/// `z0^2 / (4 eps^2)`, valid for every `p` since `pq <= 1/4`.
pub fn minimal_n_worstcase(target: &PrecisionTarget) -> Result<SampleSizeResult> {
    let z0 = target.z0()?;
    let eps = target.epsilon_f64();
    let raw = z0 * z0 / (4.0 * eps * eps);
    Ok(SampleSizeResult {
        n_min: raw.ceil() as u64,
        criterion_at_n: target.confidence,
        method: SizingMethod::WorstCase,
        raw: Some(raw),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowCheck {
    pub holds: bool,
    pub first_failure: Option<u64>,
    /// Smallest criterion value seen over the window.
    pub min_value: f64,
}

/// Checks the exact criterion at every `n'` in `[n, n + window]`.
pub fn verify_window(p: Rational, target: &PrecisionTarget, n: u64, window: u64) -> Result<WindowCheck> {
    let query = DeviationQuery::new(target.epsilon)?;
    let end = n.checked_add(window).ok_or_else(|| capacity(u64::MAX))?;
    let mut check = WindowCheck {
        holds: true,
        first_failure: None,
        min_value: f64::INFINITY,
    };
    for m in n..=end {
        let value = exact_criterion(p, &query, m)?;
        check.min_value = check.min_value.min(value);
        if value < target.confidence && check.first_failure.is_none() {
            check.holds = false;
            check.first_failure = Some(m);
        }
    }
    Ok(check)
}
