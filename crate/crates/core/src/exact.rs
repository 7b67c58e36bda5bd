//! Exact binomial probabilities.
//!
//! Point masses use Loader's saddle-point form (Stirling remainders plus
//! deviance terms), which keeps ~15 significant digits without ever forming
//! large factorials. Interval sums start at the term nearest the mode and
//! sweep outward with a ratio recurrence that is re-anchored periodically;
//! the accumulation is compensated. A big-rational engine gives exact values
//! for certification.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::special::{bd0, stirlerr, CompensatedSum, LN_SQRT_2PI};

/// Largest trial count accepted by the floating engine.
pub const MAX_TRIALS: u64 = 1_000_000;

/// Default capacity of the big-rational oracle.
pub const ORACLE_CAPACITY: u64 = 5000;

const REANCHOR_EVERY: u64 = 64;
const NEGLIGIBLE_TERM: f64 = 1e-25;

/// `X ~ B(n, p)` with `p` held as an exact fraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialModel {
    n: u64,
    #[serde(serialize_with = "serialize_rational")]
    p: Rational,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl BinomialModel {
    pub fn new(n: u64, p: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("binomial model requires n >= 1"));
        }
        if n > MAX_TRIALS {
            return Err(Error::Capacity {
                what: "binomial trial count",
                limit: MAX_TRIALS,
                requested: n,
            });
        }
        if !rational::is_probability_open(&p) {
            return Err(Error::domain(format!("success probability must lie in (0, 1), got {p}")));
        }
        Ok(BinomialModel { n, p })
    }

    /// `p` given as `"num/den"` or a decimal string.
    pub fn parse(n: u64, p: &str) -> Result<Self> {
        Self::new(n, rational::parse_rational(p)?)
    }

    /// `p` taken from the shortest decimal representation of the float.
    pub fn from_f64(n: u64, p: f64) -> Result<Self> {
        Self::new(n, rational::from_f64_decimal(p)?)
    }

    pub fn with_trials(&self, n: u64) -> Result<Self> {
        Self::new(n, self.p)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> Rational {
        self.p
    }

    pub fn q(&self) -> Rational {
        Rational::one() - self.p
    }

    pub fn p_f64(&self) -> f64 {
        *self.p.numer() as f64 / *self.p.denom() as f64
    }

    pub fn q_f64(&self) -> f64 {
        (*self.p.denom() - *self.p.numer()) as f64 / *self.p.denom() as f64
    }

    /// `np` exactly.
    pub fn mean(&self) -> Rational {
        self.p * Rational::from_integer(self.n as i128)
    }

    pub fn mean_f64(&self) -> f64 {
        self.n as f64 * self.p_f64()
    }

    pub fn variance(&self) -> f64 {
        self.n as f64 * self.p_f64() * self.q_f64()
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn mode(&self) -> u64 {
        let m = Rational::from_integer(self.n as i128 + 1) * self.p;
        (rational::floor_i64(&m) as u64).min(self.n)
    }

    fn log_pmf_unchecked(&self, x: u64) -> f64 {
        let n = self.n as f64;
        let p = self.p_f64();
        let q = self.q_f64();
        if x == 0 {
            return if p < 0.1 { -bd0(n, n * q) - n * p } else { n * q.ln() };
        }
        if x == self.n {
            return if q < 0.1 { -bd0(n, n * p) - n * q } else { n * p.ln() };
        }
        let xf = x as f64;
        let yf = n - xf;
        let lc = stirlerr(n) - stirlerr(xf) - stirlerr(yf) - bd0(xf, n * p) - bd0(yf, n * q);
        // ln(2 pi x (n-x) / n) / 2
        let lf = LN_SQRT_2PI + 0.5 * (xf.ln() + (-xf / n).ln_1p());
        lc - lf
    }

    fn pmf_unchecked(&self, x: u64) -> f64 {
        self.log_pmf_unchecked(x).exp()
    }

    /// Ratio `P(X = k + 1) / P(X = k)`.
    fn step_up(&self, k: u64, odds: f64) -> f64 {
        (self.n - k) as f64 / (k + 1) as f64 * odds
    }
}

/// Closed integer range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntegerInterval {
    pub lo: i64,
    pub hi: i64,
}

impl IntegerInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("interval requires lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(IntegerInterval { lo, hi })
    }

    pub fn full(model: &BinomialModel) -> Self {
        IntegerInterval {
            lo: 0,
            hi: model.n as i64,
        }
    }

    pub fn contains(&self, other: &IntegerInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    fn check_within(&self, model: &BinomialModel) -> Result<()> {
        if self.lo < 0 || self.hi > model.n as i64 {
            return Err(Error::domain(format!(
                "interval [{}, {}] not within [0, {}]",
                self.lo, self.hi, model.n
            )));
        }
        Ok(())
    }
}

/// Event `|X/n - p| <= eps` under the fixed endpoint convention
/// `P(X <= n(p + eps)) - P(X < n(p - eps))`: both lattice endpoints that fall
/// exactly on `n(p +- eps)` are included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationQuery {
    epsilon: Rational,
}

impl DeviationQuery {
    pub fn new(epsilon: Rational) -> Result<Self> {
        if epsilon <= Rational::zero() {
            return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(DeviationQuery { epsilon })
    }

    pub fn from_f64(epsilon: f64) -> Result<Self> {
        Self::new(rational::from_f64_decimal(epsilon)?)
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn epsilon_f64(&self) -> f64 {
        rational::to_f64(&self.epsilon)
    }

    pub fn validate(&self, model: &BinomialModel) -> Result<()> {
        let p = model.p();
        let bound = if p < model.q() { p } else { model.q() };
        if self.epsilon >= bound {
            return Err(Error::domain(format!(
                "epsilon {} must be below min(p, q) = {}",
                self.epsilon, bound
            )));
        }
        Ok(())
    }

    /// `[ceil(n(p - eps)), floor(n(p + eps))]`, or `None` when no lattice
    /// point falls in the window.
    pub fn interval(&self, model: &BinomialModel) -> Option<IntegerInterval> {
        let n = Rational::from_integer(model.n as i128);
        let lo = rational::ceil_i64(&(n * (model.p - self.epsilon))).max(0);
        let hi = rational::floor_i64(&(n * (model.p + self.epsilon))).min(model.n as i64);
        (lo <= hi).then_some(IntegerInterval { lo, hi })
    }
}

/// `P(X = x)`.
pub fn pmf(model: &BinomialModel, x: i64) -> Result<f64> {
    if x < 0 || x > model.n as i64 {
        return Err(Error::domain(format!("pmf argument {x} outside [0, {}]", model.n)));
    }
    Ok(model.pmf_unchecked(x as u64))
}

/// `ln P(X = x)`.
pub fn log_pmf(model: &BinomialModel, x: i64) -> Result<f64> {
    if x < 0 || x > model.n as i64 {
        return Err(Error::domain(format!("pmf argument {x} outside [0, {}]", model.n)));
    }
    Ok(model.log_pmf_unchecked(x as u64))
}

/// Sum of `P(X = k)` for `k` in `[lo, hi]` (already clipped to `[0, n]`).
fn sum_range(model: &BinomialModel, lo: u64, hi: u64) -> f64 {
    debug_assert!(lo <= hi && hi <= model.n);
    let anchor = model.mode().clamp(lo, hi);
    let odds = model.p_f64() / model.q_f64();
    let mut acc = CompensatedSum::new();

    let first = model.pmf_unchecked(anchor);
    if first == 0.0 {
        return 0.0;
    }
    acc.add(first);

    // upward from the anchor
    let mut term = first;
    let mut k = anchor;
    while k < hi {
        term *= model.step_up(k, odds);
        k += 1;
        if (k - anchor) % REANCHOR_EVERY == 0 {
            term = model.pmf_unchecked(k);
        }
        acc.add(term);
        if term <= NEGLIGIBLE_TERM * acc.value() {
            break;
        }
    }

    // downward from the anchor
    let mut term = first;
    let mut k = anchor;
    while k > lo {
        term /= model.step_up(k - 1, odds);
        k -= 1;
        if (anchor - k) % REANCHOR_EVERY == 0 {
            term = model.pmf_unchecked(k);
        }
        acc.add(term);
        if term <= NEGLIGIBLE_TERM * acc.value() {
            break;
        }
    }
    acc.value()
}

/// `P(lo <= X <= hi)`.
pub fn interval_prob(model: &BinomialModel, interval: IntegerInterval) -> Result<f64> {
    interval.check_within(model)?;
    Ok(sum_range(model, interval.lo as u64, interval.hi as u64).min(1.0))
}

/// `P(X <= k)`, summed directly (never as one minus the other tail).
pub fn lower_tail(model: &BinomialModel, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = (k as u64).min(model.n);
    sum_range(model, 0, k).min(1.0)
}

/// `P(X >= k)`, summed directly.
pub fn upper_tail(model: &BinomialModel, k: i64) -> f64 {
    if k > model.n as i64 {
        return 0.0;
    }
    let k = k.max(0) as u64;
    sum_range(model, k, model.n).min(1.0)
}

/// `P(|X/n - p| <= eps)` under the endpoint convention of [`DeviationQuery`].
pub fn deviation_prob(model: &BinomialModel, query: &DeviationQuery) -> Result<f64> {
    query.validate(model)?;
    Ok(match query.interval(model) {
        Some(iv) => sum_range(model, iv.lo as u64, iv.hi as u64).min(1.0),
        None => 0.0,
    })
}

/// Exact big-rational binomial engine.
#[derive(Debug, Clone, Copy)]
pub struct RationalOracle {
    capacity: u64,
}

impl Default for RationalOracle {
    fn default() -> Self {
        RationalOracle {
            capacity: ORACLE_CAPACITY,
        }
    }
}

impl RationalOracle {
    pub fn with_capacity(capacity: u64) -> Self {
        RationalOracle { capacity }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Exact `P(lo <= X <= hi)`.
    pub fn interval(&self, model: &BinomialModel, interval: IntegerInterval) -> Result<BigRational> {
        if model.n > self.capacity {
            return Err(Error::Capacity {
                what: "rational oracle trial count",
                limit: self.capacity,
                requested: model.n,
            });
        }
        interval.check_within(model)?;
        let n = model.n;
        let (num, den) = rational::gcd_reduce(*model.p.numer(), *model.p.denom());
        let a = BigUint::from(num as u128);
        let b = BigUint::from((den - num) as u128);
        let lo = interval.lo as u64;
        let hi = interval.hi as u64;

        // T_k = C(n, k) a^k b^(n-k); T_{k+1} = T_k (n-k) a / ((k+1) b) exactly
        let mut term = binomial_coefficient(n, lo) * a.pow(lo as u32) * b.pow((n - lo) as u32);
        let mut total = term.clone();
        for k in lo..hi {
            term = term * BigUint::from(n - k) * &a / (BigUint::from(k + 1) * &b);
            total += &term;
        }
        let denominator = BigUint::from(den as u128).pow(n as u32);
        Ok(BigRational::new(BigInt::from(total), BigInt::from(denominator)))
    }

    /// Exact deviation probability under the [`DeviationQuery`] convention.
    pub fn deviation(&self, model: &BinomialModel, query: &DeviationQuery) -> Result<BigRational> {
        query.validate(model)?;
        match query.interval(model) {
            Some(iv) => self.interval(model, iv),
            None => Ok(BigRational::zero()),
        }
    }
}

/// Exact interval probability with the default oracle capacity (`n <= 5000`).
pub fn rational_oracle_interval(model: &BinomialModel, interval: IntegerInterval) -> Result<BigRational> {
    RationalOracle::default().interval(model, interval)
}

pub fn binomial_coefficient(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// Nearest `f64` to a non-negative big rational (truncated to 64 quotient bits).
pub fn big_rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sign = if (r.numer().sign() == num_bigint::Sign::Minus) ^ (r.denom().sign() == num_bigint::Sign::Minus) {
        -1.0
    } else {
        1.0
    };
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    // two factors: 2^-shift alone underflows for results near 1e-300
    let half = (shift / 2) as i32;
    sign * qf * 2f64.powi(-half) * 2f64.powi(half - shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn tiny_rationals_convert() {
        let r = BigRational::new(BigInt::from(3), BigInt::from(1u8) << 1000usize);
        assert_eq!(big_rational_to_f64(&r), 3.0 * 2f64.powi(-500) * 2f64.powi(-500));
        let r = BigRational::new(BigInt::from(1u8) << 1000usize, BigInt::from(7));
        assert!((big_rational_to_f64(&r) / (2f64.powi(1000) / 7.0) - 1.0).abs() < 1e-15);
    }

    fn model(n: u64, p: &str) -> BinomialModel {
        BinomialModel::parse(n, p).unwrap()
    }

    #[test]
    fn single_trial_and_enumeration() {
        let m = model(1, "3/7");
        assert!((pmf(&m, 1).unwrap() - 3.0 / 7.0).abs() < 1e-16);
        assert!((pmf(&model(2, "1/2"), 1).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn pmf_rejects_out_of_range() {
        let m = model(10, "0.3");
        assert!(pmf(&m, -1).is_err());
        assert!(pmf(&m, 11).is_err());
    }

    #[test]
    fn model_rejects_degenerate_probabilities() {
        assert!(BinomialModel::parse(10, "0").is_err());
        assert!(BinomialModel::parse(10, "1").is_err());
        assert!(BinomialModel::parse(0, "0.5").is_err());
        assert!(BinomialModel::parse(MAX_TRIALS + 1, "0.5").is_err());
    }

    #[test]
    fn interval_rejects_bad_ranges() {
        assert!(IntegerInterval::new(5, 4).is_err());
        let m = model(10, "0.5");
        assert!(interval_prob(&m, IntegerInterval::new(-1, 3).unwrap()).is_err());
        assert!(interval_prob(&m, IntegerInterval::new(3, 11).unwrap()).is_err());
    }

    #[test]
    fn deviation_window_includes_lattice_endpoints() {
        // n(p - eps) = 3741 and n(p + eps) = 3999 are both integers at n = 6450
        let m = model(6450, "0.6");
        let q = DeviationQuery::new(Ratio::new(1, 50)).unwrap();
        assert_eq!(q.interval(&m), Some(IntegerInterval { lo: 3741, hi: 3999 }));
        let m = model(6491, "0.6");
        assert_eq!(q.interval(&m), Some(IntegerInterval { lo: 3765, hi: 4024 }));
    }

    #[test]
    fn deviation_window_can_be_empty() {
        let m = model(1, "0.5");
        let q = DeviationQuery::from_f64(0.4).unwrap();
        assert_eq!(q.interval(&m), None);
        assert_eq!(deviation_prob(&m, &q).unwrap(), 0.0);
    }

    #[test]
    fn deviation_rejects_wide_epsilon() {
        let m = model(100, "0.3");
        assert!(deviation_prob(&m, &DeviationQuery::from_f64(0.3).unwrap()).is_err());
        assert!(DeviationQuery::from_f64(0.0).is_err());
    }

    #[test]
    fn oracle_small_cases() {
        let m = model(2, "1/2");
        let full = rational_oracle_interval(&m, IntegerInterval::new(0, 2).unwrap()).unwrap();
        assert_eq!(full, BigRational::one());
        let m = model(4, "1/2");
        let mid = rational_oracle_interval(&m, IntegerInterval::new(2, 2).unwrap()).unwrap();
        assert_eq!(mid, BigRational::new(BigInt::from(6), BigInt::from(16)));
    }

    #[test]
    fn oracle_capacity_is_enforced() {
        let m = model(5001, "1/2");
        let err = rational_oracle_interval(&m, IntegerInterval::new(0, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Capacity { limit: 5000, .. }));
        assert!(RationalOracle::with_capacity(6000)
            .interval(&m, IntegerInterval::new(0, 1).unwrap())
            .is_ok());
    }

    #[test]
    fn big_rational_conversion() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(big_rational_to_f64(&r), 1.0 / 3.0);
        let r = BigRational::new(BigInt::from(10).pow(40) + 1u32, BigInt::from(10).pow(40));
        assert_eq!(big_rational_to_f64(&r), 1.0);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial_coefficient(50, 30), BigUint::from(47_129_212_243_960u64));
        assert_eq!(binomial_coefficient(7, 0), BigUint::one());
    }

    #[test]
    fn tails_complement_each_other() {
        let m = model(137, "0.37");
        for k in [0i64, 20, 50, 51, 90, 137] {
            let lhs = lower_tail(&m, k - 1) + upper_tail(&m, k);
            assert!((lhs - 1.0).abs() < 1e-14, "k={k} sum={lhs}");
        }
    }
}
