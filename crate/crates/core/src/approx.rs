//! Normal approximations to binomial interval probabilities, with the
//! classical correction terms and two rigorous brackets.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{BinomialModel, IntegerInterval};
use crate::rational::{self, Rational};
use crate::special::{normal_interval, normal_sf, normal_two_sided};

/// The range `t1 sqrt(npq) <= x - np <= t2 sqrt(npq)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardizedRange {
    t1: f64,
    t2: f64,
}

impl StandardizedRange {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 < t2) {
            return Err(Error::domain(format!("need t1 < t2, got t1={t1}, t2={t2}")));
        }
        Ok(StandardizedRange { t1, t2 })
    }

    pub fn symmetric(t: f64) -> Result<Self> {
        Self::new(-t, t)
    }

    /// Range for `|X - np| <= half_width` (in counts, not standard units).
    pub fn around_mean(model: &BinomialModel, half_width: f64) -> Result<Self> {
        Self::symmetric(half_width / model.sd())
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketResult {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub omega_bound: f64,
}

impl BracketResult {
    fn around(center: f64, half_width: f64) -> Self {
        BracketResult {
            center,
            lo: center - half_width,
            hi: center + half_width,
            omega_bound: half_width,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `Phi(t2) - Phi(t1)`.
pub fn demoivre_clt(range: &StandardizedRange) -> f64 {
    normal_interval(range.t1, range.t2)
}

/// `(2 Phi(t) - 1) + e^{-t^2/2} / sqrt(2 pi npq)`.
pub fn laplace_corrected(model: &BinomialModel, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    Ok(normal_two_sided(t) + laplace_correction(model, t))
}

pub fn laplace_correction(model: &BinomialModel, t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI * model.variance()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewTail {
    /// `(1/sqrt pi) int_z^inf e^{-u^2} du`
    pub plain: f64,
    pub correction: f64,
    pub value: f64,
}

/// Approximation to `P(X > np + z sqrt(2npq))` with the skewness term
/// `(1 - 2z^2)(p - q) e^{-z^2} / (6 sqrt(2 pi npq))`.
pub fn skew_corrected_tail_1914(model: &BinomialModel, z: f64) -> Result<SkewTail> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("z must be positive, got {z}")));
    }
    let plain = normal_sf(z * std::f64::consts::SQRT_2);
    let p_minus_q = rational::to_f64(&(model.p() - model.q()));
    let correction =
        (1.0 - 2.0 * z * z) * p_minus_q * (-z * z).exp() / (6.0 * (2.0 * PI * model.variance()).sqrt());
    Ok(SkewTail {
        plain,
        correction,
        value: plain + correction,
    })
}

/// Fractional part of `base + shift`, with `shift` snapped to an integer
/// when it is one up to rounding.
fn frac_of_sum(base: &Rational, shift: f64) -> f64 {
    let nearest = shift.round();
    let shift = if (shift - nearest).abs() <= 1e-9 * shift.abs().max(1.0) {
        nearest
    } else {
        shift
    };
    let v = rational::to_f64(&rational::frac(base)) + shift;
    let f = v - v.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

pub const USPENSKY_MIN_NPQ: f64 = 25.0;

/// Corrected normal value and certified enclosure of
/// `P(t1 s <= X - np <= t2 s)`, `s = sqrt(npq)`, valid for `npq >= 25`.
pub fn uspensky_bracket(model: &BinomialModel, range: &StandardizedRange) -> Result<BracketResult> {
    let npq = model.variance();
    if npq < USPENSKY_MIN_NPQ {
        return Err(Error::precondition(format!("npq = {npq} is below {USPENSKY_MIN_NPQ}")));
    }
    let (t1, t2) = (range.t1, range.t2);
    let s = npq.sqrt();
    let (p, q) = (model.p_f64(), model.q_f64());
    let root = (2.0 * PI * npq).sqrt();

    let np = model.mean();
    // theta2 is the overshoot of the upper limit past the last lattice point;
    // theta1 the shortfall of the lower limit below the first one
    let theta2 = frac_of_sum(&np, t2 * s);
    let theta1 = frac_of_sum(&(-np), -(t1 * s));

    let (e1, e2) = ((-0.5 * t1 * t1).exp(), (-0.5 * t2 * t2).exp());
    let continuity = ((0.5 - theta1) * e1 + (0.5 - theta2) * e2) / root;
    let skew = (q - p) * ((1.0 - t2 * t2) * e2 - (1.0 - t1 * t1) * e1) / (6.0 * root);
    let center = normal_interval(t1, t2) + continuity + skew;
    let omega = (0.20 + 0.25 * (p - q).abs()) / npq + (-1.5 * s).exp();
    Ok(BracketResult::around(center, omega))
}

pub const BERNSTEIN_1924_MIN_NPQ: f64 = 365.0;

/// Normal value `2 Phi(t) - 1` with half-width `2 e^{-(2npq)^{1/3}}` for the
/// shifted event of [`bernstein_1924_event`].
pub fn bernstein_1924_bracket(model: &BinomialModel, t: f64) -> Result<BracketResult> {
    let npq = model.variance();
    if npq < BERNSTEIN_1924_MIN_NPQ {
        return Err(Error::precondition(format!(
            "npq = {npq} is below {BERNSTEIN_1924_MIN_NPQ}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if t * t > 16.0 * npq {
        return Err(Error::precondition(format!("t^2 = {} exceeds 16 npq = {}", t * t, 16.0 * npq)));
    }
    let half_width = 2.0 * (-(2.0 * npq).cbrt()).exp();
    Ok(BracketResult::around(normal_two_sided(t), half_width))
}

/// Lattice points with `|x - np - (t^2/6)(q - p)| < t sqrt(npq) + alpha`.
pub fn bernstein_1924_event(model: &BinomialModel, t: f64, alpha: f64) -> Option<IntegerInterval> {
    let q_minus_p = rational::to_f64(&(model.q() - model.p()));
    let center = model.mean_f64() + t * t / 6.0 * q_minus_p;
    let reach = t * model.sd() + alpha;
    let lo = ((center - reach).floor() as i64 + 1).max(0);
    let hi = ((center + reach).ceil() as i64 - 1).min(model.n() as i64);
    IntegerInterval::new(lo, hi).ok()
}

/// `e^{-(m - np)^2 / (2npq)} / sqrt(2 pi npq)`.
pub fn local_normal_pmf(model: &BinomialModel, m: i64) -> Result<f64> {
    if m < 0 || m > model.n() as i64 {
        return Err(Error::domain(format!("m = {m} outside [0, {}]", model.n())));
    }
    let npq = model.variance();
    let d = m as f64 - model.mean_f64();
    Ok((-d * d / (2.0 * npq)).exp() / (2.0 * PI * npq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{interval_prob, pmf, upper_tail};

    fn model(n: u64, p: &str) -> BinomialModel {
        BinomialModel::parse(n, p).unwrap()
    }

    #[test]
    fn demoivre_identities() {
        let r = StandardizedRange::symmetric(1.96).unwrap();
        assert!((demoivre_clt(&r) - 0.9500042097035591).abs() < 1e-15);
        assert!(StandardizedRange::new(1.0, 1.0).is_err());
        let thin = StandardizedRange::new(0.3, 0.3 + 1e-12).unwrap();
        assert!(demoivre_clt(&thin) < 1e-12);
    }

    #[test]
    fn nicolaus_case() {
        let m = model(14000, "18/35");
        let r = StandardizedRange::around_mean(&m, 163.0).unwrap();
        let exact = 0.9943058428;
        assert!((demoivre_clt(&r) - exact).abs() < 3e-4);
        let corrected = laplace_corrected(&m, r.t2()).unwrap();
        assert!((0.9942..=0.9946).contains(&corrected), "{corrected}");
    }

    #[test]
    fn laplace_correction_at_origin() {
        let m = model(400, "1/2");
        assert!((laplace_correction(&m, 0.0) - 1.0 / (2.0 * PI * 100.0).sqrt()).abs() < 1e-16);
        assert!(laplace_corrected(&m, 0.0).is_err());
    }

    #[test]
    fn laplace_beats_plain_on_lattice() {
        let m = model(400, "1/2");
        // t sqrt(npq) = 15, np = 200
        let t = 1.5;
        let exact = interval_prob(&m, IntegerInterval::new(185, 215).unwrap()).unwrap();
        let plain = normal_two_sided(t);
        let corrected = laplace_corrected(&m, t).unwrap();
        assert!((corrected - exact).abs() < (plain - exact).abs());
    }

    #[test]
    fn skew_term_structure() {
        let half = skew_corrected_tail_1914(&model(500, "1/2"), 1.2).unwrap();
        assert_eq!(half.correction, 0.0);
        assert_eq!(half.value, half.plain);
        let a = skew_corrected_tail_1914(&model(500, "0.3"), 1.2).unwrap();
        let b = skew_corrected_tail_1914(&model(500, "0.7"), 1.2).unwrap();
        assert_eq!(a.correction, -b.correction);
        assert!(skew_corrected_tail_1914(&model(500, "0.3"), 0.0).is_err());
    }

    #[test]
    fn skew_term_helps_at_the_flagship_cutoff() {
        // P(X > 0.62 n) with n = 6520, p = 0.6: z sqrt(2npq) = 0.02 n
        let m = model(6520, "0.6");
        let z = 0.02 * 6520.0 / (2.0 * m.variance()).sqrt();
        let tail = skew_corrected_tail_1914(&m, z).unwrap();
        let exact = upper_tail(&m, 4043);
        assert!((tail.value - exact).abs() < (tail.plain - exact).abs());
    }

    #[test]
    fn uspensky_flagship() {
        let m = model(6520, "0.6");
        let r = StandardizedRange::around_mean(&m, 0.02 * 6520.0).unwrap();
        let b = uspensky_bracket(&m, &r).unwrap();
        assert!(b.contains(0.9990309), "{b:?}");
        assert!(b.omega_bound <= 1.6e-4 && b.omega_bound > 1.597e-4);
    }

    #[test]
    fn uspensky_reduces_to_laplace_on_lattice() {
        let m = model(400, "1/2");
        let t = 1.5;
        let b = uspensky_bracket(&m, &StandardizedRange::symmetric(t).unwrap()).unwrap();
        let laplace = laplace_corrected(&m, t).unwrap();
        assert!((b.center - laplace).abs() < 1e-15);
    }

    #[test]
    fn uspensky_precondition() {
        let r = StandardizedRange::symmetric(1.0).unwrap();
        // npq = 24.75 and 25
        assert!(matches!(uspensky_bracket(&model(99, "1/2"), &r), Err(Error::Precondition(_))));
        assert!(uspensky_bracket(&model(100, "1/2"), &r).is_ok());
    }

    #[test]
    fn bernstein_1924_width_and_shift() {
        let m = model(6520, "0.6");
        let b = bernstein_1924_bracket(&m, 3.0).unwrap();
        assert!((b.omega_bound - 8.8e-7).abs() < 0.1e-7, "{}", b.omega_bound);
        let sym = model(3000, "1/2");
        let iv = bernstein_1924_event(&sym, 2.0, 0.0).unwrap();
        assert_eq!(iv.lo + iv.hi, 3000);
        assert!(matches!(bernstein_1924_bracket(&model(1000, "1/2"), 1.0), Err(Error::Precondition(_))));
        assert!(matches!(bernstein_1924_bracket(&m, 200.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn local_pmf_accuracy() {
        let m = model(1000, "1/2");
        assert_eq!(local_normal_pmf(&m, 500).unwrap(), 1.0 / (2.0 * PI * 250.0).sqrt());
        assert_eq!(local_normal_pmf(&m, 510).unwrap(), local_normal_pmf(&m, 490).unwrap());
        for x in 485..=515 {
            let exact = pmf(&m, x).unwrap();
            let rel = (local_normal_pmf(&m, x).unwrap() / exact - 1.0).abs();
            assert!(rel < 0.02, "x={x} rel={rel}");
        }
        assert!(local_normal_pmf(&m, 1001).is_err());
    }
}
