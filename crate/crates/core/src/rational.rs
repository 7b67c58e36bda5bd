//! Exact rational parameters.
//!
//! Success probabilities and deviation widths are kept as exact fractions so
//! that lattice endpoints such as `floor(n (p + eps))` never suffer from
//! binary rounding (`18/35` and `0.02` are both exact here).

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Parses `"num/den"`, a plain decimal (`"0.6"`, `"-1.25"`) or a decimal with
/// exponent (`"2e-2"`) into an exact fraction.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: i128 = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(num, den));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: i128 = all.trim_start_matches('0').parse().unwrap_or(0);
    if all.trim_start_matches('0').len() > 36 {
        return Err(Error::Parse(format!("too many digits: {s:?}")));
    }
    let scale = exponent - frac_part.len() as i32;
    if negative {
        num = -num;
    }
    let pow10 = |k: u32| -> Result<i128> {
        10i128
            .checked_pow(k)
            .ok_or_else(|| Error::Parse(format!("exponent out of range: {s:?}")))
    };
    let value = if scale >= 0 {
        let factor = pow10(scale as u32)?;
        Ratio::from_integer(
            num.checked_mul(factor)
                .ok_or_else(|| Error::Parse(format!("value out of range: {s:?}")))?,
        )
    } else {
        Ratio::new(num, pow10((-scale) as u32)?)
    };
    Ok(value)
}

/// Converts a float to the exact fraction of its shortest round-trip decimal
/// representation, so `0.02_f64` becomes `1/50` rather than the binary value
/// nearest to it.
pub fn from_f64_decimal(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::domain(format!("non-finite value {x}")));
    }
    parse_decimal(&format!("{x:e}"))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer() as i64
}

pub fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer() as i64
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub(crate) fn is_probability_open(r: &Rational) -> bool {
    r.is_positive() && *r < Rational::one()
}

pub(crate) fn gcd_reduce(num: i128, den: i128) -> (i128, i128) {
    let g = num.gcd(&den);
    if g.is_zero() {
        (num, den)
    } else {
        (num / g, den / g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("18/35").unwrap(), Ratio::new(18, 35));
        assert_eq!(parse_rational("0.6").unwrap(), Ratio::new(3, 5));
        assert_eq!(parse_rational("2e-2").unwrap(), Ratio::new(1, 50));
        assert_eq!(parse_rational("-1.25").unwrap(), Ratio::new(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_rational("7").unwrap(), Ratio::from_integer(7));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.6x").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn float_goes_through_shortest_decimal() {
        assert_eq!(from_f64_decimal(0.02).unwrap(), Ratio::new(1, 50));
        assert_eq!(from_f64_decimal(0.1).unwrap(), Ratio::new(1, 10));
        assert_eq!(from_f64_decimal(1000.0).unwrap(), Ratio::from_integer(1000));
    }

    #[test]
    fn lattice_helpers() {
        let r = Ratio::new(40244, 10);
        assert_eq!(floor_i64(&r), 4024);
        assert_eq!(ceil_i64(&r), 4025);
        assert_eq!(frac(&r), Ratio::new(2, 5));
        assert_eq!(frac(&Ratio::new(-1, 4)), Ratio::new(3, 4));
        assert_eq!(gcd_reduce(6, 16), (3, 8));
    }
}
