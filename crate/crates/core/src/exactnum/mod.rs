//! Exact number types shared by every other module.
//!
//! Coefficients of the quartic-integral polynomials all have power-of-two
//! denominators, so they live in [`Dyadic`]. Anything that may leave that ring
//! (hypergeometric terms, rational bounds) uses [`BigRational`].

mod binomial;
mod decimal;
mod dyadic;

pub use binomial::{binomial, BinomialCache, BINOMIAL_CACHE_ENV};
pub use decimal::{rational_to_f64, to_decimal};
pub use dyadic::Dyadic;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("not dyadic: {0}")]
    NotDyadic(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("binomial row must be nonnegative, got n = {0}")]
    NegativeBinomialRow(i64),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl ExactError {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        ExactError::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

/// Ordered exact field-like values that sequence predicates and the
/// L-operator can work over.
pub trait Exact: Clone + Ord + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn is_positive(&self) -> bool;
    fn mul_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn to_rational(&self) -> BigRational;
    /// Size measure used for growth budgets: bit length of the numerator.
    fn numer_bits(&self) -> u64;
}

impl Exact for Dyadic {
    fn zero() -> Self {
        Dyadic::zero()
    }
    fn is_positive(&self) -> bool {
        self.numer().is_positive()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn to_rational(&self) -> BigRational {
        Dyadic::to_rational(self)
    }
    fn numer_bits(&self) -> u64 {
        self.numer().bits()
    }
}

impl Exact for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn numer_bits(&self) -> u64 {
        self.numer().bits()
    }
}

/// Canonical text form of a rational: `p` for integers, `p/q` otherwise.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse an exact rational from `p`, `p/q`, `p/2^e`, or a finite decimal
/// such as `-0.9` or `2.5e-3`. Decimals are read exactly, never through
/// binary floating point.
pub fn parse_rational(input: &str) -> Result<BigRational, ExactError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ExactError::parse(input, "empty"));
    }
    if s.contains("/2^") {
        return Ok(s.parse::<Dyadic>()?.to_rational());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| ExactError::parse(input, "bad numerator"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| ExactError::parse(input, "bad denominator"))?;
        if q.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| ExactError::parse(input, "not a rational or decimal"))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut numer: BigInt = joined.parse().ok()?;
    if neg {
        numer = -numer;
    }
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// `true` when `r` has a power-of-two denominator.
pub fn is_dyadic_rational(r: &BigRational) -> bool {
    let d = r.denom();
    d.is_positive() && (d & (d - BigInt::one())).is_zero()
}

/// Converts a rational with power-of-two denominator into a [`Dyadic`].
pub fn dyadic_from_rational(r: &BigRational) -> Result<Dyadic, ExactError> {
    if !is_dyadic_rational(r) {
        return Err(ExactError::NotDyadic(rational_to_string(r)));
    }
    let exp = r.denom().trailing_zeros().unwrap_or(0);
    Ok(Dyadic::new(r.numer().clone(), exp as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn parses_every_accepted_form() {
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("6435/2^7").unwrap(), q(6435, 128));
        assert_eq!(parse_rational("-0.9").unwrap(), q(-9, 10));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("2.5e-3").unwrap(), q(1, 400));
        assert_eq!(parse_rational("1e2").unwrap(), q(100, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn dyadic_detection() {
        assert!(is_dyadic_rational(&q(3, 8)));
        assert!(is_dyadic_rational(&q(5, 1)));
        assert!(!is_dyadic_rational(&q(1, 3)));
        assert_eq!(
            dyadic_from_rational(&q(21, 8)).unwrap().to_string(),
            "21/2^3"
        );
        assert!(matches!(
            dyadic_from_rational(&q(1, 6)),
            Err(ExactError::NotDyadic(_))
        ));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_to_string(&q(601, 102)), "601/102");
        assert_eq!(rational_to_string(&q(-4, 2)), "-2");
    }
}
