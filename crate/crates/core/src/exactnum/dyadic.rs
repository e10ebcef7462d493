use super::{BigInt, BigRational, ExactError};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational `num / 2^exp` kept in canonical form: either `exp == 0`
/// or `num` is odd. Zero is always `0/2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    /// Builds the canonical dyadic equal to `num / 2^exp`. A negative `exp`
    /// scales the numerator up instead.
    pub fn new(num: impl Into<BigInt>, exp: i64) -> Self {
        let num = num.into();
        if exp < 0 {
            return Self::canonical(num << exp.unsigned_abs(), 0);
        }
        Self::canonical(num, exp as u64)
    }

    fn canonical(num: BigInt, exp: u64) -> Self {
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        let shift = num.trailing_zeros().unwrap_or(0).min(exp);
        if shift == 0 {
            Dyadic { num, exp }
        } else {
            Dyadic {
                num: num >> shift,
                exp: exp - shift,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic {
            num: n.into(),
            exp: 0,
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// Multiply by `2^k` (or divide, for negative `k`).
    pub fn shl(&self, k: i64) -> Self {
        Self::new(self.num.clone(), self.exp as i64 - k)
    }

    /// The integer `self * 2^k`, or `None` if it is not an integer.
    pub fn scaled_integer(&self, k: u64) -> Option<BigInt> {
        if k >= self.exp {
            Some(&self.num << (k - self.exp))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    /// Exact division; fails when the quotient is not dyadic.
    pub fn checked_div(&self, rhs: &Dyadic) -> Result<Dyadic, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // rhs = odd * 2^t / 2^exp, so self/rhs = (num/odd) * 2^(rhs.exp) / 2^(self.exp + t).
        let t = rhs.num.trailing_zeros().unwrap_or(0);
        let odd = &rhs.num >> t;
        let (quot, rem) = self.num.div_rem(&odd);
        if !rem.is_zero() {
            return Err(ExactError::NotDyadic(format!("{self} / {rhs}")));
        }
        let exp = self.exp as i64 + t as i64 - rhs.exp as i64;
        Ok(Dyadic::new(quot, exp))
    }

    /// Exact division by an integer; fails when the quotient is not dyadic.
    pub fn checked_div_int(&self, rhs: impl Into<BigInt>) -> Result<Dyadic, ExactError> {
        self.checked_div(&Dyadic::from_int(rhs))
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Dyadic {
        Dyadic::new(&self.num * k.into(), self.exp as i64)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<BigInt> for Dyadic {
    fn from(n: BigInt) -> Self {
        Dyadic::from_int(n)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Less => (&self.num << (other.exp - self.exp)).cmp(&other.num),
            Ordering::Greater => self.num.cmp(&(&other.num << (self.exp - other.exp))),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn aligned_sum(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    let exp = a.exp.max(b.exp);
    let lhs = &a.num << (exp - a.exp);
    let rhs = &b.num << (exp - b.exp);
    let num = if negate_b { lhs - rhs } else { lhs + rhs };
    Dyadic::canonical(num, exp)
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        aligned_sum(self, rhs, false)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        aligned_sum(self, rhs, true)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        Dyadic::canonical(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$method(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -self.clone()
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts exactly `<num>/2^<exp>` with canonical fields.
impl FromStr for Dyadic {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, exp) = s
            .split_once("/2^")
            .ok_or_else(|| ExactError::parse(s, "expected <num>/2^<exp>"))?;
        if exp.is_empty() || !exp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ExactError::parse(s, "exponent must be a nonnegative integer"));
        }
        let body = num.strip_prefix('-').unwrap_or(num);
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ExactError::parse(s, "numerator must be an integer"));
        }
        let num: BigInt = num
            .parse()
            .map_err(|_| ExactError::parse(s, "numerator must be an integer"))?;
        let exp: u64 = exp
            .parse()
            .map_err(|_| ExactError::parse(s, "exponent out of range"))?;
        let value = Dyadic::canonical(num.clone(), exp);
        if value.num != num || value.exp != exp {
            return Err(ExactError::parse(s, "not in canonical form"));
        }
        Ok(value)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
