use crate::exactnum::{BigInt, BigRational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Commutative ring values the identity formulas can be evaluated in:
/// symbolically ([`MultiPoly`]) or at a point ([`BigInt`], [`BigRational`]).
pub trait Ring:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: i64) -> Self;

    fn from_big(c: &BigInt) -> Self {
        // Base-2^31 limbs, so only `constant` is needed.
        let base = BigInt::from(1i64 << 31);
        let mut mag = c.abs();
        let mut limbs = Vec::new();
        while !mag.is_zero() {
            limbs.push(i64::try_from(&mag % &base).expect("limb fits"));
            mag /= &base;
        }
        let mut acc = Self::constant(0);
        for d in limbs.into_iter().rev() {
            acc = acc * Self::constant(1i64 << 31) + Self::constant(d);
        }
        if c.is_negative() {
            -acc
        } else {
            acc
        }
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Ring for BigInt {
    fn constant(c: i64) -> Self {
        BigInt::from(c)
    }
    fn from_big(c: &BigInt) -> Self {
        c.clone()
    }
}

impl Ring for BigRational {
    fn constant(c: i64) -> Self {
        BigRational::from_integer(BigInt::from(c))
    }
    fn from_big(c: &BigInt) -> Self {
        BigRational::from_integer(c.clone())
    }
}

impl Ring for i128 {
    fn constant(c: i64) -> Self {
        c as i128
    }
}

/// Exponents `(deg_x, deg_y)` of a monomial `x^a y^b`.
pub type Exponents = (u32, u32);

/// Sparse polynomial in two variables over the integers. The variables are
/// `n, i` by default; identities stated in `m, j` reuse the same slots.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Exponents, BigInt>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant_big(c: BigInt) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(BigInt::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(BigInt::one(), 0, 1)
    }

    pub fn monomial(coef: BigInt, ex: u32, ey: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((ex, ey), coef);
        p
    }

    /// Builds `sum coef * x^ex * y^ey` from `(coef, ex, ey)` triples.
    pub fn from_terms(terms: &[(i64, u32, u32)]) -> Self {
        let mut p = Self::zero();
        for &(c, ex, ey) in terms {
            p.add_term((ex, ey), BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, key: Exponents, coef: BigInt) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &BigInt)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, ex: u32, ey: u32) -> BigInt {
        self.terms.get(&(ex, ey)).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    /// Value at an integer point.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        self.eval_in(x, y)
    }

    /// Value in any ring, e.g. rationals or another polynomial.
    pub fn eval_in<R: Ring>(&self, x: &R, y: &R) -> R {
        let mut acc = R::constant(0);
        for (&(ex, ey), c) in &self.terms {
            acc = acc + R::from_big(c) * x.pow(ex) * y.pow(ey);
        }
        acc
    }

    /// Renders with custom variable names, highest total degree first.
    pub fn display_with(&self, vars: [&str; 2]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.cmp(a)));
        let mut out = String::new();
        for (idx, key) in keys.iter().enumerate() {
            let c = &self.terms[key];
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if !mag.is_one() || (key.0 == 0 && key.1 == 0) {
                factors.push(mag.to_string());
            }
            for (name, e) in [(vars[0], key.0), (vars[1], key.1)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl Ring for MultiPoly {
    fn constant(c: i64) -> Self {
        Self::constant_big(BigInt::from(c))
    }
    fn from_big(c: &BigInt) -> Self {
        Self::constant_big(c.clone())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(["n", "i"]))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(mut self) -> MultiPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n() -> MultiPoly {
        MultiPoly::x()
    }
    fn i() -> MultiPoly {
        MultiPoly::y()
    }
    fn c(k: i64) -> MultiPoly {
        MultiPoly::constant(k)
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!((n() + i()) * (n() - i()), n() * n() - i() * i());
        let p = n() * c(3) - i();
        assert!((p.clone() - p).is_zero());
        let q = (c(4) * n() + c(3)) * (c(4) * n() + c(5));
        assert_eq!(q, MultiPoly::from_terms(&[(16, 2, 0), (32, 1, 0), (15, 0, 0)]));
        assert_eq!(q.to_string(), "16*n^2 + 32*n + 15");
        assert_eq!((c(-1) * n() * i().pow(3)).display_with(["m", "j"]), "-m*j^3");
        assert_eq!(MultiPoly::zero().to_string(), "0");
    }

    #[test]
    fn no_zero_coefficients_stored() {
        let p = MultiPoly::from_terms(&[(3, 1, 1), (-3, 1, 1), (2, 0, 0)]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(1, 1), BigInt::zero());
        assert_eq!(p.total_degree(), Some(0));
    }

    #[test]
    fn evaluation_in_other_rings() {
        let p = MultiPoly::from_terms(&[(5, 2, 1), (-7, 0, 0), (3_000_000_000_000, 1, 0)]);
        let (x, y) = (BigInt::from(3), BigInt::from(-2));
        let direct = p.eval(&x, &y);
        assert_eq!(direct, BigInt::from(5 * 9 * -2 - 7 + 3_000_000_000_000i64 * 3));
        assert_eq!(p.eval_in(&3i128, &-2i128), 5 * 9 * -2 - 7 + 9_000_000_000_000);
        // Substituting polynomials composes.
        let shifted = p.eval_in(&(n() + c(1)), &i());
        assert_eq!(shifted.eval(&BigInt::from(2), &y), direct);
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((-20i64..20, 0u32..4, 0u32..4), 0..6)
            .prop_map(|t| MultiPoly::from_terms(&t))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn eval_is_a_homomorphism(a in arb_poly(), b in arb_poly(), x in -9i64..9, y in -9i64..9) {
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            prop_assert_eq!((&a * &b).eval(&x, &y), a.eval(&x, &y) * b.eval(&x, &y));
            prop_assert_eq!((&a - &b).eval(&x, &y), a.eval(&x, &y) - b.eval(&x, &y));
        }
    }
}
