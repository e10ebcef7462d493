//! Coefficient rows `d_0(m), ..., d_m(m)` of the quartic-integral
//! polynomials `P_m(a) = sum_i d_i(m) a^i`, and exact evaluation of `P_m`.
//!
//! Rows come from several independent routes (a binomial closed form,
//! three recurrences in `m`, an expansion of the double sum) so they can be
//! checked against one another. Recurrences use the convention
//! `d_{-1}(m) = d_{m+1}(m) = 0`; the two whose denominators vanish at the
//! top index take the top entry from `d_m(m) = 2^{-m} C(2m, m)`.

use crate::exactnum::{binomial, rational_to_f64, to_decimal, BigInt, BigRational, Dyadic, ExactError};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Recu1,
    Recu2,
    Recu3,
    DoubleSum,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ClosedForm,
        Method::Recu1,
        Method::Recu2,
        Method::Recu3,
        Method::DoubleSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Recu1 => "recu1",
            Method::Recu2 => "recu2",
            Method::Recu3 => "recu3",
            Method::DoubleSum => "double_sum",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("recurrence {method} produced a non-dyadic value at m = {m}, i = {i}")]
    NotDyadic { method: Method, m: usize, i: usize },
    #[error("rows are not consecutive: got m = {got}, expected m = {expected}")]
    NotConsecutive { got: usize, expected: usize },
    #[error("row for m = {m} has {len} entries, expected {}", m + 1)]
    BadLength { m: usize, len: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One coefficient sequence `d_0(m), ..., d_m(m)` together with the method
/// that produced it. Rows are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRow {
    m: usize,
    method: Method,
    coeffs: Vec<Dyadic>,
}

impl CoeffRow {
    pub fn new(m: usize, coeffs: Vec<Dyadic>, method: Method) -> Result<Self, CoeffError> {
        if coeffs.len() != m + 1 {
            return Err(CoeffError::BadLength {
                m,
                len: coeffs.len(),
            });
        }
        Ok(CoeffRow { m, method, coeffs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    /// `d_i(m)`, zero outside `0..=m`.
    pub fn get(&self, i: i64) -> Dyadic {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.coeffs.get(i).cloned())
            .unwrap_or_else(Dyadic::zero)
    }

    /// Same values under a different provenance label.
    pub fn relabel(&self, method: Method) -> CoeffRow {
        CoeffRow {
            method,
            ..self.clone()
        }
    }

    pub fn same_values(&self, other: &CoeffRow) -> bool {
        self.m == other.m && self.coeffs == other.coeffs
    }

    /// Structural invariants: every entry positive, `4^m d_i(m)` integral,
    /// and the top entry equal to `2^{-m} C(2m, m)`. Returns the violations.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, d) in self.coeffs.iter().enumerate() {
            if !d.is_positive() {
                out.push(format!("d_{i}({}) = {d} is not positive", self.m));
            }
            if d.exp() > 2 * self.m as u64 {
                out.push(format!("4^m d_{i}({}) = {d} * 4^m is not an integer", self.m));
            }
        }
        if self.coeffs.last() != Some(&top_entry(self.m)) {
            out.push(format!("d_m({}) differs from 2^-m C(2m, m)", self.m));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("row serializes")
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn binom(n: usize, k: usize) -> BigInt {
    binomial(n as i64, k as i64).expect("nonnegative row")
}

/// `d_m(m) = 2^{-m} C(2m, m)`.
pub fn top_entry(m: usize) -> Dyadic {
    Dyadic::new(binom(2 * m, m), m as i64)
}

/// `2^k C(2m-2k, m-k) C(m+k, k)` for `k = 0..=m`.
fn closed_form_weights(m: usize) -> Vec<BigInt> {
    (0..=m)
        .map(|k| (binom(2 * m - 2 * k, m - k) * binom(m + k, k)) << k)
        .collect()
}

/// `d_i(m) = 2^{-2m} sum_{k=i}^{m} 2^k C(2m-2k, m-k) C(m+k, k) C(k, i)`.
pub fn closed_form_entry(m: usize, i: usize) -> Dyadic {
    if i > m {
        return Dyadic::zero();
    }
    let sum: BigInt = (i..=m)
        .map(|k| (binom(2 * m - 2 * k, m - k) * binom(m + k, k) * binom(k, i)) << k)
        .sum();
    Dyadic::new(sum, 2 * m as i64)
}

pub fn closed_form_row(m: usize) -> CoeffRow {
    let weights = closed_form_weights(m);
    let coeffs = (0..=m)
        .map(|i| {
            let sum: BigInt = (i..=m).map(|k| &weights[k] * binom(k, i)).sum();
            Dyadic::new(sum, 2 * m as i64)
        })
        .collect();
    CoeffRow {
        m,
        method: Method::ClosedForm,
        coeffs,
    }
}

fn exact_step(num: Dyadic, den: i64, method: Method, m: usize, i: usize) -> Result<Dyadic, CoeffError> {
    num.checked_div_int(den)
        .map_err(|_| CoeffError::NotDyadic { method, m, i })
}

/// `d_i(m+1) = (m+i)/(m+1) d_{i-1}(m) + (4m+2i+3)/(2(m+1)) d_i(m)`, `0 <= i <= m+1`.
pub fn recu1_row(prev: &CoeffRow) -> Result<CoeffRow, CoeffError> {
    let m = prev.m as i64;
    let coeffs = (0..=m + 1)
        .map(|i| {
            let num = prev.get(i - 1).mul_int(2 * (m + i)) + prev.get(i).mul_int(4 * m + 2 * i + 3);
            exact_step(num, 2 * (m + 1), Method::Recu1, prev.m + 1, i as usize)
        })
        .collect::<Result<_, _>>()?;
    CoeffRow::new(prev.m + 1, coeffs, Method::Recu1)
}

/// `d_i(m+1) = ((4m-2i+3)(m+i+1) d_i(m) - 2i(i+1) d_{i+1}(m)) / (2(m+1)(m+1-i))`
/// for `0 <= i <= m`; the top entry comes from the central binomial.
pub fn recu2_row(prev: &CoeffRow) -> Result<CoeffRow, CoeffError> {
    let m = prev.m as i64;
    let mut coeffs = (0..=m)
        .map(|i| {
            let num = prev.get(i).mul_int((4 * m - 2 * i + 3) * (m + i + 1))
                - prev.get(i + 1).mul_int(2 * i * (i + 1));
            exact_step(num, 2 * (m + 1) * (m + 1 - i), Method::Recu2, prev.m + 1, i as usize)
        })
        .collect::<Result<Vec<_>, _>>()?;
    coeffs.push(top_entry(prev.m + 1));
    CoeffRow::new(prev.m + 1, coeffs, Method::Recu2)
}

/// Three-term recurrence in `m`:
/// `d_i(m+2) = (-4i^2+8m^2+24m+19)/(2(m+2-i)(m+2)) d_i(m+1)
///            - (m+i+1)(4m+3)(4m+5)/(4(m+2-i)(m+1)(m+2)) d_i(m)` for `0 <= i <= m+1`.
pub fn recu3_row(prev2: &CoeffRow, prev1: &CoeffRow) -> Result<CoeffRow, CoeffError> {
    if prev1.m != prev2.m + 1 {
        return Err(CoeffError::NotConsecutive {
            got: prev1.m,
            expected: prev2.m + 1,
        });
    }
    let m = prev2.m as i64;
    let mut coeffs = (0..=m + 1)
        .map(|i| {
            let num = prev1.get(i).mul_int(2 * (m + 1) * (-4 * i * i + 8 * m * m + 24 * m + 19))
                - prev2.get(i).mul_int((m + i + 1) * (4 * m + 3) * (4 * m + 5));
            let den = 4 * (m + 2 - i) * (m + 1) * (m + 2);
            exact_step(num, den, Method::Recu3, prev2.m + 2, i as usize)
        })
        .collect::<Result<Vec<_>, _>>()?;
    coeffs.push(top_entry(prev2.m + 2));
    CoeffRow::new(prev2.m + 2, coeffs, Method::Recu3)
}

/// Left side of `(m+2-i)(m+i-1) d_{i-2} - (i-1)(2m+1) d_{i-1} + i(i-1) d_i`,
/// which vanishes on every genuine row for `0 <= i <= m+1`.
pub fn recu4_residual(row: &CoeffRow, i: i64) -> Dyadic {
    let m = row.m as i64;
    row.get(i - 2).mul_int((m + 2 - i) * (m + i - 1)) - row.get(i - 1).mul_int((i - 1) * (2 * m + 1))
        + row.get(i).mul_int(i * (i - 1))
}

/// Rows `0..=m_max` produced by a single method.
pub fn generate_rows(method: Method, m_max: usize) -> Result<Vec<CoeffRow>, CoeffError> {
    let mut rows: Vec<CoeffRow> = Vec::with_capacity(m_max + 1);
    let seed = |m: usize| closed_form_row(m).relabel(method);
    for m in 0..=m_max {
        let row = match method {
            Method::ClosedForm => closed_form_row(m),
            Method::DoubleSum => double_sum_row(m),
            Method::Recu1 if m > 0 => recu1_row(&rows[m - 1])?,
            Method::Recu2 if m > 0 => recu2_row(&rows[m - 1])?,
            Method::Recu3 if m > 1 => recu3_row(&rows[m - 2], &rows[m - 1])?,
            // Recurrence seeds: the m = 0 row (and m = 1 for the two-step one).
            Method::Recu1 | Method::Recu2 | Method::Recu3 => seed(m),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Row for a single `m` by the given method.
pub fn row_by(method: Method, m: usize) -> Result<CoeffRow, CoeffError> {
    match method {
        Method::ClosedForm => Ok(closed_form_row(m)),
        Method::DoubleSum => Ok(double_sum_row(m)),
        _ => Ok(generate_rows(method, m)?.pop().expect("nonempty")),
    }
}

/// Weights `C(2m+1, 2j) C(m-j, k) C(2k+2j, k+j)` of the double sum.
fn double_sum_weight(m: usize, j: usize, k: usize) -> BigInt {
    binom(2 * m + 1, 2 * j) * binom(m - j, k) * binom(2 * k + 2 * j, k + j)
}

/// `P_m(a) = sum_{j,k} C(2m+1,2j) C(m-j,k) C(2k+2j,k+j) (a+1)^j (a-1)^k / 2^{3(k+j)}`.
pub fn double_sum_eval(m: usize, a: &BigRational) -> BigRational {
    let plus = a + BigRational::one();
    let minus = a - BigRational::one();
    let mut acc = BigRational::zero();
    let mut plus_pow = BigRational::one();
    for j in 0..=m {
        let mut minus_pow = BigRational::one();
        for k in 0..=m - j {
            let w = BigRational::new(double_sum_weight(m, j, k), BigInt::one() << (3 * (k + j)));
            acc += w * &plus_pow * &minus_pow;
            minus_pow *= &minus;
        }
        plus_pow *= &plus;
    }
    acc
}

/// Coefficients of the double sum expanded as a polynomial in `a`.
pub fn double_sum_row(m: usize) -> CoeffRow {
    let scale = 3 * m;
    // Integer coefficients of 2^{3m} P_m(a).
    let mut coeffs = vec![BigInt::zero(); m + 1];
    for j in 0..=m {
        // inner(a) = sum_k w_{jk} 2^{3(m-j-k)} (a-1)^k
        let mut inner = vec![BigInt::zero(); m - j + 1];
        for k in 0..=m - j {
            let w = double_sum_weight(m, j, k) << (scale - 3 * (k + j));
            for (q, slot) in inner.iter_mut().enumerate().take(k + 1) {
                let term = &w * binom(k, q);
                if (k - q) % 2 == 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
            }
        }
        // multiply by (a+1)^j
        for (q, c) in inner.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for p in 0..=j {
                coeffs[p + q] += c * binom(j, p);
            }
        }
    }
    CoeffRow {
        m,
        method: Method::DoubleSum,
        coeffs: coeffs
            .into_iter()
            .map(|c| Dyadic::new(c, scale as i64))
            .collect(),
    }
}

/// `P_m(a) = 2^{-2m} C(2m, m) 2F1(-m, m+1; 1/2-m; (a+1)/2)`, summed with
/// term ratios `t_{k+1}/t_k = 2(k-m)(m+1+k) z / ((1-2m+2k)(k+1))`.
pub fn hypergeometric_eval(m: usize, a: &BigRational) -> BigRational {
    let z = (a + BigRational::one()) / big(2);
    let mi = m as i64;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 0..mi {
        let ratio = BigRational::new(big(2 * (k - mi) * (mi + 1 + k)), big((1 - 2 * mi + 2 * k) * (k + 1)));
        term = term * ratio * &z;
        sum += &term;
    }
    sum * BigRational::new(binom(2 * m, m), BigInt::one() << (2 * m))
}

/// Horner evaluation of `sum_i d_i(m) a^i`.
pub fn eval_poly(row: &CoeffRow, a: &BigRational) -> BigRational {
    row.coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, d| acc * a + d.to_rational())
}

/// CSV rendering with columns `m,i,dyadic,decimal`; the decimal column is
/// informational (20 significant digits).
pub fn rows_to_csv(rows: &[CoeffRow]) -> String {
    let mut out = String::from("m,i,dyadic,decimal\n");
    for row in rows {
        for (i, d) in row.coeffs.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.m,
                i,
                d,
                to_decimal(&d.to_rational(), 20)
            ));
        }
    }
    out
}

/// Approximate value of `P_m(a)` in binary64, rounded from the exact value.
pub fn eval_f64(m: usize, a: &BigRational) -> f64 {
    rational_to_f64(&eval_poly(&closed_form_row(m), a))
}
