//! Every inequality of the ratio-monotonicity argument, checked at a concrete
//! `m` with exact arithmetic. Each check returns one record per index with
//! both sides, the relation, and the exact slack.
//!
//! Index ranges follow the statements literally; "for `0 <= i <= m/2`" means
//! `i <= floor(m/2)`.

use crate::bmcoeff::{closed_form_row, CoeffRow};
use crate::exactnum::{binomial, rational_to_string, to_decimal, BigInt, BigRational};
use crate::polyident::{a_poly, b_den, c_poly, d_poly, m_poly, n_poly};
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    Thm21,
    Thm22,
    L31,
    L32,
    L33,
    L34,
    Sec4,
}

impl BoundId {
    pub const ALL: [BoundId; 7] = [
        BoundId::Thm21,
        BoundId::Thm22,
        BoundId::L31,
        BoundId::L32,
        BoundId::L33,
        BoundId::L34,
        BoundId::Sec4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::Thm21 => "thm21",
            BoundId::Thm22 => "thm22",
            BoundId::L31 => "l31",
            BoundId::L32 => "l32",
            BoundId::L33 => "l33",
            BoundId::L34 => "l34",
            BoundId::Sec4 => "sec4",
        }
    }

    /// Smallest `m` the statement covers.
    pub fn min_m(self) -> usize {
        match self {
            BoundId::Thm21 | BoundId::L34 => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, BoundError> {
        let key = s.trim().to_ascii_lowercase();
        BoundId::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or(BoundError::UnknownBound(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("{bound} requires m >= {min}, got m = {m}")]
    Precondition { bound: BoundId, m: usize, min: usize },
    #[error("B(m, i) needs 0 <= i <= m, got m = {m}, i = {i}")]
    OutOfRange { m: i64, i: i64 },
    #[error("expected a row for m = {expected}, got m = {got}")]
    WrongRow { expected: usize, got: usize },
    #[error("unknown bound {0:?}; expected one of thm21, thm22, l31, l32, l33, l34, sec4")]
    UnknownBound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(r))
}

fn ser_opt_rat<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rat(r, s),
        None => s.serialize_none(),
    }
}

/// `lhs <relation> rhs` at one index. `margin` is oriented so that the
/// relation holds exactly when it is positive (strict), nonnegative
/// (non-strict), or zero (equality).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRecord {
    pub label: String,
    pub i: i64,
    pub relation: Relation,
    #[serde(serialize_with = "ser_rat")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub rhs: BigRational,
    pub holds: bool,
    #[serde(serialize_with = "ser_rat")]
    pub margin: BigRational,
}

impl BoundRecord {
    pub fn new(label: &str, i: i64, lhs: BigRational, relation: Relation, rhs: BigRational) -> Self {
        let margin = match relation {
            Relation::Lt | Relation::Le => &rhs - &lhs,
            Relation::Gt | Relation::Ge | Relation::Eq => &lhs - &rhs,
        };
        let holds = match relation {
            Relation::Lt | Relation::Gt => margin.is_positive(),
            Relation::Le | Relation::Ge => !margin.is_negative(),
            Relation::Eq => margin.is_zero(),
        };
        BoundRecord {
            label: label.to_string(),
            i,
            relation,
            lhs,
            rhs,
            holds,
            margin,
        }
    }

    /// Smaller side over larger side, for inequalities between positive
    /// quantities; `1` means the bound is attained.
    pub fn tightness(&self) -> Option<BigRational> {
        if !self.lhs.is_positive() || !self.rhs.is_positive() {
            return None;
        }
        match self.relation {
            Relation::Lt | Relation::Le => Some(&self.lhs / &self.rhs),
            Relation::Gt | Relation::Ge => Some(&self.rhs / &self.lhs),
            Relation::Eq => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundSummary {
    pub all_hold: bool,
    #[serde(serialize_with = "ser_opt_rat")]
    pub min_ratio: Option<BigRational>,
    pub min_ratio_decimal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub bound: BoundId,
    pub records: Vec<BoundRecord>,
    pub summary: BoundSummary,
}

impl BoundReport {
    fn new(bound: BoundId, m: usize, records: Vec<BoundRecord>) -> Self {
        let min_ratio = records.iter().filter_map(BoundRecord::tightness).min();
        let summary = BoundSummary {
            all_hold: records.iter().all(|r| r.holds),
            min_ratio_decimal: min_ratio.as_ref().map(|r| to_decimal(r, 20)),
            min_ratio,
        };
        BoundReport {
            m,
            bound,
            records,
            summary,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.summary.all_hold
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundRecord> {
        self.records.iter().filter(|r| !r.holds)
    }

    /// Records with the given label.
    pub fn labelled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a BoundRecord> + 'a {
        self.records.iter().filter(move |r| r.label == label)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn d(row: &CoeffRow, i: i64) -> BigRational {
    row.get(i).to_rational()
}

fn require(bound: BoundId, m: usize) -> Result<(), BoundError> {
    if m < bound.min_m() {
        Err(BoundError::Precondition {
            bound,
            m,
            min: bound.min_m(),
        })
    } else {
        Ok(())
    }
}

fn expect_row(row: &CoeffRow, m: usize) -> Result<(), BoundError> {
    if row.m() == m {
        Ok(())
    } else {
        Err(BoundError::WrongRow {
            expected: m,
            got: row.m(),
        })
    }
}

/// `B(m,i) = A(m,i) / (2(i+2)(4m+2i+5)(m+1)(m-i+1))`.
pub fn b_bound(m: i64, i: i64) -> Result<BigRational, BoundError> {
    if i < 0 || i > m {
        return Err(BoundError::OutOfRange { m, i });
    }
    let (mb, ib) = (BigInt::from(m), BigInt::from(i));
    Ok(BigRational::new(a_poly(&mb, &ib), b_den(&mb, &ib)))
}

fn b_of(m: i64, i: i64) -> BigRational {
    b_bound(m, i).expect("index in range")
}

/// `(4m^2+7m+i+3) / (2(m+1-i)(m+1))`.
fn kp_factor(m: i64, i: i64) -> BigRational {
    frac(4 * m * m + 7 * m + i + 3, 2 * (m + 1 - i) * (m + 1))
}

/// `d_i(m+1) >= (4m^2+7m+i+3)/(2(m+1-i)(m+1)) d_i(m)` for `0 < i < m`.
/// The summary's `min_ratio` is the minimum of right over left.
pub fn check_thm21(m: usize, row: &CoeffRow, next: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::Thm21, m)?;
    expect_row(row, m)?;
    expect_row(next, m + 1)?;
    let mi = m as i64;
    let records = (1..mi)
        .map(|i| BoundRecord::new("lower_bound", i, d(next, i), Relation::Ge, kp_factor(mi, i) * d(row, i)))
        .collect();
    Ok(BoundReport::new(BoundId::Thm21, m, records))
}

/// The strict form on `1 <= i <= m-1`, plus the two boundary equalities and
/// the closed form of the top coefficient.
pub fn check_thm22(m: usize, row: &CoeffRow, next: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::Thm22, m)?;
    expect_row(row, m)?;
    expect_row(next, m + 1)?;
    let mi = m as i64;
    let mut records: Vec<BoundRecord> = (1..mi)
        .map(|i| BoundRecord::new("strict_lower_bound", i, d(next, i), Relation::Gt, kp_factor(mi, i) * d(row, i)))
        .collect();
    records.push(BoundRecord::new(
        "constant_term_step",
        0,
        d(next, 0),
        Relation::Eq,
        frac(4 * mi + 3, 2 * (mi + 1)) * d(row, 0),
    ));
    records.push(BoundRecord::new(
        "top_step",
        mi,
        d(next, mi),
        Relation::Eq,
        frac((2 * mi + 3) * (2 * mi + 1), 2 * (mi + 1)) * d(row, mi),
    ));
    let central = binomial(2 * mi, mi).expect("nonnegative row");
    records.push(BoundRecord::new(
        "top_closed_form",
        mi,
        d(row, mi),
        Relation::Eq,
        BigRational::new(central, BigInt::from(1) << m),
    ));
    Ok(BoundReport::new(BoundId::Thm22, m, records))
}

/// `(m-j)/(j+1) > d_{j+1}(m)/d_j(m)` for `1 <= j <= m-1`.
pub fn check_lemma31(m: usize, row: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::L31, m)?;
    expect_row(row, m)?;
    let mi = m as i64;
    let records = (1..mi)
        .map(|j| BoundRecord::new("ratio_bound", j, frac(mi - j, j + 1), Relation::Gt, d(row, j + 1) / d(row, j)))
        .collect();
    Ok(BoundReport::new(BoundId::L31, m, records))
}

/// `d_i(m+1) <= B(m,i) d_i(m)` for `0 <= i <= m`.
pub fn check_lemma32(m: usize, row: &CoeffRow, next: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::L32, m)?;
    expect_row(row, m)?;
    expect_row(next, m + 1)?;
    let mi = m as i64;
    let records = (0..=mi)
        .map(|i| BoundRecord::new("upper_bound", i, d(next, i), Relation::Le, b_of(mi, i) * d(row, i)))
        .collect();
    Ok(BoundReport::new(BoundId::L32, m, records))
}

/// `2(m+1)B(m,j) - (4m+2j+3)`.
fn b_excess(m: i64, j: i64) -> BigRational {
    q(2 * (m + 1)) * b_of(m, j) - q(4 * m + 2 * j + 3)
}

/// `d_{j-1}(m) <= (2(m+1)B(m,j) - (4m+2j+3)) / (2(m+j)) d_j(m)` for
/// `1 <= j <= m`, with the numerator's positivity recorded separately.
pub fn check_lemma33(m: usize, row: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::L33, m)?;
    expect_row(row, m)?;
    let mi = m as i64;
    let mut records = Vec::new();
    for j in 1..=mi {
        let excess = b_excess(mi, j);
        records.push(BoundRecord::new(
            "numerator_positive",
            j,
            excess.clone(),
            Relation::Gt,
            BigRational::zero(),
        ));
        records.push(BoundRecord::new(
            "predecessor_bound",
            j,
            d(row, j - 1),
            Relation::Le,
            excess / q(2 * (mi + j)) * d(row, j),
        ));
    }
    Ok(BoundReport::new(BoundId::L33, m, records))
}

/// `2(2m-i) / (2(m+1)B(m,m-i) - (6m-2i+3)) > (2(m+1)B(m,i) - (4m+2i+3)) / (2(m+i))`
/// for `0 <= i <= floor(m/2)`. Alongside: `N D - C M > 0` and the two
/// quotients written as `N/M` and `C/D`.
pub fn check_lemma34(m: usize) -> Result<BoundReport, BoundError> {
    require(BoundId::L34, m)?;
    let mi = m as i64;
    let mb = BigInt::from(mi);
    let mut records = Vec::new();
    for i in 0..=mi / 2 {
        let ib = BigInt::from(i);
        let left = q(2 * (2 * mi - i)) / (q(2 * (mi + 1)) * b_of(mi, mi - i) - q(6 * mi - 2 * i + 3));
        let right = b_excess(mi, i) / q(2 * (mi + i));
        records.push(BoundRecord::new("quotient_order", i, left.clone(), Relation::Gt, right.clone()));

        let (n, mm) = (n_poly(&mb, &ib), m_poly(&mb, &ib));
        let (c, dd) = (c_poly(&mb, &ib), d_poly(&mb, &ib));
        let nd_cm = BigRational::from_integer(&n * &dd - &c * &mm);
        records.push(BoundRecord::new("nd_minus_cm", i, nd_cm, Relation::Gt, BigRational::zero()));
        records.push(BoundRecord::new("n_over_m", i, left, Relation::Eq, BigRational::new(n, mm)));
        records.push(BoundRecord::new("c_over_d", i, right, Relation::Eq, BigRational::new(c, dd)));
    }
    Ok(BoundReport::new(BoundId::L34, m, records))
}

/// Endpoint ratios `d_1/d_0 < m < d_{m-1}/d_m`, the closed form of the
/// latter, and the two chain steps derived from the lemmas:
/// `d_{m-i} d_{i+1} < d_{m-i-1} d_i` for `1 <= i <= floor((m-1)/2) - 1` and
/// `d_{i-1} d_{m-i-1} < d_i d_{m-i}` for `1 <= i <= floor(m/2)`.
pub fn check_sec4_endpoints(m: usize, row: &CoeffRow) -> Result<BoundReport, BoundError> {
    require(BoundId::Sec4, m)?;
    expect_row(row, m)?;
    let mi = m as i64;
    let mut records = vec![
        BoundRecord::new("first_ratio", 1, d(row, 1) / d(row, 0), Relation::Lt, q(mi)),
        BoundRecord::new("last_ratio", mi - 1, d(row, mi - 1) / d(row, mi), Relation::Gt, q(mi)),
    ];
    let c2m = binomial(2 * mi, mi).expect("nonnegative row");
    let c2m1 = binomial(2 * mi - 1, mi).expect("nonnegative row");
    records.push(BoundRecord::new(
        "last_ratio_closed_form",
        mi - 1,
        d(row, mi - 1) / d(row, mi),
        Relation::Eq,
        BigRational::new(c2m1 + &c2m * mi, c2m),
    ));
    for i in 1..(mi - 1) / 2 {
        records.push(BoundRecord::new(
            "upper_chain_step",
            i,
            d(row, mi - i) * d(row, i + 1),
            Relation::Lt,
            d(row, mi - i - 1) * d(row, i),
        ));
    }
    for i in 1..=mi / 2 {
        records.push(BoundRecord::new(
            "lower_chain_step",
            i,
            d(row, i - 1) * d(row, mi - i - 1),
            Relation::Lt,
            d(row, i) * d(row, mi - i),
        ));
    }
    Ok(BoundReport::new(BoundId::Sec4, m, records))
}

/// Runs one check on closed-form rows for `m` (and `m+1` where needed).
pub fn run_bound(bound: BoundId, m: usize) -> Result<BoundReport, BoundError> {
    require(bound, m)?;
    let row = closed_form_row(m);
    match bound {
        BoundId::Thm21 => check_thm21(m, &row, &closed_form_row(m + 1)),
        BoundId::Thm22 => check_thm22(m, &row, &closed_form_row(m + 1)),
        BoundId::L31 => check_lemma31(m, &row),
        BoundId::L32 => check_lemma32(m, &row, &closed_form_row(m + 1)),
        BoundId::L33 => check_lemma33(m, &row),
        BoundId::L34 => check_lemma34(m),
        BoundId::Sec4 => check_sec4_endpoints(m, &row),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational_to_f64;
    use proptest::prelude::*;

    fn rows(m: usize) -> (CoeffRow, CoeffRow) {
        (closed_form_row(m), closed_form_row(m + 1))
    }

    #[test]
    fn b_values() {
        assert_eq!(b_bound(2, 2).unwrap(), frac(601, 102));
        // A(2,0) = 30 + 96*4 + 94*2 + 32*8 = 858; denominator 2*2*13*3*3.
        assert_eq!(b_bound(2, 0).unwrap(), frac(858, 468));
        assert!(b_bound(2, 3).is_err());
        assert!(b_bound(2, -1).is_err());
        for m in 0..30 {
            for i in 0..=m {
                assert!(b_den(&BigInt::from(m), &BigInt::from(i)) > BigInt::zero());
            }
        }
    }

    #[test]
    fn thm21_small_and_vacuous() {
        let (r2, r3) = rows(2);
        let rep = check_thm21(2, &r2, &r3).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.records.len(), 1);
        let (r1, r2) = rows(1);
        let rep = check_thm21(1, &r1, &r2).unwrap();
        assert!(rep.all_hold() && rep.records.is_empty());
        assert_eq!(rep.summary.min_ratio, None);
        assert!(check_thm21(0, &closed_form_row(0), &r1).is_err());
        assert!(matches!(check_thm21(2, &r3, &r3), Err(BoundError::WrongRow { .. })));
    }

    #[test]
    fn thm21_min_ratio_at_100() {
        let rep = run_bound(BoundId::Thm21, 100).unwrap();
        assert!(rep.all_hold());
        let dec: f64 = rep.summary.min_ratio_decimal.as_ref().unwrap().parse().unwrap();
        assert!((dec - 0.998348).abs() < 5e-7, "{dec}");
        assert!(rep.summary.min_ratio_decimal.as_ref().unwrap().starts_with("0.99834813463332"));
    }

    #[test]
    fn thm21_ratio_climbs_toward_one() {
        let ratios: Vec<BigRational> = [10, 50, 100]
            .iter()
            .map(|&m| run_bound(BoundId::Thm21, m).unwrap().summary.min_ratio.unwrap())
            .collect();
        assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2]);
        assert!(ratios[2] < q(1));
    }

    #[test]
    fn thm22_equalities() {
        let rep = run_bound(BoundId::Thm22, 2).unwrap();
        assert!(rep.all_hold());
        let step = rep.labelled("constant_term_step").next().unwrap();
        assert_eq!(step.lhs, frac(77, 16));
        assert_eq!(step.rhs, frac(11, 6) * frac(21, 8));
        let top = rep.labelled("top_step").next().unwrap();
        assert_eq!(top.lhs, frac(35, 6) * frac(3, 2));
        let rep3 = run_bound(BoundId::Thm22, 3).unwrap();
        let closed = rep3.labelled("top_closed_form").next().unwrap();
        assert_eq!((closed.lhs.clone(), closed.holds), (frac(5, 2), true));
        let strict = rep.labelled("strict_lower_bound").next().unwrap();
        assert_eq!(strict.rhs, frac(34, 12) * frac(15, 4));
    }

    #[test]
    fn lemma31_examples() {
        let rep = run_bound(BoundId::L31, 2).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.records[0].i, 1);
        assert_eq!(rep.records[0].lhs, frac(1, 2));
        assert_eq!(rep.records[0].rhs, frac(2, 5));
        let rep8 = run_bound(BoundId::L31, 8).unwrap();
        assert!(rep8.all_hold());
        assert_eq!(rep8.records[0].lhs, frac(7, 2));
    }

    #[test]
    fn lemma32_topmost_instance() {
        let rep = run_bound(BoundId::L32, 2).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.records.len(), 3);
        let (r2, r3) = rows(2);
        assert_eq!(d(&r3, 2) / d(&r2, 2), frac(35, 6));
        assert!(frac(35, 6) <= frac(601, 102));
        assert!(run_bound(BoundId::L32, 8).unwrap().all_hold());
    }

    #[test]
    fn lemma33_positivity_and_instances() {
        assert!(b_excess(5, 3) > BigRational::zero());
        let rep = run_bound(BoundId::L33, 2).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.labelled("predecessor_bound").count(), 2);
        let rep8 = run_bound(BoundId::L33, 8).unwrap();
        assert!(rep8.labelled("predecessor_bound").any(|r| r.i == 4 && r.holds));
    }

    #[test]
    fn lemma34_instances() {
        let rep = run_bound(BoundId::L34, 4).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.labelled("quotient_order").count(), 3);
        assert!(rep.labelled("nd_minus_cm").any(|r| r.i == 1 && r.holds));
        assert_eq!(run_bound(BoundId::L34, 5).unwrap().labelled("quotient_order").count(), 3);
    }

    #[test]
    fn sec4_examples() {
        let rep = run_bound(BoundId::Sec4, 8).unwrap();
        assert!(rep.all_hold());
        let last = rep.labelled("last_ratio").next().unwrap();
        assert_eq!(last.lhs, frac(17, 2));
        let first = rep.labelled("first_ratio").next().unwrap();
        assert_eq!(first.lhs, frac(3283533, 4096) / frac(4023459, 32768));
        let rep2 = run_bound(BoundId::Sec4, 2).unwrap();
        assert_eq!(rep2.labelled("first_ratio").next().unwrap().lhs, frac(10, 7));
        assert_eq!(rep2.labelled("last_ratio").next().unwrap().lhs, frac(5, 2));
    }

    #[test]
    fn margins_and_json() {
        let r = BoundRecord::new("x", 0, q(1), Relation::Lt, q(1));
        assert!(!r.holds && r.margin.is_zero());
        let r = BoundRecord::new("x", 0, q(1), Relation::Le, q(1));
        assert!(r.holds);
        let r = BoundRecord::new("x", 0, q(3), Relation::Gt, frac(5, 2));
        assert!(r.holds && r.margin == frac(1, 2));
        let rep = run_bound(BoundId::L31, 2).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.starts_with(r#"{"m":2,"bound":"l31","records":[{"label":"ratio_bound","i":1,"relation":">","lhs":"1/2","rhs":"2/5","holds":true,"margin":"1/10"}]"#), "{json}");
    }

    #[test]
    fn lemma_pair_implies_chain_step() {
        for m in 2..=30usize {
            let mi = m as i64;
            let row = closed_form_row(m);
            let l33 = check_lemma33(m, &row).unwrap();
            let l34 = check_lemma34(m).unwrap();
            let sec4 = check_sec4_endpoints(m, &row).unwrap();
            for i in 1..=mi / 2 {
                let a = l33.labelled("predecessor_bound").find(|r| r.i == i).unwrap().holds;
                let b = l33.labelled("predecessor_bound").find(|r| r.i == mi - i).unwrap().holds;
                let c = l34.labelled("quotient_order").find(|r| r.i == i).unwrap().holds;
                let step = sec4.labelled("lower_chain_step").find(|r| r.i == i).unwrap().holds;
                assert!(a && b && c && step, "m={m}, i={i}");
            }
        }
    }

    #[test]
    fn all_bounds_hold_over_a_range() {
        for m in 2..=40 {
            for b in BoundId::ALL {
                let rep = run_bound(b, m).unwrap();
                assert!(rep.all_hold(), "{b} at m={m}: {:?}", rep.failures().next());
            }
        }
    }

    #[test]
    fn preconditions() {
        assert!(matches!(run_bound(BoundId::L31, 1), Err(BoundError::Precondition { min: 2, .. })));
        assert!(run_bound(BoundId::L34, 1).unwrap().all_hold());
        assert_eq!("sec4".parse::<BoundId>().unwrap(), BoundId::Sec4);
        assert!("l99".parse::<BoundId>().is_err());
    }

    proptest! {
        #[test]
        fn margin_sign_matches_holds(a in -50i64..50, b in -50i64..50, k in 1i64..7) {
            for rel in [Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge, Relation::Eq] {
                let r = BoundRecord::new("p", 0, frac(a, k), rel, frac(b, k));
                let expect = match rel {
                    Relation::Lt => a < b,
                    Relation::Le => a <= b,
                    Relation::Gt => a > b,
                    Relation::Ge => a >= b,
                    Relation::Eq => a == b,
                };
                prop_assert_eq!(r.holds, expect);
            }
        }

        #[test]
        fn thm21_ratio_agrees_with_floats(m in 2usize..40) {
            let rep = run_bound(BoundId::Thm21, m).unwrap();
            let (row, next) = rows(m);
            let floats = |r: &CoeffRow| -> Vec<f64> {
                r.coeffs().iter().map(|c| rational_to_f64(&c.to_rational())).collect()
            };
            let (row_f, next_f) = (floats(&row), floats(&next));
            let mf = m as f64;
            let float_min = (1..m)
                .map(|i| {
                    let fi = i as f64;
                    (4.0 * mf * mf + 7.0 * mf + fi + 3.0) * row_f[i]
                        / (2.0 * (mf + 1.0 - fi) * (mf + 1.0) * next_f[i])
                })
                .fold(f64::INFINITY, f64::min);
            let exact: f64 = rep.summary.min_ratio_decimal.unwrap().parse().unwrap();
            prop_assert!((exact - float_min).abs() < 1e-12);
        }
    }
}
