//! Order properties of finite positive sequences: mid-peak unimodality,
//! log-concavity, the spiral order, and ratio monotonicity, together with the
//! `L` operator `b_i = a_i^2 - a_{i-1} a_{i+1}` and iterated checks on
//! `L^j(a)`.
//!
//! Every comparison is exact. Sequences of length at most two have nothing
//! to compare and satisfy every chain property vacuously (positivity is still
//! required). A non-positive entry is reported as its own failure kind so
//! that iterated checks can distinguish it from an order violation.

use crate::exactnum::{BigRational, Dyadic, Exact};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Unimodal,
    LogConcave,
    Spiral,
    RatioMonotone,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Unimodal => "unimodal",
            Property::LogConcave => "log_concave",
            Property::Spiral => "spiral",
            Property::RatioMonotone => "ratio_monotone",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Property {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "unimodal" => Ok(Property::Unimodal),
            "logconcave" | "lc" => Ok(Property::LogConcave),
            "spiral" => Ok(Property::Spiral),
            "ratio" | "ratiomonotone" | "rm" => Ok(Property::RatioMonotone),
            _ => Err(format!("unknown property {s:?}")),
        }
    }
}

/// Which comparison failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `a_i <= 0`.
    NonPositive,
    /// `a_i^2` versus `a_{i-1} a_{i+1}`.
    LogConcavity,
    /// The `step`-th link of the interleaved chain `a_m, a_0, a_{m-1}, a_1, ...`,
    /// comparing `a_i` with `a_j`.
    SpiralStep,
    /// `a_i` versus `a_{i+1}` in the increasing part (`i < peak`) or the
    /// decreasing part.
    UnimodalStep,
    /// Chain `a_0/a_{m-1} <= a_1/a_{m-2} <= ... <= 1`; `i` indexes the right
    /// ratio of the failing link, or is the terminal link when `terminal`.
    LowerChain,
    /// Chain `a_m/a_0 <= a_{m-1}/a_1 <= ... <= 1`, indexed the same way.
    UpperChain,
}

/// First violation found, by smallest index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub i: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub terminal: bool,
}

impl Witness {
    fn at(kind: WitnessKind, i: usize) -> Self {
        Witness {
            kind,
            i,
            j: None,
            terminal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub strict: bool,
    pub holds: bool,
    /// `L`-level at which the check ran (or first failed); 0 for a direct check.
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    fn from_outcome(property: Property, strict: bool, outcome: Result<(), Witness>) -> Self {
        PropertyVerdict {
            property,
            strict,
            holds: outcome.is_ok(),
            level: 0,
            witness: outcome.err(),
        }
    }

    pub fn positivity_failure(&self) -> bool {
        matches!(&self.witness, Some(w) if w.kind == WitnessKind::NonPositive)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}

/// `a <= b` (or `a < b` when strict).
fn ordered<T: Ord>(a: &T, b: &T, strict: bool) -> bool {
    match a.cmp(b) {
        Ordering::Less => true,
        Ordering::Equal => !strict,
        Ordering::Greater => false,
    }
}

fn check_positive<T: Exact>(s: &[T]) -> Result<(), Witness> {
    match s.iter().position(|x| !x.is_positive()) {
        Some(i) => Err(Witness::at(WitnessKind::NonPositive, i)),
        None => Ok(()),
    }
}

fn log_concave<T: Exact>(s: &[T], strict: bool) -> Result<(), Witness> {
    check_positive(s)?;
    for i in 1..s.len().saturating_sub(1) {
        let square = s[i].mul_ref(&s[i]);
        let outer = s[i - 1].mul_ref(&s[i + 1]);
        if !ordered(&outer, &square, strict) {
            return Err(Witness::at(WitnessKind::LogConcavity, i));
        }
    }
    Ok(())
}

/// Index order `m, 0, m-1, 1, ...` ending at `floor(m/2)`.
fn spiral_order(len: usize) -> Vec<usize> {
    let m = len - 1;
    let mut order = Vec::with_capacity(len);
    let (mut lo, mut hi) = (0usize, m);
    loop {
        order.push(hi);
        if hi == lo {
            break;
        }
        order.push(lo);
        lo += 1;
        hi -= 1;
        if lo > hi {
            break;
        }
    }
    order
}

fn spiral<T: Exact>(s: &[T], strict: bool) -> Result<(), Witness> {
    check_positive(s)?;
    if s.len() <= 2 {
        return Ok(());
    }
    let order = spiral_order(s.len());
    for (step, w) in order.windows(2).enumerate() {
        if !ordered(&s[w[0]], &s[w[1]], strict) {
            return Err(Witness {
                kind: WitnessKind::SpiralStep,
                i: w[0],
                j: Some(w[1]),
                terminal: step + 2 == order.len(),
            });
        }
    }
    Ok(())
}

fn unimodal_midpeak<T: Exact>(s: &[T], strict: bool) -> Result<(), Witness> {
    check_positive(s)?;
    if s.len() <= 2 {
        return Ok(());
    }
    let peak = (s.len() - 1) / 2;
    for i in 0..s.len() - 1 {
        let ok = if i < peak {
            ordered(&s[i], &s[i + 1], strict)
        } else {
            ordered(&s[i + 1], &s[i], strict)
        };
        if !ok {
            return Err(Witness {
                kind: WitnessKind::UnimodalStep,
                i,
                j: Some(i + 1),
                terminal: false,
            });
        }
    }
    Ok(())
}

/// Both reflected-ratio chains, compared by cross-multiplication:
///
/// lower: `a_0/a_{m-1} <= a_1/a_{m-2} <= ... <= a_{h-1}/a_{m-h} <= 1`, `h = floor(m/2)`;
/// upper: `a_m/a_0 <= a_{m-1}/a_1 <= ... <= a_{m-g}/a_g <= 1`, `g = floor((m-1)/2)`.
fn ratio_monotone<T: Exact>(s: &[T], strict: bool) -> Result<(), Witness> {
    check_positive(s)?;
    if s.len() <= 2 {
        return Ok(());
    }
    let m = s.len() - 1;

    let h = m / 2;
    // Ratios r_i = a_i / a_{m-1-i}, i = 0..h-1.
    for i in 1..h {
        let left = s[i - 1].mul_ref(&s[m - 1 - i]);
        let right = s[i].mul_ref(&s[m - i]);
        if !ordered(&left, &right, strict) {
            return Err(Witness::at(WitnessKind::LowerChain, i));
        }
    }
    if h >= 1 && !ordered(&s[h - 1], &s[m - h], strict) {
        return Err(Witness {
            terminal: true,
            ..Witness::at(WitnessKind::LowerChain, h)
        });
    }

    let g = (m - 1) / 2;
    // Ratios q_i = a_{m-i} / a_i, i = 0..=g.
    for i in 1..=g {
        let left = s[m - i + 1].mul_ref(&s[i]);
        let right = s[m - i].mul_ref(&s[i - 1]);
        if !ordered(&left, &right, strict) {
            return Err(Witness::at(WitnessKind::UpperChain, i));
        }
    }
    if !ordered(&s[m - g], &s[g], strict) {
        return Err(Witness {
            terminal: true,
            ..Witness::at(WitnessKind::UpperChain, g + 1)
        });
    }
    Ok(())
}

pub fn is_log_concave<T: Exact>(s: &[T], strict: bool) -> PropertyVerdict {
    PropertyVerdict::from_outcome(Property::LogConcave, strict, log_concave(s, strict))
}

/// The spiral order `a_m <= a_0 <= a_{m-1} <= a_1 <= ... <= a_{floor(m/2)}`.
pub fn is_spiral<T: Exact>(s: &[T], strict: bool) -> PropertyVerdict {
    PropertyVerdict::from_outcome(Property::Spiral, strict, spiral(s, strict))
}

pub fn is_ratio_monotone<T: Exact>(s: &[T], strict: bool) -> PropertyVerdict {
    PropertyVerdict::from_outcome(Property::RatioMonotone, strict, ratio_monotone(s, strict))
}

/// Strict rise to index `floor(m/2)` followed by a strict fall.
pub fn is_unimodal_midpeak<T: Exact>(s: &[T]) -> PropertyVerdict {
    check(Property::Unimodal, s, true)
}

/// Dispatch on `prop`. For unimodality `strict = false` relaxes the chain to `<=`.
pub fn check<T: Exact>(prop: Property, s: &[T], strict: bool) -> PropertyVerdict {
    let outcome = match prop {
        Property::Unimodal => unimodal_midpeak(s, strict),
        Property::LogConcave => log_concave(s, strict),
        Property::Spiral => spiral(s, strict),
        Property::RatioMonotone => ratio_monotone(s, strict),
    };
    PropertyVerdict::from_outcome(prop, strict, outcome)
}

/// `b_i = a_i^2 - a_{i-1} a_{i+1}` with `a_{-1} = a_{n+1} = 0`.
pub fn l_operator<T: Exact>(s: &[T]) -> Vec<T> {
    (0..s.len())
        .map(|i| {
            let square = s[i].mul_ref(&s[i]);
            if i == 0 || i + 1 == s.len() {
                square
            } else {
                square.sub_ref(&s[i - 1].mul_ref(&s[i + 1]))
            }
        })
        .collect()
}

/// `L^depth(s)`.
pub fn l_iterate<T: Exact>(s: &[T], depth: usize) -> Vec<T> {
    let mut cur = s.to_vec();
    for _ in 0..depth {
        cur = l_operator(&cur);
    }
    cur
}

/// Checks `prop` on `L^j(s)` for `j = 0..k`. On failure `level` is the first
/// failing `j`; on success it is `k`, the depth verified.
pub fn k_property<T: Exact>(s: &[T], k: usize, prop: Property, strict: bool) -> PropertyVerdict {
    let mut cur = s.to_vec();
    for level in 0..k {
        if level > 0 {
            cur = l_operator(&cur);
        }
        let mut verdict = check(prop, &cur, strict);
        verdict.level = level;
        if !verdict.holds {
            return verdict;
        }
    }
    PropertyVerdict {
        property: prop,
        strict,
        holds: true,
        level: k,
        witness: None,
    }
}

/// Re-derives a failure from its witness alone: `true` iff the recorded
/// comparison really is violated on `s`.
pub fn witness_is_genuine<T: Exact>(s: &[T], verdict: &PropertyVerdict) -> bool {
    let Some(w) = &verdict.witness else {
        return false;
    };
    let strict = verdict.strict;
    if s.is_empty() {
        return false;
    }
    let m = s.len() - 1;
    let chain = matches!(w.kind, WitnessKind::LowerChain | WitnessKind::UpperChain);
    if chain && m < 2 {
        return false;
    }
    let get = |i: usize| s.get(i);
    match w.kind {
        WitnessKind::NonPositive => get(w.i).is_some_and(|x| !x.is_positive()),
        WitnessKind::LogConcavity => {
            w.i >= 1
                && w.i + 1 < s.len()
                && !ordered(&s[w.i - 1].mul_ref(&s[w.i + 1]), &s[w.i].mul_ref(&s[w.i]), strict)
        }
        WitnessKind::SpiralStep | WitnessKind::UnimodalStep => match (get(w.i), w.j.and_then(get)) {
            (Some(a), Some(b)) => {
                let falling = w.kind == WitnessKind::UnimodalStep && w.i >= m / 2;
                if falling {
                    !ordered(b, a, strict)
                } else {
                    !ordered(a, b, strict)
                }
            }
            _ => false,
        },
        WitnessKind::LowerChain => {
            let h = m / 2;
            let r = |i: usize| ratio(&s[i], &s[m - 1 - i]);
            if w.terminal {
                h >= 1 && !ordered(&r(h - 1), &one(), strict)
            } else {
                w.i >= 1 && w.i < h && !ordered(&r(w.i - 1), &r(w.i), strict)
            }
        }
        WitnessKind::UpperChain => {
            let g = (m - 1) / 2;
            let q = |i: usize| ratio(&s[m - i], &s[i]);
            if w.terminal {
                !ordered(&q(g), &one(), strict)
            } else {
                w.i >= 1 && w.i <= g && !ordered(&q(w.i - 1), &q(w.i), strict)
            }
        }
    }
}

fn ratio<T: Exact>(a: &T, b: &T) -> BigRational {
    a.to_rational() / b.to_rational()
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

/// Parses a comma-separated list of integers, rationals (`p/q`), dyadics
/// (`p/2^e`), or decimals.
pub fn parse_sequence(list: &str) -> Result<Vec<BigRational>, crate::exactnum::ExactError> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(crate::exactnum::parse_rational)
        .collect()
}

/// Converts a rational sequence to dyadics when every denominator allows it.
pub fn as_dyadic(values: &[BigRational]) -> Option<Vec<Dyadic>> {
    values
        .iter()
        .map(|v| crate::exactnum::dyadic_from_rational(v).ok())
        .collect()
}
