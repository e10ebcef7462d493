//! Numerical cross-check of the quartic integral
//! `int_0^inf dx / (x^4 + 2a x^2 + 1)^{m+1} = pi P_m(a) / (2^{m+3/2} (a+1)^{m+1/2})`.
//!
//! Substituting `x = 1/t` on `[1, inf)` gives `t^{4m+2} / (t^4 + 2a t^2 + 1)^{m+1}`
//! on `[0, 1]`, so the whole integral is
//!
//! ```text
//! int_0^1 (1 + t^{4m+2}) / (t^4 + 2a t^2 + 1)^{m+1} dt
//! ```
//!
//! which is smooth on a finite interval for `a > -1`. The right-hand side is
//! computed from the exact polynomial value and rounded only at the end.

use crate::bmcoeff::{closed_form_row, eval_poly};
use crate::exactnum::{rational_to_f64, to_decimal, BigInt, BigRational};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Subintervals allowed before giving up.
pub const DEFAULT_BUDGET: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadResult {
    pub m: usize,
    /// `a` exactly as parsed, plus its nearest double.
    pub a_exact: String,
    pub a: f64,
    pub integral_estimate: f64,
    pub rhs_value: f64,
    pub abs_error_estimate: f64,
    pub relative_deviation: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("a must exceed -1, got {0}")]
    Domain(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("tolerance not reached within {} subintervals; best error estimate {:e}", .best.subintervals, .best.abs_error_estimate)]
    NotConverged { best: Box<QuadResult> },
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.lo.total_cmp(&self.lo))
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Piece {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let (f1, f2) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Piece {
        lo,
        hi,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Adaptive G7-K15 on `[lo, hi]`, always splitting the piece with the largest
/// error. Returns `(value, error, pieces, converged)` for the state with the
/// smallest total error seen, so a larger budget never reports a worse error.
fn adaptive(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64, budget: usize) -> (f64, f64, usize, bool) {
    let first = kronrod(&f, lo, hi);
    let mut heap = BinaryHeap::from([first]);
    let (mut value, mut error) = (first.value, first.error);
    let mut best = (value, error, 1usize);
    let done = |v: f64, e: f64| e <= rel_tol * v.abs() || e <= f64::MIN_POSITIVE;
    while !done(value, error) && heap.len() < budget.max(1) {
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (left, right) = (kronrod(&f, worst.lo, mid), kronrod(&f, mid, worst.hi));
        value += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        // Re-sum to keep round-off from accumulating in the running totals.
        error = heap.iter().map(|p| p.error).sum();
        if error < best.1 {
            value = heap.iter().map(|p| p.value).sum();
            best = (value, error, heap.len());
        }
    }
    (best.0, best.1, best.2, done(best.0, best.1))
}

/// `pi P_m(a) / (2^{m+3/2} (a+1)^{m+1/2})` with everything except the final
/// `pi / sqrt(2(a+1))` factor kept exact.
pub fn rhs_value(m: usize, a: &BigRational) -> f64 {
    let p = eval_poly(&closed_form_row(m), a);
    let a1 = a + BigRational::one();
    let exact = p / (BigRational::from_integer(BigInt::one() << (m + 1)) * num_traits::pow(a1.clone(), m));
    rational_to_f64(&exact) * std::f64::consts::PI / (2.0 * rational_to_f64(&a1)).sqrt()
}

/// The folded integrand on `[0, 1]`.
pub fn folded_integrand(m: usize, a: f64) -> impl Fn(f64) -> f64 {
    let e = (m + 1) as i32;
    let tail = (4 * m + 2) as i32;
    move |t: f64| {
        let t2 = t * t;
        (1.0 + t.powi(tail)) / (t2 * t2 + 2.0 * a * t2 + 1.0).powi(e)
    }
}

pub fn quartic_integral(m: usize, a: &BigRational, tol: f64) -> Result<QuadResult, QuadError> {
    quartic_integral_with_budget(m, a, tol, DEFAULT_BUDGET)
}

pub fn quartic_integral_with_budget(
    m: usize,
    a: &BigRational,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadError::BadTolerance(tol));
    }
    if !(a + BigRational::one()).is_positive() {
        return Err(QuadError::Domain(crate::exactnum::rational_to_string(a)));
    }
    let af = rational_to_f64(a);
    let (value, error, pieces, converged) = adaptive(folded_integrand(m, af), 0.0, 1.0, tol, budget);
    let rhs = rhs_value(m, a);
    let result = QuadResult {
        m,
        a_exact: crate::exactnum::rational_to_string(a),
        a: af,
        integral_estimate: value,
        rhs_value: rhs,
        abs_error_estimate: error,
        relative_deviation: (value - rhs).abs() / rhs.abs(),
        subintervals: pieces,
    };
    if converged {
        Ok(result)
    } else {
        Err(QuadError::NotConverged { best: Box::new(result) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub m: usize,
    pub a: String,
    pub result: Option<QuadResult>,
    pub error: Option<String>,
    /// Deviation above `10 * tol`, or an error.
    pub flagged: bool,
}

/// Every `(m, a)` with `m <= m_max`; a failing cell is recorded and the sweep
/// continues.
pub fn identity_sweep(m_max: usize, a_values: &[BigRational], tol: f64) -> Vec<SweepCell> {
    let cells: Vec<(usize, &BigRational)> = (0..=m_max)
        .flat_map(|m| a_values.iter().map(move |a| (m, a)))
        .collect();
    cells
        .into_par_iter()
        .map(|(m, a)| {
            let label = to_decimal(a, 17);
            match quartic_integral(m, a, tol) {
                Ok(r) => SweepCell {
                    m,
                    a: label,
                    flagged: r.relative_deviation.is_nan() || r.relative_deviation > 10.0 * tol,
                    result: Some(r),
                    error: None,
                },
                Err(e) => SweepCell {
                    m,
                    a: label,
                    result: None,
                    error: Some(e.to_string()),
                    flagged: true,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;
    use std::f64::consts::PI;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn elementary_values() {
        let q = quartic_integral(0, &r("1"), 1e-10).unwrap();
        assert!((q.integral_estimate - PI / 4.0).abs() < 1e-12);
        assert!((q.rhs_value - PI / 4.0).abs() < 1e-15);
        assert!(q.relative_deviation < 1e-10);
        // int_0^inf (1+x^2)^{-4} dx = 5 pi / 32.
        let q = quartic_integral(1, &r("1"), 1e-10).unwrap();
        assert!((q.integral_estimate - 5.0 * PI / 32.0).abs() < 1e-12);
        assert!((q.rhs_value - 5.0 * PI / 32.0).abs() < 1e-14);
    }

    #[test]
    fn moderate_degree() {
        let q = quartic_integral(8, &r("0.5"), 1e-10).unwrap();
        assert!(q.relative_deviation < 1e-8, "{q:?}");
    }

    #[test]
    fn near_the_domain_edge() {
        let q = quartic_integral(0, &r("-0.9"), 1e-10).unwrap();
        let expect = PI / (2f64.powf(1.5) * 0.1f64.sqrt());
        assert!((q.rhs_value - expect).abs() / expect < 1e-14);
        assert!(q.relative_deviation < 1e-8);
    }

    #[test]
    fn errors() {
        assert!(matches!(quartic_integral(1, &r("-1"), 1e-10), Err(QuadError::Domain(_))));
        assert!(matches!(quartic_integral(1, &r("-3/2"), 1e-10), Err(QuadError::Domain(_))));
        assert!(matches!(quartic_integral(1, &r("1"), 0.0), Err(QuadError::BadTolerance(_))));
        match quartic_integral_with_budget(30, &r("-0.99"), 1e-14, 2) {
            Err(QuadError::NotConverged { best }) => assert!(best.integral_estimate > 0.0),
            other => panic!("expected a convergence error, got {other:?}"),
        }
    }

    #[test]
    fn deviation_grid() {
        for m in 0..=5 {
            for a in ["-1/2", "0", "1/2", "1", "2", "10"] {
                let q = quartic_integral(m, &r(a), 1e-10).unwrap();
                assert!(q.relative_deviation < 1e-8, "m={m} a={a}: {q:?}");
            }
        }
    }

    #[test]
    fn doubling_the_budget_never_hurts() {
        for (m, a) in [(3, "1/2"), (12, "-3/4"), (40, "2")] {
            let mut prev = f64::INFINITY;
            for budget in [1, 2, 4, 8, 16, 32, 64] {
                let err = match quartic_integral_with_budget(m, &r(a), 1e-15, budget) {
                    Ok(q) => q.abs_error_estimate,
                    Err(QuadError::NotConverged { best }) => best.abs_error_estimate,
                    Err(e) => panic!("{e}"),
                };
                assert!(err <= prev, "m={m} a={a} budget={budget}: {err} > {prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn sweep() {
        let a: Vec<BigRational> = ["0", "1/2", "1", "2"].iter().map(|s| r(s)).collect();
        let cells = identity_sweep(3, &a, 1e-10);
        assert_eq!(cells.len(), 16);
        assert!(cells.iter().all(|c| !c.flagged), "{cells:?}");
        assert!(identity_sweep(3, &[], 1e-10).is_empty());
    }
}
