//! Cross-checks against small oracles written here from scratch, sharing no
//! code with the library beyond its number types.

use bmtk_core::bmcoeff::{double_sum_eval, eval_poly, hypergeometric_eval, Method};
use bmtk_core::bmcoeff::generate_rows;
use bmtk_core::exactnum::{BigInt, BigRational, Exact};
use bmtk_core::seqprops::{is_log_concave, is_ratio_monotone, is_spiral, l_iterate};
use bmtk_core::closed_form_row;
use proptest::prelude::*;

fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// `2^{-2m} sum_{k=i}^{m} 2^k C(2m-2k, m-k) C(m+k, m) C(k, i)`.
fn naive_d(m: u64, i: u64) -> BigRational {
    let mut sum = BigInt::from(0);
    for k in i..=m {
        sum += (BigInt::from(1) << k) * choose(2 * m - 2 * k, m - k) * choose(m + k, m) * choose(k, i);
    }
    BigRational::new(sum, BigInt::from(1) << (2 * m))
}

fn naive_l(s: &[BigRational]) -> Vec<BigRational> {
    let zero = BigRational::from_integer(0.into());
    let at = |j: isize| -> BigRational {
        if j < 0 || j as usize >= s.len() {
            zero.clone()
        } else {
            s[j as usize].clone()
        }
    };
    (0..s.len() as isize)
        .map(|i| at(i) * at(i) - at(i - 1) * at(i + 1))
        .collect()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[test]
fn every_method_matches_the_naive_sum() {
    for method in Method::ALL {
        for row in generate_rows(method, 40).unwrap() {
            let m = row.m() as u64;
            for i in 0..=m {
                assert_eq!(row.coeffs()[i as usize].to_rational(), naive_d(m, i), "{method:?} m={m} i={i}");
            }
        }
    }
}

#[test]
fn coefficient_denominators_divide_four_to_the_m() {
    for m in 0..60usize {
        for d in closed_form_row(m).coeffs() {
            let scaled = d.to_rational() * BigRational::from_integer(BigInt::from(1) << (2 * m));
            assert!(scaled.is_integer(), "m={m}");
        }
    }
}

#[test]
fn iterates_of_p8_match_plain_rational_operator() {
    let row = closed_form_row(8);
    let mut plain: Vec<BigRational> = row.coeffs().iter().map(Exact::to_rational).collect();
    for depth in 0..5 {
        let lib: Vec<BigRational> = l_iterate(row.coeffs(), depth).iter().map(Exact::to_rational).collect();
        assert_eq!(lib, plain, "depth {depth}");
        plain = naive_l(&plain);
    }
}

/// Brute-force reading of the reflected-ratio chains with plain division.
fn naive_ratio_monotone(s: &[BigRational]) -> bool {
    let m = s.len() - 1;
    let one = rat(1, 1);
    let lower: Vec<BigRational> = (0..m / 2).map(|i| &s[i] / &s[m - 1 - i]).collect();
    let upper: Vec<BigRational> = (0..=(m.saturating_sub(1)) / 2).map(|i| &s[m - i] / &s[i]).collect();
    let chain_ok = |c: &[BigRational]| c.windows(2).all(|w| w[0] <= w[1]) && c.last().is_none_or(|x| *x <= one);
    chain_ok(&lower) && chain_ok(&upper)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_evaluations_agree(m in 0usize..25, p in -9i64..40, q in 1i64..12) {
        let a = rat(p, q);
        let by_row = eval_poly(&closed_form_row(m), &a);
        prop_assert_eq!(&by_row, &double_sum_eval(m, &a));
        prop_assert_eq!(&by_row, &hypergeometric_eval(m, &a));
    }

    #[test]
    fn ratio_monotone_matches_brute_force(v in prop::collection::vec(1i64..60, 3..9)) {
        let s: Vec<BigRational> = v.iter().map(|&x| rat(x, 1)).collect();
        let verdict = is_ratio_monotone(&s, false);
        prop_assert_eq!(verdict.holds, naive_ratio_monotone(&s));
        if verdict.holds {
            prop_assert!(is_log_concave(&s, false).holds);
            prop_assert!(is_spiral(&s, false).holds);
        }
    }
}
