use super::{BigInt, BigRational};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Renders `r` rounded (half away from zero) to `sig` significant digits.
/// Plain notation is used for moderate magnitudes, `d.ddde±x` otherwise.
pub fn to_decimal(r: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let abs = r.abs();
    let ten = BigInt::from(10u32);

    // Find e with 10^e <= |r| < 10^(e+1).
    let mut e = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
    loop {
        let p = pow10(e);
        if abs < p {
            e -= 1;
        } else if abs >= pow10(e + 1) {
            e += 1;
        } else {
            break;
        }
    }

    // Integer with `sig` digits: round(|r| * 10^(sig-1-e)).
    let mut digits = round_half_up(&(&abs * pow10(sig as i64 - 1 - e)));
    if digits >= num_traits::pow(ten.clone(), sig) {
        digits = digits.div_floor(&ten);
        e += 1;
    }
    let digits = digits.to_string();
    let sign = if neg { "-" } else { "" };

    if (-7..21).contains(&e) {
        let body = if e >= sig as i64 - 1 {
            format!("{digits}{}", "0".repeat((e - (sig as i64 - 1)) as usize))
        } else if e >= 0 {
            let (int, frac) = digits.split_at(e as usize + 1);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{e}")
        } else {
            format!("{sign}{lead}.{rest}e{e}")
        }
    }
}

fn pow10(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10u32), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn round_half_up(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    if r * 2 >= *x.denom() {
        q + 1
    } else {
        q
    }
}

/// Nearest binary64, via a 20-significant-digit decimal rendering.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .filter(|v| v.is_finite())
        .unwrap_or_else(|| to_decimal(r, 20).parse().unwrap_or(f64::NAN))
}
