//! Small helpers around exact rational arithmetic.
//!
//! All thresholds and certified bounds in this crate are evaluated with
//! `BigRational`; geometry itself stays in plain integers.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat(p: i64, q: i64) -> BigRational {
    assert!(q != 0, "zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Largest integer `<= r`.
pub fn floor_to_i64(r: &BigRational) -> i64 {
    r.floor()
        .to_integer()
        .to_i64()
        .expect("rational floor out of i64 range")
}

/// Smallest integer `>= r`.
pub fn ceil_to_i64(r: &BigRational) -> i64 {
    r.ceil()
        .to_integer()
        .to_i64()
        .expect("rational ceil out of i64 range")
}

/// Rounds `v` up to the next multiple of `step` (`step >= 1`).
pub fn ceil_to_multiple(v: i64, step: i64) -> i64 {
    debug_assert!(step >= 1);
    if v <= 0 {
        return 0;
    }
    ((v + step - 1) / step) * step
}

/// Smallest multiple of `step` that is `>= r`.
pub fn ceil_rational_to_multiple(r: &BigRational, step: i64) -> i64 {
    debug_assert!(step >= 1);
    if r.is_negative() {
        return 0;
    }
    let c = ceil_to_i64(r);
    ceil_to_multiple(c, step)
}

/// Compares an integer against an exact rational threshold.
pub fn cmp_int(v: i64, r: &BigRational) -> std::cmp::Ordering {
    big(v).cmp(r)
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<i64> {
        t.parse::<i64>()
            .map_err(|_| Error::Precondition(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q == 0 {
                return Err(Error::Precondition(format!("zero denominator in {s:?}")));
            }
            Ok(rat(p, q))
        }
        None => Ok(big(parse_int(s)?)),
    }
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r` as an `f64`, for report columns only.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn zero() -> BigRational {
    BigRational::zero()
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_ratio("3/4").unwrap();
        assert_eq!(r, rat(3, 4));
        assert_eq!(format_ratio(&r), "3/4");
        assert_eq!(format_ratio(&big(7)), "7");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn multiples_and_floors() {
        assert_eq!(ceil_to_multiple(7, 4), 8);
        assert_eq!(ceil_to_multiple(8, 4), 8);
        assert_eq!(ceil_to_multiple(0, 4), 0);
        assert_eq!(floor_to_i64(&rat(5, 2)), 2);
        assert_eq!(ceil_to_i64(&rat(5, 2)), 3);
        assert_eq!(ceil_rational_to_multiple(&rat(5, 2), 2), 4);
    }
}
