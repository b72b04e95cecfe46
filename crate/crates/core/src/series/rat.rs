//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, kept in lowest terms with positive denominator.
pub type Rat = BigRational;

/// `v` as a rational.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// `num/den`; panics on a zero denominator, which is a caller bug for literals.
pub fn frac(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator in literal {num}/{den}");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact division with a typed error instead of a panic.
pub fn checked_div(a: &Rat, b: &Rat) -> Result<Rat> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// `m!` as a big integer rational.
pub fn factorial(m: u64) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=m {
        acc *= i;
    }
    Rat::from_integer(acc)
}

/// `(-1)^e`.
pub fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `"144"` for integers, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64`, for display hints only.
pub fn approx_f64(r: &Rat) -> f64 {
    // Scale down huge operands so the conversion stays finite.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
    let d = (d >> shift).to_f64().unwrap_or(f64::MAX);
    let v = n / d;
    if r.is_negative() {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["144", "-15228", "9395106912144/25", "-141669/2", "0"] {
            assert_eq!(format_rat(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(format_rat(&parse_rat("4/2").unwrap()), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn lowest_terms_and_division() {
        assert_eq!(frac(6, -4), frac(-3, 2));
        assert_eq!(checked_div(&rat(1), &rat(0)), Err(Error::DivisionByZero));
        assert_eq!(factorial(5), rat(120));
        assert_eq!(sign(-3), rat(-1));
    }

    #[test]
    fn approx_is_close() {
        assert!((approx_f64(&frac(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((approx_f64(&frac(-7, 2)) + 3.5).abs() < 1e-15);
    }
}
