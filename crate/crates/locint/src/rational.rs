//! Exact rational numbers and the few conversions the rest of the crate needs.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` (optionally signed) into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Renders as `"p/q"`, including integers (`"2/1"`), so the form is always machine-parseable.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn log2_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).log2() + shift as f64
}

/// `log2(r)` for `r > 0`, stable for numerators and denominators far beyond `f64` range.
pub fn log2(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    log2_int(r.numer()) - log2_int(r.denom())
}

/// `r^e` for a signed exponent; `r` must be nonzero when `e < 0`.
pub fn pow(r: &Rational, e: i64) -> Rational {
    let base = if e < 0 { r.recip() } else { r.clone() };
    let mut out = Rational::one();
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

/// True when `r` lies in the closed unit interval.
pub fn is_probability(r: &Rational) -> bool {
    r.numer().sign() != Sign::Minus && r <= &Rational::one()
}

/// Serde helper: writes `{"exact": "p/q", "approx": f64}`.
pub fn serialize_exact<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Rational", 2)?;
    st.serialize_field("exact", &fmt_rational(r))?;
    st.serialize_field("approx", &r.to_f64().unwrap_or(f64::NAN))?;
    st.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_rational("6/8").unwrap();
        assert_eq!(r, ratio(3, 4));
        assert_eq!(fmt_rational(&r), "3/4");
        assert_eq!(fmt_rational(&int(2)), "2/1");
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn log2_handles_huge_values() {
        assert!((log2(&ratio(1, 8)) + 3.0).abs() < 1e-12);
        let big = pow(&int(2), 3000);
        assert!((log2(&big) - 3000.0).abs() < 1e-9);
        assert!((log2(&big.recip()) + 3000.0).abs() < 1e-9);
    }

    #[test]
    fn pow_negative() {
        assert_eq!(pow(&ratio(1, 2), -3), int(8));
        assert_eq!(pow(&ratio(2, 3), 0), int(1));
    }
}
