//! Exact rational scalars and the `RAT` string format.
//!
//! All probabilities and moments are carried as arbitrary-precision
//! rationals; floats only appear at explicitly lossy conversion points.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; denominators are never silently truncated.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses the `RAT` formats: an integer (`"3"`), a fraction (`"1/3"`),
/// or an exact decimal (`"0.125"` parses to 1/8, not a float).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let int_part = int_part.trim();
        let int: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal in {s:?}")));
        }
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(Rational::new(int * &scale + BigInt::from(sign) * frac, scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Renders a rational as the exact `RAT` string (`"3/8"`, integers without
/// the denominator).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r^e` by binary exponentiation.
pub fn pow_u64(r: &Rational, mut e: u64) -> Rational {
    let mut base = r.clone();
    let mut acc = Rational::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// `r^e` for a possibly negative exponent; `e < 0` requires `r != 0`.
pub fn pow_i64(r: &Rational, e: i64) -> Rational {
    let mag = pow_u64(r, e.unsigned_abs());
    if e >= 0 {
        mag
    } else {
        mag.recip()
    }
}

/// Lossy conversion; values beyond the f64 range saturate to infinities.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Natural log of a positive big integer, accurate to ~1 ulp even when the
/// integer does not fit an f64.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    // ln(x) = ln(top 64 bits) + (shift) * ln 2
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * core::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(r: &Rational) -> Result<f64> {
    if !r.is_positive() {
        return Err(Error::param(format!("ln of non-positive rational {r}")));
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    Ok(ln_biguint(num) - ln_biguint(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_rat_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("0.5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rational(1, 8));
        assert_eq!(parse_rational("3").unwrap(), rational(3, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), rational(-1, 4));
        assert_eq!(parse_rational(" 2/6 ").unwrap(), rational(1, 3));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
    }

    #[test]
    fn rejects_malformed_rationals() {
        for bad in ["", "1/0", "a", "1.2.3", "1/ b", "0x10", "1.", "2e3"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn decimal_parse_is_exact() {
        // 0.1 as a float is not 1/10; the parser must be.
        assert_eq!(parse_rational("0.1").unwrap(), rational(1, 10));
        assert_eq!(
            parse_rational("0.333333333333333333333333").unwrap()
                * Rational::from_integer(10u64.pow(12).into())
                * Rational::from_integer(10u64.pow(12).into()),
            Rational::from_integer("333333333333333333333333".parse().unwrap())
        );
    }

    #[test]
    fn format_roundtrips() {
        for s in ["1/2", "7", "-3/4"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn negative_exponent_pow() {
        let half = rational(1, 2);
        assert_eq!(pow_i64(&half, -3), rational(8, 1));
        assert_eq!(pow_i64(&half, 0), Rational::one());
    }

    #[test]
    fn big_integer_log() {
        let x = BigUint::from(2u32).pow(1000);
        let got = ln_biguint(&x);
        let want = 1000.0 * core::f64::consts::LN_2;
        assert!((got - want).abs() < 1e-9 * want);
    }
}
