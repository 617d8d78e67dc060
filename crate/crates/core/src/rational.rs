//! Exact rational numbers and their textual forms.
//!
//! Every solver path works on [`Rational`]; the decimal rendering is for
//! display only and is never parsed back into a solver.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction, always stored in lowest terms.
pub type Rational = BigRational;

/// Number of significant digits in [`format_decimal`].
pub const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"`, integers, and plain decimals (`"-12.375"`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
        let den = parse_integer(den.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.into()));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(ParseRationalError::Invalid(s.into()));
    }
    let all_digits = |part: &str| part.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(whole) || !all_digits(frac) {
        return Err(ParseRationalError::Invalid(s.into()));
    }
    let digits = format!("{whole}{frac}");
    let numer = if digits.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(&digits).map_err(|_| ParseRationalError::Invalid(s.into()))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let unsigned = digits.strip_prefix('-').unwrap_or(digits);
    if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(digits).ok()
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_exact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Positional decimal rounded to [`DECIMAL_DIGITS`] significant digits,
/// ties to even, trailing fractional zeros trimmed.
pub fn format_decimal(value: &Rational) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();

    // exponent e with 10^e <= |x| < 10^(e+1)
    let ten = Rational::from_integer(BigInt::from(10));
    let mut exponent: i64 = magnitude.numer().to_string().len() as i64 - magnitude.denom().to_string().len() as i64;
    while pow10(exponent) > magnitude {
        exponent -= 1;
    }
    while pow10(exponent + 1) <= magnitude {
        exponent += 1;
    }

    let shift = DECIMAL_DIGITS as i64 - 1 - exponent;
    let scaled = &magnitude * pow10(shift);
    let mut digits = round_half_even(&scaled);
    let mut shift = shift;
    if digits.to_string().len() > DECIMAL_DIGITS {
        // rounding carried into a new leading digit
        digits = round_half_even(&(Rational::from_integer(digits) / &ten));
        shift -= 1;
    }

    let text = digits.to_string();
    let rendered = if shift <= 0 {
        let mut whole = text;
        whole.extend(std::iter::repeat_n('0', (-shift) as usize));
        whole
    } else {
        let shift = shift as usize;
        let padded = if text.len() <= shift { format!("{}{}", "0".repeat(shift - text.len() + 1), text) } else { text };
        let (whole, frac) = padded.split_at(padded.len() - shift);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            whole.to_string()
        } else {
            format!("{whole}.{frac}")
        }
    };
    if negative {
        format!("-{rendered}")
    } else {
        rendered
    }
}

fn pow10(exp: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10u32), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let (floor, rem) = x.numer().div_mod_floor(x.denom());
    let twice = &rem * 2u32;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1u32,
        std::cmp::Ordering::Equal => {
            if (&floor % 2u32).is_zero() {
                floor
            } else {
                floor + 1u32
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("-4/6").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("2.50").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational(" +3 ").unwrap(), int(3));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(ParseRationalError::Empty));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        for bad in ["abc", "1.2.3", "1e5", "-", ".", "1/", "0x10", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_format() {
        assert_eq!(format_exact(&ratio(6, 4)), "3/2");
        assert_eq!(format_exact(&int(-5)), "-5");
        assert_eq!(format_exact(&int(0)), "0");
    }

    #[test]
    fn decimal_format_rounds_half_even() {
        assert_eq!(format_decimal(&int(0)), "0");
        assert_eq!(format_decimal(&int(19)), "19");
        assert_eq!(format_decimal(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_decimal(&ratio(1, 3)), "0.33333333333333333333");
        assert_eq!(format_decimal(&ratio(2, 3)), "0.66666666666666666667");
        assert_eq!(format_decimal(&ratio(200, 3)), "66.666666666666666667");
        // 21 significant digits ending in 5: tie goes to the even neighbour
        assert_eq!(format_decimal(&parse_rational("1.00000000000000000025").unwrap()), "1.0000000000000000002");
        assert_eq!(format_decimal(&parse_rational("1.00000000000000000035").unwrap()), "1.0000000000000000004");
        assert_eq!(format_decimal(&parse_rational("99999999999999999999.5").unwrap()), "100000000000000000000");
        assert_eq!(format_decimal(&ratio(1, 1000)), "0.001");
        assert_eq!(format_decimal(&int(123_000)), "123000");
    }

    proptest! {
        #[test]
        fn exact_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
            let x = ratio(n, d);
            prop_assert_eq!(parse_rational(&format_exact(&x)).unwrap(), x);
        }

        #[test]
        fn arithmetic_identities(a in -10_000i64..10_000, b in 1i64..500, c in -10_000i64..10_000, d in 1i64..500) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x);
            }
        }

        #[test]
        fn terminating_decimals_are_exact(n in -1_000_000i64..1_000_000, k in 0u32..6) {
            let x = Rational::new(BigInt::from(n), num_traits::pow(BigInt::from(10), k as usize));
            prop_assert_eq!(parse_rational(&format_decimal(&x)).unwrap(), x);
        }
    }
}
