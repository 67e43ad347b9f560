//! Exact rationals and their `p/q` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Lowest terms, positive denominator, and no `/1` suffix for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Accepts `p`, `p/q` and signed forms. Surrounding whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty rational".to_string());
    }
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| format!("malformed numerator in `{text}`"))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| format!("malformed denominator in `{text}`"))?;
    if denom.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(numer, denom))
}

pub fn format_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(2, -6)), "-1/3");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&int(-1)), "-1");
        assert_eq!(format_rational(&zero()), "0");
    }

    #[test]
    fn parses_signed_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" -1/3 ").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("4").unwrap(), int(4));
        assert_eq!(parse_rational("2/-4").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }
}
