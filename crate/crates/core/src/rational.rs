//! Exact rationals and their `p/q` text form.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `base^exp` for a nonnegative exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Renders as `p/q`, or `p` when the denominator is one.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn parse(s: &str) -> Result<Rational, ParseError> {
    let (num, den) = match s.find('/') {
        Some(i) => (&s[..i], Some((&s[i + 1..], i + 1))),
        None => (s, None),
    };
    let numer = parse_int(num).map_err(|(p, m)| ParseError::new(s, p, m))?;
    let denom = match den {
        Some((d, off)) => {
            let v = parse_int(d).map_err(|(p, m)| ParseError::new(s, p + off, m))?;
            if v.is_zero() {
                return Err(ParseError::new(s, off, "zero denominator"));
            }
            v
        }
        None => BigInt::one(),
    };
    Ok(Rational::new(numer, denom))
}

fn parse_int(s: &str) -> Result<BigInt, (usize, &'static str)> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let sign_len = s.len() - digits.len();
    if digits.is_empty() {
        return Err((sign_len, "expected digits"));
    }
    if let Some(i) = digits.find(|c: char| !c.is_ascii_digit()) {
        return Err((sign_len + i, "unexpected character in integer"));
    }
    s.parse::<BigInt>().map_err(|_| (0, "invalid integer"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("-6/8").unwrap(), ratio(-3, 4));
        assert_eq!(parse("5").unwrap(), int(5));
        assert_eq!(render(&ratio(2, 4)), "1/2");
        assert_eq!(render(&int(-7)), "-7");
    }

    #[test]
    fn parse_errors_point_at_offending_byte() {
        assert_eq!(parse("1/0").unwrap_err().position, 2);
        assert_eq!(parse("1/x").unwrap_err().position, 2);
        assert_eq!(parse("").unwrap_err().position, 0);
        assert_eq!(parse("12a").unwrap_err().position, 2);
    }
}
