//! Exact rational scalars and vectors, with the textual forms used by the
//! file formats (`p/q` fractions and plain decimals).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational number.
pub type Q = BigRational;

/// Vector of exact rationals.
pub type QVec = Vec<Q>;

/// Why a rational literal was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty literal")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed number `{0}`")]
    Malformed(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Q::zero(); n]
}

/// `k`-th standard basis vector of length `n`.
pub fn unit(n: usize, k: usize) -> QVec {
    let mut v = zeros(n);
    v[k] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Exact conversion: every finite `f64` is a dyadic rational.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

pub fn to_f64(x: &Q) -> f64 {
    // `BigRational::to_f64` rounds numerator and denominator separately when
    // they overflow; fall back to a scaled division for huge operands.
    match x.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            let n = x.numer().bits() as i64;
            let d = x.denom().bits() as i64;
            let shift = (n - d).clamp(-1000, 1000);
            let scaled = if shift >= 0 {
                x / Q::from_integer(BigInt::one() << shift as usize)
            } else {
                x * Q::from_integer(BigInt::one() << (-shift) as usize)
            };
            scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
        }
    }
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q`, or a decimal such as `-0.125` or `2.5e-3`, exactly.
pub fn parse_q(s: &str) -> Result<Q, RationalParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(RationalParseError::Empty);
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt =
            parse_int(n.trim()).ok_or_else(|| RationalParseError::Malformed(t.into()))?;
        let d: BigInt =
            parse_int(d.trim()).ok_or_else(|| RationalParseError::Malformed(t.into()))?;
        if d.is_zero() {
            return Err(RationalParseError::ZeroDenominator(t.into()));
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(t).ok_or_else(|| RationalParseError::Malformed(t.into()))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.strip_prefix('+').unwrap_or(s).parse().ok()
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

/// Displays a rational vector as `(a, b, c)`.
pub struct DisplayVec<'a>(pub &'a [Q]);

impl fmt::Display for DisplayVec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_q(x))?;
        }
        f.write_str(")")
    }
}

/// Reduces `x` modulo 1 into `[0, 1)`.
pub fn fract(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("3/4").unwrap(), frac(3, 4));
        assert_eq!(parse_q("-6/8").unwrap(), frac(-3, 4));
        assert_eq!(parse_q("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse_q("-2.5e-1").unwrap(), frac(-1, 4));
        assert_eq!(parse_q("7").unwrap(), q(7));
        assert_eq!(parse_q(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_q("1e3").unwrap(), q(1000));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(
            parse_q("3/0"),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!(matches!(parse_q(""), Err(RationalParseError::Empty)));
        assert!(parse_q("1/x").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1.2.3").is_err());
        assert!(parse_q("--1").is_err());
        assert!(parse_q(".").is_err());
    }

    #[test]
    fn format_round_trips() {
        for s in ["0", "-3", "5/7", "-12/5"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
    }

    #[test]
    fn f64_conversion_is_exact() {
        let x = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&x), 0.1);
        assert_eq!(fract(&frac(-1, 3)), frac(2, 3));
    }
}
