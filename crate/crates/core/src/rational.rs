//! Exact rational helpers shared by every module.
//!
//! All arithmetic in the crate goes through [`Q`]; nothing is ever rounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = num_rational::BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn floor_int(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    a.lcm(b)
}

/// Least common multiple of the denominators of `xs`.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| lcm(&acc, x.denom()))
}

/// Dot product of a rational vector with an integer weight.
pub fn dot(b: &[Q], w: &[i64]) -> Q {
    b.iter()
        .zip(w)
        .fold(Q::zero(), |acc, (x, &y)| acc + x * qi(y))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an exact rational: {0:?}")]
pub struct RationalParseError(pub String);

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Decimal notation is rejected.
pub fn parse_q(s: &str) -> Result<Q, RationalParseError> {
    let t = s.trim();
    let err = || RationalParseError(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |x: &str| {
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !valid(n) || !valid(d) || d.starts_with('-') {
        return Err(err());
    }
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// Parses a class such as `"(-1/3,1)"`, `"-1/3, 1"` or `"[0,0]"`.
pub fn parse_vector(s: &str) -> Result<Vec<Q>, RationalParseError> {
    let t = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    if t.trim().is_empty() {
        return Err(RationalParseError(s.to_string()));
    }
    t.split(',').map(parse_q).collect()
}

/// Canonical `p/q` (or `p`) text for a rational.
pub fn fmt_q(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub struct VecDisplay<'a>(pub &'a [Q]);

impl fmt::Display for VecDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_q(x))?;
        }
        write!(f, ")")
    }
}

pub fn fmt_vec(v: &[Q]) -> String {
    VecDisplay(v).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms_only() {
        assert_eq!(parse_q("-1/3").unwrap(), q(-1, 3));
        assert_eq!(parse_q(" 4 ").unwrap(), qi(4));
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("1/-3").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn fractional_part_of_negatives() {
        assert_eq!(frac(&q(-1, 3)), q(2, 3));
        assert_eq!(frac(&q(-4, 3)), q(2, 3));
        assert_eq!(frac(&qi(-2)), qi(0));
        assert_eq!(floor_int(&q(-4, 3)), BigInt::from(-2));
    }

    #[test]
    fn vectors_round_trip_through_text() {
        let v = parse_vector("(-1/3,1)").unwrap();
        assert_eq!(v, vec![q(-1, 3), qi(1)]);
        assert_eq!(fmt_vec(&v), "(-1/3,1)");
        assert!(parse_vector("()").is_err());
    }
}
