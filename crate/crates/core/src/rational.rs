//! Exact rational arithmetic helpers.
//!
//! All satisfaction values, matching weights, and LP entries in this crate
//! are [`Rat`] values (arbitrary-precision rationals in lowest terms), so
//! every stability predicate and every optimum is bit-reproducible.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rat = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p / q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses a rational from the wire encodings used by the instance and
/// matching file formats: a decimal integer string (`"3"`) or a fraction
/// (`"3/10"`).
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let mk_err = || Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| mk_err())?;
        let q: BigInt = q.trim().parse().map_err(|_| mk_err())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::new(p, q))
    } else {
        let p: BigInt = s.parse().map_err(|_| mk_err())?;
        Ok(Rat::from_integer(p))
    }
}

/// Formats a rational in the wire encoding: `"p"` when integral, `"p/q"`
/// otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True iff `r` is a nonnegative value.
pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-2", "1/2", "3/10", "-7/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_reduces_to_lowest_terms() {
        assert_eq!(parse_rat("2/4").unwrap(), ratio(1, 2));
        assert_eq!(format_rat(&parse_rat("6/3").unwrap()), "2");
        assert_eq!(parse_rat("-1/-2").unwrap(), ratio(1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a/b").is_err());
        assert!(parse_rat("1.5").is_err());
    }
}
