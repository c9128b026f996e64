//! Exact arithmetic over Q: rationals, multivariate polynomials in a fixed
//! variable list, and normalized rational functions.

mod mpoly;
mod prime_filter;
mod ratfunc;
pub mod syntax;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;
use thiserror::Error;

pub use mpoly::{Mono, MPoly};
pub use prime_filter::{prime_point, prime_substitution_filter};
pub use ratfunc::RatFunc;

/// Arbitrary precision rational number, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shared, ordered list of variable names.
pub type Vars = Arc<[String]>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("prime point is unusable: {0}")]
    BadPrimePoint(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Builds a variable list from names.
pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Smallest positive rational `c` such that `c * v` is an integer vector with
/// coprime entries (for a vector of rationals); returns 1 for the zero vector.
pub(crate) fn rational_content<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> Rational {
    use num_integer::Integer;
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    let mut any = false;
    for r in it {
        if r.is_zero() {
            continue;
        }
        any = true;
        g = g.gcd(r.numer());
        l = l.lcm(r.denom());
    }
    if !any {
        return Rational::one();
    }
    Rational::new(g.abs(), l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["0", "5", "-3/4", "12/8"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
        }
        assert_eq!(fmt_rational(&parse_rational("12/8").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn content_of_vector() {
        let v = [rat(2, 3), rat(4, 5), int(0)];
        assert_eq!(rational_content(v.iter()), rat(2, 15));
    }
}
