use super::{ArithError, MPoly, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Evaluation point with coordinate `i` equal to the `i`-th prime not below 101.
pub fn prime_point(nvars: usize) -> Vec<Rational> {
    (101u64..)
        .filter(|&n| is_prime(n))
        .take(nvars)
        .map(|p| Rational::from_integer(BigInt::from(p)))
        .collect()
}

/// Fast necessary test for a candidate polynomial to factor over an alphabet:
/// its value at the prime point (after clearing denominators) must share a
/// divisor with some letter value. Units pass no letter and return `false`.
pub fn prime_substitution_filter(
    candidate: &MPoly,
    alphabet_values: &[BigInt],
    point: &[Rational],
) -> Result<bool, ArithError> {
    let mut seen = BTreeSet::new();
    for v in alphabet_values {
        if v.abs() <= BigInt::one() {
            return Err(ArithError::BadPrimePoint(format!("letter value {v} is a unit or zero")));
        }
        if !seen.insert(v.abs()) {
            return Err(ArithError::BadPrimePoint(format!("letter values collide at {v}")));
        }
    }
    let prim = candidate.normalized();
    let val = prim.eval(point);
    debug_assert!(val.is_integer());
    let val = val.to_integer();
    if val.is_zero() {
        return Ok(true);
    }
    if val.abs().is_one() {
        return Ok(false);
    }
    Ok(alphabet_values.iter().any(|a| val.is_multiple_of(a)))
}

#[cfg(test)]
mod tests {
    use super::super::{syntax::parse_poly, vars};
    use super::*;

    fn letters_at(x: i64) -> Vec<BigInt> {
        [2, x, 1 - x, 1 + x].iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn first_primes_from_101() {
        let p = prime_point(3);
        assert_eq!(p, vec![Rational::from_integer(101.into()), Rational::from_integer(103.into()), Rational::from_integer(107.into())]);
    }

    #[test]
    fn filter_examples() {
        let v = vars(&["x"]);
        let at = |x: i64| vec![Rational::from_integer(x.into())];
        let c = parse_poly("(1-x)*(1+x)", &v).unwrap();
        assert!(prime_substitution_filter(&c, &letters_at(5), &at(5)).unwrap());
        // 3 - x at 7 is -4, divisible by 2: the filter is only necessary.
        let c = parse_poly("3 - x", &v).unwrap();
        assert!(prime_substitution_filter(&c, &letters_at(7), &at(7)).unwrap());
        let one = parse_poly("1", &v).unwrap();
        assert!(!prime_substitution_filter(&one, &letters_at(5), &at(5)).unwrap());
        let c = parse_poly("x^2 + x + 1", &v).unwrap();
        assert!(!prime_substitution_filter(&c, &letters_at(101), &at(101)).unwrap());
    }

    #[test]
    fn filter_rejects_bad_points() {
        let v = vars(&["x"]);
        let c = parse_poly("x", &v).unwrap();
        let x = vec![Rational::from_integer(2.into())];
        assert!(matches!(
            prime_substitution_filter(&c, &letters_at(2), &x),
            Err(ArithError::BadPrimePoint(_))
        ));
    }
}
