use super::{syntax, ArithError, MPoly, Rational, Vars};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Rational function `num / den` kept in lowest terms, with a primitive
/// integer denominator whose leading coefficient is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: MPoly, den: MPoly) -> Self {
        if num.is_zero() {
            return RatFunc { den: MPoly::one(num.vars()), num };
        }
        let g = MPoly::gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (c, den) = den.primitive_part();
        let num = num.scale(&c.recip());
        RatFunc { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let den = MPoly::one(p.vars());
        RatFunc { num: p, den }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::from_poly(MPoly::constant(vars, c))
    }

    pub fn from_int(vars: &Vars, n: i64) -> Self {
        Self::from_poly(MPoly::from_int(vars, n))
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(MPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(MPoly::one(vars))
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::from_poly(MPoly::var(vars, i))
    }

    /// Parses an expression in the polynomial grammar extended with `/`.
    pub fn parse(s: &str, vars: &Vars) -> Result<Self, ArithError> {
        syntax::parse_ratfunc(s, vars)
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.num.constant_value()? / self.den.constant_value()?)
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn powi(&self, n: i32) -> Result<Self, ArithError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs();
        Ok(RatFunc::normalize(base.num.pow(k), base.den.pow(k)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Quotient rule derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let n = &(&self.num.derivative(i) * &self.den) - &(&self.num * &self.den.derivative(i));
        Self::normalize(n, &self.den * &self.den)
    }

    pub fn derivative_named(&self, name: &str) -> Result<Self, ArithError> {
        let i = self
            .vars()
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(self.derivative(i))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ArithError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ArithError::PoleAtPoint);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Replaces variable `i` by the rational function `g`.
    pub fn compose(&self, i: usize, g: &RatFunc) -> Result<Self, ArithError> {
        let sub = |p: &MPoly| -> (MPoly, MPoly) {
            // Homogenize in the denominator of g: p(g) = P / den(g)^deg.
            let cs = p.coeffs_in(i);
            let d = cs.len().saturating_sub(1) as u32;
            let mut acc = MPoly::zero(p.vars());
            for (k, c) in cs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let t = &(c * &g.num.pow(k as u32)) * &g.den.pow(d - k as u32);
                acc = &acc + &t;
            }
            (acc, g.den.pow(d))
        };
        let (a, b) = sub(&self.num);
        let (c, d) = sub(&self.den);
        Self::new(&a * &d, &b * &c)
    }

    /// Expresses `self` over another variable list containing all of its variables.
    pub fn embed(&self, target: &Vars) -> Result<Self, ArithError> {
        Ok(RatFunc { num: self.num.embed(target)?, den: self.den.embed(target)? })
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap_num = self.num.num_terms() > 1;
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if wrap_num {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.num_terms() > 1 || !self.den.is_constant() && self.den.terms().next().is_some_and(|(_, c)| !c.is_one()) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::normalize(&self.num + &o.num, self.den.clone());
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::normalize(n, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        RatFunc::normalize(&self.num * &o.num, &self.den * &o.den)
    }
}

/// Panics on division by zero; use [`RatFunc::inv`] for a fallible version.
impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        assert!(!o.is_zero(), "division by zero rational function");
        RatFunc::normalize(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat, vars};
    use super::*;

    fn rf(s: &str, v: &[&str]) -> RatFunc {
        RatFunc::parse(s, &vars(v)).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let x = ["x"];
        assert_eq!(rf("1 - x", &x).derivative(0), rf("-1", &x));
        let xa = ["x", "a"];
        assert_eq!(rf("1 - x/a", &xa).derivative(1), rf("x/a^2", &xa));
        let ab = ["a", "b"];
        assert_eq!(rf("1 - b/a", &ab).derivative_named("b").unwrap(), rf("-1/a", &ab));
    }

    #[test]
    fn eval_examples() {
        let x = ["x"];
        assert_eq!(rf("1 - x", &x).eval(&[rat(1, 3)]).unwrap(), rat(2, 3));
        assert_eq!(rf("4*x/(1-x)^2", &x).eval(&[rat(1, 2)]).unwrap(), int(8));
        assert_eq!(rf("1/x", &x).eval(&[int(0)]), Err(ArithError::PoleAtPoint));
    }

    #[test]
    fn normalization_cancels() {
        let x = ["x"];
        let f = rf("(x^2 - 1)/(2*x - 2)", &x);
        assert_eq!(f, rf("(1 + x)/2", &x));
        assert!(f.den().is_one());
        let g = rf("1/(-x)", &x);
        assert_eq!(g.to_string(), "-1/x");
    }

    #[test]
    fn compose_substitutes() {
        let x = ["x"];
        let f = rf("x/(1-x)", &x);
        let g = rf("1/x", &x);
        assert_eq!(f.compose(0, &g).unwrap(), rf("1/(x-1)", &x));
    }
}
