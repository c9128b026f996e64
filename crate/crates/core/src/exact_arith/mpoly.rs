use super::{rational_content, ArithError, Rational, Vars};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector ordered graded-lexicographically (total degree first,
/// then the first variable dominates).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, o: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with rational coefficients. Terms are kept in a
/// map ordered by [`Mono`]; the last entry is the leading term.
#[derive(Clone, Debug)]
pub struct MPoly {
    vars: Vars,
    terms: BTreeMap<Mono, Rational>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.vars[..] == other.vars[..]
    }
}
impl Eq for MPoly {}

impl std::hash::Hash for MPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl MPoly {
    pub fn zero(vars: &Vars) -> Self {
        MPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn from_int(vars: &Vars, n: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(n)))
    }

    /// The polynomial consisting of the `i`-th variable.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Mono(e), Rational::one());
        p
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, ArithError> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(vars, i))
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Rational)>>(vars: &Vars, it: I) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in it {
            assert_eq!(e.len(), vars.len(), "exponent length mismatch");
            p.add_term(Mono(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Value of a constant polynomial (`Some(0)` for zero).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Mono::one(self.nvars()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.degree_in(i) > 0).collect()
    }

    pub fn leading_term(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn mul_term(&self, m: &Mono, c: &Rational) -> Self {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading_term()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut q = Self::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            rem = &rem - &d.mul_term(&m, &c);
            q.add_term(m, c);
        }
        Some(q)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            p.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
        }
        p
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point dimension mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a rational value for variable `i` (the variable stays in the list).
    pub fn substitute(&self, i: usize, v: &Rational) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            p.add_term(m2, c * num_traits::pow(v.clone(), e as usize));
        }
        p
    }

    /// Re-expresses the polynomial over a larger (or permuted) variable list.
    pub fn embed(&self, target: &Vars) -> Result<Self, ArithError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|t| t == v)
                    .ok_or_else(|| ArithError::UnknownVariable(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut p = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            p.add_term(Mono(e), c.clone());
        }
        Ok(p)
    }

    /// Positive rational content: `self / content()` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        rational_content(self.terms.values())
    }

    /// Returns `(c, p)` with `self = c * p`, `p` primitive over Z with positive
    /// leading coefficient. The zero polynomial gives `(0, 0)`.
    pub fn primitive_part(&self) -> (Rational, MPoly) {
        if self.is_zero() {
            return (Rational::zero(), self.clone());
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    /// Primitive, sign-canonical associate (`0` stays `0`).
    pub fn normalized(&self) -> MPoly {
        self.primitive_part().1
    }

    /// Coefficients with respect to variable `i`: entry `k` multiplies `x_i^k`.
    pub fn coeffs_in(&self, i: usize) -> Vec<MPoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![Self::zero(&self.vars); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            let mut m2 = m.clone();
            m2.0[i] = 0;
            out[e].add_term(m2, c.clone());
        }
        out
    }

    fn var_power(&self, i: usize, k: u32) -> MPoly {
        let mut e = vec![0; self.nvars()];
        e[i] = k;
        let mut p = Self::zero(&self.vars);
        p.terms.insert(Mono(e), Rational::one());
        p
    }

    /// Greatest common divisor, primitive with positive leading coefficient.
    /// `gcd(a, 0)` is the normalized `a`; `gcd(0, 0) = 0`.
    pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
        if a.is_zero() {
            return b.normalized();
        }
        if b.is_zero() {
            return a.normalized();
        }
        if a.is_constant() || b.is_constant() {
            return Self::one(&a.vars);
        }
        let v = (0..a.nvars())
            .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0)
            .expect("non-constant polynomial has a variable");
        if a.degree_in(v) == 0 {
            return Self::gcd(a, &b.content_in(v));
        }
        if b.degree_in(v) == 0 {
            return Self::gcd(&a.content_in(v), b);
        }
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let cont = Self::gcd(&ca, &cb);
        let mut p = a.div_exact(&ca).expect("content divides");
        let mut q = b.div_exact(&cb).expect("content divides");
        if p.degree_in(v) < q.degree_in(v) {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() {
            let r = p.pseudo_rem(&q, v);
            p = q;
            q = if r.is_zero() { r } else { r.primitive_in(v) };
        }
        let g = p.primitive_in(v);
        (&cont * &g).normalized()
    }

    /// Gcd of the coefficients with respect to variable `v`.
    fn content_in(&self, v: usize) -> MPoly {
        let mut g = Self::zero(&self.vars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = Self::gcd(&g, &c);
            if g.is_constant() {
                return Self::one(&self.vars);
            }
        }
        g
    }

    fn primitive_in(&self, v: usize) -> MPoly {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides").normalized()
    }

    fn pseudo_rem(&self, d: &MPoly, v: usize) -> MPoly {
        let dd = d.degree_in(v);
        let lcd = d.coeffs_in(v).pop().expect("nonzero divisor");
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= dd {
            let dr = r.degree_in(v);
            let lcr = r.coeffs_in(v).pop().expect("nonzero");
            let shift = self.var_power(v, dr - dd);
            r = &(&lcd * &r) - &(&(&lcr * &shift) * d);
            if !r.is_zero() {
                r = r.normalized();
            }
        }
        r
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, ascending: bool) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<_> = if ascending {
            self.terms.iter().collect()
        } else {
            self.terms.iter().rev().collect()
        };
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", super::fmt_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", super::fmt_rational(&a))?;
                }
                write!(f, "{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, true)
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut p = MPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rational::one())
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, o: MPoly) -> MPoly {
        &self + &o
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, o: MPoly) -> MPoly {
        &self - &o
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, o: MPoly) -> MPoly {
        &self * &o
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, syntax::parse_poly, vars};
    use super::*;

    fn p(s: &str) -> MPoly {
        parse_poly(s, &vars(&["x", "y", "z"])).unwrap()
    }

    #[test]
    fn grlex_leading_term() {
        let f = p("1 + x + y^2");
        assert_eq!(f.leading_term().unwrap().0 .0, vec![0, 2, 0]);
        let g = p("x*y + x^2");
        assert_eq!(g.leading_term().unwrap().0 .0, vec![2, 0, 0]);
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(MPoly::gcd(&p("x^2 - 1"), &p("x - 1")), p("x - 1"));
        let a = p("(1-x)^2*(1+x)");
        let b = p("(1-x)*(1+x)^2");
        let g = MPoly::gcd(&a, &b);
        assert_eq!(g, p("x^2 - 1"));
        assert!(a.div_exact(&g).is_some() && b.div_exact(&g).is_some());
        assert_eq!(MPoly::gcd(&p("-2*x + 4"), &MPoly::zero(&vars(&["x", "y", "z"]))), p("x - 2"));
    }

    #[test]
    fn gcd_multivariate() {
        let r = p("x*y - z + 3");
        let a = &p("x^2 + y") * &r;
        let b = &p("x - y*z") * &r;
        assert_eq!(MPoly::gcd(&a, &b), r.normalized());
    }

    #[test]
    fn exact_division() {
        let a = p("x^3 - y^3");
        assert_eq!(a.div_exact(&p("x - y")).unwrap(), p("x^2 + x*y + y^2"));
        assert!(a.div_exact(&p("x + y")).is_none());
    }

    #[test]
    fn derivative_and_eval() {
        let f = p("x^2*y + 3*z");
        assert_eq!(f.derivative(0), p("2*x*y"));
        assert_eq!(f.eval(&[int(2), int(3), int(1)]), int(15));
    }
}
