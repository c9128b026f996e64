//! Letters, multiplicative decomposition of rational functions over them, and
//! the candidate argument sets `R^(1)` and `R^(k)`.

use crate::exact_arith::{ArithError, MPoly, RatFunc, Rational, Vars};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("`{0}` does not factor over the alphabet")]
    NotFactorable(String),
    #[error("invalid letter `{0}`: {1}")]
    InvalidLetter(String, &'static str),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Sparse exponent vector over the letters of an [`Alphabet`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultVector(BTreeMap<usize, i64>);

impl MultVector {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(it: I) -> Self {
        let mut v = Self::unit();
        for (i, e) in it {
            v.add_to(i, e);
        }
        v
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn add_to(&mut self, i: usize, e: i64) {
        let n = self.get(i) + e;
        if n == 0 {
            self.0.remove(&i);
        } else {
            self.0.insert(i, n);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0.iter().map(|(&i, &e)| (i, e))
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        MultVector(self.0.iter().map(|(&i, &e)| (i, -e)).collect())
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut v = self.clone();
        for (i, e) in o.iter() {
            v.add_to(i, e);
        }
        v
    }

    /// Sum of absolute exponents.
    pub fn norm(&self) -> i64 {
        self.0.values().map(|e| e.abs()).sum()
    }
}

/// Ordered list of letters: primitive, sign-canonical polynomials and prime
/// integer constants. The position of a letter is its index in symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    vars: Vars,
    letters: Vec<MPoly>,
}

impl Alphabet {
    pub fn new(vars: &Vars, letters: Vec<MPoly>) -> Result<Self, AlphabetError> {
        let mut a = Alphabet { vars: vars.clone(), letters: Vec::new() };
        for l in letters {
            let l = l.embed(vars)?;
            let n = l.normalized();
            if let Some(c) = l.constant_value() {
                let c = c.abs();
                if !c.is_integer() || !is_prime(&c.to_integer()) {
                    return Err(AlphabetError::InvalidLetter(l.to_string(), "constant letters must be primes"));
                }
                a.push_unique(MPoly::constant(vars, c));
                continue;
            }
            if a.letters.contains(&n) {
                return Err(AlphabetError::InvalidLetter(l.to_string(), "duplicate letter"));
            }
            a.letters.push(n);
        }
        Ok(a)
    }

    /// Parses letters written in the rational-function grammar.
    pub fn parse<S: AsRef<str>>(vars: &Vars, letters: &[S]) -> Result<Self, AlphabetError> {
        let ps = letters
            .iter()
            .map(|s| crate::exact_arith::syntax::parse_poly(s.as_ref(), vars))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vars, ps)
    }

    pub fn empty(vars: &Vars) -> Self {
        Alphabet { vars: vars.clone(), letters: Vec::new() }
    }

    fn push_unique(&mut self, l: MPoly) -> usize {
        if let Some(i) = self.letters.iter().position(|m| *m == l) {
            return i;
        }
        self.letters.push(l);
        self.letters.len() - 1
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[MPoly] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> &MPoly {
        &self.letters[i]
    }

    pub fn index_of(&self, p: &MPoly) -> Option<usize> {
        let n = match p.constant_value() {
            Some(c) => MPoly::constant(&self.vars, c.abs()),
            None => p.normalized(),
        };
        self.letters.iter().position(|l| *l == n)
    }

    pub fn is_constant_letter(&self, i: usize) -> bool {
        self.letters[i].is_constant()
    }

    /// Letter text with the sign chosen so that the constant term is
    /// non-negative, e.g. `1 - x` rather than `-1 + x`.
    pub fn letter_name(&self, i: usize) -> String {
        let l = &self.letters[i];
        if l.constant_term().is_negative() {
            (-l).to_string()
        } else {
            l.to_string()
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.letter_name(i)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(self.names())
    }

    pub fn from_json(vars: &Vars, v: &serde_json::Value) -> Result<Self, AlphabetError> {
        let list = v
            .as_array()
            .ok_or(AlphabetError::InvalidLetter(v.to_string(), "expected a JSON list"))?;
        let names = list
            .iter()
            .map(|s| s.as_str().ok_or(AlphabetError::InvalidLetter(s.to_string(), "expected a string")))
            .collect::<Result<Vec<_>, _>>()?;
        Self::parse(vars, &names)
    }

    /// Writes `f = ± prod letter_i^{v_i}`, discarding the sign.
    pub fn decompose(&self, f: &RatFunc) -> Result<MultVector, AlphabetError> {
        let f = f.embed(&self.vars)?;
        if f.is_zero() {
            return Err(AlphabetError::NotFactorable("0".into()));
        }
        let mut v = MultVector::unit();
        let cn = self.strip_letters(f.num(), 1, &mut v).ok_or_else(|| self.not_factorable(&f))?;
        let cd = self.strip_letters(f.den(), -1, &mut v).ok_or_else(|| self.not_factorable(&f))?;
        let c = cn / cd;
        self.strip_constant(c.numer(), 1, &mut v).ok_or_else(|| self.not_factorable(&f))?;
        self.strip_constant(c.denom(), -1, &mut v).ok_or_else(|| self.not_factorable(&f))?;
        Ok(v)
    }

    fn not_factorable(&self, f: &RatFunc) -> AlphabetError {
        AlphabetError::NotFactorable(f.to_string())
    }

    /// Divides out non-constant letters; returns the remaining constant.
    fn strip_letters(&self, p: &MPoly, sign: i64, v: &mut MultVector) -> Option<Rational> {
        let mut r = p.clone();
        for (i, l) in self.letters.iter().enumerate() {
            if r.is_constant() {
                break;
            }
            if l.is_constant() || !degree_fits(l, &r) {
                continue;
            }
            while let Some(q) = r.div_exact(l) {
                v.add_to(i, sign);
                r = q;
                if r.is_constant() || !degree_fits(l, &r) {
                    break;
                }
            }
        }
        r.constant_value()
    }

    fn strip_constant(&self, n: &BigInt, sign: i64, v: &mut MultVector) -> Option<()> {
        let mut n = n.abs();
        for (i, l) in self.letters.iter().enumerate() {
            if n.is_one() {
                break;
            }
            let Some(c) = l.constant_value() else { continue };
            let p = c.to_integer();
            while (&n % &p).is_zero() {
                n /= &p;
                v.add_to(i, sign);
            }
        }
        n.is_one().then_some(())
    }

    /// `sign * prod letter_i^{v_i}` as a rational function.
    pub fn realize(&self, v: &MultVector, sign: i8) -> RatFunc {
        let mut num = MPoly::from_int(&self.vars, sign as i64);
        let mut den = MPoly::one(&self.vars);
        for (i, e) in v.iter() {
            let p = self.letters[i].pow(e.unsigned_abs() as u32);
            if e > 0 {
                num = &num * &p;
            } else {
                den = &den * &p;
            }
        }
        RatFunc::new(num, den).expect("letters are nonzero")
    }

    /// Adds all irreducible-over-the-splitting factors of `f` as letters.
    pub fn grow_with(&mut self, f: &RatFunc) -> Result<(), AlphabetError> {
        let f = f.embed(&self.vars)?;
        for p in [f.num(), f.den()] {
            if p.is_zero() {
                continue;
            }
            for l in split_factors(p, &self.letters) {
                self.push_unique(l);
            }
        }
        Ok(())
    }

    /// `P ∪ P'` where `P'` holds the factors of all `π_i ± π_j` and `1 ± π_i`.
    pub fn extend(&self) -> Alphabet {
        let mut out = self.clone();
        let one = MPoly::one(&self.vars);
        let mut cands = Vec::new();
        let n = self.letters.len();
        for i in 0..n {
            for j in i..n {
                cands.push(&self.letters[i] + &self.letters[j]);
                cands.push(&self.letters[i] - &self.letters[j]);
            }
        }
        for l in &self.letters {
            cands.push(&one - l);
            cands.push(&one + l);
        }
        for c in cands {
            if c.is_zero() {
                continue;
            }
            for l in split_factors(&c, &out.letters) {
                out.push_unique(l);
            }
        }
        out
    }

    /// Letter values at a point, as integers, for the prime filter.
    fn values_at(&self, point: &[Rational]) -> Option<Vec<BigInt>> {
        self.letters
            .iter()
            .map(|l| {
                let v = l.eval(point);
                v.is_integer().then(|| v.to_integer())
            })
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(", "))
    }
}

/// Whether `l` could divide `r` by degree count in each variable.
fn degree_fits(l: &MPoly, r: &MPoly) -> bool {
    (0..l.nvars()).all(|i| l.degree_in(i) <= r.degree_in(i))
}

fn is_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime divisors of `|n|` by trial division (a large cofactor is kept whole).
pub fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u32);
    while &d * &d <= n && d < limit {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = vec![BigInt::one()];
    for p in prime_factors(&n) {
        let mut e = 0;
        let mut m = n.clone();
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        let cur = out.clone();
        let mut pk = BigInt::one();
        for _ in 0..e {
            pk *= &p;
            out.extend(cur.iter().map(|d| d * &pk));
        }
    }
    out.sort();
    out
}

/// Normalized factors of `p`: known letters first, then prime content,
/// then rational roots when univariate; any residue is returned whole.
fn split_factors(p: &MPoly, known: &[MPoly]) -> Vec<MPoly> {
    let vars = p.vars().clone();
    let mut out = Vec::new();
    let mut r = p.clone();
    for l in known.iter().filter(|l| !l.is_constant()) {
        while !r.is_constant() && degree_fits(l, &r) {
            match r.div_exact(l) {
                Some(q) => {
                    if !out.contains(l) {
                        out.push(l.clone());
                    }
                    r = q;
                }
                None => break,
            }
        }
    }
    let (c, mut r) = r.primitive_part();
    for q in prime_factors(c.numer()).into_iter().chain(prime_factors(c.denom())) {
        out.push(MPoly::constant(&vars, Rational::from_integer(q)));
    }
    let support = r.support();
    if support.len() == 1 {
        let v = support[0];
        loop {
            let cs = r.coeffs_in(v);
            if cs.len() < 2 {
                break;
            }
            let a0 = cs[0].constant_value().expect("univariate").to_integer();
            let an = cs[cs.len() - 1].constant_value().expect("univariate").to_integer();
            let mut found = None;
            if a0.is_zero() {
                found = Some(MPoly::var(&vars, v));
            } else {
                'search: for q in divisors(&an) {
                    for pp in divisors(&a0) {
                        for s in [1, -1] {
                            let root = Rational::new(&pp * s, q.clone());
                            let mut pt = vec![Rational::zero(); vars.len()];
                            pt[v] = root.clone();
                            if r.eval(&pt).is_zero() {
                                let lin = &MPoly::var(&vars, v).scale(&Rational::from_integer(q.clone()))
                                    - &MPoly::constant(&vars, Rational::from_integer(&pp * s));
                                found = Some(lin.normalized());
                                break 'search;
                            }
                        }
                    }
                }
            }
            match found {
                Some(lin) => {
                    r = r.div_exact(&lin).expect("root factor divides").normalized();
                    if !out.contains(&lin) {
                        out.push(lin);
                    }
                }
                None => break,
            }
        }
    }
    if !r.is_constant() {
        out.push(r.normalized());
    }
    out
}

/// Element of `R^(1)`: `sign * prod letter^v` whose complement `1 - R` also
/// factors over the alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub sign: i8,
    pub v: MultVector,
    /// Decomposition of `1 - R`.
    pub complement: MultVector,
}

impl Candidate {
    pub fn realize(&self, a: &Alphabet) -> RatFunc {
        a.realize(&self.v, self.sign)
    }

    pub fn is_constant(&self, a: &Alphabet) -> bool {
        self.v.iter().all(|(i, _)| a.is_constant_letter(i))
    }
}

/// Truncation of the exponent tower: separate bounds for the sum of
/// absolute non-constant exponents and for each constant exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub nonconstant: i64,
    pub constant: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { nonconstant: 4, constant: 2 }
    }
}

fn exponent_vectors(dims: usize, total: i64) -> Vec<Vec<i64>> {
    if dims == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in -total..=total {
        for mut rest in exponent_vectors(dims - 1, total - e.abs()) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

fn box_vectors(dims: usize, b: i64) -> Vec<Vec<i64>> {
    if dims == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in -b..=b {
        for mut rest in box_vectors(dims - 1, b) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// All `R = ± prod letters^v` within the bounds such that `1 - R` factors
/// over the alphabet. Both signs are tried; `R = 1` is excluded.
pub fn candidate_args_depth1(a: &Alphabet, bounds: Bounds) -> Vec<Candidate> {
    let nc: Vec<usize> = (0..a.len()).filter(|&i| !a.is_constant_letter(i)).collect();
    let cs: Vec<usize> = (0..a.len()).filter(|&i| a.is_constant_letter(i)).collect();
    let point = crate::exact_arith::prime_point(a.vars().len());
    let values = a.values_at(&point);
    let mut vecs = Vec::new();
    for e in exponent_vectors(nc.len(), bounds.nonconstant) {
        for d in box_vectors(cs.len(), bounds.constant) {
            let v = MultVector::from_pairs(nc.iter().copied().zip(e.iter().copied()).chain(cs.iter().copied().zip(d)));
            vecs.push(v);
        }
    }
    let mut out: Vec<Candidate> = vecs
        .par_iter()
        .flat_map_iter(|v| {
            let mut found = Vec::new();
            for sign in [1i8, -1] {
                if v.is_unit() && sign == 1 {
                    continue;
                }
                let r = a.realize(v, sign);
                let comp = &RatFunc::one(a.vars()) - &r;
                if comp.is_zero() {
                    continue;
                }
                if let Some(vals) = &values {
                    if !comp.num().is_constant() {
                        let pass = crate::exact_arith::prime_substitution_filter(comp.num(), vals, &point);
                        if matches!(pass, Ok(false)) {
                            continue;
                        }
                    }
                }
                if let Ok(c) = a.decompose(&comp) {
                    found.push(Candidate { sign, v: v.clone(), complement: c });
                }
            }
            found
        })
        .collect();
    out.sort();
    out
}

/// The six images `R, 1-R, 1/R, 1/(1-R), 1-1/R, R/(R-1)` under the S3 action.
pub fn s3_orbit(r: &RatFunc) -> Result<Vec<RatFunc>, ArithError> {
    let one = RatFunc::one(r.vars());
    let omr = &one - r;
    let inv = r.inv()?;
    Ok(vec![
        r.clone(),
        omr.clone(),
        inv.clone(),
        omr.inv()?,
        &one - &inv,
        &(-r) / &omr,
    ])
}

/// Ordered `k`-tuples of distinct candidates whose pairwise differences
/// factor over the alphabet. Entries index into `r1`.
pub fn candidate_args_depthk(r1: &[Candidate], k: usize, a: &Alphabet) -> Vec<Vec<usize>> {
    let funcs: Vec<RatFunc> = r1.iter().map(|c| c.realize(a)).collect();
    let n = funcs.len();
    let ok: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return false;
                    }
                    let d = &funcs[i] - &funcs[j];
                    !d.is_zero() && a.decompose(&d).is_ok()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(ok: &[Vec<bool>], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..ok.len() {
            if cur.iter().all(|&i| ok[i][j]) {
                cur.push(j);
                rec(ok, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(&ok, k, &mut cur, &mut out);
    out
}

/// Convenience: the integer value of a constant letter.
pub fn constant_letter_value(a: &Alphabet, i: usize) -> Option<i64> {
    a.letter(i).constant_value().and_then(|c| c.to_integer().to_i64())
}
