//! Symbols: rational linear combinations of words over alphabet letters,
//! with concatenation, shuffle product, the `Π_w` projectors and the
//! integrability test.

use crate::alphabet::{Alphabet, AlphabetError};
use crate::exact_arith::{fmt_rational, parse_rational, MPoly, RatFunc, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

pub type Word = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("weight mismatch: expected {expected}, found {found}")]
    WeightMismatch { expected: usize, found: usize },
    #[error("malformed symbol JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// Pure-weight element of the tensor algebra over letter indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    weight: usize,
    terms: BTreeMap<Word, Rational>,
}

impl Symbol {
    pub fn zero(weight: usize) -> Self {
        Symbol { weight, terms: BTreeMap::new() }
    }

    /// The empty word with coefficient 1 (unit of the shuffle product).
    pub fn unit() -> Self {
        Self::word(vec![], Rational::one())
    }

    pub fn word(w: Word, c: Rational) -> Self {
        let mut s = Self::zero(w.len());
        s.add_term(w, c);
        s
    }

    pub fn letter(i: u32) -> Self {
        Self::word(vec![i], Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Rational)>>(weight: usize, it: I) -> Self {
        let mut s = Self::zero(weight);
        for (w, c) in it {
            assert_eq!(w.len(), weight, "word length differs from weight");
            s.add_term(w, c);
        }
        s
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[u32]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        debug_assert_eq!(w.len(), self.weight);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &Symbol) {
        self.add_scaled(o, &Rational::one());
    }

    pub fn add_scaled(&mut self, o: &Symbol, c: &Rational) {
        if o.is_zero() || c.is_zero() {
            return;
        }
        assert_eq!(self.weight, o.weight, "adding symbols of different weight");
        for (w, d) in &o.terms {
            self.add_term(w.clone(), d * c);
        }
    }

    pub fn add(&self, o: &Symbol) -> Symbol {
        let mut s = self.clone();
        s.add_assign(o);
        s
    }

    pub fn sub(&self, o: &Symbol) -> Symbol {
        let mut s = self.clone();
        s.add_scaled(o, &-Rational::one());
        s
    }

    pub fn scale(&self, c: &Rational) -> Symbol {
        let mut s = Symbol::zero(self.weight);
        s.add_scaled(self, c);
        s
    }

    pub fn neg(&self) -> Symbol {
        self.scale(&-Rational::one())
    }

    /// Concatenation product `self ⊗ o`.
    pub fn tensor(&self, o: &Symbol) -> Symbol {
        let mut s = Symbol::zero(self.weight + o.weight);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                s.add_term(w, c1 * c2);
            }
        }
        s
    }

    pub fn shuffle(&self, o: &Symbol) -> Symbol {
        let mut s = Symbol::zero(self.weight + o.weight);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let c = c1 * c2;
                for w in shuffle_words(w1, w2) {
                    s.add_term(w, c.clone());
                }
            }
        }
        s
    }

    /// Applies `f` to every word and sums the images with their coefficients.
    pub fn map_words<F: FnMut(&[u32]) -> Symbol>(&self, out_weight: usize, mut f: F) -> Symbol {
        let mut s = Symbol::zero(out_weight);
        for (w, c) in &self.terms {
            s.add_scaled(&f(w), c);
        }
        s
    }

    /// Renames letter indices through `map`.
    pub fn relabel(&self, map: &[u32]) -> Symbol {
        let mut s = Symbol::zero(self.weight);
        for (w, c) in &self.terms {
            s.add_term(w.iter().map(|&i| map[i as usize]).collect(), c.clone());
        }
        s
    }

    /// Highest letter index used, if any.
    pub fn max_letter(&self) -> Option<u32> {
        self.terms.keys().flat_map(|w| w.iter().copied()).max()
    }

    pub fn display(&self, a: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a_c = c.abs();
            if !a_c.is_one() {
                out.push_str(&fmt_rational(&a_c));
                out.push('*');
            }
            let letters: Vec<String> = w
                .iter()
                .map(|&i| {
                    let n = a.letter_name(i as usize);
                    if n.contains(' ') {
                        format!("({n})")
                    } else {
                        n
                    }
                })
                .collect();
            out.push('[');
            out.push_str(&letters.join(" | "));
            out.push(']');
        }
        out
    }

    pub fn to_json(&self, a: &Alphabet) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(w, c)| serde_json::json!({"word": w, "coeff": fmt_rational(c)}))
            .collect();
        serde_json::json!({"weight": self.weight, "alphabet": a.to_json(), "terms": terms})
    }

    pub fn from_json(v: &serde_json::Value, a: &Alphabet) -> Result<Symbol, TensorError> {
        let bad = |m: &str| TensorError::Json(m.to_string());
        let weight = v["weight"].as_u64().ok_or_else(|| bad("missing weight"))? as usize;
        let given = Alphabet::from_json(a.vars(), &v["alphabet"])?;
        let map: Vec<u32> = given
            .letters()
            .iter()
            .map(|l| a.index_of(l).map(|i| i as u32).ok_or_else(|| bad("letter not in the alphabet")))
            .collect::<Result<_, _>>()?;
        let mut s = Symbol::zero(weight);
        for t in v["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let w: Word = t["word"]
                .as_array()
                .ok_or_else(|| bad("missing word"))?
                .iter()
                .map(|i| i.as_u64().and_then(|i| map.get(i as usize).copied()).ok_or_else(|| bad("bad letter index")))
                .collect::<Result<_, _>>()?;
            if w.len() != weight {
                return Err(TensorError::WeightMismatch { expected: weight, found: w.len() });
            }
            let c = parse_rational(t["coeff"].as_str().ok_or_else(|| bad("missing coeff"))?)
                .map_err(|e| bad(&e.to_string()))?;
            s.add_term(w, c);
        }
        Ok(s)
    }
}

/// All interleavings of two words, with multiplicity.
pub fn shuffle_words(a: &[u32], b: &[u32]) -> Vec<Word> {
    let n = a.len() + b.len();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(a: &[u32], b: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Word>) {
        if a.is_empty() {
            let mut w = cur.clone();
            w.extend_from_slice(b);
            out.push(w);
            return;
        }
        if b.is_empty() {
            let mut w = cur.clone();
            w.extend_from_slice(a);
            out.push(w);
            return;
        }
        cur.push(a[0]);
        rec(&a[1..], b, cur, out);
        cur.pop();
        cur.push(b[0]);
        rec(a, &b[1..], cur, out);
        cur.pop();
    }
    rec(a, b, &mut cur, &mut out);
    out
}

/// Weight-1 symbol of a rational function: `Σ v_j [letter_j]`; signs and
/// other torsion drop out.
pub fn expand_factor(f: &RatFunc, a: &Alphabet) -> Result<Symbol, AlphabetError> {
    let v = a.decompose(f)?;
    let mut s = Symbol::zero(1);
    for (i, e) in v.iter() {
        s.add_term(vec![i as u32], Rational::from_integer(BigInt::from(e)));
    }
    Ok(s)
}

/// The unnormalized operator `ρ_w` on a single word.
fn rho_word(w: &[u32], memo: &mut HashMap<Word, Symbol>) -> Symbol {
    if w.len() <= 1 {
        return Symbol::word(w.to_vec(), Rational::one());
    }
    if let Some(s) = memo.get(w) {
        return s.clone();
    }
    let n = w.len();
    let left = rho_word(&w[..n - 1], memo).tensor(&Symbol::letter(w[n - 1]));
    let right = rho_word(&w[1..], memo).tensor(&Symbol::letter(w[0]));
    let s = left.sub(&right);
    memo.insert(w.to_vec(), s.clone());
    s
}

/// `ρ_w = w Π_w`.
pub fn rho(s: &Symbol) -> Symbol {
    let mut memo = HashMap::new();
    s.map_words(s.weight(), |w| rho_word(w, &mut memo))
}

/// The projector `Π_w`, annihilating exactly the shuffle ideal.
pub fn project_pi(w: usize, s: &Symbol) -> Result<Symbol, TensorError> {
    if s.weight() != w {
        return Err(TensorError::WeightMismatch { expected: w, found: s.weight() });
    }
    if w == 0 {
        return Ok(s.clone());
    }
    Ok(rho(s).scale(&Rational::new(BigInt::one(), BigInt::from(w))))
}

/// Non-increasing integer partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(pub Vec<usize>);

impl Partition {
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", p.join(","))
    }
}

/// `Π_{λ1} ⊗ … ⊗ Π_{λr}` applied to consecutive blocks of each word.
pub fn project_partition(lambda: &Partition, s: &Symbol) -> Result<Symbol, TensorError> {
    let w = lambda.weight();
    if s.weight() != w {
        return Err(TensorError::WeightMismatch { expected: w, found: s.weight() });
    }
    let mut memo = HashMap::new();
    Ok(s.map_words(w, |word| {
        let mut acc = Symbol::unit();
        let mut start = 0;
        for &part in lambda.parts() {
            let block = &word[start..start + part];
            let r = rho_word(block, &mut memo).scale(&Rational::new(BigInt::one(), BigInt::from(part)));
            acc = acc.tensor(&r);
            if acc.is_zero() {
                break;
            }
            start += part;
        }
        acc
    }))
}

/// `λ`-shuffle of a word: consecutive blocks of sizes `λ_r`, shuffled together.
pub fn lambda_shuffle(lambda: &Partition, word: &[u32]) -> Symbol {
    let mut acc = Symbol::unit();
    let mut start = 0;
    for &part in lambda.parts() {
        acc = acc.shuffle(&Symbol::word(word[start..start + part].to_vec(), Rational::one()));
        start += part;
    }
    acc
}

/// All non-increasing partitions of `w`, ordered by length first and then
/// lexicographically from the largest first part.
pub fn partitions_desc(w: usize) -> Vec<Partition> {
    fn gen(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            gen(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    gen(w, w, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.0.cmp(&a.0)));
    out
}

/// Outcome of the integrability test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrability {
    /// Every wedge coefficient vanishes.
    Integrable,
    /// Fewer than two variables (or weight below 2): nothing to check.
    Vacuous,
    /// The first non-vanishing wedge coefficient.
    Fails { slot: usize, vars: (String, String), rest: Word, witness: RatFunc },
}

impl Integrability {
    pub fn holds(&self) -> bool {
        !matches!(self, Integrability::Fails { .. })
    }
}

/// Checks that for every adjacent slot pair `(j, j+1)` and variable pair
/// `(k, l)` the sum `Σ c_I (∂_k log ω_j ∂_l log ω_{j+1} − ∂_l log ω_j ∂_k log ω_{j+1})`,
/// grouped by the word with both slots removed, is zero.
pub fn integrability_check(s: &Symbol, a: &Alphabet) -> Integrability {
    let nv = a.vars().len();
    let w = s.weight();
    if w < 2 || nv < 2 || s.is_zero() {
        return Integrability::Vacuous;
    }
    let derivs: Vec<Vec<MPoly>> = a.letters().iter().map(|l| (0..nv).map(|k| l.derivative(k)).collect()).collect();
    // Numerator of the wedge d log p ∧ d log q in (k, l), over p q.
    let wedge = |p: usize, q: usize, k: usize, l: usize| -> MPoly {
        &(&derivs[p][k] * &derivs[q][l]) - &(&derivs[p][l] * &derivs[q][k])
    };
    for j in 0..w - 1 {
        let mut groups: BTreeMap<Word, Vec<(u32, u32, &Rational)>> = BTreeMap::new();
        for (word, c) in s.terms() {
            let (p, q) = (word[j], word[j + 1]);
            if p == q || a.is_constant_letter(p as usize) || a.is_constant_letter(q as usize) {
                continue;
            }
            let mut rest = word[..j].to_vec();
            rest.extend_from_slice(&word[j + 2..]);
            groups.entry(rest).or_default().push((p, q, c));
        }
        for k in 0..nv {
            for l in k + 1..nv {
                for (rest, items) in &groups {
                    let mut letters: Vec<u32> = items.iter().flat_map(|&(p, q, _)| [p, q]).collect();
                    letters.sort();
                    letters.dedup();
                    let mut total = MPoly::zero(a.vars());
                    for &(p, q, c) in items {
                        let mut t = wedge(p as usize, q as usize, k, l);
                        if t.is_zero() {
                            continue;
                        }
                        for &m in &letters {
                            if m != p && m != q {
                                t = &t * a.letter(m as usize);
                            }
                        }
                        total = &total + &t.scale(c);
                    }
                    if !total.is_zero() {
                        let mut den = MPoly::one(a.vars());
                        for &m in &letters {
                            den = &den * a.letter(m as usize);
                        }
                        let witness = RatFunc::new(total, den).expect("letters are nonzero");
                        return Integrability::Fails {
                            slot: j,
                            vars: (a.vars()[k].clone(), a.vars()[l].clone()),
                            rest: rest.clone(),
                            witness,
                        };
                    }
                }
            }
        }
    }
    Integrability::Integrable
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat, vars};

    fn w(v: &[u32]) -> Symbol {
        Symbol::word(v.to_vec(), Rational::one())
    }

    #[test]
    fn shuffle_basics() {
        let a = w(&[0]);
        assert_eq!(a.shuffle(&Symbol::unit()), a);
        assert_eq!(w(&[0]).shuffle(&w(&[1])), w(&[0, 1]).add(&w(&[1, 0])));
        let s = w(&[0, 1]).shuffle(&w(&[2, 3]));
        assert_eq!(s.len(), 6);
        assert!(s.terms().all(|(_, c)| c.is_one()));
    }

    #[test]
    fn pi_two() {
        let p = project_pi(2, &w(&[0, 1])).unwrap();
        assert_eq!(p, w(&[0, 1]).sub(&w(&[1, 0])).scale(&rat(1, 2)));
        assert!(project_pi(2, &w(&[0]).shuffle(&w(&[1]))).unwrap().is_zero());
        assert!(project_pi(3, &w(&[0, 1])).is_err());
    }

    #[test]
    fn partition_orders() {
        let s: Vec<String> = partitions_desc(5).iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["(5)", "(4,1)", "(3,2)", "(3,1,1)", "(2,2,1)", "(2,1,1,1)", "(1,1,1,1,1)"]);
        let s: Vec<String> = partitions_desc(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
        assert_eq!(partitions_desc(1), vec![Partition(vec![1])]);
        let s: Vec<String> = partitions_desc(6).iter().take(5).map(|p| p.to_string()).collect();
        assert_eq!(s, ["(6)", "(5,1)", "(4,2)", "(3,3)", "(4,1,1)"]);
    }

    #[test]
    fn partition_projector_edge_cases() {
        let s = w(&[0, 1, 2]).add(&w(&[2, 2, 1]).scale(&int(3)));
        assert_eq!(project_partition(&Partition(vec![1, 1, 1]), &s).unwrap(), s);
        assert_eq!(project_partition(&Partition(vec![3]), &s).unwrap(), project_pi(3, &s).unwrap());
    }

    #[test]
    fn expand_factor_examples() {
        let v = vars(&["x"]);
        let a = Alphabet::parse(&v, &["2", "3", "x"]).unwrap();
        let f = RatFunc::parse("-1", &v).unwrap();
        assert!(expand_factor(&f, &a).unwrap().is_zero());
        let f = RatFunc::parse("2^3 * 3^2 / x^5", &v).unwrap();
        let s = expand_factor(&f, &a).unwrap();
        let exp = w(&[0]).scale(&int(3)).add(&w(&[1]).scale(&int(2))).sub(&w(&[2]).scale(&int(5)));
        assert_eq!(s, exp);
        let f = RatFunc::parse("x^2", &v).unwrap();
        assert_eq!(expand_factor(&f, &a).unwrap(), w(&[2]).scale(&int(2)));
    }

    #[test]
    fn integrability_simple() {
        let v = vars(&["x", "a"]);
        let a = Alphabet::parse(&v, &["1-x", "1-a"]).unwrap();
        assert!(!integrability_check(&w(&[0, 1]), &a).holds());
        assert_eq!(integrability_check(&w(&[0]), &a), Integrability::Vacuous);
        // (1-x) ⊗ (1-a) + (1-a) ⊗ (1-x) is a product of logs, hence integrable.
        let s = w(&[0, 1]).add(&w(&[1, 0]));
        assert_eq!(integrability_check(&s, &a), Integrability::Integrable);
        let one = vars(&["x"]);
        let b = Alphabet::parse(&one, &["x", "1-x"]).unwrap();
        assert_eq!(integrability_check(&w(&[0, 1]), &b), Integrability::Vacuous);
    }

    #[test]
    fn json_round_trip() {
        let v = vars(&["x"]);
        let a = Alphabet::parse(&v, &["2", "x", "1-x"]).unwrap();
        let s = w(&[0, 2]).add(&w(&[1, 1]).scale(&rat(-3, 4)));
        let j = s.to_json(&a);
        assert_eq!(Symbol::from_json(&j, &a).unwrap(), s);
        let text = serde_json::to_string(&j).unwrap();
        let again: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), text);
        assert_eq!(s.display(&a), "[2 | (1 - x)] - 3/4*[x | x]");
    }
}
