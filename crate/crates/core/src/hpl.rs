//! Harmonic polylogarithms: the alphabet `{2, x, 1-x, 1+x}`, the admissible
//! arguments `± 2^δ x^α (1-x)^β (1+x)^γ`, a spanning set up to weight four
//! and the reduction of every HPL onto it.

use crate::alphabet::{candidate_args_depth1, Alphabet, Bounds};
use crate::exact_arith::{vars, RatFunc, Rational, Vars};
use crate::integrator::{
    default_kernel, default_points, fix_constants, integrate_symbol, AnsatzBasis, ConstantFix, IntegrateError,
    IntegrationResult,
};
use crate::mpl::{symbol_of, FuncExpr, MplError};
use crate::numeric::{eval_mpl, BigFloat, NumError};
use crate::tensor::Symbol;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

/// The session variable `x` and the alphabet `{2, x, 1-x, 1+x}`.
pub fn hpl_alphabet() -> (Vars, Alphabet) {
    let v = vars(&["x"]);
    let a = Alphabet::parse(&v, &["2", "x", "1-x", "1+x"]).expect("fixed alphabet");
    (v, a)
}

fn rf(s: &str, v: &Vars) -> RatFunc {
    RatFunc::parse(s, v).expect("fixed expression")
}

/// `R^s_{αβγδ} = s 2^δ x^α (1-x)^β (1+x)^γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table2Row {
    pub s: i8,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

impl Table2Row {
    pub const fn new(s: i8, alpha: i64, beta: i64, gamma: i64, delta: i64) -> Self {
        Table2Row { s, alpha, beta, gamma, delta }
    }

    pub fn inverse(&self) -> Self {
        Table2Row::new(self.s, -self.alpha, -self.beta, -self.gamma, -self.delta)
    }

    pub fn is_constant(&self) -> bool {
        self.alpha == 0 && self.beta == 0 && self.gamma == 0
    }

    pub fn value(&self, v: &Vars) -> RatFunc {
        let mut r = RatFunc::constant(v, Rational::from_integer(self.s.into()));
        let pw = |f: &str, e: i64| rf(f, v).powi(e as i32).expect("nonzero base");
        r = &r * &pw("2", self.delta);
        r = &r * &pw("x", self.alpha);
        r = &r * &pw("1-x", self.beta);
        &r * &pw("1+x", self.gamma)
    }
}

impl fmt::Display for Table2Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.s > 0 { '+' } else { '-' };
        write!(f, "({s}, {}, {}, {}, {})", self.alpha, self.beta, self.gamma, self.delta)
    }
}

/// The twenty listed solutions of `1 - R = R'`; every other solution is the
/// inverse of one of them.
pub fn table2_listed() -> Vec<Table2Row> {
    [
        (-1, 0, 0, 0, 0),
        (1, 0, 0, 0, -1),
        (1, 1, 0, 0, 0),
        (-1, 1, 0, 0, 0),
        (1, 0, 1, 0, 0),
        (1, 0, 0, -1, 0),
        (1, 2, 0, 0, 0),
        (1, 0, 1, 1, 0),
        (-1, 1, -1, 0, 0),
        (1, 1, 0, -1, 0),
        (1, 0, 1, -1, 0),
        (-1, 0, 1, -1, 0),
        (-1, 2, -1, -1, 0),
        (1, 0, 2, -2, 0),
        (1, 0, 1, 0, -1),
        (1, 0, 0, 1, -1),
        (-1, 1, -1, 0, 1),
        (1, 1, 0, -1, 1),
        (1, 1, 0, -2, 2),
        (-1, 1, -2, 0, 2),
    ]
    .iter()
    .map(|&(s, a, b, c, d)| Table2Row::new(s, a, b, c, d))
    .collect()
}

/// All solutions of `1 - R^s_{αβγδ} = R^{s'}_{α'β'γ'δ'}` within the bounds,
/// through the generic candidate search on the alphabet.
pub fn table2_enumerate(bounds: Bounds) -> Vec<Table2Row> {
    let (v, a) = hpl_alphabet();
    let idx = |s: &str| a.index_of(rf(s, &v).num()).or_else(|| a.index_of(&rf(s, &v).num().normalized()));
    let (i2, ix, i1m, i1p) = (idx("2"), idx("x"), idx("1-x"), idx("1+x"));
    let probe = vec![Rational::new(1.into(), 3.into())];
    let mut rows: Vec<Table2Row> = candidate_args_depth1(&a, bounds)
        .into_iter()
        .map(|c| {
            let e = |i: Option<usize>| i.map(|i| c.v.get(i)).unwrap_or(0);
            let mut row = Table2Row::new(1, e(ix), e(i1m), e(i1p), e(i2));
            let want = c.realize(&a).eval(&probe).expect("regular at 1/3");
            let have = row.value(&v).eval(&probe).expect("regular at 1/3");
            if want.is_negative() != have.is_negative() {
                row.s = -1;
            }
            row
        })
        .collect();
    rows.sort();
    rows.dedup();
    rows
}

/// Indecomposable functions per weight.
#[derive(Clone, Debug)]
pub struct SpanningSet {
    pub by_weight: BTreeMap<usize, Vec<FuncExpr>>,
}

impl SpanningSet {
    pub fn weight(&self, w: usize) -> &[FuncExpr] {
        self.by_weight.get(&w).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

fn li(n: u32, s: &str, v: &Vars) -> FuncExpr {
    FuncExpr::li(n, rf(s, v))
}

/// The spanning set `B_w^{(i)}`: 4 logarithms, 3 dilogarithms,
/// 8 trilogarithms, 15 `Li_4` and 3 `Li_{2,2}`, in catalog order.
pub fn spanning_set(v: &Vars) -> SpanningSet {
    let mut m = BTreeMap::new();
    m.insert(1, ["x", "1-x", "1+x", "2"].iter().map(|s| FuncExpr::log(rf(s, v))).collect());
    m.insert(2, ["x", "-x", "(1-x)/2"].iter().map(|s| li(2, s, v)).collect());
    m.insert(
        3,
        ["x", "-x", "1-x", "1/(1+x)", "(1+x)/2", "(1-x)/2", "(1-x)/(1+x)", "2x/(x-1)"]
            .iter()
            .map(|s| li(3, s, v))
            .collect(),
    );
    let mut w4: Vec<FuncExpr> = [
        "x",
        "-x",
        "1-x",
        "1/(1+x)",
        "x/(x-1)",
        "x/(x+1)",
        "(1+x)/2",
        "(1-x)/2",
        "(1-x)/(1+x)",
        "(x-1)/(x+1)",
        "2x/(x+1)",
        "2x/(x-1)",
        "1-x^2",
        "x^2/(x^2-1)",
        "4x/(x+1)^2",
    ]
    .iter()
    .map(|s| li(4, s, v))
    .collect();
    for (a, b) in [("-1", "x"), ("1/2", "2x/(x+1)"), ("1/2", "2x/(x-1)")] {
        w4.push(FuncExpr::Li { m: vec![2, 2], args: vec![rf(a, v), rf(b, v)] });
    }
    m.insert(4, w4);
    SpanningSet { by_weight: m }
}

/// The smaller set sufficient for singularities in `{0, 1}`.
pub fn reduced_spanning_set(v: &Vars) -> SpanningSet {
    let full = spanning_set(v);
    let pick = |w: usize, idx: &[usize]| idx.iter().map(|&i| full.weight(w)[i - 1].clone()).collect::<Vec<_>>();
    let mut m = BTreeMap::new();
    m.insert(1, pick(1, &[1, 2]));
    m.insert(2, pick(2, &[1]));
    m.insert(3, pick(3, &[1, 3]));
    m.insert(4, pick(4, &[1, 3, 5]));
    SpanningSet { by_weight: m }
}

/// Index vector of `H(a_1, ..., a_w; x)` with entries in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HplIndex(pub Vec<i8>);

impl HplIndex {
    pub fn new(a: Vec<i8>) -> Result<Self, MplError> {
        if a.is_empty() || a.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(MplError::PreconditionViolated(format!("HPL index {a:?}")));
        }
        Ok(HplIndex(a))
    }

    /// Reads `0,0,1,1`.
    pub fn parse(s: &str) -> Result<Self, MplError> {
        let a = s
            .split(',')
            .map(|t| t.trim().parse::<i8>().map_err(|_| MplError::Parse(format!("HPL index `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(a)
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&v| v == 0 || v == 1)
    }

    pub fn to_expr(&self, v: &Vars) -> FuncExpr {
        FuncExpr::H { a: self.0.clone(), x: RatFunc::var(v, 0) }
    }

    /// All `3^w` index vectors of weight `w`, in lexicographic order.
    pub fn all(w: usize) -> Vec<HplIndex> {
        let mut out = vec![vec![]];
        for _ in 0..w {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i8>| {
                    [-1i8, 0, 1].into_iter().map(move |d| {
                        let mut q = p.clone();
                        q.push(d);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(HplIndex).collect()
    }
}

impl fmt::Display for HplIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "H({}; x)", s.join(","))
    }
}

/// Symbol of an HPL over the alphabet `{2, x, 1-x, 1+x}`.
pub fn hpl_symbol(h: &HplIndex) -> Result<Symbol, MplError> {
    let (v, a) = hpl_alphabet();
    symbol_of(&h.to_expr(&v), &a)
}

fn basis_for(binary: bool) -> Result<&'static AnsatzBasis, IntegrateError> {
    static FULL: OnceLock<AnsatzBasis> = OnceLock::new();
    static SMALL: OnceLock<AnsatzBasis> = OnceLock::new();
    let cell = if binary { &SMALL } else { &FULL };
    if let Some(b) = cell.get() {
        return Ok(b);
    }
    let (v, a) = hpl_alphabet();
    let set = if binary { reduced_spanning_set(&v) } else { spanning_set(&v) };
    let b = AnsatzBasis::from_functions(set.by_weight, &a)?;
    Ok(cell.get_or_init(|| b))
}

/// Outcome of reducing one HPL.
#[derive(Clone, Debug)]
pub struct HplReduction {
    pub index: HplIndex,
    pub expression: FuncExpr,
    pub integration: IntegrationResult,
    pub constants: ConstantFix,
}

/// Evaluation settings for constant fixing.
#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub digits: u32,
    pub maxden: BigInt,
    pub points: Vec<Rational>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { digits: 40, maxden: BigInt::from(1u32 << 16), points: default_points() }
    }
}

/// Integrates the symbol over the spanning set (the smaller one when all
/// indices are in `{0, 1}`) and fixes the kernel constants against the
/// direct series evaluation of the HPL.
pub fn hpl_reduce(h: &HplIndex, opts: &ReduceOptions) -> Result<HplReduction, IntegrateError> {
    let (v, a) = hpl_alphabet();
    let s = hpl_symbol(h)?;
    let integration = integrate_symbol(&s, &a, basis_for(h.is_binary())?)?;
    let full = spanning_set(&v);
    let kernel = default_kernel(h.weight(), full.weight(1), full.weight(2));
    let target = h.to_expr(&v);
    let oracle = |x: &Rational, d: u32| -> Result<BigFloat, NumError> { eval_mpl(&target, std::slice::from_ref(x), d) };
    let constants = fix_constants(&oracle, &integration.expression, &kernel, &opts.points, opts.digits, &opts.maxden)?;
    Ok(HplReduction { index: h.clone(), expression: constants.expression.clone(), integration, constants })
}

/// `|eval(H) - eval(f)|` at `x`.
pub fn numeric_gap(h: &HplIndex, f: &FuncExpr, x: &Rational, digits: u32) -> Result<BigFloat, NumError> {
    let (v, _) = hpl_alphabet();
    let p = std::slice::from_ref(x);
    Ok(eval_mpl(&h.to_expr(&v), p, digits)?.sub(&eval_mpl(f, p, digits)?).abs())
}

/// True when the symbol of `f` equals the HPL symbol.
pub fn symbol_matches(h: &HplIndex, f: &FuncExpr) -> Result<bool, MplError> {
    let (_, a) = hpl_alphabet();
    Ok(symbol_of(f, &a)? == hpl_symbol(h)?)
}

/// Expanded monomials keyed by their sorted factors, with zero terms dropped.
pub fn canonical_terms(e: &FuncExpr) -> BTreeMap<Vec<String>, Rational> {
    let mut m: BTreeMap<Vec<String>, Rational> = BTreeMap::new();
    for (c, fs) in e.expand() {
        let mut k: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
        k.sort();
        *m.entry(k).or_insert_with(Rational::zero) += c;
    }
    m.retain(|_, c| !c.is_zero());
    m
}

/// Counts the `Li_{2,2}` atoms in an expression.
pub fn count_depth_two(e: &FuncExpr) -> usize {
    e.expand()
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .flat_map(|(_, fs)| fs.iter())
        .filter(|f| matches!(f, FuncExpr::Li { m, .. } if m.len() > 1))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn table2_rows_and_inverses() {
        let got = table2_enumerate(Bounds::default());
        let mut want: Vec<Table2Row> = table2_listed().iter().flat_map(|r| [r.clone(), r.inverse()]).collect();
        want.sort();
        want.dedup();
        assert_eq!(got, want);
        assert_eq!(got.len(), 39);
        assert!(got.contains(&Table2Row::new(1, 0, 1, 0, -1)));
        let c = Table2Row::new(-1, 0, 0, 0, 0);
        assert!(got.contains(&c) && c.is_constant());
        let (v, _) = hpl_alphabet();
        assert_eq!(Table2Row::new(1, 1, 0, -2, 2).value(&v), rf("4x/(1+x)^2", &v));
    }

    #[test]
    fn listed_rows_solve_constraint() {
        let (v, a) = hpl_alphabet();
        for r in table2_listed() {
            let comp = &RatFunc::one(&v) - &r.value(&v);
            assert!(a.decompose(&comp).is_ok(), "{r}");
        }
    }

    #[test]
    fn symbols() {
        let (v, a) = hpl_alphabet();
        let s = hpl_symbol(&HplIndex::parse("0,0,1,1").unwrap()).unwrap();
        let w = symbol_of(&FuncExpr::parse("G(0,0,1,1;x)", &v).unwrap(), &a).unwrap();
        assert_eq!(s, w);
        let h = hpl_symbol(&HplIndex::parse("-1,1").unwrap()).unwrap();
        let g = symbol_of(&FuncExpr::parse("G(-1,1;x)", &v).unwrap(), &a).unwrap();
        assert_eq!(h, g.neg());
        assert_eq!(hpl_symbol(&HplIndex::parse("0").unwrap()).unwrap(), symbol_of(&FuncExpr::log(rf("x", &v)), &a).unwrap());
    }

    #[test]
    fn spanning_symbols_over_alphabet() {
        let (v, a) = hpl_alphabet();
        let set = spanning_set(&v);
        assert_eq!([1, 2, 3, 4].map(|w| set.weight(w).len()), [4, 3, 8, 18]);
        for f in set.by_weight.values().flatten() {
            symbol_of(f, &a).unwrap();
        }
    }

    #[test]
    fn reduce_weight_two() {
        let h = HplIndex::parse("-1,1").unwrap();
        let r = hpl_reduce(&h, &ReduceOptions::default()).unwrap();
        assert!(symbol_matches(&h, &r.expression).unwrap());
        for x in [rat(1, 4), rat(1, 3), rat(1, 2)] {
            assert!(numeric_gap(&h, &r.expression, &x, 40).unwrap().to_f64() < 1e-25);
        }
        let pi2 = r
            .constants.coefficients.iter().find(|(_, k)| k.to_string() == "pi^2").unwrap();
        assert_eq!(pi2.0, rat(1, 12));
    }

    #[test]
    fn reduce_0011() {
        let (v, _) = hpl_alphabet();
        let h = HplIndex::parse("0,0,1,1").unwrap();
        let r = hpl_reduce(&h, &ReduceOptions::default()).unwrap();
        let want = FuncExpr::parse(
            "Li4(x) - Li4(1-x) + Li4(x/(x-1)) - Li3(x)*log(1-x) + zeta3*log(1-x) + 1/24*log(1-x)^4 - 1/6*log(x)*log(1-x)^3 + 1/12*pi^2*log(1-x)^2 + 1/90*pi^4",
            &v,
        )
        .unwrap();
        assert_eq!(canonical_terms(&r.expression), canonical_terms(&want), "{}", r.expression);
        assert!(numeric_gap(&h, &want, &rat(1, 3), 40).unwrap().to_f64() < 1e-30);
    }
}
