//! Integration of symbols: partition-filtered exact linear solves over an
//! ansatz of indecomposable functions, then fixing of kernel constants by
//! high-precision evaluation.

use crate::alphabet::{candidate_args_depth1, candidate_args_depthk, Alphabet, Bounds};
use crate::exact_arith::{RatFunc, Rational};
use crate::mpl::{symbol_of, FuncExpr, MplError, NamedConstant};
use crate::numeric::{eval_mpl, integer_relation, BigFloat, NumError};
use crate::tensor::{integrability_check, partitions_desc, project_partition, Partition, Symbol, TensorError, Word};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("symbol is not integrable")]
    NotIntegrable,
    #[error("no solution at partition {partition}; unmatched projection has {} terms", unmatched.len())]
    Unsolvable { partition: Partition, unmatched: Symbol },
    #[error("constant fixing failed: {0}")]
    ReconstructionFailed(String),
    #[error(transparent)]
    Mpl(#[from] MplError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// One ansatz function with its precomputed symbol.
#[derive(Clone, Debug)]
pub struct BasisFn {
    pub expr: FuncExpr,
    pub symbol: Symbol,
    /// Distinct letters in the arguments, used to order columns.
    pub letters: usize,
}

/// Indecomposable functions per weight, columns ordered by
/// (fewest letters in the arguments, catalog order).
#[derive(Clone, Debug, Default)]
pub struct AnsatzBasis {
    pub per_weight: BTreeMap<usize, Vec<BasisFn>>,
}

fn arg_functions(e: &FuncExpr) -> Vec<&RatFunc> {
    match e {
        FuncExpr::G { args, x } => args.iter().chain(std::iter::once(x)).collect(),
        FuncExpr::Li { args, .. } => args.iter().collect(),
        FuncExpr::H { x, .. } | FuncExpr::Nielsen { x, .. } | FuncExpr::Log(x) => vec![x],
        FuncExpr::Sum(ts) => ts.iter().flat_map(|(_, t)| arg_functions(t)).collect(),
        FuncExpr::Product(fs) => fs.iter().flat_map(arg_functions).collect(),
        FuncExpr::Power(f, _) => arg_functions(f),
        FuncExpr::Scalar(_) | FuncExpr::Const(_) => vec![],
    }
}

/// `log` of a letter, with the sign chosen so the argument is positive
/// where every variable equals `1/3`.
pub fn letter_log(a: &Alphabet, i: usize) -> FuncExpr {
    let f = RatFunc::from_poly(a.letter(i).clone());
    let pt = vec![Rational::new(1.into(), 3.into()); a.vars().len()];
    match f.eval(&pt) {
        Ok(v) if v < Rational::zero() => FuncExpr::log(-f),
        _ => FuncExpr::log(f),
    }
}

fn count_letters(e: &FuncExpr, a: &Alphabet) -> usize {
    let mut set = BTreeSet::new();
    for f in arg_functions(e) {
        if let Ok(v) = a.decompose(f) {
            set.extend(v.iter().map(|(i, _)| i));
        }
    }
    set.len()
}

impl AnsatzBasis {
    /// Symbols are computed in parallel; a function whose symbol cannot be
    /// expressed over the alphabet is an error.
    pub fn from_functions(fns: BTreeMap<usize, Vec<FuncExpr>>, a: &Alphabet) -> Result<Self, IntegrateError> {
        let mut per_weight = BTreeMap::new();
        for (w, list) in fns {
            let mut v = list
                .into_par_iter()
                .map(|expr| {
                    let symbol = symbol_of(&expr, a)?;
                    let letters = count_letters(&expr, a);
                    Ok(BasisFn { expr, symbol, letters })
                })
                .collect::<Result<Vec<_>, MplError>>()?;
            v.sort_by_key(|b| b.letters);
            per_weight.insert(w, v);
        }
        Ok(AnsatzBasis { per_weight })
    }

    /// Logs of the letters, `Li_n(R)` on the depth-one candidate arguments for
    /// `2 ≤ n ≤ max_weight`, and `Li_{2,2}(R_1, R_2)` on compatible pairs at
    /// weight four.
    pub fn generic(a: &Alphabet, bounds: Bounds, max_weight: usize) -> Result<Self, IntegrateError> {
        let vars = a.vars();
        let mut fns: BTreeMap<usize, Vec<FuncExpr>> = BTreeMap::new();
        fns.insert(1, (0..a.len()).map(|i| letter_log(a, i)).collect());
        let cands: Vec<_> = candidate_args_depth1(a, bounds).into_iter().filter(|c| !c.is_constant(a)).collect();
        let args: Vec<RatFunc> = cands.iter().map(|c| c.realize(a)).collect();
        for w in 2..=max_weight {
            fns.insert(w, args.iter().map(|r| FuncExpr::li(w as u32, r.embed(vars).unwrap_or_else(|_| r.clone()))).collect());
        }
        if max_weight >= 4 {
            for pair in candidate_args_depthk(&cands, 2, a) {
                let e = FuncExpr::Li { m: vec![2, 2], args: vec![args[pair[0]].clone(), args[pair[1]].clone()] };
                fns.get_mut(&4).expect("weight four present").push(e);
            }
        }
        Self::from_functions(fns, a)
    }

    pub fn weight(&self, w: usize) -> &[BasisFn] {
        self.per_weight.get(&w).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// A product of basis functions, one per part of the partition.
#[derive(Clone, Debug)]
pub struct AnsatzElement {
    pub factors: Vec<FuncExpr>,
    pub symbol: Symbol,
}

impl AnsatzElement {
    pub fn expr(&self) -> FuncExpr {
        product_expr(&self.factors)
    }
}

/// Product with repeated factors written as powers.
pub fn product_expr(factors: &[FuncExpr]) -> FuncExpr {
    let mut grouped: Vec<(FuncExpr, u32)> = Vec::new();
    for f in factors {
        match grouped.iter_mut().find(|(g, _)| g == f) {
            Some((_, k)) => *k += 1,
            None => grouped.push((f.clone(), 1)),
        }
    }
    let mut out: Vec<FuncExpr> = grouped
        .into_iter()
        .map(|(f, k)| if k == 1 { f } else { FuncExpr::Power(Box::new(f), k) })
        .collect();
    if out.len() == 1 {
        out.pop().expect("one factor")
    } else {
        FuncExpr::Product(out)
    }
}

/// Ansatz slice for a partition: for equal parts only non-decreasing index
/// tuples are kept, so each product appears once.
pub fn build_ansatz(lambda: &Partition, basis: &AnsatzBasis) -> Vec<AnsatzElement> {
    let parts = lambda.parts();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for (r, &p) in parts.iter().enumerate() {
        let n = basis.weight(p).len();
        let mut next = Vec::new();
        for t in &tuples {
            let lo = if r > 0 && parts[r - 1] == p { t[r - 1] } else { 0 };
            for i in lo..n {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        tuples = next;
    }
    tuples
        .into_par_iter()
        .map(|t| {
            let fns: Vec<&BasisFn> = t.iter().zip(parts).map(|(&i, &p)| &basis.weight(p)[i]).collect();
            let mut symbol = Symbol::unit();
            for f in &fns {
                symbol = symbol.shuffle(&f.symbol);
            }
            AnsatzElement { factors: fns.iter().map(|f| f.expr.clone()).collect(), symbol }
        })
        .collect()
}

/// Convenience: the generic basis for `a` sliced at `lambda`.
pub fn build_ansatz_generic(lambda: &Partition, a: &Alphabet, bounds: Bounds) -> Result<Vec<AnsatzElement>, IntegrateError> {
    let basis = AnsatzBasis::generic(a, bounds, lambda.parts().first().copied().unwrap_or(1))?;
    Ok(build_ansatz(lambda, &basis))
}

/// Solves `Σ c_i cols_i = rhs` over Q in word coordinates by reduced row
/// echelon form, free variables set to zero. `None` if inconsistent.
pub fn solve_exact(cols: &[Symbol], rhs: &Symbol) -> Option<Vec<Rational>> {
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut rows: Vec<Word> = Vec::new();
    for s in cols.iter().chain(std::iter::once(rhs)) {
        for (w, _) in s.terms() {
            if !index.contains_key(w) {
                index.insert(w.clone(), rows.len());
                rows.push(w.clone());
            }
        }
    }
    let n = cols.len();
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n + 1]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for (w, c) in s.terms() {
            m[index[w]][j] = c.clone();
        }
    }
    for (w, c) in rhs.terms() {
        m[index[w]][n] = c.clone();
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][j].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][j].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[j].is_zero() {
                let f = row[j].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v = &*v - &f * pv;
                    }
                }
            }
        }
        pivots.push(j);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &j) in pivots.iter().enumerate() {
        x[j] = m[i][n].clone();
    }
    Some(x)
}

/// One solved layer of the induction.
#[derive(Clone, Debug)]
pub struct Layer {
    pub partition: Partition,
    pub terms: Vec<(Rational, FuncExpr)>,
}

/// Coefficients for one partition level. The residual's projection must be
/// matched exactly by the projections of the ansatz slice.
pub fn solve_partition_level(
    residual: &Symbol,
    lambda: &Partition,
    slice: &[AnsatzElement],
) -> Result<Vec<Rational>, IntegrateError> {
    let target = project_partition(lambda, residual)?;
    if target.is_zero() {
        return Ok(vec![Rational::zero(); slice.len()]);
    }
    let cols = slice
        .par_iter()
        .map(|e| project_partition(lambda, &e.symbol))
        .collect::<Result<Vec<_>, _>>()?;
    solve_exact(&cols, &target).ok_or_else(|| IntegrateError::Unsolvable { partition: lambda.clone(), unmatched: target })
}

/// Result of integrating a symbol.
#[derive(Clone, Debug)]
pub struct IntegrationResult {
    pub expression: FuncExpr,
    pub residual: Symbol,
    pub layers: Vec<Layer>,
}

/// Reads a fully symmetric tensor as a polynomial in logarithms of letters:
/// `l_1 ⧢ ... ⧢ l_w` is the symbol of `Π log l_i`.
fn read_log_layer(s: &Symbol, a: &Alphabet) -> Result<Vec<(Rational, FuncExpr)>, IntegrateError> {
    let w = s.weight();
    let mut sorted: BTreeMap<Word, Rational> = BTreeMap::new();
    for (word, c) in s.terms() {
        let mut k = word.clone();
        k.sort();
        if &k == word {
            sorted.insert(k, c.clone());
        }
    }
    let mut terms = Vec::new();
    let mut rebuilt = Symbol::zero(w);
    for (word, c) in sorted {
        let mut mult = BigInt::one();
        let mut run = 1u64;
        for i in 1..word.len() {
            if word[i] == word[i - 1] {
                run += 1;
                mult *= run;
            } else {
                run = 1;
            }
        }
        let coeff = c / Rational::from_integer(mult);
        let mut sym = Symbol::unit();
        let mut factors = Vec::new();
        for &l in &word {
            sym = sym.shuffle(&Symbol::letter(l));
            factors.push(letter_log(a, l as usize));
        }
        rebuilt.add_scaled(&sym, &coeff);
        terms.push((coeff, product_expr(&factors)));
    }
    if rebuilt != *s {
        return Err(IntegrateError::Unsolvable { partition: Partition(vec![1; w]), unmatched: s.sub(&rebuilt) });
    }
    Ok(terms)
}

/// Walks the partitions of the weight from `(w)` down, subtracting each solved
/// layer; the all-ones layer is read off from the symmetric remainder.
pub fn integrate_symbol(s: &Symbol, a: &Alphabet, basis: &AnsatzBasis) -> Result<IntegrationResult, IntegrateError> {
    if !integrability_check(s, a).holds() {
        return Err(IntegrateError::NotIntegrable);
    }
    let w = s.weight();
    let mut residual = s.clone();
    let mut layers = Vec::new();
    let mut expr_terms: Vec<(Rational, FuncExpr)> = Vec::new();
    if residual.is_zero() || w == 0 {
        let terms = if w == 0 { residual.terms().map(|(_, c)| (c.clone(), FuncExpr::Scalar(Rational::one()))).collect() } else { vec![] };
        return Ok(IntegrationResult { expression: FuncExpr::Sum(terms), residual: Symbol::zero(w), layers });
    }
    for lambda in partitions_desc(w) {
        if lambda.len() == w {
            let terms = read_log_layer(&residual, a)?;
            residual = Symbol::zero(w);
            expr_terms.extend(terms.iter().cloned());
            layers.push(Layer { partition: lambda, terms });
            break;
        }
        if project_partition(&lambda, &residual)?.is_zero() {
            layers.push(Layer { partition: lambda, terms: vec![] });
            continue;
        }
        let slice = build_ansatz(&lambda, basis);
        let coeffs = solve_partition_level(&residual, &lambda, &slice)?;
        let mut terms = Vec::new();
        for (c, e) in coeffs.iter().zip(&slice) {
            if !c.is_zero() {
                residual.add_scaled(&e.symbol, &-c);
                terms.push((c.clone(), e.expr()));
            }
        }
        debug_assert!(project_partition(&lambda, &residual)?.is_zero());
        expr_terms.extend(terms.iter().cloned());
        layers.push(Layer { partition: lambda, terms });
    }
    Ok(IntegrationResult { expression: FuncExpr::Sum(expr_terms), residual, layers })
}

/// Weight-`w` kernel ansatz built from the weight-one and weight-two members
/// of a spanning set.
pub fn default_kernel(w: usize, b1: &[FuncExpr], b2: &[FuncExpr]) -> Vec<FuncExpr> {
    let pi = FuncExpr::Const(NamedConstant::Pi);
    let z3 = FuncExpr::Const(NamedConstant::Zeta3);
    let pi2 = FuncExpr::Power(Box::new(pi.clone()), 2);
    match w {
        2 => vec![pi2],
        3 => std::iter::once(z3.clone()).chain(b1.iter().map(|b| pi2.clone().mul(b.clone()))).collect(),
        4 => {
            let ln2_4 = FuncExpr::Power(Box::new(FuncExpr::Const(NamedConstant::Ln2)), 4);
            let li4 = FuncExpr::Const(NamedConstant::Li4Half)
                .add(ln2_4.scale(Rational::new(BigInt::one(), BigInt::from(24))));
            let mut k = vec![li4, FuncExpr::Power(Box::new(pi), 4)];
            k.extend(b1.iter().map(|b| z3.clone().mul(b.clone())));
            k.extend(b2.iter().map(|b| pi2.clone().mul(b.clone())));
            for i in 0..b1.len() {
                for j in i..b1.len() {
                    k.push(pi2.clone().mul(product_expr(&[b1[i].clone(), b1[j].clone()])));
                }
            }
            k
        }
        _ => vec![],
    }
}

/// Default evaluation points in `(0, 1)`.
pub fn default_points() -> Vec<Rational> {
    [(1, 5), (1, 4), (1, 3), (2, 5), (1, 2)].iter().map(|&(p, q)| Rational::new(p.into(), q.into())).collect()
}

/// `base` extended by fractions `p/q` in `[1/10, 1/2]` of increasing
/// denominator until `n` points are available.
pub fn sample_points(base: &[Rational], n: usize) -> Vec<Rational> {
    let mut pts: Vec<Rational> = base.to_vec();
    let lo = Rational::new(1.into(), 10.into());
    let hi = Rational::new(1.into(), 2.into());
    let mut q = 2i64;
    while pts.len() < n {
        for p in 1..q {
            let r = Rational::new(p.into(), q.into());
            if pts.len() < n && r >= lo && r <= hi && !pts.contains(&r) {
                pts.push(r);
            }
        }
        q += 1;
    }
    pts
}

/// Outcome of constant fixing.
#[derive(Clone, Debug)]
pub struct ConstantFix {
    pub expression: FuncExpr,
    pub coefficients: Vec<(Rational, FuncExpr)>,
    pub points: Vec<Rational>,
    /// `|target - expression|` at each point.
    pub residuals: Vec<BigFloat>,
}

/// Numerical target for constant fixing.
pub type Oracle<'a> = dyn Fn(&Rational, u32) -> Result<BigFloat, NumError> + Sync + 'a;

/// Fits `target - candidate = Σ d_j k_j` at the sample points with rational
/// `d_j`. The square system on the best-pivoting points is solved at extra
/// precision, coefficients are reconstructed with denominators up to
/// `maxden`, and the result is checked at every point to `10^{-(digits-10)}`.
pub fn fix_constants(
    target: &Oracle<'_>,
    candidate: &FuncExpr,
    kernel: &[FuncExpr],
    points: &[Rational],
    digits: u32,
    maxden: &BigInt,
) -> Result<ConstantFix, IntegrateError> {
    let m = kernel.len();
    let work = digits + 30;
    // Kernel elements sharing the same x-dependent factor are a single
    // unknown over the reals; their rational split is recovered afterwards.
    let mut groups: BTreeMap<String, (FuncExpr, Vec<usize>)> = BTreeMap::new();
    let mut const_part = Vec::with_capacity(m);
    for (j, k) in kernel.iter().enumerate() {
        let (c, f) = split_constant_factor(k);
        groups.entry(f.to_string()).or_insert_with(|| (f, vec![])).1.push(j);
        const_part.push(c);
    }
    let groups: Vec<(FuncExpr, Vec<usize>)> = groups.into_values().collect();
    let pts = sample_points(points, points.len().max(groups.len() + 3));
    let rows = pts
        .par_iter()
        .map(|x| {
            let p = std::slice::from_ref(x);
            let t = target(x, work)?;
            let c = eval_mpl(candidate, p, work)?;
            let ks = kernel.iter().map(|k| eval_mpl(k, p, work)).collect::<Result<Vec<_>, _>>()?;
            let gs = groups.iter().map(|(f, _)| eval_mpl(f, p, work)).collect::<Result<Vec<_>, _>>()?;
            Ok((t.sub(&c), ks, gs))
        })
        .collect::<Result<Vec<_>, NumError>>()?;
    let consts = const_part.iter().map(|c| eval_mpl(c, &pts[..1], work)).collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = vec![Rational::zero(); m];
    if m > 0 {
        let system: Vec<(BigFloat, Vec<BigFloat>)> = rows.iter().map(|(t, _, gs)| (t.clone(), gs.clone())).collect();
        let sol = float_solve(&system, groups.len())
            .ok_or_else(|| IntegrateError::ReconstructionFailed("kernel columns are numerically dependent".into()))?;
        for ((f, idx), v) in groups.iter().zip(&sol) {
            let mut xs = vec![v.clone()];
            xs.extend(idx.iter().map(|&j| consts[j].clone()));
            let rel = integer_relation(&xs, digits, maxden).ok_or_else(|| {
                IntegrateError::ReconstructionFailed(format!("coefficient of {} = {}", f, v.to_decimal(20)))
            })?;
            for (&j, a) in idx.iter().zip(&rel[1..]) {
                coeffs[j] = Rational::new(-a.clone(), rel[0].clone());
            }
        }
    }
    let mut terms: Vec<(Rational, FuncExpr)> = Vec::new();
    let mut expression = match candidate {
        FuncExpr::Sum(ts) => ts.clone(),
        e => vec![(Rational::one(), e.clone())],
    };
    for (c, k) in coeffs.iter().zip(kernel) {
        if !c.is_zero() {
            terms.push((c.clone(), k.clone()));
            expression.push((c.clone(), k.clone()));
        }
    }
    let expression = FuncExpr::Sum(expression);
    let tol = Rational::new(BigInt::one(), BigInt::from(10).pow(digits.saturating_sub(10)));
    let mut residuals = Vec::new();
    for (x, (diff, ks, _)) in pts.iter().zip(&rows) {
        let mut r = diff.clone();
        for (c, k) in coeffs.iter().zip(ks) {
            r = r.sub(&k.mul_rational(c));
        }
        let r = r.abs();
        if r.to_rational() > tol {
            return Err(IntegrateError::ReconstructionFailed(format!("residual {} at x = {}", r.to_decimal(digits + 5), x)));
        }
        residuals.push(r);
    }
    Ok(ConstantFix { expression, coefficients: terms, points: pts, residuals })
}

fn atom_is_constant(e: &FuncExpr) -> bool {
    match e {
        FuncExpr::Scalar(_) | FuncExpr::Const(_) => true,
        FuncExpr::G { args, x } => x.is_constant() && args.iter().all(|a| a.is_constant()),
        FuncExpr::Li { args, .. } => args.iter().all(|a| a.is_constant()),
        FuncExpr::H { x, .. } | FuncExpr::Nielsen { x, .. } | FuncExpr::Log(x) => x.is_constant(),
        FuncExpr::Sum(ts) => ts.iter().all(|(_, t)| atom_is_constant(t)),
        FuncExpr::Product(fs) => fs.iter().all(atom_is_constant),
        FuncExpr::Power(b, _) => atom_is_constant(b),
    }
}

/// Splits `c * f(x)` into its constant and x-dependent factors; sums that
/// are not a single product stay whole on the x-dependent side.
pub fn split_constant_factor(e: &FuncExpr) -> (FuncExpr, FuncExpr) {
    let one = || FuncExpr::scalar(Rational::one());
    if atom_is_constant(e) {
        return (e.clone(), one());
    }
    let terms = e.expand();
    if terms.len() != 1 {
        return (one(), e.clone());
    }
    let (c, fs) = &terms[0];
    let (cs, vs): (Vec<FuncExpr>, Vec<FuncExpr>) = fs.iter().cloned().partition(atom_is_constant);
    let mut cs = cs;
    cs.push(FuncExpr::scalar(c.clone()));
    (product_expr(&cs), product_expr(&vs))
}

/// Gaussian elimination with partial pivoting over rows of `(rhs, columns)`;
/// the pivot rows form the square system that is solved.
fn float_solve(rows: &[(BigFloat, Vec<BigFloat>)], m: usize) -> Option<Vec<BigFloat>> {
    let mut a: Vec<Vec<BigFloat>> = rows
        .iter()
        .map(|(b, ks)| {
            let mut r = ks.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let bits = a[0][0].bits();
    let eps = BigFloat::from_rational(&Rational::new(BigInt::one(), BigInt::one() << (bits / 2)), bits);
    for j in 0..m {
        let p = (j..a.len()).max_by(|&x, &y| a[x][j].abs().partial_cmp(&a[y][j].abs()).expect("same precision"))?;
        if a[p][j].abs() < eps {
            return None;
        }
        a.swap(j, p);
        let piv = a[j].clone();
        for row in a.iter_mut().skip(j + 1) {
            if row[j].is_zero() {
                continue;
            }
            let f = row[j].div(&piv[j]);
            for k in j..=m {
                row[k] = row[k].sub(&f.mul(&piv[k]));
            }
        }
    }
    let mut x = vec![BigFloat::zero(bits); m];
    for j in (0..m).rev() {
        let mut s = a[j][m].clone();
        for k in j + 1..m {
            s = s.sub(&a[j][k].mul(&x[k]));
        }
        x[j] = s.div(&a[j][j]);
    }
    Some(x)
}

/// Oracle evaluating a function expression directly.
pub fn expr_oracle(e: &FuncExpr) -> impl Fn(&Rational, u32) -> Result<BigFloat, NumError> + Sync + '_ {
    move |x, digits| eval_mpl(e, std::slice::from_ref(x), digits)
}
