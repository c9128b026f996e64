//! Function expressions built from multiple polylogarithms, their symbols,
//! and the standard rewritings between `G` and `Li` notation.

use crate::alphabet::{Alphabet, AlphabetError};
use crate::exact_arith::syntax::{self, Ast};
use crate::exact_arith::{fmt_rational, ArithError, RatFunc, Rational, Vars};
use crate::polygon::{mu, polygon_symbol, Polygon, PolygonError};
use crate::tensor::{expand_factor, shuffle_words, Symbol};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MplError {
    #[error("terms of different weight ({0} and {1}) in one sum")]
    MixedWeight(usize, usize),
    #[error("zero argument in `{0}`")]
    ZeroArgument(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("cannot read expression: {0}")]
    Parse(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedConstant {
    Pi,
    Zeta3,
    Ln2,
    Li4Half,
}

impl NamedConstant {
    pub fn weight(self) -> usize {
        match self {
            NamedConstant::Pi | NamedConstant::Ln2 => 1,
            NamedConstant::Zeta3 => 3,
            NamedConstant::Li4Half => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedConstant::Pi => "pi",
            NamedConstant::Zeta3 => "zeta3",
            NamedConstant::Ln2 => "ln2",
            NamedConstant::Li4Half => "Li4half",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "pi" | "π" => NamedConstant::Pi,
            "zeta3" => NamedConstant::Zeta3,
            "ln2" => NamedConstant::Ln2,
            "Li4half" => NamedConstant::Li4Half,
            _ => return None,
        })
    }
}

/// Expression tree over polylogarithms with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FuncExpr {
    Scalar(Rational),
    /// `G(a_1, ..., a_n; x)`.
    G { args: Vec<RatFunc>, x: RatFunc },
    /// `Li_{m_1,...,m_k}(x_1, ..., x_k)`, nested sums with `n_1 < ... < n_k`.
    Li { m: Vec<u32>, args: Vec<RatFunc> },
    /// Harmonic polylogarithm with entries in `{-1, 0, 1}`.
    H { a: Vec<i8>, x: RatFunc },
    /// Nielsen polylogarithm `S_{n,p}(x)`.
    Nielsen { n: u32, p: u32, x: RatFunc },
    Log(RatFunc),
    Const(NamedConstant),
    Sum(Vec<(Rational, FuncExpr)>),
    Product(Vec<FuncExpr>),
    Power(Box<FuncExpr>, u32),
}

impl FuncExpr {
    pub fn zero() -> Self {
        FuncExpr::Sum(vec![])
    }

    pub fn scalar(c: Rational) -> Self {
        FuncExpr::Scalar(c)
    }

    pub fn g(args: Vec<RatFunc>, x: RatFunc) -> Self {
        FuncExpr::G { args, x }
    }

    pub fn li(n: u32, x: RatFunc) -> Self {
        FuncExpr::Li { m: vec![n], args: vec![x] }
    }

    pub fn log(f: RatFunc) -> Self {
        FuncExpr::Log(f)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FuncExpr::Scalar(c) => c.is_zero(),
            FuncExpr::Sum(ts) => ts.iter().all(|(c, t)| c.is_zero() || t.is_zero()),
            _ => false,
        }
    }

    /// Transcendental weight; sums must be homogeneous.
    pub fn weight(&self) -> Result<usize, MplError> {
        Ok(match self {
            FuncExpr::Scalar(_) => 0,
            FuncExpr::G { args, .. } => args.len(),
            FuncExpr::Li { m, .. } => m.iter().sum::<u32>() as usize,
            FuncExpr::H { a, .. } => a.len(),
            FuncExpr::Nielsen { n, p, .. } => (n + p) as usize,
            FuncExpr::Log(_) => 1,
            FuncExpr::Const(c) => c.weight(),
            FuncExpr::Sum(ts) => {
                let mut w = None;
                for (c, t) in ts {
                    if c.is_zero() || t.is_zero() {
                        continue;
                    }
                    let tw = t.weight()?;
                    match w {
                        None => w = Some(tw),
                        Some(v) if v != tw => return Err(MplError::MixedWeight(v, tw)),
                        _ => {}
                    }
                }
                w.unwrap_or(0)
            }
            FuncExpr::Product(fs) => fs.iter().map(|f| f.weight()).sum::<Result<usize, _>>()?,
            FuncExpr::Power(f, k) => f.weight()? * *k as usize,
        })
    }

    pub fn scale(self, c: Rational) -> FuncExpr {
        match self {
            FuncExpr::Scalar(d) => FuncExpr::Scalar(d * c),
            FuncExpr::Sum(ts) => FuncExpr::Sum(ts.into_iter().map(|(d, t)| (d * &c, t)).collect()),
            e => FuncExpr::Sum(vec![(c, e)]),
        }
    }

    pub fn add(self, o: FuncExpr) -> FuncExpr {
        let mut ts = match self {
            FuncExpr::Sum(ts) => ts,
            e => vec![(Rational::one(), e)],
        };
        match o {
            FuncExpr::Sum(us) => ts.extend(us),
            e => ts.push((Rational::one(), e)),
        }
        FuncExpr::Sum(ts)
    }

    pub fn mul(self, o: FuncExpr) -> FuncExpr {
        match (self, o) {
            (FuncExpr::Scalar(c), e) | (e, FuncExpr::Scalar(c)) => e.scale(c),
            (FuncExpr::Product(mut a), FuncExpr::Product(b)) => {
                a.extend(b);
                FuncExpr::Product(a)
            }
            (FuncExpr::Product(mut a), e) => {
                a.push(e);
                FuncExpr::Product(a)
            }
            (e, FuncExpr::Product(mut b)) => {
                b.insert(0, e);
                FuncExpr::Product(b)
            }
            (a, b) => FuncExpr::Product(vec![a, b]),
        }
    }

    /// Parses the expression grammar over the given variables.
    pub fn parse(s: &str, vars: &Vars) -> Result<FuncExpr, MplError> {
        from_ast(&syntax::parse(s)?, vars)
    }

    /// Flattens into `Σ c_i Π f_ij` with atoms as factors.
    pub fn expand(&self) -> Vec<(Rational, Vec<FuncExpr>)> {
        match self {
            FuncExpr::Scalar(c) => vec![(c.clone(), vec![])],
            FuncExpr::Sum(ts) => ts
                .iter()
                .flat_map(|(c, t)| t.expand().into_iter().map(move |(d, fs)| (c * d, fs)))
                .collect(),
            FuncExpr::Product(fs) => {
                let mut acc: Vec<(Rational, Vec<FuncExpr>)> = vec![(Rational::one(), vec![])];
                for f in fs {
                    let ef = f.expand();
                    let mut next = Vec::new();
                    for (c, a) in &acc {
                        for (d, b) in &ef {
                            let mut v = a.clone();
                            v.extend(b.iter().cloned());
                            next.push((c * d, v));
                        }
                    }
                    acc = next;
                }
                acc
            }
            FuncExpr::Power(f, k) => {
                FuncExpr::Product(std::iter::repeat_n((**f).clone(), *k as usize).collect()).expand()
            }
            atom => vec![(Rational::one(), vec![atom.clone()])],
        }
    }
}

fn fmt_args(xs: &[RatFunc]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn fmt_ints<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Scalar(c) => write!(f, "{}", fmt_rational(c)),
            FuncExpr::G { args, x } => write!(f, "G({}; {})", fmt_args(args), x),
            FuncExpr::Li { m, args } if m.len() == 1 => write!(f, "Li{}({})", m[0], args[0]),
            FuncExpr::Li { m, args } => write!(f, "Li[{}]({})", fmt_ints(m), fmt_args(args)),
            FuncExpr::H { a, x } => write!(f, "H({}; {})", fmt_ints(a), x),
            FuncExpr::Nielsen { n, p, x } => write!(f, "S[{n},{p}]({x})"),
            FuncExpr::Log(x) => write!(f, "log({x})"),
            FuncExpr::Const(c) => write!(f, "{}", c.name()),
            FuncExpr::Sum(ts) => {
                let ts: Vec<&(Rational, FuncExpr)> = ts.iter().filter(|(c, _)| !c.is_zero()).collect();
                if ts.is_empty() {
                    return write!(f, "0");
                }
                for (i, (c, t)) in ts.iter().enumerate() {
                    let neg = c.is_negative();
                    let a = c.abs();
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    let inner = if matches!(t, FuncExpr::Sum(_)) { format!("({t})") } else { t.to_string() };
                    if a.is_one() {
                        write!(f, "{inner}")?;
                    } else if let FuncExpr::Scalar(s) = t {
                        write!(f, "{}", fmt_rational(&(a * s)))?;
                    } else {
                        write!(f, "{}*{inner}", fmt_rational(&a))?;
                    }
                }
                Ok(())
            }
            FuncExpr::Product(fs) => {
                let s: Vec<String> = fs
                    .iter()
                    .map(|t| if matches!(t, FuncExpr::Sum(_)) { format!("({t})") } else { t.to_string() })
                    .collect();
                write!(f, "{}", s.join("*"))
            }
            FuncExpr::Power(b, k) => {
                if matches!(**b, FuncExpr::Sum(_) | FuncExpr::Product(_)) {
                    write!(f, "({b})^{k}")
                } else {
                    write!(f, "{b}^{k}")
                }
            }
        }
    }
}

fn from_ast(a: &Ast, vars: &Vars) -> Result<FuncExpr, MplError> {
    let rf = |x: &Ast| syntax::ast_to_ratfunc(x, vars).map_err(MplError::from);
    Ok(match a {
        Ast::Num(n) => FuncExpr::Scalar(Rational::from_integer(n.clone())),
        Ast::Ident(name) => match NamedConstant::from_name(name) {
            Some(c) => FuncExpr::Const(c),
            None => return Err(MplError::Parse(format!("bare variable `{name}` outside a function"))),
        },
        Ast::Neg(x) => from_ast(x, vars)?.scale(-Rational::one()),
        Ast::Add(x, y) => from_ast(x, vars)?.add(from_ast(y, vars)?),
        Ast::Sub(x, y) => from_ast(x, vars)?.add(from_ast(y, vars)?.scale(-Rational::one())),
        Ast::Mul(x, y) => from_ast(x, vars)?.mul(from_ast(y, vars)?),
        Ast::Div(x, y) => match from_ast(y, vars)? {
            FuncExpr::Scalar(c) if !c.is_zero() => from_ast(x, vars)?.scale(c.recip()),
            _ => return Err(MplError::Parse("division by a non-constant".into())),
        },
        Ast::Pow(x, k) => {
            let b = from_ast(x, vars)?;
            if *k < 0 {
                match b {
                    FuncExpr::Scalar(c) if !c.is_zero() => FuncExpr::Scalar(c.recip().pow(-*k)),
                    _ => return Err(MplError::Parse("negative power of a function".into())),
                }
            } else if let FuncExpr::Scalar(c) = b {
                FuncExpr::Scalar(c.pow(*k))
            } else {
                FuncExpr::Power(Box::new(b), *k as u32)
            }
        }
        Ast::Call { name, index, args, arg } => {
            let ints = |xs: &[Ast]| -> Result<Vec<i64>, MplError> {
                xs.iter()
                    .map(|x| match x {
                        Ast::Num(n) => i64::try_from(n).map_err(|_| MplError::Parse("index too large".into())),
                        Ast::Neg(b) => match &**b {
                            Ast::Num(n) => i64::try_from(n)
                                .map(|v| -v)
                                .map_err(|_| MplError::Parse("index too large".into())),
                            _ => Err(MplError::Parse("expected an integer index".into())),
                        },
                        _ => Err(MplError::Parse("expected an integer index".into())),
                    })
                    .collect()
            };
            let pos = |v: i64| u32::try_from(v).ok().filter(|&v| v > 0);
            let single = || -> Result<&Ast, MplError> {
                match (args.as_slice(), arg) {
                    ([x], None) => Ok(x),
                    _ => Err(MplError::Parse(format!("`{name}` takes one argument"))),
                }
            };
            match name.as_str() {
                "G" => {
                    let x = arg.as_ref().ok_or_else(|| MplError::Parse("G needs `; x`".into()))?;
                    FuncExpr::G { args: args.iter().map(rf).collect::<Result<_, _>>()?, x: rf(x)? }
                }
                "H" => {
                    let (a, x) = match arg {
                        Some(x) => (ints(args)?, rf(x)?),
                        None => (index.clone(), rf(single()?)?),
                    };
                    if a.iter().any(|v| !(-1..=1).contains(v)) {
                        return Err(MplError::Parse("H indices must be -1, 0 or 1".into()));
                    }
                    FuncExpr::H { a: a.into_iter().map(|v| v as i8).collect(), x }
                }
                "S" => match index.as_slice() {
                    [n, p] => FuncExpr::Nielsen {
                        n: pos(*n).ok_or_else(|| MplError::Parse("bad Nielsen index".into()))?,
                        p: pos(*p).ok_or_else(|| MplError::Parse("bad Nielsen index".into()))?,
                        x: rf(single()?)?,
                    },
                    _ => return Err(MplError::Parse("Nielsen needs S[n,p](x)".into())),
                },
                "log" | "ln" | "Log" => FuncExpr::Log(rf(single()?)?),
                "zeta" => match (index.as_slice(), args.as_slice()) {
                    ([], [Ast::Num(n)]) if n == &BigInt::from(3) => FuncExpr::Const(NamedConstant::Zeta3),
                    _ => return Err(MplError::Parse("only zeta(3) is supported".into())),
                },
                "Li" => {
                    let m: Vec<u32> = index
                        .iter()
                        .map(|&v| pos(v).ok_or_else(|| MplError::Parse("bad Li index".into())))
                        .collect::<Result<_, _>>()?;
                    if m.is_empty() || m.len() != args.len() || arg.is_some() {
                        return Err(MplError::Parse("Li needs Li[m1,...](x1,...)".into()));
                    }
                    FuncExpr::Li { m, args: args.iter().map(rf).collect::<Result<_, _>>()? }
                }
                other => match other.strip_prefix("Li").and_then(|d| d.parse::<u32>().ok()) {
                    Some(n) if n > 0 && index.is_empty() => FuncExpr::li(n, rf(single()?)?),
                    _ => return Err(MplError::Parse(format!("unknown function `{other}`"))),
                },
            }
        }
    })
}

/// Symbol of `f` as a weight-1 element; `None` when `f` is `0`.
fn factor(f: &RatFunc, a: &Alphabet) -> Result<Option<Symbol>, MplError> {
    if f.is_zero() {
        return Ok(None);
    }
    Ok(Some(expand_factor(f, a)?))
}

fn tensor_all(fs: &[Symbol]) -> Symbol {
    fs.iter().fold(Symbol::unit(), |acc, f| acc.tensor(f))
}

/// `-(1-x) ⊗ x^{⊗(n-1)}`; zero when `x` or `1-x` vanishes.
fn classical_li_symbol(n: u32, x: &RatFunc, a: &Alphabet) -> Result<Symbol, MplError> {
    let w = n as usize;
    let one = RatFunc::one(x.vars());
    let (Some(u), Some(v)) = (factor(&(&one - x), a)?, factor(x, a)?) else { return Ok(Symbol::zero(w)) };
    let mut fs = vec![u];
    fs.extend(std::iter::repeat_n(v, w - 1));
    Ok(tensor_all(&fs).neg())
}

/// Symbol of an expression: linear, and multiplicative into the shuffle product.
pub fn symbol_of(e: &FuncExpr, a: &Alphabet) -> Result<Symbol, MplError> {
    let w = e.weight()?;
    let vars = a.vars();
    let s = match e {
        FuncExpr::Scalar(c) => Symbol::unit().scale(c),
        FuncExpr::G { args, x } => {
            if args.is_empty() {
                return Ok(if x.is_zero() { Symbol::zero(0) } else { Symbol::unit() });
            }
            polygon_symbol(&Polygon::for_g(&embed_all(args, vars)?, &x.embed(vars)?)?, a)?
        }
        FuncExpr::Li { m, args } if m.len() == 1 => classical_li_symbol(m[0], &args[0].embed(vars)?, a)?,
        FuncExpr::Li { m, args } => symbol_of(&li_to_g(m, &embed_all(args, vars)?)?, a)?,
        FuncExpr::H { a: idx, x } => {
            let x = x.embed(vars)?;
            let k = idx.iter().filter(|&&v| v == 1).count();
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            if idx.iter().all(|&v| v == 0 || v == 1) {
                // (a_n - x) ⊗ ... ⊗ (a_1 - x)
                let mut fs = Vec::new();
                for &v in idx.iter().rev() {
                    match factor(&(&RatFunc::from_int(vars, v as i64) - &x), a)? {
                        Some(s) => fs.push(s),
                        None => return Ok(Symbol::zero(w)),
                    }
                }
                tensor_all(&fs).scale(&sign)
            } else {
                let g = idx.iter().map(|&v| RatFunc::from_int(vars, v as i64)).collect::<Vec<_>>();
                polygon_symbol(&Polygon::for_g(&g, &x)?, a)?.scale(&sign)
            }
        }
        FuncExpr::Nielsen { n, p, x } => {
            let x = x.embed(vars)?;
            let one = RatFunc::one(vars);
            let (Some(u), Some(v)) = (factor(&(&one - &x), a)?, factor(&x, a)?) else { return Ok(Symbol::zero(w)) };
            let mut fs = vec![u; *p as usize];
            fs.extend(std::iter::repeat_n(v, *n as usize));
            let s = tensor_all(&fs);
            if p % 2 == 0 {
                s
            } else {
                s.neg()
            }
        }
        FuncExpr::Log(f) => {
            factor(&f.embed(vars)?, a)?.ok_or_else(|| MplError::ZeroArgument(e.to_string()))?
        }
        FuncExpr::Const(c) => match c {
            NamedConstant::Pi => Symbol::zero(1),
            NamedConstant::Zeta3 => Symbol::zero(3),
            NamedConstant::Ln2 => factor(&RatFunc::from_int(vars, 2), a)?.expect("nonzero"),
            NamedConstant::Li4Half => classical_li_symbol(4, &RatFunc::constant(vars, Rational::new(1.into(), 2.into())), a)?,
        },
        FuncExpr::Sum(ts) => {
            let mut out = Symbol::zero(w);
            for (c, t) in ts {
                if c.is_zero() || t.is_zero() {
                    continue;
                }
                out.add_scaled(&symbol_of(t, a)?, c);
            }
            out
        }
        FuncExpr::Product(fs) => {
            let mut acc = Symbol::unit();
            for f in fs {
                acc = acc.shuffle(&symbol_of(f, a)?);
            }
            acc
        }
        FuncExpr::Power(f, k) => {
            let s = symbol_of(f, a)?;
            (0..*k).fold(Symbol::unit(), |acc, _| acc.shuffle(&s))
        }
    };
    if s.is_zero() {
        return Ok(Symbol::zero(w));
    }
    Ok(s)
}

/// Grows `a` until it holds every letter the symbol of `e` needs.
pub fn grow_alphabet(e: &FuncExpr, a: &mut Alphabet) -> Result<(), MplError> {
    let vars = a.vars().clone();
    let one = RatFunc::one(&vars);
    let polygon = |args: &[RatFunc], x: &RatFunc, a: &mut Alphabet| -> Result<(), MplError> {
        if args.is_empty() {
            return Ok(());
        }
        let p = Polygon::for_g(&embed_all(args, &vars)?, &x.embed(&vars)?)?;
        let n = p.n_sides();
        for o in 1..=n {
            for r in (1..=n).filter(|&r| r != o) {
                let m = mu(p.side(o), p.side(r));
                if !m.is_zero() {
                    a.grow_with(&m)?;
                }
            }
        }
        Ok(())
    };
    let nonzero = |f: &RatFunc, a: &mut Alphabet| -> Result<(), MplError> {
        if !f.is_zero() {
            a.grow_with(f)?;
        }
        Ok(())
    };
    match e {
        FuncExpr::Scalar(_) | FuncExpr::Const(NamedConstant::Pi) | FuncExpr::Const(NamedConstant::Zeta3) => {}
        FuncExpr::Const(_) => a.grow_with(&RatFunc::from_int(&vars, 2))?,
        FuncExpr::G { args, x } => polygon(args, x, a)?,
        FuncExpr::Li { m, args } if m.len() == 1 => {
            let x = args[0].embed(&vars)?;
            nonzero(&x, a)?;
            nonzero(&(&one - &x), a)?;
        }
        FuncExpr::Li { m, args } => grow_alphabet(&li_to_g(m, &embed_all(args, &vars)?)?, a)?,
        FuncExpr::H { a: idx, x } => {
            let g = idx.iter().map(|&v| RatFunc::from_int(&vars, v as i64)).collect::<Vec<_>>();
            polygon(&g, x, a)?
        }
        FuncExpr::Nielsen { x, .. } => {
            let x = x.embed(&vars)?;
            nonzero(&x, a)?;
            nonzero(&(&one - &x), a)?;
        }
        FuncExpr::Log(f) => nonzero(&f.embed(&vars)?, a)?,
        FuncExpr::Sum(ts) => {
            for (_, t) in ts {
                grow_alphabet(t, a)?;
            }
        }
        FuncExpr::Product(fs) => {
            for f in fs {
                grow_alphabet(f, a)?;
            }
        }
        FuncExpr::Power(f, _) => grow_alphabet(f, a)?,
    }
    Ok(())
}

fn embed_all(xs: &[RatFunc], vars: &Vars) -> Result<Vec<RatFunc>, MplError> {
    xs.iter().map(|x| x.embed(vars).map_err(MplError::from)).collect()
}

/// `Li_{m_1..m_k}(x_1..x_k) = (-1)^k G_{m_k..m_1}(1/x_k, ..., 1/(x_1...x_k))`
/// with `G_{n_1..n_k}(t_1..t_k) = G(0^{n_1-1}, t_1, ..., 0^{n_k-1}, t_k; 1)`.
pub fn li_to_g(m: &[u32], xs: &[RatFunc]) -> Result<FuncExpr, MplError> {
    if m.len() != xs.len() || m.is_empty() {
        return Err(MplError::PreconditionViolated("Li needs one argument per index".into()));
    }
    if let Some(z) = xs.iter().find(|x| x.is_zero()) {
        return Err(MplError::ZeroArgument(z.to_string()));
    }
    let vars = xs[0].vars();
    let k = m.len();
    let mut args = Vec::new();
    let mut prod = RatFunc::one(vars);
    for j in (0..k).rev() {
        prod = &prod * &xs[j];
        args.extend(std::iter::repeat_n(RatFunc::zero(vars), m[j] as usize - 1));
        args.push(prod.inv()?);
    }
    let g = FuncExpr::G { args, x: RatFunc::one(vars) };
    Ok(if k % 2 == 0 { g } else { g.scale(-Rational::one()) })
}

/// Inverse of [`li_to_g`] on a single `G` with nonzero last index: returns
/// `±Li_{m}(x)`. The argument is first rescaled to 1.
pub fn g_to_li(e: &FuncExpr) -> Result<FuncExpr, MplError> {
    let FuncExpr::G { args, x } = e else {
        return Err(MplError::PreconditionViolated("expected a single G".into()));
    };
    let Some(last) = args.last() else {
        return Err(MplError::PreconditionViolated("G of weight 0".into()));
    };
    if last.is_zero() {
        return Err(MplError::PreconditionViolated("last index of G must be nonzero".into()));
    }
    if x.is_zero() {
        return Err(MplError::ZeroArgument(e.to_string()));
    }
    let ts: Vec<RatFunc> = args.iter().map(|a| a / x).collect();
    let mut blocks: Vec<(u32, RatFunc)> = Vec::new();
    let mut zeros = 0;
    for t in ts {
        if t.is_zero() {
            zeros += 1;
        } else {
            blocks.push((zeros + 1, t));
            zeros = 0;
        }
    }
    let k = blocks.len();
    // t_j = 1/(x_{k-j+1} ... x_k): x_k = 1/t_1 and x_{k-j} = t_j / t_{j+1}.
    let mut xs = vec![RatFunc::zero(x.vars()); k];
    let mut m = vec![0; k];
    for j in 0..k {
        m[k - 1 - j] = blocks[j].0;
        xs[k - 1 - j] = if j == 0 { blocks[0].1.inv()? } else { &blocks[j - 1].1 / &blocks[j].1 };
    }
    let li = FuncExpr::Li { m, args: xs };
    Ok(if k % 2 == 0 { li } else { li.scale(-Rational::one()) })
}

/// Multiset of shuffles of two argument lists.
fn shuffle_args(a: &[RatFunc], b: &[RatFunc]) -> Vec<Vec<RatFunc>> {
    let na = a.len() as u32;
    let idx_a: Vec<u32> = (0..na).collect();
    let idx_b: Vec<u32> = (na..na + b.len() as u32).collect();
    shuffle_words(&idx_a, &idx_b)
        .into_iter()
        .map(|w| w.into_iter().map(|i| if i < na { a[i as usize].clone() } else { b[(i - na) as usize].clone() }).collect())
        .collect()
}

/// Expands a product of `G`s at one argument into a sum of `G`s.
pub fn g_shuffle_expand(factors: &[FuncExpr]) -> Result<FuncExpr, MplError> {
    let mut acc: Vec<Vec<RatFunc>> = vec![vec![]];
    let mut xs: Option<&RatFunc> = None;
    for f in factors {
        let FuncExpr::G { args, x } = f else {
            return Err(MplError::PreconditionViolated(format!("`{f}` is not a G")));
        };
        if xs.is_some_and(|y| y != x) {
            return Err(MplError::PreconditionViolated("G factors at different arguments".into()));
        }
        xs = Some(x);
        acc = acc.iter().flat_map(|w| shuffle_args(w, args)).collect();
    }
    let x = xs.ok_or_else(|| MplError::PreconditionViolated("empty product".into()))?;
    Ok(FuncExpr::Sum(acc.into_iter().map(|args| (Rational::one(), FuncExpr::G { args, x: x.clone() })).collect()))
}

/// Rewrites `G(a_1..a_r, 0^k; x)` with `a_r ≠ 0` as
/// `Σ_i (-1)^{k-i} G(0^i; x) Σ_{u ∈ (a_1..a_{r-1}) ⧢ 0^{k-i}} G(u, a_r; x)`,
/// so every non-trivial `G` has a nonzero last index.
pub fn extract_trailing_zeros(e: &FuncExpr) -> Result<FuncExpr, MplError> {
    let FuncExpr::G { args, x } = e else {
        return Err(MplError::PreconditionViolated("expected a single G".into()));
    };
    let vars = x.vars();
    let k = args.iter().rev().take_while(|a| a.is_zero()).count();
    let r = args.len() - k;
    if k == 0 || r == 0 {
        return Ok(e.clone());
    }
    let head = &args[..r - 1];
    let ar = args[r - 1].clone();
    let zeros = |n: usize| vec![RatFunc::zero(vars); n];
    let mut out = FuncExpr::zero();
    for i in 0..=k {
        let sign = if (k - i) % 2 == 0 { Rational::one() } else { -Rational::one() };
        for mut u in shuffle_args(head, &zeros(k - i)) {
            u.push(ar.clone());
            let tail = FuncExpr::G { args: u, x: x.clone() };
            let term = if i == 0 { tail } else { FuncExpr::Product(vec![FuncExpr::G { args: zeros(i), x: x.clone() }, tail]) };
            out = out.add(term.scale(sign.clone()));
        }
    }
    Ok(out)
}

/// `G(a_1..a_n; 1) = (-1)^n G(1-a_n, ..., 1-a_1; 1)`.
pub fn hoelder_dual(e: &FuncExpr) -> Result<FuncExpr, MplError> {
    let FuncExpr::G { args, x } = e else {
        return Err(MplError::PreconditionViolated("expected a single G".into()));
    };
    if !x.is_one() {
        return Err(MplError::PreconditionViolated("argument must be 1".into()));
    }
    let vars = x.vars();
    let one = RatFunc::one(vars);
    if args.first().is_some_and(|a| a.is_one()) {
        return Err(MplError::PreconditionViolated("first index is 1".into()));
    }
    if args.last().is_some_and(|a| a.is_zero()) {
        return Err(MplError::PreconditionViolated("last index is 0".into()));
    }
    let dual: Vec<RatFunc> = args.iter().rev().map(|a| &one - a).collect();
    let g = FuncExpr::G { args: dual, x: one };
    Ok(if args.len() % 2 == 0 { g } else { g.scale(-Rational::one()) })
}

/// Alternating sum `ζ(m_1..m_k; s_1..s_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CmzvSpec {
    pub m: Vec<u32>,
    pub s: Vec<i8>,
}

impl CmzvSpec {
    pub fn new(m: Vec<u32>, s: Vec<i8>) -> Result<Self, MplError> {
        if m.len() != s.len() || m.is_empty() {
            return Err(MplError::PreconditionViolated("m and s must have equal nonzero length".into()));
        }
        if m.contains(&0) || s.iter().any(|&v| v != 1 && v != -1) {
            return Err(MplError::PreconditionViolated("m_i ≥ 1 and s_i = ±1".into()));
        }
        Ok(CmzvSpec { m, s })
    }

    pub fn weight(&self) -> usize {
        self.m.iter().sum::<u32>() as usize
    }

    pub fn is_convergent(&self) -> bool {
        (self.m[0], self.s[0]) != (1, 1)
    }

    /// Partial products `ŝ_j = s_1 ... s_j`.
    pub fn hat_s(&self) -> Vec<i8> {
        self.s.iter().scan(1i8, |p, &v| {
            *p *= v;
            Some(*p)
        }).collect()
    }

    /// `(-1)^k G(0^{m_1-1}, ŝ_1, ..., 0^{m_k-1}, ŝ_k; 1)`.
    pub fn to_g(&self, vars: &Vars) -> FuncExpr {
        let mut args = Vec::new();
        for (m, s) in self.m.iter().zip(self.hat_s()) {
            args.extend(std::iter::repeat_n(RatFunc::zero(vars), *m as usize - 1));
            args.push(RatFunc::from_int(vars, s as i64));
        }
        let g = FuncExpr::G { args, x: RatFunc::one(vars) };
        if self.m.len() % 2 == 0 {
            g
        } else {
            g.scale(-Rational::one())
        }
    }
}

impl fmt::Display for CmzvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({}; {})", fmt_ints(&self.m), fmt_ints(&self.s))
    }
}

/// Symbol of a coloured multiple zeta value through its polygon.
pub fn cmzv_symbol(z: &CmzvSpec, a: &Alphabet) -> Result<Symbol, MplError> {
    symbol_of(&z.to_g(a.vars()), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat, vars};

    fn hpl() -> (Vars, Alphabet) {
        let v = vars(&["x"]);
        let a = Alphabet::parse(&v, &["2", "x", "1-x", "1+x"]).unwrap();
        (v, a)
    }

    fn sym(s: &str) -> Symbol {
        let (v, a) = hpl();
        symbol_of(&FuncExpr::parse(s, &v).unwrap(), &a).unwrap()
    }

    fn word(a: &Alphabet, c: i64, ls: &[&str]) -> Symbol {
        let v = a.vars().clone();
        let mut t = Symbol::unit();
        for l in ls {
            t = t.tensor(&expand_factor(&RatFunc::parse(l, &v).unwrap(), a).unwrap());
        }
        t.scale(&int(c))
    }

    #[test]
    fn classical_symbols() {
        let (_, a) = hpl();
        assert_eq!(sym("Li2(x)"), word(&a, -1, &["1-x", "x"]));
        assert_eq!(sym("log(x)^2/2"), word(&a, 1, &["x", "x"]));
        assert!(sym("Li4half + ln2^4/24").is_zero());
        assert!(sym("Li4(1/2) + log(2)^4/24").is_zero());
        assert!(sym("pi^2").is_zero());
        assert_eq!(sym("S[2,2](x)"), word(&a, 1, &["1-x", "1-x", "x", "x"]));
    }

    #[test]
    fn hpl_compact_matches_polygon() {
        let (v, a) = hpl();
        for w in 1..=4 {
            for bits in 0..(1u32 << w) {
                let idx: Vec<i8> = (0..w).map(|i| ((bits >> i) & 1) as i8).collect();
                let h = FuncExpr::H { a: idx.clone(), x: RatFunc::var(&v, 0) };
                let k = idx.iter().filter(|&&t| t == 1).count();
                let g = FuncExpr::G { args: idx.iter().map(|&t| RatFunc::from_int(&v, t as i64)).collect(), x: RatFunc::var(&v, 0) };
                let g = if k % 2 == 0 { g } else { g.scale(-Rational::one()) };
                assert_eq!(symbol_of(&h, &a).unwrap(), symbol_of(&g, &a).unwrap(), "H{idx:?}");
            }
        }
    }

    #[test]
    fn li_g_conversion() {
        let v = vars(&["x", "y"]);
        let x = RatFunc::var(&v, 0);
        let y = RatFunc::var(&v, 1);
        let g = li_to_g(&[2], &[x.clone()]).unwrap();
        assert_eq!(g.to_string(), "-G(0, 1/x; 1)");
        let g = li_to_g(&[1, 1], &[x.clone(), y.clone()]).unwrap();
        assert_eq!(g, FuncExpr::G { args: vec![y.inv().unwrap(), (&x * &y).inv().unwrap()], x: RatFunc::one(&v) });
        for (m, xs) in [(vec![2, 2], vec![x.clone(), y.clone()]), (vec![3], vec![x.clone()]), (vec![1, 2, 1], vec![x.clone(), y.clone(), x.clone()])] {
            let e = li_to_g(&m, &xs).unwrap();
            let inner = match &e {
                FuncExpr::Sum(ts) => ts[0].1.clone(),
                g => g.clone(),
            };
            let back = g_to_li(&inner).unwrap();
            let li = FuncExpr::Li { m: m.clone(), args: xs.clone() };
            let want = if m.len() % 2 == 0 { li } else { li.scale(-Rational::one()) };
            assert_eq!(back, want);
        }
        assert!(matches!(li_to_g(&[2], &[RatFunc::zero(&v)]), Err(MplError::ZeroArgument(_))));
    }

    #[test]
    fn li2_via_g_symbol() {
        let (v, a) = hpl();
        let x = RatFunc::var(&v, 0);
        let g = li_to_g(&[2], &[x]).unwrap();
        assert_eq!(symbol_of(&g, &a).unwrap(), word(&a, -1, &["1-x", "x"]));
    }

    #[test]
    fn shuffle_expansion() {
        let v = vars(&["a", "b", "x"]);
        let mut al = Alphabet::empty(&v);
        let ga = FuncExpr::parse("G(a; x)", &v).unwrap();
        let gb = FuncExpr::parse("G(b; x)", &v).unwrap();
        let e = g_shuffle_expand(&[ga.clone(), gb.clone()]).unwrap();
        assert_eq!(e, FuncExpr::parse("G(a, b; x) + G(b, a; x)", &v).unwrap());
        for f in ["1 - x/a", "1 - x/b", "1 - a/b", "1 - b/a"] {
            al.grow_with(&RatFunc::parse(f, &v).unwrap()).unwrap();
        }
        let prod = FuncExpr::Product(vec![ga, gb]);
        assert_eq!(symbol_of(&prod, &al).unwrap(), symbol_of(&e, &al).unwrap());
    }

    #[test]
    fn trailing_zero_example() {
        let v = vars(&["a", "x"]);
        let e = FuncExpr::parse("G(a, 0, 0; x)", &v).unwrap();
        let r = extract_trailing_zeros(&e).unwrap();
        let want = FuncExpr::parse("G(0, 0, a; x) - G(0; x)*G(0, a; x) + G(0, 0; x)*G(a; x)", &v).unwrap();
        let (mut r1, mut w1) = (r.expand(), want.expand());
        let key = |t: &(Rational, Vec<FuncExpr>)| format!("{:?}", t);
        r1.sort_by_key(key);
        w1.sort_by_key(key);
        assert_eq!(r1, w1);
    }

    #[test]
    fn hoelder_examples() {
        let (v, a) = hpl();
        let e = FuncExpr::parse("G(-1; 1)", &v).unwrap();
        let d = hoelder_dual(&e).unwrap();
        assert_eq!(d, FuncExpr::parse("-G(2; 1)", &v).unwrap());
        assert_eq!(symbol_of(&e, &a).unwrap(), symbol_of(&d, &a).unwrap());
        assert_eq!(symbol_of(&e, &a).unwrap(), word(&a, 1, &["2"]));
        assert!(hoelder_dual(&FuncExpr::parse("G(1, 2; 1)", &v).unwrap()).is_err());
        assert!(hoelder_dual(&FuncExpr::parse("G(2, 0; 1)", &v).unwrap()).is_err());
    }

    #[test]
    fn cmzv_examples() {
        let v = vars(&["x"]);
        let a = Alphabet::parse(&v, &["2"]).unwrap();
        let two = |n: usize, c: i64| Symbol::from_terms(n, [(vec![0; n], int(c))]);
        let z = CmzvSpec::new(vec![1, 1, 1], vec![-1, 1, 1]).unwrap();
        assert_eq!(cmzv_symbol(&z, &a).unwrap(), two(3, -1));
        let z = CmzvSpec::new(vec![1, 1, 1, 1], vec![-1, -1, 1, 1]).unwrap();
        let ln = symbol_of(&FuncExpr::parse("log(1/2)^4/24", &v).unwrap(), &a).unwrap();
        assert_eq!(cmzv_symbol(&z, &a).unwrap(), ln);
        let z = CmzvSpec::new(vec![2, 1], vec![-1, 1]).unwrap();
        assert!(cmzv_symbol(&z, &a).unwrap().is_zero());
    }

    #[test]
    fn weights_and_parse() {
        let v = vars(&["x"]);
        let e = FuncExpr::parse("Li[2,2](1/2, 2x/(x+1)) - 3/4*log(x)*Li3(-x)", &v).unwrap();
        assert_eq!(e.weight().unwrap(), 4);
        assert!(matches!(FuncExpr::parse("Li2(x) + log(x)", &v).unwrap().weight(), Err(MplError::MixedWeight(2, 1))));
        assert_eq!(FuncExpr::parse("H(1,0,-1; x)", &v).unwrap(), FuncExpr::parse("H[1,0,-1](x)", &v).unwrap());
        assert_eq!(FuncExpr::parse("zeta(3)", &v).unwrap(), FuncExpr::Const(NamedConstant::Zeta3));
        let s = e.to_string();
        assert_eq!(FuncExpr::parse(&s, &v).unwrap().to_string(), s);
        assert_eq!(FuncExpr::Scalar(rat(1, 2)).weight().unwrap(), 0);
    }
}
