//! High-precision real evaluation of function expressions at rational points,
//! through truncated nested sums.

use crate::exact_arith::{Rational, Vars};
use crate::mpl::{extract_trailing_zeros, li_to_g, FuncExpr, MplError, NamedConstant};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("outside the region of convergence: {0}")]
    OutOfRegion(String),
    #[error("divergent: {0}")]
    DivergentSpec(String),
    #[error("no rational with small denominator near {0}")]
    Fail(String),
    #[error(transparent)]
    Mpl(#[from] MplError),
}

/// Minimal and maximal precision in decimal digits.
pub const MIN_DIGITS: u32 = 30;

/// Fixed-point binary number `m / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    m: BigInt,
    bits: u32,
}

/// Working bits for `digits` decimal digits plus guard bits.
pub fn bits_for(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

fn round_shift(n: BigInt, s: u32) -> BigInt {
    if s == 0 {
        return n;
    }
    let half = BigInt::one() << (s - 1);
    if n.is_negative() {
        -((-n + half) >> s)
    } else {
        (n + half) >> s
    }
}

fn div_round(n: BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if (r << 1) >= d.abs() {
        q + 1
    } else {
        q
    }
}

impl BigFloat {
    pub fn zero(bits: u32) -> Self {
        BigFloat { m: BigInt::zero(), bits }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        BigFloat { m: BigInt::from(n) << bits, bits }
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        let n = r.numer().clone() << bits;
        BigFloat { m: div_round(n, r.denom()), bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat { m: self.m.abs(), bits: self.bits }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        BigFloat { m: &self.m + &o.m, bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigFloat { m: &self.m - &o.m, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        BigFloat { m: -&self.m, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigFloat { m: round_shift(&self.m * &o.m, self.bits), bits: self.bits }
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero");
        BigFloat { m: div_round(&self.m << self.bits, &o.m), bits: self.bits }
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        BigFloat { m: div_round(&self.m * r.numer(), r.denom()), bits: self.bits }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        BigFloat { m: &self.m * n, bits: self.bits }
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        BigFloat { m: div_round(self.m.clone(), n), bits: self.bits }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut r = Self::one(self.bits);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Exact rational value of the stored fixed-point number.
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.m.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_rational();
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion with `digits` digits after the point.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = round_shift(&self.m * BigInt::from(10).pow(digits), self.bits);
        let neg = scaled.is_negative();
        let s = scaled.abs().to_string();
        let d = digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (i, f) = s.split_at(s.len() - d);
        format!("{}{}.{}", if neg { "-" } else { "" }, i, f)
    }

    /// `|self - o| < 10^{-digits}`.
    pub fn close_to(&self, o: &Self, digits: u32) -> bool {
        let diff = self.sub(o).abs().to_rational();
        diff < Rational::new(BigInt::one(), BigInt::from(10).pow(digits))
    }

    /// Natural logarithm of a positive number.
    pub fn ln(&self) -> Result<Self, NumError> {
        if self.m.sign() != Sign::Plus {
            return Err(NumError::OutOfRegion(format!("log of {}", self.to_decimal(10))));
        }
        let bits = self.bits;
        // self = y * 2^k with y in [1, 2).
        let k = self.m.bits() as i64 - 1 - bits as i64;
        let y = if k >= 0 {
            BigFloat { m: &self.m >> (k as u32), bits }
        } else {
            BigFloat { m: &self.m << ((-k) as u32), bits }
        };
        let one = Self::one(bits);
        let z = y.sub(&one).div(&y.add(&one));
        let ln_y = atanh(&z).mul_int(&BigInt::from(2));
        Ok(ln_y.add(&ln2(bits).mul_int(&BigInt::from(k))))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        (self.bits == o.bits).then(|| self.m.cmp(&o.m))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.bits.saturating_sub(64)) as f64 / std::f64::consts::LOG2_10).floor() as u32;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

/// `atanh z = Σ z^{2j+1}/(2j+1)` for `|z| ≤ 1/3`.
fn atanh(z: &BigFloat) -> BigFloat {
    let z2 = z.mul(z);
    let mut p = z.clone();
    let mut s = BigFloat::zero(z.bits);
    let mut j = 1u64;
    while !p.is_zero() {
        s = s.add(&p.div_int(&BigInt::from(j)));
        p = p.mul(&z2);
        j += 2;
    }
    s
}

fn cached(key: (NamedConstant, u32), f: impl FnOnce() -> BigFloat) -> BigFloat {
    static C: OnceLock<Mutex<HashMap<(NamedConstant, u32), BigFloat>>> = OnceLock::new();
    let c = C.get_or_init(Default::default);
    if let Some(v) = c.lock().expect("cache").get(&key) {
        return v.clone();
    }
    let v = f();
    c.lock().expect("cache").insert(key, v.clone());
    v
}

/// Evaluates with 32 extra bits and rounds back.
fn with_guard(bits: u32, f: impl FnOnce(u32) -> BigFloat) -> BigFloat {
    let v = f(bits + 32);
    BigFloat { m: round_shift(v.m, 32), bits }
}

fn ln2(bits: u32) -> BigFloat {
    cached((NamedConstant::Ln2, bits), || {
        with_guard(bits, |b| atanh(&BigFloat::from_rational(&Rational::new(1.into(), 3.into()), b)).mul_int(&2.into()))
    })
}

/// Machin: `π = 16 atan(1/5) - 4 atan(1/239)`.
fn pi(bits: u32) -> BigFloat {
    cached((NamedConstant::Pi, bits), || {
        with_guard(bits, |b| {
            let atan_inv = |n: i64| {
                let mut p = BigFloat::one(b).div_int(&BigInt::from(n));
                let n2 = BigInt::from(n * n);
                let mut s = BigFloat::zero(b);
                let mut j = 1i64;
                while !p.is_zero() {
                    let t = p.div_int(&BigInt::from(j));
                    s = if (j / 2) % 2 == 0 { s.add(&t) } else { s.sub(&t) };
                    p = p.div_int(&n2);
                    j += 2;
                }
                s
            };
            atan_inv(5).mul_int(&16.into()).sub(&atan_inv(239).mul_int(&4.into()))
        })
    })
}

/// `ζ(3) = (5/2) Σ (-1)^{n+1} / (n^3 C(2n, n))`.
fn zeta3(bits: u32) -> BigFloat {
    cached((NamedConstant::Zeta3, bits), || {
        with_guard(bits, |b| {
            let mut s = BigFloat::zero(b);
            let mut c = BigInt::one();
            let mut n = 1u64;
            loop {
                c = c * (4 * n - 2) / n;
                let t = BigFloat::one(b).div_int(&(BigInt::from(n).pow(3) * &c));
                if t.is_zero() {
                    break;
                }
                s = if n % 2 == 1 { s.add(&t) } else { s.sub(&t) };
                n += 1;
            }
            s.mul_rational(&Rational::new(5.into(), 2.into()))
        })
    })
}

/// `Li_4(1/2) = Σ 1/(2^n n^4)`.
fn li4_half(bits: u32) -> BigFloat {
    cached((NamedConstant::Li4Half, bits), || {
        with_guard(bits, |b| {
            let mut s = BigFloat::zero(b);
            let mut p = BigFloat::one(b);
            let mut n = 1u64;
            loop {
                p = p.div_int(&2.into());
                let t = p.div_int(&BigInt::from(n).pow(4));
                if t.is_zero() {
                    break;
                }
                s = s.add(&t);
                n += 1;
            }
            s
        })
    })
}

pub fn constant(c: NamedConstant, digits: u32) -> BigFloat {
    let bits = bits_for(digits);
    match c {
        NamedConstant::Pi => pi(bits),
        NamedConstant::Zeta3 => zeta3(bits),
        NamedConstant::Ln2 => ln2(bits),
        NamedConstant::Li4Half => li4_half(bits),
    }
}

/// Evaluation settings: precision and the convergence margin `δ`.
#[derive(Clone, Debug)]
pub struct NumCtx {
    pub digits: u32,
    pub delta: f64,
    bits: u32,
    max_terms: std::cell::Cell<usize>,
}

impl NumCtx {
    pub fn new(digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        NumCtx { digits, delta: 0.1, bits: bits_for(digits), max_terms: std::cell::Cell::new(0) }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Largest series truncation order used so far.
    pub fn truncation_order(&self) -> usize {
        self.max_terms.get()
    }

    fn note_terms(&self, n: usize) {
        if n > self.max_terms.get() {
            self.max_terms.set(n);
        }
    }

    fn terms_for(&self, rate: f64) -> usize {
        let need = (self.digits as f64 + 5.0) * std::f64::consts::LN_10;
        (need / -rate.ln() * 1.1) as usize + 20
    }
}

fn ratio_abs(r: &Rational) -> f64 {
    r.abs().numer().to_f64().unwrap_or(f64::INFINITY) / r.abs().denom().to_f64().unwrap_or(f64::INFINITY)
}

/// `G(0^{m_1-1}, t_1, ..., 0^{m_k-1}, t_k; 1)
///  = (-1)^k Σ_{N_1 > ... > N_k ≥ 1} Π (t_{j-1}/t_j)^{N_j} / N_j^{m_j}` with `t_0 = 1`.
fn g_series(blocks: &[(u32, Rational)], n_terms: usize, bits: u32) -> BigFloat {
    // Inner partial sums may grow like |z_j|^n while the outer powers shrink;
    // extra working bits absorb the cancellation.
    let mut prev = Rational::one();
    let mut growth = 0.0;
    for (_, t) in blocks {
        growth += ratio_abs(&(&prev / t)).log2().max(0.0);
        prev = t.clone();
    }
    let extra = (growth * n_terms as f64).ceil() as u32 + 32;
    let v = g_series_raw(blocks, n_terms, bits + extra);
    BigFloat { m: round_shift(v.m, extra), bits }
}

fn g_series_raw(blocks: &[(u32, Rational)], n_terms: usize, bits: u32) -> BigFloat {
    let k = blocks.len();
    let mut z = Vec::with_capacity(k);
    let mut prev = Rational::one();
    for (_, t) in blocks {
        z.push(BigFloat::from_rational(&(&prev / t), bits));
        prev = t.clone();
    }
    let mut zp: Vec<BigFloat> = vec![BigFloat::one(bits); k];
    // acc[j] = sum over N_j < n of the inner sums starting at level j.
    let mut acc: Vec<BigFloat> = vec![BigFloat::zero(bits); k + 1];
    acc[k] = BigFloat::one(bits);
    for n in 1..=n_terms {
        let nb = BigInt::from(n);
        for j in 0..k {
            zp[j] = zp[j].mul(&z[j]);
        }
        for j in 0..k {
            let denom = nb.pow(blocks[j].0);
            let inner = if j + 1 == k { BigFloat::one(bits) } else { acc[j + 1].clone() };
            let t = zp[j].mul(&inner).div_int(&denom);
            acc[j] = acc[j].add(&t);
        }
    }
    if k % 2 == 0 {
        acc[0].clone()
    } else {
        acc[0].neg()
    }
}

/// `G(a; 1)` with nonzero last index by the nested series, or through the
/// Hölder convolution when the direct series converges too slowly.
fn g_at_one(a: &[Rational], ctx: &NumCtx, allow_split: bool) -> Result<BigFloat, NumError> {
    let bits = ctx.bits;
    if a.is_empty() {
        return Ok(BigFloat::one(bits));
    }
    if a[0].is_one() {
        return Err(NumError::DivergentSpec(format!("G({}, ...; 1)", a[0])));
    }
    let alpha = a.iter().filter(|t| !t.is_zero()).map(ratio_abs).fold(f64::INFINITY, f64::min);
    let direct_rate = 1.0 / alpha;
    if direct_rate <= 1.0 - ctx.delta {
        let mut blocks = Vec::new();
        let mut zeros = 0;
        for t in a {
            if t.is_zero() {
                zeros += 1;
            } else {
                blocks.push((zeros + 1, t.clone()));
                zeros = 0;
            }
        }
        let n = ctx.terms_for(direct_rate);
        ctx.note_terms(n);
        return Ok(g_series(&blocks, n, bits));
    }
    if !allow_split {
        return Err(NumError::OutOfRegion(format!("series ratio {direct_rate:.3}")));
    }
    let one = Rational::one();
    let beta = a.iter().filter(|t| **t != one).map(|t| ratio_abs(&(&one - t))).fold(f64::INFINITY, f64::min);
    if 1.0 / (alpha + beta) > 1.0 - ctx.delta {
        return Err(NumError::OutOfRegion("a singularity lies on or near the integration path".into()));
    }
    // q = 1/p balances the two series; any rational near the optimum will do.
    let q_f = alpha / (alpha + beta);
    let q = Rational::new(BigInt::from((q_f * 1024.0).round() as i64), BigInt::from(1024));
    let q = if q.is_zero() { Rational::new(1.into(), 1024.into()) } else { q };
    let n = a.len();
    let mut sum = BigFloat::zero(bits);
    for k in 0..=n {
        let left: Vec<Rational> = a[..k].iter().rev().map(|t| &one - t).collect();
        let right = &a[k..];
        let l = g_general(&left, &(&one - &q), ctx, false)?;
        let r = g_general(right, &q, ctx, false)?;
        let t = l.mul(&r);
        sum = if k % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
    }
    Ok(sum)
}

/// `G(a; x)` for real rational input.
fn g_general(a: &[Rational], x: &Rational, ctx: &NumCtx, allow_split: bool) -> Result<BigFloat, NumError> {
    let bits = ctx.bits;
    if a.is_empty() {
        return Ok(BigFloat::one(bits));
    }
    if x.is_zero() {
        return Ok(BigFloat::zero(bits));
    }
    let k = a.iter().rev().take_while(|t| t.is_zero()).count();
    if k == a.len() {
        // ln^n(x)/n!
        let lx = BigFloat::from_rational(x, bits).ln()?;
        let mut v = lx.powi(k as u32);
        for i in 2..=k {
            v = v.div_int(&BigInt::from(i));
        }
        return Ok(v);
    }
    if k > 0 {
        let vars: Vars = crate::exact_arith::vars::<&str>(&[]);
        let rf = |r: &Rational| crate::exact_arith::RatFunc::constant(&vars, r.clone());
        let e = FuncExpr::G { args: a.iter().map(rf).collect(), x: rf(x) };
        return eval_ctx(&extract_trailing_zeros(&e)?, &[], ctx, allow_split);
    }
    let scaled: Vec<Rational> = a.iter().map(|t| t / x).collect();
    g_at_one(&scaled, ctx, allow_split)
}

/// `G(a_1, ..., a_n; x)` at rational input.
pub fn eval_g(a: &[Rational], x: &Rational, digits: u32) -> Result<BigFloat, NumError> {
    g_general(a, x, &NumCtx::new(digits), true)
}

fn const_rat(f: &crate::exact_arith::RatFunc, point: &[Rational]) -> Result<Rational, NumError> {
    f.eval(point).map_err(|e| NumError::Mpl(e.into()))
}

/// `ζ(j)` for integer `j ≥ 2`, via the alternating series accelerated with
/// Borwein's weights for `j > 3`.
fn zeta_int(j: u32, bits: u32) -> BigFloat {
    match j {
        2 => return pi(bits).mul(&pi(bits)).div_int(&BigInt::from(6)),
        3 => return zeta3(bits),
        _ => {}
    }
    static C: OnceLock<Mutex<HashMap<(u32, u32), BigFloat>>> = OnceLock::new();
    let c = C.get_or_init(Default::default);
    if let Some(v) = c.lock().expect("cache").get(&(j, bits)) {
        return v.clone();
    }
    let v = with_guard(bits, |b| {
        let n = (b as f64 * std::f64::consts::LN_2 / (3.0 + 8f64.sqrt()).ln()) as u64 + 8;
        // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!)
        let mut d = Vec::with_capacity(n as usize + 1);
        let mut t = Rational::new(BigInt::one(), BigInt::from(n));
        let mut acc = Rational::zero();
        for i in 0..=n {
            if i > 0 {
                let num = BigInt::from(4 * (n + i - 1) * (n - i + 1));
                let den = BigInt::from((2 * i - 1) * (2 * i));
                t = t * Rational::new(num, den);
            }
            acc += &t;
            d.push(acc.clone() * Rational::from_integer(BigInt::from(n)));
        }
        let dn = d[n as usize].clone();
        let mut sum = Rational::zero();
        for k in 0..n {
            let term = (&d[k as usize] - &dn) / Rational::from_integer(BigInt::from(k + 1).pow(j));
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let eta = -sum / dn;
        let factor = Rational::one() - Rational::new(BigInt::one(), BigInt::one() << (j - 1));
        BigFloat::from_rational(&(eta / factor), b)
    });
    c.lock().expect("cache").insert((j, bits), v.clone());
    v
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
fn bernoulli(n: usize) -> Vec<Rational> {
    static C: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let c = C.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut b = c.lock().expect("cache");
    while b.len() <= n {
        let m = b.len();
        let mut s = Rational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b[..=n].to_vec()
}

/// `Li_n(z)` for real `z` in `[1/2, 1]` from the expansion in `μ = ln z`:
/// `μ^{n-1}/(n-1)! (H_{n-1} - ln(-μ)) + Σ_{k≠n-1} ζ(n-k) μ^k/k!`.
fn li_near_one(n: u32, z: &Rational, ctx: &NumCtx) -> Result<BigFloat, NumError> {
    let bits = ctx.bits;
    if z.is_one() {
        return Ok(zeta_int(n, bits));
    }
    let mu = BigFloat::from_rational(z, bits).ln()?;
    let amu = mu.abs().to_f64();
    let terms = (bits as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI / amu).ln()) as usize + n as usize + 4;
    ctx.note_terms(terms);
    let bern = bernoulli(terms + 2);
    let mut sum = BigFloat::zero(bits);
    let mut pw = BigFloat::one(bits);
    let mut fact = BigInt::one();
    for k in 0..=terms {
        if k > 0 {
            pw = pw.mul(&mu);
            fact *= BigInt::from(k);
        }
        let k32 = k as u32;
        let coef = if k32 + 1 == n {
            let h: Rational = (1..n).map(|i| Rational::new(BigInt::one(), BigInt::from(i))).sum();
            BigFloat::from_rational(&h, bits).sub(&mu.neg().ln()?)
        } else if k32 + 1 < n {
            zeta_int(n - k32, bits)
        } else {
            // ζ(-m) = -B_{m+1}/(m+1), ζ(0) = -1/2
            let m = k - n as usize;
            let v = if m == 0 { Rational::new((-1).into(), 2.into()) } else { -&bern[m + 1] / Rational::from_integer(BigInt::from(m + 1)) };
            if v.is_zero() {
                continue;
            }
            BigFloat::from_rational(&v, bits)
        };
        sum = sum.add(&coef.mul(&pw).div_int(&fact));
    }
    Ok(sum)
}


fn eval_ctx(e: &FuncExpr, point: &[Rational], ctx: &NumCtx, allow_split: bool) -> Result<BigFloat, NumError> {
    let bits = ctx.bits;
    Ok(match e {
        FuncExpr::Scalar(c) => BigFloat::from_rational(c, bits),
        FuncExpr::G { args, x } => {
            let a = args.iter().map(|t| const_rat(t, point)).collect::<Result<Vec<_>, _>>()?;
            g_general(&a, &const_rat(x, point)?, ctx, allow_split)?
        }
        FuncExpr::Li { m, args } => {
            let vals = args.iter().map(|t| const_rat(t, point)).collect::<Result<Vec<_>, _>>()?;
            if vals.iter().any(|v| v.is_zero()) {
                return Ok(BigFloat::zero(bits));
            }
            let half = Rational::new(1.into(), 2.into());
            if m.len() == 1 && m[0] >= 2 && vals[0] >= half && vals[0] <= Rational::one() {
                return li_near_one(m[0], &vals[0], ctx);
            }
            let vars: Vars = crate::exact_arith::vars::<&str>(&[]);
            let rf = vals.iter().map(|r| crate::exact_arith::RatFunc::constant(&vars, r.clone())).collect::<Vec<_>>();
            eval_ctx(&li_to_g(m, &rf)?, &[], ctx, allow_split)?
        }
        FuncExpr::H { a, x } => {
            let k = a.iter().filter(|&&v| v == 1).count();
            let args: Vec<Rational> = a.iter().map(|&v| Rational::from_integer(v.into())).collect();
            let v = g_general(&args, &const_rat(x, point)?, ctx, allow_split)?;
            if k % 2 == 0 {
                v
            } else {
                v.neg()
            }
        }
        FuncExpr::Nielsen { n, p, x } => {
            let mut args = vec![Rational::zero(); *n as usize];
            args.extend(std::iter::repeat_n(Rational::one(), *p as usize));
            let v = g_general(&args, &const_rat(x, point)?, ctx, allow_split)?;
            if p % 2 == 0 {
                v
            } else {
                v.neg()
            }
        }
        FuncExpr::Log(f) => BigFloat::from_rational(&const_rat(f, point)?, bits).ln()?,
        FuncExpr::Const(c) => match c {
            NamedConstant::Pi => pi(bits),
            NamedConstant::Zeta3 => zeta3(bits),
            NamedConstant::Ln2 => ln2(bits),
            NamedConstant::Li4Half => li4_half(bits),
        },
        FuncExpr::Sum(ts) => {
            let mut s = BigFloat::zero(bits);
            for (c, t) in ts {
                if !c.is_zero() {
                    s = s.add(&eval_ctx(t, point, ctx, allow_split)?.mul_rational(c));
                }
            }
            s
        }
        FuncExpr::Product(fs) => {
            let mut p = BigFloat::one(bits);
            for f in fs {
                p = p.mul(&eval_ctx(f, point, ctx, allow_split)?);
            }
            p
        }
        FuncExpr::Power(f, k) => eval_ctx(f, point, ctx, allow_split)?.powi(*k),
    })
}

/// Value of `e` at the point (one rational per session variable).
pub fn eval_mpl(e: &FuncExpr, point: &[Rational], digits: u32) -> Result<BigFloat, NumError> {
    eval_mpl_report(e, point, digits).map(|(v, _)| v)
}

/// As [`eval_mpl`], also returning the largest series truncation order used.
pub fn eval_mpl_report(e: &FuncExpr, point: &[Rational], digits: u32) -> Result<(BigFloat, usize), NumError> {
    let ctx = NumCtx::new(digits);
    let v = eval_ctx(e, point, &ctx, true)?;
    Ok((v, ctx.truncation_order()))
}

/// Best continued-fraction convergent with denominator at most `maxden`,
/// accepted only within `10^{-(digits-10)}` of `v`.
pub fn rational_reconstruct(v: &BigFloat, maxden: &BigInt, digits: u32) -> Result<Rational, NumError> {
    let x = v.to_rational();
    let tol = Rational::new(BigInt::one(), BigInt::from(10).pow(digits.saturating_sub(10)));
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut best: Option<Rational> = None;
    for _ in 0..200 {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > maxden {
            break;
        }
        best = Some(Rational::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    match best {
        Some(r) if (&r - &x).abs() <= tol => Ok(r),
        _ => Err(NumError::Fail(v.to_decimal(12))),
    }
}

/// Small integer relation `Σ a_i x_i ≈ 0` with `a_0 ≠ 0`, found by LLL
/// reduction of the lattice spanned by `(e_i, round(2^k x_i))`; `None` when
/// the shortest candidate does not vanish to `digits - 10` digits or has
/// entries above `maxcoef`.
pub fn integer_relation(xs: &[BigFloat], digits: u32, maxcoef: &BigInt) -> Option<Vec<BigInt>> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let k = (digits as f64 * std::f64::consts::LOG2_10 * 0.85) as u32;
    let scale = |x: &BigFloat| {
        if x.bits >= k {
            round_shift(x.m.clone(), x.bits - k)
        } else {
            &x.m << (k - x.bits)
        }
    };
    let mut b: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n + 1];
            r[i] = BigInt::one();
            r[n] = scale(&xs[i]);
            r
        })
        .collect();
    lll(&mut b);
    let tol = Rational::new(BigInt::one(), BigInt::from(10).pow(digits.saturating_sub(10)));
    b.into_iter()
        .map(|r| r[..n].to_vec())
        .filter(|a| !a[0].is_zero() && a.iter().all(|c| c.abs() <= *maxcoef))
        .find(|a| {
            let bits = xs[0].bits;
            let mut s = BigFloat::zero(bits);
            for (c, x) in a.iter().zip(xs) {
                s = s.add(&x.mul_rational(&Rational::from_integer(c.clone())));
            }
            s.abs().to_rational() < tol
        })
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Textbook LLL with `δ = 3/4` over exact rationals.
fn lll(b: &mut [Vec<BigInt>]) {
    let n = b.len();
    let gso = |b: &[Vec<BigInt>]| {
        let mut bs: Vec<Vec<Rational>> = Vec::with_capacity(n);
        let mut mu = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let mut v: Vec<Rational> = b[i].iter().map(|c| Rational::from_integer(c.clone())).collect();
            let bi = v.clone();
            for j in 0..i {
                let d = dot(&bs[j], &bs[j]);
                mu[i][j] = if d.is_zero() { Rational::zero() } else { dot(&bi, &bs[j]) / d };
                for (t, s) in v.iter_mut().zip(&bs[j]) {
                    *t -= &mu[i][j] * s;
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let (mut bs, mut mu) = gso(b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if !q.is_zero() {
                let q = q.to_integer();
                let bj = b[j].clone();
                for (t, s) in b[k].iter_mut().zip(&bj) {
                    *t -= &q * s;
                }
                (bs, mu) = gso(b);
            }
        }
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (Rational::new(3.into(), 4.into()) - &mu[k][k - 1] * &mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (bs, mu) = gso(b);
            k = (k - 1).max(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{rat, vars};

    const P: u32 = 40;

    fn ev(s: &str, x: Rational) -> BigFloat {
        let v = vars(&["x"]);
        eval_mpl(&FuncExpr::parse(s, &v).unwrap(), &[x], P).unwrap()
    }

    fn dec(s: &str) -> BigFloat {
        let (i, f) = s.split_once('.').unwrap();
        let neg = i.starts_with('-');
        let n: BigInt = format!("{}{}", i.trim_start_matches('-'), f).parse().unwrap();
        let r = Rational::new(n, BigInt::from(10).pow(f.len() as u32));
        BigFloat::from_rational(&if neg { -r } else { r }, bits_for(P))
    }

    // Reference digits computed with an independent arbitrary-precision library.
    const PI: &str = "3.14159265358979323846264338327950288419716939937510";
    const LN2: &str = "0.69314718055994530941723212145817656807550013436026";
    const ZETA3: &str = "1.20205690315959428539973816151144999076498629234050";
    const LI4_HALF: &str = "0.51747906167389938633075816189886294562237747514137";
    const LI2_HALF: &str = "0.58224052646501250590265632015968010874419847480612";
    const LI2_THIRD: &str = "0.36621322997706348761674629766426276380206341558967";

    #[test]
    fn constants() {
        let b = bits_for(P);
        assert!(pi(b).close_to(&dec(PI), P));
        assert!(ln2(b).close_to(&dec(LN2), P));
        assert!(zeta3(b).close_to(&dec(ZETA3), P));
        assert!(li4_half(b).close_to(&dec(LI4_HALF), P));
    }

    #[test]
    fn dilog_values() {
        assert!(ev("Li2(x)", rat(1, 2)).close_to(&dec(LI2_HALF), P - 2));
        assert!(ev("pi^2/12 - ln2^2/2", rat(1, 2)).close_to(&dec(LI2_HALF), P - 2));
        assert!(ev("H(0,1; x)", rat(1, 3)).close_to(&dec(LI2_THIRD), P - 2));
        assert!(ev("log(1)", rat(1, 3)).is_zero());
    }

    #[test]
    fn outside_unit_disk_uses_split() {
        // Li2(-2) = -1.43674636688368094636290202389358335...
        let want = dec("-1.43674636688368094636290202389358335424995643565487");
        let got = ev("Li2(2x/(x-1))", rat(1, 2));
        assert!(got.close_to(&want, P - 5), "{got}");
        // Li_n(1) = zeta(n)
        assert!(ev("Li3(1)", rat(1, 2)).close_to(&dec(ZETA3), P - 5));
    }

    #[test]
    fn divergent_and_out_of_region() {
        assert!(matches!(eval_g(&[rat(1, 1), rat(2, 1)], &rat(1, 1), P), Err(NumError::DivergentSpec(_))));
        assert!(matches!(eval_g(&[rat(1, 2)], &rat(1, 1), P), Err(NumError::OutOfRegion(_))));
    }

    #[test]
    fn shuffle_numerically() {
        let x = rat(1, 3);
        for a in [-1i64, 1] {
            for b in [-1i64, 1] {
                let (a, b) = (rat(a, 1), rat(b, 1));
                let l = eval_g(&[a.clone()], &x, P).unwrap().mul(&eval_g(&[b.clone()], &x, P).unwrap());
                let r = eval_g(&[a.clone(), b.clone()], &x, P).unwrap().add(&eval_g(&[b, a], &x, P).unwrap());
                assert!(l.close_to(&r, P - 5));
            }
        }
    }

    #[test]
    fn hoelder_at_two() {
        let one = Rational::one();
        let half = rat(1, 2);
        let sets = [vec![rat(-1, 1)], vec![rat(2, 1), rat(-1, 1)], vec![rat(-1, 1), rat(0, 1), rat(3, 1)], vec![rat(3, 1), rat(-2, 1), rat(2, 1)]];
        for a in sets {
            let lhs = eval_g(&a, &one, P).unwrap();
            let mut rhs = BigFloat::zero(bits_for(P));
            for k in 0..=a.len() {
                let left: Vec<Rational> = a[..k].iter().rev().map(|t| &one - t).collect();
                let t = eval_g(&left, &half, P).unwrap().mul(&eval_g(&a[k..], &half, P).unwrap());
                rhs = if k % 2 == 0 { rhs.add(&t) } else { rhs.sub(&t) };
            }
            assert!(lhs.close_to(&rhs, P - 5), "{a:?}");
        }
    }

    #[test]
    fn truncation_doubling() {
        let ctx = NumCtx::new(P);
        let blocks = [(1, rat(2, 1)), (2, rat(-3, 1))];
        let n = ctx.terms_for(0.5);
        let a = g_series(&blocks, n, ctx.bits());
        let b = g_series(&blocks, 2 * n, ctx.bits());
        assert!(a.close_to(&b, P + 3));
    }

    #[test]
    fn reconstruct() {
        let b = bits_for(P);
        let third = BigFloat::from_rational(&rat(1, 3), b);
        assert_eq!(rational_reconstruct(&third, &BigInt::from(1000), P).unwrap(), rat(1, 3));
        let v = BigFloat::from_rational(&rat(1, 12), b);
        assert_eq!(rational_reconstruct(&v, &BigInt::from(1 << 16), P).unwrap(), rat(1, 12));
        let frac_pi = pi(b).sub(&BigFloat::from_int(3, b));
        assert!(rational_reconstruct(&frac_pi, &BigInt::from(10), P).is_err());
    }

    #[test]
    fn relation() {
        let d = 60;
        let b = bits_for(d);
        let z = constant(NamedConstant::Zeta3, d);
        let p = constant(NamedConstant::Pi, d);
        let l = constant(NamedConstant::Ln2, d);
        let pl = p.mul(&p).mul(&l);
        let c = z.mul_rational(&Rational::new(7.into(), 8.into())).sub(&pl.mul_rational(&Rational::new(1.into(), 12.into())));
        let a = integer_relation(&[c, z, pl, BigFloat::one(b)], d, &BigInt::from(1 << 16)).unwrap();
        let r: Vec<Rational> = a[1..].iter().map(|x| Rational::new(-x.clone(), a[0].clone())).collect();
        assert_eq!(r, vec![Rational::new(7.into(), 8.into()), Rational::new((-1).into(), 12.into()), Rational::zero()]);
    }

    #[test]
    fn polylog_near_one() {
        let ctx = NumCtx::new(P);
        let b = ctx.bits();
        assert!(zeta_int(5, b).close_to(&dec("1.0369277551433699263313654864570341680570809195019"), P));
        assert!(zeta_int(4, b).close_to(&pi(b).powi(4).div_int(&BigInt::from(90)), P));
        assert!(ev("Li4(24/25)", rat(0, 1)).close_to(&dec("1.0345663530148538589304817701940984369545282438578"), P));
        assert!(ev("Li2(99/100)", rat(0, 1)).close_to(&dec("1.5886254480763753270312294739805524679449597311421"), P));
        for z in [rat(1, 2), rat(3, 4), rat(9, 10)] {
            let near = li_near_one(3, &z, &ctx).unwrap();
            let series = g_general(&[Rational::zero(), Rational::zero(), z.recip()], &Rational::one(), &ctx, true).unwrap().neg();
            assert!(near.close_to(&series, P), "{z}");
        }
    }
}
