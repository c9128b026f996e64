//! Rooted decorated polygons, their maximal arrow dissections, dual trees and
//! the symbol attached to a polygon. The recursive differential definition
//! and hook-arrow trees are provided as independent cross-checks.
//!
//! Sides are numbered `1..=n` with the root side last. Vertex `v_j` is the
//! intersection of sides `e_{j-1}` and `e_j` (so `v_1 = e_n ∩ e_1`).

use crate::alphabet::{Alphabet, AlphabetError};
use crate::exact_arith::syntax::{self, Ast};
use crate::exact_arith::{ArithError, RatFunc, Rational, Vars};
use crate::tensor::{expand_factor, Symbol};
use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolygonError {
    #[error("a polygon needs at least two sides, got {0}")]
    TooFewSides(usize),
    #[error("non-generic decorations: {0}")]
    NonGenericDecorations(String),
    #[error("cannot read polygon `{0}`")]
    Parse(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Decorated polygon; the last decoration sits on the root side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    sides: Vec<RatFunc>,
}

impl Polygon {
    pub fn new(non_root: Vec<RatFunc>, root: RatFunc) -> Result<Self, PolygonError> {
        if non_root.is_empty() {
            return Err(PolygonError::TooFewSides(1));
        }
        let mut sides = non_root;
        sides.push(root);
        Ok(Polygon { sides })
    }

    /// Polygon of `G(a_1, ..., a_w; x)`: decorations `a_w, ..., a_1`, root `x`.
    pub fn for_g(args: &[RatFunc], x: &RatFunc) -> Result<Self, PolygonError> {
        Self::new(args.iter().rev().cloned().collect(), x.clone())
    }

    /// Reads `G(a1, ..., an; x)` or `P(d1, ..., dn, root)`.
    pub fn parse(s: &str, vars: &Vars) -> Result<Self, PolygonError> {
        let bad = || PolygonError::Parse(s.to_string());
        match syntax::parse(s)? {
            Ast::Call { name, index, args, arg } if index.is_empty() => {
                let conv = |a: &Ast| syntax::ast_to_ratfunc(a, vars);
                let mut ds = args.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
                match (name.as_str(), arg) {
                    ("G", Some(x)) => Self::for_g(&ds, &conv(&x)?),
                    ("P", None) => {
                        let root = ds.pop().ok_or_else(bad)?;
                        Self::new(ds, root)
                    }
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }

    /// Number of sides `n`; the weight of the symbol is `n - 1`.
    pub fn n_sides(&self) -> usize {
        self.sides.len()
    }

    pub fn weight(&self) -> usize {
        self.sides.len() - 1
    }

    /// Decoration of side `k` (1-based).
    pub fn side(&self, k: usize) -> &RatFunc {
        &self.sides[k - 1]
    }

    pub fn root(&self) -> &RatFunc {
        self.sides.last().expect("nonempty")
    }

    pub fn non_root(&self) -> &[RatFunc] {
        &self.sides[..self.sides.len() - 1]
    }

    pub fn vars(&self) -> &Vars {
        self.sides[0].vars()
    }

    pub fn dissections(&self) -> Arc<Vec<Dissection>> {
        enumerate_maximal_dissections(self.n_sides())
    }
}

impl fmt::Display for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.sides.iter().map(|d| d.to_string()).collect();
        write!(f, "P({})", ds.join(", "))
    }
}

/// Arrow from vertex `v_j` to side `e_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub from_vertex: usize,
    pub to_side: usize,
}

impl Arrow {
    /// Points leftwards in the rolled-out polygon.
    pub fn is_backward(&self) -> bool {
        self.to_side + 1 < self.from_vertex
    }

    /// Position on the boundary circle: `v_j` at `2j-2`, `e_k` at `2k-1`.
    fn ends(&self) -> (usize, usize) {
        (2 * self.from_vertex - 2, 2 * self.to_side - 1)
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}->e{}", self.from_vertex, self.to_side)
    }
}

/// All admissible arrows of an `n`-gon in lexicographic order.
pub fn all_arrows(n: usize) -> Vec<Arrow> {
    let mut out = Vec::new();
    for j in 1..=n {
        let prev = if j == 1 { n } else { j - 1 };
        for k in 1..=n {
            if k != j && k != prev {
                out.push(Arrow { from_vertex: j, to_side: k });
            }
        }
    }
    out
}

/// Arrows cross when their ends interleave on the boundary. Arrows sharing a
/// vertex or landing on the same side can always be drawn apart.
pub fn arrows_cross(a: &Arrow, b: &Arrow) -> bool {
    if a.from_vertex == b.from_vertex || a.to_side == b.to_side {
        return false;
    }
    let (p, q) = a.ends();
    let (lo, hi) = (p.min(q), p.max(q));
    let inside = |t: usize| lo < t && t < hi;
    let (r, s) = b.ends();
    if [r, s].iter().any(|&t| t == lo || t == hi) {
        return false;
    }
    inside(r) != inside(s)
}

/// A maximal set of `n - 2` pairwise non-crossing arrows of an `n`-gon.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dissection {
    pub n: usize,
    pub arrows: Vec<Arrow>,
}

impl Dissection {
    pub fn backward_count(&self) -> usize {
        self.arrows.iter().filter(|a| a.is_backward()).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.arrows.iter().map(|a| serde_json::json!([a.from_vertex, a.to_side])).collect(),
        )
    }
}

impl fmt::Display for Dissection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.arrows.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", s.join(", "))
    }
}

fn dissection_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<Dissection>>>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<Vec<Dissection>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Every maximal dissection of an `n`-gon, lexicographic in the sorted arrow lists.
pub fn enumerate_maximal_dissections(n: usize) -> Arc<Vec<Dissection>> {
    if let Some(d) = dissection_cache().lock().expect("cache").get(&n) {
        return d.clone();
    }
    let arrows = all_arrows(n);
    let want = n.saturating_sub(2);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(arrows: &[Arrow], start: usize, want: usize, cur: &mut Vec<Arrow>, out: &mut Vec<Vec<Arrow>>) {
        if cur.len() == want {
            out.push(cur.clone());
            return;
        }
        for i in start..arrows.len() {
            if arrows.len() - i < want - cur.len() {
                break;
            }
            if cur.iter().all(|c| !arrows_cross(c, &arrows[i])) {
                cur.push(arrows[i]);
                rec(arrows, i + 1, want, cur, out);
                cur.pop();
            }
        }
    }
    if n >= 2 {
        rec(&arrows, 0, want, &mut cur, &mut out);
    }
    let ds = Arc::new(out.into_iter().map(|arrows| Dissection { n, arrows }).collect::<Vec<_>>());
    dissection_cache().lock().expect("cache").insert(n, ds.clone());
    ds
}

/// `(-1)^{#backward arrows}`.
pub fn dissection_sign(d: &Dissection) -> i8 {
    if d.backward_count() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Bigon of a dissection, as side numbers: `μ = 1 - root/other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bigon {
    pub other: usize,
    pub root: usize,
}

/// Tree dual to a dissection; node 0 holds the root side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualTree {
    pub nodes: Vec<Bigon>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl DualTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Point {
    Vertex(usize),
    Land(usize),
}

/// Regions cut out by the arrows, each as a cycle of boundary positions.
fn regions(d: &Dissection) -> (Vec<Point>, Vec<Vec<usize>>) {
    let n = d.n;
    let mut pts = Vec::new();
    for k in 1..=n {
        pts.push(Point::Vertex(k));
        let mut lands: Vec<usize> = (0..d.arrows.len()).filter(|&i| d.arrows[i].to_side == k).collect();
        // Arrows from vertices further round land closer to v_k.
        lands.sort_by_key(|&i| std::cmp::Reverse((d.arrows[i].from_vertex + 2 * n - k - 1) % n));
        pts.extend(lands.into_iter().map(Point::Land));
    }
    let pos_of = |p: Point| pts.iter().position(|&q| q == p).expect("point");
    let chords: Vec<(usize, usize)> = (0..d.arrows.len())
        .map(|i| (pos_of(Point::Vertex(d.arrows[i].from_vertex)), pos_of(Point::Land(i))))
        .collect();
    let mut done = Vec::new();
    let mut stack = vec![(0..pts.len()).collect::<Vec<_>>()];
    while let Some(r) = stack.pop() {
        let m = r.len();
        let split = chords.iter().find_map(|&(p, q)| {
            let i = r.iter().position(|&t| t == p)?;
            let j = r.iter().position(|&t| t == q)?;
            let (i, j) = (i.min(j), i.max(j));
            (j - i != 1 && !(i == 0 && j == m - 1)).then_some((i, j))
        });
        match split {
            Some((i, j)) => {
                stack.push(r[i..=j].to_vec());
                let mut other = r[j..].to_vec();
                other.extend_from_slice(&r[..=i]);
                stack.push(other);
            }
            None => done.push(r),
        }
    }
    (pts, done)
}

fn side_of(p: Point, d: &Dissection) -> usize {
    match p {
        Point::Vertex(k) => k,
        Point::Land(i) => d.arrows[i].to_side,
    }
}

/// Dual tree of a maximal dissection.
pub fn dual_tree(d: &Dissection) -> DualTree {
    let (pts, regs) = regions(d);
    let np = pts.len();
    let mut sides: Vec<BTreeSet<usize>> = Vec::new();
    let mut chord_of: Vec<Vec<usize>> = Vec::new();
    let mut root_region = None;
    for (ri, r) in regs.iter().enumerate() {
        let mut s = BTreeSet::new();
        let mut cs = Vec::new();
        for t in 0..r.len() {
            let (p, q) = (r[t], r[(t + 1) % r.len()]);
            if (p + 1) % np == q {
                s.insert(side_of(pts[p], d));
                if p == np - 1 {
                    root_region = Some(ri);
                }
            } else if (q + 1) % np == p {
                s.insert(side_of(pts[q], d));
                if q == np - 1 {
                    root_region = Some(ri);
                }
            } else {
                let arrow = [pts[p], pts[q]].iter().find_map(|x| match x {
                    Point::Land(i) => Some(*i),
                    Point::Vertex(_) => None,
                });
                cs.push(arrow.expect("chord ends at a landing point"));
            }
        }
        debug_assert_eq!(s.len(), 2, "every region is a bigon");
        sides.push(s);
        chord_of.push(cs);
    }
    let root_region = root_region.expect("root side");
    let mut nodes = Vec::new();
    let mut parent = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut queue = std::collections::VecDeque::from([(root_region, d.n, None::<usize>, None::<usize>)]);
    while let Some((ri, root_side, par, via)) = queue.pop_front() {
        let other = *sides[ri].iter().find(|&&s| s != root_side).expect("bigon");
        let id = nodes.len();
        nodes.push(Bigon { other, root: root_side });
        parent.push(par);
        children.push(Vec::new());
        if let Some(p) = par {
            children[p].push(id);
        }
        for &a in &chord_of[ri] {
            if Some(a) == via {
                continue;
            }
            let next = (0..regs.len()).find(|&rj| rj != ri && chord_of[rj].contains(&a)).expect("adjacent");
            queue.push_back((next, d.arrows[a].to_side, Some(id), Some(a)));
        }
    }
    DualTree { nodes, parent, children }
}

/// All orderings of the tree nodes in which every parent precedes its children.
pub fn linear_extensions(t: &DualTree) -> Vec<Vec<usize>> {
    fn rec(t: &DualTree, avail: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if avail.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..avail.len() {
            let v = avail.remove(i);
            let added = t.children[v].len();
            avail.extend(&t.children[v]);
            cur.push(v);
            rec(t, avail, cur, out);
            cur.pop();
            avail.truncate(avail.len() - added);
            avail.insert(i, v);
        }
    }
    let mut out = Vec::new();
    if t.is_empty() {
        return vec![vec![]];
    }
    rec(t, &mut vec![0], &mut Vec::new(), &mut out);
    out
}

/// `μ(other | root) = 1 - root/other`, or `root` when `other = 0`.
pub fn mu(other: &RatFunc, root: &RatFunc) -> RatFunc {
    if other.is_zero() {
        root.clone()
    } else {
        &RatFunc::one(root.vars()) - &(root / other)
    }
}

/// Weight-1 symbol of `μ`, or `None` when the bigon is degenerate
/// (`μ` vanishes or is torsion).
fn mu_symbol(other: &RatFunc, root: &RatFunc, a: &Alphabet) -> Result<Option<Symbol>, AlphabetError> {
    let m = mu(other, root);
    if m.is_zero() {
        return Ok(None);
    }
    if let Some(c) = m.constant_value() {
        if c.is_one() || (-c).is_one() {
            return Ok(None);
        }
    }
    let s = expand_factor(&m, a)?;
    Ok((!s.is_zero()).then_some(s))
}

/// Dual trees and signs of every maximal dissection of an `n`-gon.
fn prepared(n: usize) -> Arc<Vec<(i8, DualTree)>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<Vec<(i8, DualTree)>>>>> = OnceLock::new();
    let cache = C.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache").get(&n) {
        return p.clone();
    }
    let p: Vec<(i8, DualTree)> =
        enumerate_maximal_dissections(n).par_iter().map(|d| (dissection_sign(d), dual_tree(d))).collect();
    let p = Arc::new(p);
    cache.lock().expect("cache").insert(n, p.clone());
    p
}

fn tree_symbol(t: &DualTree, v: usize, mus: &[Symbol]) -> Symbol {
    let mut acc = Symbol::unit();
    for &c in &t.children[v] {
        acc = acc.shuffle(&tree_symbol(t, c, mus));
    }
    mus[v].tensor(&acc)
}

/// Sum over dissections and compatible linear orders of signed μ tensors.
pub fn polygon_symbol(p: &Polygon, a: &Alphabet) -> Result<Symbol, PolygonError> {
    let n = p.n_sides();
    let w = p.weight();
    if p.root().is_zero() {
        return Ok(Symbol::zero(w));
    }
    let mut table: Vec<Vec<Option<Result<Option<Symbol>, AlphabetError>>>> = vec![vec![None; n + 1]; n + 1];
    for o in 1..=n {
        for r in 1..=n {
            if o != r {
                table[o][r] = Some(mu_symbol(p.side(o), p.side(r), a));
            }
        }
    }
    let terms: Result<Vec<Symbol>, AlphabetError> = prepared(n)
        .par_iter()
        .filter_map(|(sign, t)| {
            let mut mus = Vec::with_capacity(t.len());
            for b in &t.nodes {
                match table[b.other][b.root].as_ref().expect("distinct sides") {
                    Ok(Some(s)) => mus.push(s.clone()),
                    Ok(None) => return None,
                    Err(e) => return Some(Err(e.clone())),
                }
            }
            let s = tree_symbol(t, 0, &mus);
            Some(Ok(if *sign < 0 { s.neg() } else { s }))
        })
        .collect();
    let mut out = Symbol::zero(w);
    for t in terms? {
        out.add_assign(&t);
    }
    Ok(out)
}

/// As [`polygon_symbol`], first growing `a` by the factors of every μ value.
pub fn polygon_symbol_auto(p: &Polygon, a: &mut Alphabet) -> Result<Symbol, PolygonError> {
    let n = p.n_sides();
    for o in 1..=n {
        for r in 1..=n {
            let m = mu(p.side(o), p.side(r));
            if o != r && !m.is_zero() {
                a.grow_with(&m)?;
            }
        }
    }
    polygon_symbol(p, a)
}

/// Symbol from the differential equation of `G`, recursing on the removed
/// argument; letters are added to `a` as they appear. Generic input only.
pub fn recursive_symbol(p: &Polygon, a: &mut Alphabet) -> Result<Symbol, PolygonError> {
    let n = p.n_sides();
    let zero = RatFunc::zero(p.vars());
    for k in 1..=n {
        if p.side(k).is_zero() {
            return Err(PolygonError::NonGenericDecorations(format!("side {k} is 0")));
        }
        for l in k + 1..=n {
            if p.side(k) == p.side(l) {
                return Err(PolygonError::NonGenericDecorations(format!("sides {k} and {l} coincide")));
            }
        }
    }
    let m = n - 1;
    if m > 20 {
        return Err(PolygonError::NonGenericDecorations("too many sides".into()));
    }
    let mut memo: HashMap<u32, Symbol> = HashMap::new();
    fn rec(
        mask: u32,
        p: &Polygon,
        zero: &RatFunc,
        a: &mut Alphabet,
        memo: &mut HashMap<u32, Symbol>,
    ) -> Result<Symbol, PolygonError> {
        if mask == 0 {
            return Ok(Symbol::unit());
        }
        if let Some(s) = memo.get(&mask) {
            return Ok(s.clone());
        }
        let n = p.n_sides();
        // Sequence a_0 = 0, remaining sides in order, root.
        let mut seq: Vec<&RatFunc> = vec![zero];
        let mut idx = vec![usize::MAX];
        for k in 1..n {
            if mask & (1 << (k - 1)) != 0 {
                seq.push(p.side(k));
                idx.push(k);
            }
        }
        seq.push(p.root());
        let w = seq.len() - 2;
        let mut out = Symbol::zero(w);
        for t in 1..=w {
            let f = &(seq[t] - seq[t + 1]) / &(seq[t] - seq[t - 1]);
            a.grow_with(&f)?;
            let letter = expand_factor(&f, a)?;
            let sub = rec(mask & !(1 << (idx[t] - 1)), p, zero, a, memo)?;
            out.add_assign(&sub.tensor(&letter));
        }
        memo.insert(mask, out.clone());
        Ok(out)
    }
    rec((1u32 << m) - 1, p, &zero, a, &mut memo)
}

/// Rooted spanning tree on side midpoints: `parent[k-1]` is the parent of
/// side `k`; the root side `n` has none.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HookArrowTree {
    pub parent: Vec<Option<usize>>,
}

impl HookArrowTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.n()).filter_map(|k| self.parent[k - 1].map(|p| (k, p))).collect()
    }

    /// Edges pointing to an earlier vertex.
    pub fn backward_count(&self) -> usize {
        self.edges().iter().filter(|(s, t)| t < s).count()
    }

    pub fn is_interlaced(&self) -> bool {
        let es: Vec<(usize, usize)> = self.edges().iter().map(|&(s, t)| (s.min(t), s.max(t))).collect();
        es.iter().any(|&(a, c)| es.iter().any(|&(b, d)| a < b && b < c && c < d))
    }

    /// Every non-root vertex reaches the root.
    pub fn is_spanning(&self) -> bool {
        let n = self.n();
        if n == 0 || self.parent[n - 1].is_some() {
            return false;
        }
        (1..n).all(|k| {
            let mut cur = k;
            for _ in 0..n {
                match self.parent[cur - 1] {
                    Some(p) if p == n => return true,
                    Some(p) => cur = p,
                    None => return false,
                }
            }
            false
        })
    }
}

/// Hook-arrow tree of a dissection: one edge per bigon, oriented from its
/// non-root side to its root side.
pub fn hook_arrow_tree(d: &Dissection) -> HookArrowTree {
    let t = dual_tree(d);
    let mut parent = vec![None; d.n];
    for b in &t.nodes {
        parent[b.other - 1] = Some(b.root);
    }
    HookArrowTree { parent }
}

/// Brute-force list of all non-interlaced spanning trees rooted at `v_n`.
pub fn enumerate_hook_arrow_trees(n: usize) -> Vec<HookArrowTree> {
    let mut out = Vec::new();
    let mut parent = vec![None; n];
    fn rec(k: usize, n: usize, parent: &mut Vec<Option<usize>>, out: &mut Vec<HookArrowTree>) {
        if k == n {
            let t = HookArrowTree { parent: parent.clone() };
            if t.is_spanning() && !t.is_interlaced() {
                out.push(t);
            }
            return;
        }
        for p in 1..=n {
            if p != k {
                parent[k - 1] = Some(p);
                rec(k + 1, n, parent, out);
            }
        }
        parent[k - 1] = None;
    }
    if n >= 1 {
        rec(1, n, &mut parent, &mut out);
    }
    out.sort();
    out
}

/// `λ = (-1)^a C(n-1, a)` with `a = n - max{i : ε_i = -1}`, the coefficient of
/// `2^{⊗n}` in the symbol of `P(ε_1, ..., ε_n, 1)`; zero without a `-1`.
pub fn sign_pattern_coefficient(eps: &[i8]) -> BigInt {
    let n = eps.len();
    let Some(last) = eps.iter().rposition(|&e| e == -1) else { return BigInt::zero() };
    let a = n - (last + 1);
    let c = binomial(BigInt::from(n - 1), BigInt::from(a));
    if a % 2 == 0 {
        c
    } else {
        -c
    }
}

/// `Σ_i (-1)^i C(n-i+c, n-i) C(n+c+1, i)`, which equals `(-1)^n`.
pub fn binomial_alternating_sum(n: u64, c: u64) -> BigInt {
    let mut s = BigInt::zero();
    for i in 0..=n {
        let t = binomial(BigInt::from(n - i + c), BigInt::from(n - i)) * binomial(BigInt::from(n + c + 1), BigInt::from(i));
        if i % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

/// Polygon with all decorations rational constants.
pub fn constant_polygon(vars: &Vars, non_root: &[Rational], root: Rational) -> Polygon {
    let c = |r: &Rational| RatFunc::constant(vars, r.clone());
    Polygon::new(non_root.iter().map(c).collect(), c(&root)).expect("at least one side")
}
