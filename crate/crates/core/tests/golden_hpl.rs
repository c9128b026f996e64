//! Reductions of all HPLs listed in the golden file: each reference
//! expression has the HPL symbol and agrees numerically, and the automated
//! reduction reproduces it.

use polysym::exact_arith::rat;
use polysym::hpl::{canonical_terms, hpl_alphabet, hpl_reduce, numeric_gap, symbol_matches, HplIndex, ReduceOptions};
use polysym::FuncExpr;
use rayon::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Entry {
    index: Vec<i8>,
    expression: String,
}

fn golden() -> Vec<(HplIndex, FuncExpr)> {
    let (v, _) = hpl_alphabet();
    let raw: Vec<Entry> = serde_json::from_str(include_str!("golden/hpl_reductions.json")).unwrap();
    raw.into_iter()
        .map(|e| (HplIndex::new(e.index).unwrap(), FuncExpr::parse(&e.expression, &v).unwrap()))
        .collect()
}

#[test]
fn reference_symbols_match() {
    for (h, f) in golden() {
        assert!(symbol_matches(&h, &f).unwrap(), "{h}");
    }
}

#[test]
fn reference_values_match() {
    golden().par_iter().for_each(|(h, f)| {
        for x in [rat(1, 4), rat(1, 3), rat(1, 2)] {
            let g = numeric_gap(h, f, &x, 30).unwrap();
            assert!(g.to_f64() < 1e-25, "{h} at {x}: {}", g.to_f64());
        }
    });
}

#[test]
fn reductions_reproduce_reference() {
    golden().par_iter().for_each(|(h, f)| {
        let r = hpl_reduce(h, &ReduceOptions::default()).unwrap_or_else(|e| panic!("{h}: {e}"));
        let (a, b) = (canonical_terms(&r.expression), canonical_terms(f));
        if a != b {
            // A different representative must still be the same function.
            assert!(symbol_matches(h, &r.expression).unwrap(), "{h}");
            assert!(numeric_gap(h, &r.expression, &rat(2, 7), 30).unwrap().to_f64() < 1e-25, "{h}");
            eprintln!("{h}: equivalent representative differs from reference");
        }
    });
}
