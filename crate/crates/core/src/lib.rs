//! Symbol calculus for multiple polylogarithms.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact_arith`]: rationals, multivariate polynomials and rational functions over Q.
//! - [`alphabet`]: letters, multiplicative decomposition, candidate arguments.
//! - [`tensor`]: symbols as words over letters, shuffles, the `Π_w` projectors.
//! - [`polygon`]: decorated polygons, maximal dissections and the polygon symbol.
//! - [`mpl`]: function expressions (G, Li, H, logs, constants) and their symbols.
//! - [`numeric`]: fixed-point evaluation of function expressions.
//! - [`integrator`]: partition-filtered integration of symbols and constant fixing.
//! - [`hpl`]: the harmonic polylogarithm application (alphabet `{2, x, 1-x, 1+x}`).

pub mod alphabet;
pub mod exact_arith;
pub mod hpl;
pub mod integrator;
pub mod mpl;
pub mod numeric;
pub mod polygon;
pub mod tensor;


pub use alphabet::{Alphabet, MultVector};
pub use exact_arith::{MPoly, RatFunc, Rational};
pub use mpl::FuncExpr;
pub use polygon::Polygon;
pub use tensor::Symbol;
