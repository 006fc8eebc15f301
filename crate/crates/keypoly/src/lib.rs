//! Exact key-polynomial machinery over rank-one valued fields.
//!
//! The crate provides, bottom up:
//!
//! - exact rational values extended with `±inf` ([`value`]);
//! - level-bounded Puiseux series over a prime field with per-element
//!   precision tracking, and exact rational functions in `t` ([`field`]);
//! - polynomials in `x` with Hasse derivatives, Euclidean division,
//!   radix expansions in a monic base, and Bezout inverses ([`poly`]);
//! - valuation handles (monomial, evaluation at a described series,
//!   truncation by a key polynomial) with levels and expansion data
//!   ([`valuation`]);
//! - the derivative/truncation interplay: Leibniz tuple expansions with
//!   multinomial coefficients, value bounds, and the derivative drop
//!   operator ([`deriv`]), plus same-degree and expansion comparators
//!   ([`compare`]);
//! - construction and structure analysis of limit key polynomials for
//!   the Artin-Schreier scenario families ([`limits`]);
//! - a literal parser ([`parse`]), JSON report types ([`report`]), and
//!   a deterministic seeded property suite ([`suite`]).
//!
//! All arithmetic is exact; nothing is ever rounded. Computations that
//! cannot be certified at the configured approximation depth report
//! `Undecided` instead of guessing.

pub mod compare;
pub mod config;
pub mod deriv;
pub mod field;
pub mod fp;
pub mod limits;
pub mod parse;
pub mod poly;
pub mod report;
pub mod rng;
pub mod suite;
pub mod valuation;
pub mod value;

pub use field::puiseux::PuiseuxSeries;
pub use field::ratfunc::RatFunc;
pub use field::{Coefficient, FieldError, FieldKind, FieldSpec};
pub use parse::{parse_coeff, parse_poly, ParseError};
pub use poly::{Poly, PolyError, QExpansion};
pub use valuation::{
    EngineError, ExitClass, ExpansionData, KeyRefutation, LevelData, ThetaApprox, ThetaOracle,
    ValuationHandle,
};
pub use value::{ExtValue, Rat, ValueError};
