//! Exact symbolic expressions over jet coordinates.
//!
//! Expressions are immutable values kept in a canonical rational-function
//! normal form with exact rational coefficients. The crate parses and prints
//! the expression grammar, applies derivations and substitutions, evaluates
//! numerically, and tests for zero.

mod coord;
mod derive;
mod eval;
mod expr;
mod parse;
mod print;
mod zero;

pub use coord::Coordinate;
pub use eval::EvalError;
pub use expr::{Atom, Expr, Func};
pub use num_rational::BigRational;
pub use parse::{parse, parse_with, ParseError};
pub use print::render;
pub use zero::{
    find_witness, is_zero, Certainty, Interval, Policy, SampleBox, SampleSpec, Witness,
    ZeroTestError, ZeroVerdict, DEFAULT_CAP, DEFAULT_POINTS, DEFAULT_RADIUS, DEFAULT_TOL,
};

/// Numeric point in double precision.
pub type Point = std::collections::BTreeMap<Coordinate, f64>;
