//! Classification of the symbol of an involutive hyperbolic system in three variables.
//!
//! The three quadratic symbol forms `M^k` satisfy linear relations `sum_k l^k M^k = 0` with linear
//! `l^k`. A two-dimensional relation space spans a pencil `l + z m`, and the root multiplicities of
//! `det(l + z m)` on the projective line decide the case.

mod algebra;
mod error;
mod sampled;
mod serial;
mod symbol;

pub use algebra::{det3, nullspace, Poly, Scalar};
pub use error::ClassifyError;
pub use sampled::{classify_forms, to_expr_forms, ExprForms, SymbolReport};
pub use serial::{forms_from_json, forms_from_value};
pub use symbol::{
    classify, classify_pencil, combine, is_relation, monomial_form, pair_forms, symbol_relations,
    Case, ClassificationResult as ClassificationResultOf, LinearForm, QuadForm, Relation,
    SymbolData as SymbolDataOf, CUBIC_MONOMIALS,
};

/// Exact rational coefficients.
pub type Rational = num_rational::BigRational;
/// Symbol data over the rationals.
pub type SymbolData = SymbolDataOf<Rational>;
/// Classification over the rationals.
pub type ClassificationResult = ClassificationResultOf<Rational>;
