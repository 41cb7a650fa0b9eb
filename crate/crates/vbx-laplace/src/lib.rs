//! The generalized Laplace method for linearized systems `L_ij(Theta) = 0`.
//!
//! [`linearize`] builds the scaled universal linearization of a system, then
//! [`LinearizedSystem`] exposes invariants, compatibility relations, the
//! `(i, j)` transform, Laplace indices and the formal adjoint.

mod compat;
mod linear;
mod transform;

pub use compat::{compatibility, CompatibilityReport, RelationRow};
pub use linear::{linearize, LaplaceError, LaplaceInvariants, LinearizedSystem, PairCoeffs};
pub use transform::{
    index, inverse_check, transform, transform_with, IndexReport, LaplaceIndex, TransformRule,
};

/// Default cap on the number of transforms when computing an index.
pub const DEFAULT_INDEX_CAP: usize = 10;

/// The index `k` distinct from `i` and `j` when `n = 3`.
pub fn third(i: u8, j: u8) -> u8 {
    6 - i - j
}
