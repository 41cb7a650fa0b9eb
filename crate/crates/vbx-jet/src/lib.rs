//! The restricted equation manifold of a system `u_ij = f_ij`.
//!
//! Only the pure derivatives `u_{i^k}` are coordinates; mixed derivatives are
//! rewritten through the equations. Total derivatives act on expressions in
//! these coordinates.

mod field;
mod manifold;
mod system;

pub use field::TotalVectorField;
pub use manifold::{IdentityRow, InvolutivityReport, JetError, JetPoint, Manifold, DEFAULT_BUDGET};
pub use system::{pairs, SpecError, SystemSpec};
