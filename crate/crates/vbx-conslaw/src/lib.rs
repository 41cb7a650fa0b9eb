//! Conservation laws of the systems `u_ij = f_ij`.
//!
//! [`conslaw_from_rho`] assembles `(2, s)` laws from solutions of the adjoint
//! system through the maps [`psi`]. The [`invariant`] functions build
//! characteristic invariant contact forms and check Darboux bundles, and
//! [`generate_cl`] produces the `(1, s)` and `(2, s)` families of a Darboux
//! integrable system. Every law carries a closure verdict.

mod error;
mod generate;
pub mod invariant;
mod law;
mod psi;
mod serial;

pub use error::ConslawError;
pub use generate::{generate_cl, Generator, OneS, TwoS};
pub use invariant::{
    darboux_check, invariant_contact_form, invariant_sequence, is_relative_invariant,
    rescale_characteristics, DarbouxReport, InvariantBundle, InvariantForm, InvariantKind,
    InvariantSequence, Rescaled, Row,
};
pub use law::{verify_closed, ConservationLaw};
pub use psi::{adjoint_sum, conslaw_from_rho, psi, PsiVariant, RhoReport, RhoTriple};

use vbx_forms::BiForm;

/// `nu_a = d/dx^a ⌟ (sigma_1 ^ sigma_2 ^ sigma_3)` for `n = 3`.
pub fn nu(a: u8) -> BiForm {
    match a {
        1 => BiForm::sigma(2).wedge(&BiForm::sigma(3)),
        2 => BiForm::sigma(3).wedge(&BiForm::sigma(1)),
        _ => BiForm::sigma(1).wedge(&BiForm::sigma(2)),
    }
}

/// `sigma_1 ^ ... ^ sigma_n`.
pub fn volume(n: u8) -> BiForm {
    (2..=n).fold(BiForm::sigma(1), |acc, i| acc.wedge(&BiForm::sigma(i)))
}
