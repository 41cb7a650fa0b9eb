//! Bi-graded differential forms over the coordinate coframe `{sigma_i} ∪ {theta, theta_{i^k}}`.
//!
//! A [`BiForm`] of type `(r, s)` has `r` horizontal factors `sigma_i = dx^i`
//! and `s` contact factors. The calculus module supplies `d_H`, `d_V`, total
//! Lie derivatives and interior products on a [`vbx_jet::Manifold`].

mod basis;
mod calculus;
mod form;
mod serial;

pub use basis::BasisOneForm;
pub use calculus::{
    contact_of, d_h, d_v, d_v_function, horizontal_differential, interior_total, interior_vertical,
    lie, lie_d, verdict,
};
pub use form::BiForm;
pub use serial::FormError;
