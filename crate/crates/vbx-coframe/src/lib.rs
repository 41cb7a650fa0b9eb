//! Laplace-adapted coframes `{sigma_i, Theta, xi_j^n}` built from the Laplace cascade.
//!
//! Adapted forms are [`vbx_forms::BiForm`]s whose contact labels are read as
//! coframe elements: `Theta { branch: 0, order: 0 }` is `Theta` and
//! `Theta { branch: j, order: n }` is `xi_j^n`.

mod check;
mod coframe;

pub use check::{
    bracket_check, structure_check, BracketRow, Readings, StructureReport, StructureRow,
};
pub use coframe::{
    adapted_name, characteristic_coframe, AdaptedCoframe, Branch, CoframeError, Dual,
};
