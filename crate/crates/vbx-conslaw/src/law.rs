//! Closure checks and the conservation-law record.

use crate::error::ConslawError;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use vbx_expr::{Policy, ZeroVerdict};
use vbx_forms::{d_h, verdict, BiForm};
use vbx_jet::Manifold;

fn check_type(m: &Manifold, w: &BiForm) -> Result<(), ConslawError> {
    let (r, s) = w.bidegree();
    if r == 0 || r >= m.n() {
        return Err(ConslawError::Bidegree { r, s, n: m.n() });
    }
    Ok(())
}

/// Verdict on `d_H w = 0` for a form of horizontal degree between `1` and `n - 1`.
pub fn verify_closed(
    m: &Manifold,
    w: &BiForm,
    policy: &Policy,
) -> Result<ZeroVerdict, ConslawError> {
    check_type(m, w)?;
    Ok(verdict(m, &d_h(m, w)?, policy)?)
}

/// A candidate law with its closure verdict.
#[derive(Debug, Clone)]
pub struct ConservationLaw {
    pub form: BiForm,
    pub closure: ZeroVerdict,
    /// Highest order in the adapted coframe. The change of coframe is triangular
    /// with nonzero diagonal, so this equals the highest contact order `k` of a `theta_{i^k}`.
    pub adapted_order: usize,
    pub provenance: BTreeMap<String, String>,
}

impl ConservationLaw {
    /// Compute the closure verdict of `form`; `(0, s)` and top-degree forms are rejected.
    pub fn check(
        m: &Manifold,
        form: BiForm,
        provenance: BTreeMap<String, String>,
        policy: &Policy,
    ) -> Result<Self, ConslawError> {
        let closure = verify_closed(m, &form, policy)?;
        let adapted_order = form.max_order() as usize;
        Ok(ConservationLaw {
            form,
            closure,
            adapted_order,
            provenance,
        })
    }

    pub fn closed(&self) -> bool {
        self.closure.holds()
    }

    /// `zero`, `probable` or `failed`.
    pub fn closure_label(&self) -> &'static str {
        match self.closure {
            ZeroVerdict::Zero => "zero",
            ZeroVerdict::ProbablyZero { .. } => "probable",
            ZeroVerdict::NonZero { .. } => "failed",
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "type": [self.form.r(), self.form.s()],
            "form": self.form.to_value(),
            "closure": self.closure_label(),
            "adapted_order": self.adapted_order,
            "provenance": self.provenance,
        })
    }
}
