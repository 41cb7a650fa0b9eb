//! Combinations of total derivatives `X = sum a_i D_i`.

use crate::manifold::{JetError, Manifold};
use std::collections::BTreeMap;
use vbx_expr::{Expr, Policy};

/// A total vector field `sum a_i D_i` with nonzero coefficients stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalVectorField {
    coeffs: BTreeMap<u8, Expr>,
}

impl TotalVectorField {
    /// The total derivative `D_i`.
    pub fn d(i: u8) -> Self {
        TotalVectorField {
            coeffs: BTreeMap::from([(i, Expr::one())]),
        }
    }

    pub fn from_coeffs(coeffs: BTreeMap<u8, Expr>) -> Self {
        TotalVectorField {
            coeffs: coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
        }
    }

    /// `lambda * D_i`, refusing a factor that tests zero.
    pub fn scaled(
        m: &Manifold,
        i: u8,
        lambda: Expr,
        policy: &Policy,
    ) -> Result<Option<Self>, JetError> {
        if m.verdict(&lambda, policy)?.holds() {
            return Ok(None);
        }
        Ok(Some(TotalVectorField {
            coeffs: BTreeMap::from([(i, lambda)]),
        }))
    }

    pub fn coeffs(&self) -> &BTreeMap<u8, Expr> {
        &self.coeffs
    }

    pub fn coeff(&self, i: u8) -> Expr {
        self.coeffs.get(&i).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiply every coefficient by `lambda`.
    pub fn scale(&self, lambda: &Expr) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|(i, a)| (*i, a.mul(lambda)))
                .collect(),
        )
    }

    /// `[X, Y] = sum_k (X(b_k) - Y(a_k)) D_k`, using `[D_i, D_j] = 0`.
    pub fn commutator(m: &Manifold, x: &Self, y: &Self) -> Result<Self, JetError> {
        let mut keys: Vec<u8> = x.coeffs.keys().chain(y.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let mut out = BTreeMap::new();
        for k in keys {
            let c = m.apply(x, &y.coeff(k))? - m.apply(y, &x.coeff(k))?;
            out.insert(k, c);
        }
        Ok(Self::from_coeffs(out))
    }
}
