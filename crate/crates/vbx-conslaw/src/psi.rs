//! The maps `Psi_ij` from `(0, s-1)` forms to `(2, s)` forms and the
//! assembly `omega = sum Psi_ij(rho_ij)`.

use crate::error::ConslawError;
use crate::law::ConservationLaw;
use crate::nu;
use std::collections::BTreeMap;
use vbx_expr::{Expr, Policy, ZeroVerdict};
use vbx_forms::{lie_d, verdict, BiForm};
use vbx_jet::{pairs, Manifold};
use vbx_laplace::LinearizedSystem;

/// Which closed form of `Psi_ij` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsiVariant {
    /// Bilinear concomitant of `L_ij`:
    /// `Psi_ij = nu_i ^ P_i + nu_j ^ P_j` with
    /// `P_i = 1/2 (rho ^ X_j Theta - X_j rho ^ Theta) + A^i_ij rho ^ Theta` and `i`, `j` swapped for `P_j`.
    /// Then `d_H omega = -sigma_123 ^ (sum L*_ij rho_ij) ^ Theta`.
    #[default]
    Green,
    /// The printed formula `1/2 sigma_i ^ sigma_k ^ [Theta ^ psi_i + xi_i ^ rho] - 1/2 sigma_j ^ sigma_k ^ [Theta ^ psi_j - xi_j ^ rho]`
    /// with `xi_i = X_i Theta + A^j_ij Theta`, `xi_j = X_j Theta + A^i_ij Theta`.
    Published,
}

impl PsiVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            PsiVariant::Green => "green",
            PsiVariant::Published => "published",
        }
    }
}

/// Forms `rho_ij` of type `(0, s-1)` for the three pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoTriple {
    s: u8,
    rho: BTreeMap<(u8, u8), BiForm>,
}

impl RhoTriple {
    /// Missing pairs are zero.
    pub fn new(s: u8, rho: BTreeMap<(u8, u8), BiForm>) -> Result<Self, ConslawError> {
        if s == 0 {
            return Err(ConslawError::Input("rho triples need s >= 1".into()));
        }
        let mut out = BTreeMap::new();
        for (i, j) in pairs(3) {
            let w = rho
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| BiForm::zero(0, s - 1));
            let (r, t) = w.bidegree();
            if r != 0 || t != s - 1 {
                return Err(ConslawError::RhoType {
                    i,
                    j,
                    r,
                    s: t,
                    expected: s - 1,
                });
            }
            out.insert((i, j), w);
        }
        if let Some(&(i, j)) = rho.keys().find(|k| !out.contains_key(k)) {
            return Err(ConslawError::Input(format!("no pair ({i},{j}) for n = 3")));
        }
        Ok(RhoTriple { s, rho: out })
    }

    /// Three functions, `s = 1`.
    pub fn functions(rho12: Expr, rho13: Expr, rho23: Expr) -> Self {
        let rho = BTreeMap::from([
            ((1, 2), BiForm::function(rho12)),
            ((1, 3), BiForm::function(rho13)),
            ((2, 3), BiForm::function(rho23)),
        ]);
        RhoTriple { s: 1, rho }
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    pub fn get(&self, i: u8, j: u8) -> &BiForm {
        &self.rho[&(i.min(j), i.max(j))]
    }
}

fn contact(lin: &LinearizedSystem) -> Result<&BiForm, ConslawError> {
    lin.contact().ok_or(ConslawError::NoContact)
}

/// `Psi_ij(rho)` for `i < j`, of type `(2, s)` where `rho` has type `(0, s-1)`.
pub fn psi(
    m: &Manifold,
    lin: &LinearizedSystem,
    rho: &BiForm,
    (i, j): (u8, u8),
    variant: PsiVariant,
) -> Result<BiForm, ConslawError> {
    if m.n() != 3 || lin.n() != 3 {
        return Err(ConslawError::NeedsThree("Psi"));
    }
    if rho.r() != 0 {
        return Err(ConslawError::RhoType {
            i,
            j,
            r: rho.r(),
            s: rho.s(),
            expected: rho.s(),
        });
    }
    let (i, j) = (i.min(j), i.max(j));
    let s = rho.s() + 1;
    let th = contact(lin)?;
    let (ai, aj) = (lin.a(i, j), lin.a(j, i));
    let half = Expr::ratio(1, 2);
    let xi_th = lie_d(m, i, th)?;
    let xj_th = lie_d(m, j, th)?;
    let xi_rho = lie_d(m, i, rho)?;
    let xj_rho = lie_d(m, j, rho)?;
    let rho_th = rho.wedge(th);
    let out = match variant {
        PsiVariant::Green => {
            let p_i = BiForm::sum(
                0,
                s,
                &[
                    (&rho.wedge(&xj_th) - &xj_rho.wedge(th)).scale(&half),
                    rho_th.scale(ai),
                ],
            );
            let p_j = BiForm::sum(
                0,
                s,
                &[
                    (&rho.wedge(&xi_th) - &xi_rho.wedge(th)).scale(&half),
                    rho_th.scale(aj),
                ],
            );
            &nu(i).wedge(&p_i) + &nu(j).wedge(&p_j)
        }
        PsiVariant::Published => {
            let k = vbx_laplace::third(i, j);
            let psi_i = &xi_rho - &rho.scale(aj);
            let psi_j = &rho.scale(ai) - &xj_rho;
            let hat_i = &xi_th + &th.scale(aj);
            let hat_j = &xj_th + &th.scale(ai);
            let first = &th.wedge(&psi_i) + &hat_i.wedge(rho);
            let second = &th.wedge(&psi_j) - &hat_j.wedge(rho);
            let sik = BiForm::sigma(i).wedge(&BiForm::sigma(k));
            let sjk = BiForm::sigma(j).wedge(&BiForm::sigma(k));
            &sik.wedge(&first).scale(&half) - &sjk.wedge(&second).scale(&half)
        }
    };
    Ok(out)
}

/// `sum_{i<j} L*_ij(rho_ij)`, a `(0, s-1)` form.
pub fn adjoint_sum(
    m: &Manifold,
    lin: &LinearizedSystem,
    rho: &RhoTriple,
) -> Result<BiForm, ConslawError> {
    let adj = lin.adjoint(m)?;
    let mut parts = Vec::new();
    for (i, j) in pairs(3) {
        parts.push(adj.apply_form(m, i, j, rho.get(i, j))?);
    }
    Ok(BiForm::sum(0, rho.s() - 1, &parts))
}

/// The assembled law with the adjoint-sum verdict.
#[derive(Debug, Clone)]
pub struct RhoReport {
    pub law: ConservationLaw,
    pub adjoint_sum: BiForm,
    pub adjoint_verdict: ZeroVerdict,
    pub variant: PsiVariant,
}

impl RhoReport {
    /// Closure is asserted only when the adjoint sum vanishes.
    pub fn closed(&self) -> bool {
        self.adjoint_verdict.holds() && self.law.closed()
    }
}

/// `omega = sum_{i<j} Psi_ij(rho_ij)` with both verdicts.
pub fn conslaw_from_rho(
    m: &Manifold,
    lin: &LinearizedSystem,
    rho: &RhoTriple,
    variant: PsiVariant,
    policy: &Policy,
) -> Result<RhoReport, ConslawError> {
    if m.n() != 3 {
        return Err(ConslawError::NeedsThree("conslaw"));
    }
    let mut parts = Vec::new();
    for (i, j) in pairs(3) {
        parts.push(psi(m, lin, rho.get(i, j), (i, j), variant)?);
    }
    let form = BiForm::sum(2, rho.s(), &parts);
    let adjoint_sum = adjoint_sum(m, lin, rho)?;
    let adjoint_verdict = verdict(m, &adjoint_sum, policy)?;
    let mut provenance = BTreeMap::from([
        ("generator".to_string(), "rho".to_string()),
        ("psi".to_string(), variant.as_str().to_string()),
        ("mu".to_string(), lin.mu().to_string()),
    ]);
    for (i, j) in pairs(3) {
        provenance.insert(format!("rho{i}{j}"), render_form(rho.get(i, j)));
    }
    let law = ConservationLaw::check(m, form, provenance, policy)?;
    Ok(RhoReport {
        law,
        adjoint_sum,
        adjoint_verdict,
        variant,
    })
}

fn render_form(w: &BiForm) -> String {
    if w.s() == 0 {
        w.as_function().to_string()
    } else {
        w.to_string()
    }
}
