//! The `(1, s)` and `(2, s)` families built from characteristic invariants.

use crate::error::ConslawError;
use crate::invariant::invariant_sequence;
use crate::law::ConservationLaw;
use std::collections::BTreeMap;
use vbx_expr::{Expr, Policy};
use vbx_forms::{d_v_function, BiForm};
use vbx_jet::{Manifold, TotalVectorField};

/// `(1, s)` laws from an `I` invariant under `fields` (all indices but `l` by default).
///
/// With `alpha_n = d_V I_n - I_{n+1} d_V It` and `I_{n+1} = X_l(I_n)`:
/// `s = 0` gives `I_k sigma_l`, `s = 1` gives `sigma_l ^ alpha_k` and
/// `s >= 2` gives `sigma_l ^ alpha_{k+1} ^ alpha_k ^ eta` with
/// `eta = eta_coeff * alpha_{e_1} ^ ... ^ alpha_{e_{s-2}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneS {
    pub l: u8,
    pub s: u8,
    pub k: usize,
    pub inv: Expr,
    /// `It` with `X_l(It) = 1`, invariant under `fields`.
    pub tilde: Expr,
    pub fields: Vec<u8>,
    pub eta: Vec<usize>,
    pub eta_coeff: Expr,
}

/// `(2, s)` laws from `X_l`-invariant `J` and `K`.
///
/// `J_n = X_i^{n-1}(J)`, `K_n = X_j^{n-1}(K)`,
/// `nu_n = d_V J_n - X_i(J_n) d_V a - X_j(J_n) d_V b` and likewise `mu_n` from `K_n`,
/// where `X_i(a) = 1`, `X_j(a) = 0`, `X_i(b) = 0`, `X_j(b) = 1`.
/// `s >= 2` gives `sigma_i ^ sigma_j ^ [nu_{k+1} ^ nu_k ^ eta_1 + mu_{k+1} ^ mu_k ^ eta_2]`,
/// `s = 1` gives `sigma_i ^ sigma_j ^ (nu_k + mu_k)` and `s = 0` gives `(J_k + K_k) sigma_i ^ sigma_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoS {
    pub i: u8,
    pub j: u8,
    pub l: u8,
    pub s: u8,
    pub k: usize,
    pub a: Expr,
    pub b: Expr,
    pub inv_j: Expr,
    pub inv_k: Expr,
    pub eta1: Vec<usize>,
    pub eta2: Vec<usize>,
    pub eta_coeff: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    OneS(OneS),
    TwoS(TwoS),
}

fn check_value(
    m: &Manifold,
    i: u8,
    f: &Expr,
    name: &str,
    target: i64,
    policy: &Policy,
) -> Result<(), ConslawError> {
    let e = m.total(f, i)? - Expr::int(target);
    let v = m.verdict(&e, policy)?;
    if v.holds() {
        Ok(())
    } else {
        Err(ConslawError::Hypothesis {
            what: format!("X{i}({name}) = {target}"),
            verdict: v.label(),
        })
    }
}

fn eta_form(
    seq: &[BiForm],
    idx: &[usize],
    coeff: &Expr,
    name: &str,
) -> Result<BiForm, ConslawError> {
    let mut acc = BiForm::function(coeff.clone());
    for &e in idx {
        let f = seq.get(e.wrapping_sub(1)).ok_or_else(|| {
            ConslawError::Input(format!("{name} index {e} outside 1..{}", seq.len()))
        })?;
        acc = acc.wedge(f);
    }
    Ok(acc)
}

fn check_index(i: u8, n: u8) -> Result<(), ConslawError> {
    if (1..=n).contains(&i) {
        Ok(())
    } else {
        Err(ConslawError::Input(format!("index {i} outside 1..{n}")))
    }
}

fn one_s(m: &Manifold, g: &OneS, policy: &Policy) -> Result<ConservationLaw, ConslawError> {
    let n = m.n();
    check_index(g.l, n)?;
    let fields: Vec<u8> = if g.fields.is_empty() {
        (1..=n).filter(|&a| a != g.l).collect()
    } else {
        g.fields.clone()
    };
    for &a in &fields {
        check_index(a, n)?;
        if a == g.l {
            return Err(ConslawError::Input(format!("field {a} coincides with l")));
        }
    }
    if g.k == 0 {
        return Err(ConslawError::Input("k must be at least 1".into()));
    }
    if g.s >= 2 && g.eta.len() != g.s as usize - 2 {
        return Err(ConslawError::Input(format!(
            "eta needs {} factors for s = {}",
            g.s - 2,
            g.s
        )));
    }
    let top = (g.k + 1).max(g.eta.iter().copied().max().unwrap_or(0));
    let seq = invariant_sequence(m, &g.inv, &g.tilde, &TotalVectorField::d(g.l), top, policy)?;
    for &a in &fields {
        check_value(m, a, &g.tilde, "It", 0, policy)?;
        check_value(m, a, &g.eta_coeff, "eta", 0, policy)?;
        for (q, f) in seq.functions.iter().enumerate().take(top + 1) {
            check_value(m, a, f, &format!("I{}", q + 1), 0, policy)?;
        }
    }
    let sl = BiForm::sigma(g.l);
    let alpha = |q: usize| &seq.alphas[q - 1];
    let form = match g.s {
        0 => sl.scale(&seq.functions[g.k - 1]),
        1 => sl.wedge(alpha(g.k)),
        _ => sl.wedge(alpha(g.k + 1)).wedge(alpha(g.k)).wedge(&eta_form(
            &seq.alphas,
            &g.eta,
            &g.eta_coeff,
            "eta",
        )?),
    };
    let prov = BTreeMap::from([
        ("generator".to_string(), "1s".to_string()),
        ("l".to_string(), g.l.to_string()),
        ("k".to_string(), g.k.to_string()),
        ("I".to_string(), g.inv.to_string()),
        ("It".to_string(), g.tilde.to_string()),
        ("fields".to_string(), format!("{fields:?}")),
        ("eta".to_string(), format!("{} {:?}", g.eta_coeff, g.eta)),
    ]);
    ConservationLaw::check(m, form, prov, policy)
}

/// `nu_1..nu_count` from `J_n = X_along^{n-1}(J)`, with each `J_n` checked `X_l`-invariant.
#[allow(clippy::too_many_arguments)]
fn branch_forms(
    m: &Manifold,
    g: &TwoS,
    f: &Expr,
    name: &str,
    along: u8,
    count: usize,
    policy: &Policy,
) -> Result<(Vec<Expr>, Vec<BiForm>), ConslawError> {
    let (dva, dvb) = (d_v_function(m, &g.a)?, d_v_function(m, &g.b)?);
    let mut fs = vec![m.reduce(f)?];
    for _ in 1..count {
        let next = m.total(fs.last().expect("nonempty"), along)?;
        fs.push(next);
    }
    let mut forms = Vec::new();
    for (q, fq) in fs.iter().enumerate() {
        check_value(m, g.l, fq, &format!("{name}{}", q + 1), 0, policy)?;
        let w = BiForm::sum(
            0,
            1,
            &[
                d_v_function(m, fq)?,
                dva.scale(&-m.total(fq, g.i)?),
                dvb.scale(&-m.total(fq, g.j)?),
            ],
        );
        forms.push(w);
    }
    Ok((fs, forms))
}

fn two_s(m: &Manifold, g: &TwoS, policy: &Policy) -> Result<ConservationLaw, ConslawError> {
    if m.n() != 3 {
        return Err(ConslawError::NeedsThree("(2,s) generation"));
    }
    let mut idx = [g.i, g.j, g.l];
    idx.sort_unstable();
    if idx != [1, 2, 3] {
        return Err(ConslawError::Input(format!(
            "({},{},{}) is not a permutation of 1,2,3",
            g.i, g.j, g.l
        )));
    }
    if g.k == 0 {
        return Err(ConslawError::Input("k must be at least 1".into()));
    }
    if g.s >= 2 && (g.eta1.len() != g.s as usize - 2 || g.eta2.len() != g.s as usize - 2) {
        return Err(ConslawError::Input(format!(
            "eta1 and eta2 need {} factors for s = {}",
            g.s - 2,
            g.s
        )));
    }
    for (f, name) in [(&g.a, "a"), (&g.b, "b"), (&g.eta_coeff, "eta")] {
        check_value(m, g.l, f, name, 0, policy)?;
    }
    check_value(m, g.i, &g.a, "a", 1, policy)?;
    check_value(m, g.j, &g.a, "a", 0, policy)?;
    check_value(m, g.i, &g.b, "b", 0, policy)?;
    check_value(m, g.j, &g.b, "b", 1, policy)?;
    let top = (g.k + 1).max(g.eta1.iter().chain(&g.eta2).copied().max().unwrap_or(0));
    let (js, nus) = branch_forms(m, g, &g.inv_j, "J", g.i, top, policy)?;
    let (ks, mus) = branch_forms(m, g, &g.inv_k, "K", g.j, top, policy)?;
    let sij = BiForm::sigma(g.i).wedge(&BiForm::sigma(g.j));
    let form = match g.s {
        0 => sij.scale(&(&js[g.k - 1] + &ks[g.k - 1])),
        1 => sij.wedge(&(&nus[g.k - 1] + &mus[g.k - 1])),
        _ => {
            let first = nus[g.k].wedge(&nus[g.k - 1]).wedge(&eta_form(
                &nus,
                &g.eta1,
                &g.eta_coeff,
                "eta1",
            )?);
            let second = mus[g.k].wedge(&mus[g.k - 1]).wedge(&eta_form(
                &mus,
                &g.eta2,
                &g.eta_coeff,
                "eta2",
            )?);
            sij.wedge(&(&first + &second))
        }
    };
    let prov = BTreeMap::from([
        ("generator".to_string(), "2s".to_string()),
        ("ijl".to_string(), format!("{}{}{}", g.i, g.j, g.l)),
        ("k".to_string(), g.k.to_string()),
        ("J".to_string(), g.inv_j.to_string()),
        ("K".to_string(), g.inv_k.to_string()),
        ("a".to_string(), g.a.to_string()),
        ("b".to_string(), g.b.to_string()),
        (
            "eta".to_string(),
            format!("{} {:?} {:?}", g.eta_coeff, g.eta1, g.eta2),
        ),
    ]);
    ConservationLaw::check(m, form, prov, policy)
}

/// Assemble a law from invariant inputs; every input invariance is checked first.
pub fn generate_cl(
    m: &Manifold,
    g: &Generator,
    policy: &Policy,
) -> Result<ConservationLaw, ConslawError> {
    match g {
        Generator::OneS(g) => one_s(m, g, policy),
        Generator::TwoS(g) => two_s(m, g, policy),
    }
}
