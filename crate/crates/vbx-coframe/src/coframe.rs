use std::collections::BTreeMap;
use thiserror::Error;
use vbx_expr::{Expr, Policy};
use vbx_forms::{interior_vertical, lie_d, BasisOneForm, BiForm};
use vbx_jet::{JetError, Manifold};
use vbx_laplace::{transform, LaplaceError, LinearizedSystem};

#[derive(Debug, Error)]
pub enum CoframeError {
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("the system carries no realized contact form (build it with linearize)")]
    NoContact,
    #[error("form of order {needed} exceeds the coframe order {order}")]
    OrderTooHigh { needed: usize, order: usize },
    #[error("change of basis is not triangular at {0}")]
    NotTriangular(String),
    #[error("cascade blocked: {which} vanishes at step {step}")]
    Blocked { which: String, step: usize },
    #[error("bad branch choice {i} for branch {j}")]
    BadChoice { i: u8, j: u8 },
}

/// Vertical vector fields dual to the adapted coframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dual {
    /// `Theta(U) = 1`.
    U,
    /// `xi_k^l(V_k^l) = 1`.
    V { k: u8, l: u8 },
}

impl Dual {
    pub fn label(&self) -> BasisOneForm {
        match self {
            Dual::U => BasisOneForm::THETA,
            Dual::V { k, l } => BasisOneForm::theta(*k, *l),
        }
    }
}

/// Display name of an adapted label: `Th`, `xi1^2`.
pub fn adapted_name(b: &BasisOneForm) -> String {
    match b {
        BasisOneForm::Sigma(i) => format!("s{i}"),
        BasisOneForm::Theta { order: 0, .. } => "Th".into(),
        BasisOneForm::Theta { branch, order } => format!("xi{branch}^{order}"),
    }
}

/// One branch `xi_j^1, ..., xi_j^N` seeded by the `(i, j)` transform.
#[derive(Debug, Clone)]
pub struct Branch {
    pub j: u8,
    pub i: u8,
    /// Certified index `p_ij` when `H_ij` vanished within the computed cascade.
    pub index: Option<usize>,
    /// `xi_j^n` for `n = 1..=N` in the coordinate coframe.
    pub elements: Vec<BiForm>,
    /// `c_n` with `xi_j^{n+1} = X_j(xi_j^n) + c_n xi_j^n` (zero past the index), for `n = 0..N`.
    pub shifts: Vec<Expr>,
    /// The systems `X_ij^q(L)` for `q = 0..`, as far as the cascade was computed.
    pub cascade: Vec<LinearizedSystem>,
}

/// The Laplace-adapted coframe to order `N`.
#[derive(Debug, Clone)]
pub struct AdaptedCoframe {
    order: usize,
    n: u8,
    mu: Expr,
    theta: BiForm,
    branches: BTreeMap<u8, Branch>,
    inverse: BTreeMap<BasisOneForm, BiForm>,
}

/// `xi_i^k = X_i^k(Theta)` for `k = 1..=N`, per branch.
pub fn characteristic_coframe(
    m: &Manifold,
    lin: &LinearizedSystem,
    order: usize,
) -> Result<BTreeMap<u8, Vec<BiForm>>, CoframeError> {
    let theta = lin.contact().ok_or(CoframeError::NoContact)?;
    let mut out = BTreeMap::new();
    for i in 1..=lin.n() {
        let mut cur = theta.clone();
        let mut v = Vec::new();
        for _ in 0..order {
            cur = lie_d(m, i, &cur)?;
            v.push(cur.clone());
        }
        out.insert(i, v);
    }
    Ok(out)
}

/// Smallest index different from `j`.
fn default_choice(j: u8) -> u8 {
    if j == 1 {
        2
    } else {
        1
    }
}

fn substitute(w: &BiForm, map: &dyn Fn(&BasisOneForm) -> Option<BiForm>) -> BiForm {
    let mut parts = Vec::new();
    for (mono, c) in w.terms() {
        let mut acc = BiForm::function(c.clone());
        for b in mono {
            let f = if b.is_horizontal() {
                BiForm::basis(*b)
            } else {
                map(b).unwrap_or_else(|| BiForm::basis(*b))
            };
            acc = acc.wedge(&f);
        }
        parts.push(acc);
    }
    BiForm::sum(w.r(), w.s(), &parts)
}

impl AdaptedCoframe {
    /// Build with `i(j)` the smallest index different from `j`.
    pub fn build(
        m: &Manifold,
        lin: &LinearizedSystem,
        order: usize,
        policy: &Policy,
    ) -> Result<Self, CoframeError> {
        Self::build_with(m, lin, order, &BTreeMap::new(), policy)
    }

    /// Build with explicit branch choices `j -> i(j)`; unspecified branches use the default.
    pub fn build_with(
        m: &Manifold,
        lin: &LinearizedSystem,
        order: usize,
        choices: &BTreeMap<u8, u8>,
        policy: &Policy,
    ) -> Result<Self, CoframeError> {
        let theta = lin.contact().ok_or(CoframeError::NoContact)?.clone();
        let n = lin.n();
        let mut branches = BTreeMap::new();
        for j in 1..=n {
            let i = choices
                .get(&j)
                .copied()
                .unwrap_or_else(|| default_choice(j));
            if i == j || i == 0 || i > n {
                return Err(CoframeError::BadChoice { i, j });
            }
            branches.insert(j, build_branch(m, lin, &theta, i, j, order, policy)?);
        }
        let mut cf = AdaptedCoframe {
            order,
            n,
            mu: lin.mu().clone(),
            theta,
            branches,
            inverse: BTreeMap::new(),
        };
        cf.invert(m)?;
        Ok(cf)
    }

    fn invert(&mut self, m: &Manifold) -> Result<(), CoframeError> {
        let mu_inv = self.mu.inv().expect("mu is nonzero");
        self.inverse
            .insert(BasisOneForm::THETA, BiForm::theta().scale(&mu_inv));
        for level in 1..=self.order {
            for (&j, br) in &self.branches {
                let e = &br.elements[level - 1];
                let lead = BasisOneForm::theta(j, level as u8);
                let name = format!("xi{j}^{level}");
                let pivot = e.coefficient(&[lead]);
                if !m.verdict(&(&pivot - &self.mu), &m.policy(0))?.holds() {
                    return Err(CoframeError::NotTriangular(name));
                }
                let mut rest = BiForm::zero(0, 1);
                for (mono, c) in e.terms() {
                    let b = mono[0];
                    if b == lead {
                        continue;
                    }
                    let BasisOneForm::Theta { order, .. } = b else {
                        unreachable!()
                    };
                    if order as usize >= level {
                        return Err(CoframeError::NotTriangular(name));
                    }
                    rest = &rest + &self.inverse[&b].scale(c);
                }
                let inv =
                    (&BiForm::basis(BasisOneForm::theta(j, level as u8)) - &rest).scale(&mu_inv);
                self.inverse.insert(lead, inv);
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn theta(&self) -> &BiForm {
        &self.theta
    }

    pub fn branches(&self) -> &BTreeMap<u8, Branch> {
        &self.branches
    }

    pub fn branch(&self, j: u8) -> &Branch {
        &self.branches[&j]
    }

    /// `xi_j^n` in the coordinate coframe; `n = 0` gives `Theta`.
    pub fn element(&self, j: u8, n: usize) -> &BiForm {
        if n == 0 {
            &self.theta
        } else {
            &self.branches[&j].elements[n - 1]
        }
    }

    /// Every element label with its coordinate expansion, `Theta` first then by order and branch.
    pub fn elements(&self) -> Vec<(BasisOneForm, &BiForm)> {
        let mut out = vec![(BasisOneForm::THETA, &self.theta)];
        for level in 1..=self.order {
            for j in 1..=self.n {
                out.push((BasisOneForm::theta(j, level as u8), self.element(j, level)));
            }
        }
        out
    }

    /// Rewrite a form in the coordinate coframe over the adapted labels.
    pub fn to_adapted(&self, w: &BiForm) -> Result<BiForm, CoframeError> {
        let needed = w.max_order() as usize;
        if needed > self.order {
            return Err(CoframeError::OrderTooHigh {
                needed,
                order: self.order,
            });
        }
        Ok(substitute(w, &|b| self.inverse.get(b).cloned()))
    }

    /// Expand a form over adapted labels into the coordinate coframe.
    pub fn from_adapted(&self, w: &BiForm) -> Result<BiForm, CoframeError> {
        let needed = w.max_order() as usize;
        if needed > self.order {
            return Err(CoframeError::OrderTooHigh {
                needed,
                order: self.order,
            });
        }
        Ok(substitute(w, &|b| match b {
            BasisOneForm::Theta { branch, order } => {
                Some(self.element(*branch, *order as usize).clone())
            }
            BasisOneForm::Sigma(_) => None,
        }))
    }

    /// Minimal `k` with `w` in the span of `sigma`, `Theta` and the `xi^{<=k}`.
    pub fn adapted_order(&self, w: &BiForm) -> Result<usize, CoframeError> {
        Ok(self.to_adapted(w)?.max_order() as usize)
    }

    /// Interior product with a dual vertical field; the result is over adapted labels.
    pub fn interior(&self, v: Dual, w: &BiForm) -> Result<BiForm, CoframeError> {
        let a = self.to_adapted(w)?;
        let target = v.label();
        Ok(interior_vertical(
            &|b| {
                if *b == target {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            },
            &a,
        ))
    }
}

fn build_branch(
    m: &Manifold,
    lin: &LinearizedSystem,
    theta: &BiForm,
    i: u8,
    j: u8,
    order: usize,
    policy: &Policy,
) -> Result<Branch, CoframeError> {
    let mut cascade = vec![lin.clone()];
    let mut index = None;
    let mut elements = Vec::new();
    let mut shifts = Vec::new();
    let mut prev = theta.clone();
    for n in 1..=order {
        // xi^n = X_j(xi^{n-1}) + X^{n-1}(A^i_ij) xi^{n-1} while n <= p + 1.
        if n >= 2 && index.is_none() {
            let cur = cascade.last().unwrap();
            let h = cur.h(m, i, j)?;
            if m.verdict(&h, policy).map_err(LaplaceError::from)?.holds() {
                index = Some(n - 2);
            } else {
                match transform(m, cur, (i, j), policy) {
                    Ok(next) => cascade.push(next),
                    Err(LaplaceError::InvariantVanishes { which, .. }) => {
                        return Err(CoframeError::Blocked { which, step: n - 2 })
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        let shift = if index.is_none() {
            cascade.last().unwrap().a(i, j).clone()
        } else {
            Expr::zero()
        };
        let next = &lie_d(m, j, &prev)? + &prev.scale(&shift);
        shifts.push(shift);
        elements.push(next.clone());
        prev = next;
    }
    if index.is_none() && order >= 1 {
        let cur = cascade.last().unwrap();
        if m.verdict(&cur.h(m, i, j)?, policy)
            .map_err(LaplaceError::from)?
            .holds()
        {
            index = Some(cascade.len() - 1);
        }
    }
    Ok(Branch {
        j,
        i,
        index,
        elements,
        shifts,
        cascade,
    })
}
