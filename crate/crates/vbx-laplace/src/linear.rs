use std::collections::BTreeMap;
use thiserror::Error;
use vbx_expr::{Coordinate, Expr, Policy, ZeroTestError};
use vbx_forms::{lie_d, BasisOneForm, BiForm};
use vbx_jet::{pairs, JetError, Manifold};

#[derive(Debug, Error)]
pub enum LaplaceError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Zero(#[from] ZeroTestError),
    #[error("the rescaling mu = {0} vanishes")]
    MuZero(Expr),
    #[error("invariant {which} vanishes ({verdict})")]
    InvariantVanishes {
        which: String,
        verdict: &'static str,
    },
    #[error("{0} requires three independent variables")]
    NeedsThree(&'static str),
    #[error("bad direction ({0},{1})")]
    BadDirection(u8, u8),
    #[error("transformed system is inconsistent: {0}")]
    Inconsistent(String),
}

/// Coefficients of `L_ij = X_iX_j + A^i_ij X_i + A^j_ij X_j + C_ij` for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCoeffs {
    pub a_i: Expr,
    pub a_j: Expr,
    pub c: Expr,
}

/// A system of second order total differential operators, one per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    n: u8,
    mu: Expr,
    pairs: BTreeMap<(u8, u8), PairCoeffs>,
    provenance: Vec<(u8, u8)>,
    adjoint: bool,
    contact: Option<BiForm>,
}

/// `H_ij` for ordered pairs and `H_ijk` for ordered triples.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceInvariants {
    pub h: BTreeMap<(u8, u8), Expr>,
    pub h3: BTreeMap<(u8, u8, u8), Expr>,
}

/// Universal linearization of `u_ij = f_ij` rescaled by `Theta = mu * theta`.
pub fn linearize(
    m: &Manifold,
    mu: &Expr,
    policy: &Policy,
) -> Result<LinearizedSystem, LaplaceError> {
    if m.verdict(mu, policy)?.holds() {
        return Err(LaplaceError::MuZero(mu.clone()));
    }
    let mut out = BTreeMap::new();
    for (i, j) in pairs(m.n()) {
        let f = m.spec().f(i, j);
        let a_i = -f.diff(&Coordinate::pure(i, 1));
        let a_j = -f.diff(&Coordinate::pure(j, 1));
        let c = -f.diff(&Coordinate::U);
        let (xi_mu, xj_mu) = (m.total(mu, i)?, m.total(mu, j)?);
        let xij_mu = m.total(&xi_mu, j)?;
        let inv = mu.inv().expect("mu tested nonzero");
        let big_a_i = &a_i - &xj_mu.mul(&inv);
        let big_a_j = &a_j - &xi_mu.mul(&inv);
        let big_c = Expr::sum(&[
            c,
            -xij_mu.mul(&inv),
            -a_i.mul(&xi_mu).mul(&inv),
            -a_j.mul(&xj_mu).mul(&inv),
            Expr::int(2).mul(&xi_mu).mul(&xj_mu).mul(&inv.pow_i(2)),
        ]);
        out.insert(
            (i, j),
            PairCoeffs {
                a_i: big_a_i,
                a_j: big_a_j,
                c: big_c,
            },
        );
    }
    let contact = BiForm::theta().scale(mu);
    Ok(LinearizedSystem {
        n: m.n(),
        mu: mu.clone(),
        pairs: out,
        provenance: Vec::new(),
        adjoint: false,
        contact: Some(contact),
    })
}

fn key(i: u8, j: u8) -> (u8, u8) {
    (i.min(j), i.max(j))
}

impl LinearizedSystem {
    /// A system with explicit coefficients and no realized contact form.
    pub fn from_pairs(n: u8, pairs: BTreeMap<(u8, u8), PairCoeffs>) -> Self {
        LinearizedSystem {
            n,
            mu: Expr::one(),
            pairs,
            provenance: Vec::new(),
            adjoint: false,
            contact: None,
        }
    }

    pub(crate) fn derived(
        &self,
        pairs: BTreeMap<(u8, u8), PairCoeffs>,
        dir: (u8, u8),
        contact: Option<BiForm>,
    ) -> Self {
        let mut provenance = self.provenance.clone();
        provenance.push(dir);
        LinearizedSystem {
            n: self.n,
            mu: self.mu.clone(),
            pairs,
            provenance,
            adjoint: self.adjoint,
            contact,
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn mu(&self) -> &Expr {
        &self.mu
    }

    pub fn provenance(&self) -> &[(u8, u8)] {
        &self.provenance
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    /// The contact form annihilated by every operator, when it is known.
    pub fn contact(&self) -> Option<&BiForm> {
        self.contact.as_ref()
    }

    pub fn pairs(&self) -> &BTreeMap<(u8, u8), PairCoeffs> {
        &self.pairs
    }

    /// `A^l_lk`: the coefficient of `X_l` in `L_lk`.
    pub fn a(&self, l: u8, k: u8) -> &Expr {
        let p = &self.pairs[&key(l, k)];
        if l < k {
            &p.a_i
        } else {
            &p.a_j
        }
    }

    /// `C_lk`.
    pub fn c(&self, l: u8, k: u8) -> &Expr {
        &self.pairs[&key(l, k)].c
    }

    /// Overwrite `A^l_lk`.
    pub fn set_a(&mut self, l: u8, k: u8, v: Expr) {
        let p = self.pairs.get_mut(&key(l, k)).expect("pair");
        if l < k {
            p.a_i = v;
        } else {
            p.a_j = v;
        }
        self.contact = None;
    }

    /// `H_ij = D_i(A^i_ij) + A^i_ij A^j_ij - C_ij`.
    pub fn h(&self, m: &Manifold, i: u8, j: u8) -> Result<Expr, LaplaceError> {
        let (ai, aj) = (self.a(i, j), self.a(j, i));
        Ok(Expr::sum(&[m.total(ai, i)?, ai.mul(aj), -self.c(i, j)]))
    }

    /// `H_ijk = A^k_kj - A^i_ij`.
    pub fn h3(&self, i: u8, j: u8, k: u8) -> Expr {
        self.a(k, j) - self.a(i, j)
    }

    pub fn invariants(&self, m: &Manifold) -> Result<LaplaceInvariants, LaplaceError> {
        let mut h = BTreeMap::new();
        let mut h3 = BTreeMap::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                if i == j {
                    continue;
                }
                h.insert((i, j), self.h(m, i, j)?);
                if self.n == 3 {
                    let k = crate::third(i, j);
                    h3.insert((i, j, k), self.h3(i, j, k));
                }
            }
        }
        Ok(LaplaceInvariants { h, h3 })
    }

    /// Formal adjoint: `A* = -A`, `C* = C - X_i(A^i_ij) - X_j(A^j_ij)`.
    pub fn adjoint(&self, m: &Manifold) -> Result<LinearizedSystem, LaplaceError> {
        let mut out = BTreeMap::new();
        for (&(i, j), p) in &self.pairs {
            let c = Expr::sum(&[p.c.clone(), -m.total(&p.a_i, i)?, -m.total(&p.a_j, j)?]);
            out.insert(
                (i, j),
                PairCoeffs {
                    a_i: -&p.a_i,
                    a_j: -&p.a_j,
                    c,
                },
            );
        }
        Ok(LinearizedSystem {
            n: self.n,
            mu: self.mu.clone(),
            pairs: out,
            provenance: self.provenance.clone(),
            adjoint: !self.adjoint,
            contact: None,
        })
    }

    /// `L_ij(t)` on a function.
    pub fn apply_expr(&self, m: &Manifold, i: u8, j: u8, t: &Expr) -> Result<Expr, LaplaceError> {
        let ti = m.total(t, i)?;
        let tj = m.total(t, j)?;
        let tij = m.total(&ti, j)?;
        Ok(Expr::sum(&[
            tij,
            self.a(i, j).mul(&ti),
            self.a(j, i).mul(&tj),
            self.c(i, j).mul(t),
        ]))
    }

    /// `L_ij(w)` on a `(r, s)` form, the `X` acting by total Lie derivative.
    pub fn apply_form(
        &self,
        m: &Manifold,
        i: u8,
        j: u8,
        w: &BiForm,
    ) -> Result<BiForm, LaplaceError> {
        let wi = lie_d(m, i, w)?;
        let wj = lie_d(m, j, w)?;
        let wij = lie_d(m, j, &wi)?;
        let (r, s) = w.bidegree();
        Ok(BiForm::sum(
            r,
            s,
            &[
                wij,
                wi.scale(self.a(i, j)),
                wj.scale(self.a(j, i)),
                w.scale(self.c(i, j)),
            ],
        ))
    }

    /// `X_l` on a combination of abstract jets `Theta_{b^k}` of a solution of this system.
    ///
    /// Jets are stored as `(0, 1)` forms over the `Theta` basis labels. Mixed jets
    /// are rewritten with the operators themselves.
    pub fn x_jet(&self, m: &Manifold, l: u8, w: &BiForm) -> Result<BiForm, LaplaceError> {
        let mut parts = Vec::new();
        for (mono, c) in w.terms() {
            parts.push(BiForm::from_terms(0, 1, [(mono.clone(), m.total(c, l)?)]));
            if let BasisOneForm::Theta { branch, order } = mono[0] {
                parts.push(self.x_basis(m, l, branch, order)?.scale(c));
            }
        }
        Ok(BiForm::sum(0, 1, &parts))
    }

    fn x_basis(&self, m: &Manifold, l: u8, b: u8, k: u8) -> Result<BiForm, LaplaceError> {
        if k == 0 || b == l {
            return Ok(BiForm::theta_pure(l, k + 1));
        }
        let mut w = BiForm::sum(
            0,
            1,
            &[
                BiForm::theta_pure(b, 1).scale(&-self.a(b, l)),
                BiForm::theta_pure(l, 1).scale(&-self.a(l, b)),
                BiForm::theta().scale(&-self.c(b, l)),
            ],
        );
        for _ in 1..k {
            w = self.x_jet(m, b, &w)?;
        }
        Ok(w)
    }
}
