use crate::linear::{LaplaceError, LinearizedSystem, PairCoeffs};
use crate::third;
use std::collections::BTreeMap;
use vbx_expr::{Certainty, Expr, Policy, ZeroVerdict};
use vbx_forms::{lie_d, verdict, BasisOneForm, BiForm};
use vbx_jet::{pairs, Manifold};

/// How the coefficients of a transformed system are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformRule {
    /// Solve for the operators annihilating `xi_ij` in the jet algebra of the system.
    Derived,
    /// The closed-form coefficient formulas as published.
    Published,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LaplaceIndex {
    Finite(usize),
    AtLeast(usize),
    /// An auxiliary invariant vanished before `H_ij` did.
    Blocked {
        which: String,
        step: usize,
    },
}

#[derive(Debug, Clone)]
pub struct IndexReport {
    pub direction: (u8, u8),
    pub index: LaplaceIndex,
    pub certainty: Certainty,
    /// `H_ij` of each system in the cascade.
    pub invariants: Vec<Expr>,
}

fn check_direction(lin: &LinearizedSystem, (i, j): (u8, u8)) -> Result<(), LaplaceError> {
    if i == j || i == 0 || j == 0 || i > lin.n() || j > lin.n() {
        return Err(LaplaceError::BadDirection(i, j));
    }
    Ok(())
}

fn nonvanishing(
    m: &Manifold,
    e: &Expr,
    which: String,
    policy: &Policy,
) -> Result<(), LaplaceError> {
    let v = m.verdict(e, policy)?;
    if v.holds() {
        return Err(LaplaceError::InvariantVanishes {
            which,
            verdict: v.label(),
        });
    }
    Ok(())
}

/// The `(i, j)` Laplace transform of the system, solved for from the jet algebra.
pub fn transform(
    m: &Manifold,
    lin: &LinearizedSystem,
    dir: (u8, u8),
    policy: &Policy,
) -> Result<LinearizedSystem, LaplaceError> {
    transform_with(m, lin, dir, policy, TransformRule::Derived)
}

pub fn transform_with(
    m: &Manifold,
    lin: &LinearizedSystem,
    dir: (u8, u8),
    policy: &Policy,
    rule: TransformRule,
) -> Result<LinearizedSystem, LaplaceError> {
    check_direction(lin, dir)?;
    let (i, j) = dir;
    let h = lin.h(m, i, j)?;
    nonvanishing(m, &h, format!("H_{i}{j}"), policy)?;
    if lin.n() == 3 {
        let k = third(i, j);
        nonvanishing(m, &lin.h3(i, j, k), format!("H_{i}{j}{k}"), policy)?;
    }
    let coeffs = match rule {
        TransformRule::Derived => derived(m, lin, dir, &h, policy)?,
        TransformRule::Published => published(m, lin, dir, &h)?,
    };
    let contact = match lin.contact() {
        Some(theta) => Some(&lie_d(m, j, theta)? + &theta.scale(lin.a(i, j))),
        None => None,
    };
    Ok(lin.derived(coeffs, dir, contact))
}

/// `xi_ij` and its first derivatives written over the jets of `Theta`.
struct Frame {
    i: u8,
    j: u8,
    k: Option<u8>,
    xi: BiForm,
    x: BTreeMap<u8, BiForm>,
}

impl Frame {
    fn new(m: &Manifold, lin: &LinearizedSystem, (i, j): (u8, u8)) -> Result<Self, LaplaceError> {
        let xi = &BiForm::theta_pure(j, 1) + &BiForm::theta().scale(lin.a(i, j));
        let mut x = BTreeMap::new();
        for l in 1..=lin.n() {
            x.insert(l, lin.x_jet(m, l, &xi)?);
        }
        let k = (lin.n() == 3).then(|| third(i, j));
        Ok(Frame { i, j, k, xi, x })
    }

    /// Write `w = c_0 xi + sum_l c_l X_l(xi)`; returns the coefficients and the residual.
    fn decompose(&self, w: &BiForm) -> Result<(Expr, BTreeMap<u8, Expr>, BiForm), LaplaceError> {
        let inconsistent = || LaplaceError::Inconsistent("singular change of jets".into());
        let mut coef = BTreeMap::new();
        let mut rest = w.clone();
        let mut eliminate =
            |l: u8, b: BasisOneForm, rest: &mut BiForm| -> Result<(), LaplaceError> {
                let pivot = self.x[&l].coefficient(&[b]);
                let c = rest
                    .coefficient(&[b])
                    .checked_div(&pivot)
                    .ok_or_else(inconsistent)?;
                *rest = &*rest - &self.x[&l].scale(&c);
                coef.insert(l, c);
                Ok(())
            };
        eliminate(self.j, BasisOneForm::theta(self.j, 2), &mut rest)?;
        if let Some(k) = self.k {
            eliminate(k, BasisOneForm::theta(k, 1), &mut rest)?;
        }
        let tj = [BasisOneForm::theta(self.j, 1)];
        let t0 = [BasisOneForm::THETA];
        let xi_i = &self.x[&self.i];
        let (p, q, r, s) = (
            self.xi.coefficient(&tj),
            xi_i.coefficient(&tj),
            self.xi.coefficient(&t0),
            xi_i.coefficient(&t0),
        );
        let (wj, w0) = (rest.coefficient(&tj), rest.coefficient(&t0));
        let det = &p.mul(&s) - &q.mul(&r);
        let c0 = (&wj.mul(&s) - &q.mul(&w0))
            .checked_div(&det)
            .ok_or_else(inconsistent)?;
        let ci = (&p.mul(&w0) - &r.mul(&wj))
            .checked_div(&det)
            .ok_or_else(inconsistent)?;
        rest = &(&rest - &self.xi.scale(&c0)) - &xi_i.scale(&ci);
        coef.insert(self.i, ci);
        Ok((c0, coef, rest))
    }
}

fn derived(
    m: &Manifold,
    lin: &LinearizedSystem,
    dir: (u8, u8),
    _h: &Expr,
    policy: &Policy,
) -> Result<BTreeMap<(u8, u8), PairCoeffs>, LaplaceError> {
    let frame = Frame::new(m, lin, dir)?;
    let mut out = BTreeMap::new();
    for (l, k) in pairs(lin.n()) {
        let w = lin.x_jet(m, l, &frame.x[&k])?;
        let (c0, coef, rest) = frame.decompose(&w)?;
        let mut leftover = rest;
        for (&q, c) in &coef {
            if q != l && q != k {
                leftover = &leftover + &BiForm::theta().scale(c);
            }
        }
        let v = verdict(m, &leftover, policy)?;
        if !v.holds() {
            return Err(LaplaceError::Inconsistent(format!(
                "X{l}X{k}(xi) is not a combination of xi, X{l}(xi), X{k}(xi)"
            )));
        }
        out.insert(
            (l, k),
            PairCoeffs {
                a_i: -&coef[&l],
                a_j: -&coef[&k],
                c: -c0,
            },
        );
    }
    Ok(out)
}

fn published(
    m: &Manifold,
    lin: &LinearizedSystem,
    (i, j): (u8, u8),
    h: &Expr,
) -> Result<BTreeMap<(u8, u8), PairCoeffs>, LaplaceError> {
    let a = |x: u8, y: u8| lin.a(x, y).clone();
    let x = |e: &Expr, l: u8| m.total(e, l);
    let hinv = h.inv().expect("H tested nonzero");
    let mut out: BTreeMap<(u8, u8), PairCoeffs> = BTreeMap::new();
    let mut put = |l: u8, k: u8, al: Expr, ak: Expr, c: Expr| {
        let v = if l < k {
            PairCoeffs {
                a_i: al,
                a_j: ak,
                c,
            }
        } else {
            PairCoeffs {
                a_i: ak,
                a_j: al,
                c,
            }
        };
        out.insert((l.min(k), l.max(k)), v);
    };
    let (ai, aj) = (a(i, j), a(j, i));
    let c_ij = &ai.mul(&aj) + &h.mul(&(&x(&ai.mul(&hinv), j)? - &Expr::one()));
    put(i, j, &ai - &x(h, j)?.mul(&hinv), aj.clone(), c_ij);
    if lin.n() == 3 {
        let k = third(i, j);
        let h3 = lin.h3(i, j, k);
        let h3inv = h3.inv().expect("H_ijk tested nonzero");
        let a_ik_i = &a(i, k) - &x(h, k)?.mul(&hinv);
        let a_ik_k = &aj + &h.mul(&h3inv);
        let c_ik = &h.mul(&(&x(&aj.mul(&hinv), k)? + &a(j, k).mul(&h3inv))) + &aj.mul(&a(i, k));
        put(i, k, a_ik_i.clone(), a_ik_k, c_ik);
        let a_jk_j = a(j, k);
        let a_jk_k = &a(k, j) - &x(&h3, j)?.mul(&h3inv);
        let h_kj = lin.h(m, k, j)?;
        let c_jk = Expr::sum(&[
            Expr::int(2).mul(&aj).mul(&x(&ai, k)?).mul(&h3).mul(&hinv),
            a_jk_j.mul(&(&a_jk_k - &h3)),
            -h_kj,
            x(&a_jk_j, j)?,
        ]);
        put(j, k, a_jk_j, a_jk_k, c_jk);
    }
    Ok(out)
}

/// Iterate the `(i, j)` transform until `H_ij` vanishes or `cap` transforms were applied.
pub fn index(
    m: &Manifold,
    lin: &LinearizedSystem,
    dir: (u8, u8),
    cap: usize,
    policy: &Policy,
) -> Result<IndexReport, LaplaceError> {
    check_direction(lin, dir)?;
    let (i, j) = dir;
    let mut cur = lin.clone();
    let mut invariants = Vec::new();
    let mut certainty = Certainty::Exact;
    for p in 0..=cap {
        let h = cur.h(m, i, j)?;
        let v = m.verdict(&h, policy)?;
        invariants.push(h);
        if v.holds() {
            certainty = certainty.and(v.certainty());
            return Ok(IndexReport {
                direction: dir,
                index: LaplaceIndex::Finite(p),
                certainty,
                invariants,
            });
        }
        if v.certainty() == Certainty::Probabilistic {
            certainty = Certainty::Probabilistic;
        }
        if p == cap {
            break;
        }
        cur = match transform(m, &cur, dir, policy) {
            Ok(next) => next,
            Err(LaplaceError::InvariantVanishes { which, .. }) => {
                return Ok(IndexReport {
                    direction: dir,
                    index: LaplaceIndex::Blocked { which, step: p },
                    certainty,
                    invariants,
                })
            }
            Err(e) => return Err(e),
        };
    }
    Ok(IndexReport {
        direction: dir,
        index: LaplaceIndex::AtLeast(cap),
        certainty,
        invariants,
    })
}

/// Verdict on `(1/H_ij)(X_i(xi) + A^j_ij xi) - Theta` for `xi = X_j(Theta) + A^i_ij Theta`.
pub fn inverse_check(
    m: &Manifold,
    lin: &LinearizedSystem,
    dir: (u8, u8),
    policy: &Policy,
) -> Result<ZeroVerdict, LaplaceError> {
    check_direction(lin, dir)?;
    let (i, j) = dir;
    let h = lin.h(m, i, j)?;
    nonvanishing(m, &h, format!("H_{i}{j}"), policy)?;
    let theta = BiForm::theta();
    let xi = &lin.x_jet(m, j, &theta)? + &theta.scale(lin.a(i, j));
    let back = (&lin.x_jet(m, i, &xi)? + &xi.scale(lin.a(j, i)))
        .scale(&h.inv().expect("H tested nonzero"));
    Ok(verdict(m, &(&back - &theta), policy)?)
}
