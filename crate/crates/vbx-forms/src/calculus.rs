//! Differentials, total Lie derivatives and interior products.

use crate::basis::BasisOneForm;
use crate::form::{normalize, BiForm};
use std::collections::BTreeMap;
use vbx_expr::{Coordinate, Expr, Policy, ZeroVerdict};
use vbx_jet::{JetError, Manifold, TotalVectorField};

/// Collects monomial contributions and sums each coefficient once.
struct Accum {
    r: u8,
    s: u8,
    parts: BTreeMap<Vec<BasisOneForm>, Vec<Expr>>,
}

impl Accum {
    fn new(r: u8, s: u8) -> Self {
        Accum {
            r,
            s,
            parts: BTreeMap::new(),
        }
    }

    fn push(&mut self, mut mono: Vec<BasisOneForm>, c: Expr) {
        if c.is_zero() {
            return;
        }
        if let Some(neg) = normalize(&mut mono) {
            self.parts
                .entry(mono)
                .or_default()
                .push(if neg { -c } else { c });
        }
    }

    fn finish(self) -> BiForm {
        BiForm::from_terms(
            self.r,
            self.s,
            self.parts.into_iter().map(|(m, cs)| (m, Expr::sum(&cs))),
        )
    }
}

/// `d_V f` for a function, after reducing mixed derivatives.
pub fn d_v_function(m: &Manifold, f: &Expr) -> Result<BiForm, JetError> {
    let f = m.reduce(f)?;
    let mut acc = Accum::new(0, 1);
    for c in f.coords() {
        if let Some(b) = BasisOneForm::of_coord(&c) {
            acc.push(vec![b], f.diff(&c));
        }
    }
    Ok(acc.finish())
}

/// `d_V c` for a jet coordinate, as a combination of the coordinate contact forms.
pub fn contact_of(m: &Manifold, c: &Coordinate) -> Result<BiForm, JetError> {
    match BasisOneForm::of_coord(c) {
        Some(b) => Ok(BiForm::basis(b)),
        None if matches!(c, Coordinate::X(_)) => Ok(BiForm::zero(0, 1)),
        None => d_v_function(m, &m.reduce_index(c.index().expect("derivative"))?),
    }
}

/// `d_H f = sum_i D_i(f) sigma_i`.
pub fn horizontal_differential(m: &Manifold, f: &Expr) -> Result<BiForm, JetError> {
    let mut acc = Accum::new(1, 0);
    for i in 1..=m.n() {
        acc.push(vec![BasisOneForm::Sigma(i)], m.total(f, i)?);
    }
    Ok(acc.finish())
}

/// `d_V` on a `(r, s)` form, giving a `(r, s + 1)` form.
pub fn d_v(m: &Manifold, w: &BiForm) -> Result<BiForm, JetError> {
    let mut acc = Accum::new(w.r(), w.s() + 1);
    for (mono, c) in w.terms() {
        let dc = d_v_function(m, c)?;
        for (b, e) in dc.terms() {
            let mut mm = b.clone();
            mm.extend_from_slice(mono);
            acc.push(mm, e.clone());
        }
    }
    Ok(acc.finish())
}

/// Lie derivative along the total derivative `D_i`.
pub fn lie_d(m: &Manifold, i: u8, w: &BiForm) -> Result<BiForm, JetError> {
    let mut acc = Accum::new(w.r(), w.s());
    for (mono, c) in w.terms() {
        acc.push(mono.clone(), m.total(c, i)?);
        for (p, b) in mono.iter().enumerate() {
            let Some(coord) = b.coord() else { continue };
            let image = d_v_function(m, &m.total_of_coord(&coord, i)?)?;
            for (nb, e) in image.terms() {
                let mut mm = mono.clone();
                mm[p] = nb[0];
                acc.push(mm, c.mul(e));
            }
        }
    }
    Ok(acc.finish())
}

/// `d_H w = sum_i sigma_i ^ D_i(w)`.
pub fn d_h(m: &Manifold, w: &BiForm) -> Result<BiForm, JetError> {
    let mut acc = Accum::new(w.r() + 1, w.s());
    for i in 1..=m.n() {
        for (mono, c) in lie_d(m, i, w)?.terms() {
            let mut mm = vec![BasisOneForm::Sigma(i)];
            mm.extend_from_slice(mono);
            acc.push(mm, c.clone());
        }
    }
    Ok(acc.finish())
}

/// Interior product with a total vector field (an antiderivation; contact forms vanish on it).
pub fn interior_total(x: &TotalVectorField, w: &BiForm) -> BiForm {
    assert!(
        w.r() > 0,
        "interior product of a form without horizontal part"
    );
    let mut acc = Accum::new(w.r() - 1, w.s());
    for (mono, c) in w.terms() {
        for (p, b) in mono.iter().enumerate() {
            if let BasisOneForm::Sigma(k) = b {
                let mut mm = mono.clone();
                mm.remove(p);
                let v = c.mul(&x.coeff(*k));
                acc.push(mm, if p % 2 == 1 { -v } else { v });
            }
        }
    }
    acc.finish()
}

/// Interior product with a vertical vector given by its values on the contact basis.
pub fn interior_vertical(value: &dyn Fn(&BasisOneForm) -> Expr, w: &BiForm) -> BiForm {
    assert!(w.s() > 0, "interior product of a form without contact part");
    let mut acc = Accum::new(w.r(), w.s() - 1);
    for (mono, c) in w.terms() {
        for (p, b) in mono.iter().enumerate() {
            if b.is_horizontal() {
                continue;
            }
            let mut mm = mono.clone();
            mm.remove(p);
            let v = c.mul(&value(b));
            acc.push(mm, if p % 2 == 1 { -v } else { v });
        }
    }
    acc.finish()
}

/// Action of `X = sum a_k D_k` on a `(r, s)` form: `sum_k a_k D_k(w) + d_H a_k ^ (D_k ⌟ w)`.
pub fn lie(m: &Manifold, x: &TotalVectorField, w: &BiForm) -> Result<BiForm, JetError> {
    let mut parts = Vec::new();
    for (k, a) in x.coeffs() {
        parts.push(lie_d(m, *k, w)?.scale(a));
        if w.r() > 0 {
            let inner = interior_total(&TotalVectorField::d(*k), w);
            parts.push(horizontal_differential(m, a)?.wedge(&inner));
        }
    }
    Ok(BiForm::sum(w.r(), w.s(), &parts))
}

/// Zero test of every coefficient; the verdicts are combined.
pub fn verdict(m: &Manifold, w: &BiForm, policy: &Policy) -> Result<ZeroVerdict, JetError> {
    let mut v = ZeroVerdict::Zero;
    for c in w.terms().values() {
        v = v.and(m.verdict(c, policy)?);
        if v.is_nonzero() {
            break;
        }
    }
    Ok(v)
}
