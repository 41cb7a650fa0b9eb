//! Derivations and substitution.
//!
//! A derivation is fixed by its values on coordinates; partial derivatives and
//! total derivatives are both instances of [`Expr::try_derivation`].

use crate::coord::Coordinate;
use crate::expr::{Atom, Expr, Factor, Func, Mono, Poly};
use std::collections::{BTreeMap, HashMap};
use std::convert::Infallible;

struct Deriv<'a, E> {
    d: &'a mut dyn FnMut(&Coordinate) -> Result<Expr, E>,
    atoms: HashMap<Atom, Expr>,
}

impl<E> Deriv<'_, E> {
    fn expr(&mut self, e: &Expr) -> Result<Expr, E> {
        let r = e.rat();
        if r.exp.is_none() && r.factors.is_empty() {
            return Ok(Expr::zero());
        }
        if r.exp.is_none() && r.factors.len() == 1 {
            let (f, k) = r.factors.iter().next().unwrap();
            if *k == 1 {
                return Ok(Expr::constant(r.coef.clone()).mul(&self.factor(f)?));
            }
        }
        let mut parts = Vec::new();
        if let Some(a) = &r.exp {
            let da = self.expr(a)?;
            if !da.is_zero() {
                parts.push(da);
            }
        }
        for (f, k) in &r.factors {
            let df = self.factor(f)?;
            if df.is_zero() {
                continue;
            }
            let inv = f.to_expr().inv().expect("factor is nonzero");
            parts.push(Expr::int(*k as i64).mul(&df).mul(&inv));
        }
        Ok(e.mul(&Expr::sum(&parts)))
    }

    fn factor(&mut self, f: &Factor) -> Result<Expr, E> {
        match f {
            Factor::Atom(a) => self.atom(a),
            Factor::Poly(p) => self.poly(p),
        }
    }

    fn poly(&mut self, p: &Poly) -> Result<Expr, E> {
        let mut parts = Vec::new();
        for (m, c) in &p.terms {
            let dm = self.mono(m)?;
            if !dm.is_zero() {
                parts.push(dm.mul_rational(c));
            }
        }
        Ok(Expr::sum(&parts))
    }

    fn mono(&mut self, m: &Mono) -> Result<Expr, E> {
        let mut parts = Vec::new();
        for (i, (a, k)) in m.atoms.iter().enumerate() {
            let da = self.atom(a)?;
            if da.is_zero() {
                continue;
            }
            let mut rest = m.clone();
            if *k == 1 {
                rest.atoms.remove(i);
            } else {
                rest.atoms[i].1 = k - 1;
            }
            parts.push(rest.to_expr().mul(&Expr::int(*k as i64)).mul(&da));
        }
        if let Some(e) = &m.exp {
            let de = self.expr(e)?;
            if !de.is_zero() {
                parts.push(m.to_expr().mul(&de));
            }
        }
        Ok(Expr::sum(&parts))
    }

    fn atom(&mut self, a: &Atom) -> Result<Expr, E> {
        if let Some(v) = self.atoms.get(a) {
            return Ok(v.clone());
        }
        let v = match a {
            Atom::Coord(c) => (self.d)(c)?,
            Atom::Call(f, arg) => {
                let da = self.expr(arg)?;
                if da.is_zero() {
                    Expr::zero()
                } else {
                    match f {
                        Func::Log => da.checked_div(arg).expect("log argument is nonzero"),
                        Func::Sin => arg.cos().mul(&da),
                        Func::Cos => -arg.sin().mul(&da),
                    }
                }
            }
            Atom::Root(b, q) => {
                let db = self.expr(b)?;
                if db.is_zero() {
                    Expr::zero()
                } else {
                    let root = Factor::Atom(a.clone()).to_expr();
                    let denom = b.mul(&Expr::int(*q as i64));
                    root.mul(&db)
                        .checked_div(&denom)
                        .expect("root base is nonzero")
                }
            }
        };
        self.atoms.insert(a.clone(), v.clone());
        Ok(v)
    }
}

impl Expr {
    /// Apply the derivation whose values on coordinates are given by `d`.
    pub fn try_derivation<E>(
        &self,
        d: &mut dyn FnMut(&Coordinate) -> Result<Expr, E>,
    ) -> Result<Expr, E> {
        Deriv {
            d,
            atoms: HashMap::new(),
        }
        .expr(self)
    }

    /// Infallible variant of [`Expr::try_derivation`].
    pub fn derivation(&self, d: &mut dyn FnMut(&Coordinate) -> Expr) -> Expr {
        let mut f = |c: &Coordinate| -> Result<Expr, Infallible> { Ok(d(c)) };
        match self.try_derivation(&mut f) {
            Ok(e) => e,
            Err(never) => match never {},
        }
    }

    /// Partial derivative; coordinates are independent symbols.
    pub fn diff(&self, c: &Coordinate) -> Expr {
        if !self.coords().contains(c) {
            return Expr::zero();
        }
        self.derivation(&mut |x| if x == c { Expr::one() } else { Expr::zero() })
    }

    /// Replace coordinates; `None` if a denominator becomes zero.
    pub fn subst(&self, map: &dyn Fn(&Coordinate) -> Option<Expr>) -> Option<Expr> {
        if self.coords().iter().all(|c| map(c).is_none()) {
            return Some(self.clone());
        }
        let r = self.rat();
        let mut out = Expr::constant(r.coef.clone());
        if let Some(a) = &r.exp {
            out = out.mul(&a.subst(map)?.exp());
        }
        for (f, k) in &r.factors {
            let v = match f {
                Factor::Atom(a) => subst_atom(a, map)?,
                Factor::Poly(p) => {
                    let mut parts = Vec::new();
                    for (m, c) in &p.terms {
                        let mut t = Expr::constant(c.clone());
                        for (a, e) in &m.atoms {
                            t = t.mul(&subst_atom(a, map)?.pow_i(*e as i32));
                        }
                        if let Some(x) = &m.exp {
                            t = t.mul(&x.subst(map)?.exp());
                        }
                        parts.push(t);
                    }
                    Expr::sum(&parts)
                }
            };
            out = out.mul(&v.checked_pow_i(*k)?);
        }
        Some(out)
    }

    /// Substitution from a map.
    pub fn subst_map(&self, map: &BTreeMap<Coordinate, Expr>) -> Option<Expr> {
        self.subst(&|c| map.get(c).cloned())
    }
}

fn subst_atom(a: &Atom, map: &dyn Fn(&Coordinate) -> Option<Expr>) -> Option<Expr> {
    Some(match a {
        Atom::Coord(c) => map(c).unwrap_or_else(|| Expr::coord(c.clone())),
        Atom::Call(Func::Log, x) => {
            let v = x.subst(map)?;
            if v.is_zero() {
                return None;
            }
            v.log()
        }
        Atom::Call(Func::Sin, x) => x.subst(map)?.sin(),
        Atom::Call(Func::Cos, x) => x.subst(map)?.cos(),
        Atom::Root(b, q) => b.subst(map)?.pow_q(1, *q as i32)?,
    })
}
