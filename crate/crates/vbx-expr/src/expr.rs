//! Normal form of expressions.
//!
//! An expression is a product `c * exp(E) * f_1^k_1 * ... * f_m^k_m` with an
//! exact rational `c`, an optional exponential argument `E`, and factors that
//! are either atoms (coordinates, `log`/`sin`/`cos` calls, rational roots) or
//! primitive multivariate polynomials over those atoms. Negative exponents are
//! denominators. Sums are expanded over the common denominator, exact polynomial
//! division cancels shared denominator factors, and the remaining numerator is
//! split into rational content, monomial content and a primitive part.

use crate::coord::Coordinate;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// Elementary functions kept as opaque atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Indivisible building block of monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Coord(Coordinate),
    Call(Func, Expr),
    /// `base^(1/q)` with `q >= 2`; exponents on a root stay in `1..q`.
    Root(Expr, u32),
}

/// Power product of atoms times an optional `exp(E)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    pub(crate) atoms: Vec<(Atom, u32)>,
    pub(crate) exp: Option<Expr>,
}

/// Sparse polynomial over monomials with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    pub(crate) terms: BTreeMap<Mono, BigRational>,
}

/// Factor of a product: an atom or a primitive polynomial with at least two terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Atom(Atom),
    Poly(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Rat {
    pub(crate) coef: BigRational,
    pub(crate) exp: Option<Expr>,
    pub(crate) factors: BTreeMap<Factor, i32>,
}

/// Immutable symbolic expression in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(pub(crate) Arc<Rat>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn big(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

// ---------------------------------------------------------------- monomials

impl Mono {
    pub(crate) fn one() -> Self {
        Mono::default()
    }

    pub(crate) fn atom(a: Atom, k: u32) -> Self {
        Mono {
            atoms: vec![(a, k)],
            exp: None,
        }
    }

    pub(crate) fn degree(&self) -> u64 {
        self.atoms.iter().map(|(_, k)| *k as u64).sum()
    }

    pub(crate) fn mul(&self, o: &Mono) -> Mono {
        let mut atoms = Vec::with_capacity(self.atoms.len() + o.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() && j < o.atoms.len() {
            match self.atoms[i].0.cmp(&o.atoms[j].0) {
                Ordering::Less => {
                    atoms.push(self.atoms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    atoms.push(o.atoms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    atoms.push((self.atoms[i].0.clone(), self.atoms[i].1 + o.atoms[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        atoms.extend_from_slice(&self.atoms[i..]);
        atoms.extend_from_slice(&o.atoms[j..]);
        Mono {
            atoms,
            exp: exp_add(&self.exp, &o.exp),
        }
    }

    /// Quotient when every atom exponent of `o` is dominated.
    pub(crate) fn div(&self, o: &Mono) -> Option<Mono> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        let mut j = 0;
        for (a, k) in &self.atoms {
            if j < o.atoms.len() && o.atoms[j].0 < *a {
                return None;
            }
            if j < o.atoms.len() && o.atoms[j].0 == *a {
                let ko = o.atoms[j].1;
                j += 1;
                if ko > *k {
                    return None;
                }
                if ko < *k {
                    atoms.push((a.clone(), k - ko));
                }
            } else {
                atoms.push((a.clone(), *k));
            }
        }
        if j < o.atoms.len() {
            return None;
        }
        Some(Mono {
            atoms,
            exp: exp_sub(&self.exp, &o.exp),
        })
    }

    /// Componentwise minimum of atom exponents; the exponential part is dropped.
    pub(crate) fn gcd(&self, o: &Mono) -> Mono {
        let mut atoms = Vec::new();
        let mut j = 0;
        for (a, k) in &self.atoms {
            while j < o.atoms.len() && o.atoms[j].0 < *a {
                j += 1;
            }
            if j < o.atoms.len() && o.atoms[j].0 == *a {
                atoms.push((a.clone(), (*k).min(o.atoms[j].1)));
            }
        }
        Mono { atoms, exp: None }
    }

    pub(crate) fn to_expr(&self) -> Expr {
        let mut factors = BTreeMap::new();
        for (a, k) in &self.atoms {
            factors.insert(Factor::Atom(a.clone()), *k as i32);
        }
        fix_roots(Rat {
            coef: BigRational::one(),
            exp: self.exp.clone(),
            factors,
        })
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                let (mut i, mut j) = (0, 0);
                while i < self.atoms.len() && j < other.atoms.len() {
                    let (a, ka) = &self.atoms[i];
                    let (b, kb) = &other.atoms[j];
                    match a.cmp(b) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ka.cmp(kb) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            c => return c,
                        },
                    }
                }
                (self.atoms.len() - i).cmp(&(other.atoms.len() - j))
            })
            .then_with(|| self.exp.cmp(&other.exp))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn exp_add(a: &Option<Expr>, b: &Option<Expr>) -> Option<Expr> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => canonical_exp_arg(&Expr::sum(&[x.clone(), y.clone()])),
    }
}

fn exp_sub(a: &Option<Expr>, b: &Option<Expr>) -> Option<Expr> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) => Some(x.clone()),
        (None, Some(y)) => canonical_exp_arg(&-y),
        (Some(x), Some(y)) => canonical_exp_arg(&Expr::sum(&[x.clone(), -y])),
    }
}

fn exp_scale(a: &Option<Expr>, k: i64) -> Option<Expr> {
    a.as_ref()
        .and_then(|e| canonical_exp_arg(&(e * &Expr::int(k))))
}

/// Exponential arguments are stored expanded so that equal Laurent polynomials
/// are structurally equal.
fn canonical_exp_arg(e: &Expr) -> Option<Expr> {
    if e.is_zero() {
        None
    } else {
        Some(e.expanded())
    }
}

// ------------------------------------------------------------- polynomials

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub(crate) fn term(m: Mono, c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub(crate) fn sub_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub(crate) fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub(crate) fn mul_mono(&self, m: &Mono, c: &BigRational) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            r.add_term(m1.mul(m), c1 * c);
        }
        r
    }

    pub(crate) fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::constant(BigRational::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub(crate) fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn has_exp(&self) -> bool {
        self.terms.keys().any(|m| m.exp.is_some())
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub(crate) fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        let limit = 64 + 4 * (self.len() + 1) * (d.len() + 1);
        for _ in 0..limit {
            let (rm, rc) = match r.leading() {
                None => break,
                Some((m, c)) => (m.clone(), c.clone()),
            };
            let m = rm.div(lm)?;
            let c = rc / lc;
            r.sub_assign(&d.mul_mono(&m, &c));
            q.add_term(m, c);
        }
        if !r.is_zero() {
            return None;
        }
        if (self.has_exp() || d.has_exp()) && q.mul(d) != *self {
            return None;
        }
        Some(q)
    }

    /// Split into `content * primitive` and return the normal-form expression.
    pub(crate) fn factorize(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if self.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return m.to_expr().mul_rational(c);
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        let mut mono_gcd: Option<Mono> = None;
        let mut common_exp: Option<Option<Expr>> = None;
        for m in self.terms.keys() {
            mono_gcd = Some(match mono_gcd {
                None => Mono {
                    atoms: m.atoms.clone(),
                    exp: None,
                },
                Some(g) => g.gcd(m),
            });
            common_exp = Some(match common_exp {
                None => m.exp.clone(),
                Some(e) if e == m.exp => e,
                Some(_) => None,
            });
        }
        let mut content_mono = mono_gcd.unwrap();
        content_mono.exp = common_exp.flatten();
        let mut prim = Poly::zero();
        for (m, c) in &self.terms {
            prim.add_term(
                m.div(&content_mono).expect("monomial content divides"),
                c * &inv,
            );
        }
        let mut factors = BTreeMap::new();
        for (a, k) in &content_mono.atoms {
            factors.insert(Factor::Atom(a.clone()), *k as i32);
        }
        factors.insert(Factor::Poly(prim), 1);
        fix_roots(Rat {
            coef: content,
            exp: content_mono.exp.clone(),
            factors,
        })
    }
}

impl Factor {
    pub(crate) fn to_poly(&self) -> Poly {
        match self {
            Factor::Atom(a) => Poly::term(Mono::atom(a.clone(), 1), BigRational::one()),
            Factor::Poly(p) => p.clone(),
        }
    }

    pub(crate) fn to_expr(&self) -> Expr {
        Expr::from_rat(Rat {
            coef: BigRational::one(),
            exp: None,
            factors: BTreeMap::from([(self.clone(), 1)]),
        })
    }
}

/// A numerator polynomial exactly divisible by a denominator polynomial.
fn find_cancellation(factors: &BTreeMap<Factor, i32>) -> Option<(Factor, Factor, Poly)> {
    for (p, kp) in factors {
        let Factor::Poly(pp) = p else { continue };
        if *kp <= 0 {
            continue;
        }
        for (q, kq) in factors {
            let Factor::Poly(qp) = q else { continue };
            if *kq >= 0 {
                continue;
            }
            let (Some((lp, _)), Some((lq, _))) = (pp.leading(), qp.leading()) else {
                continue;
            };
            if lp.div(lq).is_none() {
                continue;
            }
            if let Some(quot) = pp.exact_div(qp) {
                return Some((p.clone(), q.clone(), quot));
            }
        }
    }
    None
}

/// Normalize root atoms whose exponent left `1..q`.
fn fix_roots(r: Rat) -> Expr {
    let needs = r.factors.iter().any(|(f, k)| match f {
        Factor::Atom(Atom::Root(_, q)) => *k < 0 || *k >= *q as i32,
        _ => false,
    });
    if !needs {
        return Expr::from_rat(r);
    }
    let mut base = Rat {
        coef: r.coef,
        exp: r.exp,
        factors: BTreeMap::new(),
    };
    let mut extra = Vec::new();
    for (f, k) in r.factors {
        if let Factor::Atom(Atom::Root(b, q)) = &f {
            let q = *q as i32;
            let (m, rem) = (k.div_euclid(q), k.rem_euclid(q));
            if m != 0 {
                extra.push((b.clone(), m));
            }
            if rem != 0 {
                base.factors.insert(f, rem);
            }
        } else {
            base.factors.insert(f, k);
        }
    }
    let mut out = Expr::from_rat(base);
    for (b, m) in extra {
        out = out.mul(&b.pow_i(m));
    }
    out
}

// ------------------------------------------------------------- expressions

impl Expr {
    pub(crate) fn from_rat(r: Rat) -> Expr {
        if r.coef.is_zero() {
            return Expr(Arc::new(Rat {
                coef: BigRational::zero(),
                exp: None,
                factors: BTreeMap::new(),
            }));
        }
        Expr(Arc::new(r))
    }

    pub(crate) fn rat(&self) -> &Rat {
        &self.0
    }

    pub fn zero() -> Expr {
        Expr::constant(BigRational::zero())
    }

    pub fn one() -> Expr {
        Expr::constant(BigRational::one())
    }

    pub fn int(i: i64) -> Expr {
        Expr::constant(big(i))
    }

    /// The rational `p/q`; panics when `q = 0`.
    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::from_rat(Rat {
            coef: c,
            exp: None,
            factors: BTreeMap::new(),
        })
    }

    pub fn coord(c: Coordinate) -> Expr {
        Factor::Atom(Atom::Coord(c)).to_expr()
    }

    /// Independent variable `x^i`.
    pub fn x(i: u8) -> Expr {
        Expr::coord(Coordinate::X(i))
    }

    /// Dependent variable `u`.
    pub fn u() -> Expr {
        Expr::coord(Coordinate::U)
    }

    /// Derivative coordinate `u_I` (index sorted here).
    pub fn d(idx: &[u8]) -> Expr {
        Expr::coord(Coordinate::deriv(idx))
    }

    pub fn is_zero(&self) -> bool {
        self.0.coef.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.coef.is_one() && self.0.exp.is_none() && self.0.factors.is_empty()
    }

    /// The value when the expression is a rational constant.
    pub fn as_constant(&self) -> Option<&BigRational> {
        if self.0.exp.is_none() && self.0.factors.is_empty() {
            Some(&self.0.coef)
        } else {
            None
        }
    }

    /// The coordinate when the expression is exactly one coordinate.
    pub fn as_coord(&self) -> Option<&Coordinate> {
        let r = &self.0;
        if !r.coef.is_one() || r.exp.is_some() || r.factors.len() != 1 {
            return None;
        }
        match r.factors.iter().next() {
            Some((Factor::Atom(Atom::Coord(c)), 1)) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn mul_rational(&self, c: &BigRational) -> Expr {
        if c.is_zero() || self.is_zero() {
            return Expr::zero();
        }
        let r = &self.0;
        Expr::from_rat(Rat {
            coef: &r.coef * c,
            exp: r.exp.clone(),
            factors: r.factors.clone(),
        })
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        if self.is_zero() || o.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let (a, b) = (&self.0, &o.0);
        let mut factors = a.factors.clone();
        for (f, k) in &b.factors {
            let e = factors.entry(f.clone()).or_insert(0);
            *e += k;
            if *e == 0 {
                factors.remove(f);
            }
        }
        let has_pos = factors
            .iter()
            .any(|(f, k)| *k > 0 && matches!(f, Factor::Poly(_)));
        let has_neg = factors
            .iter()
            .any(|(f, k)| *k < 0 && matches!(f, Factor::Poly(_)));
        if has_pos && has_neg {
            if let Some((p, q, quot)) = find_cancellation(&factors) {
                for (f, d) in [(p, -1), (q, 1)] {
                    let e = factors.get_mut(&f).unwrap();
                    *e += d;
                    if *e == 0 {
                        factors.remove(&f);
                    }
                }
                let head = fix_roots(Rat {
                    coef: &a.coef * &b.coef,
                    exp: exp_add(&a.exp, &b.exp),
                    factors,
                });
                return head.mul(&quot.factorize());
            }
        }
        fix_roots(Rat {
            coef: &a.coef * &b.coef,
            exp: exp_add(&a.exp, &b.exp),
            factors,
        })
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Expr> {
        if self.is_zero() {
            return None;
        }
        let r = &self.0;
        let factors = r.factors.iter().map(|(f, k)| (f.clone(), -k)).collect();
        Some(fix_roots(Rat {
            coef: r.coef.recip(),
            exp: exp_scale(&r.exp, -1),
            factors,
        }))
    }

    /// Quotient; `None` when dividing by zero.
    pub fn checked_div(&self, o: &Expr) -> Option<Expr> {
        o.inv().map(|i| self.mul(&i))
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn checked_pow_i(&self, k: i32) -> Option<Expr> {
        if k == 0 {
            return Some(Expr::one());
        }
        if self.is_zero() {
            return if k > 0 { Some(Expr::zero()) } else { None };
        }
        let r = &self.0;
        let coef = num_traits::Pow::pow(&r.coef, k);
        let factors = r.factors.iter().map(|(f, e)| (f.clone(), e * k)).collect();
        Some(fix_roots(Rat {
            coef,
            exp: exp_scale(&r.exp, k as i64),
            factors,
        }))
    }

    /// Integer power; panics on a negative power of zero.
    pub fn pow_i(&self, k: i32) -> Expr {
        self.checked_pow_i(k).expect("negative power of zero")
    }

    /// Rational power `self^(p/q)`; `None` for a negative power of zero.
    pub fn pow_q(&self, p: i32, q: i32) -> Option<Expr> {
        assert!(q != 0, "zero denominator in exponent");
        let g = (p as i64).gcd(&(q as i64)) as i32;
        let (mut p, mut q) = (p / g.max(1), q / g.max(1));
        if q < 0 {
            p = -p;
            q = -q;
        }
        if q == 1 {
            return self.checked_pow_i(p);
        }
        if self.is_zero() {
            return if p > 0 { Some(Expr::zero()) } else { None };
        }
        if self.is_one() {
            return Some(Expr::one());
        }
        if let Some(c) = self.as_constant() {
            if let Some(r) = rational_root(c, q as u32) {
                return Expr::constant(r).checked_pow_i(p);
            }
        }
        let root = Factor::Atom(Atom::Root(self.clone(), q as u32));
        Some(fix_roots(Rat {
            coef: BigRational::one(),
            exp: None,
            factors: BTreeMap::from([(root, p)]),
        }))
    }

    pub fn sqrt(&self) -> Expr {
        self.pow_q(1, 2).expect("positive power")
    }

    pub fn exp(&self) -> Expr {
        match canonical_exp_arg(self) {
            None => Expr::one(),
            Some(a) => Expr::from_rat(Rat {
                coef: BigRational::one(),
                exp: Some(a),
                factors: BTreeMap::new(),
            }),
        }
    }

    pub fn log(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        let r = &self.0;
        if r.coef.is_one() && r.factors.is_empty() {
            if let Some(a) = &r.exp {
                return a.clone();
            }
        }
        Factor::Atom(Atom::Call(Func::Log, self.clone())).to_expr()
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Factor::Atom(Atom::Call(Func::Sin, self.clone())).to_expr()
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Factor::Atom(Atom::Call(Func::Cos, self.clone())).to_expr()
    }

    /// Sum of any number of expressions, brought to normal form.
    pub fn sum(terms: &[Expr]) -> Expr {
        let ts: Vec<&Expr> = terms.iter().filter(|t| !t.is_zero()).collect();
        match ts.len() {
            0 => return Expr::zero(),
            1 => return ts[0].clone(),
            _ => {}
        }
        let first = &ts[0].0;
        if ts
            .iter()
            .all(|t| t.0.exp == first.exp && t.0.factors == first.factors)
        {
            let coef: BigRational = ts.iter().map(|t| t.0.coef.clone()).sum();
            return Expr::from_rat(Rat {
                coef,
                exp: first.exp.clone(),
                factors: first.factors.clone(),
            });
        }
        let mut g: BTreeMap<Factor, i32> = first.factors.clone();
        for t in &ts[1..] {
            let tf = &t.0.factors;
            let mut next = BTreeMap::new();
            for (f, k) in &g {
                let m = (*k).min(*tf.get(f).unwrap_or(&0));
                if m != 0 {
                    next.insert(f.clone(), m);
                }
            }
            for (f, k) in tf {
                if !g.contains_key(f) && *k < 0 {
                    next.insert(f.clone(), *k);
                }
            }
            g = next;
        }
        let gexp = if ts.iter().all(|t| t.0.exp == first.exp) {
            first.exp.clone()
        } else {
            None
        };
        let mut p = Poly::zero();
        for t in &ts {
            let r = &t.0;
            let mono = if gexp.is_some() {
                Mono::one()
            } else {
                Mono {
                    atoms: Vec::new(),
                    exp: r.exp.clone(),
                }
            };
            let mut term = Poly::term(mono, r.coef.clone());
            let mut keys: BTreeSet<&Factor> = r.factors.keys().collect();
            keys.extend(g.keys());
            for f in keys {
                let e = r.factors.get(f).unwrap_or(&0) - g.get(f).unwrap_or(&0);
                debug_assert!(e >= 0);
                if e > 0 {
                    term = match f {
                        Factor::Atom(a) => {
                            term.mul_mono(&Mono::atom(a.clone(), e as u32), &BigRational::one())
                        }
                        Factor::Poly(fp) => term.mul(&fp.pow(e as u32)),
                    };
                }
            }
            p.add_assign(&term);
        }
        if p.is_zero() {
            return Expr::zero();
        }
        let poly_dens: Vec<(Factor, i32)> = g
            .iter()
            .filter(|(f, k)| **k < 0 && matches!(f, Factor::Poly(_)))
            .map(|(f, k)| (f.clone(), *k))
            .collect();
        for (f, k) in poly_dens {
            let fp = f.to_poly();
            let mut k = k;
            while k < 0 {
                match p.exact_div(&fp) {
                    Some(q) => {
                        p = q;
                        k += 1;
                    }
                    None => break,
                }
            }
            if k == 0 {
                g.remove(&f);
            } else {
                g.insert(f, k);
            }
        }
        let head = Expr::from_rat(Rat {
            coef: BigRational::one(),
            exp: gexp,
            factors: g,
        });
        head.mul(&p.factorize())
    }

    /// Multiply out every polynomial factor with positive exponent into a single
    /// primitive numerator; denominators are left as they are.
    pub fn expanded(&self) -> Expr {
        let r = &self.0;
        let pos_polys: i32 = r
            .factors
            .iter()
            .filter(|(f, k)| **k > 0 && matches!(f, Factor::Poly(_)))
            .map(|(_, k)| *k)
            .sum();
        if pos_polys <= 1 && r.exp.is_none() {
            return self.clone();
        }
        let mut p = Poly::term(
            Mono {
                atoms: Vec::new(),
                exp: r.exp.clone(),
            },
            r.coef.clone(),
        );
        let mut rest = BTreeMap::new();
        for (f, k) in &r.factors {
            match f {
                Factor::Poly(fp) if *k > 0 => p = p.mul(&fp.pow(*k as u32)),
                Factor::Atom(a) if *k > 0 => {
                    p = p.mul_mono(&Mono::atom(a.clone(), *k as u32), &BigRational::one())
                }
                _ => {
                    rest.insert(f.clone(), *k);
                }
            }
        }
        let tail = Expr::from_rat(Rat {
            coef: BigRational::one(),
            exp: None,
            factors: rest,
        });
        p.factorize().mul(&tail)
    }

    /// Numerator and denominator as separate expressions.
    pub fn numer_denom(&self) -> (Expr, Expr) {
        let r = &self.0;
        let mut nf = BTreeMap::new();
        let mut df = BTreeMap::new();
        for (f, k) in &r.factors {
            if *k > 0 {
                nf.insert(f.clone(), *k);
            } else {
                df.insert(f.clone(), -k);
            }
        }
        let n = Expr::from_rat(Rat {
            coef: BigRational::from_integer(r.coef.numer().clone()),
            exp: r.exp.clone(),
            factors: nf,
        });
        let d = Expr::from_rat(Rat {
            coef: BigRational::from_integer(r.coef.denom().clone()),
            exp: None,
            factors: df,
        });
        (n, d)
    }

    /// All coordinates occurring anywhere in the expression.
    pub fn coords(&self) -> BTreeSet<Coordinate> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    pub(crate) fn collect_coords(&self, out: &mut BTreeSet<Coordinate>) {
        let r = &self.0;
        if let Some(e) = &r.exp {
            e.collect_coords(out);
        }
        for f in r.factors.keys() {
            match f {
                Factor::Atom(a) => collect_atom(a, out),
                Factor::Poly(p) => {
                    for m in p.terms.keys() {
                        for (a, _) in &m.atoms {
                            collect_atom(a, out);
                        }
                        if let Some(e) = &m.exp {
                            e.collect_coords(out);
                        }
                    }
                }
            }
        }
    }

    /// True when no `log`, `sin`, `cos` or root occurs.
    pub fn is_algebraic_free(&self) -> bool {
        self.walk_atoms(&mut |a| matches!(a, Atom::Coord(_)))
    }

    /// True when the expression contains `exp` anywhere.
    pub fn has_exp(&self) -> bool {
        let r = &self.0;
        if r.exp.is_some() {
            return true;
        }
        r.factors.keys().any(|f| match f {
            Factor::Atom(a) => atom_has_exp(a),
            Factor::Poly(p) => p
                .terms
                .keys()
                .any(|m| m.exp.is_some() || m.atoms.iter().any(|(a, _)| atom_has_exp(a))),
        })
    }

    /// Visit every top-level and polynomial atom; stops at the first `false`.
    fn walk_atoms(&self, f: &mut dyn FnMut(&Atom) -> bool) -> bool {
        let r = &self.0;
        if let Some(e) = &r.exp {
            if !e.walk_atoms(f) {
                return false;
            }
        }
        for fac in r.factors.keys() {
            match fac {
                Factor::Atom(a) => {
                    if !f(a) {
                        return false;
                    }
                }
                Factor::Poly(p) => {
                    for m in p.terms.keys() {
                        for (a, _) in &m.atoms {
                            if !f(a) {
                                return false;
                            }
                        }
                        if let Some(e) = &m.exp {
                            if !e.walk_atoms(f) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Zero testing is exact: the expression is a rational function of the
    /// coordinates and of exponentials of Laurent polynomials in them.
    pub fn is_decidable(&self) -> bool {
        fn laurent(e: &Expr) -> bool {
            let r = &e.0;
            r.exp.is_none()
                && r.factors.iter().all(|(f, k)| match f {
                    Factor::Atom(Atom::Coord(_)) => true,
                    Factor::Atom(_) => false,
                    Factor::Poly(p) => {
                        *k > 0
                            && p.terms.keys().all(|m| {
                                m.exp.is_none()
                                    && m.atoms.iter().all(|(a, _)| matches!(a, Atom::Coord(_)))
                            })
                    }
                })
        }
        let r = &self.0;
        if let Some(e) = &r.exp {
            if !laurent(e) {
                return false;
            }
        }
        r.factors.keys().all(|f| match f {
            Factor::Atom(Atom::Coord(_)) => true,
            Factor::Atom(_) => false,
            Factor::Poly(p) => p.terms.keys().all(|m| {
                m.atoms.iter().all(|(a, _)| matches!(a, Atom::Coord(_)))
                    && m.exp.as_ref().is_none_or(laurent)
            }),
        })
    }

    /// Number of nodes, a rough size measure.
    pub fn size(&self) -> usize {
        let r = &self.0;
        let mut n = 1 + r.exp.as_ref().map_or(0, |e| e.size());
        for f in r.factors.keys() {
            n += match f {
                Factor::Atom(a) => atom_size(a),
                Factor::Poly(p) => p
                    .terms
                    .keys()
                    .map(|m| {
                        1 + m.atoms.iter().map(|(a, _)| atom_size(a)).sum::<usize>()
                            + m.exp.as_ref().map_or(0, |e| e.size())
                    })
                    .sum(),
            };
        }
        n
    }
}

fn atom_size(a: &Atom) -> usize {
    match a {
        Atom::Coord(_) => 1,
        Atom::Call(_, e) | Atom::Root(e, _) => 1 + e.size(),
    }
}

fn atom_has_exp(a: &Atom) -> bool {
    match a {
        Atom::Coord(_) => false,
        Atom::Call(_, e) | Atom::Root(e, _) => e.has_exp(),
    }
}

fn collect_atom(a: &Atom, out: &mut BTreeSet<Coordinate>) {
    match a {
        Atom::Coord(c) => {
            out.insert(c.clone());
        }
        Atom::Call(_, e) | Atom::Root(e, _) => e.collect_coords(out),
    }
}

fn int_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(q);
    if num_traits::Pow::pow(&r, q) == *n {
        Some(r)
    } else {
        None
    }
}

fn rational_root(c: &BigRational, q: u32) -> Option<BigRational> {
    let neg = c.is_negative();
    if neg && q.is_multiple_of(2) {
        return None;
    }
    let a = c.abs();
    let n = int_root(a.numer(), q)?;
    let d = int_root(a.denom(), q)?;
    let r = BigRational::new(n, d);
    Some(if neg { -r } else { r })
}

// ---------------------------------------------------------------- operators

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, o)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                (&self).$m(&o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                (&self).$m(o)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum(&[a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum(&[a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::mul(a, b));
binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero"));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.mul_rational(&-BigRational::one())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl num_traits::Zero for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
}

impl num_traits::One for Expr {
    fn one() -> Self {
        Expr::one()
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Self {
        Expr::int(i)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Self {
        Expr::constant(c)
    }
}

impl From<Coordinate> for Expr {
    fn from(c: Coordinate) -> Self {
        Expr::coord(c)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let v: Vec<Expr> = iter.collect();
        Expr::sum(&v)
    }
}
