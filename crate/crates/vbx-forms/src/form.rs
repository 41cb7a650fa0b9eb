use crate::basis::BasisOneForm;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use vbx_expr::Expr;

/// Homogeneous form of type `(r, s)` with expression coefficients.
///
/// Monomials are stored sorted (horizontal factors first) with the sign folded
/// into the coefficient; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiForm {
    r: u8,
    s: u8,
    terms: BTreeMap<Vec<BasisOneForm>, Expr>,
}

/// Sort a wedge monomial; returns the permutation sign, or `None` when a factor repeats.
pub(crate) fn normalize(mono: &mut [BasisOneForm]) -> Option<bool> {
    let mut negative = false;
    for i in 1..mono.len() {
        let mut j = i;
        while j > 0 && mono[j - 1] > mono[j] {
            mono.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if mono.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(negative)
    }
}

impl BiForm {
    pub fn zero(r: u8, s: u8) -> Self {
        BiForm {
            r,
            s,
            terms: BTreeMap::new(),
        }
    }

    /// A function as a `(0, 0)` form.
    pub fn function(f: Expr) -> Self {
        Self::from_terms(0, 0, [(Vec::new(), f)])
    }

    pub fn basis(b: BasisOneForm) -> Self {
        let (r, s) = if b.is_horizontal() { (1, 0) } else { (0, 1) };
        Self::from_terms(r, s, [(vec![b], Expr::one())])
    }

    pub fn sigma(i: u8) -> Self {
        Self::basis(BasisOneForm::Sigma(i))
    }

    pub fn theta() -> Self {
        Self::basis(BasisOneForm::THETA)
    }

    /// `theta_{i^k}`.
    pub fn theta_pure(i: u8, k: u8) -> Self {
        Self::basis(BasisOneForm::theta(i, k))
    }

    /// Build from monomials in any order; panics if a monomial has the wrong type.
    pub fn from_terms<I: IntoIterator<Item = (Vec<BasisOneForm>, Expr)>>(
        r: u8,
        s: u8,
        terms: I,
    ) -> Self {
        let mut out = BiForm::zero(r, s);
        for (mono, c) in terms {
            out.add_term(mono, c);
        }
        out
    }

    /// Add `c * mono` in place.
    pub fn add_term(&mut self, mut mono: Vec<BasisOneForm>, c: Expr) {
        let h = mono.iter().filter(|b| b.is_horizontal()).count();
        assert!(
            h == self.r as usize && mono.len() - h == self.s as usize,
            "monomial of wrong type for a ({}, {}) form",
            self.r,
            self.s
        );
        if c.is_zero() {
            return;
        }
        let Some(neg) = normalize(&mut mono) else {
            return;
        };
        let c = if neg { -c } else { c };
        match self.terms.get(&mono) {
            Some(old) => {
                let v = old + &c;
                if v.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    self.terms.insert(mono, v);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    pub fn bidegree(&self) -> (u8, u8) {
        (self.r, self.s)
    }

    pub fn degree(&self) -> u8 {
        self.r + self.s
    }

    pub fn terms(&self) -> &BTreeMap<Vec<BasisOneForm>, Expr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial given in any order (sign accounted for).
    pub fn coefficient(&self, mono: &[BasisOneForm]) -> Expr {
        let mut m = mono.to_vec();
        match normalize(&mut m) {
            None => Expr::zero(),
            Some(neg) => {
                let c = self.terms.get(&m).cloned().unwrap_or_else(Expr::zero);
                if neg {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// The coefficient of a `(0, 0)` form.
    pub fn as_function(&self) -> Expr {
        assert_eq!(self.bidegree(), (0, 0), "not a function");
        self.coefficient(&[])
    }

    pub fn scale(&self, f: &Expr) -> Self {
        Self::from_terms(
            self.r,
            self.s,
            self.terms.iter().map(|(m, c)| (m.clone(), c.mul(f))),
        )
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs<E>(&self, mut f: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<Self, E> {
        let mut out = BiForm::zero(self.r, self.s);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, o: &BiForm) -> BiForm {
        let mut out = BiForm::zero(self.r + o.r, self.s + o.s);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.add_term(m, c1.mul(c2));
            }
        }
        out
    }

    /// Sum of forms of one type; `zero(r, s)` when empty.
    pub fn sum(r: u8, s: u8, forms: &[BiForm]) -> BiForm {
        let mut by_mono: BTreeMap<Vec<BasisOneForm>, Vec<Expr>> = BTreeMap::new();
        for f in forms {
            assert_eq!(f.bidegree(), (r, s), "adding forms of different types");
            for (m, c) in &f.terms {
                by_mono.entry(m.clone()).or_default().push(c.clone());
            }
        }
        let mut out = BiForm::zero(r, s);
        for (m, cs) in by_mono {
            let c = Expr::sum(&cs);
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        out
    }

    /// Largest contact order appearing in any monomial.
    pub fn max_order(&self) -> u8 {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .map(|b| match b {
                BasisOneForm::Theta { order, .. } => *order,
                BasisOneForm::Sigma(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

impl Add<&BiForm> for &BiForm {
    type Output = BiForm;
    fn add(self, o: &BiForm) -> BiForm {
        BiForm::sum(self.r, self.s, &[self.clone(), o.clone()])
    }
}

impl Sub<&BiForm> for &BiForm {
    type Output = BiForm;
    fn sub(self, o: &BiForm) -> BiForm {
        self + &(-o)
    }
}

impl Neg for &BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        self.scale(&Expr::int(-1))
    }
}

impl Add for BiForm {
    type Output = BiForm;
    fn add(self, o: BiForm) -> BiForm {
        &self + &o
    }
}

impl Sub for BiForm {
    type Output = BiForm;
    fn sub(self, o: BiForm) -> BiForm {
        &self - &o
    }
}

impl Neg for BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        -&self
    }
}

impl fmt::Display for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for b in m {
                write!(f, "*{b}")?;
            }
        }
        Ok(())
    }
}
