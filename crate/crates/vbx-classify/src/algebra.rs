//! Field-generic linear algebra and univariate polynomials used by the classifier.

use num_traits::{One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact field arithmetic needed by the classifier.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
{
}

/// Polynomial in one variable, coefficients from lowest degree up, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: Scalar>(Vec<F>);

impl<F: Scalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b z`.
    pub fn linear(a: F, b: F) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.0
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> F {
        self.0.get(k).cloned().unwrap_or_else(F::zero)
    }

    fn lead(&self) -> Option<&F> {
        self.0.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        Poly::new((0..len).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        Poly::new((0..len).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.0.len() + o.0.len() - 1];
        for (a, x) in self.0.iter().enumerate() {
            for (b, y) in o.0.iter().enumerate() {
                out[a + b] = out[a + b].clone() + x.clone() * y.clone();
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Self {
        let mut k = F::zero();
        let mut out = Vec::new();
        for c in self.0.iter() {
            if !k.is_zero() {
                out.push(c.clone() * k.clone());
            }
            k = k + F::one();
        }
        Poly::new(out)
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.lead()?.clone();
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        let mut q = vec![F::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].clone() / dl.clone();
            for (k, dk) in d.0.iter().enumerate() {
                let at = top - dd + k;
                r[at] = r[at].clone() - c.clone() * dk.clone();
            }
            q[top - dd] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Some((Poly::new(q), Poly::new(r)))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => {
                let l = l.clone();
                Poly::new(self.0.iter().map(|c| c.clone() / l.clone()).collect())
            }
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Distinct-root counts by multiplicity: entry `k-1` is the number of distinct roots of
    /// multiplicity `k` over an algebraic closure (square-free decomposition).
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).expect("gcd nonzero").0;
        let mut c = d.div_rem(&a0).expect("gcd nonzero").0;
        let mut dd = c.sub(&b.derivative());
        loop {
            let a = b.gcd(&dd);
            out.push(a.degree().unwrap_or(0));
            b = b.div_rem(&a).expect("gcd nonzero").0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = dd.div_rem(&a).expect("gcd nonzero").0;
            dd = c.sub(&b.derivative());
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

/// Basis of the right nullspace of a `rows x cols` matrix, by exact row reduction.
/// Each basis vector has a unit entry at its free column.
pub fn nullspace<F: Scalar>(mat: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut a: Vec<Vec<F>> = mat.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let lead = a[row][col].clone();
        for v in a[row].iter_mut() {
            *v = v.clone() / lead.clone();
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[row].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - p * f.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![F::zero(); cols];
            v[free] = F::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a 3x3 matrix with entries in a commutative ring of polynomials.
pub fn det3<F: Scalar>(m: &[[Poly<F>; 3]; 3]) -> Poly<F> {
    let minor = |a: usize, b: usize| m[1][a].mul(&m[2][b]).sub(&m[1][b].mul(&m[2][a]));
    m[0][0]
        .mul(&minor(1, 2))
        .sub(&m[0][1].mul(&minor(0, 2)))
        .add(&m[0][2].mul(&minor(0, 1)))
}
