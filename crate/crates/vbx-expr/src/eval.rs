//! Floating-point evaluation, generic over the float type.

use crate::coord::Coordinate;
use crate::expr::{Atom, Expr, Factor, Func, Poly};
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unassigned coordinate {0}")]
    Unassigned(Coordinate),
    #[error("domain error: {0}")]
    Domain(&'static str),
}

fn float<T: Float + FromPrimitive>(c: &BigRational) -> T {
    T::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(T::nan)
}

impl Expr {
    /// Value at a point given as a lookup function.
    pub fn eval<T: Float + FromPrimitive>(
        &self,
        point: &dyn Fn(&Coordinate) -> Option<T>,
    ) -> Result<T, EvalError> {
        self.eval_scaled(point).map(|(v, _)| v)
    }

    /// Value at a point given as a map.
    pub fn eval_at<T: Float + FromPrimitive>(
        &self,
        point: &BTreeMap<Coordinate, T>,
    ) -> Result<T, EvalError> {
        self.eval(&|c| point.get(c).copied())
    }

    /// Value together with a magnitude scale: the same product with every
    /// polynomial factor in the numerator replaced by the sum of the absolute
    /// values of its terms. Cancellation shows up as `|value| << scale`.
    pub fn eval_scaled<T: Float + FromPrimitive>(
        &self,
        point: &dyn Fn(&Coordinate) -> Option<T>,
    ) -> Result<(T, T), EvalError> {
        let r = self.rat();
        let c: T = float(&r.coef);
        let mut v = c;
        let mut s = c.abs();
        if let Some(a) = &r.exp {
            let ea = a.eval(point)?.exp();
            v = v * ea;
            s = s * ea;
        }
        for (f, k) in &r.factors {
            let (fv, fs) = match f {
                Factor::Atom(a) => {
                    let x = eval_atom(a, point)?;
                    (x, x.abs())
                }
                Factor::Poly(p) => eval_poly(p, point)?,
            };
            if *k < 0 && fv == T::zero() {
                return Err(EvalError::Domain("division by zero"));
            }
            v = v * fv.powi(*k);
            s = s * if *k > 0 {
                fs.powi(*k)
            } else {
                fv.abs().powi(*k)
            };
        }
        if !v.is_finite() || !s.is_finite() {
            return Err(EvalError::Domain("non-finite value"));
        }
        Ok((v, s))
    }
}

fn eval_poly<T: Float + FromPrimitive>(
    p: &Poly,
    point: &dyn Fn(&Coordinate) -> Option<T>,
) -> Result<(T, T), EvalError> {
    let mut v = T::zero();
    let mut s = T::zero();
    for (m, c) in &p.terms {
        let mut t: T = float(c);
        for (a, k) in &m.atoms {
            t = t * eval_atom(a, point)?.powi(*k as i32);
        }
        if let Some(e) = &m.exp {
            t = t * e.eval(point)?.exp();
        }
        v = v + t;
        s = s + t.abs();
    }
    Ok((v, s))
}

fn eval_atom<T: Float + FromPrimitive>(
    a: &Atom,
    point: &dyn Fn(&Coordinate) -> Option<T>,
) -> Result<T, EvalError> {
    match a {
        Atom::Coord(c) => point(c).ok_or_else(|| EvalError::Unassigned(c.clone())),
        Atom::Call(f, arg) => {
            let x = arg.eval(point)?;
            match f {
                Func::Log if x <= T::zero() => {
                    Err(EvalError::Domain("log of non-positive argument"))
                }
                Func::Log => Ok(x.ln()),
                Func::Sin => Ok(x.sin()),
                Func::Cos => Ok(x.cos()),
            }
        }
        Atom::Root(b, q) => {
            let x = b.eval(point)?;
            let inv = T::one() / T::from_u32(*q).unwrap();
            if x < T::zero() {
                if q % 2 == 0 {
                    return Err(EvalError::Domain("even root of negative argument"));
                }
                Ok(-(-x).powf(inv))
            } else {
                Ok(x.powf(inv))
            }
        }
    }
}
