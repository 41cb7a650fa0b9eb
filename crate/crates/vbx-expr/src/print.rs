//! Printing in the input grammar, so that parsing a printed expression gives it back.

use crate::expr::{Atom, Expr, Factor, Poly};
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::fmt;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_atom(self, 1))
    }
}

fn is_simple(e: &Expr) -> bool {
    e.as_coord().is_some()
        || e.as_constant()
            .is_some_and(|c| c.is_integer() && !c.is_negative())
}

fn render_atom(a: &Atom, k: u32) -> String {
    match a {
        Atom::Coord(c) => power(c.to_string(), k),
        Atom::Call(func, arg) => power(format!("{}({})", func.name(), render(arg)), k),
        Atom::Root(base, q) if *q == 2 && k == 1 => format!("sqrt({})", render(base)),
        Atom::Root(base, q) => {
            let b = if is_simple(base) {
                render(base)
            } else {
                format!("({})", render(base))
            };
            format!("{b}^({k}/{q})")
        }
    }
}

fn power(s: String, k: u32) -> String {
    if k == 1 {
        s
    } else {
        format!("{s}^{k}")
    }
}

fn render_factor(f: &Factor, k: u32) -> String {
    match f {
        Factor::Atom(a) => render_atom(a, k),
        Factor::Poly(p) => power(format!("({})", render_poly(p)), k),
    }
}

pub(crate) fn render_poly(p: &Poly) -> String {
    let mut out = String::new();
    for (i, (m, c)) in p.terms.iter().rev().enumerate() {
        let mut items: Vec<String> = m.atoms.iter().map(|(a, k)| render_atom(a, *k)).collect();
        if let Some(e) = &m.exp {
            items.push(format!("exp({})", render(e)));
        }
        let mag = c.abs();
        let body = if items.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            items.join("*")
        } else {
            format!("{}*{}", mag, items.join("*"))
        };
        if c.is_negative() {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(&body);
    }
    out
}

/// Text form of an expression.
pub fn render(e: &Expr) -> String {
    let r = e.rat();
    if e.is_zero() {
        return "0".into();
    }
    let coef: &BigRational = &r.coef;
    let num = coef.numer().abs();
    let den = coef.denom().clone();
    let mut nitems = Vec::new();
    let mut ditems = Vec::new();
    for (f, k) in &r.factors {
        let s = render_factor(f, k.unsigned_abs());
        if *k > 0 {
            nitems.push(s);
        } else {
            ditems.push(s);
        }
    }
    if let Some(a) = &r.exp {
        nitems.push(format!("exp({})", render(a)));
    }
    if r.exp.is_none() && r.factors.len() == 1 && coef.is_one() {
        if let Some((Factor::Poly(p), 1)) = r.factors.iter().next() {
            return render_poly(p);
        }
    }
    let mut out = String::new();
    if coef.is_negative() {
        out.push('-');
    }
    if nitems.is_empty() {
        out.push_str(&num.to_string());
    } else if num.is_one() {
        out.push_str(&nitems.join("*"));
    } else {
        out.push_str(&format!("{}*{}", num, nitems.join("*")));
    }
    if !den.is_one() {
        ditems.insert(0, den.to_string());
    }
    match ditems.len() {
        0 => {}
        1 => {
            out.push('/');
            out.push_str(&ditems[0]);
        }
        _ => {
            out.push_str("/(");
            out.push_str(&ditems.join("*"));
            out.push(')');
        }
    }
    out
}
