//! JSON inputs: rho triples, invariant bundles and generator designs.
//!
//! Expressions are strings in the expression grammar. A rho entry is either
//! an expression (a function, `s = 1`) or a form in the form JSON layout.

use crate::error::ConslawError;
use crate::generate::{Generator, OneS, TwoS};
use crate::invariant::InvariantBundle;
use crate::psi::RhoTriple;
use serde::Deserialize;
use serde_json::Value;
use std::collections::BTreeMap;
use vbx_expr::{parse_with, Expr};
use vbx_forms::BiForm;

fn expr(text: &str, n: u8, what: &str) -> Result<Expr, ConslawError> {
    parse_with(text, n).map_err(|e| ConslawError::Input(format!("{what}: {e}")))
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, ConslawError> {
    serde_json::from_str(text).map_err(|e| ConslawError::Input(format!("{what}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RhoFile {
    s: Option<u8>,
    rho12: Option<Value>,
    rho13: Option<Value>,
    rho23: Option<Value>,
}

impl RhoTriple {
    /// `{"s": 1, "rho12": "exp(x1+x2)", "rho13": ..., "rho23": ...}`; `s` defaults to 1.
    pub fn from_json(text: &str) -> Result<Self, ConslawError> {
        let f: RhoFile = from_json(text, "rho file")?;
        let s = f.s.unwrap_or(1);
        let mut rho = BTreeMap::new();
        for ((i, j), v) in [((1, 2), f.rho12), ((1, 3), f.rho13), ((2, 3), f.rho23)] {
            let Some(v) = v else { continue };
            let w = match &v {
                Value::String(t) => BiForm::function(expr(t, 3, &format!("rho{i}{j}"))?),
                _ => BiForm::from_value(&v, 3)?,
            };
            rho.insert((i, j), w);
        }
        RhoTriple::new(s, rho)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    #[serde(rename = "I")]
    i: String,
    #[serde(rename = "It")]
    it: String,
    #[serde(rename = "J")]
    j: String,
    #[serde(rename = "Jt")]
    jt: String,
    #[serde(rename = "K")]
    k: Option<String>,
    #[serde(rename = "Kt")]
    kt: Option<String>,
    pair_fields: Vec<u8>,
    quad_fields: Vec<u8>,
}

impl InvariantBundle {
    /// `{"I": .., "It": .., "J": .., "Jt": .., "K": .., "Kt": .., "pair_fields": [..], "quad_fields": [..]}`;
    /// `K` and `Kt` are omitted when `n = 2`.
    pub fn from_json(text: &str, n: u8) -> Result<Self, ConslawError> {
        let f: BundleFile = from_json(text, "bundle file")?;
        let mut quad = vec![expr(&f.j, n, "J")?, expr(&f.jt, n, "Jt")?];
        match (&f.k, &f.kt) {
            (Some(k), Some(kt)) => {
                quad.push(expr(k, n, "K")?);
                quad.push(expr(kt, n, "Kt")?);
            }
            (None, None) => {}
            _ => {
                return Err(ConslawError::Input(
                    "bundle file: K and Kt come together".into(),
                ))
            }
        }
        let b = InvariantBundle {
            pair: [expr(&f.i, n, "I")?, expr(&f.it, n, "It")?],
            pair_fields: f.pair_fields,
            quad,
            quad_fields: f.quad_fields,
        };
        b.validate(n)?;
        Ok(b)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OneSFile {
    l: u8,
    s: u8,
    k: usize,
    #[serde(rename = "I")]
    inv: String,
    #[serde(rename = "It")]
    tilde: String,
    #[serde(default)]
    fields: Vec<u8>,
    #[serde(default)]
    eta: Vec<usize>,
    eta_coeff: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSFile {
    i: u8,
    j: u8,
    l: u8,
    s: u8,
    k: usize,
    a: String,
    b: String,
    #[serde(rename = "J")]
    inv_j: String,
    #[serde(rename = "K")]
    inv_k: String,
    #[serde(default)]
    eta1: Vec<usize>,
    #[serde(default)]
    eta2: Vec<usize>,
    eta_coeff: Option<String>,
}

fn coeff(c: &Option<String>, n: u8) -> Result<Expr, ConslawError> {
    c.as_deref()
        .map_or(Ok(Expr::one()), |t| expr(t, n, "eta_coeff"))
}

impl Generator {
    /// `kind` is `1s` or `2s`; see [`OneS`] and [`TwoS`] for the fields.
    pub fn from_json(kind: &str, text: &str, n: u8) -> Result<Self, ConslawError> {
        match kind {
            "1s" => {
                let f: OneSFile = from_json(text, "1s inputs")?;
                Ok(Generator::OneS(OneS {
                    l: f.l,
                    s: f.s,
                    k: f.k,
                    inv: expr(&f.inv, n, "I")?,
                    tilde: expr(&f.tilde, n, "It")?,
                    fields: f.fields,
                    eta: f.eta,
                    eta_coeff: coeff(&f.eta_coeff, n)?,
                }))
            }
            "2s" => {
                let f: TwoSFile = from_json(text, "2s inputs")?;
                Ok(Generator::TwoS(TwoS {
                    i: f.i,
                    j: f.j,
                    l: f.l,
                    s: f.s,
                    k: f.k,
                    a: expr(&f.a, n, "a")?,
                    b: expr(&f.b, n, "b")?,
                    inv_j: expr(&f.inv_j, n, "J")?,
                    inv_k: expr(&f.inv_k, n, "K")?,
                    eta1: f.eta1,
                    eta2: f.eta2,
                    eta_coeff: coeff(&f.eta_coeff, n)?,
                }))
            }
            other => Err(ConslawError::Input(format!(
                "unknown generator kind '{other}' (expected 1s or 2s)"
            ))),
        }
    }
}
