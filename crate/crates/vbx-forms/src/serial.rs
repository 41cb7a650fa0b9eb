//! JSON form: `{"type": [r, s], "terms": [{"monomial": ["s1", "th:2"], "coeff": "u1"}]}`.

use crate::basis::BasisOneForm;
use crate::form::BiForm;
use serde_json::{json, Value};
use thiserror::Error;
use vbx_expr::{parse_with, ParseError};

#[derive(Debug, Error)]
pub enum FormError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error("term {term}: {source}")]
    Parse { term: usize, source: ParseError },
    #[error("term {term}: unknown basis form '{name}' (expected s1, th, th:1, th:1^2, ...)")]
    Basis { term: usize, name: String },
    #[error("term {term}: monomial of type ({r}, {s}) in a form of type ({er}, {es})")]
    Type {
        term: usize,
        r: u8,
        s: u8,
        er: u8,
        es: u8,
    },
}

impl BiForm {
    pub fn to_value(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|(m, c)| {
                json!({"monomial": m.iter().map(|b| b.to_string()).collect::<Vec<_>>(), "coeff": c.to_string()})
            })
            .collect();
        json!({"type": [self.r(), self.s()], "terms": terms})
    }

    pub fn from_json(text: &str, n: u8) -> Result<Self, FormError> {
        Self::from_value(&serde_json::from_str(text)?, n)
    }

    /// Accepts the object form or a bare, non-empty term list.
    pub fn from_value(v: &Value, n: u8) -> Result<Self, FormError> {
        let (declared, terms) = match v {
            Value::Array(t) => (None, t),
            Value::Object(o) => {
                let terms = o
                    .get("terms")
                    .and_then(Value::as_array)
                    .ok_or_else(|| FormError::Schema("missing 'terms' array".into()))?;
                let ty = match o.get("type") {
                    None => None,
                    Some(t) => {
                        let t = t.as_array().filter(|a| a.len() == 2);
                        let rs = t.and_then(|a| Some((a[0].as_u64()? as u8, a[1].as_u64()? as u8)));
                        Some(rs.ok_or_else(|| FormError::Schema("'type' must be [r, s]".into()))?)
                    }
                };
                (ty, terms)
            }
            _ => {
                return Err(FormError::Schema(
                    "expected an object or an array of terms".into(),
                ))
            }
        };
        let mut parsed = Vec::new();
        for (k, t) in terms.iter().enumerate() {
            let mono = t
                .get("monomial")
                .and_then(Value::as_array)
                .ok_or_else(|| FormError::Schema(format!("term {k}: missing 'monomial' array")))?;
            let mut bs = Vec::new();
            for b in mono {
                let name = b.as_str().unwrap_or_default();
                let basis = BasisOneForm::parse(name)
                    .filter(|b| match b {
                        BasisOneForm::Sigma(i) | BasisOneForm::Theta { branch: i, .. } => *i <= n,
                    })
                    .ok_or_else(|| FormError::Basis {
                        term: k,
                        name: name.to_string(),
                    })?;
                bs.push(basis);
            }
            let coeff = match t.get("coeff") {
                Some(Value::String(s)) => {
                    parse_with(s, n).map_err(|e| FormError::Parse { term: k, source: e })?
                }
                Some(Value::Number(x)) => parse_with(&x.to_string(), n)
                    .map_err(|e| FormError::Parse { term: k, source: e })?,
                _ => return Err(FormError::Schema(format!("term {k}: missing 'coeff'"))),
            };
            parsed.push((bs, coeff));
        }
        let (r, s) = match declared {
            Some(rs) => rs,
            None => {
                let first = parsed
                    .first()
                    .ok_or_else(|| FormError::Schema("empty term list needs a 'type'".into()))?;
                type_of(&first.0)
            }
        };
        for (k, (bs, _)) in parsed.iter().enumerate() {
            let (tr, ts) = type_of(bs);
            if (tr, ts) != (r, s) {
                return Err(FormError::Type {
                    term: k,
                    r: tr,
                    s: ts,
                    er: r,
                    es: s,
                });
            }
        }
        Ok(BiForm::from_terms(r, s, parsed))
    }
}

fn type_of(bs: &[BasisOneForm]) -> (u8, u8) {
    let r = bs.iter().filter(|b| b.is_horizontal()).count() as u8;
    (r, bs.len() as u8 - r)
}
