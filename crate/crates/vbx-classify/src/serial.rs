//! JSON input: a system of three variables or explicit symbol coefficient matrices.

use crate::error::ClassifyError;
use crate::sampled::{to_expr_forms, ExprForms};
use crate::symbol::pair_forms;
use serde_json::Value;
use vbx_expr::{parse_with, Expr};
use vbx_jet::SystemSpec;

fn entry(v: &Value) -> Result<Expr, ClassifyError> {
    match v {
        Value::String(s) => {
            parse_with(s, 3).map_err(|e| ClassifyError::Input(format!("coefficient {s:?}: {e}")))
        }
        Value::Number(n) => n.as_i64().map(Expr::int).ok_or_else(|| {
            ClassifyError::Input(format!("coefficient {n} must be an integer or a string"))
        }),
        other => Err(ClassifyError::Input(format!(
            "coefficient {other} must be a number or a string"
        ))),
    }
}

fn array3<'a>(v: &'a Value, what: &str) -> Result<&'a [Value], ClassifyError> {
    match v.as_array() {
        Some(a) if a.len() == 3 => Ok(a),
        _ => Err(ClassifyError::Input(format!(
            "{what} must be an array of length 3"
        ))),
    }
}

/// Parse `{"M": [A^1, A^2, A^3]}` with each `A^k` a 3x3 matrix, or a system spec with `n = 3`.
pub fn forms_from_json(text: &str) -> Result<ExprForms, ClassifyError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ClassifyError::Input(e.to_string()))?;
    forms_from_value(&v)
}

pub fn forms_from_value(v: &Value) -> Result<ExprForms, ClassifyError> {
    let Some(m) = v.get("M") else {
        let spec = SystemSpec::from_value(v).map_err(|e| ClassifyError::Input(e.to_string()))?;
        if spec.n() != 3 {
            return Err(ClassifyError::NeedsThree(spec.n()));
        }
        return Ok(to_expr_forms(&pair_forms()));
    };
    if let Some(obj) = v.as_object() {
        if let Some(k) = obj.keys().find(|k| *k != "M") {
            return Err(ClassifyError::Input(format!("unknown key {k:?}")));
        }
    }
    let mut out: ExprForms =
        std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero())));
    for (k, mat) in array3(m, "\"M\"")?.iter().enumerate() {
        for (a, row) in array3(mat, "each symbol matrix")?.iter().enumerate() {
            for (b, c) in array3(row, "each matrix row")?.iter().enumerate() {
                out[k][a][b] = entry(c)?;
            }
        }
    }
    Ok(out)
}
