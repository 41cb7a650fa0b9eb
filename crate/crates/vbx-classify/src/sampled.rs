//! Classification of symbol forms with coefficients depending on `x`.

use crate::error::ClassifyError;
use crate::symbol::{classify, symbol_relations, Case, ClassificationResult, QuadForm, Relation};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use vbx_expr::{render, Certainty, Coordinate, Expr};

/// Three quadratic forms with expression coefficients.
pub type ExprForms = [[[Expr; 3]; 3]; 3];

/// Convert rational forms to expression forms.
pub fn to_expr_forms(forms: &[QuadForm<BigRational>; 3]) -> ExprForms {
    std::array::from_fn(|k| {
        std::array::from_fn(|a| std::array::from_fn(|b| Expr::constant(forms[k][a][b].clone())))
    })
}

/// Outcome of classifying symbol forms, exact or sampled over `x`.
#[derive(Clone, Debug)]
pub struct SymbolReport {
    pub case: Case,
    pub certainty: Certainty,
    /// Exact classification; for sampled input, the one at the first sample agreeing with `case`.
    pub result: ClassificationResult<BigRational>,
    /// Relation basis behind `result`.
    pub relations: Vec<Relation<BigRational>>,
    /// Sample points used (zero for constant coefficients).
    pub samples: usize,
    /// Samples whose case equals `case`.
    pub agreeing: usize,
}

impl SymbolReport {
    pub fn to_value(&self) -> Value {
        let q = |c: &BigRational| c.to_string();
        json!({
            "cubic": self.result.cubic.iter().map(q).collect::<Vec<_>>(),
            "case": self.case.label(),
            "pattern": self.result.pattern,
            "root_at_infinity": self.result.infinity,
            "kernel_dim": self.result.kernel_dim,
            "relations": self.relations.iter()
                .map(|r| r.iter().map(|l| l.iter().map(q).collect::<Vec<_>>()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "certainty": self.certainty.as_str(),
            "samples": self.samples,
            "agreeing": self.agreeing,
        })
    }
}

fn check_coords(forms: &ExprForms) -> Result<u8, ClassifyError> {
    let mut top = 0;
    for e in forms.iter().flatten().flatten() {
        for c in e.coords() {
            match c {
                Coordinate::X(i) => top = top.max(i),
                _ => return Err(ClassifyError::NotXOnly(render(e))),
            }
        }
    }
    Ok(top)
}

fn specialize(
    forms: &ExprForms,
    point: &BTreeMap<Coordinate, Expr>,
) -> Option<[QuadForm<BigRational>; 3]> {
    let mut out: [QuadForm<BigRational>; 3] = std::array::from_fn(|_| {
        std::array::from_fn(|_| std::array::from_fn(|_| BigRational::from_integer(0.into())))
    });
    for k in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                out[k][a][b] = forms[k][a][b].subst_map(point)?.as_constant()?.clone();
            }
        }
    }
    Some(out)
}

type Exact = (
    ClassificationResult<BigRational>,
    Vec<Relation<BigRational>>,
);

fn exact(forms: [QuadForm<BigRational>; 3]) -> Result<Exact, ClassifyError> {
    let data = symbol_relations(forms)?;
    let res = classify(&data)?;
    Ok((res, data.relations().to_vec()))
}

/// Classify symbol forms. Constant coefficients are handled exactly; otherwise the forms are
/// specialized at `samples` random rational points of `x` and the most frequent case is reported
/// as probabilistic.
pub fn classify_forms(
    forms: &ExprForms,
    samples: usize,
    seed: u64,
) -> Result<SymbolReport, ClassifyError> {
    let top = check_coords(forms)?;
    if top == 0 {
        let q = specialize(forms, &BTreeMap::new()).ok_or(ClassifyError::NoSamplePoint)?;
        let (result, relations) = exact(q)?;
        return Ok(SymbolReport {
            case: result.case,
            certainty: Certainty::Exact,
            result,
            relations,
            samples: 0,
            agreeing: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::new();
    let mut attempts = 0;
    while runs.len() < samples.max(1) {
        attempts += 1;
        if attempts > 20 * samples.max(1) {
            return Err(ClassifyError::NoSamplePoint);
        }
        let point: BTreeMap<Coordinate, Expr> = (1..=top)
            .map(|i| {
                let p: i64 = rng.gen_range(-40..=40);
                let d: i64 = rng.gen_range(1..=9);
                (
                    Coordinate::X(i),
                    Expr::constant(BigRational::new(BigInt::from(p), BigInt::from(d))),
                )
            })
            .collect();
        let Some(q) = specialize(forms, &point) else {
            continue;
        };
        runs.push(exact(q));
    }
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for r in runs.iter().flatten() {
        *counts.entry(r.0.case.label()).or_default() += 1;
    }
    let Some((&label, &agreeing)) = counts.iter().max_by_key(|(_, n)| **n) else {
        // Every sample failed; surface the first error.
        return Err(runs
            .into_iter()
            .find_map(Result::err)
            .unwrap_or(ClassifyError::NoSamplePoint));
    };
    let n = runs.len();
    let (result, relations) = runs
        .into_iter()
        .flatten()
        .find(|r| r.0.case.label() == label)
        .expect("counted sample");
    Ok(SymbolReport {
        case: result.case,
        certainty: Certainty::Probabilistic,
        result,
        relations,
        samples: n,
        agreeing,
    })
}
