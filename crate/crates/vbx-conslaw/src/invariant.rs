//! Characteristic invariants: relative invariance, Darboux bundles,
//! rescaled characteristics and invariant contact forms.

use crate::error::ConslawError;
use std::collections::BTreeMap;
use vbx_expr::{Coordinate, Expr, Policy, ZeroVerdict};
use vbx_forms::{d_h, d_v, d_v_function, horizontal_differential, lie, verdict, BiForm};
use vbx_jet::{Manifold, TotalVectorField};

/// A named verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub verdict: ZeroVerdict,
}

fn row(label: impl Into<String>, verdict: ZeroVerdict) -> Row {
    Row {
        label: label.into(),
        verdict,
    }
}

fn all_hold(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.verdict.holds())
}

fn require(rows: &[Row]) -> Result<(), ConslawError> {
    match rows.iter().find(|r| !r.verdict.holds()) {
        Some(r) => Err(ConslawError::Hypothesis {
            what: r.label.clone(),
            verdict: r.verdict.label(),
        }),
        None => Ok(()),
    }
}

/// Verdict on `X_i(f) = target`.
fn value_row(
    m: &Manifold,
    i: u8,
    f: &Expr,
    name: &str,
    target: i64,
    policy: &Policy,
) -> Result<Row, ConslawError> {
    let e = m.total(f, i)? - Expr::int(target);
    Ok(row(
        format!("X{i}({name}) = {target}"),
        m.verdict(&e, policy)?,
    ))
}

/// `lambda` with `X(w) = lambda w` for a `(0, s)` form, if one exists.
///
/// `lambda` is read off the first monomial of `w` and then checked on every
/// monomial of `X(w) - lambda w`. The zero form gives `lambda = 0`.
pub fn is_relative_invariant(
    m: &Manifold,
    w: &BiForm,
    x: &TotalVectorField,
    policy: &Policy,
) -> Result<Option<Expr>, ConslawError> {
    if w.r() != 0 {
        return Err(ConslawError::Bidegree {
            r: w.r(),
            s: w.s(),
            n: m.n(),
        });
    }
    let xw = lie(m, x, w)?;
    let Some((mono, c)) = w.terms().iter().next() else {
        return Ok(Some(Expr::zero()));
    };
    let Some(lambda) = xw.coefficient(mono).checked_div(c) else {
        return Ok(None);
    };
    let residual = &xw - &w.scale(&lambda);
    Ok(if verdict(m, &residual, policy)?.holds() {
        Some(lambda)
    } else {
        None
    })
}

/// Functions `I, It` invariant under `pair_fields` and `J, Jt[, K, Kt]`
/// invariant under `quad_fields`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantBundle {
    pub pair: [Expr; 2],
    pub pair_fields: Vec<u8>,
    pub quad: Vec<Expr>,
    pub quad_fields: Vec<u8>,
}

const PAIR_NAMES: [&str; 2] = ["I", "It"];
const QUAD_NAMES: [&str; 4] = ["J", "Jt", "K", "Kt"];

impl InvariantBundle {
    /// The pair is annihilated by all fields but one and the remaining functions
    /// by that one field; `n = 3` needs four of them and `n = 2` two.
    pub fn validate(&self, n: u8) -> Result<(), ConslawError> {
        let mut fields: Vec<u8> = self
            .pair_fields
            .iter()
            .chain(&self.quad_fields)
            .copied()
            .collect();
        fields.sort_unstable();
        let expected_quad = if n == 3 { 4 } else { 2 };
        let ok = fields == (1..=n).collect::<Vec<_>>()
            && self.quad_fields.len() == 1
            && self.quad.len() == expected_quad;
        if ok {
            Ok(())
        } else {
            Err(ConslawError::Input(format!(
                "bundle must give one field for {expected_quad} functions and the other {} fields for the pair",
                n - 1
            )))
        }
    }
}

/// Invariance rows and independence rows of a Darboux bundle.
#[derive(Debug, Clone)]
pub struct DarbouxReport {
    pub invariance: Vec<Row>,
    /// `(label, minimum numeric rank over the sample points, required rank)`.
    pub independence: Vec<(String, usize, usize)>,
}

impl DarbouxReport {
    pub fn pass(&self) -> bool {
        all_hold(&self.invariance) && self.independence_holds()
    }

    pub fn independence_holds(&self) -> bool {
        self.independence.iter().all(|(_, r, need)| r == need)
    }
}

/// Check every claimed invariance and the independence of `dI ^ dIt` and `dJ ^ dJt [^ dK ^ dKt]`.
pub fn darboux_check(
    m: &Manifold,
    b: &InvariantBundle,
    policy: &Policy,
) -> Result<DarbouxReport, ConslawError> {
    b.validate(m.n())?;
    let mut invariance = Vec::new();
    for (f, name) in b.pair.iter().zip(PAIR_NAMES) {
        for &i in &b.pair_fields {
            invariance.push(value_row(m, i, f, name, 0, policy)?);
        }
    }
    for (f, name) in b.quad.iter().zip(QUAD_NAMES) {
        for &i in &b.quad_fields {
            invariance.push(value_row(m, i, f, name, 0, policy)?);
        }
    }
    let seed = policy.spec().seed;
    let points = policy.spec().points.max(1);
    let pair_rank = min_rank(m, &b.pair, points, seed)?;
    let quad_rank = min_rank(m, &b.quad, points, seed)?;
    let quad_label = QUAD_NAMES[..b.quad.len()]
        .iter()
        .map(|n| format!("d{n}"))
        .collect::<Vec<_>>()
        .join("^");
    Ok(DarbouxReport {
        invariance,
        independence: vec![
            ("dI^dIt".into(), pair_rank, 2),
            (quad_label, quad_rank, b.quad.len()),
        ],
    })
}

/// Minimum numeric rank of the full differentials over sampled jet points.
fn min_rank(m: &Manifold, fs: &[Expr], points: usize, seed: u64) -> Result<usize, ConslawError> {
    let fs: Vec<Expr> = fs.iter().map(|f| m.reduce(f)).collect::<Result<_, _>>()?;
    let coords: Vec<Coordinate> = {
        let mut all: Vec<Coordinate> = fs.iter().flat_map(|f| f.coords()).collect();
        all.sort();
        all.dedup();
        all
    };
    let order = coords.iter().map(|c| c.order()).max().unwrap_or(0);
    let grads: Vec<Vec<Expr>> = fs
        .iter()
        .map(|f| coords.iter().map(|c| f.diff(c)).collect())
        .collect();
    let mut best: Option<usize> = None;
    let mut k = 0u64;
    let mut used = 0;
    while used < points && k < 10 * points as u64 {
        let p = m.sample_point(order, seed.wrapping_add(k))?;
        k += 1;
        let rows: Result<Vec<Vec<f64>>, _> = grads
            .iter()
            .map(|g| {
                g.iter()
                    .map(|e| e.eval(&|c| p.values.get(c).copied()))
                    .collect()
            })
            .collect();
        let Ok(rows) = rows else { continue };
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            continue;
        }
        used += 1;
        let r = numeric_rank(rows);
        best = Some(best.map_or(r, |b| b.min(r)));
    }
    Ok(best.unwrap_or(0))
}

/// Rank by Gaussian elimination with partial pivoting, relative tolerance `1e-9`.
fn numeric_rank(mut a: Vec<Vec<f64>>) -> usize {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-9 * scale;
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) =
            (rank..a.len()).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
        else {
            break;
        };
        if a[piv][col].abs() <= tol {
            continue;
        }
        a.swap(rank, piv);
        for r in rank + 1..a.len() {
            let f = a[r][col] / a[rank][col];
            let pivot = a[rank].clone();
            for (x, p) in a[r].iter_mut().zip(pivot).skip(col) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rescaled characteristic fields with the commutator verdicts.
#[derive(Debug, Clone)]
pub struct Rescaled {
    /// `X~_1, X~_2, X~_3`.
    pub fields: Vec<TotalVectorField>,
    pub commutators: Vec<Row>,
}

impl Rescaled {
    pub fn pass(&self) -> bool {
        all_hold(&self.commutators)
    }
}

/// `X~_i = X_i / X_i(K)`, `X~_l = X_l / X_l(I)`, `X~_j = X_j / X_j(K)`, with
/// `[X~_i, X~_l]` and `[X~_j, X~_l]` checked coefficientwise.
pub fn rescale_characteristics(
    m: &Manifold,
    fields: &[TotalVectorField],
    (i, j, l): (u8, u8, u8),
    inv_i: &Expr,
    inv_k: &Expr,
    policy: &Policy,
) -> Result<Rescaled, ConslawError> {
    if fields.len() != 3 || m.n() != 3 {
        return Err(ConslawError::NeedsThree("rescaling"));
    }
    let mut distinct = [i, j, l];
    distinct.sort_unstable();
    if distinct != [1, 2, 3] {
        return Err(ConslawError::Input(format!(
            "({i},{j},{l}) is not a permutation of 1,2,3"
        )));
    }
    let field = |a: u8| &fields[a as usize - 1];
    let mut out: Vec<TotalVectorField> = fields.to_vec();
    for (a, f, name) in [(i, inv_k, "K"), (l, inv_i, "I"), (j, inv_k, "K")] {
        let d = m.apply(field(a), f)?;
        let v = m.verdict(&d, policy)?;
        if v.holds() {
            return Err(ConslawError::Hypothesis {
                what: format!("X{a}({name}) != 0"),
                verdict: v.label(),
            });
        }
        out[a as usize - 1] = field(a).scale(&d.inv().expect("tested nonzero"));
    }
    let mut commutators = Vec::new();
    for a in [i, j] {
        let c = TotalVectorField::commutator(m, &out[a as usize - 1], &out[l as usize - 1])?;
        let mut v = ZeroVerdict::Zero;
        for e in c.coeffs().values() {
            v = v.and(m.verdict(e, policy)?);
        }
        commutators.push(row(format!("[X~{a}, X~{l}]"), v));
    }
    Ok(Rescaled {
        fields: out,
        commutators,
    })
}

/// The two invariant contact form constructions.
#[derive(Debug, Clone, PartialEq)]
pub enum InvariantKind {
    /// `w = d_V K - X_i(K) d_V I - X_j(K) d_V J` for `X_l`-invariant `I, J, K`
    /// with `X_i(I) = 1`, `X_j(I) = 0`, `X_i(J) = 0`, `X_j(J) = 1`.
    ThreeFn {
        i: u8,
        j: u8,
        l: u8,
        inv_i: Expr,
        inv_j: Expr,
        inv_k: Expr,
    },
    /// `w = d_V I - X_l(I) d_V J` for `I, J` invariant under `fields` with `X_l(J) = 1`.
    TwoFn {
        fields: Vec<u8>,
        l: u8,
        inv_i: Expr,
        inv_j: Expr,
    },
}

/// An invariant contact form with its hypothesis and invariance verdicts.
#[derive(Debug, Clone)]
pub struct InvariantForm {
    pub form: BiForm,
    pub hypotheses: Vec<Row>,
    pub invariance: Vec<Row>,
}

impl InvariantForm {
    pub fn pass(&self) -> bool {
        all_hold(&self.hypotheses) && all_hold(&self.invariance)
    }
}

/// Build the form after checking the hypotheses, then verify `X(w) = 0` for the promised fields.
pub fn invariant_contact_form(
    m: &Manifold,
    kind: &InvariantKind,
    policy: &Policy,
) -> Result<InvariantForm, ConslawError> {
    let mut hyp = Vec::new();
    let (form, promised) = match kind {
        InvariantKind::ThreeFn {
            i,
            j,
            l,
            inv_i,
            inv_j,
            inv_k,
        } => {
            for (f, name) in [(inv_i, "I"), (inv_j, "J"), (inv_k, "K")] {
                hyp.push(value_row(m, *l, f, name, 0, policy)?);
            }
            hyp.push(value_row(m, *i, inv_i, "I", 1, policy)?);
            hyp.push(value_row(m, *j, inv_i, "I", 0, policy)?);
            hyp.push(value_row(m, *i, inv_j, "J", 0, policy)?);
            hyp.push(value_row(m, *j, inv_j, "J", 1, policy)?);
            require(&hyp)?;
            let k1 = m.total(inv_k, *i)?;
            let k2 = m.total(inv_k, *j)?;
            let w = BiForm::sum(
                0,
                1,
                &[
                    d_v_function(m, inv_k)?,
                    d_v_function(m, inv_i)?.scale(&-k1),
                    d_v_function(m, inv_j)?.scale(&-k2),
                ],
            );
            (w, vec![*l])
        }
        InvariantKind::TwoFn {
            fields,
            l,
            inv_i,
            inv_j,
        } => {
            for &a in fields {
                hyp.push(value_row(m, a, inv_i, "I", 0, policy)?);
                hyp.push(value_row(m, a, inv_j, "J", 0, policy)?);
            }
            hyp.push(value_row(m, *l, inv_j, "J", 1, policy)?);
            require(&hyp)?;
            let ip = m.total(inv_i, *l)?;
            let w = &d_v_function(m, inv_i)? - &d_v_function(m, inv_j)?.scale(&ip);
            (w, fields.clone())
        }
    };
    let mut invariance = Vec::new();
    for a in promised {
        let xw = lie(m, &TotalVectorField::d(a), &form)?;
        invariance.push(row(format!("X{a}(w) = 0"), verdict(m, &xw, policy)?));
    }
    Ok(InvariantForm {
        form,
        hypotheses: hyp,
        invariance,
    })
}

/// `alpha_i = d_V I_i - I_{i+1} d_V It` with `I_{i+1} = X(I_i)`.
#[derive(Debug, Clone)]
pub struct InvariantSequence {
    /// `I_1, ..., I_{m+1}`.
    pub functions: Vec<Expr>,
    pub alphas: Vec<BiForm>,
    /// `d(alpha_i) - dIt ^ alpha_{i+1}` split into its `(1, 1)` and `(0, 2)` parts, for `i < m`.
    pub residuals: Vec<Row>,
}

impl InvariantSequence {
    pub fn pass(&self) -> bool {
        all_hold(&self.residuals)
    }
}

/// The sequence `alpha_1, ..., alpha_count` after checking `X(It) = 1`.
pub fn invariant_sequence(
    m: &Manifold,
    inv: &Expr,
    tilde: &Expr,
    x: &TotalVectorField,
    count: usize,
    policy: &Policy,
) -> Result<InvariantSequence, ConslawError> {
    let norm = m.apply(x, tilde)? - Expr::one();
    let v = m.verdict(&norm, policy)?;
    if !v.holds() {
        return Err(ConslawError::Hypothesis {
            what: "X(It) = 1".into(),
            verdict: v.label(),
        });
    }
    let mut functions = vec![m.reduce(inv)?];
    for k in 0..count {
        let next = m.apply(x, &functions[k])?;
        functions.push(next);
    }
    let dv_tilde = d_v_function(m, tilde)?;
    let dh_tilde = horizontal_differential(m, tilde)?;
    let mut alphas = Vec::new();
    for k in 0..count {
        alphas.push(&d_v_function(m, &functions[k])? - &dv_tilde.scale(&functions[k + 1]));
    }
    let mut residuals = Vec::new();
    for k in 0..count.saturating_sub(1) {
        let h = &d_h(m, &alphas[k])? - &dh_tilde.wedge(&alphas[k + 1]);
        let vpart = &d_v(m, &alphas[k])? - &dv_tilde.wedge(&alphas[k + 1]);
        residuals.push(row(
            format!("d alpha{} (1,1)", k + 1),
            verdict(m, &h, policy)?,
        ));
        residuals.push(row(
            format!("d alpha{} (0,2)", k + 1),
            verdict(m, &vpart, policy)?,
        ));
    }
    Ok(InvariantSequence {
        functions,
        alphas,
        residuals,
    })
}

/// Names used in bundle rows, exposed for reports.
pub fn bundle_names(b: &InvariantBundle) -> BTreeMap<&'static str, &Expr> {
    PAIR_NAMES
        .iter()
        .copied()
        .zip(&b.pair)
        .chain(QUAD_NAMES.iter().copied().zip(&b.quad))
        .collect()
}
