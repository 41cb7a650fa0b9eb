//! Quadratic symbol forms, their linear relations and the pencil classification.

use crate::algebra::{det3, nullspace, Poly, Scalar};
use crate::error::ClassifyError;

/// Quadratic form `sum_{i,j} a[i][j] xi^i xi^j` in three variables.
pub type QuadForm<F> = [[F; 3]; 3];
/// Linear form `sum_i c[i] xi^i`.
pub type LinearForm<F> = [F; 3];
/// Triple `(l^1, l^2, l^3)` of linear forms.
pub type Relation<F> = [LinearForm<F>; 3];

/// Exponent triples of the ten cubic monomials, in a fixed order.
pub const CUBIC_MONOMIALS: [[u8; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

fn monomial_index(e: [u8; 3]) -> usize {
    CUBIC_MONOMIALS
        .iter()
        .position(|m| *m == e)
        .expect("cubic exponent")
}

/// Coefficients of `xi^i * M` in the cubic monomial basis.
fn times_variable<F: Scalar>(i: usize, m: &QuadForm<F>) -> [F; 10] {
    let mut out: [F; 10] = std::array::from_fn(|_| F::zero());
    for (a, row) in m.iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            let mut e = [0u8; 3];
            e[i] += 1;
            e[a] += 1;
            e[b] += 1;
            let k = monomial_index(e);
            out[k] = out[k].clone() + c.clone();
        }
    }
    out
}

/// Coefficients of `sum_k l^k M^k` in the cubic monomial basis.
pub fn combine<F: Scalar>(rel: &Relation<F>, forms: &[QuadForm<F>; 3]) -> [F; 10] {
    let mut out: [F; 10] = std::array::from_fn(|_| F::zero());
    for (l, m) in rel.iter().zip(forms) {
        for (i, c) in l.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(times_variable(i, m)) {
                *o = o.clone() + c.clone() * t;
            }
        }
    }
    out
}

/// True when `sum_k l^k M^k` vanishes identically.
pub fn is_relation<F: Scalar>(rel: &Relation<F>, forms: &[QuadForm<F>; 3]) -> bool {
    combine(rel, forms).iter().all(|c| c.is_zero())
}

/// Monomial form `xi^i xi^j` (1-based indices).
pub fn monomial_form<F: Scalar>(i: usize, j: usize) -> QuadForm<F> {
    let mut m: QuadForm<F> = std::array::from_fn(|_| std::array::from_fn(|_| F::zero()));
    m[i - 1][j - 1] = F::one();
    m
}

/// Symbol forms of a system `u_ij = f_ij` in three variables: `xi^1 xi^2`, `xi^2 xi^3`, `xi^1 xi^3`.
pub fn pair_forms<F: Scalar>() -> [QuadForm<F>; 3] {
    [
        monomial_form(1, 2),
        monomial_form(2, 3),
        monomial_form(1, 3),
    ]
}

/// Three symbol forms together with a basis of their linear relations.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolData<F: Scalar> {
    forms: [QuadForm<F>; 3],
    relations: Vec<Relation<F>>,
}

impl<F: Scalar> SymbolData<F> {
    /// Pair forms with a caller-chosen relation basis, each element checked.
    pub fn with_relations(
        forms: [QuadForm<F>; 3],
        relations: Vec<Relation<F>>,
    ) -> Result<Self, ClassifyError> {
        if let Some(k) = relations.iter().position(|r| !is_relation(r, &forms)) {
            return Err(ClassifyError::NotRelation(k));
        }
        Ok(SymbolData { forms, relations })
    }

    pub fn forms(&self) -> &[QuadForm<F>; 3] {
        &self.forms
    }

    pub fn relations(&self) -> &[Relation<F>] {
        &self.relations
    }

    /// Dimension of the relation space.
    pub fn kernel_dim(&self) -> usize {
        self.relations.len()
    }

    /// More than two independent relations: the forms are dependent or share a factor.
    pub fn degenerate(&self) -> bool {
        self.relations.len() > 2
    }
}

/// Kernel of `(l^1, l^2, l^3) -> sum_k l^k M^k`, from nine coefficients into the cubic monomials.
pub fn symbol_relations<F: Scalar>(
    forms: [QuadForm<F>; 3],
) -> Result<SymbolData<F>, ClassifyError> {
    let columns: Vec<[F; 10]> = (0..9)
        .map(|u| times_variable(u % 3, &forms[u / 3]))
        .collect();
    let mat: Vec<Vec<F>> = (0..10)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let relations: Vec<Relation<F>> = nullspace(&mat, 9)
        .into_iter()
        .map(|v| std::array::from_fn(|k| std::array::from_fn(|i| v[3 * k + i].clone())))
        .collect();
    if relations.len() < 2 {
        return Err(ClassifyError::TooFewRelations(relations.len()));
    }
    SymbolData::with_relations(forms, relations)
}

/// Symbol case by root multiplicity pattern of the pencil cubic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// Three simple roots.
    ThreeSimple,
    /// One double and one simple root.
    DoubleSimple,
    /// One triple root.
    Triple,
    /// Determinant identically zero, or more than two relations.
    Degenerate,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::ThreeSimple => "i",
            Case::DoubleSimple => "ii",
            Case::Triple => "iii",
            Case::Degenerate => "iv-v",
        }
    }

    fn from_pattern(p: &[usize]) -> Case {
        match p {
            [1, 1, 1] => Case::ThreeSimple,
            [2, 1] => Case::DoubleSimple,
            [3] => Case::Triple,
            _ => Case::Degenerate,
        }
    }
}

/// Pencil cubic and its case.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult<F: Scalar> {
    /// Coefficients of `det(l + z m)` from `z^0` to `z^3`; empty when no pencil was formed.
    pub cubic: Vec<F>,
    /// Root multiplicities on the projective line, largest first; empty for a zero determinant.
    pub pattern: Vec<usize>,
    /// Multiplicity of the root at `z = infinity`.
    pub infinity: usize,
    pub case: Case,
    pub kernel_dim: usize,
}

/// Classify the pencil spanned by two relations.
pub fn classify_pencil<F: Scalar>(l: &Relation<F>, m: &Relation<F>) -> ClassificationResult<F> {
    let mat: [[Poly<F>; 3]; 3] = std::array::from_fn(|k| {
        std::array::from_fn(|i| Poly::linear(l[k][i].clone(), m[k][i].clone()))
    });
    let det = det3(&mat);
    let cubic: Vec<F> = (0..4).map(|k| det.coeff(k)).collect();
    let Some(deg) = det.degree() else {
        return ClassificationResult {
            cubic,
            pattern: Vec::new(),
            infinity: 0,
            case: Case::Degenerate,
            kernel_dim: 2,
        };
    };
    let infinity = 3 - deg;
    let mut pattern: Vec<usize> = Vec::new();
    for (k, count) in det.multiplicities().iter().enumerate() {
        pattern.extend(std::iter::repeat_n(k + 1, *count));
    }
    if infinity > 0 {
        pattern.push(infinity);
    }
    pattern.sort_unstable_by(|a, b| b.cmp(a));
    let case = Case::from_pattern(&pattern);
    ClassificationResult {
        cubic,
        pattern,
        infinity,
        case,
        kernel_dim: 2,
    }
}

/// Classify symbol data with a two-dimensional relation space.
///
/// A larger relation space has no well-defined pencil and is reported as degenerate.
pub fn classify<F: Scalar>(data: &SymbolData<F>) -> Result<ClassificationResult<F>, ClassifyError> {
    match data.relations() {
        [] | [_] => Err(ClassifyError::TooFewRelations(data.kernel_dim())),
        [l, m] => Ok(classify_pencil(l, m)),
        rs => Ok(ClassificationResult {
            cubic: Vec::new(),
            pattern: Vec::new(),
            infinity: 0,
            case: Case::Degenerate,
            kernel_dim: rs.len(),
        }),
    }
}
