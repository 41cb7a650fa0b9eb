#![allow(dead_code)]

use vbx_classify::{QuadForm, Rational, Relation};

pub fn q(i: i64) -> Rational {
    Rational::from_integer(i.into())
}

/// Quadratic form from `(i, j, c)` terms meaning `c xi^i xi^j`.
pub fn form(terms: &[(usize, usize, i64)]) -> QuadForm<Rational> {
    let mut m: QuadForm<Rational> = std::array::from_fn(|_| std::array::from_fn(|_| q(0)));
    for &(a, b, c) in terms {
        m[a - 1][b - 1] = m[a - 1][b - 1].clone() + q(c);
    }
    m
}

/// Linear forms from integer coefficient rows.
pub fn relation(rows: [[i64; 3]; 3]) -> Relation<Rational> {
    rows.map(|r| r.map(q))
}

/// Representative symbol forms of the five structural classes, indexed 0..5.
pub fn class_forms(k: usize) -> [QuadForm<Rational>; 3] {
    match k {
        0 => [form(&[(1, 2, 1)]), form(&[(1, 3, 1)]), form(&[(2, 3, 1)])],
        1 => [form(&[(1, 1, 1)]), form(&[(1, 3, 1)]), form(&[(2, 3, 1)])],
        2 => [
            form(&[(1, 1, 1)]),
            form(&[(1, 2, 1)]),
            form(&[(1, 3, 1), (2, 2, -1)]),
        ],
        3 => [form(&[(1, 1, 1)]), form(&[(1, 2, 1)]), form(&[(2, 2, 1)])],
        _ => [form(&[(1, 1, 1)]), form(&[(1, 2, 1)]), form(&[(1, 3, 1)])],
    }
}

pub fn det3(p: &[[Rational; 3]; 3]) -> Rational {
    p[0][0].clone() * (p[1][1].clone() * p[2][2].clone() - p[1][2].clone() * p[2][1].clone())
        - p[0][1].clone() * (p[1][0].clone() * p[2][2].clone() - p[1][2].clone() * p[2][0].clone())
        + p[0][2].clone() * (p[1][0].clone() * p[2][1].clone() - p[1][1].clone() * p[2][0].clone())
}

/// Substitute `xi -> P xi` in every form and mix the forms with `G`.
#[allow(clippy::needless_range_loop)]
pub fn transform(
    forms: &[QuadForm<Rational>; 3],
    p: &[[Rational; 3]; 3],
    g: &[[Rational; 3]; 3],
) -> [QuadForm<Rational>; 3] {
    let sub = |a: &QuadForm<Rational>| -> QuadForm<Rational> {
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                let mut s = q(0);
                for i in 0..3 {
                    for j in 0..3 {
                        s += p[i][r].clone() * a[i][j].clone() * p[j][c].clone();
                    }
                }
                s
            })
        })
    };
    let subbed: Vec<QuadForm<Rational>> = forms.iter().map(sub).collect();
    std::array::from_fn(|k| {
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                (0..3).fold(q(0), |s, l| s + g[k][l].clone() * subbed[l][r][c].clone())
            })
        })
    })
}
