use crate::linear::{LaplaceError, LinearizedSystem};
use vbx_expr::{Expr, Policy, ZeroVerdict};
use vbx_jet::Manifold;

#[derive(Debug, Clone)]
pub struct RelationRow {
    pub family: u8,
    pub indices: (u8, u8, u8),
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub rows: Vec<RelationRow>,
}

impl CompatibilityReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict.holds())
    }

    pub fn failure(&self) -> Option<&RelationRow> {
        self.rows.iter().find(|r| !r.verdict.holds())
    }
}

/// The three families of integrability relations for every ordered triple `(l, j, k)` of distinct indices.
pub fn compatibility(
    m: &Manifold,
    lin: &LinearizedSystem,
    policy: &Policy,
) -> Result<CompatibilityReport, LaplaceError> {
    if lin.n() != 3 {
        return Err(LaplaceError::NeedsThree("compatibility"));
    }
    let a = |x, y| lin.a(x, y).clone();
    let c = |x, y| lin.c(x, y).clone();
    let mut rows = Vec::new();
    for family in 1..=3u8 {
        for (l, j, k) in [
            (1, 2, 3),
            (1, 3, 2),
            (2, 1, 3),
            (2, 3, 1),
            (3, 1, 2),
            (3, 2, 1),
        ] {
            let residual = match family {
                1 => m.total(&a(l, k), j)? - m.total(&a(l, j), k)?,
                2 => Expr::sum(&[
                    m.total(&a(k, l), j)?,
                    -a(k, l).mul(&a(k, j)),
                    a(l, j).mul(&a(k, l)),
                    a(j, l).mul(&a(k, j)),
                    -c(l, j),
                ]),
                _ => Expr::sum(&[
                    m.total(&c(l, k), j)?,
                    -m.total(&c(l, j), k)?,
                    a(l, j).mul(&c(l, k)),
                    (a(j, l) - a(k, l)).mul(&c(k, j)),
                    -a(l, k).mul(&c(l, j)),
                ]),
            };
            let verdict = m.verdict(&residual, policy)?;
            rows.push(RelationRow {
                family,
                indices: (l, j, k),
                residual,
                verdict,
            });
        }
    }
    Ok(CompatibilityReport { rows })
}
