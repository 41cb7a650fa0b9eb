//! Structure-equation and bracket-congruence oracles for the adapted coframe.

use crate::coframe::{adapted_name, AdaptedCoframe, CoframeError};
use std::collections::BTreeMap;
use vbx_expr::{Expr, Policy, ZeroVerdict};
use vbx_forms::{d_h, lie_d, verdict, BasisOneForm, BiForm};
use vbx_jet::Manifold;
use vbx_laplace::{LaplaceError, LinearizedSystem};

/// Which coframe a `sigma_m` row of `d_H xi_j^n` is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readings {
    /// Branch `j` seeded with `i(j) = m`, the choice the row's coefficients refer to.
    Matching,
    /// One coframe with the default choices for every row.
    Fixed,
}

#[derive(Debug, Clone)]
pub struct StructureRow {
    pub label: String,
    /// Seed index `i(j)` of the branch the row was read in.
    pub reading: Option<u8>,
    /// Labels dropped before the zero test (congruence rows).
    pub modulo: Vec<BasisOneForm>,
    pub actual: BiForm,
    pub claimed: BiForm,
    pub verdict: ZeroVerdict,
}

impl StructureRow {
    /// `actual - claimed` with the labels in `modulo` dropped.
    pub fn residual(&self) -> BiForm {
        project(&(&self.actual - &self.claimed), &self.modulo)
    }
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub rows: Vec<StructureRow>,
}

impl StructureReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict.holds())
    }

    pub fn failures(&self) -> impl Iterator<Item = &StructureRow> {
        self.rows.iter().filter(|r| !r.verdict.holds())
    }
}

#[derive(Debug, Clone)]
pub struct BracketRow {
    pub label: String,
    /// `(dual field, computed component, stated component, verdict)`.
    pub components: Vec<(String, Expr, Expr, ZeroVerdict)>,
    pub verdict: ZeroVerdict,
}

fn project(w: &BiForm, modulo: &[BasisOneForm]) -> BiForm {
    BiForm::from_terms(
        w.r(),
        w.s(),
        w.terms()
            .iter()
            .filter(|(m, _)| !m.iter().any(|b| modulo.contains(b)))
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

fn label(j: u8, n: usize) -> BasisOneForm {
    BasisOneForm::theta(j, n as u8)
}

fn e(j: u8, n: usize) -> BiForm {
    BiForm::basis(label(j, n))
}

struct Coframes<'a> {
    m: &'a Manifold,
    lin: &'a LinearizedSystem,
    order: usize,
    policy: &'a Policy,
    cache: BTreeMap<Vec<(u8, u8)>, AdaptedCoframe>,
}

impl Coframes<'_> {
    fn get(&mut self, choices: &[(u8, u8)]) -> Result<&AdaptedCoframe, CoframeError> {
        let key = choices.to_vec();
        if !self.cache.contains_key(&key) {
            let map: BTreeMap<u8, u8> = choices.iter().copied().collect();
            let cf = AdaptedCoframe::build_with(self.m, self.lin, self.order, &map, self.policy)?;
            self.cache.insert(key.clone(), cf);
        }
        Ok(&self.cache[&key])
    }
}

fn row_verdict(
    m: &Manifold,
    actual: &BiForm,
    claimed: &BiForm,
    modulo: &[BasisOneForm],
    policy: &Policy,
) -> Result<ZeroVerdict, CoframeError> {
    Ok(verdict(m, &project(&(actual - claimed), modulo), policy)?)
}

/// Compare `d_H` of `Theta` and of `xi_j^n` (`n <= n_max`) with the closed structure equations.
pub fn structure_check(
    m: &Manifold,
    lin: &LinearizedSystem,
    n_max: usize,
    readings: Readings,
    policy: &Policy,
) -> Result<StructureReport, CoframeError> {
    let mut frames = Coframes {
        m,
        lin,
        order: n_max + 1,
        policy,
        cache: BTreeMap::new(),
    };
    let n = lin.n();
    let mut rows = Vec::new();
    {
        let cf = frames.get(&[])?;
        let actual = cf.to_adapted(&d_h(m, cf.theta())?)?;
        let mut parts = Vec::new();
        for j in 1..=n {
            let shift = &cf.branch(j).shifts[0];
            parts.push(BiForm::sigma(j).wedge(&(&e(j, 1) - &BiForm::theta().scale(shift))));
        }
        let claimed = BiForm::sum(1, 1, &parts);
        let verdict = row_verdict(m, &actual, &claimed, &[], policy)?;
        rows.push(StructureRow {
            label: "dH Th".into(),
            reading: None,
            modulo: vec![],
            actual,
            claimed,
            verdict,
        });
    }
    for j in 1..=n {
        for level in 1..=n_max {
            for s in 1..=n {
                let matching = if s == j { vec![] } else { vec![(j, s)] };
                let data = frames.get(&matching)?.branch(j).clone();
                let cf = match readings {
                    Readings::Matching => frames.get(&matching)?,
                    Readings::Fixed => frames.get(&[])?,
                };
                let actual = cf.to_adapted(&lie_d(m, s, cf.element(j, level))?)?;
                let mut modulo = Vec::new();
                let claimed = if s == j {
                    let br = cf.branch(j);
                    &e(j, level + 1) - &e(j, level).scale(&br.shifts[level])
                } else {
                    match data.index {
                        Some(p) if level > p + 1 => {
                            modulo = (p + 1..level).map(|q| label(j, q)).collect();
                            e(j, level).scale(&-data.cascade[p].a(j, s))
                        }
                        _ => {
                            let sys = &data.cascade[level - 1];
                            let h = sys.h(m, s, j).map_err(CoframeError::from)?;
                            &e(j, level - 1).scale(&h) - &e(j, level).scale(sys.a(j, s))
                        }
                    }
                };
                let verdict = row_verdict(m, &actual, &claimed, &modulo, policy)?;
                rows.push(StructureRow {
                    label: format!("dH {} [s{s}]", adapted_name(&label(j, level))),
                    reading: Some(cf.branch(j).i),
                    modulo,
                    actual,
                    claimed,
                    verdict,
                });
            }
        }
    }
    Ok(StructureReport { rows })
}

/// The congruences for `[X_i, U]` and `[X_i, V_i^1]` modulo the total fields, read through
/// `omega([X, V]) = -(X omega)(V)` on every coframe element of order below `order`.
pub fn bracket_check(
    m: &Manifold,
    lin: &LinearizedSystem,
    i: u8,
    order: usize,
    policy: &Policy,
) -> Result<Vec<BracketRow>, CoframeError> {
    let order = order.max(2);
    let choices: BTreeMap<u8, u8> = (1..=lin.n()).filter(|&j| j != i).map(|j| (j, i)).collect();
    let cf = AdaptedCoframe::build_with(m, lin, order, &choices, policy)?;
    let mut images = Vec::new();
    for (b, w) in cf.elements() {
        let BasisOneForm::Theta { order: o, .. } = b else {
            continue;
        };
        if (o as usize) < order {
            images.push((b, cf.to_adapted(&lie_d(m, i, w)?)?));
        }
    }
    let dual_name = |b: &BasisOneForm| match b {
        BasisOneForm::Theta { order: 0, .. } => "U".to_string(),
        BasisOneForm::Theta { branch, order } => format!("V{branch}^{order}"),
        BasisOneForm::Sigma(_) => unreachable!(),
    };
    let mut rows = Vec::new();
    for (name, field) in [
        (format!("[X{i},U]"), BasisOneForm::THETA),
        (format!("[X{i},V{i}^1]"), label(i, 1)),
    ] {
        let mut components = Vec::new();
        let mut total = ZeroVerdict::Zero;
        for (b, img) in &images {
            let got = -img.coefficient(&[field]);
            let stated = match (field == BasisOneForm::THETA, b) {
                (true, BasisOneForm::Theta { order: 0, .. }) => cf.branch(i).shifts[0].clone(),
                (true, BasisOneForm::Theta { branch, order: 1 }) if *branch != i => {
                    -lin.h(m, i, *branch).map_err(CoframeError::from)?
                }
                (false, BasisOneForm::Theta { order: 0, .. }) => Expr::int(-1),
                (false, BasisOneForm::Theta { branch, order: 1 }) if *branch == i => {
                    cf.branch(i).shifts[1].clone()
                }
                _ => Expr::zero(),
            };
            let v = m
                .verdict(&(&got - &stated), policy)
                .map_err(LaplaceError::from)?;
            total = total.and(v.clone());
            components.push((dual_name(b), got, stated, v));
        }
        rows.push(BracketRow {
            label: name,
            components,
            verdict: total,
        });
    }
    Ok(rows)
}
