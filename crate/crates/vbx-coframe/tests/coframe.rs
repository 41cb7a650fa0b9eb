use std::collections::BTreeMap;
use vbx_coframe::*;
use vbx_expr::{parse, Expr};
use vbx_forms::{d_h, BasisOneForm, BiForm};
use vbx_jet::{Manifold, SystemSpec};
use vbx_laplace::{linearize, LinearizedSystem};

fn manifold(name: &str) -> Manifold {
    let path = format!("{}/../../systems/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Manifold::new(SystemSpec::from_json(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn lin(m: &Manifold, mu: &str) -> LinearizedSystem {
    linearize(m, &p(mu), &m.policy(0)).unwrap()
}

fn th(i: u8, k: u8) -> BiForm {
    BiForm::theta_pure(i, k)
}

#[test]
fn kt_branch_seeds() {
    let m = manifold("kt");
    let cf = AdaptedCoframe::build(&m, &lin(&m, "1"), 3, &m.policy(0)).unwrap();
    for j in 1..=3 {
        assert_eq!(cf.element(j, 1), &(&th(j, 1) + &BiForm::theta()));
        assert_eq!(cf.branch(j).index, Some(0));
    }
    assert_eq!(cf.elements().len(), 10);
}

#[test]
fn cubic_branch_three_seed() {
    let m = manifold("cubic");
    let choices = BTreeMap::from([(3, 1)]);
    let cf = AdaptedCoframe::build_with(&m, &lin(&m, "1"), 2, &choices, &m.policy(0)).unwrap();
    assert_eq!(
        cf.element(3, 1),
        &(&th(3, 1) - &BiForm::theta().scale(&p("u3/(u+1)")))
    );
    assert_eq!(cf.branch(3).i, 1);
    let alt = AdaptedCoframe::build_with(
        &m,
        &lin(&m, "1"),
        2,
        &BTreeMap::from([(3, 2)]),
        &m.policy(0),
    )
    .unwrap();
    // The two seeds differ by (A^2_23 - A^1_13) Theta = H_132 Theta.
    let diff = alt.element(3, 1) - cf.element(3, 1);
    assert_eq!(diff, BiForm::theta().scale(&lin(&m, "1").h3(1, 3, 2)));
}

#[test]
fn characteristic_coframe_examples() {
    let m = manifold("kt");
    let l = lin(&m, "1");
    let ch = characteristic_coframe(&m, &l, 2).unwrap();
    assert_eq!(ch[&1][0], th(1, 1));
    let mut parts = vec![];
    for i in 1..=3 {
        parts.push(BiForm::sigma(i).wedge(&ch[&i][0]));
    }
    assert_eq!(
        d_h(&m, l.contact().unwrap()).unwrap(),
        BiForm::sum(1, 1, &parts)
    );
    let w = manifold("wave");
    let ch = characteristic_coframe(&w, &lin(&w, "exp(x1)"), 1).unwrap();
    assert_eq!(
        ch[&1][0],
        (&th(1, 1) + &BiForm::theta()).scale(&p("exp(x1)"))
    );
}

#[test]
fn triangular_change_of_basis() {
    for (name, mu) in [
        ("cubic", "1"),
        ("euler3", "x1+x2"),
        ("kt", "exp(x3)"),
        ("liouville", "1"),
    ] {
        let m = manifold(name);
        let l = lin(&m, mu);
        let cf = AdaptedCoframe::build(&m, &l, 3, &m.policy(0)).unwrap();
        for (b, w) in cf.elements() {
            let BasisOneForm::Theta { order, .. } = b else {
                unreachable!()
            };
            assert_eq!(
                cf.adapted_order(w).unwrap(),
                order as usize,
                "{name} {}",
                adapted_name(&b)
            );
            assert_eq!(cf.to_adapted(w).unwrap(), BiForm::basis(b));
            assert_eq!(&cf.from_adapted(&BiForm::basis(b)).unwrap(), w);
            if order > 0 {
                assert_eq!(w.coefficient(&[b]), l.mu().clone());
            }
        }
    }
}

#[test]
fn adapted_order_examples() {
    let m = manifold("cubic");
    let cf = AdaptedCoframe::build(&m, &lin(&m, "1"), 3, &m.policy(0)).unwrap();
    assert_eq!(cf.adapted_order(cf.theta()).unwrap(), 0);
    assert_eq!(cf.adapted_order(cf.element(1, 2)).unwrap(), 2);
    assert_eq!(
        cf.adapted_order(&cf.theta().wedge(cf.element(3, 1)))
            .unwrap(),
        1
    );
    assert_eq!(cf.adapted_order(&BiForm::sigma(1)).unwrap(), 0);
    assert!(matches!(
        cf.adapted_order(&th(1, 4)),
        Err(CoframeError::OrderTooHigh {
            needed: 4,
            order: 3
        })
    ));
}

#[test]
fn interior_with_duals() {
    let m = manifold("kt");
    let cf = AdaptedCoframe::build(&m, &lin(&m, "1"), 2, &m.policy(0)).unwrap();
    assert_eq!(
        cf.interior(Dual::U, cf.theta()).unwrap().as_function(),
        Expr::one()
    );
    assert!(cf
        .interior(Dual::V { k: 3, l: 1 }, cf.theta())
        .unwrap()
        .is_zero());
    let w = cf.theta().wedge(cf.element(3, 1));
    let got = cf.interior(Dual::V { k: 3, l: 1 }, &w).unwrap();
    assert_eq!(got, -BiForm::theta());
}

#[test]
fn structure_equations_kt() {
    let m = manifold("kt");
    let l = lin(&m, "1");
    for readings in [Readings::Matching, Readings::Fixed] {
        let r = structure_check(&m, &l, 3, readings, &m.policy(0)).unwrap();
        assert_eq!(r.rows.len(), 1 + 3 * 3 * 3);
        assert!(
            r.pass(),
            "{:?}",
            r.failures().map(|f| f.label.clone()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn structure_equations_cubic() {
    let m = manifold("cubic");
    let l = lin(&m, "1");
    let r = structure_check(&m, &l, 3, Readings::Matching, &m.policy(0)).unwrap();
    assert!(
        r.pass(),
        "{:?}",
        r.failures().map(|f| f.label.clone()).collect::<Vec<_>>()
    );
    let row = r.rows.iter().find(|r| r.label == "dH xi1^1 [s3]").unwrap();
    assert!(row.verdict.holds());
    // In one coframe the off-seed rows pick up H_ijk xi_k^1 terms.
    let fixed = structure_check(&m, &l, 3, Readings::Fixed, &m.policy(0)).unwrap();
    let failing: Vec<_> = fixed.failures().map(|f| f.label.clone()).collect();
    assert!(
        failing.contains(&"dH xi1^1 [s3]".to_string()),
        "{failing:?}"
    );
    assert!(!failing.contains(&"dH xi1^1 [s2]".to_string()));
}

#[test]
fn structure_equations_detect_perturbation() {
    let m = manifold("kt");
    let l = lin(&m, "1");
    let r = structure_check(&m, &l, 1, Readings::Matching, &m.policy(0)).unwrap();
    let row = r.rows.iter().find(|r| r.label == "dH xi1^1 [s2]").unwrap();
    let perturbed = &row.claimed + &BiForm::theta();
    let v = vbx_forms::verdict(&m, &(&row.actual - &perturbed), &m.policy(0)).unwrap();
    assert!(v.is_nonzero());
}

#[test]
fn structure_equations_with_nonzero_invariants() {
    for (name, mu) in [
        ("euler3", "1"),
        ("euler3", "x2*exp(x1)"),
        ("liouville", "1"),
    ] {
        let m = manifold(name);
        let l = lin(&m, mu);
        let r = structure_check(&m, &l, 3, Readings::Matching, &m.policy(0)).unwrap();
        assert!(
            r.pass(),
            "{name}: {:?}",
            r.failures().map(|f| f.label.clone()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn bracket_congruences() {
    for name in ["kt", "cubic", "euler3"] {
        let m = manifold(name);
        let l = lin(&m, "1");
        for i in 1..=3 {
            let rows = bracket_check(&m, &l, i, 3, &m.policy(0)).unwrap();
            assert_eq!(rows.len(), 2);
            for row in &rows {
                assert!(
                    row.verdict.holds(),
                    "{name} {}: {:?}",
                    row.label,
                    row.components
                );
            }
            let v = rows[1].components.iter().find(|c| c.0 == "U").unwrap();
            assert_eq!(v.1, Expr::int(-1));
        }
    }
}
