use vbx_expr::{parse, parse_with, Coordinate, Expr, ZeroVerdict};
use vbx_forms::*;
use vbx_jet::{Manifold, SystemSpec, TotalVectorField};

fn manifold(name: &str) -> Manifold {
    let path = format!("{}/../../systems/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Manifold::new(SystemSpec::from_json(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn s(i: u8) -> BiForm {
    BiForm::sigma(i)
}

fn th(i: u8, k: u8) -> BiForm {
    BiForm::theta_pure(i, k)
}

#[test]
fn wedge_rules() {
    assert!(s(1).wedge(&s(1)).is_zero());
    assert_eq!(s(1).wedge(&BiForm::theta()), -BiForm::theta().wedge(&s(1)));
    assert_eq!(BiForm::theta().wedge(&s(1)).wedge(&s(2)).bidegree(), (2, 1));
    let a = s(1).wedge(&th(2, 1));
    let b = s(3);
    assert_eq!(a.wedge(&b), b.wedge(&a));
    assert_eq!(th(1, 1).wedge(&th(1, 2)), -th(1, 2).wedge(&th(1, 1)));
}

#[test]
fn d_h_examples() {
    let m = manifold("cubic");
    let du = d_h(&m, &BiForm::function(Expr::u())).unwrap();
    let expected = BiForm::sum(
        1,
        0,
        &[
            s(1).scale(&p("u1")),
            s(2).scale(&p("u2")),
            s(3).scale(&p("u3")),
        ],
    );
    assert_eq!(du, expected);
    let dth = d_h(&m, &BiForm::theta()).unwrap();
    let expected = BiForm::sum(
        1,
        1,
        &[
            s(1).wedge(&th(1, 1)),
            s(2).wedge(&th(2, 1)),
            s(3).wedge(&th(3, 1)),
        ],
    );
    assert_eq!(dth, expected);
}

#[test]
fn liouville_classical_law_is_closed() {
    let m = manifold("liouville");
    let w = s(1).scale(&parse_with("u11 - 1/2*u1^2", 2).unwrap());
    let dw = d_h(&m, &w).unwrap();
    assert!(dw.is_zero(), "{dw}");
    assert_eq!(verdict(&m, &dw, &m.policy(0)).unwrap(), ZeroVerdict::Zero);
}

#[test]
fn d_v_examples() {
    let m = manifold("cubic");
    assert_eq!(d_v(&m, &BiForm::function(p("u1"))).unwrap(), th(1, 1));
    assert!(d_v(&m, &s(1)).unwrap().is_zero());
    let f = p("u1*u2*(2*u+1)/(u*(u+1))");
    let got = d_v_function(&m, &f).unwrap();
    let expected = BiForm::sum(
        0,
        1,
        &[
            BiForm::theta().scale(&f.diff(&Coordinate::U)),
            th(1, 1).scale(&f.diff(&Coordinate::pure(1, 1))),
            th(2, 1).scale(&f.diff(&Coordinate::pure(2, 1))),
        ],
    );
    assert_eq!(got, expected);
}

#[test]
fn lie_examples() {
    let m = manifold("cubic");
    let x1 = TotalVectorField::d(1);
    assert_eq!(lie(&m, &x1, &BiForm::theta()).unwrap(), th(1, 1));
    let x2 = TotalVectorField::d(2);
    let got = lie(&m, &x2, &th(1, 1)).unwrap();
    assert_eq!(got, d_v_function(&m, m.spec().f(1, 2)).unwrap());
    let lhs = lie(&m, &x1, &d_h(&m, &BiForm::theta()).unwrap()).unwrap();
    let rhs = d_h(&m, &lie(&m, &x1, &BiForm::theta()).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn lie_matches_cartan_formula() {
    let m = manifold("kt");
    let x = TotalVectorField::from_coeffs([(1, p("u1")), (3, p("x2*u"))].into_iter().collect());
    let w = s(1).wedge(&th(2, 1)).scale(&p("u2*x3")) + s(3).wedge(&BiForm::theta()).scale(&p("u"));
    let direct = lie(&m, &x, &w).unwrap();
    let cartan =
        interior_total(&x, &d_h(&m, &w).unwrap()) + d_h(&m, &interior_total(&x, &w)).unwrap();
    assert_eq!(direct, cartan);
}

#[test]
fn interior_examples() {
    let x1 = TotalVectorField::d(1);
    assert_eq!(interior_total(&x1, &s(1)).as_function(), Expr::one());
    assert_eq!(interior_total(&x1, &s(1).wedge(&th(2, 1))), th(2, 1));
    assert!(interior_total(&x1, &s(2).wedge(&th(1, 1))).is_zero());
    let contact_only = interior_vertical(&|_| Expr::one(), &th(2, 1));
    assert_eq!(contact_only.as_function(), Expr::one());
    // V dual to the second factor: theta(V) = 0, xi(V) = 1.
    let xi = BasisOneForm::theta(3, 1);
    let v = move |b: &BasisOneForm| if *b == xi { Expr::one() } else { Expr::zero() };
    let w = BiForm::theta().wedge(&BiForm::basis(xi));
    assert_eq!(interior_vertical(&v, &w), -BiForm::theta());
    let x2 = TotalVectorField::d(2);
    assert_eq!(interior_total(&x2, &s(1).wedge(&s(2))), -s(1));
}

#[test]
fn budget_is_enforced() {
    let spec = manifold("kt").spec().clone();
    let m = Manifold::with_budget(spec, 2);
    assert!(lie(&m, &TotalVectorField::d(1), &th(1, 2)).is_err());
    assert!(lie(&m, &TotalVectorField::d(1), &th(1, 1)).is_ok());
}

#[test]
fn serialization_round_trip() {
    let w = s(1).wedge(&th(2, 2)).scale(&p("u1*exp(x1)"))
        + s(2).wedge(&BiForm::theta()).scale(&p("-1/2"));
    let v = w.to_value();
    assert_eq!(BiForm::from_value(&v, 3).unwrap(), w);
    let bare = serde_json::json!([{"monomial": ["th:1", "s2"], "coeff": "u"}]);
    assert_eq!(
        BiForm::from_value(&bare, 3).unwrap(),
        -s(2).wedge(&th(1, 1)).scale(&p("u"))
    );
    for bad in [
        serde_json::json!([{"monomial": ["s4"], "coeff": "1"}]),
        serde_json::json!([{"monomial": ["s1"], "coeff": "u12"}, {"monomial": ["th"], "coeff": "1"}]),
        serde_json::json!({"type": [1, 0], "terms": [{"monomial": ["th"], "coeff": "1"}]}),
        serde_json::json!([]),
        serde_json::json!([{"monomial": ["s1"], "coeff": "u +"}]),
    ] {
        assert!(BiForm::from_value(&bad, 3).is_err(), "{bad}");
    }
}
