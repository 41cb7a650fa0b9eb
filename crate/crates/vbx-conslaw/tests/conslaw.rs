use std::collections::BTreeMap;
use vbx_conslaw::*;
use vbx_expr::{parse, Expr, ZeroVerdict};
use vbx_forms::{d_h, d_v_function, verdict, BiForm};
use vbx_jet::{Manifold, SystemSpec, TotalVectorField};
use vbx_laplace::{linearize, LinearizedSystem};

fn manifold(name: &str) -> Manifold {
    let path = format!("{}/../../systems/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Manifold::new(SystemSpec::from_json(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn lin(m: &Manifold) -> LinearizedSystem {
    linearize(m, &Expr::one(), &m.policy(0)).unwrap()
}

fn s(i: u8) -> BiForm {
    BiForm::sigma(i)
}

fn th(i: u8, k: u8) -> BiForm {
    BiForm::theta_pure(i, k)
}

fn holds(m: &Manifold, w: &BiForm) -> bool {
    verdict(m, w, &m.policy(3)).unwrap().holds()
}

fn kt_triple() -> RhoTriple {
    RhoTriple::functions(p("exp(x1+x2)"), p("exp(x1+x3)"), p("exp(x2+x3)"))
}

#[test]
fn psi_examples() {
    let m = manifold("kt");
    let l = lin(&m);
    let rho = BiForm::function(p("exp(x1+x2)"));
    let w = psi(&m, &l, &rho, (1, 2), PsiVariant::Published).unwrap();
    let xi = |j: u8| &th(j, 1) + &BiForm::theta();
    let expected = (&s(1).wedge(&s(3)).wedge(&xi(1)) + &s(2).wedge(&s(3)).wedge(&xi(2)))
        .scale(&p("exp(x1+x2)/2"));
    assert!(holds(&m, &(&w - &expected)), "{w}");
    let zero = psi(
        &m,
        &l,
        &BiForm::function(Expr::zero()),
        (1, 2),
        PsiVariant::Green,
    )
    .unwrap();
    assert!(zero.is_zero());
    let w2 = psi(&m, &l, &BiForm::theta(), (1, 3), PsiVariant::Green).unwrap();
    assert_eq!(w2.bidegree(), (2, 2));
}

#[test]
fn green_psi_on_kt_pairs_xi_with_sigma() {
    // nu_1 ^ P_1 + nu_2 ^ P_2 = 1/2 rho (s2 ^ s3 ^ xi_2 - s1 ^ s3 ^ xi_1) for A = 1.
    let m = manifold("kt");
    let l = lin(&m);
    let w = psi(
        &m,
        &l,
        &BiForm::function(p("exp(x1+x2)")),
        (1, 2),
        PsiVariant::Green,
    )
    .unwrap();
    let xi = |j: u8| &th(j, 1) + &BiForm::theta();
    let expected = (&s(2).wedge(&s(3)).wedge(&xi(2)) - &s(1).wedge(&s(3)).wedge(&xi(1)))
        .scale(&p("exp(x1+x2)/2"));
    assert!(holds(&m, &(&w - &expected)), "{w}");
}

#[test]
fn kt_triple_gives_closed_law() {
    let m = manifold("kt");
    let l = lin(&m);
    for variant in [PsiVariant::Green, PsiVariant::Published] {
        let r = conslaw_from_rho(&m, &l, &kt_triple(), variant, &m.policy(0)).unwrap();
        assert_eq!(r.adjoint_verdict, ZeroVerdict::Zero);
        assert!(r.law.closed(), "{:?}", variant);
        assert!(r.closed());
        assert_eq!(r.law.form.bidegree(), (2, 1));
        assert_eq!(r.law.adapted_order, 1);
    }
}

#[test]
fn zero_triple_is_trivially_closed() {
    let m = manifold("kt");
    let t = RhoTriple::functions(Expr::zero(), Expr::zero(), Expr::zero());
    let r = conslaw_from_rho(&m, &lin(&m), &t, PsiVariant::Green, &m.policy(0)).unwrap();
    assert!(r.law.form.is_zero());
    assert_eq!(r.law.closure, ZeroVerdict::Zero);
}

#[test]
fn non_adjoint_rho_fails_closure() {
    let m = manifold("kt");
    let t = RhoTriple::functions(p("x1"), Expr::zero(), Expr::zero());
    let r = conslaw_from_rho(&m, &lin(&m), &t, PsiVariant::Green, &m.policy(0)).unwrap();
    assert!(r.adjoint_verdict.is_nonzero());
    assert!(r.law.closure.is_nonzero());
    assert!(!r.closed());
    // The printed map is d_H-exact for every rho, so it cannot detect this.
    let r = conslaw_from_rho(&m, &lin(&m), &t, PsiVariant::Published, &m.policy(0)).unwrap();
    assert!(r.law.closed() && !r.closed());
}

#[test]
fn published_psi_is_exact() {
    // Psi_12(rho) = 1/2 d_H(sigma_3 ^ rho Theta).
    let m = manifold("cubic");
    let l = lin(&m);
    let rho = BiForm::function(p("x1*u2 + u"));
    let w = psi(&m, &l, &rho, (1, 2), PsiVariant::Published).unwrap();
    let g = s(3)
        .wedge(&rho.wedge(l.contact().unwrap()))
        .scale(&p("1/2"));
    assert!(holds(&m, &(&w - &d_h(&m, &g).unwrap())));
}

#[test]
fn verify_closed_examples() {
    let m = manifold("liouville");
    let classical = s(1).scale(&p("u11 - u1^2/2"));
    assert_eq!(
        verify_closed(&m, &classical, &m.policy(0)).unwrap(),
        ZeroVerdict::Zero
    );
    let contact = (&th(1, 2) - &th(1, 1).scale(&p("u1"))).wedge(&s(1));
    assert_eq!(
        verify_closed(&m, &contact, &m.policy(0)).unwrap(),
        ZeroVerdict::Zero
    );
    let c = manifold("cubic");
    let bad = BiForm::theta().wedge(&s(1));
    assert!(verify_closed(&c, &bad, &c.policy(0)).unwrap().is_nonzero());
    assert!(matches!(
        verify_closed(&c, &BiForm::theta(), &c.policy(0)),
        Err(ConslawError::Bidegree { .. })
    ));
    let top = s(1).wedge(&s(2)).wedge(&s(3));
    assert!(ConservationLaw::check(&c, top, BTreeMap::new(), &c.policy(0)).is_err());
}

#[test]
fn relative_invariance_examples() {
    let m = manifold("kt");
    let xi3 = &th(3, 1) + &BiForm::theta();
    let lambda = is_relative_invariant(&m, &xi3, &TotalVectorField::d(1), &m.policy(0)).unwrap();
    assert_eq!(lambda, Some(p("-1")));
    let l = manifold("liouville");
    let w = d_v_function(&l, &p("u22 - u2^2/2")).unwrap();
    let lambda = is_relative_invariant(&l, &w, &TotalVectorField::d(1), &l.policy(0)).unwrap();
    assert_eq!(lambda, Some(Expr::zero()));
    let c = manifold("cubic");
    assert_eq!(
        is_relative_invariant(&c, &BiForm::theta(), &TotalVectorField::d(1), &c.policy(0)).unwrap(),
        None
    );
}

fn liouville_bundle(it: &str) -> InvariantBundle {
    InvariantBundle {
        pair: [p("x2"), p(it)],
        pair_fields: vec![1],
        quad: vec![p("x1"), p("u11 - u1^2/2")],
        quad_fields: vec![2],
    }
}

#[test]
fn darboux_examples() {
    let m = manifold("liouville");
    let r = darboux_check(&m, &liouville_bundle("u22 - u2^2/2"), &m.policy(0)).unwrap();
    assert!(r.pass(), "{r:?}");
    let r = darboux_check(&m, &liouville_bundle("2*x2"), &m.policy(0)).unwrap();
    assert!(r.invariance.iter().all(|row| row.verdict.holds()));
    assert!(!r.independence_holds() && !r.pass());
    let mut b = liouville_bundle("u22 - u2^2/2");
    b.quad[0] = p("u");
    let r = darboux_check(&m, &b, &m.policy(0)).unwrap();
    assert!(!r.pass());
    assert!(r
        .invariance
        .iter()
        .any(|row| row.label == "X2(J) = 0" && row.verdict.is_nonzero()));
}

#[test]
fn darboux_bundle_for_three_equations() {
    let m = manifold("exp3");
    let b = InvariantBundle {
        pair: [p("x3"), p("u3*exp(-u)")],
        pair_fields: vec![1, 2],
        quad: vec![p("x1"), p("u1*exp(-u)"), p("x2"), p("u2*exp(-u)")],
        quad_fields: vec![3],
    };
    assert!(darboux_check(&m, &b, &m.policy(0)).unwrap().pass());
    let bad = InvariantBundle {
        quad_fields: vec![1],
        ..b
    };
    assert!(darboux_check(&m, &bad, &m.policy(0)).is_err());
}

#[test]
fn rescaling_examples() {
    let m = manifold("kt");
    let d: Vec<TotalVectorField> = (1..=3).map(TotalVectorField::d).collect();
    let r =
        rescale_characteristics(&m, &d, (1, 2, 3), &p("x3"), &p("x1 + x2"), &m.policy(0)).unwrap();
    assert_eq!(r.fields, d);
    assert!(r.pass());
    let mut fields = d.clone();
    fields[2] = TotalVectorField::d(3).scale(&p("1 + x1^2"));
    let before = TotalVectorField::commutator(&m, &fields[0], &fields[2]).unwrap();
    assert!(!before.is_zero());
    let r = rescale_characteristics(
        &m,
        &fields,
        (1, 2, 3),
        &p("x3"),
        &p("x1 + x2"),
        &m.policy(0),
    )
    .unwrap();
    assert!(
        r.commutators.iter().all(|c| c.verdict == ZeroVerdict::Zero),
        "{:?}",
        r.commutators
    );
    let err =
        rescale_characteristics(&m, &d, (1, 2, 3), &p("x3"), &p("x2"), &m.policy(0)).unwrap_err();
    assert!(matches!(err, ConslawError::Hypothesis { .. }));
}

#[test]
fn invariant_contact_forms() {
    let m = manifold("exp3");
    let two = InvariantKind::TwoFn {
        fields: vec![1, 2],
        l: 3,
        inv_i: p("u3*exp(-u)"),
        inv_j: p("x3"),
    };
    let f = invariant_contact_form(&m, &two, &m.policy(0)).unwrap();
    assert!(f.pass() && !f.form.is_zero());
    let constant = InvariantKind::TwoFn {
        fields: vec![1, 2],
        l: 3,
        inv_i: p("5"),
        inv_j: p("x3"),
    };
    assert!(invariant_contact_form(&m, &constant, &m.policy(0))
        .unwrap()
        .form
        .is_zero());
    let (ii, jj, kk) = (p("x1"), p("x2"), p("u1*exp(-u) + u2*exp(-u)"));
    let three = InvariantKind::ThreeFn {
        i: 1,
        j: 2,
        l: 3,
        inv_i: ii.clone(),
        inv_j: jj.clone(),
        inv_k: kk.clone(),
    };
    let f = invariant_contact_form(&m, &three, &m.policy(0)).unwrap();
    assert!(f.pass());
    let expected = BiForm::sum(
        0,
        1,
        &[
            d_v_function(&m, &kk).unwrap(),
            d_v_function(&m, &ii)
                .unwrap()
                .scale(&-m.total(&kk, 1).unwrap()),
            d_v_function(&m, &jj)
                .unwrap()
                .scale(&-m.total(&kk, 2).unwrap()),
        ],
    );
    assert_eq!(f.form, expected);
    let bad = InvariantKind::TwoFn {
        fields: vec![1, 2],
        l: 3,
        inv_i: p("u"),
        inv_j: p("x3"),
    };
    assert!(matches!(
        invariant_contact_form(&m, &bad, &m.policy(0)),
        Err(ConslawError::Hypothesis { .. })
    ));
}

#[test]
fn invariant_sequences() {
    let m = manifold("liouville");
    let seq = invariant_sequence(
        &m,
        &p("u22 - u2^2/2"),
        &p("x2"),
        &TotalVectorField::d(2),
        3,
        &m.policy(0),
    )
    .unwrap();
    assert_eq!(seq.alphas.len(), 3);
    assert_eq!(seq.alphas[0], d_v_function(&m, &p("u22 - u2^2/2")).unwrap());
    assert_eq!(seq.residuals.len(), 4);
    assert!(seq.pass(), "{:?}", seq.residuals);
    let one = invariant_sequence(
        &m,
        &p("u22 - u2^2/2"),
        &p("x2"),
        &TotalVectorField::d(2),
        1,
        &m.policy(0),
    )
    .unwrap();
    assert!(one.residuals.is_empty());
    let lin = manifold("decoupled");
    let seq = invariant_sequence(
        &lin,
        &p("u3^2 + x3*u33"),
        &p("x3"),
        &TotalVectorField::d(3),
        3,
        &lin.policy(0),
    )
    .unwrap();
    assert!(seq.pass());
    assert!(invariant_sequence(
        &m,
        &p("u22"),
        &p("x1"),
        &TotalVectorField::d(2),
        2,
        &m.policy(0)
    )
    .is_err());
}

fn one_s(
    l: u8,
    s: u8,
    k: usize,
    inv: &str,
    tilde: &str,
    eta: Vec<usize>,
    coeff: &str,
) -> Generator {
    Generator::OneS(OneS {
        l,
        s,
        k,
        inv: p(inv),
        tilde: p(tilde),
        fields: Vec::new(),
        eta,
        eta_coeff: p(coeff),
    })
}

#[test]
fn generated_one_s_laws() {
    let m = manifold("liouville");
    let law = generate_cl(
        &m,
        &one_s(1, 0, 1, "u11 - u1^2/2", "x1", vec![], "1"),
        &m.policy(0),
    )
    .unwrap();
    assert_eq!(law.form, s(1).scale(&p("u11 - u1^2/2")));
    assert!(law.closed());
    let law = generate_cl(
        &m,
        &one_s(1, 1, 1, "u11 - u1^2/2", "x1", vec![], "1"),
        &m.policy(0),
    )
    .unwrap();
    assert_eq!(
        law.form,
        s(1).wedge(&d_v_function(&m, &p("u11 - u1^2/2")).unwrap())
    );
    assert!(law.closed());
    assert_eq!(law.adapted_order, 2);
    let e = manifold("exp3");
    let law = generate_cl(
        &e,
        &one_s(3, 2, 2, "u3*exp(-u)", "x3", vec![], "1"),
        &e.policy(0),
    )
    .unwrap();
    assert_eq!(law.form.bidegree(), (1, 2));
    assert!(law.closed() && !law.form.is_zero());
    let law = generate_cl(
        &e,
        &one_s(3, 3, 2, "u3*exp(-u)", "x3", vec![1], "x3"),
        &e.policy(0),
    )
    .unwrap();
    assert!(law.closed() && law.form.bidegree() == (1, 3));
    let zero = generate_cl(
        &e,
        &one_s(3, 2, 2, "u3*exp(-u)", "x3", vec![], "0"),
        &e.policy(0),
    )
    .unwrap();
    assert!(zero.form.is_zero() && zero.closed());
    let err = generate_cl(&e, &one_s(3, 1, 1, "u", "x3", vec![], "1"), &e.policy(0)).unwrap_err();
    assert!(matches!(err, ConslawError::Hypothesis { .. }));
}

#[test]
fn generated_two_s_laws() {
    let m = manifold("exp3");
    let g = |s: u8, k: usize, eta: Vec<usize>| {
        Generator::TwoS(TwoS {
            i: 1,
            j: 2,
            l: 3,
            s,
            k,
            a: p("x1"),
            b: p("x2"),
            inv_j: p("u1*exp(-u)"),
            inv_k: p("u2*exp(-u)"),
            eta1: eta.clone(),
            eta2: eta,
            eta_coeff: Expr::one(),
        })
    };
    for (s, k, eta) in [(1, 1, vec![]), (2, 1, vec![]), (3, 2, vec![1])] {
        let law = generate_cl(&m, &g(s, k, eta), &m.policy(0)).unwrap();
        assert_eq!(law.form.bidegree(), (2, s));
        assert!(!law.form.is_zero());
        assert!(law.closed(), "s = {s}");
    }
    let mut bad = g(2, 1, vec![]);
    if let Generator::TwoS(t) = &mut bad {
        t.inv_j = p("u3");
    }
    assert!(generate_cl(&m, &bad, &m.policy(0)).is_err());
}

#[test]
fn json_inputs() {
    let t =
        RhoTriple::from_json(r#"{"rho12":"exp(x1+x2)","rho13":"exp(x1+x3)","rho23":"exp(x2+x3)"}"#)
            .unwrap();
    assert_eq!(t, kt_triple());
    let t = RhoTriple::from_json(
        r#"{"s":2,"rho12":{"type":[0,1],"terms":[{"monomial":["th"],"coeff":"1"}]}}"#,
    )
    .unwrap();
    assert_eq!(t.get(1, 2), &BiForm::theta());
    for bad in [
        r#"{"rho12":"u1 +"}"#,
        r#"{"s":2,"rho12":"x1"}"#,
        r#"{"rho21":"x1"}"#,
        r#"[]"#,
        r#"{"s":0}"#,
    ] {
        assert!(RhoTriple::from_json(bad).is_err(), "{bad}");
    }
    let b = InvariantBundle::from_json(
        r#"{"I":"x2","It":"u22-u2^2/2","J":"x1","Jt":"u11-u1^2/2","pair_fields":[1],"quad_fields":[2]}"#,
        2,
    )
    .unwrap();
    assert_eq!(b, liouville_bundle("u22 - u2^2/2"));
    let g =
        Generator::from_json("1s", r#"{"l":1,"s":1,"k":1,"I":"u11-u1^2/2","It":"x1"}"#, 2).unwrap();
    assert_eq!(g, one_s(1, 1, 1, "u11 - u1^2/2", "x1", vec![], "1"));
    assert!(Generator::from_json("3s", "{}", 3).is_err());
    assert!(Generator::from_json("2s", r#"{"i":1}"#, 3).is_err());
}

#[test]
fn law_report_layout() {
    let m = manifold("kt");
    let r = conslaw_from_rho(&m, &lin(&m), &kt_triple(), PsiVariant::Green, &m.policy(0)).unwrap();
    let v = r.law.to_value();
    assert_eq!(v["type"], serde_json::json!([2, 1]));
    assert_eq!(v["closure"], "zero");
    assert_eq!(v["adapted_order"], 1);
    assert_eq!(v["provenance"]["psi"], "green");
    assert!(v["form"]["terms"].is_array());
}
