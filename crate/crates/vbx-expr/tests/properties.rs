//! Randomized checks of the normal form against a direct floating-point oracle.

use proptest::prelude::*;
use vbx_expr::*;

const VARS: [&str; 6] = ["x1", "x2", "u", "u1", "u2", "u11"];

#[derive(Debug, Clone)]
enum T {
    C(i64, i64),
    V(usize),
    Add(Box<T>, Box<T>),
    Sub(Box<T>, Box<T>),
    Mul(Box<T>, Box<T>),
    Div(Box<T>, Box<T>),
    Pow(Box<T>, i32),
    Exp(Box<T>),
    Sin(Box<T>),
    Log(Box<T>),
    Sqrt(Box<T>),
}

fn tree(transcendental: bool) -> impl Strategy<Value = T> {
    let leaf = prop_oneof![
        (-4i64..5, 1i64..4).prop_map(|(p, q)| T::C(p, q)),
        (0..VARS.len()).prop_map(T::V),
        (0..VARS.len()).prop_map(T::V),
    ];
    leaf.prop_recursive(4, 40, 3, move |inner| {
        let mut v: Vec<BoxedStrategy<T>> = vec![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| T::Add(Box::new(a), Box::new(b)))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| T::Sub(Box::new(a), Box::new(b)))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| T::Mul(Box::new(a), Box::new(b)))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| T::Div(Box::new(a), Box::new(b)))
                .boxed(),
            (inner.clone(), -2i32..4)
                .prop_map(|(a, k)| T::Pow(Box::new(a), k))
                .boxed(),
        ];
        if transcendental {
            v.push(inner.clone().prop_map(|a| T::Exp(Box::new(a))).boxed());
            v.push(inner.clone().prop_map(|a| T::Sin(Box::new(a))).boxed());
            v.push(
                (0..VARS.len())
                    .prop_map(|i| T::Log(Box::new(T::V(i))))
                    .boxed(),
            );
            v.push(
                (0..VARS.len())
                    .prop_map(|i| T::Sqrt(Box::new(T::V(i))))
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(v)
    })
}

fn build(t: &T) -> Option<Expr> {
    Some(match t {
        T::C(p, q) => Expr::ratio(*p, *q),
        T::V(i) => parse(VARS[*i]).unwrap(),
        T::Add(a, b) => build(a)? + build(b)?,
        T::Sub(a, b) => build(a)? - build(b)?,
        T::Mul(a, b) => build(a)? * build(b)?,
        T::Div(a, b) => build(a)?.checked_div(&build(b)?)?,
        T::Pow(a, k) => build(a)?.checked_pow_i(*k)?,
        T::Exp(a) => build(a)?.exp(),
        T::Sin(a) => build(a)?.sin(),
        T::Log(a) => build(a)?.log(),
        T::Sqrt(a) => build(a)?.sqrt(),
    })
}

fn oracle(t: &T, pt: &[f64]) -> Option<f64> {
    let v = match t {
        T::C(p, q) => *p as f64 / *q as f64,
        T::V(i) => pt[*i],
        T::Add(a, b) => oracle(a, pt)? + oracle(b, pt)?,
        T::Sub(a, b) => oracle(a, pt)? - oracle(b, pt)?,
        T::Mul(a, b) => oracle(a, pt)? * oracle(b, pt)?,
        T::Div(a, b) => {
            let d = oracle(b, pt)?;
            if d.abs() < 1e-6 {
                return None;
            }
            oracle(a, pt)? / d
        }
        T::Pow(a, k) => {
            let x = oracle(a, pt)?;
            if *k < 0 && x.abs() < 1e-6 {
                return None;
            }
            x.powi(*k)
        }
        T::Exp(a) => oracle(a, pt)?.exp(),
        T::Sin(a) => oracle(a, pt)?.sin(),
        T::Log(a) => {
            let x = oracle(a, pt)?;
            if x <= 0.0 {
                return None;
            }
            x.ln()
        }
        T::Sqrt(a) => {
            let x = oracle(a, pt)?;
            if x < 0.0 {
                return None;
            }
            x.sqrt()
        }
    };
    (v.is_finite() && v.abs() < 1e8).then_some(v)
}

fn point(vals: &[f64]) -> Point {
    VARS.iter()
        .zip(vals)
        .map(|(n, v)| (parse(n).unwrap().as_coord().unwrap().clone(), *v))
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(t in tree(true)) {
        if let Some(e) = build(&t) {
            let back = parse(&e.to_string()).unwrap();
            prop_assert_eq!(&back, &e, "printed {}", e);
        }
    }

    #[test]
    fn normal_form_matches_direct_evaluation(t in tree(true), vals in prop::collection::vec(0.2f64..1.5, 6)) {
        if let (Some(e), Some(want)) = (build(&t), oracle(&t, &vals)) {
            if let Ok(got) = e.eval_at(&point(&vals)) {
                prop_assert!(close(got, want), "{} gave {} vs {}", e, got, want);
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(t in tree(true)) {
        if let Some(e) = build(&t) {
            prop_assert_eq!(Expr::sum(std::slice::from_ref(&e)), e.clone());
            prop_assert_eq!(e.mul(&Expr::one()), e.clone());
            let ex = e.expanded();
            prop_assert_eq!(ex.expanded(), ex);
        }
    }

    #[test]
    fn partial_derivatives_commute(t in tree(true), a in 0..VARS.len(), b in 0..VARS.len()) {
        if let Some(e) = build(&t) {
            let ca = parse(VARS[a]).unwrap().as_coord().unwrap().clone();
            let cb = parse(VARS[b]).unwrap().as_coord().unwrap().clone();
            let d = e.diff(&ca).diff(&cb) - e.diff(&cb).diff(&ca);
            let bounds = SampleBox { default: Interval { lo: 0.2, hi: 1.5, exclude: vec![] }, ..SampleBox::default() };
            let pol = Policy::Sampled(SampleSpec { bounds, ..SampleSpec::default() });
            match is_zero(&d, &pol) {
                Ok(v) => prop_assert!(v.holds(), "{} vs {}", e, d),
                Err(ZeroTestError::SampleCapExceeded { .. }) => {}
                Err(err) => prop_assert!(false, "{err}"),
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference(t in tree(false), i in 0..VARS.len(), vals in prop::collection::vec(0.3f64..1.2, 6)) {
        if let Some(e) = build(&t) {
            let c = parse(VARS[i]).unwrap().as_coord().unwrap().clone();
            let h = 1e-5;
            let mut hi = vals.clone();
            hi[i] += h;
            let mut lo = vals.clone();
            lo[i] -= h;
            if let (Ok(fp), Ok(fm), Ok(d)) = (e.eval_at(&point(&hi)), e.eval_at(&point(&lo)), e.diff(&c).eval_at(&point(&vals))) {
                let fd = (fp - fm) / (2.0 * h);
                if fd.abs() < 1e4 && fp.abs() < 1e4 {
                    prop_assert!((fd - d).abs() <= 1e-4 * (1.0 + d.abs()), "{}: {} vs {}", e, fd, d);
                }
            }
        }
    }

    #[test]
    fn rational_subring_is_decided_exactly(t in tree(false), s in tree(false)) {
        if let (Some(e), Some(f)) = (build(&t), build(&s)) {
            let v = is_zero(&((e.clone() + f.clone()) - f - e), &Policy::default()).unwrap();
            prop_assert_eq!(v, ZeroVerdict::Zero);
            if let Ok(v) = is_zero(&build(&t).unwrap(), &Policy::default()) {
                prop_assert!(!matches!(v, ZeroVerdict::ProbablyZero { .. }), "probabilistic verdict");
            }
        }
    }
}
