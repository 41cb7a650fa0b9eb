//! Route independence of reduction and commutation of total derivatives.

use vbx_expr::{parse, Expr};
use vbx_jet::*;

fn manifold(name: &str) -> Manifold {
    let path = format!("{}/../../systems/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Manifold::new(SystemSpec::from_json(&std::fs::read_to_string(path).unwrap()).unwrap())
}

/// Sorted multi-indices over `1..=n` of length `len` with at least two distinct entries.
fn mixed(n: u8, len: usize) -> Vec<Vec<u8>> {
    fn rec(n: u8, len: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            if cur.iter().any(|&i| i != cur[0]) {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(n, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len, 1, &mut Vec::new(), &mut out);
    out
}

fn routes_agree(name: &str, max_len: usize) {
    let m = manifold(name);
    let pol = m.policy(3);
    for len in 3..=max_len {
        for idx in mixed(m.n(), len) {
            let routes = m.reduction_routes(&idx).unwrap();
            let (_, first) = &routes[0];
            for (route, e) in &routes[1..] {
                let v = m.verdict(&(e - first), &pol).unwrap();
                assert!(v.holds(), "{name} u{idx:?} route {route}: {v:?}");
            }
        }
    }
}

#[test]
fn reduction_routes_agree_kt_to_order_5() {
    routes_agree("kt", 5);
}

#[test]
fn reduction_routes_agree_cubic_to_order_5() {
    routes_agree("cubic", 5);
}

#[test]
fn reduction_routes_agree_euler3_to_order_4() {
    routes_agree("euler3", 4);
}

#[test]
fn total_derivatives_commute_on_test_functions() {
    let m = manifold("cubic");
    let pol = m.policy(5);
    let funcs = [
        "u*u1",
        "u11*u2/(u+1)",
        "exp(x1)*u3",
        "u22*u33",
        "x2*u1^2 + u",
    ];
    for f in funcs {
        let e: Expr = parse(f).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let a = m.total(&m.total(&e, i).unwrap(), j).unwrap();
            let b = m.total(&m.total(&e, j).unwrap(), i).unwrap();
            assert!(m.verdict(&(a - b), &pol).unwrap().holds(), "{f} D{i}D{j}");
        }
    }
}
