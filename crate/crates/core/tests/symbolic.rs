mod common;

use common::*;
use forge_core::poly::{rat, BivariatePoly, HomogeneousPoly};
use forge_core::symbolic::{
    check_unit_jacobian, degeneracy_witness, jacobian_det, jacobian_det_of, qshear_cancellation_trace,
    solve_transport, TransportProblem, WitnessError,
};
use forge_core::{FamilySpec, PolyMap};

fn p(s: &str) -> BivariatePoly {
    s.parse().unwrap()
}

fn form(s: &str) -> HomogeneousPoly {
    HomogeneousPoly::from_poly(p(s)).unwrap()
}

#[test]
fn compositions_keep_unit_jacobian() {
    let mut g = rng(21);
    for i in 0..30 {
        let a = random_triangular(&mut g, 2 + i % 3).build().unwrap();
        let b = random_qshear(&mut g, 2).build().unwrap();
        let ab = PolyMap::new(a.f1.clone(), a.f2.clone()).compose(&b);
        assert!(check_unit_jacobian(&ab));
        assert_eq!(jacobian_det(&ab), p("1"));
    }
}

#[test]
fn jacobian_of_non_family_maps() {
    let f = PolyMap::new(p("x + y^2"), p("y + x"));
    assert_eq!(jacobian_det(&f), p("1 - 2y"));
    assert!(!check_unit_jacobian(&f));
    assert_eq!(jacobian_det_of(&p("x^2"), &p("y^3")), p("6x*y^2"));
    let scaled = PolyMap::new(p("2x"), p("1/2*y + x^3"));
    assert!(check_unit_jacobian(&scaled));
}

#[test]
fn transport_matches_recurrence() {
    let mut g = rng(22);
    for i in 0..200 {
        let d = (i % 11) as u32;
        let beta = sparse_rational(&mut g);
        let h = random_form(&mut g, d);
        let prob = TransportProblem { beta: beta.clone(), h: h.clone() };
        let sol = solve_transport(&prob);
        assert!(prob.residual(sol.poly()).is_zero());
        assert_eq!(*sol.poly(), transport_by_recurrence(&beta, &h));
    }
}

#[test]
fn transport_solutions_differ_by_kernel() {
    // Any solution minus the normalized one is a multiple of (y - beta x)^(d+1).
    let beta = rat(3, 2);
    let h = form("x^2 - x*y");
    let sol = solve_transport(&TransportProblem { beta: beta.clone(), h: h.clone() });
    let kernel = p("y - 3/2 x").pow(3);
    let other = sol.poly() + &kernel.scale(&rat(-5, 7));
    let prob = TransportProblem { beta, h };
    assert!(prob.residual(&other).is_zero());
}

#[test]
fn trace_total_equals_jacobian() {
    let mut g = rng(23);
    for i in 0..20 {
        let spec = random_qshear(&mut g, 2 + i % 3);
        let t = qshear_cancellation_trace(&spec).unwrap();
        assert!(t.passed(), "{}", spec.to_json());
        assert_eq!(t.terms.len(), 7);
        assert_eq!(t.pairs.len(), 3);
        assert_eq!(t.total, jacobian_det(&spec.build().unwrap()));
        let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json["pairs"].as_array().unwrap().len(), 3);
    }
    assert!(qshear_cancellation_trace(&FamilySpec::triangular(vec![rat(1, 1)], rat(0, 1))).is_err());
}

#[test]
fn witness_examples() {
    // Irreducible over the rationals.
    let r = form("x^2 + y^2");
    let w = degeneracy_witness(&r.pow(2), &HomogeneousPoly::from_poly(r.poly().scale(&rat(-3, 1))).unwrap())
        .unwrap()
        .unwrap();
    assert_eq!(w.r, r);
    assert_eq!((w.m_prime, w.n_prime), (2, 1));
    assert_eq!((w.c_p, w.c_q), (rat(1, 1), rat(-3, 1)));

    let w = degeneracy_witness(&form("(x - y)^2 * (x + 2y)^2"), &form("4(x - y)*(x + 2y)")).unwrap().unwrap();
    assert_eq!(w.r, form("(x - y)*(x + 2y)"));
    assert_eq!((w.m_prime, w.n_prime), (2, 1));
    assert_eq!(w.c_q, rat(4, 1));

    assert_eq!(degeneracy_witness(&form("x*y"), &form("x + y")).unwrap(), None);
    assert_eq!(
        degeneracy_witness(&HomogeneousPoly::new(BivariatePoly::zero(), 2).unwrap(), &form("x")),
        Err(WitnessError::ZeroInput)
    );
}

#[test]
fn witness_recovers_random_powers() {
    let mut g = rng(24);
    let mut checked = 0;
    while checked < 40 {
        let root = random_nonzero_form(&mut g, 1 + checked % 3);
        let (a, b) = (1 + checked % 4, 1 + (checked / 4) % 3);
        let pa = root.pow(a);
        let qb = HomogeneousPoly::from_poly(root.pow(b).poly().scale(&nonzero_rational(&mut g))).unwrap();
        assert!(jacobian_det_of(pa.poly(), qb.poly()).is_zero());
        let w = degeneracy_witness(&pa, &qb).unwrap_or_else(|e| panic!("{} {}: {e}", pa.poly(), qb.poly())).unwrap();
        assert!(w.reconstructs(&pa, &qb));
        // root need not be squarefree; r is its primitive root.
        assert_eq!(w.m_prime * w.r.degree(), pa.degree());
        checked += 1;
    }
}
