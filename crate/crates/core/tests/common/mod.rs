//! Randomized invariants over every catalog algebra, shared by the
//! `properties` and `acceptance` targets. All checks are exact.

#![allow(dead_code)]

use polychain_core::catalog::{self, ALGEBRAS};
use polychain_core::enveloping::Enveloping;
use polychain_core::{lp_bracket, monomial_basis, Grade, LieAlgebra, Monomial, NCPolynomial, NCWord, Polynomial, Scalar};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 128;

pub fn algebras() -> Vec<LieAlgebra> {
    ALGEBRAS.iter().map(|n| catalog::algebra(n).unwrap()).collect()
}

thread_local! {
    static ALGS: Vec<LieAlgebra> = algebras();
}

fn with_alg<R>(k: usize, f: impl FnOnce(&LieAlgebra) -> R) -> R {
    ALGS.with(|a| f(&a[k]))
}

fn dim_of(k: usize) -> usize {
    with_alg(k, |a| a.dim())
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, -4i64..=4, 1i64..=3).prop_map(|(re, im, den)| {
        let s = Scalar::gauss(re, im);
        if s == Scalar::from_int(0) {
            Scalar::from_int(1)
        } else {
            &s * &Scalar::frac(1, den)
        }
    })
}

/// Up to four terms; each monomial has total degree at most `max_deg`.
fn poly(dim: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let mono = prop::collection::vec(0..dim, 0..=max_deg as usize).prop_map(move |vars| {
        let mut e = vec![0u32; dim];
        for v in vars {
            e[v] += 1;
        }
        Monomial::from_exponents(&e)
    });
    prop::collection::vec((mono, scalar()), 1..=4).prop_map(move |t| Polynomial::from_terms(dim, t))
}

fn homogeneous(dim: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    let basis = monomial_basis(dim, deg);
    let n = basis.len();
    prop::collection::vec((0..n, scalar()), 1..=4)
        .prop_map(move |t| Polynomial::from_terms(dim, t.into_iter().map(|(i, c)| (basis[i].clone(), c))))
}

/// Unordered words of length at most `max_len`.
fn nc_poly(dim: usize, max_len: usize) -> impl Strategy<Value = NCPolynomial> {
    let word = prop::collection::vec(0..dim as u16, 0..=max_len).prop_map(NCWord);
    prop::collection::vec((word, scalar()), 1..=3).prop_map(move |t| {
        let mut p = NCPolynomial::zero(dim);
        for (w, c) in t {
            p.add_term(w, &c);
        }
        p
    })
}

fn alg_and<S: Strategy>(f: impl Fn(usize) -> S + Clone) -> impl Strategy<Value = (usize, S::Value)> {
    (0..ALGEBRAS.len()).prop_flat_map(move |k| (Just(k), f(dim_of(k))))
}

fn homogeneous_pair() -> impl Strategy<Value = (usize, (Polynomial, Polynomial))> {
    (0..ALGEBRAS.len(), 1u32..=4, 1u32..=4)
        .prop_flat_map(|(k, p, q)| (Just(k), (homogeneous(dim_of(k), p), homogeneous(dim_of(k), q))))
}

fn br(f: &Polynomial, g: &Polynomial, alg: &LieAlgebra) -> Polynomial {
    lp_bracket(f, g, alg).unwrap()
}

fn check<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&s, f).map_err(|e| e.to_string())
}

pub fn bracket_antisymmetry(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (poly(d, 3), poly(d, 3))), |(k, (f, g))| {
        with_alg(k, |alg| {
            prop_assert!((&br(&f, &g, alg) + &br(&g, &f, alg)).is_zero());
            Ok(())
        })
    })
}

pub fn bracket_leibniz(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (poly(d, 2), poly(d, 2), poly(d, 3))), |(k, (f, g, h))| {
        with_alg(k, |alg| {
            let lhs = br(&(&f * &g), &h, alg);
            let rhs = &(&f * &br(&g, &h, alg)) + &(&g * &br(&f, &h, alg));
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
    })
}

pub fn bracket_jacobi(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (poly(d, 3), poly(d, 3), poly(d, 3))), |(k, (f, g, h))| {
        with_alg(k, |alg| {
            let a = br(&f, &br(&g, &h, alg), alg);
            let b = br(&g, &br(&h, &f, alg), alg);
            let c = br(&h, &br(&f, &g, alg), alg);
            prop_assert!((&(&a + &b) + &c).is_zero());
            Ok(())
        })
    })
}

pub fn bracket_grading(cases: u32) -> Result<(), String> {
    check(cases, homogeneous_pair(), |(k, (p, q))| {
        with_alg(k, |alg| {
            let want = p.degree().unwrap() + q.degree().unwrap() - 1;
            match br(&p, &q, alg).grade() {
                Grade::Zero => {}
                Grade::Homogeneous(n) => prop_assert_eq!(n, want),
                Grade::Mixed => prop_assert!(false, "bracket not homogeneous"),
            }
            Ok(())
        })
    })
}

pub fn symmetrization_leading_term(cases: u32) -> Result<(), String> {
    let s = (0..ALGEBRAS.len(), 1u32..=4).prop_flat_map(|(k, n)| (Just(k), homogeneous(dim_of(k), n)));
    check(cases, s, |(k, p)| {
        with_alg(k, |alg| {
            let env = Enveloping::new(alg);
            let s = env.symmetrize(&p).unwrap();
            prop_assert!(s.is_normalized());
            prop_assert_eq!(s.degree(), p.degree().map(|d| d as usize));
            prop_assert_eq!(s.leading(), p.clone());
            Ok(())
        })
    })
}

pub fn symmetrization_linear(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (poly(d, 3), poly(d, 3), scalar())), |(k, (p, q, c))| {
        with_alg(k, |alg| {
            let env = Enveloping::new(alg);
            let lhs = env.symmetrize(&(&p + &q.scale(&c))).unwrap();
            let rhs = env.symmetrize(&p).unwrap().add(&env.symmetrize(&q).unwrap().scale(&c));
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
    })
}

pub fn pbw_associative(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (nc_poly(d, 3), nc_poly(d, 3), nc_poly(d, 2))), |(k, (p, q, r))| {
        with_alg(k, |alg| {
            let env = Enveloping::new(alg);
            prop_assert_eq!(env.mul(&env.mul(&p, &q), &r), env.mul(&p, &env.mul(&q, &r)));
            // normalization is idempotent
            let n = env.normalize(&p);
            prop_assert_eq!(env.normalize(&n), n);
            Ok(())
        })
    })
}

pub fn pbw_filtration(cases: u32) -> Result<(), String> {
    check(cases, alg_and(|d| (nc_poly(d, 3), nc_poly(d, 3))), |(k, (p, q))| {
        with_alg(k, |alg| {
            let env = Enveloping::new(alg);
            let (p, q) = (env.normalize(&p), env.normalize(&q));
            let c = env.commutator(&p, &q);
            if let (Some(dp), Some(dq), Some(dc)) = (p.degree(), q.degree(), c.degree()) {
                prop_assert!(dc < dp + dq, "deg [p,q] = {dc}, deg p = {dp}, deg q = {dq}");
            }
            Ok(())
        })
    })
}

pub fn symmetrization_homomorphism_degree_one(cases: u32) -> Result<(), String> {
    let s = (0..ALGEBRAS.len()).prop_flat_map(|k| (Just(k), (0..dim_of(k), 0..dim_of(k))));
    check(cases, s, |(k, (i, j))| {
        with_alg(k, |alg| {
            let d = alg.dim();
            let env = Enveloping::new(alg);
            let (xi, xj) = (Polynomial::var(d, i), Polynomial::var(d, j));
            let lhs = env.commutator(&env.symmetrize(&xi).unwrap(), &env.symmetrize(&xj).unwrap());
            let rhs = env.symmetrize(&br(&xi, &xj, alg)).unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
    })
}

pub type Property = (&'static str, fn(u32) -> Result<(), String>);

pub const PROPERTIES: &[Property] = &[
    ("bracket antisymmetry", bracket_antisymmetry),
    ("bracket Leibniz rule", bracket_leibniz),
    ("bracket Jacobi identity", bracket_jacobi),
    ("bracket grading", bracket_grading),
    ("symmetrization leading term", symmetrization_leading_term),
    ("symmetrization linear", symmetrization_linear),
    ("PBW product associative", pbw_associative),
    ("PBW filtration", pbw_filtration),
    ("symmetrization homomorphism in degree one", symmetrization_homomorphism_degree_one),
];
