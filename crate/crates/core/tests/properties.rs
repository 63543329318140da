mod common;

use common::CASES;
use polychain_core::catalog;

#[test]
fn bracket_antisymmetry() {
    common::bracket_antisymmetry(CASES).unwrap();
}

#[test]
fn bracket_leibniz() {
    common::bracket_leibniz(CASES).unwrap();
}

#[test]
fn bracket_jacobi() {
    common::bracket_jacobi(CASES).unwrap();
}

#[test]
fn bracket_grading() {
    common::bracket_grading(CASES).unwrap();
}

#[test]
fn symmetrization_leading_term() {
    common::symmetrization_leading_term(CASES).unwrap();
}

#[test]
fn symmetrization_linear() {
    common::symmetrization_linear(CASES).unwrap();
}

#[test]
fn pbw_associative() {
    common::pbw_associative(CASES).unwrap();
}

#[test]
fn pbw_filtration() {
    common::pbw_filtration(CASES).unwrap();
}

#[test]
fn symmetrization_homomorphism_degree_one() {
    common::symmetrization_homomorphism_degree_one(CASES).unwrap();
}

#[test]
fn invariant_count_stable_across_seeds() {
    for (name, want) in [("su3-LT", 2), ("so5", 2), ("schr3", 3)] {
        let alg = catalog::algebra(name).unwrap();
        for seed in [1u64, 2, 3, 0xdead_beef] {
            assert_eq!(alg.invariant_count(seed), want, "{name} seed {seed}");
        }
    }
}

#[test]
fn full_algebra_is_its_own_subalgebra() {
    for alg in common::algebras() {
        assert!(alg.validate().is_empty());
        let all = polychain_core::algebra::SubalgebraSpec::new("all", (0..alg.dim()).collect());
        assert!(polychain_core::check_subalgebra(&alg, &all));
    }
}

/// A broken bracket must be caught: flip one structure constant.
#[test]
fn jacobi_property_detects_perturbed_table() {
    let alg = catalog::algebra("su3").unwrap();
    let mut records = alg.records();
    records[0].coeff = &records[0].coeff * &polychain_core::Scalar::from_int(2);
    let bad = polychain_core::LieAlgebra::new(alg.names().to_vec(), &records).unwrap();
    assert!(!bad.validate().is_empty());
}
