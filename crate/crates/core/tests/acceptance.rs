//! Acceptance run: one PASS/FAIL line per criterion, with the failing
//! sub-checks listed below it.
//!
//! `cargo test -p polychain-core --test acceptance` runs all seven;
//! `cargo test -p polychain-core --test acceptance -- 2 5` runs a subset.
//!
//! Sub-checks in [`KNOWN`] do not hold for the published inputs. They still
//! turn their criterion red, but only an unlisted failure (or a listed one
//! that starts passing) makes the process exit nonzero.

mod common;

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use polychain_core::catalog::{self, fixtures};
use polychain_core::closure::{
    build_presentation, casimir_from_h, change_basis, find_central, find_relations, parse_abstract,
    verify_presentation, Presentation, PresentationOptions,
};
use polychain_core::commutant::{self, functional_independence_count, match_named_basis};
use polychain_core::enveloping::{lift_cubic, Enveloping, Structure};
use polychain_core::{NCPolynomial, NCWord};
use polychain_core::linalg::{collect_sparse, Echelon};
use polychain_core::parse::parse_polynomial;
use polychain_core::{
    label_counts, lp_bracket, AbstractPoly, CommutantBasis, LieAlgebra, Polynomial, Scalar, DEFAULT_SEED,
};

/// `(criterion, check, reason)`
const KNOWN: &[(u8, &str, &str)] = &[
    (
        1,
        "degree multiset",
        "D2 = b1*b2 - D1, so degree 4 adds one generator and the basis has six elements",
    ),
    (
        1,
        "degree 4 new generators",
        "D2 = b1*b2 - D1 lies in the product span",
    ),
    (
        3,
        "degree multiset",
        "D2 and F2 are linear in products of lower elements",
    ),
    (
        4,
        "published polynomials solve the system",
        "D2 and E2 as printed are not annihilated; the catalog carries corrected forms",
    ),
    (
        5,
        "ordered form C2",
        "printed C2 has L2*T23 where the symmetrization gives L2*T13",
    ),
];

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

struct Criterion {
    id: u8,
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn eq<T: PartialEq + Debug>(&mut self, name: impl Into<String>, got: T, want: T) {
        let detail = format!("got {got:?}, expected {want:?}");
        self.check(name, got == want, detail);
    }

    /// Compares abstract polynomials, rendering both on mismatch.
    fn same(&mut self, name: impl Into<String>, got: &AbstractPoly, want: &AbstractPoly, names: &[String]) {
        let detail = format!("got {}, expected {}", got.render(names), want.render(names));
        self.check(name, got == want, detail);
    }
}

fn known(id: u8, check: &str) -> Option<&'static str> {
    KNOWN
        .iter()
        .find(|(i, c, _)| *i == id && *c == check)
        .map(|(_, _, r)| *r)
}

fn abs(text: &str, names: &[String]) -> AbstractPoly {
    parse_abstract(text, names).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn entries<K: Clone>(terms: impl Iterator<Item = (K, Scalar)>) -> Vec<(K, Scalar)> {
    terms.collect()
}

fn poly_vec(p: &Polynomial) -> Vec<(polychain_core::Monomial, Scalar)> {
    entries(p.terms().map(|(m, c)| (m.clone(), c.clone())))
}

fn abstract_vec(p: &AbstractPoly) -> Vec<(polychain_core::closure::SymMono, Scalar)> {
    entries(p.terms().map(|(m, c)| (m.clone(), c.clone())))
}

fn rank<K: Hash + Eq + Clone>(vecs: &[Vec<(K, Scalar)>]) -> usize {
    let mut index: HashMap<K, usize> = HashMap::new();
    for v in vecs {
        for (k, _) in v {
            let n = index.len();
            index.entry(k.clone()).or_insert(n);
        }
    }
    let rows = vecs
        .iter()
        .map(|v| collect_sparse(v.iter().map(|(k, c)| (index[k], c.clone()))));
    Echelon::rank_of(index.len(), rows)
}

fn in_span<K: Hash + Eq + Clone>(basis: &[Vec<(K, Scalar)>], target: Vec<(K, Scalar)>) -> bool {
    let mut all = basis.to_vec();
    all.push(target);
    rank(&all) == rank(basis)
}

fn relation_in_span(alg: &LieAlgebra, basis: &CommutantBasis, w: u32, rel: &AbstractPoly) -> bool {
    let found: Vec<_> = find_relations(alg, basis, w).iter().map(abstract_vec).collect();
    in_span(&found, abstract_vec(rel))
}

fn values(basis: &CommutantBasis) -> Vec<Polynomial> {
    basis.entries.iter().map(|e| e.poly.clone()).collect()
}

fn commutes_with_all(alg: &LieAlgebra, p: &Polynomial, others: &[Polynomial]) -> bool {
    others.iter().all(|q| lp_bracket(p, q, alg).unwrap().is_zero())
}

/// Products of the given elements with total degree `n`.
fn products(elems: &[(u32, &Polynomial)], n: u32, dim: usize) -> Vec<Polynomial> {
    fn rec(elems: &[(u32, &Polynomial)], start: usize, n: u32, acc: Polynomial, out: &mut Vec<Polynomial>) {
        if n == 0 {
            out.push(acc);
            return;
        }
        for k in start..elems.len() {
            let (d, p) = elems[k];
            if d <= n {
                rec(elems, k, n - d, &acc * p, out);
            }
        }
    }
    let mut out = Vec::new();
    rec(elems, 0, n, Polynomial::constant(dim, Scalar::from_int(1)), &mut out);
    out
}

/// Degree table of a computed commutant against the published elements:
/// the published elements must solve the system and their products must
/// span each solution space.
fn published_spans(c: &mut Criterion, alg: &LieAlgebra, imposed: &[usize], run: &commutant::CommutantRun, published: &[(String, Polynomial)]) {
    let polys: Vec<&Polynomial> = published.iter().map(|(_, p)| p).collect();
    let bad: Vec<&str> = match_named_basis(alg, imposed, &polys)
        .iter()
        .zip(published)
        .filter(|(m, _)| !m.ok())
        .map(|(_, (n, _))| n.as_str())
        .collect();
    c.check("published elements solve the system", bad.is_empty(), format!("failing: {bad:?}"));
    let graded: Vec<(u32, &Polynomial)> = polys.iter().map(|p| (p.degree().unwrap(), *p)).collect();
    for d in &run.degrees {
        let prods: Vec<_> = products(&graded, d.degree, alg.dim()).iter().map(poly_vec).collect();
        c.eq(
            format!("published products span degree {}", d.degree),
            rank(&prods),
            d.full_space.len(),
        );
    }
}

fn index(names: &[String], name: &str) -> usize {
    names.iter().position(|n| n == name).unwrap_or_else(|| panic!("no generator {name}"))
}

/// Checks `{x, y} = rhs` by substituting the basis polynomials.
fn bracket_holds(alg: &LieAlgebra, basis: &CommutantBasis, x: &str, y: &str, rhs: &str) -> bool {
    let names = basis.names();
    let vals = values(basis);
    let lhs = lp_bracket(&vals[index(&names, x)], &vals[index(&names, y)], alg).unwrap();
    lhs == abs(rhs, &names).eval(&vals, alg.dim())
}

/// Classical three-generator algebra: coefficient values, the generating
/// function built from them, and the Casimir in the central symbols.
fn cubic_checks(c: &mut Criterion, alg: &LieAlgebra, pres: &Presentation, basis: &CommutantBasis, coeffs: &[(&str, &str)], k_central: &str) {
    let names = pres.names();
    let (a, b, cc) = (index(&names, "A"), index(&names, "B"), index(&names, "C"));
    c.same("{A,B} = C", &pres.bracket(a, b), &abs("C", &names), &names);
    for (name, text) in coeffs {
        let got = pres
            .record(name)
            .map(|r| r.value.clone())
            .unwrap_or_else(|| AbstractPoly::zero(names.len()));
        c.same(format!("coefficient {name}"), &got, &abs(text, &names), &names);
    }
    let v = |n: &str| {
        coeffs
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, t)| format!("({t})"))
            .unwrap_or_else(|| "0".into())
    };
    let h = abs(
        &format!(
            "-{l}/4*A^4 - {m}/3*A^3 + {be}/3*B^3 + {al}*A^2*B + {ga}*A*B^2 - {r}/2*A^2 + {e}/2*B^2 \
             + {d}*A*B - {ch}*A + {z}*B",
            l = v("lambda"),
            m = v("mu"),
            be = v("beta"),
            al = v("alpha"),
            ga = v("gamma"),
            r = v("rho"),
            e = v("epsilon"),
            d = v("delta"),
            ch = v("chi"),
            z = v("zeta"),
        ),
        &names,
    );
    c.same("{A,C} = dh/dB", &pres.bracket(a, cc), &h.derivative(b), &names);
    c.same("{B,C} = -dh/dA", &pres.bracket(b, cc), &h.derivative(a).scale(&-Scalar::from_int(1)), &names);
    let mismatches = verify_presentation(alg, pres, basis);
    c.check(
        "presentation agrees with direct brackets",
        mismatches.is_empty(),
        format!("{mismatches:?}"),
    );
    match casimir_from_h(alg, pres, basis) {
        Ok(cd) => {
            let k = abs("C^2", &names).sub(&h.scale(&Scalar::from_int(2)));
            c.same("Casimir C^2 - 2h", &cd.k, &k, &names);
            c.check("Casimir is central", cd.verified_central, "");
            match &cd.k_central {
                Some(kc) => c.same("Casimir in the centrals", kc, &abs(k_central, &names), &names),
                None => c.check("Casimir in the centrals", false, "not expressible in the centrals"),
            }
        }
        Err(e) => c.check("Casimir", false, e.to_string()),
    }
}

fn setup(name: &str, sub: &str) -> (LieAlgebra, Vec<usize>) {
    let alg = catalog::algebra(name).unwrap();
    let imposed = catalog::chain(name, sub, &alg).unwrap().imposed(false);
    (alg, imposed)
}

fn published(name: &str, alg: &LieAlgebra) -> CommutantBasis {
    CommutantBasis::from_named(alg, catalog::published_basis(name, alg).unwrap())
}

/// The cubic presentation in the published generators.
fn su3_presentation(c: &mut Criterion) -> Option<(LieAlgebra, CommutantBasis, Presentation)> {
    let (alg, imposed) = setup("su3-LT", "so3");
    let basis = published("su3-LT", &alg);
    let spec = catalog::published_basis_change("su3-LT").unwrap();
    let nb = match change_basis(&alg, &imposed, &basis, &spec) {
        Ok(b) => b.basis,
        Err(e) => {
            c.check("basis change", false, e.to_string());
            return None;
        }
    };
    match build_presentation(&alg, &nb, &PresentationOptions::default()) {
        Ok(p) => Some((alg, nb, p)),
        Err(e) => {
            c.check("presentation", false, e.to_string());
            None
        }
    }
}

const SU3_COEFFS: &[(&str, &str)] = &[
    ("alpha", "-8*(3*c1 + c2)"),
    ("xi", "8*(3*c1 + c2)"),
    ("beta", "24"),
    ("delta", "-16*c2*c3"),
    ("sigma", "16*c2*c3"),
    ("epsilon", "-16*c1*c2"),
    ("zeta", "8*c3^2*(3*c1 - c2)"),
    ("lambda", "-32"),
    ("mu", "-48*c3"),
    ("rho", "-16*c1*(c1 + c2)^2"),
    ("chi", "16*c3*(c1*(c1^2 - c2^2) + c3^2)"),
    ("gamma", "0"),
    ("nu", "0"),
];

const SO5_COEFFS: &[(&str, &str)] = &[
    ("alpha", "8*(4*c1^2 - 2*c2 - c3)"),
    ("xi", "-8*(4*c1^2 - 2*c2 - c3)"),
    ("beta", "6"),
    ("gamma", "16*c1"),
    ("nu", "-16*c1"),
    ("delta", "-16*c1*(c3^2 + c4)"),
    ("sigma", "16*c1*(c3^2 + c4)"),
    ("epsilon", "4*(4*c2^2 - c3^2 - 2*c4)"),
    ("zeta", "4*c3^2*(c4 - 6*c2^2) + 2*c4^2"),
    ("lambda", "-32"),
    ("mu", "96*c1*c3"),
    ("rho", "16*c3*(4*(c1^2 - c2)*c3 - c4)"),
    ("chi", "-16*c1*c3^2*c4"),
];

/// Lifted constants, with their lower-order corrections.
const SU3_NC_COEFFS: &[(&str, &str)] = &[
    ("alpha", "-8*(3*c1 + c2 - 18)"),
    ("xi", "8*(3*c1 + c2 - 18)"),
    ("delta", "-16*(c2 - 9)*c3"),
    ("sigma", "16*(c2 - 9)*c3"),
    ("epsilon", "-(16*c1*c2 + 152*c1 + 24*c2 - 144)"),
    (
        "zeta",
        "8*c3^2*(3*c1 - c2) + 24*c1^3 + 128/3*c1^2*c2 + 24*c1*c2^2 - 358/3*c1^2 - 18*c2^2 \
         - 68*c1*c2 - 24*c1 + 72*c2",
    ),
    ("beta", "24"),
    ("lambda", "-32"),
    ("mu", "-48*c3"),
    (
        "rho",
        "-16*c1*(c1 + c2)^2 + 168*c1^2 + 24*c2^2 + 544/3*c1*c2 + 48*c1 - 144*c2",
    ),
    (
        "chi",
        "16*c3*(c1^3 - c1*c2^2 + c3^2 - 4*c1^2 + 3/2*c2^2 + 23/6*c1*c2 + 3/2*c1 - 9/2*c2)",
    ),
];

/// Ordered forms in U(su3).
const SU3_ORDERED: &[(&str, &str)] = &[
    ("b1", "L1^2 + L2^2 + L3^2"),
    ("b2", "T11^2 + T12^2 + T13^2 + T11*T22 + T22^2 + T23^2"),
    (
        "C1",
        "L3^2*(T11 + T22) - 2*L1*(L2*T12 + L3*T13) - 2*L2*L3*T23 + i*(L1*T23 - L2*T13 + L3*T12) \
         - L1^2*T11 - L2^2*T22",
    ),
    (
        "C2",
        "T12*T13*T23 + 1/2*(T11*(T12^2 - T22^2 - T23^2) - T22*(T11^2 - T12^2 + T13^2)) + 2*T11 - T22 \
         - i/2*(L1*T23 - L2*T23 + 5*L3*T12)",
    ),
    (
        "D1",
        "L1^2*(T11^2 + T12^2 + T13^2) + 2*L1*(L2*(T12*(T11 + T22) + T13*T23) + L3*(T12*T23 - T13*T22)) \
         + 2*L2*L3*(T12*T13 - T11*T23) + L2^2*(T12^2 + T22^2 + T23^2) + L3^2*(T13^2 + (T11 + T22)^2 + T23^2) \
         + i*(L2*(T12*T23 - T13*T22) - L1*(L2*L3 - T11*T23 + T12*T13) - L3*(T11*T12 + T12*T22 + T13*T23)) \
         - 1/2*(T11^2 + T12^2 + T13^2 + T11*T22 + T22^2 + T23^2) + 1/6*(13*L1^2 + 13*L2^2 - 11*L3^2)",
    ),
];

fn criterion_1(c: &mut Criterion) {
    let (alg, imposed) = setup("su3-LT", "so3");
    let run = commutant::run(&alg, &imposed, 6, None);
    let deg = |n: usize| &run.degrees[n - 1];
    c.eq("degree multiset", run.basis.degrees(), vec![2, 2, 3, 3, 4, 4, 6]);
    c.eq("degree 1 solutions", deg(1).full_space.len(), 0);
    c.eq("degree 2 solutions", deg(2).full_space.len(), 2);
    c.eq("degree 3 solutions", deg(3).full_space.len(), 2);
    c.eq("degree 4 solutions", deg(4).full_space.len(), 4);
    c.eq("degree 4 new generators", deg(4).new_generators.len(), 2);
    c.eq("degree 6 solutions", deg(6).full_space.len(), 10);
    c.eq("degree 6 new generators", deg(6).new_generators.len(), 1);
    let polys: Vec<&Polynomial> = run.basis.entries.iter().map(|e| &e.poly).collect();
    c.eq("functional independence", functional_independence_count(&alg, &polys, DEFAULT_SEED), 5);
    published_spans(c, &alg, &imposed, &run, &catalog::published_basis("su3-LT", &alg).unwrap());
}

fn criterion_2(c: &mut Criterion) {
    let (alg, _) = setup("su3-LT", "so3");
    let basis = published("su3-LT", &alg);
    let names = basis.names();
    let vals = values(&basis);
    let rel = abs("D1 + D2 - b1*b2", &names);
    c.check("D1 + D2 - b1*b2 vanishes", rel.eval(&vals, alg.dim()).is_zero(), "");
    c.check("D1 + D2 - b1*b2 among the relations", relation_in_span(&alg, &basis, 4, &rel), "");
    let central = abs("C1/2 + C2", &names);
    c.check(
        "C1/2 + C2 commutes with every element",
        commutes_with_all(&alg, &central.eval(&vals, alg.dim()), &vals),
        "",
    );
    let found: Vec<_> = find_central(&alg, &basis, 3).iter().map(abstract_vec).collect();
    c.check("C1/2 + C2 among the central combinations", in_span(&found, abstract_vec(&central)), "");
    if let Some((alg, nb, pres)) = su3_presentation(c) {
        cubic_checks(c, &alg, &pres, &nb, SU3_COEFFS, "16*c3^2*(c1*(c1 - c2)^2 - c3^2)");
    }
}

fn criterion_3(c: &mut Criterion) {
    let (alg, imposed) = setup("so5", "su2xu1");
    let run = commutant::run(&alg, &imposed, 6, None);
    c.eq("degree multiset", run.basis.degrees(), vec![1, 2, 2, 3, 4, 4, 4, 6, 6]);
    let polys: Vec<&Polynomial> = run.basis.entries.iter().map(|e| &e.poly).collect();
    c.eq("functional independence", functional_independence_count(&alg, &polys, DEFAULT_SEED), 6);
    published_spans(c, &alg, &imposed, &run, &catalog::published_basis("so5", &alg).unwrap());

    let basis = published("so5", &alg);
    let names = basis.names();
    let vals = values(&basis);
    for (text, w) in [("D1 + D2 - 2*b2^2", 4), ("F1 + F2 - 2*C1^2 - b2*D3", 6)] {
        let rel = abs(text, &names);
        c.check(format!("{text} vanishes"), rel.eval(&vals, alg.dim()).is_zero(), "");
        c.check(format!("{text} among the relations"), relation_in_span(&alg, &basis, w, &rel), "");
    }
    let central = abs("D1 + D3 + 4*a1*C1", &names);
    c.check(
        "D1 + D3 + 4*a1*C1 commutes with every element",
        commutes_with_all(&alg, &central.eval(&vals, alg.dim()), &vals),
        "",
    );
    let found: Vec<_> = find_central(&alg, &basis, 4).iter().map(abstract_vec).collect();
    c.check("D1 + D3 + 4*a1*C1 among the central combinations", in_span(&found, abstract_vec(&central)), "");

    let spec = catalog::published_basis_change("so5").unwrap();
    let nb = match change_basis(&alg, &imposed, &basis, &spec) {
        Ok(b) => b.basis,
        Err(e) => return c.check("basis change", false, e.to_string()),
    };
    match build_presentation(&alg, &nb, &PresentationOptions::default()) {
        Ok(pres) => cubic_checks(c, &alg, &pres, &nb, SO5_COEFFS, "4*c3^2*(8*c2^2*c3^2 - c4^2)"),
        Err(e) => c.check("presentation", false, e.to_string()),
    }
}

fn criterion_4(c: &mut Criterion) {
    let (alg, imposed) = setup("schr3", "sl2xso2");
    let as_printed: Vec<(&str, Polynomial)> = fixtures::SCHR3
        .iter()
        .map(|(n, text)| {
            let text = fixtures::SCHR3_AS_PRINTED
                .iter()
                .find(|(m, _)| m == n)
                .map_or(*text, |(_, t)| *t);
            (*n, parse_polynomial(text, &alg).unwrap())
        })
        .collect();
    // the central charge is not among the fourteen
    let fourteen: Vec<&(&str, Polynomial)> = as_printed.iter().filter(|(n, _)| *n != "a1").collect();
    let matches = match_named_basis(&alg, &imposed, &fourteen.iter().map(|(_, p)| p).collect::<Vec<_>>());
    let bad: Vec<&str> = matches
        .iter()
        .zip(&fourteen)
        .filter(|(m, _)| !m.ok())
        .map(|(_, (n, _))| *n)
        .collect();
    c.eq("fourteen polynomials", fourteen.len(), 14);
    c.check("published polynomials solve the system", bad.is_empty(), format!("failing: {bad:?}"));

    let basis = published("schr3", &alg);
    let vals = values(&basis);
    let refs: Vec<&Polynomial> = vals.iter().collect();
    let bad: Vec<String> = match_named_basis(&alg, &imposed, &refs)
        .iter()
        .zip(basis.names())
        .filter(|(m, _)| !m.ok())
        .map(|(_, n)| n)
        .collect();
    c.check("corrected D2, E2 solve the system", bad.is_empty(), format!("failing: {bad:?}"));
    c.eq("functional independence", functional_independence_count(&alg, &refs, DEFAULT_SEED), 9);
    // the system leaves out K; the strict system gives the same elements
    let strict = catalog::chain("schr3", "sl2xso2", &alg).unwrap().imposed(true);
    c.check(
        "K annihilates every element",
        match_named_basis(&alg, &strict, &refs).iter().all(|m| m.ok()),
        "",
    );
    c.eq(
        "strict system degrees up to 5",
        commutant::run(&alg, &strict, 5, None).basis.degrees(),
        commutant::run(&alg, &imposed, 5, None).basis.degrees(),
    );

    let names = basis.names();
    for (text, w) in [
        ("C1^2 + C2^2 - B1*D3", 6),
        ("C2*D1 - C1*D2 + B1*B2*C4", 7),
        ("C1*D1 + C2*D2 - B1*E3", 7),
    ] {
        let rel = abs(text, &names);
        c.check(format!("{text} vanishes"), rel.eval(&vals, alg.dim()).is_zero(), "");
        c.check(format!("{text} among the relations"), relation_in_span(&alg, &basis, w, &rel), "");
    }

    for (x, y, rhs) in [("B1", "B2", "-2*C2"), ("B2", "D3", "0"), ("C1", "C2", "a1*B1*B2 - a2*D3")] {
        c.check(format!("{{{x},{y}}} = {rhs}"), bracket_holds(&alg, &basis, x, y, rhs), "");
    }

    let quadratic = [
        ("B1", "B2", "-2*C2"),
        ("B1", "C1", "2*a2*C2"),
        ("B1", "C2", "2*(B1*B2 - a2*C1)"),
        ("B1", "D3", "4*B2*C2"),
        ("B2", "C1", "a1*C2"),
        ("B2", "C2", "D3 - a1*C1"),
        ("B2", "D3", "0"),
        ("C1", "C2", "a1*B1*B2 - a2*D3"),
        ("C1", "D3", "2*a1*B2*C2"),
        ("C2", "D3", "2*B2*(D3 - a1*C1)"),
    ];
    let wrong: Vec<String> = quadratic
        .iter()
        .filter(|(x, y, rhs)| !bracket_holds(&alg, &basis, x, y, rhs))
        .map(|(x, y, _)| format!("{{{x},{y}}}"))
        .collect();
    c.check("quadratic subalgebra brackets", wrong.is_empty(), format!("wrong: {wrong:?}"));
    let opts = PresentationOptions {
        relation_weight: Some(0),
        centrals: false,
    };
    match build_presentation(&alg, &basis, &opts) {
        Ok(pres) => {
            let sub = ["a1", "a2", "B1", "B2", "C1", "C2", "D3"];
            let mask: Vec<bool> = names.iter().map(|n| sub.contains(&n.as_str())).collect();
            let leaks: Vec<String> = quadratic
                .iter()
                .filter(|(x, y, _)| !pres.bracket(index(&names, x), index(&names, y)).uses_only(&mask))
                .map(|(x, y, _)| format!("{{{x},{y}}}"))
                .collect();
            c.check("quadratic subalgebra closes", leaks.is_empty(), format!("outside: {leaks:?}"));
            let mismatches = verify_presentation(&alg, &pres, &basis);
            c.check(
                "presentation agrees with direct brackets",
                mismatches.is_empty(),
                format!("{mismatches:?}"),
            );
        }
        Err(e) => c.check("presentation", false, e.to_string()),
    }
}

/// Reads each monomial as the ordered word of its letters.
fn ordered_words(p: &Polynomial) -> NCPolynomial {
    let mut out = NCPolynomial::zero(p.dim());
    for (m, c) in p.terms() {
        let word = m.factors().flat_map(|(v, e)| std::iter::repeat_n(v as u16, e as usize));
        out.add_term(NCWord(word.collect()), c);
    }
    out
}

/// Ordered-form Casimir of the lifted algebra, assembled from `v`.
fn ordered_casimir(v: &dyn Fn(&str) -> String, names: &[String], triple: (usize, usize, usize)) -> Vec<(AbstractPoly, Structure)> {
    let (a, b, c) = triple;
    let (l, m, be, al) = (v("lambda"), v("mu"), v("beta"), v("alpha"));
    let (r, e, d, ch, z) = (v("rho"), v("epsilon"), v("delta"), v("chi"), v("zeta"));
    let terms = [
        ("1".to_string(), Structure::Word(vec![c, c])),
        (format!("{l}/2"), Structure::power(a, 4)),
        (format!("2/3*{m}"), Structure::power(a, 3)),
        (format!("-2/3*{be}"), Structure::power(b, 3)),
        (format!("-(2*{al} - {be}*{l})"), Structure::Word(vec![a, b, a])),
        (format!("{r} + 1/2*({al}*{be} + {e})*{l}"), Structure::power(a, 2)),
        (format!("-({e} - 1/3*({be}*{l} - 4*{al})*{be})"), Structure::power(b, 2)),
        (format!("1/3*{be}*{m} - {d}"), Structure::Anticommutator(a, b)),
        (format!("2*{ch} + 1/2*{be}*{d}*{l} + 1/3*{e}*{m}"), Structure::power(a, 1)),
        (format!("-(2*{z} + 1/3*(3*{al} - {be}*{l})*{e} - 1/3*{be}*{r})"), Structure::power(b, 1)),
    ];
    terms.into_iter().map(|(t, s)| (abs(&t, names), s)).collect()
}

fn criterion_5(c: &mut Criterion) {
    let Some((alg, nb, pres)) = su3_presentation(c) else { return };
    let env = Enveloping::new(&alg);
    let basis = published("su3-LT", &alg);
    let sym = |name: &str| env.symmetrize(&basis.get(name).unwrap().poly).unwrap();
    // products printed out of basis order are read both literally and as
    // the ordered word; a form is reproduced when either reading matches
    let readings = |text: &str| {
        [
            ("written order", env.normalize(&env.parse(text).unwrap())),
            ("ordered words", ordered_words(&parse_polynomial(text, &alg).unwrap())),
        ]
    };
    let reproduces = |name: &str, text: &str| {
        let s = sym(name);
        let diffs: Vec<(&str, NCPolynomial)> = readings(text).into_iter().map(|(r, p)| (r, s.sub(&p))).collect();
        match diffs.iter().find(|(_, d)| d.is_zero()) {
            Some((r, _)) => (true, format!("matches in {r}")),
            None => (
                false,
                diffs
                    .iter()
                    .map(|(r, d)| format!("{r}: differs by {}", d.render(&env.names())))
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
        }
    };
    for (name, text) in SU3_ORDERED {
        let (ok, detail) = reproduces(name, text);
        c.check(format!("ordered form {name}"), ok, detail);
    }
    let c2 = SU3_ORDERED[3].1.replace("L2*T23 + 5", "L2*T13 + 5");
    let (ok, detail) = reproduces("C2", &c2);
    c.check("ordered form C2 with L2*T13", ok, detail);
    c.check(
        "correction term of C1",
        sym("C1").homogeneous_part(2) == env.parse("i*(L1*T23 - L2*T13 + L3*T12)").unwrap(),
        "",
    );

    let lift = match lift_cubic(&env, &pres, &nb) {
        Ok(l) => l,
        Err(e) => return c.check("lift", false, e.to_string()),
    };
    let names = lift.names();
    for r in &lift.records {
        let want = SU3_NC_COEFFS
            .iter()
            .find(|(n, _)| *n == r.name)
            .map_or_else(|| AbstractPoly::zero(names.len()), |(_, t)| abs(t, &names));
        c.same(format!("lifted {} {}", r.bracket, r.name), &r.value, &want, &names);
    }
    let missing: Vec<&str> = SU3_NC_COEFFS
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| lift.record(n).is_none())
        .collect();
    c.check("every lifted constant present", missing.is_empty(), format!("missing: {missing:?}"));
    for lc in lift.classical_limits(&pres) {
        let want = SU3_COEFFS
            .iter()
            .find(|(n, _)| *n == lc.name)
            .map_or_else(|| AbstractPoly::zero(names.len()), |(_, t)| abs(t, &names));
        c.same(format!("classical limit of {}", lc.name), &lc.limit, &want, &names);
    }

    let v = |n: &str| {
        SU3_NC_COEFFS
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, t)| format!("({t})"))
            .unwrap_or_else(|| "0".into())
    };
    let terms = ordered_casimir(&v, &names, lift.triple);
    let failures = lift.abstract_casimir_check(&terms);
    let shown: Vec<String> = failures.iter().map(|(g, e)| format!("[K,{g}] = {}", lift.render_cubic(e))).collect();
    c.check("Casimir commutes with A, B, C", failures.is_empty(), shown.join("; "));
    match casimir_from_h(&alg, &pres, &nb) {
        Ok(cd) => c.same("Casimir collapses to the classical one", &lift.classical_limit(&terms), &cd.k, &names),
        Err(e) => c.check("classical Casimir", false, e.to_string()),
    }
    let mut bad = terms.clone();
    bad[1].0 = bad[1].0.add(&AbstractPoly::constant(names.len(), Scalar::from_int(1)));
    c.check("perturbed Casimir is rejected", !lift.abstract_casimir_check(&bad).is_empty(), "");
    // direct normalization in U(su3); [K, B] and [K, C] follow from the
    // rewriting check above
    let k = lift.realize(&env, &terms);
    let a = &lift.generators[lift.triple.0].poly;
    c.check("[K, A] = 0 in the enveloping algebra", env.commutator(&k, a).is_zero(), "");
}

fn criterion_6(c: &mut Criterion) {
    for (name, prop) in common::PROPERTIES {
        let r = prop(common::CASES);
        c.check(*name, r.is_ok(), r.err().unwrap_or_default());
    }
}

fn criterion_7(c: &mut Criterion) {
    for (name, sub, invariants, n0) in [("su3-LT", "so3", 2, 1), ("so5", "su2xu1", 2, 1), ("schr3", "sl2xso2", 3, 2)] {
        let alg = catalog::algebra(name).unwrap();
        let chain = catalog::chain(name, sub, &alg).unwrap();
        c.eq(format!("{name} invariants"), alg.invariant_count(DEFAULT_SEED), invariants);
        match label_counts(&alg, &chain.sub, chain.ell0, DEFAULT_SEED) {
            Ok(lc) => c.eq(format!("{name} missing labels (ell0 = {})", chain.ell0), lc.n0, n0),
            Err(e) => c.check(format!("{name} missing labels"), false, e.to_string()),
        }
    }
}

type Run = fn(&mut Criterion);

const CRITERIA: [(u8, &str, Option<u64>, Run); 7] = [
    (1, "su(3) > so(3) commutant", Some(60), criterion_1),
    (2, "su(3) cubic Poisson algebra", Some(120), criterion_2),
    (3, "so(5) > su(2) x u(1)", Some(600), criterion_3),
    (4, "Schroedinger chain", Some(1200), criterion_4),
    (5, "enveloping-algebra lift", Some(900), criterion_5),
    (6, "property suites", None, criterion_6),
    (7, "label counts", None, criterion_7),
];

fn main() -> ExitCode {
    let wanted: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut passed = 0;
    let mut ran = 0;
    let mut unexpected = Vec::new();
    for (id, title, budget, f) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let mut c = Criterion { id, checks: Vec::new() };
        let start = Instant::now();
        f(&mut c);
        let elapsed = start.elapsed();
        if let Some(secs) = budget {
            c.check(
                format!("within {secs} s"),
                elapsed <= Duration::from_secs(secs),
                format!("took {:.1} s", elapsed.as_secs_f64()),
            );
        }
        let ok = c.checks.iter().filter(|k| k.ok).count();
        let pass = ok == c.checks.len();
        ran += 1;
        passed += pass as usize;
        println!(
            "criterion {id} {} {title} [{ok}/{} checks, {:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            c.checks.len(),
            elapsed.as_secs_f64()
        );
        for k in &c.checks {
            let note = known(c.id, &k.name);
            match (k.ok, note) {
                (false, Some(reason)) => println!("    known failure: {} ({}); {reason}", k.name, k.detail),
                (false, None) => {
                    println!("    FAILED: {} ({})", k.name, k.detail);
                    unexpected.push(format!("criterion {id}: {} failed", k.name));
                }
                (true, Some(_)) => {
                    println!("    now passes: {}", k.name);
                    unexpected.push(format!("criterion {id}: {} passed", k.name));
                }
                (true, None) => {}
            }
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass, {} unexpected", unexpected.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("unexpected: {u}");
        }
        ExitCode::FAILURE
    }
}
