//! Degree-by-degree solution of the centralizer system
//! `{x_α, p} = 0` for the imposed subalgebra coordinates `x_α`.

use std::collections::HashMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{random_point, LieAlgebra, GENERIC_DRAWS};
use crate::linalg::{rref_basis, Echelon, SparseVec};
use crate::poly::{lp_bracket, monomial_basis, Grade, Monomial, Polynomial};
use crate::scalar::Scalar;

/// Homogeneous solutions of one degree.
#[derive(Clone, Debug)]
pub struct DegreeSolution {
    pub degree: u32,
    /// Reduced echelon basis of all degree-`n` solutions.
    pub full_space: Vec<Polynomial>,
    /// Dimension of the span of products of lower-degree generators.
    pub product_dim: usize,
    pub new_generators: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisEntry {
    pub name: String,
    pub poly: Polynomial,
    pub degree: u32,
    pub is_central: bool,
}

/// Named homogeneous generators of a commutant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommutantBasis {
    pub entries: Vec<BasisEntry>,
}

impl CommutantBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&BasisEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.entries.iter().map(|e| e.degree).collect();
        d.sort_unstable();
        d
    }

    /// Builds a basis from named polynomials and computes centrality flags.
    pub fn from_named(alg: &LieAlgebra, named: Vec<(String, Polynomial)>) -> Self {
        let entries = named
            .into_iter()
            .map(|(name, poly)| {
                let degree = match poly.grade() {
                    Grade::Homogeneous(d) => d,
                    _ => poly.degree().unwrap_or(0),
                };
                BasisEntry {
                    name,
                    poly,
                    degree,
                    is_central: false,
                }
            })
            .collect();
        let mut b = CommutantBasis { entries };
        b.recompute_centrality(alg);
        b
    }

    /// An entry is central iff it Poisson-commutes with every other entry.
    pub fn recompute_centrality(&mut self, alg: &LieAlgebra) {
        let n = self.entries.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let zero: Vec<bool> = pairs
            .par_iter()
            .map(|&(i, j)| {
                lp_bracket(&self.entries[i].poly, &self.entries[j].poly, alg)
                    .map(|p| p.is_zero())
                    .unwrap_or(false)
            })
            .collect();
        let mut central = vec![true; n];
        for (&(i, j), z) in pairs.iter().zip(zero) {
            if !z {
                central[i] = false;
                central[j] = false;
            }
        }
        for (e, c) in self.entries.iter_mut().zip(central) {
            e.is_central = c;
        }
    }

    /// Renames entries following the convention: the letter encodes the
    /// degree (`a` = 1, `b` = 2, ...), lowercase for central entries,
    /// uppercase otherwise, numbered separately per letter and case.
    pub fn apply_naming(&mut self) {
        let mut counters: HashMap<(u32, bool), usize> = HashMap::new();
        for e in &mut self.entries {
            let k = counters.entry((e.degree, e.is_central)).or_insert(0);
            *k += 1;
            e.name = degree_name(e.degree, e.is_central, *k);
        }
    }
}

pub fn degree_name(degree: u32, central: bool, k: usize) -> String {
    let letter = if (1..=26).contains(&degree) {
        (b'a' + (degree - 1) as u8) as char
    } else {
        'z'
    };
    let letter = if central { letter } else { letter.to_ascii_uppercase() };
    if degree > 26 {
        format!("{letter}{degree}_{k}")
    } else {
        format!("{letter}{k}")
    }
}

/// Coefficient vectors of polynomials over a fixed monomial list.
pub(crate) struct MonomialIndex {
    pub monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(monos: Vec<Monomial>) -> Self {
        let index = monos.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        MonomialIndex { monos, index }
    }

    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn vector(&self, p: &Polynomial) -> Option<SparseVec> {
        let mut v: SparseVec = p
            .terms()
            .map(|(m, c)| self.get(m).map(|k| (k, c.clone())))
            .collect::<Option<_>>()?;
        v.sort_by_key(|e| e.0);
        Some(v)
    }

    pub fn polynomial(&self, dim: usize, v: &[(usize, Scalar)]) -> Polynomial {
        Polynomial::from_terms(dim, v.iter().map(|(k, c)| (self.monos[*k].clone(), c.clone())))
    }
}

/// Basis of `{p homogeneous of degree n : {x_α, p} = 0 for α ∈ imposed}`,
/// in reduced echelon form with respect to the graded-lex monomial order.
pub fn solve_degree(alg: &LieAlgebra, imposed: &[usize], n: u32) -> Vec<Polynomial> {
    let d = alg.dim();
    let idx = MonomialIndex::new(monomial_basis(d, n));
    let ncols = idx.monos.len();
    // rows keyed by (imposed coordinate, image monomial)
    let mut row_of: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for (a_pos, &alpha) in imposed.iter().enumerate() {
        for (col, m) in idx.monos.iter().enumerate() {
            for (j, e) in m.factors() {
                let comps = alg.bracket(alpha, j);
                if comps.is_empty() {
                    continue;
                }
                let (q, _) = m.derive(j).unwrap();
                let ce = Scalar::from_int(e as i64);
                for (k, s) in comps {
                    let out = q.mul(&Monomial::var(*k));
                    let r = *row_of.entry((a_pos, out)).or_insert_with(|| {
                        rows.push(Vec::new());
                        rows.len() - 1
                    });
                    rows[r].push((col, &ce * s));
                }
            }
        }
    }
    let mut ech = Echelon::new(ncols);
    for r in rows {
        let v = crate::linalg::collect_sparse(r);
        if !v.is_empty() {
            ech.insert(v);
        }
        if ech.rank() == ncols {
            break;
        }
    }
    ech.make_reduced();
    let kernel = ech.kernel(ncols);
    rref_basis(ncols, kernel)
        .into_iter()
        .map(|v| idx.polynomial(d, &v))
        .collect()
}

/// All products of at least two `lower` generators with total degree `n`.
pub fn degree_products(lower: &[(u32, &Polynomial)], n: u32, dim: usize) -> Vec<Polynomial> {
    let mut out = Vec::new();
    fn rec(
        lower: &[(u32, &Polynomial)],
        start: usize,
        left: u32,
        factors: usize,
        acc: &Polynomial,
        out: &mut Vec<Polynomial>,
    ) {
        if left == 0 {
            if factors >= 2 {
                out.push(acc.clone());
            }
            return;
        }
        for k in start..lower.len() {
            let (deg, p) = lower[k];
            if deg == 0 || deg > left {
                continue;
            }
            rec(lower, k, left - deg, factors + 1, &(acc * p), out);
        }
    }
    let one = Polynomial::constant(dim, Scalar::from_int(1));
    rec(lower, 0, n, 0, &one, &mut out);
    out
}

/// Splits `full_space` into the product span and a complement. Returns
/// the product-span dimension and complement representatives: each full
/// solution is reduced modulo the products, and the residuals are brought
/// to reduced echelon form.
pub fn new_generators(
    full_space: &[Polynomial],
    lower: &[(u32, &Polynomial)],
    n: u32,
    dim: usize,
) -> (usize, Vec<Polynomial>) {
    if full_space.is_empty() {
        return (0, vec![]);
    }
    let mut monos: Vec<Monomial> = full_space
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    let products = degree_products(lower, n, dim);
    for p in &products {
        monos.extend(p.terms().map(|(m, _)| m.clone()));
    }
    monos.sort();
    monos.dedup();
    let idx = MonomialIndex::new(monos);
    let ncols = idx.monos.len();
    let mut prod = Echelon::new(ncols);
    for p in &products {
        prod.insert(idx.vector(p).unwrap());
    }
    prod.make_reduced();
    let residuals: Vec<SparseVec> = full_space
        .iter()
        .map(|p| prod.reduce_full(idx.vector(p).unwrap()))
        .filter(|v| !v.is_empty())
        .collect();
    let new = rref_basis(ncols, residuals)
        .into_iter()
        .map(|v| idx.polynomial(dim, &v))
        .collect();
    (prod.rank(), new)
}

/// Rank of the Jacobian of the entries at a generic point (max over draws).
pub fn functional_independence_count(alg: &LieAlgebra, polys: &[&Polynomial], seed: u64) -> usize {
    let d = alg.dim();
    let grads: Vec<Vec<Polynomial>> = polys
        .iter()
        .map(|p| (0..d).map(|v| p.derivative(v)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..GENERIC_DRAWS {
        let pt = random_point(&mut rng, d);
        let rows = grads.iter().map(|g| {
            g.iter()
                .enumerate()
                .map(|(v, dp)| (v, dp.eval(&pt)))
                .filter(|(_, c)| !c.is_zero())
                .collect::<SparseVec>()
        });
        best = best.max(Echelon::rank_of(d, rows));
    }
    best
}

/// Result of [`run`].
#[derive(Clone, Debug)]
pub struct CommutantRun {
    pub imposed: Vec<usize>,
    pub degrees: Vec<DegreeSolution>,
    pub basis: CommutantBasis,
    /// Degree after which the advisory stop criterion fired, if any.
    pub stopped_at: Option<u32>,
}

/// Solves degrees `1..=max_degree`, keeps the new generators of each degree
/// and names the resulting basis. When `closes` is given, the run stops
/// early once two consecutive degrees add nothing and `closes(basis)` holds.
pub fn run(
    alg: &LieAlgebra,
    imposed: &[usize],
    max_degree: u32,
    closes: Option<&(dyn Fn(&CommutantBasis) -> bool + Sync)>,
) -> CommutantRun {
    let dim = alg.dim();
    let mut degrees = Vec::new();
    let mut gens: Vec<(u32, Polynomial)> = Vec::new();
    let mut empty_streak = 0;
    let mut stopped_at = None;
    // full spaces are independent; solve them concurrently unless an early
    // stop may make later degrees unnecessary
    let mut spaces: HashMap<u32, Vec<Polynomial>> = if closes.is_none() {
        (1..=max_degree)
            .into_par_iter()
            .map(|n| (n, solve_degree(alg, imposed, n)))
            .collect()
    } else {
        HashMap::new()
    };
    for n in 1..=max_degree {
        let full = spaces
            .remove(&n)
            .unwrap_or_else(|| solve_degree(alg, imposed, n));
        let lower: Vec<(u32, &Polynomial)> = gens.iter().map(|(d, p)| (*d, p)).collect();
        let (product_dim, new) = new_generators(&full, &lower, n, dim);
        for p in &new {
            gens.push((n, p.clone()));
        }
        empty_streak = if new.is_empty() { empty_streak + 1 } else { 0 };
        degrees.push(DegreeSolution {
            degree: n,
            full_space: full,
            product_dim,
            new_generators: new,
        });
        if let Some(f) = closes {
            if empty_streak >= 2 && n < max_degree {
                let b = name_basis(alg, &gens);
                if f(&b) {
                    stopped_at = Some(n);
                    break;
                }
            }
        }
    }
    let basis = name_basis(alg, &gens);
    CommutantRun {
        imposed: imposed.to_vec(),
        degrees,
        basis,
        stopped_at,
    }
}

fn name_basis(alg: &LieAlgebra, gens: &[(u32, Polynomial)]) -> CommutantBasis {
    let mut b = CommutantBasis::from_named(
        alg,
        gens.iter().map(|(_, p)| (String::new(), p.clone())).collect(),
    );
    b.apply_naming();
    b
}

/// Outcome of checking one user polynomial against the commutant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisMatch {
    pub homogeneous: bool,
    pub annihilated: bool,
    pub in_span: bool,
}

impl BasisMatch {
    pub fn ok(&self) -> bool {
        self.homogeneous && self.annihilated && self.in_span
    }
}

/// Checks each polynomial: homogeneous, annihilated by every imposed
/// coordinate, and inside the solution space of its degree.
pub fn match_named_basis(alg: &LieAlgebra, imposed: &[usize], polys: &[&Polynomial]) -> Vec<BasisMatch> {
    let mut spaces: HashMap<u32, (MonomialIndex, Echelon)> = HashMap::new();
    polys
        .iter()
        .map(|p| {
            let Grade::Homogeneous(n) = p.grade() else {
                return BasisMatch {
                    homogeneous: false,
                    annihilated: false,
                    in_span: false,
                };
            };
            let annihilated = imposed
                .iter()
                .all(|&a| crate::poly::coadjoint(a, p, alg).is_zero());
            let (idx, ech) = spaces.entry(n).or_insert_with(|| {
                let idx = MonomialIndex::new(monomial_basis(alg.dim(), n));
                let mut ech = Echelon::new(idx.monos.len());
                for q in solve_degree(alg, imposed, n) {
                    ech.insert(idx.vector(&q).unwrap());
                }
                (idx, ech)
            });
            let in_span = idx
                .vector(p)
                .map(|v| ech.reduce_full(v).is_empty())
                .unwrap_or(false);
            BasisMatch {
                homogeneous: true,
                annihilated,
                in_span,
            }
        })
        .collect()
}

/// Whether `p` Poisson-commutes with every coordinate of the algebra.
pub fn is_full_invariant(alg: &LieAlgebra, p: &Polynomial) -> bool {
    (0..alg.dim()).all(|a| crate::poly::coadjoint(a, p, alg).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn su3_low_degrees() {
        let alg = catalog::su3();
        let so3 = [0, 1, 2];
        assert!(solve_degree(&alg, &so3, 1).is_empty());
        let two = solve_degree(&alg, &so3, 2);
        assert_eq!(two.len(), 2);
        let b1 = crate::parse::parse_polynomial("l1^2 + l2^2 + l3^2", &alg).unwrap();
        assert!(match_named_basis(&alg, &so3, &[&b1])[0].ok());
        let l1 = Polynomial::var(8, 0);
        assert!(!match_named_basis(&alg, &so3, &[&l1])[0].ok());
    }

    #[test]
    fn abelian_products() {
        let alg = LieAlgebra::new(vec!["X".into(), "Y".into()], &[]).unwrap();
        // everything commutes; degree 2 is spanned by products of degree 1
        let r = run(&alg, &[0], 3, None);
        assert_eq!(r.basis.degrees(), vec![1, 1]);
        assert!(r.basis.entries.iter().all(|e| e.is_central));
        assert_eq!(r.basis.names(), vec!["a1", "a2"]);
        assert_eq!(r.degrees[1].full_space.len(), 3);
        assert_eq!(r.degrees[1].product_dim, 3);
    }

    #[test]
    fn naming() {
        assert_eq!(degree_name(3, false, 2), "C2");
        assert_eq!(degree_name(2, true, 1), "b1");
        assert_eq!(degree_name(6, false, 1), "F1");
    }
}
