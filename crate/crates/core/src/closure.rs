//! Closing a commutant basis into a polynomial Poisson algebra.
//!
//! Every question ("is this bracket a polynomial in the generators?", "which
//! combinations vanish?") is a linear problem on the span of the
//! symbol-monomials of one weighted degree. Each such span is eliminated
//! once ([`WeightSpace`]) and reused.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::catalog::BasisChangeSpec;
use crate::commutant::{BasisEntry, CommutantBasis, MonomialIndex};
use crate::linalg::{rref_basis, Insert, SparseVec, TrackedEchelon};
use crate::parse::{evaluate, Env};
use crate::poly::{lp_bracket, Grade, Monomial, Polynomial};
use crate::scalar::Scalar;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSymbol {
    pub name: String,
    pub weight: u32,
    pub is_central: bool,
}

/// Exponent vector over the generator symbols.
///
/// Canonical order: fewer factors first, then lexicographically descending
/// exponents (a larger power of an earlier symbol comes first).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymMono(pub Vec<u32>);

impl SymMono {
    pub fn one(n: usize) -> Self {
        SymMono(vec![0; n])
    }

    pub fn symbol(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        SymMono(v)
    }

    pub fn factors(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weight(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn mul(&self, other: &SymMono) -> SymMono {
        SymMono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Drops one factor of the last symbol present.
    fn split_last(&self) -> Option<(SymMono, usize)> {
        let k = self.0.iter().rposition(|&e| e > 0)?;
        let mut v = self.0.clone();
        v[k] -= 1;
        Some((SymMono(v), k))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".into();
        }
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| {
                if e == 1 {
                    names[k].clone()
                } else {
                    format!("{}^{}", names[k], e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for SymMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.factors()
            .cmp(&other.factors())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for SymMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Commutative polynomial in generator symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct AbstractPoly {
    nsym: usize,
    terms: BTreeMap<SymMono, Scalar>,
}

impl AbstractPoly {
    pub fn zero(nsym: usize) -> Self {
        AbstractPoly {
            nsym,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nsym: usize, c: Scalar) -> Self {
        let mut p = AbstractPoly::zero(nsym);
        p.add_term(SymMono::one(nsym), &c);
        p
    }

    pub fn symbol(nsym: usize, k: usize) -> Self {
        let mut p = AbstractPoly::zero(nsym);
        p.add_term(SymMono::symbol(nsym, k), &Scalar::one());
        p
    }

    pub fn from_terms(nsym: usize, terms: impl IntoIterator<Item = (SymMono, Scalar)>) -> Self {
        let mut p = AbstractPoly::zero(nsym);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nsym(&self) -> usize {
        self.nsym
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymMono, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &SymMono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: SymMono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &AbstractPoly) -> AbstractPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &AbstractPoly) -> AbstractPoly {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> AbstractPoly {
        if c.is_zero() {
            return AbstractPoly::zero(self.nsym);
        }
        AbstractPoly {
            nsym: self.nsym,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &AbstractPoly) -> AbstractPoly {
        let mut out = AbstractPoly::zero(self.nsym);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> AbstractPoly {
        let mut acc = AbstractPoly::constant(self.nsym, Scalar::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Weighted degrees present, ascending.
    pub fn weights(&self, weights: &[u32]) -> Vec<u32> {
        let mut w: Vec<u32> = self.terms.keys().map(|m| m.weight(weights)).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn is_weighted_homogeneous(&self, weights: &[u32], degree: u32) -> bool {
        self.terms.keys().all(|m| m.weight(weights) == degree)
    }

    /// Whether only symbols with `mask[k]` appear.
    pub fn uses_only(&self, mask: &[bool]) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().zip(mask).all(|(&e, &ok)| e == 0 || ok))
    }

    pub fn derivative(&self, k: usize) -> AbstractPoly {
        let mut out = AbstractPoly::zero(self.nsym);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e > 0 {
                let mut v = m.0.clone();
                v[k] -= 1;
                out.add_term(SymMono(v), &(c * &Scalar::from_int(e as i64)));
            }
        }
        out
    }

    /// Antiderivative in symbol `k` with zero constant of integration.
    pub fn integrate(&self, k: usize) -> AbstractPoly {
        let mut out = AbstractPoly::zero(self.nsym);
        for (m, c) in &self.terms {
            let mut v = m.0.clone();
            v[k] += 1;
            let f = Scalar::frac(1, v[k] as i64);
            out.add_term(SymMono(v), &(c * &f));
        }
        out
    }

    /// Groups terms by the exponents of the symbols in `vars`; each group's
    /// coefficient is the remaining polynomial.
    pub fn coefficients_in(&self, vars: &[usize]) -> BTreeMap<Vec<u32>, AbstractPoly> {
        let mut out: BTreeMap<Vec<u32>, AbstractPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = vars.iter().map(|&k| m.0[k]).collect();
            let mut rest = m.0.clone();
            for &k in vars {
                rest[k] = 0;
            }
            out.entry(key)
                .or_insert_with(|| AbstractPoly::zero(self.nsym))
                .add_term(SymMono(rest), c);
        }
        out
    }

    /// Substitutes concrete polynomials for the symbols.
    pub fn eval(&self, values: &[Polynomial], dim: usize) -> Polynomial {
        let mut cache: HashMap<SymMono, Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(dim);
        for (m, c) in &self.terms {
            let p = expand_cached(m, values, dim, &mut cache);
            out = &out + &p.scale(c);
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = crate::poly::render_coeff(c);
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.render(names);
            match (body.as_deref(), mono.as_str()) {
                (None, m) => out.push_str(m),
                (Some(b), "1") => out.push_str(b),
                (Some(b), m) => {
                    out.push_str(b);
                    out.push('*');
                    out.push_str(m);
                }
            }
        }
        out
    }
}

impl fmt::Debug for AbstractPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nsym).map(|k| format!("s{k}")).collect();
        f.write_str(&self.render(&names))
    }
}

fn expand_cached(
    m: &SymMono,
    values: &[Polynomial],
    dim: usize,
    cache: &mut HashMap<SymMono, Polynomial>,
) -> Polynomial {
    if let Some(p) = cache.get(m) {
        return p.clone();
    }
    let p = match m.split_last() {
        None => Polynomial::constant(dim, Scalar::one()),
        Some((rest, k)) => &expand_cached(&rest, values, dim, cache) * &values[k],
    };
    cache.insert(m.clone(), p.clone());
    p
}

/// Parses abstract polynomials over named symbols.
pub struct AbstractEnv<'a> {
    pub names: &'a [String],
}

impl Env for AbstractEnv<'_> {
    type Value = AbstractPoly;
    fn constant(&self, c: Scalar) -> AbstractPoly {
        AbstractPoly::constant(self.names.len(), c)
    }
    fn variable(&self, name: &str) -> Result<AbstractPoly, Error> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| AbstractPoly::symbol(self.names.len(), k))
            .ok_or_else(|| Error::Parse(format!("unknown symbol `{name}`")))
    }
    fn add(&self, a: &AbstractPoly, b: &AbstractPoly) -> AbstractPoly {
        a.add(b)
    }
    fn mul(&self, a: &AbstractPoly, b: &AbstractPoly) -> AbstractPoly {
        a.mul(b)
    }
    fn scale(&self, a: &AbstractPoly, c: &Scalar) -> AbstractPoly {
        a.scale(c)
    }
    fn as_scalar(&self, v: &AbstractPoly) -> Option<Scalar> {
        match v.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = v.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }
}

pub fn parse_abstract(text: &str, names: &[String]) -> Result<AbstractPoly, Error> {
    evaluate(text, &AbstractEnv { names })
}

/// All symbol-monomials of weighted degree `w` using symbols with
/// `allowed[k]`, in canonical order.
pub fn symbol_monomials(weights: &[u32], allowed: &[bool], w: u32) -> Vec<SymMono> {
    let n = weights.len();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fn rec(k: usize, left: u32, weights: &[u32], allowed: &[bool], exps: &mut Vec<u32>, out: &mut Vec<SymMono>) {
        if left == 0 {
            out.push(SymMono(exps.clone()));
            return;
        }
        if k == weights.len() {
            return;
        }
        let wk = weights[k];
        if !allowed[k] || wk == 0 {
            rec(k + 1, left, weights, allowed, exps, out);
            return;
        }
        let mut e = 0;
        while e * wk <= left {
            exps[k] = e;
            rec(k + 1, left - e * wk, weights, allowed, exps, out);
            e += 1;
        }
        exps[k] = 0;
    }
    rec(0, w, weights, allowed, &mut exps, &mut out);
    out.sort();
    out
}

/// Expansions of symbol-monomials into `Pol(g*)`, shared across weights.
pub struct Expander {
    dim: usize,
    values: Vec<Polynomial>,
    weights: Vec<u32>,
    cache: HashMap<SymMono, Polynomial>,
}

impl Expander {
    pub fn new(dim: usize, values: Vec<Polynomial>, weights: Vec<u32>) -> Self {
        Expander {
            dim,
            values,
            weights,
            cache: HashMap::new(),
        }
    }

    pub fn from_basis(alg: &LieAlgebra, basis: &CommutantBasis) -> Self {
        Expander::new(
            alg.dim(),
            basis.entries.iter().map(|e| e.poly.clone()).collect(),
            basis.entries.iter().map(|e| e.degree).collect(),
        )
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    /// Fills the cache for `monos` and all their prefixes, one factor count
    /// at a time so each level can be computed in parallel.
    pub fn expand(&mut self, monos: &[SymMono]) {
        let mut levels: BTreeMap<u32, Vec<SymMono>> = BTreeMap::new();
        let mut seen: std::collections::HashSet<SymMono> = std::collections::HashSet::new();
        for m in monos {
            let mut cur = m.clone();
            while !self.cache.contains_key(&cur) && seen.insert(cur.clone()) {
                levels.entry(cur.factors()).or_default().push(cur.clone());
                match cur.split_last() {
                    Some((rest, _)) => cur = rest,
                    None => break,
                }
            }
        }
        for (_, level) in levels {
            let computed: Vec<(SymMono, Polynomial)> = level
                .into_par_iter()
                .map(|m| {
                    let p = match m.split_last() {
                        None => Polynomial::constant(self.dim, Scalar::one()),
                        Some((rest, k)) => &self.cache[&rest] * &self.values[k],
                    };
                    (m, p)
                })
                .collect();
            self.cache.extend(computed);
        }
    }

    pub fn get(&mut self, m: &SymMono) -> &Polynomial {
        if !self.cache.contains_key(m) {
            self.expand(std::slice::from_ref(m));
        }
        &self.cache[m]
    }

    /// Eliminates the span of all symbol-monomials of weight `w` over the
    /// allowed symbols.
    pub fn weight_space(&mut self, w: u32, allowed: &[bool]) -> WeightSpace {
        let monos = symbol_monomials(&self.weights, allowed, w);
        self.expand(&monos);
        let mut all: Vec<Monomial> = monos
            .iter()
            .flat_map(|m| self.cache[m].terms().map(|(x, _)| x.clone()))
            .collect();
        all.sort();
        all.dedup();
        let index = MonomialIndex::new(all);
        let mut ech = TrackedEchelon::new(index.monos.len());
        let mut independent = Vec::new();
        let mut relations = Vec::new();
        let nsym = self.weights.len();
        for (id, m) in monos.iter().enumerate() {
            let v = index.vector(&self.cache[m]).unwrap();
            match ech.insert(v) {
                Insert::Independent(_) => independent.push(id),
                Insert::Dependent(combo) => relations.push(AbstractPoly::from_terms(
                    nsym,
                    combo.into_iter().map(|(k, c)| (monos[k].clone(), c)),
                )),
            }
        }
        WeightSpace {
            weight: w,
            nsym,
            monos,
            index,
            ech,
            independent,
            relations,
        }
    }
}

/// The eliminated evaluation map of one weighted degree.
pub struct WeightSpace {
    pub weight: u32,
    nsym: usize,
    pub monos: Vec<SymMono>,
    index: MonomialIndex,
    ech: TrackedEchelon,
    /// Input positions of the symbol-monomials kept as a basis of the image.
    pub independent: Vec<usize>,
    /// One relation per dependent symbol-monomial, expressing it through
    /// earlier ones.
    pub relations: Vec<AbstractPoly>,
}

/// Outcome of [`WeightSpace::express`].
#[derive(Clone, Debug)]
pub enum Expression {
    Expressible(AbstractPoly),
    NotExpressible { residual: Polynomial },
}

impl WeightSpace {
    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    /// Writes `target` as a combination of the earliest independent
    /// symbol-monomials, or returns the part that is out of reach.
    pub fn express(&self, target: &Polynomial) -> Expression {
        let dim = target.dim();
        let mut v: SparseVec = Vec::new();
        let mut outside = Polynomial::zero(dim);
        for (m, c) in target.terms() {
            match self.index.get(m) {
                Some(k) => v.push((k, c.clone())),
                None => outside.add_term(m.clone(), c),
            }
        }
        v.sort_by_key(|e| e.0);
        let (residual, combo) = self.ech.reduce(v);
        if residual.is_empty() && outside.is_zero() {
            Expression::Expressible(AbstractPoly::from_terms(
                self.nsym,
                combo.into_iter().map(|(k, c)| (self.monos[k].clone(), c)),
            ))
        } else {
            let r = self.index.polynomial(dim, &residual);
            Expression::NotExpressible {
                residual: &r + &outside,
            }
        }
    }
}

fn basis_weights(basis: &CommutantBasis) -> Vec<u32> {
    basis.entries.iter().map(|e| e.degree).collect()
}

/// `{p_i, p_j}` as a polynomial in the basis, or the unreachable residual.
pub fn express_bracket(alg: &LieAlgebra, basis: &CommutantBasis, i: usize, j: usize) -> Result<Expression, Error> {
    let (a, b) = (&basis.entries[i], &basis.entries[j]);
    let target = lp_bracket(&a.poly, &b.poly, alg)?;
    let n = basis.len();
    if target.is_zero() {
        return Ok(Expression::Expressible(AbstractPoly::zero(n)));
    }
    let w = a.degree + b.degree - 1;
    let mut ex = Expander::from_basis(alg, basis);
    Ok(ex.weight_space(w, &vec![true; n]).express(&target))
}

/// Basis of the identically vanishing combinations of weighted degree `w`.
pub fn find_relations(alg: &LieAlgebra, basis: &CommutantBasis, w: u32) -> Vec<AbstractPoly> {
    let mut ex = Expander::from_basis(alg, basis);
    let n = basis.len();
    let ws = ex.weight_space(w, &vec![true; n]);
    canonical_rows(n, &ws.monos, &ws.relations)
}

/// Reduced echelon form of abstract polynomials over the given column order.
fn canonical_rows(n: usize, monos: &[SymMono], polys: &[AbstractPoly]) -> Vec<AbstractPoly> {
    let pos: HashMap<&SymMono, usize> = monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let vecs: Vec<SparseVec> = polys
        .iter()
        .map(|p| {
            let mut v: SparseVec = p.terms().map(|(m, c)| (pos[m], c.clone())).collect();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    rref_basis(monos.len(), vecs)
        .into_iter()
        .map(|v| AbstractPoly::from_terms(n, v.into_iter().map(|(k, c)| (monos[k].clone(), c))))
        .collect()
}

/// Combinations of weighted degree `w` that Poisson-commute with every
/// basis entry, modulo relations and modulo products of central entries.
/// Each returned element has no terms made only of central symbols.
pub fn find_central(alg: &LieAlgebra, basis: &CommutantBasis, w: u32) -> Vec<AbstractPoly> {
    let mut ex = Expander::from_basis(alg, basis);
    central_at(&mut ex, alg, basis, w).1
}

fn central_at(ex: &mut Expander, alg: &LieAlgebra, basis: &CommutantBasis, w: u32) -> (WeightSpace, Vec<AbstractPoly>) {
    let n = basis.len();
    let ws = ex.weight_space(w, &vec![true; n]);
    let central: Vec<bool> = basis.entries.iter().map(|e| e.is_central).collect();
    let is_trivial = |m: &SymMono| m.0.iter().zip(&central).all(|(&e, &c)| e == 0 || c);
    // candidates: independent monomials involving a noncentral symbol
    let cands: Vec<usize> = ws
        .independent
        .iter()
        .copied()
        .filter(|&k| !is_trivial(&ws.monos[k]))
        .collect();
    if cands.is_empty() {
        return (ws, vec![]);
    }
    let others: Vec<&BasisEntry> = basis.entries.iter().filter(|e| !e.is_central).collect();
    // column k of the linear map: brackets of candidate k with every entry
    let images: Vec<Vec<Polynomial>> = cands
        .par_iter()
        .map(|&k| {
            let p = &ex.cache[&ws.monos[k]];
            others
                .iter()
                .map(|g| lp_bracket(p, &g.poly, alg).expect("same algebra"))
                .collect()
        })
        .collect();
    let mut rows: HashMap<(usize, Monomial), SparseVec> = HashMap::new();
    for (col, imgs) in images.iter().enumerate() {
        for (g, img) in imgs.iter().enumerate() {
            for (m, c) in img.terms() {
                rows.entry((g, m.clone())).or_default().push((col, c.clone()));
            }
        }
    }
    let mut ech = crate::linalg::Echelon::new(cands.len());
    let mut keys: Vec<_> = rows.keys().cloned().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    for k in keys {
        ech.insert(crate::linalg::collect_sparse(rows.remove(&k).unwrap()));
    }
    ech.make_reduced();
    let kernel: Vec<AbstractPoly> = ech
        .kernel(cands.len())
        .into_iter()
        .map(|v| AbstractPoly::from_terms(n, v.into_iter().map(|(c, s)| (ws.monos[cands[c]].clone(), s))))
        .collect();
    let monos: Vec<SymMono> = cands.iter().map(|&k| ws.monos[k].clone()).collect();
    let found = canonical_rows(n, &monos, &kernel);
    (ws, found)
}

/// Drops central combinations of weight `w` that are polynomials in lower
/// ones and the central symbols.
fn new_centrals(
    ex: &mut Expander,
    ws: &WeightSpace,
    central: &[bool],
    known: &[(u32, AbstractPoly)],
    found: Vec<AbstractPoly>,
) -> Vec<AbstractPoly> {
    if found.is_empty() || known.is_empty() {
        return found;
    }
    let n = central.len();
    let weights = ex.weights().to_vec();
    let dim = ex.dim;
    // every product of known centrals and central symbols of weight w
    let mut products: Vec<AbstractPoly> = Vec::new();
    fn rec(k: usize, left: u32, acc: AbstractPoly, known: &[(u32, AbstractPoly)], out: &mut Vec<(u32, AbstractPoly)>) {
        if k == known.len() {
            out.push((left, acc));
            return;
        }
        let (wk, z) = &known[k];
        let mut cur = acc;
        let mut left = left;
        loop {
            rec(k + 1, left, cur.clone(), known, out);
            if *wk > left {
                break;
            }
            left -= wk;
            cur = cur.mul(z);
        }
    }
    let mut partial = Vec::new();
    rec(0, ws.weight, AbstractPoly::constant(n, Scalar::one()), known, &mut partial);
    for (left, p) in partial {
        if p.terms().all(|(m, _)| m.is_one()) {
            continue;
        }
        for m in symbol_monomials(&weights, central, left) {
            products.push(p.mul(&AbstractPoly::from_terms(n, [(m, Scalar::one())])));
        }
    }
    let trivial = |m: &SymMono| m.0.iter().zip(central).all(|(&e, &c)| e == 0 || c);
    let canon = |p: &AbstractPoly, ex: &mut Expander| -> Option<AbstractPoly> {
        let mut cache = HashMap::new();
        let mut total = Polynomial::zero(dim);
        for (m, c) in p.terms() {
            let v = match ex.cache.get(m) {
                Some(v) => v.clone(),
                None => expand_cached(m, &ex.values, dim, &mut cache),
            };
            total = &total + &v.scale(c);
        }
        match ws.express(&total) {
            Expression::Expressible(a) => Some(AbstractPoly::from_terms(
                n,
                a.terms().filter(|(m, _)| !trivial(m)).map(|(m, c)| (m.clone(), c.clone())),
            )),
            Expression::NotExpressible { .. } => None,
        }
    };
    let pos: HashMap<&SymMono, usize> = ws.monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let vec_of = |p: &AbstractPoly| -> SparseVec {
        let mut v: SparseVec = p.terms().map(|(m, c)| (pos[m], c.clone())).collect();
        v.sort_by_key(|e| e.0);
        v
    };
    let mut ech = crate::linalg::Echelon::new(ws.monos.len());
    for p in &products {
        if let Some(c) = canon(p, ex) {
            ech.insert(vec_of(&c));
        }
    }
    found
        .into_iter()
        .filter(|z| ech.insert(vec_of(z)).is_some())
        .collect()
}

/// One named entry of a discard or rewrite log.
#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub name: String,
    pub expression: AbstractPoly,
    /// `expression` rendered with the symbol names it was built over.
    pub text: String,
}

/// Result of [`change_basis`].
#[derive(Clone, Debug)]
pub struct BasisChange {
    pub basis: CommutantBasis,
    /// Every old entry rewritten in the new generators; entries that do not
    /// survive as a new generator are the discarded ones.
    pub rewrites: Vec<LogEntry>,
    pub discarded: Vec<String>,
}

/// Replaces `basis` by the generators defined in `spec`. Each definition is
/// a polynomial in the old symbols. Definitions must be homogeneous
/// commutant elements, and every old entry must be a polynomial in the new
/// generators.
pub fn change_basis(
    alg: &LieAlgebra,
    imposed: &[usize],
    basis: &CommutantBasis,
    spec: &BasisChangeSpec,
) -> Result<BasisChange, Error> {
    let names = basis.names();
    let values: Vec<Polynomial> = basis.entries.iter().map(|e| e.poly.clone()).collect();
    let mut named = Vec::new();
    for (name, expr) in spec.central.iter().chain(&spec.generators) {
        let a = parse_abstract(expr, &names)?;
        let p = a.eval(&values, alg.dim());
        if !matches!(p.grade(), Grade::Homogeneous(_)) {
            return Err(Error::BasisChange(format!("`{name}` is not homogeneous")));
        }
        if !imposed.iter().all(|&x| crate::poly::coadjoint(x, &p, alg).is_zero()) {
            return Err(Error::BasisChange(format!("`{name}` is not in the commutant")));
        }
        if named.iter().any(|(n, _): &(String, Polynomial)| n == name) {
            return Err(Error::BasisChange(format!("`{name}` defined twice")));
        }
        named.push((name.clone(), p));
    }
    let new = CommutantBasis::from_named(alg, named);
    // centrality comes from the actual brackets, but a declared central
    // generator that is not central is an error
    for (name, _) in &spec.central {
        if !new.get(name).unwrap().is_central {
            return Err(Error::BasisChange(format!("`{name}` is declared central but is not")));
        }
    }
    let mut ex = Expander::from_basis(alg, &new);
    let n = new.len();
    let mut spaces: HashMap<u32, WeightSpace> = HashMap::new();
    let mut rewrites = Vec::new();
    let mut discarded = Vec::new();
    for e in &basis.entries {
        let ws = spaces
            .entry(e.degree)
            .or_insert_with(|| ex.weight_space(e.degree, &vec![true; n]));
        match ws.express(&e.poly) {
            Expression::Expressible(a) => {
                let survives = new.entries.iter().any(|x| x.poly == e.poly);
                if !survives {
                    discarded.push(e.name.clone());
                }
                rewrites.push(LogEntry {
                    name: e.name.clone(),
                    text: a.render(&new.names()),
                    expression: a,
                });
            }
            Expression::NotExpressible { .. } => {
                return Err(Error::BasisChange(format!(
                    "`{}` is not a polynomial in the new generators",
                    e.name
                )))
            }
        }
    }
    Ok(BasisChange {
        basis: new,
        rewrites,
        discarded,
    })
}

/// Drops generators that appear linearly in a relation, taking the
/// highest-index one each time. Nonlinear relations never trigger a drop.
pub fn prune_linear_relations(alg: &LieAlgebra, basis: &CommutantBasis) -> (CommutantBasis, Vec<LogEntry>) {
    let mut cur = basis.clone();
    let mut log = Vec::new();
    loop {
        let n = cur.len();
        let mut degs: Vec<u32> = cur.entries.iter().map(|e| e.degree).collect();
        degs.sort_unstable();
        degs.dedup();
        let mut drop: Option<(usize, AbstractPoly)> = None;
        let mut ex = Expander::from_basis(alg, &cur);
        for d in degs {
            let ws = ex.weight_space(d, &vec![true; n]);
            for r in &ws.relations {
                let linear = (0..n).rev().find(|&k| !r.coeff(&SymMono::symbol(n, k)).is_zero());
                if let Some(k) = linear {
                    if drop.as_ref().is_none_or(|(j, _)| k > *j) {
                        drop = Some((k, r.clone()));
                    }
                }
            }
        }
        let Some((k, rel)) = drop else {
            return (cur, log);
        };
        // k = −(rel − c·k)/c in the remaining symbols
        let c = rel.coeff(&SymMono::symbol(n, k));
        let mut rest = rel.clone();
        rest.add_term(SymMono::symbol(n, k), &-&c);
        let expr = rest.scale(&(-c.inv().unwrap()));
        let names = cur.names();
        let keep: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        let reindexed = AbstractPoly::from_terms(
            n - 1,
            expr.terms()
                .map(|(m, c)| (SymMono(keep.iter().map(|&j| m.0[j]).collect()), c.clone())),
        );
        let kept: Vec<String> = keep.iter().map(|&j| names[j].clone()).collect();
        log.push(LogEntry {
            name: names[k].clone(),
            text: reindexed.render(&kept),
            expression: reindexed,
        });
        cur.entries.remove(k);
        cur.recompute_centrality(alg);
    }
}

/// Named coefficient of the cubic three-generator template.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRecord {
    /// `"{A,C}"` or `"{B,C}"`.
    pub bracket: String,
    /// Exponents of `(A, B)`.
    pub exponents: (u32, u32),
    /// Template name (`alpha`, ...), `None` for a term outside the template.
    pub name: Option<&'static str>,
    /// The template multiplies the coefficient by this factor (`2γ`, `2ξ`).
    pub factor: i64,
    /// Coefficient divided by `factor`, a polynomial in central symbols.
    pub value: AbstractPoly,
}

/// Coefficient names of `{A,C}` and `{B,C}` by `(A, B)` exponents.
pub const AC_TEMPLATE: [((u32, u32), &str, i64); 6] = [
    ((2, 0), "alpha", 1),
    ((0, 2), "beta", 1),
    ((1, 1), "gamma", 2),
    ((1, 0), "delta", 1),
    ((0, 1), "epsilon", 1),
    ((0, 0), "zeta", 1),
];
pub const BC_TEMPLATE: [((u32, u32), &str, i64); 7] = [
    ((3, 0), "lambda", 1),
    ((2, 0), "mu", 1),
    ((0, 2), "nu", 1),
    ((1, 1), "xi", 2),
    ((1, 0), "rho", 1),
    ((0, 1), "sigma", 1),
    ((0, 0), "chi", 1),
];

#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<GeneratorSymbol>,
    /// `(i, j)` with `i < j` → `{g_i, g_j}`.
    pub brackets: BTreeMap<(usize, usize), AbstractPoly>,
    pub relations: Vec<AbstractPoly>,
    /// Nontrivial central combinations, by weight.
    pub centrals: Vec<AbstractPoly>,
    pub casimirs: Vec<AbstractPoly>,
    pub generating_function: Option<AbstractPoly>,
    pub records: Vec<CoefficientRecord>,
    /// `(A, B, C)` positions when the cubic template applies.
    pub triple: Option<(usize, usize, usize)>,
}

impl Presentation {
    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.weight).collect()
    }

    pub fn bracket(&self, i: usize, j: usize) -> AbstractPoly {
        let n = self.generators.len();
        match i.cmp(&j) {
            Ordering::Equal => AbstractPoly::zero(n),
            Ordering::Less => self.brackets.get(&(i, j)).cloned().unwrap_or_else(|| AbstractPoly::zero(n)),
            Ordering::Greater => self
                .brackets
                .get(&(j, i))
                .map(|p| p.scale(&-Scalar::one()))
                .unwrap_or_else(|| AbstractPoly::zero(n)),
        }
    }

    pub fn record(&self, name: &str) -> Option<&CoefficientRecord> {
        self.records.iter().find(|r| r.name == Some(name))
    }
}

/// What [`build_presentation`] computes besides the bracket table.
#[derive(Clone, Debug)]
pub struct PresentationOptions {
    /// Relations are collected at every weight up to this bound
    /// (default: the largest generator weight).
    pub relation_weight: Option<u32>,
    /// Search central combinations at the generator weights.
    pub centrals: bool,
}

impl Default for PresentationOptions {
    fn default() -> Self {
        PresentationOptions {
            relation_weight: None,
            centrals: true,
        }
    }
}

/// Expresses every pairwise bracket, collects relations and central
/// combinations, and fills the cubic coefficient records when the
/// generators form a triple `{A,B} = C`.
pub fn build_presentation(alg: &LieAlgebra, basis: &CommutantBasis, opts: &PresentationOptions) -> Result<Presentation, Error> {
    let n = basis.len();
    let generators: Vec<GeneratorSymbol> = basis
        .entries
        .iter()
        .map(|e| GeneratorSymbol {
            name: e.name.clone(),
            weight: e.degree,
            is_central: e.is_central,
        })
        .collect();
    let weights = basis_weights(basis);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let targets: Vec<((usize, usize), Polynomial)> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(((i, j), lp_bracket(&basis.entries[i].poly, &basis.entries[j].poly, alg)?)))
        .collect::<Result<_, Error>>()?;
    let mut by_weight: BTreeMap<u32, Vec<((usize, usize), Polynomial)>> = BTreeMap::new();
    let mut brackets = BTreeMap::new();
    for (ij, t) in targets {
        if t.is_zero() {
            continue;
        }
        by_weight
            .entry(weights[ij.0] + weights[ij.1] - 1)
            .or_default()
            .push((ij, t));
    }
    let mut ex = Expander::from_basis(alg, basis);
    let all = vec![true; n];
    let max_w = weights.iter().copied().max().unwrap_or(0);
    let rel_w = opts.relation_weight.unwrap_or(max_w);
    let mut relations = Vec::new();
    let mut spaces: BTreeMap<u32, WeightSpace> = BTreeMap::new();
    for w in 1..=rel_w {
        let ws = ex.weight_space(w, &all);
        relations.extend(canonical_rows(n, &ws.monos, &ws.relations));
        spaces.insert(w, ws);
    }
    for (w, list) in by_weight {
        let ws = match spaces.remove(&w) {
            Some(ws) => ws,
            None => ex.weight_space(w, &all),
        };
        let results: Vec<((usize, usize), Expression)> =
            list.par_iter().map(|(ij, t)| (*ij, ws.express(t))).collect();
        for (ij, r) in results {
            match r {
                Expression::Expressible(a) => {
                    brackets.insert(ij, a);
                }
                Expression::NotExpressible { .. } => {
                    return Err(Error::NotExpressible(
                        basis.entries[ij.0].name.clone(),
                        basis.entries[ij.1].name.clone(),
                    ))
                }
            }
        }
    }
    let mut centrals = Vec::new();
    if opts.centrals {
        let mut wts: Vec<u32> = basis.entries.iter().filter(|e| !e.is_central).map(|e| e.degree).collect();
        wts.sort_unstable();
        wts.dedup();
        let mask: Vec<bool> = basis.entries.iter().map(|e| e.is_central).collect();
        let mut known: Vec<(u32, AbstractPoly)> = Vec::new();
        for w in wts {
            let (ws, found) = central_at(&mut ex, alg, basis, w);
            for z in new_centrals(&mut ex, &ws, &mask, &known, found) {
                known.push((w, z.clone()));
                centrals.push(z);
            }
        }
    }
    let mut pres = Presentation {
        generators,
        brackets,
        relations,
        centrals,
        casimirs: Vec::new(),
        generating_function: None,
        records: Vec::new(),
        triple: None,
    };
    if let Some(t) = find_triple(&pres) {
        pres.triple = Some(t);
        pres.records = coefficient_records(&pres, t);
    }
    Ok(pres)
}

/// Noncentral `(A, B, C)` with `{A,B} = C` exactly, when the noncentral
/// generators are exactly three.
pub fn find_triple(pres: &Presentation) -> Option<(usize, usize, usize)> {
    let nc: Vec<usize> = (0..pres.generators.len())
        .filter(|&k| !pres.generators[k].is_central)
        .collect();
    if nc.len() != 3 {
        return None;
    }
    let n = pres.generators.len();
    for &(a, b, c) in &[(nc[0], nc[1], nc[2]), (nc[0], nc[2], nc[1]), (nc[1], nc[2], nc[0])] {
        if pres.bracket(a, b) == AbstractPoly::symbol(n, c) {
            return Some((a, b, c));
        }
    }
    None
}

fn coefficient_records(pres: &Presentation, (a, b, c): (usize, usize, usize)) -> Vec<CoefficientRecord> {
    let mut out = Vec::new();
    for (label, x, template) in [
        ("{A,C}", a, &AC_TEMPLATE[..]),
        ("{B,C}", b, &BC_TEMPLATE[..]),
    ] {
        let br = pres.bracket(x, c);
        for (exps, coeff) in br.coefficients_in(&[a, b]) {
            let key = (exps[0], exps[1]);
            let hit = template.iter().find(|(e, _, _)| *e == key);
            let (name, factor) = hit.map(|(_, n, f)| (Some(*n), *f)).unwrap_or((None, 1));
            // terms with C in them fall outside any template slot
            let (name, factor) = if coeff.terms().any(|(m, _)| m.0[c] > 0) {
                (None, 1)
            } else {
                (name, factor)
            };
            out.push(CoefficientRecord {
                bracket: label.to_string(),
                exponents: key,
                name,
                factor,
                value: coeff.scale(&Scalar::frac(1, factor)),
            });
        }
        // template slots with zero coefficient are recorded as zero
        for (e, name, f) in template {
            if !out.iter().any(|r| r.bracket == label && r.exponents == *e) {
                out.push(CoefficientRecord {
                    bracket: label.to_string(),
                    exponents: *e,
                    name: Some(name),
                    factor: *f,
                    value: AbstractPoly::zero(pres.generators.len()),
                });
            }
        }
    }
    out
}

/// A mismatch found by [`verify_presentation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub what: String,
    pub detail: String,
}

/// Substitutes the basis polynomials into every entry and checks it
/// against direct computation.
pub fn verify_presentation(alg: &LieAlgebra, pres: &Presentation, basis: &CommutantBasis) -> Vec<Mismatch> {
    let values: Vec<Polynomial> = basis.entries.iter().map(|e| e.poly.clone()).collect();
    let names = pres.names();
    let weights = pres.weights();
    let dim = alg.dim();
    let n = pres.generators.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out: Vec<Mismatch> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let expected = lp_bracket(&values[i], &values[j], alg).ok()?;
            let entry = pres.bracket(i, j);
            let label = format!("{{{},{}}}", names[i], names[j]);
            if !entry.is_weighted_homogeneous(&weights, weights[i] + weights[j] - 1) {
                return Some(Mismatch {
                    what: label,
                    detail: "entry is not of weighted degree p+q-1".into(),
                });
            }
            let diff = &entry.eval(&values, dim) - &expected;
            (!diff.is_zero()).then(|| Mismatch {
                what: label,
                detail: format!("evaluation differs by {} terms", diff.len()),
            })
        })
        .collect();
    for (k, r) in pres.relations.iter().enumerate() {
        if !r.eval(&values, dim).is_zero() {
            out.push(Mismatch {
                what: format!("relation {}", k + 1),
                detail: r.render(&names),
            });
        }
    }
    for (label, list) in [("central", &pres.centrals), ("casimir", &pres.casimirs)] {
        for z in list {
            let p = z.eval(&values, dim);
            for (g, v) in values.iter().enumerate() {
                if !lp_bracket(&p, v, alg).map(|b| b.is_zero()).unwrap_or(false) {
                    out.push(Mismatch {
                        what: format!("{label} {}", z.render(&names)),
                        detail: format!("does not commute with {}", names[g]),
                    });
                }
            }
        }
    }
    out
}

/// Generating function and Casimir of a cubic three-generator algebra.
#[derive(Clone, Debug)]
pub struct CasimirData {
    pub h: AbstractPoly,
    /// `K = C² − 2h`.
    pub k: AbstractPoly,
    /// `K` rewritten in the central symbols, when possible.
    pub k_central: Option<AbstractPoly>,
    /// Whether `{K, g} = 0` was confirmed for `g` in `A, B, C`.
    pub verified_central: bool,
}

/// Reconstructs `h` from `{A,C} = ∂h/∂B`, `{B,C} = −∂h/∂A`, forms
/// `K = C² − 2h`, checks it is central and rewrites it in the centrals.
pub fn casimir_from_h(alg: &LieAlgebra, pres: &Presentation, basis: &CommutantBasis) -> Result<CasimirData, Error> {
    let n = pres.generators.len();
    let (a, b, c) = pres
        .triple
        .or_else(|| find_triple(pres))
        .ok_or_else(|| Error::Inconsistent("no generator triple with {A,B} = C".into()))?;
    let ac = pres.bracket(a, c);
    let bc = pres.bracket(b, c);
    let mut free = vec![true; n];
    free[c] = false;
    if !ac.uses_only(&free) || !bc.uses_only(&free) {
        return Err(Error::Inconsistent("{A,C} or {B,C} involves C".into()));
    }
    let h1 = ac.integrate(b);
    // what is left must not depend on B
    let rest = bc.scale(&-Scalar::one()).sub(&h1.derivative(a));
    if !rest.derivative(b).is_zero() {
        return Err(Error::Inconsistent("mixed partials of h disagree".into()));
    }
    let h = h1.add(&rest.integrate(a));
    let cc = AbstractPoly::symbol(n, c);
    let k = cc.mul(&cc).sub(&h.scale(&Scalar::from_int(2)));
    let values: Vec<Polynomial> = basis.entries.iter().map(|e| e.poly.clone()).collect();
    let kp = k.eval(&values, alg.dim());
    let verified_central = [a, b, c]
        .iter()
        .all(|&g| lp_bracket(&kp, &values[g], alg).map(|x| x.is_zero()).unwrap_or(false));
    let k_central = match kp.grade() {
        Grade::Zero => Some(AbstractPoly::zero(n)),
        Grade::Homogeneous(w) => {
            let mask: Vec<bool> = pres.generators.iter().map(|g| g.is_central).collect();
            let mut ex = Expander::from_basis(alg, basis);
            match ex.weight_space(w, &mask).express(&kp) {
                Expression::Expressible(z) => Some(z),
                Expression::NotExpressible { .. } => None,
            }
        }
        Grade::Mixed => None,
    };
    Ok(CasimirData {
        h,
        k,
        k_central,
        verified_central,
    })
}

/// Whether every pairwise bracket of `basis` is a polynomial in it.
pub fn all_brackets_expressible(alg: &LieAlgebra, basis: &CommutantBasis) -> bool {
    let opts = PresentationOptions {
        relation_weight: Some(0),
        centrals: false,
    };
    build_presentation(alg, basis, &opts).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_monomial_order() {
        // weights (2, 2, 3): weight 4 → b1², b1b2, b2²
        let ms = symbol_monomials(&[2, 2, 3], &[true; 3], 4);
        assert_eq!(ms, vec![SymMono(vec![2, 0, 0]), SymMono(vec![1, 1, 0]), SymMono(vec![0, 2, 0])]);
        let ms = symbol_monomials(&[1, 2], &[true; 2], 2);
        assert_eq!(ms, vec![SymMono(vec![0, 1]), SymMono(vec![2, 0])]);
    }

    #[test]
    fn integrate_and_differentiate() {
        let names: Vec<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
        let p = parse_abstract("3*A^2*B + B", &names).unwrap();
        assert_eq!(p.integrate(1).derivative(1), p);
        assert_eq!(p.integrate(0).render(&names), "A*B + A^3*B");
    }

    #[test]
    fn abelian_presentation_is_trivial() {
        let alg = LieAlgebra::new(vec!["X".into(), "Y".into(), "Z".into()], &[]).unwrap();
        let r = crate::commutant::run(&alg, &[0], 2, None);
        let p = build_presentation(&alg, &r.basis, &PresentationOptions::default()).unwrap();
        assert!(p.brackets.is_empty());
        assert!(verify_presentation(&alg, &p, &r.basis).is_empty());
    }
}
