//! Polynomials in the universal enveloping algebra `U(g)`, kept in the
//! ordered (PBW) basis given by the algebra's generator order.
//!
//! Products are normalized by inserting one letter at a time into an
//! ordered word: `w'·y·x = (w'·x)·y + w'·[y, x]` for `y > x`. The results
//! of single-letter insertions are memoized per [`Enveloping`].

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::algebra::LieAlgebra;
use crate::closure::{AbstractPoly, Presentation, SymMono};
use crate::commutant::CommutantBasis;
use crate::linalg::{Insert, SparseVec, TrackedEchelon};
use crate::parse::{evaluate, Env};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Scalar;
use crate::Error;

/// Symmetrization is only offered up to this input degree.
pub const MAX_SYMMETRIZE_DEGREE: u32 = 6;

/// A word in the generators, by index.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NCWord(pub Vec<u16>);

impl NCWord {
    pub fn one() -> Self {
        NCWord(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        NCWord(vec![i as u16])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Non-decreasing letters.
    pub fn is_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Commutative image of the word.
    pub fn monomial(&self) -> Monomial {
        self.0
            .iter()
            .fold(Monomial::one(), |m, &i| m.mul(&Monomial::var(i as usize)))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == self.0[k] {
                run += 1;
            }
            let name = &names[self.0[k] as usize];
            parts.push(if run == 1 {
                name.clone()
            } else {
                format!("{name}^{run}")
            });
            k += run;
        }
        parts.join("*")
    }
}

/// Higher degree first, then lexicographic.
impl Ord for NCWord {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.len().cmp(&self.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NCWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of `U(g)` as a combination of words. When `normalized`, every
/// word is ordered and the representation is unique.
#[derive(Clone, PartialEq, Eq)]
pub struct NCPolynomial {
    dim: usize,
    terms: BTreeMap<NCWord, Scalar>,
    normalized: bool,
}

impl NCPolynomial {
    pub fn zero(dim: usize) -> Self {
        NCPolynomial {
            dim,
            terms: BTreeMap::new(),
            normalized: true,
        }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let mut p = NCPolynomial::zero(dim);
        p.add_term(NCWord::one(), &c);
        p
    }

    pub fn letter(dim: usize, i: usize) -> Self {
        let mut p = NCPolynomial::zero(dim);
        p.add_term(NCWord::letter(i), &Scalar::one());
        p
    }

    /// A single word with coefficient; normalized only if the word is ordered.
    pub fn word(dim: usize, w: NCWord, c: Scalar) -> Self {
        let mut p = NCPolynomial::zero(dim);
        p.add_term(w, &c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NCWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &NCWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: NCWord, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if !w.is_ordered() {
            self.normalized = false;
        }
        let e = self.terms.entry(w.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.degree()).max()
    }

    pub fn add(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &NCPolynomial) -> NCPolynomial {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> NCPolynomial {
        if c.is_zero() {
            return NCPolynomial::zero(self.dim);
        }
        NCPolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
            normalized: self.normalized,
        }
    }

    /// Terms of exactly degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> NCPolynomial {
        NCPolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            normalized: self.normalized,
        }
    }

    /// Commutative image (`X_i → x_i`) of every word.
    pub fn commutative(&self) -> Polynomial {
        Polynomial::from_terms(
            self.dim,
            self.terms.iter().map(|(w, c)| (w.monomial(), c.clone())),
        )
    }

    /// Commutative image of the top-degree part.
    pub fn leading(&self) -> Polynomial {
        match self.degree() {
            Some(d) => self.homogeneous_part(d).commutative(),
            None => Polynomial::zero(self.dim),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let (neg, body) = crate::poly::render_coeff(c);
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let word = w.render(names);
            match (body.as_deref(), word.as_str()) {
                (None, w) => out.push_str(w),
                (Some(b), "1") => out.push_str(b),
                (Some(b), w) => {
                    out.push_str(b);
                    out.push('*');
                    out.push_str(w);
                }
            }
        }
        out
    }
}

impl fmt::Debug for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|k| format!("X{}", k + 1)).collect();
        f.write_str(&self.render(&names))
    }
}

// Longer words are rewritten without caching; their count grows too fast.
const MEMO_MAX_LEN: usize = 14;

type Terms = Rc<Vec<(Vec<u16>, Scalar)>>;

/// Arithmetic in `U(g)` for one algebra, with a memo of letter insertions.
pub struct Enveloping<'a> {
    alg: &'a LieAlgebra,
    // memo[x][w] = w·x normalized, for ordered w whose last letter exceeds x
    memo: RefCell<Vec<HashMap<Vec<u16>, Terms>>>,
}

impl<'a> Enveloping<'a> {
    pub fn new(alg: &'a LieAlgebra) -> Self {
        Enveloping {
            alg,
            memo: RefCell::new(vec![HashMap::new(); alg.dim()]),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.alg
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn names(&self) -> Vec<String> {
        self.alg.names().to_vec()
    }

    /// `w·x` in ordered form, for an ordered word `w`.
    fn insert_letter(&self, w: &[u16], x: u16) -> Terms {
        match w.last() {
            None => return Rc::new(vec![(vec![x], Scalar::one())]),
            Some(&y) if y <= x => {
                let mut v = w.to_vec();
                v.push(x);
                return Rc::new(vec![(v, Scalar::one())]);
            }
            _ => {}
        }
        let memoize = w.len() <= MEMO_MAX_LEN;
        if memoize {
            if let Some(t) = self.memo.borrow()[x as usize].get(w) {
                return t.clone();
            }
        }
        let (head, y) = (&w[..w.len() - 1], w[w.len() - 1]);
        let mut acc: HashMap<Vec<u16>, Scalar> = HashMap::new();
        // (head·x)·y
        for (t, c) in self.insert_letter(head, x).iter() {
            for (u, d) in self.insert_letter(t, y).iter() {
                *acc.entry(u.clone()).or_default() += &(c * d);
            }
        }
        // head·[y, x]
        for (k, s) in self.alg.bracket(y as usize, x as usize) {
            for (u, d) in self.insert_letter(head, *k as u16).iter() {
                *acc.entry(u.clone()).or_default() += &(s * d);
            }
        }
        let terms: Terms = Rc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        if memoize {
            self.memo.borrow_mut()[x as usize].insert(w.to_vec(), terms.clone());
        }
        terms
    }

    fn right_letter(&self, p: &HashMap<Vec<u16>, Scalar>, x: u16) -> HashMap<Vec<u16>, Scalar> {
        let mut acc: HashMap<Vec<u16>, Scalar> = HashMap::new();
        for (w, c) in p {
            for (u, d) in self.insert_letter(w, x).iter() {
                *acc.entry(u.clone()).or_default() += &(c * d);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    fn finish(&self, acc: HashMap<Vec<u16>, Scalar>) -> NCPolynomial {
        NCPolynomial {
            dim: self.dim(),
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(w, c)| (NCWord(w), c))
                .collect(),
            normalized: true,
        }
    }

    /// Rewrites every word into ordered form.
    pub fn normalize(&self, p: &NCPolynomial) -> NCPolynomial {
        if p.normalized {
            return p.clone();
        }
        let mut acc: HashMap<Vec<u16>, Scalar> = HashMap::new();
        for (w, c) in &p.terms {
            let mut cur: HashMap<Vec<u16>, Scalar> = HashMap::from([(Vec::new(), c.clone())]);
            for &x in &w.0 {
                cur = self.right_letter(&cur, x);
            }
            for (u, d) in cur {
                *acc.entry(u).or_default() += &d;
            }
        }
        self.finish(acc)
    }

    /// Normalized product `p·q`.
    pub fn mul(&self, p: &NCPolynomial, q: &NCPolynomial) -> NCPolynomial {
        let p = self.normalize(p);
        let q = self.normalize(q);
        let base: HashMap<Vec<u16>, Scalar> = p.terms.iter().map(|(w, c)| (w.0.clone(), c.clone())).collect();
        // words of q in lexicographic order share prefixes; stack[d] = p·prefix[..d]
        let mut qs: Vec<(&Vec<u16>, &Scalar)> = q.terms.iter().map(|(w, c)| (&w.0, c)).collect();
        qs.sort_by(|a, b| a.0.cmp(b.0));
        let mut stack: Vec<HashMap<Vec<u16>, Scalar>> = vec![base];
        let mut prefix: Vec<u16> = Vec::new();
        let mut acc: HashMap<Vec<u16>, Scalar> = HashMap::new();
        for (w, c) in qs {
            let common = prefix.iter().zip(w.iter()).take_while(|(a, b)| a == b).count();
            stack.truncate(common + 1);
            prefix.truncate(common);
            for &x in &w[common..] {
                let next = self.right_letter(stack.last().unwrap(), x);
                stack.push(next);
                prefix.push(x);
            }
            for (u, d) in stack.last().unwrap() {
                *acc.entry(u.clone()).or_default() += &(d * c);
            }
        }
        self.finish(acc)
    }

    pub fn pow(&self, p: &NCPolynomial, e: u32) -> NCPolynomial {
        let mut acc = NCPolynomial::constant(self.dim(), Scalar::one());
        for _ in 0..e {
            acc = self.mul(&acc, p);
        }
        acc
    }

    /// `pq − qp`, normalized.
    pub fn commutator(&self, p: &NCPolynomial, q: &NCPolynomial) -> NCPolynomial {
        self.mul(p, q).sub(&self.mul(q, p))
    }

    /// `pq + qp`, normalized.
    pub fn anticommutator(&self, p: &NCPolynomial, q: &NCPolynomial) -> NCPolynomial {
        self.mul(p, q).add(&self.mul(q, p))
    }

    /// Symmetrization map: each monomial becomes the average of its distinct
    /// orderings, then normalized.
    pub fn symmetrize(&self, p: &Polynomial) -> Result<NCPolynomial, Error> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch(p.dim(), self.dim()));
        }
        let mut acc: HashMap<Vec<u16>, Scalar> = HashMap::new();
        for (m, c) in p.terms() {
            if m.degree() > MAX_SYMMETRIZE_DEGREE {
                return Err(Error::Unsupported(format!(
                    "symmetrization of degree {} exceeds {MAX_SYMMETRIZE_DEGREE}",
                    m.degree()
                )));
            }
            let mut letters: Vec<u16> = m
                .factors()
                .flat_map(|(v, e)| std::iter::repeat_n(v as u16, e as usize))
                .collect();
            letters.sort_unstable();
            let mut orbit = 0i64;
            let mut sum: HashMap<Vec<u16>, Scalar> = HashMap::new();
            loop {
                orbit += 1;
                let mut cur: HashMap<Vec<u16>, Scalar> = HashMap::from([(Vec::new(), Scalar::one())]);
                for &x in &letters {
                    cur = self.right_letter(&cur, x);
                }
                for (u, d) in cur {
                    *sum.entry(u).or_default() += &d;
                }
                if !next_permutation(&mut letters) {
                    break;
                }
            }
            let f = c * &Scalar::frac(1, orbit);
            for (u, d) in sum {
                *acc.entry(u).or_default() += &(&d * &f);
            }
        }
        Ok(self.finish(acc))
    }

    /// Drops the insertion memo.
    pub fn clear_memo(&self) {
        for m in self.memo.borrow_mut().iter_mut() {
            m.clear();
        }
    }

    pub fn parse(&self, text: &str) -> Result<NCPolynomial, Error> {
        evaluate(text, &NCEnv { env: self })
    }
}

fn next_permutation(v: &mut [u16]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Parses expressions into normalized elements of `U(g)`; products keep
/// the written order.
pub struct NCEnv<'e, 'a> {
    pub env: &'e Enveloping<'a>,
}

impl Env for NCEnv<'_, '_> {
    type Value = NCPolynomial;
    fn constant(&self, c: Scalar) -> NCPolynomial {
        NCPolynomial::constant(self.env.dim(), c)
    }
    fn variable(&self, name: &str) -> Result<NCPolynomial, Error> {
        self.env
            .alg
            .index_of(name)
            .map(|k| NCPolynomial::letter(self.env.dim(), k))
            .ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))
    }
    fn add(&self, a: &NCPolynomial, b: &NCPolynomial) -> NCPolynomial {
        a.add(b)
    }
    fn mul(&self, a: &NCPolynomial, b: &NCPolynomial) -> NCPolynomial {
        self.env.mul(a, b)
    }
    fn scale(&self, a: &NCPolynomial, c: &Scalar) -> NCPolynomial {
        a.scale(c)
    }
    fn as_scalar(&self, v: &NCPolynomial) -> Option<Scalar> {
        match v.degree() {
            None => Some(Scalar::zero()),
            Some(0) => Some(v.coeff(&NCWord::one())),
            _ => None,
        }
    }
}

/// Normal form of `p` in the ordered basis.
pub fn pbw_normalize(p: &NCPolynomial, alg: &LieAlgebra) -> NCPolynomial {
    Enveloping::new(alg).normalize(p)
}

pub fn symmetrize(p: &Polynomial, alg: &LieAlgebra) -> Result<NCPolynomial, Error> {
    Enveloping::new(alg).symmetrize(p)
}

pub fn nc_commutator(p: &NCPolynomial, q: &NCPolynomial, alg: &LieAlgebra) -> NCPolynomial {
    Enveloping::new(alg).commutator(p, q)
}

/// A named element of `U(g)` used as an abstract generator.
#[derive(Clone, Debug)]
pub struct NCGenerator {
    pub name: String,
    pub poly: NCPolynomial,
    pub weight: u32,
    pub is_central: bool,
}

/// An ordered product of generators, or the anticommutator of two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Word(Vec<usize>),
    Anticommutator(usize, usize),
}

impl Structure {
    pub fn one() -> Self {
        Structure::Word(Vec::new())
    }

    pub fn power(g: usize, e: usize) -> Self {
        Structure::Word(vec![g; e])
    }

    pub fn weight(&self, weights: &[u32]) -> u32 {
        match self {
            Structure::Word(w) => w.iter().map(|&g| weights[g]).sum(),
            Structure::Anticommutator(a, b) => weights[*a] + weights[*b],
        }
    }

    /// Commutative image; the anticommutator `{a,b}` maps to `2ab`.
    pub fn classical(&self, nsym: usize) -> AbstractPoly {
        match self {
            Structure::Word(w) => w
                .iter()
                .fold(AbstractPoly::constant(nsym, Scalar::one()), |acc, &g| {
                    acc.mul(&AbstractPoly::symbol(nsym, g))
                }),
            Structure::Anticommutator(a, b) => AbstractPoly::symbol(nsym, *a)
                .mul(&AbstractPoly::symbol(nsym, *b))
                .scale(&Scalar::from_int(2)),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            Structure::Word(w) if w.is_empty() => "1".into(),
            Structure::Word(w) => NCWord(w.iter().map(|&g| g as u16).collect()).render(names),
            Structure::Anticommutator(a, b) => format!("{{{},{}}}", names[*a], names[*b]),
        }
    }
}

/// One unknown of an ansatz: a central monomial (left factor) times a
/// structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnsatzTerm {
    pub central: SymMono,
    pub structure: Structure,
}

/// Every central monomial of weight up to `max_weight − weight(s)` times
/// each structure `s`.
pub fn template_ansatz(gens: &[NCGenerator], structures: &[Structure], max_weight: u32) -> Vec<AnsatzTerm> {
    let weights: Vec<u32> = gens.iter().map(|g| g.weight).collect();
    let central: Vec<bool> = gens.iter().map(|g| g.is_central).collect();
    let mut out = Vec::new();
    for s in structures {
        let ws = s.weight(&weights);
        if ws > max_weight {
            continue;
        }
        for w in 0..=max_weight - ws {
            for m in crate::closure::symbol_monomials(&weights, &central, w) {
                out.push(AnsatzTerm {
                    central: m,
                    structure: s.clone(),
                });
            }
        }
    }
    out
}

/// Builds concrete elements for ansatz terms, caching central monomials.
pub struct Realizer<'e, 'a> {
    env: &'e Enveloping<'a>,
    gens: &'e [NCGenerator],
    central: HashMap<SymMono, NCPolynomial>,
    structures: HashMap<Structure, NCPolynomial>,
}

impl<'e, 'a> Realizer<'e, 'a> {
    pub fn new(env: &'e Enveloping<'a>, gens: &'e [NCGenerator]) -> Self {
        Realizer {
            env,
            gens,
            central: HashMap::new(),
            structures: HashMap::new(),
        }
    }

    pub fn central_monomial(&mut self, m: &SymMono) -> NCPolynomial {
        if let Some(p) = self.central.get(m) {
            return p.clone();
        }
        let dim = self.env.dim();
        let p = match m.0.iter().rposition(|&e| e > 0) {
            None => NCPolynomial::constant(dim, Scalar::one()),
            Some(k) => {
                let mut rest = m.clone();
                rest.0[k] -= 1;
                let r = self.central_monomial(&rest);
                self.env.mul(&r, &self.gens[k].poly)
            }
        };
        self.central.insert(m.clone(), p.clone());
        p
    }

    pub fn structure(&mut self, s: &Structure) -> NCPolynomial {
        if let Some(p) = self.structures.get(s) {
            return p.clone();
        }
        let dim = self.env.dim();
        let p = match s {
            Structure::Word(w) if w.is_empty() => NCPolynomial::constant(dim, Scalar::one()),
            Structure::Word(w) => {
                let head = self.structure(&Structure::Word(w[..w.len() - 1].to_vec()));
                self.env.mul(&head, &self.gens[w[w.len() - 1]].poly)
            }
            Structure::Anticommutator(a, b) => self.env.anticommutator(&self.gens[*a].poly, &self.gens[*b].poly),
        };
        self.structures.insert(s.clone(), p.clone());
        p
    }

    pub fn term(&mut self, t: &AnsatzTerm) -> NCPolynomial {
        let c = self.central_monomial(&t.central);
        let s = self.structure(&t.structure);
        if t.central.is_one() {
            s
        } else {
            self.env.mul(&c, &s)
        }
    }

    /// `Σ coeff(central) · structure` with coefficients polynomial in the
    /// central generators, realized by left multiplication.
    pub fn combination(&mut self, terms: &[(AbstractPoly, Structure)]) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.env.dim());
        for (coeff, s) in terms {
            for (m, c) in coeff.terms() {
                let t = self.term(&AnsatzTerm {
                    central: m.clone(),
                    structure: s.clone(),
                });
                out = out.add(&t.scale(c));
            }
        }
        out
    }
}

/// Coefficients found by [`nc_express`].
#[derive(Clone, Debug)]
pub struct NCExpression {
    pub terms: Vec<(AnsatzTerm, Scalar)>,
    nsym: usize,
}

impl NCExpression {
    /// Coefficient of a structure as a polynomial in the central symbols.
    pub fn coefficient(&self, s: &Structure) -> AbstractPoly {
        AbstractPoly::from_terms(
            self.nsym,
            self.terms
                .iter()
                .filter(|(t, _)| &t.structure == s)
                .map(|(t, c)| (t.central.clone(), c.clone())),
        )
    }

    pub fn structures(&self) -> Vec<Structure> {
        let mut s: Vec<Structure> = self.terms.iter().map(|(t, _)| t.structure.clone()).collect();
        s.sort();
        s.dedup();
        s
    }
}

#[derive(Clone, Debug)]
pub enum NCOutcome {
    Expressed(NCExpression),
    NotExpressible { residual: NCPolynomial },
}

/// Solves `target = Σ k_t · central(t) · structure(t)` over the ansatz for
/// exact scalars `k_t`. When the ansatz elements are dependent, the earliest
/// independent ones carry the solution.
pub fn nc_express(env: &Enveloping, target: &NCPolynomial, gens: &[NCGenerator], ansatz: &[AnsatzTerm]) -> NCOutcome {
    let target = env.normalize(target);
    let mut realizer = Realizer::new(env, gens);
    let elements: Vec<NCPolynomial> = ansatz.iter().map(|t| realizer.term(t)).collect();
    let mut words: Vec<NCWord> = elements
        .iter()
        .chain(std::iter::once(&target))
        .flat_map(|p| p.terms.keys().cloned())
        .collect();
    words.sort();
    words.dedup();
    let index: HashMap<&NCWord, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let vec_of = |p: &NCPolynomial| -> SparseVec {
        let mut v: SparseVec = p.terms.iter().map(|(w, c)| (index[w], c.clone())).collect();
        v.sort_by_key(|e| e.0);
        v
    };
    let mut ech = TrackedEchelon::new(words.len());
    for e in &elements {
        // dependent elements never enter a combination
        if let Insert::Dependent(_) = ech.insert(vec_of(e)) {}
    }
    let (residual, combo) = ech.reduce(vec_of(&target));
    if !residual.is_empty() {
        let mut r = NCPolynomial::zero(env.dim());
        for (k, c) in residual {
            r.add_term(words[k].clone(), &c);
        }
        return NCOutcome::NotExpressible { residual: r };
    }
    NCOutcome::Expressed(NCExpression {
        terms: combo.into_iter().map(|(k, c)| (ansatz[k].clone(), c)).collect(),
        nsym: gens.len(),
    })
}

/// Outcome of [`nc_casimir_check`].
#[derive(Clone, Debug)]
pub struct CasimirReport {
    /// Generator names whose commutator with `K` is not zero.
    pub failures: Vec<String>,
    /// Whether the top-degree part matches the classical image, when one
    /// was supplied.
    pub leading_matches: Option<bool>,
    /// Degree of `K`.
    pub degree: Option<usize>,
}

impl CasimirReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.leading_matches != Some(false)
    }
}

/// Checks `[K, g] = 0` for every generator and compares the top-degree
/// part of `K` with `classical` when given.
pub fn nc_casimir_check(
    env: &Enveloping,
    k: &NCPolynomial,
    gens: &[(&str, &NCPolynomial)],
    classical: Option<&Polynomial>,
) -> CasimirReport {
    let k = env.normalize(k);
    let failures = gens
        .iter()
        .filter(|(_, g)| !env.commutator(&k, g).is_zero())
        .map(|(n, _)| n.to_string())
        .collect();
    let leading_matches = classical.map(|c| {
        let lead = k.leading();
        match (lead.is_zero(), c.is_zero()) {
            (true, true) => true,
            (true, false) | (false, true) => false,
            _ => &lead == c,
        }
    });
    CasimirReport {
        failures,
        leading_matches,
        degree: k.degree(),
    }
}

/// Named constant of the lifted cubic algebra.
#[derive(Clone, Debug)]
pub struct NCRecord {
    /// `"[A,C]"` or `"[B,C]"`.
    pub bracket: String,
    pub structure: Structure,
    pub name: &'static str,
    /// Polynomial in the central symbols.
    pub value: AbstractPoly,
}

/// The cubic algebra of a three-generator presentation, lifted to `U(g)`.
pub struct CubicLift {
    pub generators: Vec<NCGenerator>,
    /// `(A, B, C)` positions.
    pub triple: (usize, usize, usize),
    pub ac: NCExpression,
    pub bc: NCExpression,
    pub records: Vec<NCRecord>,
}

impl CubicLift {
    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn record(&self, name: &str) -> Option<&NCRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    fn value(&self, name: &str) -> AbstractPoly {
        self.record(name)
            .map(|r| r.value.clone())
            .unwrap_or_else(|| AbstractPoly::zero(self.generators.len()))
    }

    /// The ordered-form Casimir of a cubic algebra without `AB` term in
    /// `[A,C]` and without `B²` term in `[B,C]`, as a list of central
    /// coefficients and structures. `None` when those terms are present.
    pub fn casimir_terms(&self) -> Option<Vec<(AbstractPoly, Structure)>> {
        let n = self.generators.len();
        if !self.value("gamma").is_zero() || !self.value("nu").is_zero() {
            return None;
        }
        let (a, b, c) = self.triple;
        let v = |s: &str| self.value(s);
        let q = |num: i64, den: i64| AbstractPoly::constant(n, Scalar::frac(num, den));
        let (alpha, beta, delta, eps, zeta) = (v("alpha"), v("beta"), v("delta"), v("epsilon"), v("zeta"));
        let (lambda, mu, rho, chi) = (v("lambda"), v("mu"), v("rho"), v("chi"));
        let bl = beta.mul(&lambda);
        let terms = vec![
            (q(1, 1), Structure::power(c, 2)),
            (lambda.mul(&q(1, 2)), Structure::power(a, 4)),
            (mu.mul(&q(2, 3)), Structure::power(a, 3)),
            (beta.mul(&q(-2, 3)), Structure::power(b, 3)),
            (alpha.scale(&Scalar::from_int(2)).sub(&bl).scale(&-Scalar::one()), Structure::Word(vec![a, b, a])),
            (
                rho.add(&alpha.mul(&beta).add(&eps).mul(&lambda).mul(&q(1, 2))),
                Structure::power(a, 2),
            ),
            (
                eps.sub(&bl.sub(&alpha.scale(&Scalar::from_int(4))).mul(&beta).mul(&q(1, 3)))
                    .scale(&-Scalar::one()),
                Structure::power(b, 2),
            ),
            (beta.mul(&mu).mul(&q(1, 3)).sub(&delta), Structure::Anticommutator(a, b)),
            (
                chi.scale(&Scalar::from_int(2))
                    .add(&beta.mul(&delta).mul(&lambda).mul(&q(1, 2)))
                    .add(&eps.mul(&mu).mul(&q(1, 3))),
                Structure::power(a, 1),
            ),
            (
                zeta.scale(&Scalar::from_int(2))
                    .add(&alpha.scale(&Scalar::from_int(3)).sub(&bl).mul(&eps).mul(&q(1, 3)))
                    .sub(&beta.mul(&rho).mul(&q(1, 3)))
                    .scale(&-Scalar::one()),
                Structure::power(b, 1),
            ),
        ];
        Some(terms.into_iter().filter(|(c, _)| !c.is_zero()).collect())
    }

    /// Top-weight commutative image of a combination, for comparison with
    /// the classical Casimir.
    pub fn classical_limit(&self, terms: &[(AbstractPoly, Structure)]) -> AbstractPoly {
        let n = self.generators.len();
        let weights: Vec<u32> = self.generators.iter().map(|g| g.weight).collect();
        let full: Vec<(AbstractPoly, u32)> = terms
            .iter()
            .map(|(c, s)| {
                let p = c.mul(&s.classical(n));
                let w = p.weights(&weights).last().copied().unwrap_or(0);
                (p, w)
            })
            .collect();
        let top = full.iter().map(|(_, w)| *w).max().unwrap_or(0);
        let mut out = AbstractPoly::zero(n);
        for (p, _) in full {
            out = out.add(&top_weight(&p, &weights, top));
        }
        out
    }
}

/// Element of the abstract cubic algebra: words over the triple
/// (`0 = A`, `1 = B`, `2 = C`) with coefficients in the central symbols.
pub type CubicElement = BTreeMap<Vec<u8>, AbstractPoly>;

impl CubicLift {
    fn letter_of(&self, g: usize) -> Option<u8> {
        let (a, b, c) = self.triple;
        [a, b, c].iter().position(|&x| x == g).map(|k| k as u8)
    }

    /// A structure as an unreduced cubic element; central letters inside a
    /// word move into the coefficient.
    pub fn cubic_element(&self, coeff: &AbstractPoly, s: &Structure) -> CubicElement {
        let n = self.generators.len();
        let word = |w: &[usize]| -> (Vec<u8>, AbstractPoly) {
            let mut letters = Vec::new();
            let mut c = coeff.clone();
            for &g in w {
                match self.letter_of(g) {
                    Some(l) => letters.push(l),
                    None => c = c.mul(&AbstractPoly::symbol(n, g)),
                }
            }
            (letters, c)
        };
        let mut out = CubicElement::new();
        let parts: Vec<(Vec<u8>, AbstractPoly)> = match s {
            Structure::Word(w) => vec![word(w)],
            Structure::Anticommutator(x, y) => vec![word(&[*x, *y]), word(&[*y, *x])],
        };
        for (w, c) in parts {
            add_cubic(&mut out, w, &c);
        }
        out
    }

    fn expression_element(&self, e: &NCExpression) -> CubicElement {
        let n = self.generators.len();
        let mut out = CubicElement::new();
        for (t, c) in &e.terms {
            let coeff = AbstractPoly::from_terms(n, [(t.central.clone(), c.clone())]);
            for (w, v) in self.cubic_element(&coeff, &t.structure) {
                add_cubic(&mut out, w, &v);
            }
        }
        out
    }

    /// Rewrites into ordered words with `BA = AB − C`, `CA = AC − [A,C]`
    /// and `CB = BC − [B,C]`.
    pub fn reduce(&self, e: &CubicElement) -> CubicElement {
        let n = self.generators.len();
        let w = |l: u8| -> u32 {
            let (a, b, c) = self.triple;
            self.generators[[a, b, c][l as usize]].weight
        };
        let one = AbstractPoly::constant(n, Scalar::one());
        let ac = self.reduce_free(&self.expression_element(&self.ac));
        let bc = self.reduce_free(&self.expression_element(&self.bc));
        let swap = |hi: u8, lo: u8| -> CubicElement {
            let mut r = CubicElement::new();
            add_cubic(&mut r, vec![lo, hi], &one);
            let minus = |r: &mut CubicElement, e: &CubicElement| {
                for (w, c) in e {
                    add_cubic(r, w.clone(), &c.scale(&-Scalar::one()));
                }
            };
            match (hi, lo) {
                (1, 0) => add_cubic(&mut r, vec![2], &one.scale(&-Scalar::one())),
                (2, 0) => minus(&mut r, &ac),
                _ => minus(&mut r, &bc),
            }
            r
        };
        // highest weight first, so swaps and corrections merge before use
        let key = |v: &Vec<u8>| (std::cmp::Reverse(v.iter().map(|&l| w(l)).sum::<u32>()), v.clone());
        let mut work: BTreeMap<(std::cmp::Reverse<u32>, Vec<u8>), AbstractPoly> =
            e.iter().map(|(v, c)| (key(v), c.clone())).collect();
        let mut out = CubicElement::new();
        while let Some(((_, v), c)) = work.pop_first() {
            if c.is_zero() {
                continue;
            }
            match v.windows(2).position(|p| p[0] > p[1]) {
                None => add_cubic(&mut out, v, &c),
                Some(i) => {
                    for (r, rc) in swap(v[i], v[i + 1]) {
                        let mut nv = v[..i].to_vec();
                        nv.extend_from_slice(&r);
                        nv.extend_from_slice(&v[i + 2..]);
                        let e = work.entry(key(&nv)).or_insert_with(|| AbstractPoly::zero(n));
                        *e = e.add(&c.mul(&rc));
                    }
                }
            }
        }
        out
    }

    // ordering inside the bracket right-hand sides: only {A,B} needs it
    fn reduce_free(&self, e: &CubicElement) -> CubicElement {
        let mut out = CubicElement::new();
        for (w, c) in e {
            if w.as_slice() == [1, 0] {
                add_cubic(&mut out, vec![0, 1], c);
                add_cubic(&mut out, vec![2], &c.scale(&-Scalar::one()));
            } else {
                add_cubic(&mut out, w.clone(), c);
            }
        }
        out
    }

    /// `[p, q]` reduced; central coefficients commute with every word.
    pub fn cubic_commutator(&self, p: &CubicElement, q: &CubicElement) -> CubicElement {
        let mut out = CubicElement::new();
        for (u, c) in p {
            for (v, d) in q {
                let cd = c.mul(d);
                add_cubic(&mut out, [u.as_slice(), v].concat(), &cd);
                add_cubic(&mut out, [v.as_slice(), u].concat(), &cd.scale(&-Scalar::one()));
            }
        }
        self.reduce(&out)
    }

    /// `[K, g]` for `g = A, B, C` in the abstract cubic algebra, using only
    /// the lifted bracket relations. Returns the nonzero reduced results.
    pub fn abstract_casimir_check(&self, terms: &[(AbstractPoly, Structure)]) -> Vec<(String, CubicElement)> {
        let n = self.generators.len();
        let one = AbstractPoly::constant(n, Scalar::one());
        let mut k = CubicElement::new();
        for (c, s) in terms {
            for (w, v) in self.cubic_element(c, s) {
                add_cubic(&mut k, w, &v);
            }
        }
        let mut failures = Vec::new();
        for l in 0..3u8 {
            let g = CubicElement::from([(vec![l], one.clone())]);
            let r = self.cubic_commutator(&k, &g);
            if !r.is_empty() {
                let (a, b, c) = self.triple;
                failures.push((self.generators[[a, b, c][l as usize]].name.clone(), r));
            }
        }
        failures
    }

    pub fn render_cubic(&self, e: &CubicElement) -> String {
        let names = self.names();
        let (a, b, c) = self.triple;
        let letters = [&names[a], &names[b], &names[c]];
        if e.is_empty() {
            return "0".into();
        }
        e.iter()
            .map(|(w, coeff)| {
                let word: Vec<&str> = w.iter().map(|&l| letters[l as usize].as_str()).collect();
                let word = if word.is_empty() { "1".to_string() } else { word.join("*") };
                format!("({})*{}", coeff.render(&names), word)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Classical-limit comparison of one lifted constant.
#[derive(Clone, Debug)]
pub struct LimitCheck {
    pub name: &'static str,
    /// Top-weight part of the lifted constant.
    pub limit: AbstractPoly,
    /// The classical constant of the same name.
    pub classical: AbstractPoly,
}

impl LimitCheck {
    pub fn matches(&self) -> bool {
        self.limit == self.classical
    }
}

/// Casimir of a lifted cubic algebra, checked abstractly.
#[derive(Clone, Debug)]
pub struct LiftCasimir {
    pub terms: Vec<(AbstractPoly, Structure)>,
    /// Nonzero reduced commutators `[K, g]`.
    pub failures: Vec<(String, CubicElement)>,
    pub classical_limit: AbstractPoly,
    /// `classical_limit − K_classical`, when a classical Casimir is given.
    pub classical_diff: Option<AbstractPoly>,
}

impl CubicLift {
    /// Drops everything below the top weight of each constant and compares
    /// with the classical presentation's constants.
    pub fn classical_limits(&self, pres: &Presentation) -> Vec<LimitCheck> {
        let weights: Vec<u32> = self.generators.iter().map(|g| g.weight).collect();
        let (a, b, c) = self.triple;
        self.records
            .iter()
            .map(|r| {
                let target = if r.bracket == "[A,C]" { weights[a] } else { weights[b] } + weights[c] - 1;
                let w = target - r.structure.weight(&weights);
                let classical = pres
                    .record(r.name)
                    .map(|x| x.value.clone())
                    .unwrap_or_else(|| AbstractPoly::zero(self.generators.len()));
                LimitCheck {
                    name: r.name,
                    limit: top_weight(&r.value, &weights, w),
                    classical,
                }
            })
            .collect()
    }

    /// The ordered-form Casimir, its abstract commutators with `A`, `B`,
    /// `C`, and its classical limit against `classical` when given.
    pub fn casimir(&self, classical: Option<&AbstractPoly>) -> Option<LiftCasimir> {
        let terms = self.casimir_terms()?;
        let failures = self.abstract_casimir_check(&terms);
        let classical_limit = self.classical_limit(&terms);
        let classical_diff = classical.map(|k| classical_limit.sub(k));
        Some(LiftCasimir {
            terms,
            failures,
            classical_limit,
            classical_diff,
        })
    }

    /// Concrete element of `U(g)` for a combination over the lift's generators.
    pub fn realize(&self, env: &Enveloping, terms: &[(AbstractPoly, Structure)]) -> NCPolynomial {
        Realizer::new(env, &self.generators).combination(terms)
    }
}

fn add_cubic(e: &mut CubicElement, w: Vec<u8>, c: &AbstractPoly) {
    if c.is_zero() {
        return;
    }
    let sum = match e.get(&w) {
        Some(old) => old.add(c),
        None => c.clone(),
    };
    if sum.is_zero() {
        e.remove(&w);
    } else {
        e.insert(w, sum);
    }
}

/// Terms of weighted degree exactly `w`.
pub fn top_weight(p: &AbstractPoly, weights: &[u32], w: u32) -> AbstractPoly {
    AbstractPoly::from_terms(
        p.nsym(),
        p.terms()
            .filter(|(m, _)| m.weight(weights) == w)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

const AC_STRUCTURES: [(&str, fn(usize, usize) -> Structure); 6] = [
    ("alpha", |a, _| Structure::power(a, 2)),
    ("beta", |_, b| Structure::power(b, 2)),
    ("gamma", |a, b| Structure::Anticommutator(a, b)),
    ("delta", |a, _| Structure::power(a, 1)),
    ("epsilon", |_, b| Structure::power(b, 1)),
    ("zeta", |_, _| Structure::one()),
];

const BC_STRUCTURES: [(&str, fn(usize, usize) -> Structure); 7] = [
    ("lambda", |a, _| Structure::power(a, 3)),
    ("mu", |a, _| Structure::power(a, 2)),
    ("nu", |_, b| Structure::power(b, 2)),
    ("xi", |a, b| Structure::Anticommutator(a, b)),
    ("rho", |a, _| Structure::power(a, 1)),
    ("sigma", |_, b| Structure::power(b, 1)),
    ("chi", |_, _| Structure::one()),
];

/// Lifts a cubic three-generator presentation: symmetrizes every generator
/// except `C`, sets `C = [A, B]`, and expresses `[A,C]` and `[B,C]` over
/// the cubic template with central coefficients of every lower weight.
pub fn lift_cubic(env: &Enveloping, pres: &Presentation, basis: &CommutantBasis) -> Result<CubicLift, Error> {
    let (a, b, c) = pres
        .triple
        .ok_or_else(|| Error::Inconsistent("presentation has no generator triple {A,B} = C".into()))?;
    let mut generators = Vec::new();
    for (k, e) in basis.entries.iter().enumerate() {
        let poly = if k == c {
            NCPolynomial::zero(env.dim())
        } else {
            env.symmetrize(&e.poly)?
        };
        generators.push(NCGenerator {
            name: e.name.clone(),
            poly,
            weight: e.degree,
            is_central: e.is_central,
        });
    }
    generators[c].poly = env.commutator(&generators[a].poly, &generators[b].poly);
    for g in generators.iter().filter(|g| g.is_central) {
        for &x in &[a, b] {
            if !env.commutator(&g.poly, &generators[x].poly).is_zero() {
                return Err(Error::Inconsistent(format!(
                    "lift of `{}` does not commute with `{}`",
                    g.name, generators[x].name
                )));
            }
        }
    }
    let w = |k: usize| generators[k].weight;
    let mut records = Vec::new();
    let mut solve = |x: usize, label: &str, table: &[(&'static str, fn(usize, usize) -> Structure)]| {
        let target = env.commutator(&generators[x].poly, &generators[c].poly);
        let structures: Vec<Structure> = table.iter().map(|(_, f)| f(a, b)).collect();
        let ansatz = template_ansatz(&generators, &structures, w(x) + w(c) - 1);
        match nc_express(env, &target, &generators, &ansatz) {
            NCOutcome::Expressed(e) => {
                for (name, f) in table {
                    records.push(NCRecord {
                        bracket: label.to_string(),
                        structure: f(a, b),
                        name,
                        value: e.coefficient(&f(a, b)),
                    });
                }
                Ok(e)
            }
            NCOutcome::NotExpressible { .. } => Err(Error::NotExpressible(
                generators[x].name.clone(),
                generators[c].name.clone(),
            )),
        }
    };
    let ac = solve(a, "[A,C]", &AC_STRUCTURES)?;
    let bc = solve(b, "[B,C]", &BC_STRUCTURES)?;
    Ok(CubicLift {
        generators,
        triple: (a, b, c),
        ac,
        bc,
        records,
    })
}
