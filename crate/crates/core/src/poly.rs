//! Sparse polynomials on the dual `g*` and the Lie-Poisson bracket.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use rayon::prelude::*;

use crate::algebra::LieAlgebra;
use crate::scalar::Scalar;
use crate::Error;

/// `x_1^{a_1} … x_d^{a_d}` stored as sorted `(variable, exponent)` pairs with
/// positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    exps: Vec<(u16, u16)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(i: usize) -> Self {
        Monomial {
            degree: 1,
            exps: vec![(i as u16, 1)],
        }
    }

    /// From a dense exponent vector.
    pub fn from_exponents(exps: &[u32]) -> Self {
        let pairs: Vec<(u16, u16)> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| (v as u16, e as u16))
            .collect();
        Monomial {
            degree: exps.iter().sum(),
            exps: pairs,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exps
            .iter()
            .find(|(v, _)| *v as usize == var)
            .map(|(_, e)| *e as u32)
            .unwrap_or(0)
    }

    /// `(variable, exponent)` pairs, increasing variable index.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().map(|&(v, e)| (v as usize, e as u32))
    }

    pub fn to_exponents(&self, dim: usize) -> Vec<u32> {
        let mut out = vec![0; dim];
        for (v, e) in self.factors() {
            out[v] = e;
        }
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        self.exps.last().map(|(v, _)| *v as usize)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (0, 0);
        while a < self.exps.len() || b < other.exps.len() {
            let va = self.exps.get(a).map(|e| e.0).unwrap_or(u16::MAX);
            let vb = other.exps.get(b).map(|e| e.0).unwrap_or(u16::MAX);
            match va.cmp(&vb) {
                Ordering::Less => {
                    exps.push(self.exps[a]);
                    a += 1;
                }
                Ordering::Greater => {
                    exps.push(other.exps[b]);
                    b += 1;
                }
                Ordering::Equal => {
                    exps.push((va, self.exps[a].1 + other.exps[b].1));
                    a += 1;
                    b += 1;
                }
            }
        }
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    /// `m / x_var` and the exponent of `x_var` in `m`, if present.
    pub fn derive(&self, var: usize) -> Option<(Monomial, u32)> {
        let pos = self.exps.iter().position(|(v, _)| *v as usize == var)?;
        let e = self.exps[pos].1;
        let mut exps = self.exps.clone();
        if e == 1 {
            exps.remove(pos);
        } else {
            exps[pos].1 -= 1;
        }
        Some((
            Monomial {
                degree: self.degree - 1,
                exps,
            },
            e as u32,
        ))
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        self.factors().map(|(v, e)| point[v].pow(e)).product()
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.exps.is_empty() {
            return "1".into();
        }
        self.factors()
            .map(|(v, e)| {
                if e == 1 {
                    names[v].clone()
                } else {
                    format!("{}^{}", names[v], e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Graded lexicographic order: lower total degree first; within a degree a
/// larger exponent on an earlier variable comes first, so `x1² < x1x2 < x2²`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.exps.iter().zip(&other.exps) {
                match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Equal => {}
                    },
                }
            }
            // equal degree and equal common prefix implies equal
            self.exps.len().cmp(&other.exps.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.max_var().unwrap_or(0))
            .map(|i| format!("x{}", i + 1))
            .collect();
        f.write_str(&self.render(&names))
    }
}

/// All monomials of degree `n` in `d` variables, graded-lex order.
/// There are `C(n+d−1, d−1)` of them.
pub fn monomial_basis(d: usize, n: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; d];
    fn rec(var: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let d = exps.len();
        if var == d - 1 {
            exps[var] = left;
            out.push(Monomial::from_exponents(exps));
            exps[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            exps[var] = e;
            rec(var + 1, left - e, exps, out);
        }
        exps[var] = 0;
    }
    if d > 0 {
        rec(0, n, &mut exps, &mut out);
    }
    out
}

/// Homogeneity of a polynomial. The zero polynomial has no degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    Zero,
    Homogeneous(u32),
    Mixed,
}

/// Sparse polynomial over [`Scalar`] in the `dim` coordinates of `g*`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        Polynomial::from_terms(dim, [(Monomial::one(), c)])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        Polynomial::from_terms(dim, [(Monomial::var(i), Scalar::one())])
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Polynomial::zero(dim);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn grade(&self) -> Grade {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => Grade::Zero,
            Some(d) => {
                if degs.all(|e| e == d) {
                    Grade::Homogeneous(d)
                } else {
                    Grade::Mixed
                }
            }
        }
    }

    /// Highest total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.dim, Scalar::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some((q, e)) = m.derive(var) {
                out.add_term(q, &(c * &Scalar::from_int(e as i64)));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        self.terms.iter().map(|(m, c)| c * &m.eval(point)).sum()
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Polynomial::zero(self.dim))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical rendering with the given variable names, e.g.
    /// `l1^2 + 2i*l1*t12 - 1/2*t22`.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = render_coeff(c);
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

    fn check_dim(&self, other: &Polynomial) -> Result<(), Error> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }
}

/// Splits a coefficient into sign and absolute rendering; `None` body means
/// a unit coefficient. Complex coefficients with both parts are wrapped.
pub(crate) fn render_coeff(c: &Scalar) -> (bool, Option<String>) {
    use num_traits::Signed;
    let text = if c.re().is_zero() || c.im().is_zero() {
        let neg = if c.im().is_zero() {
            c.re().is_negative()
        } else {
            c.im().is_negative()
        };
        let abs = if neg { -c } else { c.clone() };
        if abs.is_one() {
            return (neg, None);
        }
        return (neg, Some(abs.to_string()));
    } else {
        format!("({c})")
    };
    (false, Some(text))
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Scalar::one())
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_default() += &(ca * cb);
            }
        }
        Polynomial {
            dim: self.dim,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

/// Per-variable partial derivatives, only the nonzero ones.
fn gradient(p: &Polynomial) -> Vec<(usize, Vec<(Monomial, Scalar)>)> {
    let mut by_var: BTreeMap<usize, Vec<(Monomial, Scalar)>> = BTreeMap::new();
    for (m, c) in &p.terms {
        for (v, _) in m.factors() {
            let (q, e) = m.derive(v).unwrap();
            by_var
                .entry(v)
                .or_default()
                .push((q, c * &Scalar::from_int(e as i64)));
        }
    }
    by_var.into_iter().collect()
}

/// Lie-Poisson bracket `{f, g} = C_ij^k x_k ∂_i f ∂_j g`.
///
/// Computed as `Σ_i ∂_i f · h_i` with `h_i = Σ_j C_ij^k x_k ∂_j g`, with the
/// smaller argument on the `h` side.
pub fn lp_bracket(f: &Polynomial, g: &Polynomial, alg: &LieAlgebra) -> Result<Polynomial, Error> {
    f.check_dim(g)?;
    if f.dim != alg.dim() {
        return Err(Error::DimensionMismatch(f.dim, alg.dim()));
    }
    if g.len() > f.len() {
        return Ok(-&lp_bracket(g, f, alg)?);
    }
    let df = gradient(f);
    let dg = gradient(g);
    let parts: Vec<HashMap<Monomial, Scalar>> = df
        .par_iter()
        .map(|(i, fi)| {
            let mut h: HashMap<Monomial, Scalar> = HashMap::new();
            for (j, gj) in &dg {
                for (k, s) in alg.bracket(*i, *j) {
                    let xk = Monomial::var(*k);
                    for (mg, cg) in gj {
                        *h.entry(mg.mul(&xk)).or_default() += &(cg * s);
                    }
                }
            }
            h.retain(|_, c| !c.is_zero());
            let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
            for (mh, ch) in &h {
                for (mf, cf) in fi {
                    *acc.entry(mf.mul(mh)).or_default() += &(cf * ch);
                }
            }
            acc
        })
        .collect();
    let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
    for part in parts {
        for (m, c) in part {
            *acc.entry(m).or_default() += &c;
        }
    }
    Ok(Polynomial {
        dim: f.dim,
        terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    })
}

/// `{x_i, p}` for a single coordinate; the coadjoint vector field applied to `p`.
pub fn coadjoint(i: usize, p: &Polynomial, alg: &LieAlgebra) -> Polynomial {
    let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
    for (m, c) in &p.terms {
        for (j, _) in m.factors() {
            let comps = alg.bracket(i, j);
            if comps.is_empty() {
                continue;
            }
            let (q, e) = m.derive(j).unwrap();
            let ce = c * &Scalar::from_int(e as i64);
            for (k, s) in comps {
                *acc.entry(q.mul(&Monomial::var(*k))).or_default() += &(&ce * s);
            }
        }
    }
    Polynomial {
        dim: p.dim,
        terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    }
}
