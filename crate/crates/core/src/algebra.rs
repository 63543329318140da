//! Lie algebras given by structure constants, subalgebra selections, and the
//! counting data of a reduction chain.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::Echelon;
use crate::scalar::Scalar;
use crate::Error;

/// Default seed for generic-point draws.
pub const DEFAULT_SEED: u64 = 0x5eed_2023;

/// Number of independent generic points used for every generic-rank query.
pub const GENERIC_DRAWS: usize = 3;

/// A finite-dimensional Lie algebra `[X_i, X_j] = C_ij^k X_k`.
///
/// Only pairs `i < j` are stored; [`LieAlgebra::bracket`] synthesizes the
/// antisymmetric half.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    names: Vec<String>,
    coords: Vec<String>,
    constants: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
    // dense completed table, table[i][j] = [X_i, X_j]
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
    input_violations: Vec<Violation>,
}

/// One bracket record `[X_i, X_j] ∋ c·X_k` (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct BracketRecord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Scalar,
}

/// A violated defining identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `[X_i, X_i]` was given a nonzero component.
    Diagonal { i: String, k: String },
    /// `[X_i, X_j]` and `[X_j, X_i]` were both given and are not negatives.
    Antisymmetry { i: String, j: String, k: String },
    /// The Jacobi sum of `(X_i, X_j, X_k)` has a nonzero `X_l` component.
    Jacobi {
        i: String,
        j: String,
        k: String,
        l: String,
        value: Scalar,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Diagonal { i, k } => write!(f, "[{i},{i}] has nonzero {k} component"),
            Violation::Antisymmetry { i, j, k } => {
                write!(f, "[{i},{j}] and [{j},{i}] disagree on {k}")
            }
            Violation::Jacobi { i, j, k, l, value } => {
                write!(f, "Jacobi identity fails for ({i},{j},{k}): {l} component {value}")
            }
        }
    }
}

impl LieAlgebra {
    /// Builds an algebra from bracket records. Records with `i > j` are read
    /// as the antisymmetric partner; inconsistent duplicates are kept as
    /// validation findings rather than rejected.
    pub fn new(names: Vec<String>, records: &[BracketRecord]) -> Result<Self, Error> {
        let dim = names.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be at least 1".into()));
        }
        let coords: Vec<String> = names.iter().map(|n| n.to_lowercase()).collect();
        for (a, name) in names.iter().enumerate() {
            let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::InvalidAlgebra(format!("invalid generator name `{name}`")));
            }
            if coords[a] == "i" {
                return Err(Error::InvalidAlgebra("`i` is reserved for the imaginary unit".into()));
            }
            if coords[..a].contains(&coords[a]) {
                return Err(Error::InvalidAlgebra(format!("duplicate generator name `{name}`")));
            }
        }
        let mut upper: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        let mut lower: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        let mut input_violations = Vec::new();
        for r in records {
            if r.i >= dim || r.j >= dim || r.k >= dim {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket index out of range: ({}, {}, {})",
                    r.i + 1,
                    r.j + 1,
                    r.k + 1
                )));
            }
            if r.coeff.is_zero() {
                continue;
            }
            if r.i == r.j {
                input_violations.push(Violation::Diagonal {
                    i: names[r.i].clone(),
                    k: names[r.k].clone(),
                });
                continue;
            }
            let (store, key) = if r.i < r.j {
                (&mut upper, (r.i, r.j))
            } else {
                (&mut lower, (r.j, r.i))
            };
            *store.entry(key).or_default().entry(r.k).or_insert_with(Scalar::zero) += &r.coeff;
        }
        for (key, comps) in lower {
            match upper.get(&key) {
                Some(up) => {
                    let ks: std::collections::BTreeSet<usize> =
                        up.keys().chain(comps.keys()).copied().collect();
                    for k in ks {
                        let a = up.get(&k).cloned().unwrap_or_default();
                        let b = comps.get(&k).cloned().unwrap_or_default();
                        if !(&a + &b).is_zero() {
                            input_violations.push(Violation::Antisymmetry {
                                i: names[key.0].clone(),
                                j: names[key.1].clone(),
                                k: names[k].clone(),
                            });
                        }
                    }
                }
                None => {
                    upper.insert(key, comps.into_iter().map(|(k, c)| (k, -c)).collect());
                }
            }
        }
        let constants: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = upper
            .into_iter()
            .map(|(key, comps)| {
                let v: Vec<(usize, Scalar)> =
                    comps.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                (key, v)
            })
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for (&(i, j), comps) in &constants {
            table[i][j] = comps.clone();
            table[j][i] = comps.iter().map(|(k, c)| (*k, -c)).collect();
        }
        Ok(LieAlgebra {
            names,
            coords,
            constants,
            table,
            input_violations,
        })
    }

    /// Parses bracket lines of the form `[X, Y] = expr` where `expr` is a
    /// linear combination of generator names, e.g. `[L1,T23] = -i*T11 - 2i*T22`.
    pub fn from_table(names: &[&str], lines: &str) -> Result<Self, Error> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut records = Vec::new();
        for raw in lines.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("missing `=` in `{line}`")))?;
            let lhs = lhs.trim();
            let inner = lhs
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected `[X,Y]` in `{line}`")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `[X,Y]` in `{line}`")))?;
            let find = |s: &str| {
                names
                    .iter()
                    .position(|n| n == s.trim())
                    .ok_or_else(|| Error::Parse(format!("unknown generator `{}`", s.trim())))
            };
            let (i, j) = (find(a)?, find(b)?);
            let combo = crate::parse::parse_linear(rhs, &names)?;
            for (k, coeff) in combo {
                records.push(BracketRecord { i, j, k, coeff });
            }
        }
        LieAlgebra::new(names, &records)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Generator labels in their published order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Coordinate labels on the dual (lowercased generator labels).
    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .or_else(|| self.coords.iter().position(|n| n == name))
    }

    /// `[X_i, X_j]` as `(k, C_ij^k)` pairs.
    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i][j]
    }

    /// Stored constants, `i < j` only.
    pub fn constants(&self) -> &BTreeMap<(usize, usize), Vec<(usize, Scalar)>> {
        &self.constants
    }

    /// All stored constants as records (`i < j`).
    pub fn records(&self) -> Vec<BracketRecord> {
        self.constants
            .iter()
            .flat_map(|(&(i, j), comps)| {
                comps.iter().map(move |(k, c)| BracketRecord {
                    i,
                    j,
                    k: *k,
                    coeff: c.clone(),
                })
            })
            .collect()
    }

    /// Bracket of two elements given as dense coefficient vectors.
    fn bracket_vec(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, ai) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, bj) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (k, c) in self.bracket(i, j) {
                    out[*k] += &(&(ai * bj) * c);
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        v
    }

    /// Checks antisymmetry of the input and the Jacobi identity exactly.
    /// An empty report means the table defines a Lie algebra.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = self.input_violations.clone();
        let d = self.dim();
        for i in 0..d {
            for j in i + 1..d {
                let ij = self.bracket_vec(&self.unit(i), &self.unit(j));
                for k in j + 1..d {
                    let jk = self.bracket_vec(&self.unit(j), &self.unit(k));
                    let ki = self.bracket_vec(&self.unit(k), &self.unit(i));
                    let s1 = self.bracket_vec(&ij, &self.unit(k));
                    let s2 = self.bracket_vec(&jk, &self.unit(i));
                    let s3 = self.bracket_vec(&ki, &self.unit(j));
                    for l in 0..d {
                        let v = &(&s1[l] + &s2[l]) + &s3[l];
                        if !v.is_zero() {
                            report.push(Violation::Jacobi {
                                i: self.names[i].clone(),
                                j: self.names[j].clone(),
                                k: self.names[k].clone(),
                                l: self.names[l].clone(),
                                value: v,
                            });
                        }
                    }
                }
            }
        }
        report
    }

    /// The Lie algebra spanned by the selected generators, with constants
    /// restricted to them. Fails if the span is not closed.
    pub fn restrict(&self, sub: &SubalgebraSpec) -> Result<LieAlgebra, Error> {
        if !sub.is_closed(self) {
            return Err(Error::NotClosed(sub.name.clone()));
        }
        let pos = |k: usize| sub.indices.iter().position(|&x| x == k).unwrap();
        let mut records = Vec::new();
        for (a, &i) in sub.indices.iter().enumerate() {
            for (b, &j) in sub.indices.iter().enumerate().skip(a + 1) {
                for (k, c) in self.bracket(i, j) {
                    records.push(BracketRecord {
                        i: a,
                        j: b,
                        k: pos(*k),
                        coeff: c.clone(),
                    });
                }
            }
        }
        let names = sub.indices.iter().map(|&i| self.names[i].clone()).collect();
        LieAlgebra::new(names, &records)
    }

    /// `N(g) = dim − rank(C_ij^k x_k)` at a generic point; maximum rank over
    /// [`GENERIC_DRAWS`] seeded rational points.
    pub fn invariant_count(&self, seed: u64) -> usize {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = (0..GENERIC_DRAWS)
            .map(|_| {
                let point = random_point(&mut rng, d);
                let rows = (0..d).map(|i| {
                    (0..d)
                        .filter_map(|j| {
                            let v: Scalar = self
                                .bracket(i, j)
                                .iter()
                                .map(|(k, c)| c * &point[*k])
                                .sum();
                            (!v.is_zero()).then_some((j, v))
                        })
                        .collect::<Vec<_>>()
                });
                Echelon::rank_of(d, rows)
            })
            .max()
            .unwrap_or(0);
        d - rank
    }
}

/// Coordinates drawn uniformly from `{-60..60} / {1..9}`.
pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<Scalar> {
    (0..dim)
        .map(|_| Scalar::frac(rng.gen_range(-60..=60), rng.gen_range(1..=9)))
        .collect()
}

/// A named selection of generators of a parent algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubalgebraSpec {
    pub name: String,
    pub indices: Vec<usize>,
}

impl SubalgebraSpec {
    pub fn new(name: impl Into<String>, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SubalgebraSpec {
            name: name.into(),
            indices,
        }
    }

    /// Resolves generator names (or coordinate names) against `alg`.
    pub fn by_names(alg: &LieAlgebra, name: &str, gens: &[&str]) -> Result<Self, Error> {
        let idx = gens
            .iter()
            .map(|g| {
                alg.index_of(g)
                    .ok_or_else(|| Error::Parse(format!("unknown generator `{g}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubalgebraSpec::new(name, idx))
    }

    /// True iff every bracket of two selected generators stays in the span.
    pub fn is_closed(&self, alg: &LieAlgebra) -> bool {
        self.indices.iter().all(|&i| {
            self.indices.iter().all(|&j| {
                alg.bracket(i, j)
                    .iter()
                    .all(|(k, _)| self.indices.binary_search(k).is_ok())
            })
        })
    }
}

pub fn check_subalgebra(alg: &LieAlgebra, sub: &SubalgebraSpec) -> bool {
    sub.indices.iter().all(|&i| i < alg.dim()) && sub.is_closed(alg)
}

/// Label counts of a chain `g ⊃ g'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    /// rank data used
    pub ell: usize,
    pub ell_sub: usize,
    pub ell0: usize,
    /// total number of labels for a state
    pub i0: usize,
    /// number of missing labels
    pub n0: usize,
    /// number of independent solutions of the centralizer system
    pub m0: usize,
}

pub fn label_counts(
    alg: &LieAlgebra,
    sub: &SubalgebraSpec,
    ell0: usize,
    seed: u64,
) -> Result<LabelCounts, Error> {
    let ell = alg.invariant_count(seed);
    let ell_sub = alg.restrict(sub)?.invariant_count(seed);
    label_counts_from(alg.dim(), sub.indices.len(), ell, ell_sub, ell0)
}

/// The pure counting formulas, separated from the rank computations.
pub fn label_counts_from(
    dim: usize,
    dim_sub: usize,
    ell: usize,
    ell_sub: usize,
    ell0: usize,
) -> Result<LabelCounts, Error> {
    let half = |num: i64, what: &str| -> Result<usize, Error> {
        if num < 0 || num % 2 != 0 {
            Err(Error::Inconsistent(format!("{what}: {num}/2 is not a nonnegative integer")))
        } else {
            Ok((num / 2) as usize)
        }
    };
    let (d, ds, l, ls) = (dim as i64, dim_sub as i64, ell as i64, ell_sub as i64);
    let i0 = half(d + l, "i0")?;
    let n0 = half(d - l - ds - ls, "n0")? + ell0;
    let m0 = (d - ds + ell0 as i64)
        .try_into()
        .map_err(|_| Error::Inconsistent("M0 is negative".into()))?;
    Ok(LabelCounts {
        ell,
        ell_sub,
        ell0,
        i0,
        n0,
        m0,
    })
}

/// Smallest `ell0` giving the requested `n0`, if any.
pub fn solve_ell0(dim: usize, dim_sub: usize, ell: usize, ell_sub: usize, n0: usize) -> Option<usize> {
    let base = label_counts_from(dim, dim_sub, ell, ell_sub, 0).ok()?.n0;
    n0.checked_sub(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian(d: usize) -> LieAlgebra {
        let names = (1..=d).map(|i| format!("X{i}")).collect();
        LieAlgebra::new(names, &[]).unwrap()
    }

    #[test]
    fn abelian_is_valid_and_fully_invariant() {
        let a = abelian(4);
        assert!(a.validate().is_empty());
        assert_eq!(a.invariant_count(DEFAULT_SEED), 4);
        let all = SubalgebraSpec::new("all", (0..4).collect());
        assert!(check_subalgebra(&a, &all));
    }

    #[test]
    fn inconsistent_duplicate_is_reported() {
        let names = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
        let recs = [
            BracketRecord { i: 0, j: 1, k: 2, coeff: Scalar::one() },
            BracketRecord { i: 1, j: 0, k: 2, coeff: Scalar::one() },
        ];
        let a = LieAlgebra::new(names, &recs).unwrap();
        assert!(matches!(a.validate()[0], Violation::Antisymmetry { .. }));
    }

    #[test]
    fn lower_triangle_only_is_completed() {
        let names = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
        let recs = [BracketRecord { i: 1, j: 0, k: 2, coeff: Scalar::one() }];
        let a = LieAlgebra::new(names, &recs).unwrap();
        assert_eq!(a.bracket(0, 1), &[(2, Scalar::from_int(-1))]);
        assert!(a.validate().is_empty());
    }

    #[test]
    fn rejects_bad_names() {
        assert!(LieAlgebra::new(vec!["I".into()], &[]).is_err());
        assert!(LieAlgebra::new(vec!["a".into(), "A".into()], &[]).is_err());
        assert!(LieAlgebra::new(vec![], &[]).is_err());
    }

    #[test]
    fn counting_formulas() {
        // su(3) > so(3)
        let c = label_counts_from(8, 3, 2, 1, 0).unwrap();
        assert_eq!((c.i0, c.n0, c.m0), (5, 1, 5));
        assert!(label_counts_from(8, 3, 1, 1, 0).is_err());
        assert_eq!(solve_ell0(13, 4, 3, 2, 2), Some(0));
        assert_eq!(solve_ell0(13, 4, 3, 2, 1), None);
    }
}
