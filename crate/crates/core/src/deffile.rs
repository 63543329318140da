//! Algebra definition files (TOML).
//!
//! ```toml
//! dim = 3
//! names = ["L1", "L2", "L3"]
//!
//! [[brackets]]          # [L1, L2] contains (re + im·i)·L3
//! i = 1
//! j = 2
//! k = 3
//! re = "0"
//! im = "1"
//!
//! [subalgebras]
//! so2 = [3]
//! ```
//!
//! Indices are 1-based. `re` and `im` are exact rationals written as
//! strings (`"-3/2"`); either may be omitted and defaults to zero. Records
//! with `i > j` are read as the antisymmetric partner. Subalgebras list
//! 1-based generator indices.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{BracketRecord, LieAlgebra, SubalgebraSpec};
use crate::scalar::Scalar;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(default = "zero_text", skip_serializing_if = "is_zero_text")]
    pub re: String,
    #[serde(default = "zero_text", skip_serializing_if = "is_zero_text")]
    pub im: String,
}

fn zero_text() -> String {
    "0".into()
}

fn is_zero_text(s: &String) -> bool {
    s == "0"
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub names: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    #[serde(default)]
    pub subalgebras: BTreeMap<String, Vec<usize>>,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        AlgebraFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("definition file serializes")
    }

    /// Stored constants of `alg` (`i < j`) plus the given subalgebras.
    pub fn from_algebra(alg: &LieAlgebra, subalgebras: &[SubalgebraSpec]) -> Self {
        let brackets = alg
            .records()
            .into_iter()
            .map(|r| BracketEntry {
                i: r.i + 1,
                j: r.j + 1,
                k: r.k + 1,
                re: r.coeff.re().to_string(),
                im: r.coeff.im().to_string(),
            })
            .collect();
        AlgebraFile {
            dim: alg.dim(),
            names: alg.names().to_vec(),
            brackets,
            subalgebras: subalgebras
                .iter()
                .map(|s| (s.name.clone(), s.indices.iter().map(|k| k + 1).collect()))
                .collect(),
        }
    }

    pub fn algebra(&self) -> Result<LieAlgebra, Error> {
        if self.names.len() != self.dim {
            return Err(Error::DimensionMismatch(self.names.len(), self.dim));
        }
        let index = |k: usize| -> Result<usize, Error> {
            if k == 0 || k > self.dim {
                Err(Error::InvalidAlgebra(format!("index {k} outside 1..={}", self.dim)))
            } else {
                Ok(k - 1)
            }
        };
        let records = self
            .brackets
            .iter()
            .map(|b| {
                Ok(BracketRecord {
                    i: index(b.i)?,
                    j: index(b.j)?,
                    k: index(b.k)?,
                    coeff: Scalar::new(rational(&b.re)?, rational(&b.im)?),
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        LieAlgebra::new(self.names.clone(), &records)
    }

    pub fn subalgebra(&self, name: &str) -> Result<SubalgebraSpec, Error> {
        let idx = self
            .subalgebras
            .get(name)
            .ok_or_else(|| Error::Unknown(format!("subalgebra `{name}`")))?;
        let mut out = Vec::new();
        for &k in idx {
            if k == 0 || k > self.dim {
                return Err(Error::InvalidAlgebra(format!("subalgebra `{name}`: index {k} outside 1..={}", self.dim)));
            }
            out.push(k - 1);
        }
        Ok(SubalgebraSpec::new(name, out))
    }

    pub fn subalgebra_specs(&self) -> Result<Vec<SubalgebraSpec>, Error> {
        self.subalgebras.keys().map(|n| self.subalgebra(n)).collect()
    }
}

fn rational(text: &str) -> Result<BigRational, Error> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(BigRational::zero());
    }
    t.parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("invalid rational `{text}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_round_trip() {
        for name in ["su3", "so5", "schr3"] {
            let alg = catalog::algebra(name).unwrap();
            let subs: Vec<SubalgebraSpec> = catalog::subalgebras(name)
                .into_iter()
                .map(|(n, g)| SubalgebraSpec::by_names(&alg, n, &g).unwrap())
                .collect();
            let file = AlgebraFile::from_algebra(&alg, &subs);
            let text = file.to_toml();
            let back = AlgebraFile::parse(&text).unwrap();
            assert_eq!(back, file);
            let alg2 = back.algebra().unwrap();
            assert_eq!(alg2.constants(), alg.constants());
            assert_eq!(back.subalgebra_specs().unwrap(), subs);
        }
    }

    #[test]
    fn small_file() {
        let text = r#"
dim = 3
names = ["L1", "L2", "L3"]

[[brackets]]
i = 1
j = 2
k = 3
im = "1"

[[brackets]]
i = 3
j = 2
k = 1
im = "-1"

[[brackets]]
i = 3
j = 1
k = 2
im = "1"

[subalgebras]
so2 = [3]
"#;
        let f = AlgebraFile::parse(text).unwrap();
        let alg = f.algebra().unwrap();
        assert!(alg.validate().is_empty());
        assert_eq!(alg.bracket(1, 2), &[(0, Scalar::i())]);
        assert_eq!(f.subalgebra("so2").unwrap().indices, vec![2]);
    }

    #[test]
    fn rejects_bad_index() {
        let text = "dim = 1\nnames = [\"X\"]\n[[brackets]]\ni = 1\nj = 2\nk = 1\nre = \"1\"\n";
        assert!(AlgebraFile::parse(text).unwrap().algebra().is_err());
    }
}
