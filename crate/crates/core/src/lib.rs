//! Exact construction of polynomial algebras from commutants of Lie
//! subalgebras, in the Lie-Poisson algebra `Pol(g*)` and in the universal
//! enveloping algebra `U(g)`.
//!
//! The pipeline is: [`commutant`] solves the centralizer system degree by
//! degree, [`closure`] turns a commutant basis into an abstract polynomial
//! Poisson algebra, and [`enveloping`] lifts the generators through the
//! symmetrization map and recomputes the brackets as commutators.

pub mod algebra;
pub mod catalog;
pub mod closure;
pub mod commutant;
pub mod deffile;
pub mod enveloping;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use algebra::{
    check_subalgebra, label_counts, label_counts_from, BracketRecord, LabelCounts, LieAlgebra,
    SubalgebraSpec, Violation, DEFAULT_SEED,
};
pub use closure::{AbstractPoly, GeneratorSymbol, Presentation};
pub use enveloping::{NCPolynomial, NCWord};
pub use commutant::{BasisEntry, CommutantBasis, DegreeSolution};
pub use poly::{lp_bracket, monomial_basis, Grade, Monomial, Polynomial};
pub use scalar::Scalar;

/// Errors raised by the library. Validation findings and non-expressible
/// brackets are values, not errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("subalgebra `{0}` is not closed under the bracket")]
    NotClosed(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("bracket {{{0}, {1}}} is not expressible in the current generators")]
    NotExpressible(String, String),
    #[error("invalid basis change: {0}")]
    BasisChange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
