//! A small expression grammar shared by every text input.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/' | <juxtaposition>) factor)*
//! factor := ('+' | '-') factor | atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit. Division is only by expressions that evaluate
//! to a scalar. Juxtaposition multiplies, so `2i*L3`, `2i L3` and `16c3^2`
//! all parse. Identifiers are `[A-Za-z_][A-Za-z0-9_]*`.

use num_traits::{One, Zero};

use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::Error;

/// The values an expression is evaluated into.
pub trait Env {
    type Value: Clone;
    fn constant(&self, c: Scalar) -> Self::Value;
    fn variable(&self, name: &str) -> Result<Self::Value, Error>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, a: &Self::Value, c: &Scalar) -> Self::Value;
    /// The value as a plain scalar, if it is one.
    fn as_scalar(&self, v: &Self::Value) -> Option<Scalar>;
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            let n = s
                .parse()
                .map_err(|_| Error::Parse(format!("integer `{s}` out of range")))?;
            out.push(Tok::Num(n));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct Parser<'a, E: Env> {
    toks: Vec<Tok>,
    pos: usize,
    env: &'a E,
    text: &'a str,
}

impl<'a, E: Env> Parser<'a, E> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in `{}`", self.text))
    }

    fn expr(&mut self) -> Result<E::Value, Error> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            let rhs = if c == '-' {
                self.env.scale(&rhs, &-Scalar::one())
            } else {
                rhs
            };
            acc = self.env.add(&acc, &rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<E::Value, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = self.env.mul(&acc, &rhs);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    let d = self
                        .env
                        .as_scalar(&rhs)
                        .ok_or_else(|| self.err("division by a non-scalar"))?;
                    let inv = d.inv().ok_or_else(|| self.err("division by zero"))?;
                    acc = self.env.scale(&acc, &inv);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.factor()?;
                    acc = self.env.mul(&acc, &rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<E::Value, Error> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let v = self.factor()?;
                return Ok(self.env.scale(&v, &-Scalar::one()));
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                return self.factor();
            }
            _ => {}
        }
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(n)) if *n >= 0 && *n <= u32::MAX as i64 => *n as u32,
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            };
            self.pos += 1;
            let mut acc = self.env.constant(Scalar::one());
            for _ in 0..e {
                acc = self.env.mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<E::Value, Error> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(self.env.constant(Scalar::from_int(n))),
            Tok::Ident(name) if name == "i" => Ok(self.env.constant(Scalar::i())),
            Tok::Ident(name) => self.env.variable(&name),
            Tok::Op('(') => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(self.err("missing `)`")),
                }
            }
            Tok::Op(c) => Err(self.err(&format!("unexpected `{c}`"))),
        }
    }
}

/// Parses and evaluates `text` in `env`.
pub fn evaluate<E: Env>(text: &str, env: &E) -> Result<E::Value, Error> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        env,
        text,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Evaluates into plain scalars; no variables allowed.
pub struct ScalarEnv;

impl Env for ScalarEnv {
    type Value = Scalar;
    fn constant(&self, c: Scalar) -> Scalar {
        c
    }
    fn variable(&self, name: &str) -> Result<Scalar, Error> {
        Err(Error::Parse(format!("unexpected identifier `{name}` in a scalar")))
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn scale(&self, a: &Scalar, c: &Scalar) -> Scalar {
        a * c
    }
    fn as_scalar(&self, v: &Scalar) -> Option<Scalar> {
        Some(v.clone())
    }
}

/// Evaluates into [`Polynomial`]s; variables resolve through `lookup`.
pub struct PolyEnv<F: Fn(&str) -> Option<usize>> {
    pub dim: usize,
    pub lookup: F,
}

impl<F: Fn(&str) -> Option<usize>> Env for PolyEnv<F> {
    type Value = Polynomial;
    fn constant(&self, c: Scalar) -> Polynomial {
        Polynomial::constant(self.dim, c)
    }
    fn variable(&self, name: &str) -> Result<Polynomial, Error> {
        (self.lookup)(name)
            .map(|k| Polynomial::var(self.dim, k))
            .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a + b
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a * b
    }
    fn scale(&self, a: &Polynomial, c: &Scalar) -> Polynomial {
        a.scale(c)
    }
    fn as_scalar(&self, v: &Polynomial) -> Option<Scalar> {
        match v.degree() {
            None => Some(Scalar::zero()),
            Some(0) => Some(v.coeff(&crate::poly::Monomial::one())),
            _ => None,
        }
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar, Error> {
    evaluate(text, &ScalarEnv)
}

/// Parses a polynomial whose variables are exactly `names`.
pub fn parse_polynomial_with(text: &str, names: &[String]) -> Result<Polynomial, Error> {
    let env = PolyEnv {
        dim: names.len(),
        lookup: |s: &str| names.iter().position(|n| n == s),
    };
    evaluate(text, &env)
}

/// Parses a polynomial on `g*`; both generator names (`L1`) and coordinate
/// names (`l1`) are accepted.
pub fn parse_polynomial(text: &str, alg: &crate::algebra::LieAlgebra) -> Result<Polynomial, Error> {
    let env = PolyEnv {
        dim: alg.dim(),
        lookup: |s: &str| alg.index_of(s),
    };
    evaluate(text, &env)
}

/// Parses a linear combination of `names` with no constant term.
pub fn parse_linear(text: &str, names: &[String]) -> Result<Vec<(usize, Scalar)>, Error> {
    let p = parse_polynomial_with(text, names)?;
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        if m.degree() != 1 {
            return Err(Error::Parse(format!("`{text}` is not a linear combination")));
        }
        out.push((m.max_var().unwrap(), c.clone()));
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("-8*(3 - 18)").unwrap(), Scalar::from_int(120));
        assert_eq!(parse_scalar("1/2 - 3i/4").unwrap(), "1/2-3/4i".parse().unwrap());
        assert_eq!(parse_scalar("2^3/4").unwrap(), Scalar::from_int(2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn linear_combinations() {
        let n = names(&["L1", "T11", "T22"]);
        let v = parse_linear("-i*T11 - 2i T22", &n).unwrap();
        assert_eq!(v, vec![(1, Scalar::gauss(0, -1)), (2, Scalar::gauss(0, -2))]);
        assert!(parse_linear("L1*T11", &n).is_err());
        assert!(parse_linear("L1 + 1", &n).is_err());
    }

    #[test]
    fn polynomials_and_juxtaposition() {
        let n = names(&["a", "b"]);
        let p = parse_polynomial_with("16a^2(a - b)", &n).unwrap();
        let q = parse_polynomial_with("16*a^3 - 16*a^2*b", &n).unwrap();
        assert_eq!(p, q);
        assert!(parse_polynomial_with("a +", &n).is_err());
        assert!(parse_polynomial_with("(a", &n).is_err());
        assert!(parse_polynomial_with("a / b", &n).is_err());
    }
}
