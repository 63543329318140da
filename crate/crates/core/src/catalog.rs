//! Built-in algebras, reduction chains and published commutant data.
//!
//! Tables are entered in full (both triangles) so that the antisymmetry
//! cross-check in [`LieAlgebra::new`] sees every printed entry.

use crate::algebra::{LieAlgebra, SubalgebraSpec};
use crate::parse::parse_polynomial;
use crate::poly::{lp_bracket, Polynomial};
use crate::scalar::Scalar;
use crate::Error;

/// Builds an algebra from a printed commutator table. `cols` lists the
/// column generators; each row is `(row generator, "cell | cell | ...")`.
pub fn from_rows(names: &[&str], cols: &[&str], rows: &[(&str, &str)]) -> Result<LieAlgebra, Error> {
    let mut lines = String::new();
    for (row, cells) in rows {
        let cells: Vec<&str> = cells.split('|').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::Parse(format!(
                "row {row}: expected {} cells, got {}",
                cols.len(),
                cells.len()
            )));
        }
        for (col, cell) in cols.iter().zip(cells) {
            if cell != "0" {
                lines.push_str(&format!("[{row},{col}] = {cell}\n"));
            }
        }
    }
    LieAlgebra::from_table(names, &lines)
}

pub const SU3_NAMES: [&str; 8] = ["L1", "L2", "L3", "T11", "T12", "T13", "T22", "T23"];

pub fn su3() -> LieAlgebra {
    let n = &SU3_NAMES;
    from_rows(
        n,
        n,
        &[
            ("L1", "0 | i L3 | -i L2 | 0 | i T13 | -i T12 | 2i T23 | -i T11 - 2i T22"),
            ("L2", "-i L3 | 0 | i L1 | -2i T13 | -i T23 | 2i T11 + i T22 | 0 | i T12"),
            ("L3", "i L2 | -i L1 | 0 | 2i T12 | i T22 - i T11 | i T23 | -2i T12 | -i T13"),
            ("T11", "0 | 2i T13 | -2i T12 | 0 | 2i L3 | -2i L2 | 0 | 0"),
            ("T12", "-i T13 | i T23 | i T11 - i T22 | -2i L3 | 0 | i L1 | 2i L3 | -i L2"),
            ("T13", "i T12 | -2i T11 - i T22 | -i T23 | 2i L2 | -i L1 | 0 | 0 | i L3"),
            ("T22", "-2i T23 | 0 | 2i T12 | 0 | -2i L3 | 0 | 0 | 2i L1"),
            ("T23", "i T11 + 2i T22 | -i T12 | i T13 | 0 | i L2 | -i L3 | -2i L1 | 0"),
        ],
    )
    .expect("built-in su(3) table")
}

/// `S±, T±, U±, V±` are written `Sm`/`Sp` etc.
pub const SO5_NAMES: [&str; 10] = ["Sm", "Tm", "Um", "Vm", "Sp", "Tp", "Up", "Vp", "U3", "V3"];

pub fn so5() -> LieAlgebra {
    let n = &SO5_NAMES;
    from_rows(
        n,
        n,
        &[
            ("Sm", "0 | 0 | 0 | 0 | -U3 - V3 | 0 | -Vm | Um | Sm | Sm"),
            ("Tm", "0 | 0 | 0 | Um | 0 | V3 - U3 | -Vp | 0 | Tm | -Tm"),
            ("Um", "0 | 0 | 0 | 2Sm | -Vp | -Vm | -2U3 | 2Tm | Um | 0"),
            ("Vm", "0 | -Um | -2Sm | 0 | Up | 0 | 2Tp | -2V3 | 0 | Vm"),
            ("Sp", "U3 + V3 | 0 | Vp | -Up | 0 | 0 | 0 | 0 | -Sp | -Sp"),
            ("Tp", "0 | U3 - V3 | Vm | 0 | 0 | 0 | 0 | -Up | -Tp | Tp"),
            ("Up", "Vm | Vp | 2U3 | -2Tp | 0 | 0 | 0 | -2Sp | -Up | 0"),
            ("Vp", "-Um | 0 | -2Tm | 2V3 | 0 | Up | 2Sp | 0 | 0 | -Vp"),
            ("U3", "-Sm | -Tm | -Um | 0 | Sp | Tp | Up | 0 | 0 | 0"),
            ("V3", "-Sm | Tm | 0 | -Vm | Sp | -Tp | 0 | Vp | 0 | 0"),
        ],
    )
    .expect("built-in so(5) table")
}

/// Coordinate order of the centrally extended Schrödinger algebra; `M` is
/// central.
pub const SCHR3_NAMES: [&str; 13] = [
    "J12", "J13", "J23", "P1", "P2", "P3", "G1", "G2", "G3", "Pt", "D", "K", "M",
];

pub fn schrodinger3() -> LieAlgebra {
    // the printed table orders its columns K, D, Pt and omits M
    let cols = ["J12", "J13", "J23", "P1", "P2", "P3", "G1", "G2", "G3", "K", "D", "Pt"];
    from_rows(
        &SCHR3_NAMES,
        &cols,
        &[
            ("J12", "0 | J23 | -J13 | P2 | -P1 | 0 | G2 | -G1 | 0 | 0 | 0 | 0"),
            ("J13", "-J23 | 0 | J12 | P3 | 0 | -P1 | G3 | 0 | -G1 | 0 | 0 | 0"),
            ("J23", "J13 | -J12 | 0 | 0 | P3 | -P2 | 0 | G3 | -G2 | 0 | 0 | 0"),
            ("P1", "-P2 | -P3 | 0 | 0 | 0 | 0 | M | 0 | 0 | G1 | P1 | 0"),
            ("P2", "P1 | 0 | -P3 | 0 | 0 | 0 | 0 | M | 0 | G2 | P2 | 0"),
            ("P3", "0 | P1 | P2 | 0 | 0 | 0 | 0 | 0 | M | G3 | P3 | 0"),
            ("G1", "-G2 | -G3 | 0 | -M | 0 | 0 | 0 | 0 | 0 | 0 | -G1 | -P1"),
            ("G2", "G1 | 0 | -G3 | 0 | -M | 0 | 0 | 0 | 0 | 0 | -G2 | -P2"),
            ("G3", "0 | G1 | G2 | 0 | 0 | -M | 0 | 0 | 0 | 0 | -G3 | -P3"),
            ("K", "0 | 0 | 0 | -G1 | -G2 | -G3 | 0 | 0 | 0 | 0 | -2K | -D"),
            ("D", "0 | 0 | 0 | -P1 | -P2 | -P3 | G1 | G2 | G3 | 2K | 0 | -2Pt"),
            ("Pt", "0 | 0 | 0 | 0 | 0 | 0 | P1 | P2 | P3 | D | 2Pt | 0"),
        ],
    )
    .expect("built-in Schrödinger table")
}

/// Catalog keys accepted by [`algebra`].
pub const ALGEBRAS: [&str; 3] = ["su3-LT", "so5", "schr3"];

pub fn algebra(name: &str) -> Option<LieAlgebra> {
    match name {
        "su3-LT" | "su3" => Some(su3()),
        "so5" => Some(so5()),
        "schr3" => Some(schrodinger3()),
        _ => None,
    }
}

/// A reduction chain together with the system that is actually imposed.
#[derive(Clone, Debug)]
pub struct Chain {
    pub algebra: &'static str,
    pub sub: SubalgebraSpec,
    /// Coordinates whose brackets are set to zero by default.
    pub system: Vec<usize>,
    /// Subalgebra coordinates left out of the default system.
    pub omitted: Vec<usize>,
    /// Invariants depending only on subalgebra variables (caller input).
    pub ell0: usize,
}

impl Chain {
    /// The imposed coordinates; `strict` adds the omitted ones.
    pub fn imposed(&self, strict: bool) -> Vec<usize> {
        let mut v = self.system.clone();
        if strict {
            v.extend(&self.omitted);
            v.sort_unstable();
        }
        v
    }
}

/// Subalgebra names defined for a catalog algebra.
pub fn subalgebras(alg_name: &str) -> Vec<(&'static str, Vec<&'static str>)> {
    match alg_name {
        "su3-LT" | "su3" => vec![("so3", vec!["L1", "L2", "L3"])],
        "so5" => vec![("su2xu1", vec!["Um", "Up", "U3", "V3"])],
        "schr3" => vec![("sl2xso2", vec!["J12", "Pt", "D", "K"])],
        _ => vec![],
    }
}

/// The chain for a catalog algebra and one of its subalgebras.
pub fn chain(alg_name: &str, sub_name: &str, alg: &LieAlgebra) -> Result<Chain, Error> {
    let (key, gens) = subalgebras(alg_name)
        .into_iter()
        .find(|(n, _)| *n == sub_name)
        .ok_or_else(|| Error::Unknown(format!("subalgebra `{sub_name}` of `{alg_name}`")))?;
    let sub = SubalgebraSpec::by_names(alg, key, &gens)?;
    let algebra = match alg_name {
        "su3-LT" | "su3" => "su3-LT",
        "so5" => "so5",
        _ => "schr3",
    };
    // the Schrödinger system only constrains j12, pt and d
    let omitted = if algebra == "schr3" {
        vec![alg.index_of("K").unwrap()]
    } else {
        vec![]
    };
    let system = sub
        .indices
        .iter()
        .copied()
        .filter(|i| !omitted.contains(i))
        .collect();
    Ok(Chain {
        algebra,
        sub,
        system,
        omitted,
        ell0: 0,
    })
}

/// Published commutant elements, written in coordinates.
pub mod fixtures {
    pub const SU3: &[(&str, &str)] = &[
        ("b1", "l1^2 + l2^2 + l3^2"),
        ("b2", "t11^2 + t12^2 + t13^2 + t11*t22 + t22^2 + t23^2"),
        (
            "C1",
            "l3^2*(t11 + t22) - l1^2*t11 - 2*l1*(l2*t12 + l3*t13) - l2^2*t22 - 2*l2*l3*t23",
        ),
        (
            "C2",
            "t12*t13*t23 + 1/2*(t11*(t12^2 - t22^2 - t23^2) - t22*(t11^2 - t12^2 + t13^2))",
        ),
        (
            "D1",
            "l1^2*(t11^2 + t12^2 + t13^2) + 2*l2*l3*(t12*t13 - t11*t23) \
             + 2*l1*(l2*(t12*(t11 + t22) + t13*t23) + l3*(t12*t23 - t13*t22)) \
             + l2^2*(t12^2 + t22^2 + t23^2) + l3^2*(t13^2 + (t11 + t22)^2 + t23^2)",
        ),
        (
            "D2",
            "l3^2*(t12^2 - t11*t22) + l2^2*(t13^2 + t11*(t11 + t22)) \
             + 2*l1*l3*(t13*t22 - t12*t23) + l1^2*(t22*(t11 + t22) + t23^2) \
             - 2*l2*(l1*t12*(t11 + t22) + l1*t13*t23 + l3*(t12*t13 - t11*t23))",
        ),
    ];

    /// `F1 = (i/4)·{C1, D1}`.
    pub const SU3_F1: (&str, &str, &str) = ("C1", "D1", "i/4");

    pub const SO5: &[(&str, &str)] = &[
        ("a1", "v3"),
        ("b1", "u3^2 + um*up"),
        ("b2", "2*(sm*sp + tm*tp) + vm*vp"),
        ("C1", "2*(sm*sp - tm*tp)*u3 + (tm*up - sp*um)*vm + (tp*um - sm*up)*vp"),
        (
            "D1",
            "8*(sm^2*sp^2 + tm^2*tp^2 + (sm*sp + tm*tp)*vm*vp) + vm^2*vp^2 \
             - 4*(sp*tm*vm^2 + sm*tp*vp^2)",
        ),
        ("D2", "(4*sm*tp + vm^2)*(4*sp*tm + vp^2)"),
        (
            "D3",
            "2*(vm*vp - 2*(sm*sp + tm*tp))*u3^2 \
             + 4*(sp*um*vm + tm*up*vm + tp*um*vp + sm*up*vp)*u3 \
             + 4*sp*tp*um^2 + 4*sm*tm*up^2 - 2*um*vm*up*vp",
        ),
        (
            "F1",
            "((vm^2 - 4*sm*tp)*u3^2 + 4*(um*tp + sm*up)*vm*u3 + 2*(tp^2*um^2 + sm^2*up^2) \
             - um*up*vm^2)*(4*sp*tm + vp^2)",
        ),
        (
            "F2",
            "((vp^2 - 4*sp*tm)*u3^2 + 4*(um*sp + tm*up)*vp*u3 + 2*(sp^2*um^2 + tm^2*up^2) \
             - um*up*vp^2)*(4*sm*tp + vm^2)",
        ),
    ];

    /// Fourteen published polynomials plus the central charge, in the
    /// published naming.
    pub const SCHR3: &[(&str, &str)] = &[
        ("a1", "m"),
        ("a2", "j12"),
        ("B1", "j13^2 + j23^2"),
        ("B2", "p1*g2 - p2*g1"),
        ("b1", "k*pt - 1/4*d^2"),
        ("C1", "j13*(p1*g3 - p3*g1) + j23*(p2*g3 - p3*g2)"),
        ("C2", "j13*(p2*g3 - p3*g2) + j23*(p3*g1 - p1*g3)"),
        ("C3", "k*(p1^2 + p2^2) + pt*(g1^2 + g2^2) - d*(g1*p1 + g2*p2)"),
        ("C4", "k*p3^2 + pt*g3^2 - d*p3*g3"),
        (
            "D1",
            "j13*(k*p1*p3 + pt*g1*g3) + j23*(k*p2*p3 + pt*g2*g3) \
             - d/2*(j13*(p1*g3 + p3*g1) + j23*(p2*g3 + p3*g2))",
        ),
        (
            "D2",
            "j13*(k*p2*p3 + pt*g2*g3) - j23*(k*p1*p3 + pt*g1*g3) \
             - d/2*(j13*(p2*g3 + p3*g2) - j23*(p1*g3 + p3*g1))",
        ),
        ("D3", "p3^2*(g1^2 + g2^2) + g3^2*(p1^2 + p2^2) - 2*p3*g3*(p1*g1 + p2*g2)"),
        (
            "E1",
            "k*(j13*p1 + j23*p2)^2 + pt*(j13*g1 + j23*g2)^2 \
             - d*(j13*p1 + j23*p2)*(j13*g1 + j23*g2)",
        ),
        (
            "E2",
            "pt*(j13*g2 - j23*g1)*(j13*g1 + j23*g2) - k*(j23*p1 - j13*p2)*(j13*p1 + j23*p2) \
             + d*j13*j23*(p1*g1 - p2*g2) + d/2*(p1*g2 + p2*g1)*(j23^2 - j13^2)",
        ),
        (
            "E3",
            "(d/2*(g1^2 + g2^2) - k*(p1*g1 + p2*g2))*p3^2 \
             + (pt*(p1*g1 + p2*g2) - d/2*(p1^2 + p2^2))*g3^2 \
             + k*(p1^2 + p2^2)*g3*p3 - pt*(g1^2 + g2^2)*g3*p3",
        ),
    ];

    /// Two Schrödinger elements exactly as printed. Neither solves the
    /// system; the entries of [`SCHR3`] are the corrected forms (a sign in
    /// the `d` term of `D2`, the missing `d` terms of `E2`).
    pub const SCHR3_AS_PRINTED: &[(&str, &str)] = &[
        (
            "D2",
            "j13*(k*p2*p3 + pt*g2*g3) - j23*(k*p1*p3 + pt*g1*g3) \
             - d/2*(j13*(p2*g3 - p3*g2) - j23*(p1*g3 + p3*g1))",
        ),
        (
            "E2",
            "pt*(j13*g2 - j23*g1)*(j13*g1 + j23*g2) - k*(j23*p1 - j13*p2)*(j13*p1 + j23*p2) \
             + d*g1*j13*j23*p1 + d*g1*p2/2*(j23^2 - j13^2)",
        ),
    ];

    /// Casimir combinations of the full algebras, in the published symbols.
    pub const SU3_CASIMIRS: &[&str] = &["b1 + 2*b2", "C1 + 2*C2"];
    pub const SO5_CASIMIRS: &[&str] = &[
        "a1^2 + b1 + b2",
        "D1 + D2 + 4*a1^2*(b1 + b2) + 4*b1*b2 + 2*b1^2 + 2*a1^4",
    ];
    pub const SCHR3_CASIMIRS: &[&str] = &[
        "a1",
        "a1/2*(a2^2 + B1 - 4*b1) - a2*B2 - C1 + C3 + C4",
        "a1^2*(a2^2 + B1) - 2*a1*a2*B2 + B2^2 - 2*a1*C1 + D3",
    ];
}

/// Published elements for a catalog algebra, as named polynomials.
pub fn published_basis(alg_name: &str, alg: &LieAlgebra) -> Result<Vec<(String, Polynomial)>, Error> {
    let table = match alg_name {
        "su3-LT" | "su3" => fixtures::SU3,
        "so5" => fixtures::SO5,
        "schr3" => fixtures::SCHR3,
        _ => return Err(Error::Unknown(alg_name.to_string())),
    };
    let mut out: Vec<(String, Polynomial)> = table
        .iter()
        .map(|(n, e)| Ok((n.to_string(), parse_polynomial(e, alg)?)))
        .collect::<Result<_, Error>>()?;
    if matches!(alg_name, "su3-LT" | "su3") {
        let (a, b, s) = fixtures::SU3_F1;
        let get = |n: &str| out.iter().find(|(m, _)| m == n).unwrap().1.clone();
        let f1 = lp_bracket(&get(a), &get(b), alg)?.scale(&crate::parse::parse_scalar(s)?);
        out.push(("F1".into(), f1));
    }
    Ok(out)
}

/// Published Casimir combinations (in the published symbols).
pub fn published_casimirs(alg_name: &str) -> &'static [&'static str] {
    match alg_name {
        "su3-LT" | "su3" => fixtures::SU3_CASIMIRS,
        "so5" => fixtures::SO5_CASIMIRS,
        "schr3" => fixtures::SCHR3_CASIMIRS,
        _ => &[],
    }
}

/// Generator definitions of the three-generator cubic algebras, in the
/// published symbols. Discarded generators are listed separately.
pub fn published_basis_change(alg_name: &str) -> Option<BasisChangeSpec> {
    let s = |v: &[(&str, &str)]| v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    match alg_name {
        "su3-LT" | "su3" => Some(BasisChangeSpec {
            central: s(&[("c1", "b1"), ("c2", "b2"), ("c3", "C1/2 + C2")]),
            generators: s(&[("A", "C1/2 - C2"), ("B", "D1"), ("C", "-4i*F1")]),
        }),
        "so5" => Some(BasisChangeSpec {
            central: s(&[
                ("c1", "a1"),
                ("c2", "b1"),
                ("c3", "b2"),
                ("c4", "D1 + D3 + 4*a1*C1"),
            ]),
            generators: s(&[("A", "C1"), ("B", "D1"), ("C", "2*(F1 - F2)")]),
        }),
        _ => None,
    }
}

/// Named definitions for a change of basis; the right-hand sides are
/// polynomials in the symbols of the old basis.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BasisChangeSpec {
    pub central: Vec<(String, String)>,
    pub generators: Vec<(String, String)>,
}

/// Exact scalar used by fixture-driven checks.
pub fn scalar(text: &str) -> Scalar {
    crate::parse::parse_scalar(text).expect("fixture scalar")
}
