//! Orchestration and reports for the `polychain` binary.
//!
//! Every command builds a [`Report`]; `--format json` serializes it with the
//! schema tag [`SCHEMA`], `--format text` renders the same content for
//! reading. Reports contain no timings or paths, so identical inputs give
//! byte-identical output.

use std::path::{Path, PathBuf};

use polychain_core::algebra::{label_counts, SubalgebraSpec};
use polychain_core::catalog::{self, BasisChangeSpec};
use polychain_core::closure::{
    build_presentation, casimir_from_h, change_basis, prune_linear_relations, verify_presentation,
    PresentationOptions,
};
use polychain_core::commutant::{functional_independence_count, run};
use polychain_core::deffile::AlgebraFile;
use polychain_core::enveloping::{lift_cubic, nc_casimir_check, Enveloping};
use polychain_core::{CommutantBasis, Error, LieAlgebra, Polynomial, DEFAULT_SEED};
use serde::Serialize;

pub const SCHEMA: &str = "polychain-report/1";

/// Environment variable overriding the generic-point seed.
pub const SEED_VAR: &str = "POLYCHAIN_SEED";

pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const VALIDATION: i32 = 3;
    pub const NOT_EXPRESSIBLE: i32 = 4;
    pub const BASIS_CHANGE: i32 = 5;
    pub const CHECK_FAILED: i32 = 6;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisSource {
    Computed,
    Published,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Catalog name or path to a definition file.
    pub algebra: String,
    pub subalgebra: Option<String>,
    pub max_degree: u32,
    pub strict: bool,
    pub basis: BasisSource,
    /// File path, or `builtin` for the catalog's basis change.
    pub basis_change: Option<String>,
    pub ell0: Option<usize>,
    pub concrete: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(algebra: impl Into<String>) -> Self {
        RunConfig {
            algebra: algebra.into(),
            subalgebra: None,
            max_degree: 6,
            strict: false,
            basis: BasisSource::Computed,
            basis_change: None,
            ell0: None,
            concrete: false,
            seed: DEFAULT_SEED,
        }
    }
}

/// Parses a seed given in decimal or `0x` hex.
pub fn parse_seed(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let r = match t.strip_prefix("0x") {
        Some(h) => u64::from_str_radix(&h.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    r.map_err(|e| format!("invalid seed `{text}`: {e}"))
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub algebra: AlgebraInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subalgebra: Option<SubalgebraInfo>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutant: Option<CommutantSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enveloping: Option<EnvelopingSection>,
    pub diagnostics: Vec<String>,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct AlgebraInfo {
    pub name: String,
    pub dim: usize,
    pub generators: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SubalgebraInfo {
    pub name: String,
    pub generators: Vec<String>,
    pub imposed: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ValidationSection {
    pub ok: bool,
    pub violations: Vec<String>,
    pub subalgebras: Vec<ClosedCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant_count: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ClosedCheck {
    pub name: String,
    pub closed: bool,
}

#[derive(Debug, Serialize)]
pub struct CommutantSection {
    pub max_degree: u32,
    pub invariant_count: usize,
    pub subalgebra_invariant_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
    pub degrees: Vec<DegreeRow>,
    pub functional_independence: usize,
    pub generators: Vec<GeneratorRow>,
}

#[derive(Debug, Serialize)]
pub struct Labels {
    pub ell0: usize,
    pub i0: usize,
    pub n0: usize,
    pub m0: usize,
}

#[derive(Debug, Serialize)]
pub struct DegreeRow {
    pub degree: u32,
    pub solutions: usize,
    pub products: usize,
    pub new: usize,
}

#[derive(Debug, Serialize)]
pub struct GeneratorRow {
    pub name: String,
    pub degree: u32,
    pub central: bool,
    pub polynomial: String,
}

#[derive(Debug, Serialize)]
pub struct NamedText {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct PresentationSection {
    pub basis: String,
    pub pruned: Vec<NamedText>,
    pub rewrites: Vec<NamedText>,
    pub generators: Vec<GeneratorRow>,
    pub brackets: Vec<BracketRow>,
    pub relations: Vec<String>,
    pub centrals: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<CubicSection>,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct BracketRow {
    pub left: String,
    pub right: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct CubicSection {
    pub a: String,
    pub b: String,
    pub c: String,
    pub constants: Vec<ConstantRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casimir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casimir_in_centrals: Option<String>,
    pub casimir_verified: bool,
}

#[derive(Debug, Serialize)]
pub struct ConstantRow {
    pub bracket: String,
    pub name: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct EnvelopingSection {
    pub convention: &'static str,
    pub generators: Vec<NcGeneratorRow>,
    pub constants: Vec<NcConstantRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casimir: Option<NcCasimir>,
}

#[derive(Debug, Serialize)]
pub struct NcGeneratorRow {
    pub name: String,
    pub terms: usize,
    pub ordered: String,
}

#[derive(Debug, Serialize)]
pub struct NcConstantRow {
    pub bracket: String,
    pub name: String,
    pub structure: String,
    pub value: String,
    pub classical_limit: String,
    pub classical: String,
    pub limit_matches: bool,
}

#[derive(Debug, Serialize)]
pub struct NcCasimir {
    pub terms: Vec<NamedText>,
    pub commutes: bool,
    pub failures: Vec<NamedText>,
    pub classical_limit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_diff: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concrete: Option<ConcreteCheck>,
}

#[derive(Debug, Serialize)]
pub struct ConcreteCheck {
    pub degree: usize,
    pub terms: usize,
    pub commutes_with: Vec<String>,
    pub fails_with: Vec<String>,
    pub leading_matches: bool,
}

/// Failure that still carries the partial report.
pub struct Failure {
    pub report: Option<Report>,
    pub code: i32,
    pub message: String,
}

fn fail(err: Error) -> Failure {
    let code = match err {
        Error::NotExpressible(..) => exit::NOT_EXPRESSIBLE,
        Error::BasisChange(_) => exit::BASIS_CHANGE,
        _ => exit::ERROR,
    };
    let message = match &err {
        Error::NotExpressible(..) => format!("{err}; try a larger --max-degree or a different basis"),
        _ => err.to_string(),
    };
    Failure {
        report: None,
        code,
        message,
    }
}

fn basis_change_failure(err: Error) -> Failure {
    Failure {
        code: exit::BASIS_CHANGE,
        ..fail(err)
    }
}

struct Loaded {
    name: String,
    alg: LieAlgebra,
    file: Option<AlgebraFile>,
}

fn load_algebra(src: &str) -> Result<Loaded, Error> {
    let path = Path::new(src);
    if path.extension().is_some_and(|e| e == "toml") || path.exists() {
        let file = AlgebraFile::load(path)?;
        let alg = file.algebra()?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| src.to_string());
        return Ok(Loaded {
            name,
            alg,
            file: Some(file),
        });
    }
    let alg = catalog::algebra(src).ok_or_else(|| Error::Unknown(format!("algebra `{src}`")))?;
    Ok(Loaded {
        name: src.to_string(),
        alg,
        file: None,
    })
}

struct Selected {
    spec: SubalgebraSpec,
    imposed: Vec<usize>,
    ell0: usize,
}

fn select_subalgebra(l: &Loaded, cfg: &RunConfig) -> Result<Selected, Error> {
    let name = match &cfg.subalgebra {
        Some(n) => n.clone(),
        None => {
            let names: Vec<String> = match &l.file {
                Some(f) => f.subalgebras.keys().cloned().collect(),
                None => catalog::subalgebras(&l.name).into_iter().map(|(n, _)| n.to_string()).collect(),
            };
            match names.as_slice() {
                [one] => one.clone(),
                _ => return Err(Error::Unknown("no --subalgebra given and no unique default".into())),
            }
        }
    };
    match &l.file {
        Some(f) => {
            let spec = f.subalgebra(&name)?;
            let imposed = spec.indices.clone();
            Ok(Selected {
                spec,
                imposed,
                ell0: cfg.ell0.unwrap_or(0),
            })
        }
        None => {
            let ch = catalog::chain(&l.name, &name, &l.alg)?;
            Ok(Selected {
                imposed: ch.imposed(cfg.strict),
                ell0: cfg.ell0.unwrap_or(ch.ell0),
                spec: ch.sub,
            })
        }
    }
}

fn header(command: &str, l: &Loaded, sel: Option<&Selected>, seed: u64) -> Report {
    let names = l.alg.names().to_vec();
    Report {
        schema: SCHEMA,
        command: command.to_string(),
        algebra: AlgebraInfo {
            name: l.name.clone(),
            dim: l.alg.dim(),
            generators: names.clone(),
        },
        subalgebra: sel.map(|s| SubalgebraInfo {
            name: s.spec.name.clone(),
            generators: s.spec.indices.iter().map(|&k| names[k].clone()).collect(),
            imposed: s.imposed.iter().map(|&k| names[k].clone()).collect(),
        }),
        seed,
        validation: None,
        commutant: None,
        presentation: None,
        enveloping: None,
        diagnostics: Vec::new(),
        exit_code: exit::OK,
    }
}

fn coords(alg: &LieAlgebra) -> Vec<String> {
    alg.coords().to_vec()
}

fn generator_rows(alg: &LieAlgebra, basis: &CommutantBasis) -> Vec<GeneratorRow> {
    let c = coords(alg);
    basis
        .entries
        .iter()
        .map(|e| GeneratorRow {
            name: e.name.clone(),
            degree: e.degree,
            central: e.is_central,
            polynomial: e.poly.render(&c),
        })
        .collect()
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Report, Failure> {
    let l = load_algebra(&cfg.algebra).map_err(fail)?;
    let mut report = header("validate", &l, None, cfg.seed);
    let violations: Vec<String> = l.alg.validate().iter().map(|v| v.to_string()).collect();
    let specs: Vec<SubalgebraSpec> = match &l.file {
        Some(f) => f.subalgebra_specs().map_err(fail)?,
        None => catalog::subalgebras(&l.name)
            .into_iter()
            .map(|(n, g)| SubalgebraSpec::by_names(&l.alg, n, &g))
            .collect::<Result<_, _>>()
            .map_err(fail)?,
    };
    let subalgebras: Vec<ClosedCheck> = specs
        .iter()
        .map(|s| ClosedCheck {
            name: s.name.clone(),
            closed: polychain_core::check_subalgebra(&l.alg, s),
        })
        .collect();
    let ok = violations.is_empty() && subalgebras.iter().all(|s| s.closed);
    report.validation = Some(ValidationSection {
        ok,
        invariant_count: violations.is_empty().then(|| l.alg.invariant_count(cfg.seed)),
        violations,
        subalgebras,
    });
    if !ok {
        report.exit_code = exit::VALIDATION;
    }
    Ok(report)
}

struct Stage {
    l: Loaded,
    sel: Selected,
    report: Report,
    basis: CommutantBasis,
}

fn commutant_stage(command: &str, cfg: &RunConfig) -> Result<Stage, Failure> {
    if cfg.max_degree == 0 {
        return Err(fail(Error::Inconsistent("--max-degree must be at least 1".into())));
    }
    let l = load_algebra(&cfg.algebra).map_err(fail)?;
    let violations = l.alg.validate();
    if !violations.is_empty() {
        let mut report = header(command, &l, None, cfg.seed);
        report.diagnostics = violations.iter().map(|v| v.to_string()).collect();
        report.exit_code = exit::VALIDATION;
        return Err(Failure {
            report: Some(report),
            code: exit::VALIDATION,
            message: "algebra failed validation".into(),
        });
    }
    let sel = select_subalgebra(&l, cfg).map_err(fail)?;
    if !polychain_core::check_subalgebra(&l.alg, &sel.spec) {
        return Err(fail(Error::NotClosed(sel.spec.name.clone())));
    }
    let mut report = header(command, &l, Some(&sel), cfg.seed);
    let result = run(&l.alg, &sel.imposed, cfg.max_degree, None);
    let polys: Vec<&Polynomial> = result.basis.entries.iter().map(|e| &e.poly).collect();
    let labels = label_counts(&l.alg, &sel.spec, sel.ell0, cfg.seed);
    if let Err(e) = &labels {
        report.diagnostics.push(format!("label counts: {e}"));
    }
    let sub_alg = l.alg.restrict(&sel.spec).map_err(fail)?;
    report.commutant = Some(CommutantSection {
        max_degree: cfg.max_degree,
        invariant_count: l.alg.invariant_count(cfg.seed),
        subalgebra_invariant_count: sub_alg.invariant_count(cfg.seed),
        labels: labels.ok().map(|c| Labels {
            ell0: c.ell0,
            i0: c.i0,
            n0: c.n0,
            m0: c.m0,
        }),
        degrees: result
            .degrees
            .iter()
            .map(|d| DegreeRow {
                degree: d.degree,
                solutions: d.full_space.len(),
                products: d.product_dim,
                new: d.new_generators.len(),
            })
            .collect(),
        functional_independence: functional_independence_count(&l.alg, &polys, cfg.seed),
        generators: generator_rows(&l.alg, &result.basis),
    });
    Ok(Stage {
        l,
        sel,
        report,
        basis: result.basis,
    })
}

pub fn cmd_commutant(cfg: &RunConfig) -> Result<Report, Failure> {
    commutant_stage("commutant", cfg).map(|s| s.report)
}

fn load_basis_change(arg: &str, alg_name: &str) -> Result<BasisChangeSpec, Error> {
    if arg == "builtin" {
        return catalog::published_basis_change(alg_name)
            .ok_or_else(|| Error::Unknown(format!("no built-in basis change for `{alg_name}`")));
    }
    let text = std::fs::read_to_string(arg)?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

struct Closed {
    stage: Stage,
    basis: CommutantBasis,
    pres: polychain_core::Presentation,
}

fn close_stage(command: &str, cfg: &RunConfig) -> Result<Closed, Failure> {
    let mut stage = commutant_stage(command, cfg)?;
    let alg = &stage.l.alg;
    // The built-in basis changes are written in the published symbols.
    let basis_kind = match (cfg.basis, cfg.basis_change.as_deref()) {
        (BasisSource::Computed, Some("builtin")) => {
            stage
                .report
                .diagnostics
                .push("--basis-change builtin uses the published basis".into());
            BasisSource::Published
        }
        (b, _) => b,
    };
    let source = match basis_kind {
        BasisSource::Computed => stage.basis.clone(),
        BasisSource::Published => {
            let named = catalog::published_basis(&stage.l.name, alg).map_err(fail)?;
            CommutantBasis::from_named(alg, named)
        }
    };
    let with_report = |stage: Stage, f: Failure| Failure {
        report: Some(Report {
            exit_code: f.code,
            diagnostics: {
                let mut d = stage.report.diagnostics;
                d.push(f.message.clone());
                d
            },
            ..stage.report
        }),
        ..f
    };
    let (pruned_basis, log) = prune_linear_relations(alg, &source);
    let pruned = log
        .iter()
        .map(|e| NamedText {
            name: e.name.clone(),
            value: e.text.clone(),
        })
        .collect();
    let (basis, rewrites) = match &cfg.basis_change {
        None => (pruned_basis, Vec::new()),
        Some(arg) => {
            let spec = match load_basis_change(arg, &stage.l.name) {
                Ok(s) => s,
                Err(e) => return Err(with_report(stage, basis_change_failure(e))),
            };
            match change_basis(alg, &stage.sel.imposed, &source, &spec) {
                Ok(bc) => {
                    let names = bc.basis.names();
                    let rw = bc
                        .rewrites
                        .iter()
                        .map(|r| NamedText {
                            name: r.name.clone(),
                            value: r.expression.render(&names),
                        })
                        .collect();
                    (bc.basis, rw)
                }
                Err(e) => return Err(with_report(stage, basis_change_failure(e))),
            }
        }
    };
    let pres = match build_presentation(alg, &basis, &PresentationOptions::default()) {
        Ok(p) => p,
        Err(e) => return Err(with_report(stage, fail(e))),
    };
    let names = pres.names();
    let mismatches: Vec<String> = verify_presentation(alg, &pres, &basis)
        .into_iter()
        .map(|m| format!("{}: {}", m.what, m.detail))
        .collect();
    let cubic = pres.triple.map(|(a, b, c)| {
        let data = casimir_from_h(alg, &pres, &basis);
        if let Err(e) = &data {
            stage.report.diagnostics.push(format!("casimir: {e}"));
        }
        let data = data.ok();
        CubicSection {
            a: names[a].clone(),
            b: names[b].clone(),
            c: names[c].clone(),
            constants: pres
                .records
                .iter()
                .map(|r| ConstantRow {
                    bracket: r.bracket.clone(),
                    name: r
                        .name
                        .map(str::to_string)
                        .unwrap_or_else(|| format!("A^{}B^{}", r.exponents.0, r.exponents.1)),
                    value: r.value.render(&names),
                })
                .collect(),
            h: data.as_ref().map(|d| d.h.render(&names)),
            casimir: data.as_ref().map(|d| d.k.render(&names)),
            casimir_in_centrals: data.as_ref().and_then(|d| d.k_central.as_ref().map(|k| k.render(&names))),
            casimir_verified: data.as_ref().is_some_and(|d| d.verified_central),
        }
    });
    let verified = mismatches.is_empty();
    stage.report.presentation = Some(PresentationSection {
        basis: match basis_kind {
            BasisSource::Computed => "computed".into(),
            BasisSource::Published => "published".into(),
        },
        pruned,
        rewrites,
        generators: generator_rows(alg, &basis),
        brackets: pres
            .brackets
            .iter()
            .map(|(&(i, j), v)| BracketRow {
                left: names[i].clone(),
                right: names[j].clone(),
                value: v.render(&names),
            })
            .collect(),
        relations: pres.relations.iter().map(|r| r.render(&names)).collect(),
        centrals: pres.centrals.iter().map(|r| r.render(&names)).collect(),
        cubic,
        mismatches,
    });
    if !verified {
        stage.report.exit_code = exit::CHECK_FAILED;
    }
    Ok(Closed { stage, basis, pres })
}

pub fn cmd_close(cfg: &RunConfig) -> Result<Report, Failure> {
    close_stage("close", cfg).map(|c| c.stage.report)
}

fn lift_section(closed: &mut Closed, cfg: &RunConfig) -> Result<(), Failure> {
    let alg = &closed.stage.l.alg;
    let report = &mut closed.stage.report;
    if closed.pres.triple.is_none() {
        report
            .diagnostics
            .push("no generator triple {A,B} = C; nothing to lift".into());
        return Ok(());
    }
    let env = Enveloping::new(alg);
    let lift = match lift_cubic(&env, &closed.pres, &closed.basis) {
        Ok(l) => l,
        Err(e) => {
            let f = fail(e);
            report.diagnostics.push(format!("lift: {}", f.message));
            report.exit_code = f.code;
            return Ok(());
        }
    };
    let names = lift.names();
    let alg_names = env.names();
    let generators = lift
        .generators
        .iter()
        .map(|g| NcGeneratorRow {
            name: g.name.clone(),
            terms: g.poly.len(),
            ordered: g.poly.render(&alg_names),
        })
        .collect();
    let limits = lift.classical_limits(&closed.pres);
    let constants = lift
        .records
        .iter()
        .zip(&limits)
        .map(|(r, lim)| NcConstantRow {
            bracket: r.bracket.clone(),
            name: r.name.to_string(),
            structure: r.structure.render(&names),
            value: r.value.render(&names),
            classical_limit: lim.limit.render(&names),
            classical: lim.classical.render(&names),
            limit_matches: lim.matches(),
        })
        .collect::<Vec<_>>();
    let classical_k = casimir_from_h(alg, &closed.pres, &closed.basis).ok().map(|d| d.k);
    let casimir = match lift.casimir(classical_k.as_ref()) {
        None => {
            report
                .diagnostics
                .push("ordered Casimir formula needs gamma = nu = 0; not applied".into());
            None
        }
        Some(c) => {
            let concrete = cfg.concrete.then(|| {
                let k = lift.realize(&env, &c.terms);
                let (a, _, _) = lift.triple;
                let g = &lift.generators[a];
                let vals: Vec<Polynomial> = closed.basis.entries.iter().map(|e| e.poly.clone()).collect();
                let classical = classical_k.as_ref().map(|k| k.eval(&vals, alg.dim()));
                let rep = nc_casimir_check(&env, &k, &[(g.name.as_str(), &g.poly)], classical.as_ref());
                env.clear_memo();
                ConcreteCheck {
                    degree: rep.degree.unwrap_or(0),
                    terms: k.len(),
                    commutes_with: if rep.failures.is_empty() { vec![g.name.clone()] } else { vec![] },
                    fails_with: rep.failures.clone(),
                    leading_matches: rep.leading_matches.unwrap_or(false),
                }
            });
            Some(NcCasimir {
                terms: c
                    .terms
                    .iter()
                    .map(|(coeff, s)| NamedText {
                        name: s.render(&names),
                        value: coeff.render(&names),
                    })
                    .collect(),
                commutes: c.failures.is_empty(),
                failures: c
                    .failures
                    .iter()
                    .map(|(n, e)| NamedText {
                        name: n.clone(),
                        value: lift.render_cubic(e),
                    })
                    .collect(),
                classical_limit: c.classical_limit.render(&names),
                classical_diff: c.classical_diff.as_ref().map(|d| d.render(&names)),
                concrete,
            })
        }
    };
    let ok = constants.iter().all(|c| c.limit_matches)
        && casimir.as_ref().is_none_or(|c| {
            c.commutes
                && c.classical_diff.as_deref().is_none_or(|d| d == "0")
                && c.concrete.as_ref().is_none_or(|k| k.fails_with.is_empty() && k.leading_matches)
        });
    if !ok && report.exit_code == exit::OK {
        report.exit_code = exit::CHECK_FAILED;
    }
    report.enveloping = Some(EnvelopingSection {
        convention: "central coefficients multiply from the left",
        generators,
        constants,
        casimir,
    });
    Ok(())
}

pub fn cmd_symmetrize(cfg: &RunConfig) -> Result<Report, Failure> {
    let mut closed = close_stage("symmetrize", cfg)?;
    lift_section(&mut closed, cfg)?;
    Ok(closed.stage.report)
}

pub fn cmd_pipeline(cfg: &RunConfig, symmetrize: bool) -> Result<Report, Failure> {
    let mut closed = close_stage("pipeline", cfg)?;
    if symmetrize {
        lift_section(&mut closed, cfg)?;
    }
    Ok(closed.stage.report)
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

fn render_text(r: &Report) -> String {
    use std::fmt::Write;
    let mut o = String::new();
    let _ = writeln!(o, "# {} ({})", r.command, r.schema);
    let _ = writeln!(o, "algebra {} (dim {}): {}", r.algebra.name, r.algebra.dim, r.algebra.generators.join(", "));
    if let Some(s) = &r.subalgebra {
        let _ = writeln!(o, "subalgebra {}: {}", s.name, s.generators.join(", "));
        let _ = writeln!(o, "imposed: {}", s.imposed.join(", "));
    }
    let _ = writeln!(o, "seed {:#x}", r.seed);
    if let Some(v) = &r.validation {
        let _ = writeln!(o, "\n## validation: {}", if v.ok { "ok" } else { "FAILED" });
        for x in &v.violations {
            let _ = writeln!(o, "  {x}");
        }
        for s in &v.subalgebras {
            let _ = writeln!(o, "  subalgebra {}: {}", s.name, if s.closed { "closed" } else { "NOT closed" });
        }
        if let Some(n) = v.invariant_count {
            let _ = writeln!(o, "  invariant count {n}");
        }
    }
    if let Some(c) = &r.commutant {
        let _ = writeln!(o, "\n## commutant (max degree {})", c.max_degree);
        let _ = writeln!(o, "invariant count {}, subalgebra {}", c.invariant_count, c.subalgebra_invariant_count);
        if let Some(l) = &c.labels {
            let _ = writeln!(o, "labels: ell0 {} i0 {} n0 {} M0 {}", l.ell0, l.i0, l.n0, l.m0);
        }
        let _ = writeln!(o, "degree  solutions  products  new");
        for d in &c.degrees {
            let _ = writeln!(o, "{:>6}  {:>9}  {:>8}  {:>3}", d.degree, d.solutions, d.products, d.new);
        }
        let _ = writeln!(o, "functionally independent: {}", c.functional_independence);
        for g in &c.generators {
            let tag = if g.central { " (central)" } else { "" };
            let _ = writeln!(o, "  {} [{}]{} = {}", g.name, g.degree, tag, g.polynomial);
        }
    }
    if let Some(p) = &r.presentation {
        let _ = writeln!(o, "\n## presentation ({} basis)", p.basis);
        for e in &p.pruned {
            let _ = writeln!(o, "  dropped {} = {}", e.name, e.value);
        }
        for e in &p.rewrites {
            let _ = writeln!(o, "  {} = {}", e.name, e.value);
        }
        for g in &p.generators {
            let tag = if g.central { " (central)" } else { "" };
            let _ = writeln!(o, "  {} [{}]{} = {}", g.name, g.degree, tag, g.polynomial);
        }
        let _ = writeln!(o, "brackets:");
        for b in &p.brackets {
            let _ = writeln!(o, "  {{{}, {}}} = {}", b.left, b.right, b.value);
        }
        let _ = writeln!(o, "relations:");
        for x in &p.relations {
            let _ = writeln!(o, "  {x} = 0");
        }
        let _ = writeln!(o, "centrals:");
        for x in &p.centrals {
            let _ = writeln!(o, "  {x}");
        }
        if let Some(c) = &p.cubic {
            let _ = writeln!(o, "cubic: A = {}, B = {}, C = {}", c.a, c.b, c.c);
            for k in &c.constants {
                let _ = writeln!(o, "  {} {} = {}", k.bracket, k.name, k.value);
            }
            if let Some(h) = &c.h {
                let _ = writeln!(o, "  h = {h}");
            }
            if let Some(k) = &c.casimir {
                let _ = writeln!(o, "  K = {k}");
            }
            if let Some(k) = &c.casimir_in_centrals {
                let _ = writeln!(o, "  K = {k}");
            }
            let _ = writeln!(o, "  K central: {}", c.casimir_verified);
        }
        for m in &p.mismatches {
            let _ = writeln!(o, "  MISMATCH {m}");
        }
    }
    if let Some(e) = &r.enveloping {
        let _ = writeln!(o, "\n## enveloping algebra ({})", e.convention);
        for g in &e.generators {
            let _ = writeln!(o, "  {} ({} terms) = {}", g.name, g.terms, g.ordered);
        }
        for c in &e.constants {
            let mark = if c.limit_matches { "" } else { "  LIMIT MISMATCH" };
            let _ = writeln!(
                o,
                "  {} {} [{}] = {}   (limit {}; classical {}){}",
                c.bracket, c.name, c.structure, c.value, c.classical_limit, c.classical, mark
            );
        }
        if let Some(k) = &e.casimir {
            let _ = writeln!(o, "casimir:");
            for t in &k.terms {
                let _ = writeln!(o, "  ({}) * {}", t.value, t.name);
            }
            let _ = writeln!(o, "  commutes with A, B, C: {}", k.commutes);
            for f in &k.failures {
                let _ = writeln!(o, "  [K, {}] = {}", f.name, f.value);
            }
            let _ = writeln!(o, "  classical limit {}", k.classical_limit);
            if let Some(d) = &k.classical_diff {
                let _ = writeln!(o, "  classical diff {d}");
            }
            if let Some(c) = &k.concrete {
                let _ = writeln!(
                    o,
                    "  concrete: degree {}, {} terms, commutes with [{}], fails with [{}], leading matches {}",
                    c.degree,
                    c.terms,
                    c.commutes_with.join(", "),
                    c.fails_with.join(", "),
                    c.leading_matches
                );
            }
        }
    }
    if !r.diagnostics.is_empty() {
        let _ = writeln!(o, "\n## diagnostics");
        for d in &r.diagnostics {
            let _ = writeln!(o, "  {d}");
        }
    }
    let _ = writeln!(o, "\nexit {}", r.exit_code);
    o
}

/// Writes `text` to `out` when given, else to stdout.
pub fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}
