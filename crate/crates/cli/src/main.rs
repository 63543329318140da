use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polychain_cli::{
    cmd_close, cmd_commutant, cmd_pipeline, cmd_symmetrize, cmd_validate, emit, exit, parse_seed, render,
    BasisSource, Format, RunConfig, SEED_VAR,
};
use polychain_core::DEFAULT_SEED;

/// Commutants of Lie subalgebras, their polynomial Poisson algebras, and
/// lifts to the enveloping algebra.
#[derive(Parser)]
#[command(name = "polychain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check antisymmetry, Jacobi and subalgebra closure.
    Validate(Common),
    /// Solve the commutant degree by degree.
    Commutant(Common),
    /// Build the polynomial Poisson algebra of the commutant.
    Close(Common),
    /// Lift a cubic presentation to the enveloping algebra.
    Symmetrize(Common),
    /// Commutant, closure and (with --symmetrize) the lift.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        symmetrize: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Catalog name (su3-LT, so5, schr3) or definition file.
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    subalgebra: Option<String>,
    #[arg(long, default_value_t = 6)]
    max_degree: u32,
    /// Impose every subalgebra coordinate, including ones the catalog
    /// chain leaves out.
    #[arg(long)]
    strict_k: bool,
    /// Start the closure from the computed or the published basis.
    #[arg(long, value_enum, default_value_t = BasisArg::Computed)]
    basis: BasisArg,
    /// Basis-change file, or `builtin`.
    #[arg(long)]
    basis_change: Option<String>,
    #[arg(long)]
    ell0: Option<usize>,
    /// Also check [K, A] by direct normalization (slow).
    #[arg(long)]
    concrete: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = SEED_VAR, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Computed,
    Published,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            algebra: self.algebra.clone(),
            subalgebra: self.subalgebra.clone(),
            max_degree: self.max_degree,
            strict: self.strict_k,
            basis: match self.basis {
                BasisArg::Computed => BasisSource::Computed,
                BasisArg::Published => BasisSource::Published,
            },
            basis_change: self.basis_change.clone(),
            ell0: self.ell0,
            concrete: self.concrete,
            seed: self.seed,
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Validate(c) => (c, cmd_validate(&c.config())),
        Command::Commutant(c) => (c, cmd_commutant(&c.config())),
        Command::Close(c) => (c, cmd_close(&c.config())),
        Command::Symmetrize(c) => (c, cmd_symmetrize(&c.config())),
        Command::Pipeline { common, symmetrize } => (common, cmd_pipeline(&common.config(), *symmetrize)),
    };
    let (report, code) = match result {
        Ok(r) => {
            let code = r.exit_code;
            (Some(r), code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.report, f.code)
        }
    };
    if let Some(r) = report {
        if let Err(e) = emit(&render(&r, common.format()), common.out.as_ref()) {
            eprintln!("error: {e}");
            return ExitCode::from(exit::ERROR as u8);
        }
    }
    ExitCode::from(code as u8)
}
