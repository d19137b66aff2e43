//! Batch interface over `homfinsler-core`: load a space file, run audits,
//! curvature evaluations and sweeps, and emit text or JSON reports.

pub mod commands;
pub mod report;
pub mod spacefile;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use homfinsler_core::catalog::Fixture;
use homfinsler_core::{NormFamily, Tolerances};

use commands::{CommandError, Options};
use spacefile::{LoadedSpace, SpaceFile};

#[derive(Debug, Parser)]
#[command(name = "homfinsler", version, about = "Checks and curvature of homogeneous (α₁,α₂) Finsler spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed of every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of sampled directions.
    #[arg(long, global = true, default_value_t = 256)]
    pub samples: usize,
    /// Emit the JSON report instead of the text table.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub tol_structure: Option<f64>,
    #[arg(long, global = true)]
    pub tol_nr: Option<f64>,
    #[arg(long, global = true)]
    pub tol_xcheck: Option<f64>,
    #[arg(long, global = true)]
    pub tol_s: Option<f64>,
    #[arg(long, global = true)]
    pub tol_e: Option<f64>,
    #[arg(long, global = true)]
    pub tol_convexity: Option<f64>,
    /// Below this `|y₂|` the closed flag-curvature form is skipped.
    #[arg(long, global = true)]
    pub eps_sing: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebraic and norm admissibility audit; exits 1 on any failure.
    Validate { space: String },
    /// Natural reductiveness, three ways.
    Nr { space: String },
    /// S-curvature samples and the vanishing certificate.
    Scurv { space: String },
    /// E-curvature at a vector or over samples.
    Ecurv {
        space: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
    },
    /// Flag curvature by the closed form and by definition.
    Flag {
        space: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "v")]
        y: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "y")]
        v: Option<Vec<f64>>,
        #[arg(long, conflicts_with_all = ["y", "v"])]
        sweep: Option<usize>,
    },
    /// S/E equivalence verdicts against the algebraic certificate.
    AuditEquiv { space: String },
    /// Print a catalog fixture as a space file.
    Export {
        fixture: String,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Text to print and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl GlobalArgs {
    fn tolerances(&self, file: &LoadedSpace) -> Tolerances {
        let t = file.tolerances.apply(Tolerances::default());
        Tolerances {
            structure: self.tol_structure.unwrap_or(t.structure),
            nr: self.tol_nr.unwrap_or(t.nr),
            xcheck: self.tol_xcheck.unwrap_or(t.xcheck),
            s_vanish: self.tol_s.unwrap_or(t.s_vanish),
            e_vanish: self.tol_e.unwrap_or(t.e_vanish),
            eps_sing: self.eps_sing.unwrap_or(t.eps_sing),
            convexity: self.tol_convexity.unwrap_or(t.convexity),
        }
    }
}

/// Loads a space file, or a catalog fixture given as `fixture:NAME`.
pub fn load_space(spec: &str) -> Result<LoadedSpace, CommandError> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        let fixture = Fixture::from_name(name).ok_or_else(|| CommandError::Usage(format!("unknown fixture {name:?}")))?;
        return Ok(SpaceFile::from_fixture(fixture, &NormFamily::QuarticMean { c: 1.0 }).load()?);
    }
    Ok(SpaceFile::read(Path::new(spec))?.load()?)
}

pub fn run(cli: &Cli) -> Result<Outcome, CommandError> {
    let g = &cli.global;
    let render = |report: report::Report, code: i32| Outcome {
        stdout: if g.json { report.to_json() } else { report.to_text() },
        code,
    };
    let with_space = |spec: &str| -> Result<(LoadedSpace, Options), CommandError> {
        let loaded = load_space(spec)?;
        let opts = Options { seed: g.seed, samples: g.samples, tolerances: g.tolerances(&loaded) };
        Ok((loaded, opts))
    };
    match &cli.command {
        Command::Validate { space } => {
            let (l, o) = with_space(space)?;
            let report = commands::validate(&l, &o);
            let code = if report.passed { 0 } else { 1 };
            Ok(render(report, code))
        }
        Command::Nr { space } => {
            let (l, o) = with_space(space)?;
            Ok(render(commands::nr(&l, &o)?, 0))
        }
        Command::Scurv { space } => {
            let (l, o) = with_space(space)?;
            Ok(render(commands::scurv(&l, &o)?, 0))
        }
        Command::Ecurv { space, y } => {
            let (l, o) = with_space(space)?;
            Ok(render(commands::ecurv(&l, &o, y.as_deref())?, 0))
        }
        Command::Flag { space, y, v, sweep } => {
            let (l, o) = with_space(space)?;
            Ok(render(commands::flag(&l, &o, y.as_deref(), v.as_deref(), *sweep)?, 0))
        }
        Command::AuditEquiv { space } => {
            let (l, o) = with_space(space)?;
            Ok(render(commands::audit_equiv(&l, &o)?, 0))
        }
        Command::Export { fixture, family, params, output } => {
            let family = match family {
                Some(name) => Some(
                    NormFamily::from_name(name, params.as_deref().unwrap_or(&[]))
                        .map_err(|e| CommandError::Usage(e.to_string()))?,
                ),
                None => None,
            };
            let text = commands::export(fixture, family)?;
            match output {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| CommandError::Usage(format!("{}: {e}", path.display())))?;
                    Ok(Outcome { stdout: String::new(), code: 0 })
                }
                None => Ok(Outcome { stdout: text, code: 0 }),
            }
        }
    }
}
