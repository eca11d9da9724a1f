//! `hcstab`: hierarchical clustering and stability experiments on finite
//! metric spaces.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcstab_core::{BuiltinLinkage, Condition, MethodSpec, PAlpha, DEFAULT_GH_BUDGET};

use config::{Format, HarnessKind, PathChoice, ProbeSource, RunConfig, ScanSource};
use error::{CliError, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "hcstab", version, about = "Hierarchical clustering and stability experiments on finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format. Not every command supports every format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// File for the run trace of non-JSON cluster output. Defaults to
    /// `<out>.trace.json` when --out is given.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    /// Absolute tolerance for triangle and symmetry checks.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,

    /// Accept zero off-diagonal distances and merge such points.
    #[arg(long)]
    pseudometric: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Sl,
    Cl,
    Al,
    Exotic,
    SlAlpha,
    AlmostStandard,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "sl")]
    method: MethodName,

    /// Rips dimension bound for sl-alpha and the p-alpha condition.
    #[arg(long)]
    alpha: Option<f64>,

    /// Unchaining condition for almost-standard: `always`, `p-alpha` or `p-alpha:<alpha>`.
    #[arg(long)]
    condition: Option<String>,

    /// Linkage underlying almost-standard clustering.
    #[arg(long, value_parser = parse_linkage)]
    linkage: Option<BuiltinLinkage>,
}

fn parse_linkage(s: &str) -> Result<BuiltinLinkage, String> {
    s.parse().map_err(|e: hcstab_core::LinkageError| e.to_string())
}

impl MethodArgs {
    fn resolve(&self) -> Result<MethodSpec, CliError> {
        let standard = |l| {
            if self.alpha.is_some() || self.condition.is_some() || self.linkage.is_some() {
                return Err(CliError::InvalidArgument(format!(
                    "--alpha, --condition and --linkage do not apply to --method {l}"
                )));
            }
            Ok(MethodSpec::Standard(l))
        };
        match self.method {
            MethodName::Sl => standard(BuiltinLinkage::Sl),
            MethodName::Cl => standard(BuiltinLinkage::Cl),
            MethodName::Al => standard(BuiltinLinkage::Al),
            MethodName::Exotic => standard(BuiltinLinkage::Exotic),
            MethodName::SlAlpha => {
                if self.condition.is_some() || self.linkage.is_some() {
                    return Err(CliError::InvalidArgument(
                        "--condition and --linkage do not apply to sl-alpha".into(),
                    ));
                }
                let alpha = self
                    .alpha
                    .ok_or_else(|| CliError::InvalidArgument("sl-alpha needs --alpha".into()))?;
                PAlpha::new(alpha)?;
                Ok(MethodSpec::SlAlpha(alpha))
            }
            MethodName::AlmostStandard => {
                let linkage = self.linkage.unwrap_or(BuiltinLinkage::Sl);
                let name = self
                    .condition
                    .as_deref()
                    .ok_or_else(|| CliError::InvalidArgument("almost-standard needs --condition".into()))?;
                let condition: Condition = match (name, self.alpha) {
                    ("p-alpha", Some(a)) => Condition::PAlpha(PAlpha::new(a)?),
                    ("p-alpha", None) => {
                        return Err(CliError::InvalidArgument("--condition p-alpha needs --alpha".into()))
                    }
                    (other, None) => other.parse()?,
                    (_, Some(_)) => {
                        return Err(CliError::InvalidArgument(
                            "--alpha only combines with --condition p-alpha".into(),
                        ))
                    }
                };
                Ok(MethodSpec::AlmostStandard(linkage, condition))
            }
        }
    }
}

fn budget_default() -> u64 {
    DEFAULT_GH_BUDGET
}

#[derive(Subcommand)]
enum Command {
    /// Check that a distance matrix is a (pseudo)metric and summarize it.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Cluster a metric space into a dendrogram.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Gromov-Hausdorff distance between two spaces.
    Gh {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input2: PathBuf,
        /// Search node budget for the exact distance.
        #[arg(long, default_value_t = budget_default())]
        budget: u64,
        /// Exit with status 4 when the budget runs out before the distance is pinned down.
        #[arg(long)]
        require_exact: bool,
        /// Only compute the cheap lower and upper bounds.
        #[arg(long)]
        bounds_only: bool,
        /// Absolute tolerance for matrix validation.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Bisect a path of spaces for the point where a method's output jumps.
    PathScan {
        /// Scan the bridge path on the built-in bridge space for this alpha.
        #[arg(long, conflicts_with_all = ["input", "block1"])]
        prop_bridge: Option<usize>,
        /// Block spacing of the built-in bridge space.
        #[arg(long, default_value_t = 0.5)]
        gap: f64,
        #[arg(long, requires = "block1")]
        input: Option<PathBuf>,
        /// Comma-separated labels of the first block; the rest form the second.
        #[arg(long, value_delimiter = ',')]
        block1: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "bridge")]
        path: PathChoice,
        /// Target linkage value for the gamma path.
        #[arg(long)]
        r: Option<f64>,
        /// Stop bisecting once the bracket is shorter than this.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = budget_default())]
        budget: u64,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Complete-linkage instability on the counterexample family.
    Counterexample {
        #[arg(long, default_value_t = 0)]
        k_min: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long, default_value_t = budget_default())]
        budget: u64,
    },
    /// Perturb an ultrametric at shrinking noise levels and measure how far the output moves.
    Probe {
        /// Ultrametric to perturb; a random one is drawn when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        random_n: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        levels: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = budget_default())]
        budget: u64,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Randomized axiom or admissibility checks for a method.
    Harness {
        #[arg(long, value_enum, default_value = "axioms")]
        kind: HarnessKind,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Replay the configuration recorded in an earlier report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn resolve(command: &Command, format: Format) -> Result<RunConfig, CliError> {
    Ok(match command {
        Command::Validate { input, matrix } => RunConfig::Validate {
            input: path_string(input),
            tol: matrix.tol,
            pseudometric: matrix.pseudometric,
            format,
        },
        Command::Cluster { input, method, matrix } => RunConfig::Cluster {
            input: path_string(input),
            method: method.resolve()?,
            tol: matrix.tol,
            pseudometric: matrix.pseudometric,
            format,
        },
        Command::Gh {
            input,
            input2,
            budget,
            require_exact,
            bounds_only,
            tol,
        } => RunConfig::Gh {
            input: path_string(input),
            input2: path_string(input2),
            budget: *budget,
            require_exact: *require_exact,
            bounds_only: *bounds_only,
            tol: *tol,
            format,
        },
        Command::PathScan {
            prop_bridge,
            gap,
            input,
            block1,
            path,
            r,
            tol,
            budget,
            method,
        } => {
            let source = match (prop_bridge, input, block1) {
                (Some(alpha), _, _) => ScanSource::PropBridge { alpha: *alpha, gap: *gap },
                (None, Some(input), Some(block1)) => ScanSource::File {
                    input: path_string(input),
                    block1: block1.clone(),
                    path: *path,
                    r: *r,
                },
                _ => {
                    return Err(CliError::InvalidArgument(
                        "path-scan needs --prop-bridge or --input with --block1".into(),
                    ))
                }
            };
            RunConfig::PathScan {
                source,
                method: method.resolve()?,
                tol: *tol,
                budget: *budget,
                format,
            }
        }
        Command::Counterexample { k_min, k_max, budget } => RunConfig::Counterexample {
            k_min: *k_min,
            k_max: *k_max,
            budget: *budget,
            format,
        },
        Command::Probe {
            input,
            random_n,
            depth,
            levels,
            trials,
            seed,
            budget,
            method,
        } => RunConfig::Probe {
            source: match input {
                Some(p) => ProbeSource::File { input: path_string(p) },
                None => ProbeSource::Random {
                    n: *random_n,
                    depth: *depth,
                    seed: *seed,
                },
            },
            method: method.resolve()?,
            levels: levels.clone(),
            trials: *trials,
            seed: *seed,
            budget: *budget,
            format,
        },
        Command::Harness {
            kind,
            trials,
            seed,
            method,
        } => RunConfig::Harness {
            kind: *kind,
            method: method.resolve()?,
            trials: *trials,
            seed: *seed,
            format,
        },
        Command::Run { config } => {
            let text = std::fs::read_to_string(config).map_err(|source| CliError::Write {
                path: path_string(config),
                source,
            })?;
            replay_config(&text)?
        }
    })
}

/// Accepts a bare config, a JSON report with a `config` field, or a CSV
/// report whose first line is `# config: {...}`.
fn replay_config(text: &str) -> Result<RunConfig, CliError> {
    let first = text.lines().next().unwrap_or("");
    let json = match first.strip_prefix("# config: ") {
        Some(rest) => rest.to_string(),
        None => text.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(&json).map_err(|e| CliError::Config(e.to_string()))?;
    let value = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path_string(path),
        source,
    })
}

fn trace_path(cli: &Cli) -> Option<PathBuf> {
    cli.trace.clone().or_else(|| {
        cli.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".trace.json");
            PathBuf::from(s)
        })
    })
}

fn run(cli: &Cli) -> Result<Option<String>, CliError> {
    let mut cfg = resolve(&cli.command, cli.format.unwrap_or(Format::Json))?;
    if let (Command::Run { .. }, Some(f)) = (&cli.command, cli.format) {
        cfg.set_format(f);
    }
    let rendered = commands::execute(&cfg)?;
    match &cli.out {
        Some(path) => write_file(path, &rendered.body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let (Some(trace), Some(path)) = (&rendered.trace, trace_path(cli)) {
        write_file(&path, trace)?;
    }
    Ok(rendered.inexact)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(reason)) => {
            eprintln!("error: {reason}");
            ExitCode::from(error::EXIT_BUDGET)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
