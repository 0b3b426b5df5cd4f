use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracwave_cli::config::{default_spec, parse_config, print_config, ExperimentKind, RunSpec};
use fracwave_cli::dispatch::{self, output_dir};
use fracwave_cli::error::{CliError, Result, EXIT_PASS};

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Fractional wave equations with adhesive potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configuration and write trajectory and energy CSVs.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment (energy, epsilon-convergence, example41,
    /// small-data, dispersion) with defaults or a config file.
    Experiment {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the sup-norm embedding constant, e.g. `embed-const d=1 s=1`.
    EmbedConst {
        #[arg(required = true)]
        args: Vec<String>,
    },
    /// Certify a regularized family, e.g.
    /// `certify-potential "mollified(base=clipped_quadratic(u_star=1), ratio=1)" --eps 0.2,0.1,0.05`.
    CertifyPotential {
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        sample: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run every point of the config's [sweep] grid.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the canonical form of a config, or an experiment's defaults.
    PrintConfig {
        #[arg(required_unless_present = "default", conflicts_with = "default")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "EXPERIMENT")]
        default: Option<String>,
    },
}

fn load(path: &Path) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn kind(name: &str) -> Result<ExperimentKind> {
    ExperimentKind::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
        CliError::Usage(format!("unknown experiment '{name}'; expected one of {}", names.join(", ")))
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let spec = load(&config)?;
            let summary = dispatch::simulate(&spec, &output_dir(out.as_deref(), Some(&spec)))?;
            print!("{}", summary.render());
            Ok(())
        }
        Command::Experiment { name, config, out } => {
            let kind = kind(&name)?;
            let spec = match config {
                Some(path) => {
                    let spec = load(&path)?;
                    match &spec.experiment {
                        Some(e) if e.kind() == kind => spec,
                        Some(e) => {
                            return Err(CliError::Usage(format!(
                                "{} configures experiment '{}', not '{name}'",
                                path.display(),
                                e.kind().name()
                            )))
                        }
                        None => return Err(CliError::Usage(format!("{} has no [experiment] section", path.display()))),
                    }
                }
                None => default_spec(kind),
            };
            let (report, dir) = dispatch::experiment(&spec, &output_dir(out.as_deref(), Some(&spec)))?;
            print!("{}", report.summary());
            println!("  output: {}", dir.display());
            dispatch::check_report(&report)
        }
        Command::EmbedConst { args } => {
            let c = dispatch::embed_const(&args)?;
            println!("{:.12} (error bound {:.2e}, cutoff {})", c.value, c.error_bound, c.cutoff);
            Ok(())
        }
        Command::CertifyPotential {
            family,
            eps,
            sample,
            seed,
            json,
        } => {
            let report = dispatch::certify(&family, &eps, sample, seed)?;
            if json {
                let text = serde_json::to_string_pretty(&report).map_err(fracwave::Error::from)?;
                println!("{text}");
            } else {
                print!("{}", dispatch::render_certification(&report));
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Failed(report.failures.clone()))
            }
        }
        Command::Sweep { config, out } => {
            let spec = load(&config)?;
            let out = output_dir(out.as_deref(), Some(&spec));
            let outcomes = dispatch::sweep(&spec, &out, dispatch::sweep_threads()?)?;
            let mut worst: Option<CliError> = None;
            for (i, o) in outcomes.into_iter().enumerate() {
                match o.result {
                    Ok(_) => println!("point {i:04} PASS {}", o.label),
                    Err(e) => {
                        println!("point {i:04} FAIL {}: {e}", o.label);
                        if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                            worst = Some(e);
                        }
                    }
                }
            }
            println!("summary: {}", out.join("sweep.csv").display());
            worst.map_or(Ok(()), Err)
        }
        Command::PrintConfig { config, default } => {
            let spec = match (config, default) {
                (Some(path), _) => load(&path)?,
                (None, Some(name)) => default_spec(kind(&name)?),
                (None, None) => unreachable!("clap requires one of them"),
            };
            print!("{}", print_config(&spec));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_PASS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
