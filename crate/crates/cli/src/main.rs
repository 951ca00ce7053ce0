use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qshhg_cli::figures::{figure_config, figure_ids};
use qshhg_cli::{convergence_check, run_scenario, CliError, RunManifest, RunOptions, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qshhg", version, about = "Sideband harmonic generation: spectra, Fock-space statistics and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory (default: the config's out_dir, else runs/<label>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "QSHHG_THREADS")]
    threads: Option<usize>,
    /// Permit exact Fock-space work at r > 12
    #[arg(long)]
    allow_expensive: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce a figure from its canned config
    Figure {
        #[arg(long, required_unless_present = "list")]
        figure: Option<String>,
        /// Print the valid figure ids
        #[arg(long)]
        list: bool,
        /// Print the canned config instead of running it
        #[arg(long)]
        show_config: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Parse and validate a config, then print it with defaults filled in
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun the spectrum with doubled grids and compare band photons
    ConvergenceCheck {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    ScenarioConfig::from_toml(&text)
}

fn out_dir(common: &Common, cfg: &ScenarioConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("runs").join(&cfg.label))
}

fn options(common: &Common, figure: Option<String>) -> RunOptions {
    RunOptions { threads: common.threads, allow_expensive: common.allow_expensive, figure }
}

fn summary(m: &RunManifest, dir: &Path) {
    let total: f64 = m.stages.iter().map(|s| s.wall_time_s).sum();
    println!("wrote {} files to {} ({total:.1} s)", m.outputs.len() + 1, dir.display());
    for n in &m.notes {
        println!("note: {n}");
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, common } => {
            let cfg = load(&config)?;
            let dir = out_dir(&common, &cfg);
            summary(&run_scenario(&cfg, &dir, &options(&common, None))?, &dir);
        }
        Command::Figure { figure, list, show_config, common } => {
            if list {
                println!("{}", figure_ids().join("\n"));
                return Ok(());
            }
            let id = figure.expect("clap enforces --figure");
            let cfg = figure_config(&id)?;
            if show_config {
                print!("{}", qshhg_cli::figures::figure_source(&id)?);
                return Ok(());
            }
            let dir = out_dir(&common, &cfg);
            summary(&run_scenario(&cfg, &dir, &options(&common, Some(id)))?, &dir);
        }
        Command::ValidateConfig { config } => {
            print!("{}", load(&config)?.to_toml());
        }
        Command::ConvergenceCheck { config, common } => {
            let cfg = load(&config)?;
            let dir = out_dir(&common, &cfg);
            let m = convergence_check(&cfg, &dir, &options(&common, None))?;
            for c in &m.convergence {
                println!("{}: {:.3e} (tolerance {:?})", c.quantity, c.value, c.tolerance);
            }
            summary(&m, &dir);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
