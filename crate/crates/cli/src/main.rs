use clap::{Parser, Subcommand};
use neuroage::scenario::{
    self, convergence_study, csv, parse_config, preset_text, run_scenario, steady_report,
    ScenarioConfig, ScenarioError, PRESET_NAMES,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

/// Elapsed-time neural population solver.
#[derive(Debug, Parser)]
#[command(name = "neuroage", version)]
struct Cli {
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { config: PathBuf },
    /// Run a built-in scenario.
    Preset {
        name: String,
        /// Print the preset's scenario text instead of running it.
        #[arg(long)]
        show: bool,
    },
    /// Refinement study; ds and dt halve at every level.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Stationary fluxes of a scenario's model.
    Steady { config: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = if matches!(e, ScenarioError::Config(_)) {
            EXIT_CONFIG
        } else {
            EXIT_FAILURE
        };
        Failure::new(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::new(EXIT_CONFIG, format!("{}:\n{e}", path.display())))
}

fn run(cfg: &ScenarioConfig, cli: &Cli) -> Result<u8, Failure> {
    let report = run_scenario(cfg, &cli.out_dir)?;
    if !cli.quiet {
        println!("{}", report.summary.to_json());
        eprintln!(
            "wrote {} and {}",
            report.flux_path.display(),
            report.density_path.display()
        );
    }
    Ok(if report.summary.blow_up.is_some() {
        EXIT_BLOW_UP
    } else {
        0
    })
}

fn converge(cfg: &ScenarioConfig, levels: usize, cli: &Cli) -> Result<u8, Failure> {
    let rows =
        convergence_study(cfg, levels).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    let path = cli.out_dir.join(format!("{}_convergence.csv", cfg.name));
    let io = |e: std::io::Error| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    csv::write_convergence(&mut w, cfg, &rows)
        .and_then(|_| w.flush())
        .map_err(io)?;
    if !cli.quiet {
        for r in &rows {
            let order = r
                .observed_order
                .map_or(String::from("-"), |q| format!("{q:.3}"));
            println!(
                "ds = {:<10} dt = {:<12.6e} l1 = {:<12.6e} order = {order}",
                r.ds, r.dt, r.l1_error
            );
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Run { config } => run(&load(config)?, cli),
        Command::Preset { name, show } => {
            let Some(text) = preset_text(name) else {
                return Err(Failure::new(
                    EXIT_CONFIG,
                    format!(
                        "unknown preset `{name}` (known: {})",
                        PRESET_NAMES.join(", ")
                    ),
                ));
            };
            if *show {
                print!("{text}");
                return Ok(0);
            }
            let cfg = scenario::parse_config(text)
                .map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
            run(&cfg, cli)
        }
        Command::Converge { config, levels } => converge(&load(config)?, *levels, cli),
        Command::Steady { config } => {
            let line = steady_report(&load(config)?)
                .map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
            if !cli.quiet {
                println!("{line}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
