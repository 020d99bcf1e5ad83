//! `ciscat`: run named or configured scattering scenarios.

mod config;
mod presets;
mod scenario;

use clap::{Args, Parser, Subcommand};
use config::{parse_config, ConfigError, ScenarioConfig, Task};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ciscat", version, about = "Scattering through conical intersections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a wave packet and analyse the final state.
    Propagate(RunArgs),
    /// Partial-wave cross section and optional field dump.
    Crosssection(RunArgs),
    /// Wilson loop of the projected gauge potential.
    Wilson(RunArgs),
    /// Phase-dislocation lines of a field dump.
    Dislocations {
        #[command(flatten)]
        run: RunArgs,
        /// Field dump to analyse.
        #[arg(long)]
        input: PathBuf,
    },
    /// List the named scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario; see `ciscat list`.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory [default: $CISCAT_OUT or ./ciscat-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Accepted as a hint; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Config(Vec<ConfigError>),
    Numerical(ciscat::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn messages(&self) -> Vec<String> {
        match self {
            Failure::Config(errs) => errs.iter().map(ToString::to_string).collect(),
            Failure::Numerical(e) => vec![e.to_string()],
        }
    }
}

impl From<ciscat::Error> for Failure {
    fn from(e: ciscat::Error) -> Self {
        match e {
            ciscat::Error::Config(m) => Failure::Config(vec![ConfigError { line: None, message: m }]),
            other => Failure::Numerical(other),
        }
    }
}

fn config_error(message: String) -> Failure {
    Failure::Config(vec![ConfigError { line: None, message }])
}

fn load(args: &RunArgs, task: Task) -> Result<ScenarioConfig, Failure> {
    let cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text).map_err(Failure::Config)?
        }
        (None, Some(name)) => config::from_preset(name).map_err(Failure::Config)?,
        // Only dislocations has defaults usable without a scenario.
        (None, None) if task == Task::Dislocations => {
            parse_config("[run]\nscenario = custom\ntask = dislocations\n").map_err(Failure::Config)?
        }
        (None, None) => return Err(config_error("give --config <file> or --preset <name>".into())),
    };
    if cfg.task != task {
        return Err(config_error(format!(
            "scenario `{}` is a {} scenario; run `ciscat {}`",
            cfg.scenario,
            cfg.task.name(),
            cfg.task.name()
        )));
    }
    Ok(cfg)
}

fn outdir(args: &RunArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os("CISCAT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ciscat-out"))
}

fn write_error_json(out: &Path, failure: &Failure) {
    let kind = match failure {
        Failure::Config(_) => "config",
        Failure::Numerical(_) => "numerical",
    };
    let body = serde_json::json!({
        "kind": kind,
        "exit_code": failure.code(),
        "errors": failure.messages(),
    });
    if std::fs::create_dir_all(out).is_ok() {
        let _ = std::fs::write(out.join("error.json"), format!("{body:#}\n"));
    }
}

fn execute(args: &RunArgs, task: Task, input: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(args, task)?;
    let report = scenario::run_scenario(&cfg, &outdir(args), input)?;
    for line in report.lines {
        println!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, result) = match &cli.command {
        Command::List => {
            for (name, figure) in presets::catalog() {
                println!("{name:<20} {figure}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Propagate(a) => (a, execute(a, Task::Propagate, None)),
        Command::Crosssection(a) => (a, execute(a, Task::CrossSection, None)),
        Command::Wilson(a) => (a, execute(a, Task::Wilson, None)),
        Command::Dislocations { run, input } => (run, execute(run, Task::Dislocations, Some(input))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            for m in failure.messages() {
                eprintln!("error: {m}");
            }
            write_error_json(&outdir(args), &failure);
            ExitCode::from(failure.code())
        }
    }
}
