use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use ladder_core::output::{sweep_scenario_id, write_outputs, write_sweep_manifest};
use ladder_core::{default_parallelism, presets, run_replications, sweep_cells, Error, ScenarioConfig};

#[derive(Parser)]
#[command(name = "ladder", version, about = "Simulate gender composition in an eight-level hierarchy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replicate one scenario and write per-run and aggregate CSVs.
    Run(RunArgs),
    /// Replicate a scenario once per value of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Dotted configuration key, e.g. `norms.w`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; ranges are written `start:end`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Built-in presets.
    Presets {
        #[command(subcommand)]
        command: PresetsCommand,
    },
    /// Check a configuration file and print the resolved configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum PresetsCommand {
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON file with flat dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `out/<scenario>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    parallelism: Option<usize>,
}

/// A scenario resolved from the command line.
struct Scenario {
    id: String,
    config: ScenarioConfig,
    n_runs: u32,
    master_seed: u64,
    out_dir: PathBuf,
    parallelism: usize,
}

enum Failure {
    Invalid(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn resolve(args: &RunArgs) -> Result<Scenario, Failure> {
    let (id, mut config) = match (&args.preset, &args.config) {
        (Some(name), _) => (name.clone(), presets::resolve(name)?),
        (None, Some(path)) => {
            let id = path.file_stem().map_or_else(|| "config".into(), |s| s.to_string_lossy().into_owned());
            // Any failure to read the configuration is the caller's input problem.
            (id, ScenarioConfig::load(path).map_err(Failure::Invalid)?)
        }
        (None, None) => unreachable!("clap requires --preset or --config"),
    };
    if let Some(n) = args.runs {
        config.run.n_runs = n;
    }
    if let Some(s) = args.seed {
        config.run.master_seed = s;
    }
    if let Some(out) = &args.out {
        config.run.out_dir = Some(out.clone());
    }
    config.validate()?;
    if args.parallelism == Some(0) {
        return Err(Failure::Invalid(Error::Validation {
            field: "parallelism".into(),
            message: "must be at least 1".into(),
        }));
    }
    let out_dir = config
        .run
        .out_dir
        .clone()
        .unwrap_or_else(|| Path::new("out").join(&id));
    Ok(Scenario {
        n_runs: config.run.n_runs,
        master_seed: config.run.master_seed,
        parallelism: args.parallelism.unwrap_or_else(default_parallelism),
        id,
        config,
        out_dir,
    })
}

fn run_one(id: &str, config: &ScenarioConfig, s: &Scenario, out_dir: &Path) -> Result<(), Failure> {
    info!("{id}: {} runs, seed {}, {} threads", s.n_runs, s.master_seed, s.parallelism);
    let reps = run_replications(config, s.n_runs, s.master_seed, s.parallelism)?;
    for w in &reps.aggregates.warnings {
        warn!("{id}: {w}");
    }
    write_outputs(out_dir, id, &reps)?;
    println!("{id}: wrote {}", out_dir.display());
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(args) => {
            let s = resolve(&args)?;
            run_one(&s.id, &s.config, &s, &s.out_dir)
        }
        Command::Sweep { run, param, values } => {
            let s = resolve(&run)?;
            let cells = sweep_cells(&s.config, &param, &values)?;
            for cell in &cells {
                let dir = s.out_dir.join(cell.label());
                run_one(&sweep_scenario_id(&s.id, cell), &cell.config, &s, &dir)?;
            }
            write_sweep_manifest(&s.out_dir, &s.id, &cells, s.n_runs, s.master_seed)?;
            Ok(())
        }
        Command::Presets {
            command: PresetsCommand::List,
        } => {
            let width = presets::PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
            for p in presets::PRESETS {
                println!("{:width$}  {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config).map_err(Failure::Invalid)?;
            print!("{}", cfg.to_json_string());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
