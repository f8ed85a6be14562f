use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use twirlkit_cli::checks::{run_level, Level};
use twirlkit_cli::{run, ConfigError, ExperimentConfig, Probe, RunError, THREADS_ENV};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "twirlkit", version, about = "Isospectral twirling of quantum-chaos probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracle suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the JSON config schema defaults for a probe.
    Template {
        #[arg(value_enum)]
        probe: Probe,
    },
    #[command(external_subcommand)]
    Probe(Vec<String>),
}

/// `twirlkit <probe> --config FILE [--seed N] [--out DIR]`.
#[derive(Parser)]
#[command(name = "twirlkit <probe>")]
struct ProbeArgs {
    #[arg(value_enum)]
    probe: Probe,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value.parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be >= 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    Ok(())
}

fn run_probe(args: Vec<String>) -> ExitCode {
    let parsed = match ProbeArgs::try_parse_from(std::iter::once("twirlkit".to_string()).chain(args)) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut cfg = match ExperimentConfig::load(&parsed.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cfg.probe != parsed.probe {
        eprintln!("probe: config is for {}, command asked for {}", cfg.probe, parsed.probe);
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(seed) = parsed.seed {
        cfg.seed = seed;
    }
    match run(&cfg, parsed.out.as_deref()) {
        Ok(record) => {
            for f in &record.files {
                println!("{f}");
            }
            log::info!("{} finished in {:.2} s", cfg.probe, record.wall_time_s);
            ExitCode::SUCCESS
        }
        Err(RunError::Numerics(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

fn verify(level: Level, json: Option<PathBuf>) -> ExitCode {
    let start = Instant::now();
    let outcomes = run_level(level, |o| println!("{o}"));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} checks, {failed} failed, {:.1} s", outcomes.len(), start.elapsed().as_secs_f64());
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&outcomes).expect("outcomes serialize");
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("cannot write {}: {e}", path.display());
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Verify { level, json } => verify(level, json),
        Command::Template { probe } => {
            let text = format!(r#"{{"probe": "{probe}", "n_qubits": 4}}"#);
            let cfg = ExperimentConfig::from_json(&text).map_err(|e: ConfigError| e.to_string());
            match cfg {
                Ok(c) => {
                    println!("{}", serde_json::to_string_pretty(&c).expect("config serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
        Command::Probe(args) => run_probe(args),
    }
}
