use std::path::PathBuf;
use std::process::ExitCode;

use bloat::config::{Mode, PipelineConfig};
use bloat::pipeline::{Pipeline, RunSummary, Stage};
use bloat::{Error, Result};
use clap::{Parser, Subcommand};

/// Measure informational bloat in corporate disclosures.
#[derive(Debug, Parser)]
#[command(name = "bloat", version)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, default_value = "bloat.toml")]
    config: PathBuf,
    /// Restrict `run` to these stages (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    only: Vec<Stage>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract, clean and segment documents into the store.
    Ingest,
    /// Summarize stored documents and compute bloat.
    Summarize,
    /// Text metrics for documents and summaries.
    Metrics,
    /// Event-study outcomes from market data.
    Market,
    /// Assemble the firm-period panel.
    Panel,
    /// Fit the configured regressions.
    Regress,
    /// Descriptive tables.
    Report,
    /// Every stage in order.
    Run,
}

fn stages(cli: &Cli) -> Vec<Stage> {
    let one = |s| vec![s];
    match cli.command {
        Command::Ingest => one(Stage::Ingest),
        Command::Summarize => one(Stage::Summarize),
        Command::Metrics => one(Stage::Metrics),
        Command::Market => one(Stage::Market),
        Command::Panel => one(Stage::Panel),
        Command::Regress => one(Stage::Regress),
        Command::Report => one(Stage::Report),
        Command::Run if cli.only.is_empty() => Stage::ALL.to_vec(),
        Command::Run => cli.only.clone(),
    }
}

fn execute(cli: &Cli) -> Result<RunSummary> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    let stages = stages(cli);
    let pipeline = Pipeline::new(cfg, &stages)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(pipeline.cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| pipeline.run(&stages))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(std::io::IsTerminal::is_terminal(&std::io::stderr()))
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("BLOAT_LOG").unwrap_or_else(|_| "warn".into()),
        )
        .init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            for s in &summary.stages {
                let cached = if s.cached { " (cached)" } else { "" };
                println!("{}: {}{cached}", s.stage.name(), s.message);
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
