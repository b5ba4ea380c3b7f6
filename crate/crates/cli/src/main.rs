use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paramine_cli::config::CONFIG_ENV;
use paramine_cli::{fixture, stages, CliError, Config, Stage};

#[derive(Parser)]
#[command(name = "paramine", version, about = "Mine English-Japanese sentence pairs from bilingual websites")]
struct Cli {
    /// Pipeline config (TOML).
    #[arg(long, short, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set align.skip_penalty=3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank domains by English/Japanese balance in general-crawl archives.
    Rank,
    /// Crawl every ranked domain into a per-domain archive.
    Crawl,
    /// Drop domains whose archives are too small.
    Ingest,
    /// Extract text and split sentences.
    Extract,
    /// Pair English and Japanese documents within each domain.
    Docalign,
    /// Align sentences inside each document pair.
    Align,
    /// Train the pair classifier and filter the aligned corpus.
    Filter,
    /// Write sentence, word and character counts.
    Stats,
    /// Run every stage in order.
    Pipeline,
    /// Write the synthetic fixture and its config to a directory.
    GenFixture {
        dir: PathBuf,
        #[arg(long, default_value_t = paramine::synth::SynthConfig::default().seed)]
        seed: u64,
    },
}

fn stage_of(cmd: &Command) -> Option<Stage> {
    Some(match cmd {
        Command::Rank => Stage::Rank,
        Command::Crawl => Stage::Crawl,
        Command::Ingest => Stage::Ingest,
        Command::Extract => Stage::Extract,
        Command::Docalign => Stage::Docalign,
        Command::Align => Stage::Align,
        Command::Filter => Stage::Filter,
        Command::Stats => Stage::Stats,
        Command::Pipeline => Stage::Pipeline,
        Command::GenFixture { .. } => return None,
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Command::GenFixture { dir, seed } = &cli.command {
        return fixture::write_fixture(dir, *seed);
    }
    let stage = stage_of(&cli.command).expect("stage command");
    let config = match &cli.config {
        Some(path) => Config::load(path, &cli.overrides)?,
        None => return Err(CliError::Invalid(format!("no config given (use --config or {CONFIG_ENV})"))),
    };
    stages::run(stage, &config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("paramine: {e}");
            e.exit_code()
        }
    }
}
