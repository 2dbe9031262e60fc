use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use super::generate::{cmd_gen_fixtures, FixtureKind};
use super::{cmd_analyze, cmd_extract, cmd_simulate, AnalyzeOptions, CliError, ExtractOptions, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "mevforge", version, about = "Builder arbitrage trace analytics and block-auction simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract arbitrage records from an NDJSON trace file.
    Extract {
        #[arg(long)]
        traces: PathBuf,
        /// Builder label CSV (brand,instance,address). Defaults to the bundled BSC list.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write flows.csv, following proceeds up to k_hops transfers.
        #[arg(long)]
        flows: bool,
        /// address,category CSV used to label flow endpoints.
        #[arg(long)]
        categories: Option<PathBuf>,
        /// Treat trailing transfers into pools already used by the route as share deposits.
        #[arg(long)]
        infer_pool_sink: bool,
    },
    /// Aggregate a record file into report CSVs.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// brand,block_count[,validator_count] CSV for market shares.
        #[arg(long)]
        block_counts: Option<PathBuf>,
    },
    /// Run a block-auction campaign.
    Simulate {
        /// Scenario file, or a bundled name (bsc_duopoly, eth_duopoly).
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1000)]
        slots: u64,
        /// Defaults to the config seed, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write seeded synthetic fixtures.
    GenFixtures {
        #[arg(long, value_enum)]
        kind: FixtureKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Transactions, records or pools to generate; builders for a scenario.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn init_logging() {
    let filter = EnvFilter::try_from_env("MEVFORGE_LOG").unwrap_or_else(|_| EnvFilter::new("warn"));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

/// Runs one command. `Ok(false)` means the command finished but produced error rows.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Extract { traces, labels, config, out, flows, categories, infer_pool_sink } => {
            let config = load_config(config.as_deref())?;
            let r = cmd_extract(&ExtractOptions { traces, labels, config, out_dir: out, flows, categories, infer_pool_sink })?;
            println!(
                "transactions={} records={} non_cycles={} error_rows={} skipped_events={}",
                r.transactions, r.records, r.non_cycles, r.error_rows, r.skipped_events
            );
            Ok(r.error_rows == 0)
        }
        Command::Analyze { records, config, out, block_counts } => {
            let config = load_config(config.as_deref())?;
            let r = cmd_analyze(&AnalyzeOptions { records, config, out_dir: out, block_counts })?;
            println!("records={} reports={}", r.records, r.files.len());
            Ok(true)
        }
        Command::Simulate { scenario, slots, seed, config, out } => {
            let config = load_config(config.as_deref())?;
            let seed = seed.unwrap_or(config.seed);
            let s = cmd_simulate(&scenario, slots, seed, &out)?;
            for r in &s.rows {
                println!("{} wins={} profit={}", r.builder_id, r.wins, r.profit);
            }
            println!("fallback={}", s.fallback_slots);
            Ok(true)
        }
        Command::GenFixtures { kind, seed, count, out } => {
            for f in cmd_gen_fixtures(kind, seed, count, &out)? {
                println!("{}", f.display());
            }
            Ok(true)
        }
    }
}

/// Entry point behind the binary. Exit status is 0 only when no error row or config error was
/// produced; argument errors exit with clap's usage status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    init_logging();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 })
        }
    }
}
