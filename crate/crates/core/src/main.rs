//! Command-line front end: BER sweeps, result summaries, the transmitter
//! complexity table, and the runtime selftest. Data goes to files or
//! stdout; progress and logs go to stderr.

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use whtdm::complexity::{complexity_table, render_table_csv, render_table_text};
use whtdm::config::SweepConfig;
use whtdm::harness::{
    read_csv, render_summary_csv, render_summary_text, run_sweep, summarize, write_csv,
};

#[derive(Parser)]
#[command(name = "whtdm", about = "WHTDM / CP-OFDM link simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo BER sweep and write one CSV row per cell.
    Simulate {
        /// Sweep configuration file (defaults apply when omitted).
        #[arg(long)]
        config: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: String,
        /// Override any config key, e.g. --set detector.iterations=25.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Aggregate a results CSV into per-cell statistics.
    Summarize {
        /// Input CSV produced by `simulate`.
        #[arg(long = "in")]
        input: String,
        /// Optional path for the summary in CSV form.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Print the transmitter operation-count comparison.
    ComplexityTable {
        #[arg(long, default_value_t = 64)]
        m: u64,
        #[arg(long, default_value_t = 16)]
        n: u64,
        /// Optional path for the table in CSV form.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { config, out, set } => {
            let mut cfg = match config {
                Some(path) => SweepConfig::load(&path).context("loading config")?,
                None => SweepConfig::default(),
            };
            for spec in &set {
                cfg.apply_override(spec).context("applying --set")?;
            }
            cfg.validate()?;
            eprintln!(
                "sweep: {} cells ({} schemes x {} SNR x {} speeds x {} spreads x {} seeds)",
                cfg.expected_records(),
                cfg.schemes.len(),
                cfg.snr_db.len(),
                cfg.speeds_kmh.len(),
                cfg.delay_spreads_ns.len(),
                cfg.seeds
            );
            let records = run_sweep(&cfg)?;
            write_csv(&records, &out)?;
            eprintln!("wrote {} records to {out}", records.len());
        }
        Command::Summarize { input, csv } => {
            let records = read_csv(&input)?;
            let cells = summarize(&records);
            print!("{}", render_summary_text(&cells));
            if let Some(path) = csv {
                std::fs::write(&path, render_summary_csv(&cells))
                    .with_context(|| format!("writing {path}"))?;
                eprintln!("wrote summary CSV to {path}");
            }
        }
        Command::ComplexityTable { m, n, csv } => {
            let rows = complexity_table(m, n)?;
            print!("{}", render_table_text(&rows, m, n));
            if let Some(path) = csv {
                std::fs::write(&path, render_table_csv(&rows))
                    .with_context(|| format!("writing {path}"))?;
                eprintln!("wrote complexity CSV to {path}");
            }
        }
        Command::Selftest => {
            if !whtdm::selftest::run_selftest() {
                bail!("selftest failed");
            }
            eprintln!("selftest: all checks passed");
        }
    }
    Ok(())
}
