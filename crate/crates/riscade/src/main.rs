//! Command-line front end: run a campaign, validate a config, or print the
//! derived per-subcarrier link budget.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use riscade::campaign::{emit_outputs, link_budget_report, run_campaign, RunConfig};

#[derive(Parser)]
#[command(name = "riscade", version, about = "RIS-assisted MIMO downlink Monte-Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo campaign and write CSV/JSON outputs.
    Run {
        /// JSON campaign configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the configured drop count.
        #[arg(long)]
        drops: Option<u64>,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = machine default).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Parse and validate a config, reporting the first problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the derived per-subcarrier transmit power and noise power.
    Budget {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> riscade::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            drops,
            seed,
            out,
            workers,
        } => {
            let mut cfg = RunConfig::from_path(&config)?;
            if let Some(d) = drops {
                cfg.drops = d;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            cfg.validate()?;
            let out_dir = out
                .or_else(|| cfg.output_dir.clone())
                .ok_or_else(|| riscade::Error::Config("no output directory (--out)".into()))?;

            let result = run_campaign(&cfg)?;
            let files = emit_outputs(&result, &out_dir)?;

            let s = &result.summary;
            println!(
                "{} drops, seed {} — mean rate without RIS {:.3} bit/s/Hz, with RIS {:.3} bit/s/Hz (gain {:.1}%)",
                s.drops,
                s.seed,
                s.rate_without_ris.mean,
                s.rate_with_ris.mean,
                (s.mean_rate_gain - 1.0) * 100.0
            );
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = RunConfig::from_path(&config)?;
            println!(
                "ok: '{}' — {} drops, seed {}, {}x{} RIS",
                cfg.label,
                cfg.drops,
                cfg.seed,
                cfg.sites.ris.rows,
                cfg.sites.ris.cols
            );
            Ok(())
        }
        Command::Budget { config } => {
            let cfg = RunConfig::from_path(&config)?;
            let r = link_budget_report(&cfg)?;
            println!("subcarriers:          {}", r.n_subcarriers);
            println!(
                "power per subcarrier: {:.2} dBm ({:.6e} W)",
                r.per_subcarrier_power_dbm, r.per_subcarrier_power_w
            );
            println!(
                "noise per subcarrier: {:.2} dBm ({:.6e} W)",
                r.noise_power_dbm, r.noise_power_w
            );
            Ok(())
        }
    }
}
