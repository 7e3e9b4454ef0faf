use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mgtdetect::cli;
use mgtdetect::obfuscation::{ObfuscationPlan, DEFAULT_CHAR_RATE};

#[derive(Parser)]
#[command(
    name = "mgtdetect",
    version,
    about = "Ensemble machine-generated text detection"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit per-language thresholds from labeled records.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "out-table")]
        out_table: PathBuf,
    },
    /// Predict labels for records with a calibrated threshold table.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions against gold labels.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Pipeline config; enables per-channel AUC from the gold records.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Apply homoglyph and zero-width-joiner obfuscation to a sample of texts.
    Obfuscate {
        #[arg(long = "sample-rate")]
        sample_rate: f64,
        #[arg(long = "char-rate", default_value_t = DEFAULT_CHAR_RATE)]
        char_rate: f64,
        #[arg(long)]
        seed: u64,
        /// Confusable map JSON replacing the built-in table.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pretty-print a threshold table.
    Inspect {
        #[arg(long)]
        table: PathBuf,
    },
}

fn run(command: Command) -> mgtdetect::Result<()> {
    let mut stdout = io::stdout().lock();
    match command {
        Command::Calibrate {
            config,
            input,
            out_table,
        } => {
            cli::cmd_calibrate(&config, &input, &out_table, &mut stdout)?;
        }
        Command::Predict {
            config,
            table,
            input,
            out,
        } => {
            let n = cli::cmd_predict(&config, &table, &input, &out)?;
            log::info!("wrote {n} predictions");
        }
        Command::Evaluate {
            pred,
            gold,
            out,
            config,
        } => {
            cli::cmd_evaluate(&pred, &gold, &out, config.as_deref(), &mut stdout)?;
        }
        Command::Obfuscate {
            sample_rate,
            char_rate,
            seed,
            map,
            input,
            out,
        } => {
            let plan = ObfuscationPlan {
                sample_rate,
                char_rate,
                seed,
            };
            let result = cli::cmd_obfuscate(&plan, map.as_deref(), &input, &out)?;
            eprintln!(
                "obfuscated {} of {} documents ({} skipped without text)",
                result.selected.len(),
                result.docs.len(),
                result.skipped.len()
            );
        }
        Command::Inspect { table } => cli::cmd_inspect(&table, &mut stdout)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
