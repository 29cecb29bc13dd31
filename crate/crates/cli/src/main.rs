use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use efold::RunMode;
use efold_cli::{cmd_report, cmd_run, cmd_validate, RunOptions};

#[derive(Parser)]
#[command(name = "efold", version, about = "Run and summarize e-fold cross-validation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (dataset, learner, run) job and write records plus reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(RunMode))]
        mode: Option<RunMode>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write outputs from the successful runs even if some failed.
        #[arg(long)]
        allow_failures: bool,
        /// Overrides EFOLD_OUTPUT_DIR and the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check a config and its datasets without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rebuild summaries and plot data from a records file.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            mode,
            workers,
            allow_failures,
            output_dir,
        } => cmd_run(&RunOptions {
            config,
            mode,
            workers,
            allow_failures,
            output_dir,
        })
        .map(|s| {
            let r = &s.report;
            println!(
                "{} runs: mean stop fold {:.3}, saved {:.1}%, within CI {}",
                r.runs,
                r.mean_stop_fold,
                r.saved_fraction * 100.0,
                r.within_ci_fraction
                    .map_or("n/a".into(), |f| format!("{:.1}%", f * 100.0))
            );
            if !s.failures.is_empty() {
                println!("{} runs failed; see failures.csv", s.failures.len());
            }
            println!("wrote {}", s.output_dir.display());
        }),
        Command::Validate { config } => {
            let problems = cmd_validate(&config);
            if problems.is_empty() {
                println!("ok");
                return ExitCode::SUCCESS;
            }
            for p in &problems {
                eprintln!("{p}");
            }
            return ExitCode::from(1);
        }
        Command::Report { records, output_dir } => cmd_report(&records, output_dir.as_deref()).map(|r| {
            println!("{} runs: mean stop fold {:.3}", r.runs, r.mean_stop_fold);
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
