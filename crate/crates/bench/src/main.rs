use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stepsim_bench::report::{read_csv, rows_for, update_csv_file};
use stepsim_bench::{render_table, run_bench, BenchConfig, BenchError, Mode, Workload};

#[derive(Parser)]
#[command(name = "bench", about = "Per-call latency of direct and socket simulator access")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Direct,
    RemoteStep,
    RemoteFixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkloadArg {
    Step,
    StepQuery,
    Episode,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark and merge its row into a CSV file.
    Run {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Service interval for remote-fixed.
        #[arg(long, default_value_t = 5)]
        interval_ms: u64,
        #[arg(long, value_enum, default_value = "step")]
        workload: WorkloadArg,
        /// Timed calls; defaults to 10000 direct, 1000 remote.
        #[arg(long)]
        calls: Option<usize>,
        #[arg(long)]
        warmup: Option<usize>,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        #[arg(long, default_value = "tip")]
        tip: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a CSV file as a table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn execute(command: Command) -> Result<(), BenchError> {
    match command {
        Command::Run {
            mode,
            interval_ms,
            workload,
            calls,
            warmup,
            scene,
            out,
            tip,
            seed,
        } => {
            let mode = match mode {
                ModeArg::Direct => Mode::Direct,
                ModeArg::RemoteStep => Mode::RemoteStepBoundary,
                ModeArg::RemoteFixed => Mode::RemoteFixed(interval_ms),
            };
            let workload = match workload {
                WorkloadArg::Step => Workload::StepOnly,
                WorkloadArg::StepQuery => Workload::StepPlusQuery,
                WorkloadArg::Episode => Workload::Episode,
            };
            let mut config = BenchConfig::new(mode, workload, scene);
            if let Some(n) = calls {
                config.n_calls = n;
            }
            if let Some(n) = warmup {
                config.n_warmup = n;
            }
            config.tip = tip;
            config.seed = seed;
            let result = run_bench(&config)?;
            let rows = update_csv_file(&out, rows_for(&[result]))?;
            print!("{}", render_table(&rows));
            Ok(())
        }
        Command::Report { input } => {
            let file = std::fs::File::open(&input).map_err(|e| {
                BenchError::Config(format!("cannot open {}: {e}", input.display()))
            })?;
            print!("{}", render_table(&read_csv(file)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
