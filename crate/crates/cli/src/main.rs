use clap::Parser;
use fpet_cli::{run_file, RunOptions};
use fpet_core::interval::FAMILY_IDS;
use fpet_core::Exec;
use log::error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs one experiment described by a TOML config.
#[derive(Parser, Debug)]
#[command(name = "fpet", version)]
struct Args {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: hardware count). 1 implies --serial.
    #[arg(long)]
    threads: Option<usize>,
    /// Evaluate everything on the calling thread.
    #[arg(long)]
    serial: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Interval family, overriding the config.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(FAMILY_IDS))]
    intervals: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FPET_LOG", "error")).init();
    let mut exec = if args.serial {
        Exec::Serial
    } else {
        Exec::Parallel
    };
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if n == 1 {
            exec = Exec::Serial;
        } else if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let opts = RunOptions {
        exec,
        out_dir: args.out,
        intervals: args.intervals,
    };
    match run_file(&args.config, opts) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for a in &outcome.artifacts {
                println!("wrote {}", a.display());
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
