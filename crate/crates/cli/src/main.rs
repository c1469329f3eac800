use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use obljoin_cli::{cmd_bench, cmd_cost, cmd_join, cmd_verify, TraceMode};
use obljoin_core::harness::Shape;

#[derive(Parser)]
#[command(name = "obljoin", version, about = "Data-oblivious equi-join")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Join the two tables of a table file.
    Join {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceMode::None)]
        trace: TraceMode,
        /// Where to write the event log in `--trace log` mode (default: stderr).
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Output file for `d1 d2` rows (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that inputs of the same (n1, n2, m) class produce identical traces.
    Verify {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, value_delimiter = ',', default_value = "all-1x1,single-1xn,single-nx1,power-law,mixed")]
        shapes: Vec<Shape>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
    /// Time the oblivious join against sort-merge with n1 = n2 = m = n/2.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1024,4096,16384,65536")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print measured and predicted per-stage operation counts.
    Cost {
        /// Table size; n1 = n2 = m = N unless overridden.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut stdout, mut stderr) = (io::stdout().lock(), io::stderr());
    let result = match cli.command {
        Command::Join { input, trace, trace_out, out } => cmd_join(
            &input,
            trace,
            trace_out.as_deref(),
            out.as_deref(),
            &mut stdout,
            &mut stderr,
        ),
        Command::Verify { n1, n2, shapes, seed, instances } => {
            cmd_verify(n1, n2, &shapes, seed, instances, &mut stdout)
        }
        Command::Bench { sizes, reps, csv } => cmd_bench(&sizes, reps, csv.as_deref(), &mut stdout),
        Command::Cost { n, n1, n2, m } => {
            cmd_cost(n1.unwrap_or(n), n2.unwrap_or(n), m.unwrap_or(n), &mut stdout)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
