use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use obljoin_core::harness::{
    bench, cost_report, gen_test_class, verify_trace_class, write_csv, GenError, Shape, Verdict,
};
use obljoin_core::trace::write_log;
use obljoin_core::{oblivious_join, HashSink, JoinOutput, LogSink, NullSink};

use crate::table_file::{ParseError, TableFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum TraceMode {
    #[default]
    None,
    Log,
    Hash,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("trace divergence in {0} class(es)")]
    Divergence(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Gen(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

fn write_rows<W: Write>(mut w: W, out: &JoinOutput) -> io::Result<()> {
    for (d1, d2) in &out.rows {
        writeln!(w, "{d1} {d2}")?;
    }
    w.flush()
}

/// Joins the two tables of `input`, writing `d1 d2` rows to `out` (or
/// `stdout`). In hash mode the digest goes to `stderr`; in log mode the
/// event log goes to `trace_out` (or `stderr`).
pub fn cmd_join(
    input: &Path,
    trace: TraceMode,
    trace_out: Option<&Path>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let text = fs::read_to_string(input).map_err(io_err(input))?;
    let tables: TableFile = text.parse().map_err(|source| CliError::Parse {
        path: input.to_owned(),
        source,
    })?;

    let result = match trace {
        TraceMode::None => oblivious_join(&tables.left, &tables.right, NullSink),
        TraceMode::Hash => {
            let mut sink = HashSink::new();
            let r = oblivious_join(&tables.left, &tables.right, &mut sink);
            writeln!(stderr, "{}", hex::encode(sink.digest())).map_err(io_err("<stderr>"))?;
            r
        }
        TraceMode::Log => {
            let mut sink = LogSink::new();
            let r = oblivious_join(&tables.left, &tables.right, &mut sink);
            match trace_out {
                Some(p) => {
                    let f = fs::File::create(p).map_err(io_err(p))?;
                    write_log(BufWriter::new(f), &sink.events).map_err(io_err(p))?;
                }
                None => write_log(&mut *stderr, &sink.events).map_err(io_err("<stderr>"))?,
            }
            r
        }
    };

    match out {
        Some(p) => {
            let f = fs::File::create(p).map_err(io_err(p))?;
            write_rows(BufWriter::new(f), &result).map_err(io_err(p))
        }
        None => write_rows(stdout, &result).map_err(io_err("<stdout>")),
    }
}

/// Builds one class per shape and checks trace equality inside each.
pub fn cmd_verify(
    n1: usize,
    n2: usize,
    shapes: &[Shape],
    seed: u64,
    instances: usize,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut failed = 0;
    for (k, &shape) in shapes.iter().enumerate() {
        let tc = gen_test_class(n1, n2, shape, seed.wrapping_add(k as u64), instances)?;
        let line = match verify_trace_class(&tc) {
            Verdict::Pass { digest } => format!(
                "PASS shape={shape} n1={n1} n2={n2} m={} instances={} digest={}",
                tc.m,
                tc.instances.len(),
                hex::encode(digest)
            ),
            Verdict::Fail { first, second } => {
                failed += 1;
                format!(
                    "FAIL shape={shape} n1={n1} n2={n2} m={} instances {first} and {second} diverge",
                    tc.m
                )
            }
        };
        writeln!(stdout, "{line}").map_err(io_err("<stdout>"))?;
    }
    if failed > 0 {
        return Err(CliError::Divergence(failed));
    }
    Ok(())
}

pub fn cmd_bench(sizes: &[usize], reps: usize, csv: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = bench(sizes, reps);
    match csv {
        Some(p) => {
            let f = fs::File::create(p).map_err(io_err(p))?;
            write_csv(BufWriter::new(f), &rows).map_err(io_err(p))
        }
        None => write_csv(stdout, &rows).map_err(io_err("<stdout>")),
    }
}

pub fn cmd_cost(n1: usize, n2: usize, m: usize, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = cost_report(n1, n2, m)?;
    writeln!(stdout, "{report}").map_err(io_err("<stdout>"))
}
