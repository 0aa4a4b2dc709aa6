//! `sparsecert`: command-line front end for the sparsecert library.
//!
//! Exit codes: 0 success, 1 the hypothesis failed (report on stdout), 2 usage
//! or parse error, 3 numerical failure. Errors go to stderr as one JSON line
//! with a `code` field.

mod problem;
mod report;
mod tasks;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;

use problem::{ProblemFile, Task};
use tasks::{Failure, Options, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "sparsecert", version, about = "Sparse positivity certificates and moment problems")]
struct Cli {
    /// Operation to run; must match the `task` field of the input file.
    #[arg(value_enum)]
    task: Task,
    /// Problem file (versioned JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for every randomized stage.
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling or verification grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Write N samples of (x, f, f_*, f^*) as CSV.
    #[arg(long, value_name = "N")]
    emit_samples: Option<usize>,
    /// Destination of the samples; defaults to `<input>.samples.csv`.
    #[arg(long, value_name = "PATH")]
    samples_out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SPARSECERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::usage(format!("SPARSECERT_THREADS must be a positive integer, got '{v}'")))?;
    // a second initialization only happens in tests and is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    configure_threads()?;
    let text = std::fs::read_to_string(&cli.input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", cli.input.display())))?;
    let problem = ProblemFile::parse(&text)?;
    if problem.task != cli.task {
        return Err(Failure::usage(format!(
            "command {} does not match the file's task {}",
            cli.task.name(),
            problem.task.name()
        )));
    }
    let opts = Options { tol: cli.tol, seed: cli.seed, grid: cli.grid, emit_samples: cli.emit_samples };
    let outcome = tasks::run_task(&problem, &opts)?;
    if let Some(samples) = outcome.samples {
        let path = cli.samples_out.clone().unwrap_or_else(|| {
            let mut p = cli.input.clone().into_os_string();
            p.push(".samples.csv");
            PathBuf::from(p)
        });
        std::fs::write(&path, samples).map_err(|e| Failure {
            code: "io_error".into(),
            message: format!("cannot write {}: {e}", path.display()),
            exit: EXIT_USAGE,
        })?;
    }
    let body = match cli.format {
        Format::Json => report::render_json(&outcome.report),
        Format::Csv => report::render_csv(&outcome.report),
    };
    Ok((body, outcome.exit))
}

fn report_error(f: &Failure) {
    let line = json!({ "code": f.code, "message": f.message, "exit": f.exit });
    eprintln!("{line}");
}

fn run(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            report_error(&Failure::usage(e.to_string().trim_end()));
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok((body, exit)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(body.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_USAGE;
            }
            exit
        }
        Err(f) => {
            report_error(&f);
            f.exit
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}
