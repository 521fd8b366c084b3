//! Batch front-end: builds symplectic graphs, runs the certificate suites,
//! and writes machine-readable output.
//!
//! Exit codes: 0 success, 1 falsified property or runtime failure,
//! 2 invalid parameters, 3 size or budget bound exceeded.

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};
use sympgraph::aut::{aut_certificate, AutMode};
use sympgraph::graph::{certify_srg, export, ExportFormat, SympGraph};
use sympgraph::spread::chromatic_certificate;
use sympgraph::Error;

#[derive(Parser)]
#[command(
    name = "sympgraph",
    version,
    about = "Symplectic graphs over finite fields: construction, certificates, automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Half the dimension of the underlying vector space.
    #[arg(long)]
    nu: usize,
    /// Field size, a prime power.
    #[arg(long)]
    q: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for all randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 gives the bit-exact baseline.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the graph and export it; prints n and k.
    Build {
        #[command(flatten)]
        common: Common,
        /// Export format: graph6, dimacs, or json.
        #[arg(long, default_value = "graph6")]
        format: String,
    },
    /// Verify strong regularity and the spectrum; emit the certificate.
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Build the spread coloring and certify the chromatic number.
    Color {
        #[command(flatten)]
        common: Common,
    },
    /// Verify the automorphism group; emit the certificate.
    Aut {
        #[command(flatten)]
        common: Common,
        /// formula, search, decompose-roundtrip, or all.
        #[arg(long, default_value = "all")]
        mode: String,
        /// Random samples per randomized suite.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Abort the search after this many seconds.
        #[arg(long)]
        budget_seconds: Option<u64>,
    },
}

enum CliError {
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

fn exit_for(e: &CliError) -> ExitCode {
    match e {
        CliError::Lib(Error::NonPrime(_))
        | CliError::Lib(Error::InvalidParameter(_))
        | CliError::Lib(Error::FormatUnsupported(_)) => ExitCode::from(2),
        CliError::Lib(Error::SizeExceeded(_)) => ExitCode::from(3),
        _ => ExitCode::FAILURE,
    }
}

/// Writes `bytes` to the chosen destination. Returns true when the
/// destination was standard output.
fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<bool> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes)?;
            Ok(false)
        }
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(true)
        }
    }
}

fn emit_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string(value).expect("certificates serialize");
    text.push('\n');
    emit(out, text.as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<usize, CliError> {
    let (common, action): (&Common, _) = match &cli.cmd {
        Cmd::Build { common, .. }
        | Cmd::Certify { common }
        | Cmd::Color { common }
        | Cmd::Aut { common, .. } => (common, &cli.cmd),
    };
    if common.threads == 0 {
        return Err(Error::InvalidParameter("--threads must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .expect("thread pool is configured once");

    let g = SympGraph::build(common.nu, common.q)?;
    let failures = match action {
        Cmd::Build { format, .. } => {
            let fmt = ExportFormat::from_str(format)?;
            let bytes = export(&g, fmt);
            let to_stdout = emit(&common.out, bytes.as_bytes())?;
            // Keep the primary stream machine-readable: the summary goes to
            // stderr whenever the export itself occupies stdout.
            let summary = format!("n={} k={}", g.n(), g.degree(0));
            if to_stdout {
                eprintln!("{summary}");
            } else {
                println!("{summary}");
            }
            0
        }
        Cmd::Certify { .. } => {
            let cert = certify_srg(&g)?;
            emit_json(&common.out, &cert)?;
            cert.failures
        }
        Cmd::Color { .. } => {
            let cert = chromatic_certificate(&g)?;
            emit_json(&common.out, &cert)?;
            cert.failures
        }
        Cmd::Aut {
            mode,
            samples,
            budget_seconds,
            ..
        } => {
            let mode = AutMode::from_str(mode)?;
            let deadline = budget_seconds.map(|s| Instant::now() + Duration::from_secs(s));
            let cert = aut_certificate(&g, mode, *samples, common.seed, deadline)?;
            emit_json(&common.out, &cert)?;
            cert.failures
        }
    };
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("error: {failures} certificate check(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
