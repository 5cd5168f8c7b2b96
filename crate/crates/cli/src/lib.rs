//! Command-line front end for the intersective-polynomial toolkit.
//!
//! Every subcommand emits a JSON report `{schema_version, manifest, result}`;
//! scans additionally write a CSV table when `--csv` is given.

pub mod commands;
pub mod expr;
pub mod report;
pub mod sets;

use clap::{Parser, Subcommand};
use commands::*;
use report::{Manifest, Report, SCHEMA_VERSION, TOOL};
use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Intersective polynomials: auxiliary families, sieves, exponential sums, arcs, h-free sets", after_help = expr::GRAMMAR)]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "INTERSECTIVE_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the tabular scan here as CSV
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for a modulus without roots, or record p-adic roots up to a prime bound
    CheckIntersective(CheckArgs),
    /// Auxiliary polynomial h_d, or an integrality sweep over d
    Aux(AuxArgs),
    /// Nesting identity lambda(q) h_{dq}(n) = h_d(s + q n)
    Nesting(NestingArgs),
    /// Count the sieved set W(g; Y) in [1, X]
    Sieve(SieveArgs),
    /// Complete exponential sums over admissible residues, per modulus
    ExpsumScan(ExpsumArgs),
    /// Direct phase sum at a/q against its predicted main term
    MainTerm(MainTermArgs),
    /// Major/minor arc L2 mass split of a set
    Arcs(ArcsArgs),
    /// Largest h-free subset of [1, N]
    Maxset(MaxsetArgs),
    /// Density-increment iteration
    Increment(IncrementArgs),
    /// Additive energy of a rational frequency set
    Energy(EnergyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckIntersective(_) => "check-intersective",
            Command::Aux(_) => "aux",
            Command::Nesting(_) => "nesting",
            Command::Sieve(_) => "sieve",
            Command::ExpsumScan(_) => "expsum-scan",
            Command::MainTerm(_) => "main-term",
            Command::Arcs(_) => "arcs",
            Command::Maxset(_) => "maxset",
            Command::Increment(_) => "increment",
            Command::Energy(_) => "energy",
        }
    }

    fn params(&self) -> Value {
        let v = match self {
            Command::CheckIntersective(a) => serde_json::to_value(a),
            Command::Aux(a) => serde_json::to_value(a),
            Command::Nesting(a) => serde_json::to_value(a),
            Command::Sieve(a) => serde_json::to_value(a),
            Command::ExpsumScan(a) => serde_json::to_value(a),
            Command::MainTerm(a) => serde_json::to_value(a),
            Command::Arcs(a) => serde_json::to_value(a),
            Command::Maxset(a) => serde_json::to_value(a),
            Command::Increment(a) => serde_json::to_value(a),
            Command::Energy(a) => serde_json::to_value(a),
        };
        v.expect("params serialize")
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Arcs(a) => Some(a.set.seed),
            Command::Increment(a) => Some(a.set.seed),
            Command::Energy(a) => a.ch_set.as_ref().map(|_| a.seed),
            _ => None,
        }
    }

    fn execute(&self) -> Result<Outcome, Failure> {
        match self {
            Command::CheckIntersective(a) => check_intersective(a),
            Command::Aux(a) => aux(a),
            Command::Nesting(a) => nesting(a),
            Command::Sieve(a) => sieve(a),
            Command::ExpsumScan(a) => expsum_scan(a),
            Command::MainTerm(a) => main_term(a),
            Command::Arcs(a) => arcs(a),
            Command::Maxset(a) => maxset(a),
            Command::Increment(a) => increment(a),
            Command::Energy(a) => energy(a),
        }
    }
}

/// Run a full invocation and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stdout, "{}", e.render());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK }
                }
                _ => {
                    let _ = write!(stderr, "{}\n{}\n", e.render(), expr::GRAMMAR);
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: thread pool: {e}");
            return EXIT_DOMAIN;
        }
    };
    let start = Instant::now();
    let outcome = pool.install(|| cli.command.execute());
    let wall = start.elapsed().as_millis() as u64;
    let outcome = match outcome {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}\n{}", expr::GRAMMAR);
            return EXIT_USAGE;
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_DOMAIN;
        }
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        manifest: Manifest {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            subcommand: cli.command.name().into(),
            params: cli.command.params(),
            seed: cli.command.seed(),
            threads: pool.current_num_threads(),
            wall_time_ms: wall,
        },
        result: outcome.result,
    };
    let json = report.to_json();
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(json.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_DOMAIN;
    }
    if let Some(path) = &cli.csv {
        match &outcome.table {
            Some(t) => {
                if let Err(e) = t.write_path(path) {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    return EXIT_DOMAIN;
                }
            }
            None => {
                let _ = writeln!(stderr, "warning: {} produces no table; --csv ignored", cli.command.name());
            }
        }
    }
    EXIT_OK
}
