//! `obliq`: inclination, decomposition and extension on imported matrices,
//! plus the l² and cavity studies, with versioned JSON reports.

mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use obliq::Error;

use commands::{CavityArgs, L2Args, Outcome, PairArgs};
use report::{ErrorBody, ErrorReport, RunReport, Timer, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "obliq", version, about = "Metric subspace geometry: inclination, decomposition, extension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Record wall-clock milliseconds per phase in the report.
    #[arg(long, global = true)]
    timings: bool,
    /// Worker threads for Gram assembly.
    #[arg(long, global = true, env = "OBLIQ_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inclination c(L, M) with principal angles and containment flags.
    Incline(PairArgs),
    /// Split x = x^L + x^M with certified norm bounds.
    Decompose {
        #[command(flatten)]
        pair: PairArgs,
        /// Vector to split (CSV or MatrixMarket, one row or one column).
        #[arg(long)]
        x: PathBuf,
        /// Share of the L ∩ M component assigned to x^L.
        #[arg(long, default_value_t = obliq::decompose::DEFAULT_A1)]
        a1: f64,
    },
    /// Extend f from L to the whole space, vanishing on M.
    Extend {
        #[command(flatten)]
        pair: PairArgs,
        /// Riesz vector of f.
        #[arg(long)]
        w: PathBuf,
    },
    /// Truncated l² model: closed forms against the engine, degeneracy probe.
    L2(L2Args),
    /// Spectral cavity model: inclination, identity, contraction, Korn.
    Cavity(CavityArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Incline(_) => "incline",
            Command::Decompose { .. } => "decompose",
            Command::Extend { .. } => "extend",
            Command::L2(_) => "l2",
            Command::Cavity(_) => "cavity",
        }
    }

    fn csv_path(&self) -> Option<&Path> {
        match self {
            Command::L2(a) => a.csv.as_deref(),
            Command::Cavity(a) => a.csv.as_deref(),
            _ => None,
        }
    }
}

fn exit_code_for(command: &str, e: &Error) -> u8 {
    match (command, e) {
        ("decompose", Error::NotInSumSpace { .. }) => 3,
        ("extend", Error::NotInFQ { .. }) => 4,
        _ => 1,
    }
}

fn emit(json: Option<&Path>, text: &str) -> Result<(), Error> {
    match json {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(command: &str, json: Option<&Path>, kind: &str, message: String, code: u8) -> ExitCode {
    let report = ErrorReport { schema: SCHEMA, command, error: ErrorBody { kind: kind.into(), message } };
    let text = serde_json::to_string_pretty(&report).expect("error report serializes") + "\n";
    eprint!("{text}");
    if let Some(p) = json {
        let _ = std::fs::write(p, &text);
    }
    ExitCode::from(code)
}

fn run(cli: &Cli, timer: &mut Timer) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Incline(a) => commands::incline(a, timer),
        Command::Decompose { pair, x, a1 } => commands::decompose(pair, x, *a1, timer),
        Command::Extend { pair, w } => commands::extend(pair, w, timer),
        Command::L2(a) => commands::l2(a, timer),
        Command::Cavity(a) => commands::cavity(a, cli.threads, timer),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail("", None, "Usage", e.to_string().trim_end().to_string(), 1);
        }
    };
    let name = cli.command.name();
    let json = cli.json.as_deref();
    let mut timer = Timer::new(cli.timings);
    let outcome = match run(&cli, &mut timer) {
        Ok(o) => o,
        Err(e) => return fail(name, json, e.kind(), e.to_string(), exit_code_for(name, &e)),
    };
    if let (Some(path), Some(csv)) = (cli.command.csv_path(), &outcome.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            return fail(name, json, "Io", format!("{}: {e}", path.display()), 1);
        }
    }
    let report = RunReport {
        schema: SCHEMA,
        command: name.to_string(),
        inputs: outcome.inputs,
        tolerances: outcome.tolerances,
        outputs: outcome.outputs,
        timings: timer.into_phases(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = emit(json, &text) {
        return fail(name, None, e.kind(), e.to_string(), 1);
    }
    ExitCode::from(outcome.exit as u8)
}
