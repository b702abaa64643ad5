//! Command-line scenario runner. Exit codes: 0 when the scenario outcome
//! matched its registered expectation, 1 when it did not, 2 for usage or
//! configuration errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cardlab::scenario::{render_transcript, run_scenario, summary_line, ScenarioConfig};
use cardlab::simnet::SchemeKind;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Kuchen,
    Yoon,
}

impl From<SchemeArg> for SchemeKind {
    fn from(arg: SchemeArg) -> SchemeKind {
        match arg {
            SchemeArg::Kuchen => SchemeKind::KuChen,
            SchemeArg::Yoon => SchemeKind::Yoon,
        }
    }
}

/// Deterministic scenario runner for the smart-card authentication lab.
#[derive(Parser, Debug)]
#[command(name = "cardlab", version)]
struct Cli {
    /// Scenario to run; pass an unknown name to see the full list.
    #[arg(long)]
    scenario: String,

    /// Scheme to run against, for scenarios that support both.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,

    /// Word width in bits (a multiple of 8, at least 64).
    #[arg(long, default_value_t = 256)]
    width: usize,

    /// Freshness window in ticks.
    #[arg(long, default_value_t = 60)]
    delta: u64,

    /// Seed driving all scenario randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Dictionary file (one UTF-8 password per line); required by the
    /// guessing scenarios.
    #[arg(long)]
    dict: Option<PathBuf>,

    /// Write the transcript to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Ticks between the server's reply going out and the fabricated
    /// request being injected (parallel-session timing experiments).
    #[arg(long, default_value_t = 0)]
    inject_delay: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = ScenarioConfig {
        scenario: cli.scenario,
        scheme: cli.scheme.map(SchemeKind::from),
        width_bits: cli.width,
        delta: cli.delta,
        seed: cli.seed,
        dict_path: cli.dict,
        out_path: cli.out,
        inject_delay: cli.inject_delay,
    };

    let report = match run_scenario(&cfg) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    if let Err(err) = write_transcript(&cfg, &report.transcript) {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }

    if report.matched_expectation {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_transcript(
    cfg: &ScenarioConfig,
    transcript: &cardlab::simnet::Transcript,
) -> io::Result<()> {
    match &cfg.out_path {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                io::Error::new(e.kind(), format!("{}: {e}", path.display()))
            })?;
            let mut out = BufWriter::new(file);
            render_transcript(transcript, &mut out).map_err(|e| {
                io::Error::new(e.kind(), format!("{}: {e}", path.display()))
            })?;
            out.flush()
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            // Echo the verdict so a file run still shows the result.
            println!("{}", summary_line(transcript));
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            render_transcript(transcript, &mut out)
        }
    }
}
