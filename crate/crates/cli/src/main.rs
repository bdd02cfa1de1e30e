//! `wdp-sim`: runs BER sweeps, CSI dumps and compression-factor sweeps from
//! scenario files and writes CSV or JSON for plotting.
//!
//! Values are resolved in this order, later wins: scenario file, `--set`
//! overrides (in the order given), then the dedicated flags.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use wdp_core::csi::write_csi_csv;
use wdp_core::harness::{
    results_json, run_csi_experiment, write_atomic, write_results_csv, BerRecord, ConfigError, OutputFormat,
    RunConfig, Simulator,
};

#[derive(Parser, Debug)]
#[command(name = "wdp-sim", version, about = "Multicarrier privacy/security link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BER over the scenario's SNR grid.
    BerSweep(Common),
    /// Legitimate and eavesdropper CSI from one training symbol.
    CsiDump(Common),
    /// BER for each compression factor in `alphas`.
    SecuritySweep(Common),
    /// Parse the scenario and print the resolved configuration.
    Validate(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Scenario key override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Runtime(e.into()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn resolve(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&common.scenario)?;
    for assignment in &common.set {
        cfg.apply_override(assignment)?;
    }
    if let Some(seed) = common.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(workers) = common.workers {
        cfg.set("workers", &workers.to_string())?;
    }
    if let Some(format) = &common.format {
        cfg.set("format", format)?;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> anyhow::Result<()> {
    match &cfg.output {
        Some(path) => write_atomic(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(bytes).context("writing to stdout"),
    }
}

fn emit_records(cfg: &RunConfig, records: &[BerRecord]) -> anyhow::Result<()> {
    let bytes = match cfg.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_results_csv(&mut buf, records)?;
            buf
        }
        OutputFormat::Json => results_json(records)?.into_bytes(),
    };
    for r in records.iter().filter(|r| r.ber_floor_uncertain) {
        eprintln!(
            "warning: {} at {} dB: ber_floor_uncertain ({} errors in {} bits)",
            r.scenario_id, r.snr_db, r.errors, r.bits
        );
    }
    emit(cfg, &bytes)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(common) => {
            let cfg = resolve(&common)?;
            print!("{cfg}");
        }
        Command::BerSweep(common) => {
            let cfg = resolve(&common)?;
            let sim = Simulator::new(cfg.workers).map_err(anyhow::Error::from)?;
            let records = sim.run_ber_sweep(&cfg.scenario).map_err(anyhow::Error::from)?;
            emit_records(&cfg, &records)?;
        }
        Command::SecuritySweep(common) => {
            let cfg = resolve(&common)?;
            let sim = Simulator::new(cfg.workers).map_err(anyhow::Error::from)?;
            let records = sim
                .run_security_sweep(&cfg.scenario, &cfg.alphas, cfg.mismatch_alpha)
                .map_err(anyhow::Error::from)?;
            emit_records(&cfg, &records)?;
        }
        Command::CsiDump(common) => {
            let cfg = resolve(&common)?;
            let (legit, eaves) = run_csi_experiment(&cfg.scenario).map_err(anyhow::Error::from)?;
            let bytes = match cfg.format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    write_csi_csv(&mut buf, &[&legit, &eaves]).map_err(anyhow::Error::from)?;
                    buf
                }
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&[&legit, &eaves]).map_err(anyhow::Error::from)?;
                    s.push('\n');
                    s.into_bytes()
                }
            };
            emit(&cfg, &bytes)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
