use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mmwave_core::antenna::{export_pattern_cut, make_weights, AmplitudeProfile, Direction, PhaseResolution};
use mmwave_core::sim::{parse_resolution, run_drops_with, RunResult, Scenario};

use crate::config::{Bits, ConfigError, ConfigFile, PatternName};
use crate::report;
use crate::runner::ParallelRunner;

#[derive(Debug, Parser)]
#[command(name = "mmwave-sim", version, about = "mmWave antenna-pattern system simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizontal cut of the BS array pattern as CSV.
    PatternCut(PatternCutArgs),
    /// Monte Carlo run of one scenario; JSON summary plus optional ECDF CSV.
    Run(RunArgs),
    /// Density and/or phase-resolution sweep over patterns as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "MMWAVE_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub drops: Option<u64>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 or unset uses every core.
    #[arg(long, env = "MMWAVE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PatternCutArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub pattern: Option<PatternName>,
    /// Steering azimuths, degrees.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    pub steer: Vec<f64>,
    #[arg(long, default_value_t = 90.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub phi_step: f64,
    #[arg(long, value_parser = parse_bits)]
    pub bits: Option<PhaseResolution>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub pattern: Option<PatternName>,
    #[arg(long)]
    pub density: Option<f64>,
    /// Phase resolutions, e.g. `3,4,8,inf`; one result each.
    #[arg(long, value_delimiter = ',', value_parser = parse_bits)]
    pub bits: Vec<PhaseResolution>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.5")]
    pub quantiles: Vec<f64>,
    /// Also dump the SINR/INR ECDFs to this CSV file.
    #[arg(long)]
    pub ecdf: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',')]
    pub patterns: Vec<PatternName>,
    #[arg(long, value_delimiter = ',')]
    pub densities: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_bits)]
    pub bits: Vec<PhaseResolution>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.5")]
    pub quantiles: Vec<f64>,
}

fn parse_bits(s: &str) -> Result<PhaseResolution, String> {
    parse_resolution(s).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn write_failed(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| match path {
        Some(p) => CliError::Runtime(format!("cannot write {}: {e}", p.display())),
        None => CliError::Runtime(format!("cannot write output: {e}")),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(write_failed(Some(p)))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn load_config(common: &Common) -> Result<ConfigFile, CliError> {
    let mut cfg = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(drops) = common.drops {
        cfg.drops = drops;
    }
    Ok(cfg)
}

fn check_quantiles(qs: &[f64]) -> Result<(), CliError> {
    if qs.is_empty() {
        return Err(CliError::Config("--quantiles needs at least one value".into()));
    }
    if let Some(q) = qs.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(CliError::Config(format!("quantile {q} outside (0, 1)")));
    }
    Ok(())
}

fn runner(common: &Common) -> Result<ParallelRunner, CliError> {
    ParallelRunner::new(common.threads.unwrap_or(0)).map_err(runtime)
}

fn cmd_pattern_cut(a: &PatternCutArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&a.common)?;
    if let Some(p) = a.pattern {
        cfg.pattern = p;
        if p != PatternName::Tabulated {
            cfg.pattern_file = None;
        }
    }
    if let Some(b) = a.bits {
        cfg.bits = Bits(b);
    }
    if !(a.phi_step > 0.0) {
        return Err(CliError::Config("--phi-step must be positive".into()));
    }
    let s = cfg.scenario()?;
    let model = s.pattern.element_model();
    let amp = AmplitudeProfile::uniform(s.bs_array.len());
    let mut cuts = Vec::with_capacity(a.steer.len());
    for &steer in &a.steer {
        let w = make_weights(&s.bs_array, Direction::horizontal(steer), s.quantization);
        let rows = export_pattern_cut(&model, &s.bs_array, &amp, &w, a.theta, a.phi_step).map_err(runtime)?;
        cuts.push((steer, rows));
    }
    let out = a.common.out.as_deref();
    let w = open_out(out)?;
    report::write_pattern_cut(&cuts, w).map_err(runtime)
}

fn run_one(s: &Scenario, runner: &ParallelRunner) -> Result<RunResult, CliError> {
    run_drops_with(s, runner).map_err(runtime)
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&a.common)?;
    if let Some(p) = a.pattern {
        cfg.pattern = p;
        if p != PatternName::Tabulated {
            cfg.pattern_file = None;
        }
    }
    if let Some(d) = a.density {
        cfg.density_per_km2 = d;
    }
    check_quantiles(&a.quantiles)?;
    let resolutions = if a.bits.is_empty() { vec![cfg.bits.0] } else { a.bits.clone() };
    let base = cfg.scenario()?;
    let runner = runner(&a.common)?;

    let mut results = Vec::with_capacity(resolutions.len());
    for &r in &resolutions {
        let s = Scenario {
            quantization: r,
            ..base.clone()
        };
        results.push((r, run_one(&s, &runner)?));
    }

    // The echo pins a single resolution; with several it records the first
    // and `results[*].bits` lists them all.
    cfg.bits = Bits(resolutions[0]);
    let echo = cfg.resolved(&base);
    let summaries = results.iter().map(|(r, res)| report::run_summary(*r, res, &a.quantiles)).collect();
    let doc = report::run_document(&echo, base.constants.noise_power_dbm(), summaries);

    let out = a.common.out.as_deref();
    let mut w = open_out(out)?;
    report::write_json(&doc, &mut w).map_err(write_failed(out))?;
    w.flush().map_err(write_failed(out))?;

    if let Some(path) = &a.ecdf {
        let f = File::create(path).map_err(write_failed(Some(path)))?;
        let runs: Vec<_> = results.iter().map(|(r, res)| (*r, res)).collect();
        report::write_ecdf(&runs, BufWriter::new(f)).map_err(runtime)?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.common)?;
    check_quantiles(&a.quantiles)?;
    if a.densities.iter().any(|d| !(*d > 0.0)) {
        return Err(CliError::Config("densities must be positive".into()));
    }
    let patterns = if a.patterns.is_empty() { vec![cfg.pattern] } else { a.patterns.clone() };
    let densities = if a.densities.is_empty() { vec![cfg.density_per_km2] } else { a.densities.clone() };
    let resolutions = if a.bits.is_empty() { vec![cfg.bits.0] } else { a.bits.clone() };

    // validate every point before simulating any
    let mut scenarios = Vec::new();
    for &p in &patterns {
        let mut c = cfg.clone();
        c.pattern = p;
        if p != PatternName::Tabulated {
            c.pattern_file = None;
        }
        let base = c.scenario()?;
        for &d in &densities {
            for &r in &resolutions {
                let s = Scenario {
                    density_per_km2: d,
                    quantization: r,
                    ..base.clone()
                };
                s.validate().map_err(|e| CliError::Config(e.to_string()))?;
                scenarios.push((p, s));
            }
        }
    }

    let runner = runner(&a.common)?;
    let mut results = Vec::with_capacity(scenarios.len());
    for (_, s) in &scenarios {
        results.push(run_one(s, &runner)?);
    }
    let rows: Vec<report::SweepRow<'_>> = scenarios
        .iter()
        .zip(&results)
        .map(|((p, s), r)| report::SweepRow {
            pattern: *p,
            density_per_km2: s.density_per_km2,
            resolution: s.quantization,
            result: r,
        })
        .collect();
    let w = open_out(a.common.out.as_deref())?;
    report::write_sweep(&rows, &a.quantiles, w).map_err(runtime)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::PatternCut(a) => cmd_pattern_cut(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmwave-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
