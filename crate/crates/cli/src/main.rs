mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hamcode::dynamics::{
    run_simulation_with, sweep_lambda, unencoded_baseline, write_csv, RunRecord, SimOptions, SweepConfig,
};
use hamcode::gadget::gadget_report;
use hamcode::models::EncodedSystem;
use hamcode::rng::sample_seed;
use hamcode::verify::check_system;
use hamcode::Error;
use serde_json::json;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("checks failed")]
    CheckFailed,
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical { .. } | Error::FirstOrderLeakage { .. } => CliError::Numerical(e.to_string()),
            Error::Io(e) => CliError::Io(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hamcode", version, about = "Encode spin models into [[4,2,2]] Hamiltonian codes and simulate them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Largest register propagated by dense diagonalization.
    #[arg(long)]
    dense_limit: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode the model and write the encoded system as JSON.
    Encode(Common),
    /// Run the verification battery; exit code 1 on any failed check.
    Verify(Common),
    /// One random encoded state per lambda.
    Evolve(Common),
    /// Infidelity sweep over lambda; CSV plus a summary JSON.
    Sweep(Common),
    /// Gadget report for the configured block parameters.
    GadgetTable(Common),
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(common: &Common) -> Result<(RunConfig, EncodedSystem), CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    if common.dense_limit.is_some() {
        cfg.dense_limit = common.dense_limit;
    }
    let sys = cfg.system()?;
    Ok((cfg, sys))
}

fn sim_options(cfg: &RunConfig) -> SimOptions {
    let mut opts = SimOptions::default();
    if let Some(d) = cfg.dense_limit {
        opts.dense_limit = d;
    }
    opts
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    let mut s = SweepConfig::new(cfg.lambdas.clone(), cfg.t, cfg.samples, cfg.master_seed, cfg.noise.clone());
    s.options = sim_options(cfg);
    s.record_wall_time = cfg.record_wall_time;
    s.workers = cfg.workers;
    s
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}

fn cmd_encode(common: &Common) -> Result<(), CliError> {
    let (_, sys) = load(common)?;
    let mut w = writer(common.out.as_deref())?;
    writeln!(w, "{}", sys.to_json()?)?;
    w.flush()?;
    let report = check_system(&sys)?;
    eprintln!("{report}");
    if report.overall() {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn cmd_verify(common: &Common) -> Result<(), CliError> {
    let (_, sys) = load(common)?;
    let report = check_system(&sys)?;
    match &common.out {
        Some(p) => {
            report.write_csv(File::create(p)?)?;
            eprintln!("{report}");
        }
        None => println!("{report}"),
    }
    if report.overall() {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn cmd_evolve(common: &Common) -> Result<(), CliError> {
    let (cfg, sys) = load(common)?;
    let opts = sim_options(&cfg);
    let seed = sample_seed(cfg.master_seed, 0);
    let mut records = cfg
        .lambdas
        .iter()
        .map(|&l| run_simulation_with(&sys, l, &cfg.noise, cfg.t, seed, &opts))
        .collect::<hamcode::Result<Vec<RunRecord>>>()?;
    if !cfg.record_wall_time {
        records.iter_mut().for_each(|r| r.wall_time_s = 0.0);
    }
    let mut w = writer(common.out.as_deref())?;
    writeln!(w, "{}", serde_json::to_string_pretty(&records).map_err(Error::from)?)?;
    w.flush()?;
    Ok(())
}

fn cmd_sweep(common: &Common) -> Result<(), CliError> {
    let (cfg, sys) = load(common)?;
    let scfg = sweep_config(&cfg);
    let start = Instant::now();
    let result = sweep_lambda(&sys, &scfg)?;
    let baseline = if cfg.baseline {
        Some(unencoded_baseline(&sys, &scfg)?)
    } else {
        None
    };
    let elapsed = start.elapsed().as_secs_f64();
    let mut w = writer(common.out.as_deref())?;
    write_csv(&mut w, &sys, &result)?;
    w.flush()?;
    let summary = json!({
        "model": sys.model.to_string(),
        "rows": sys.rows,
        "cols": sys.cols,
        "physical_qubits": sys.n_physical(),
        "t": cfg.t,
        "samples": cfg.samples,
        "master_seed": cfg.master_seed,
        "M": result.m,
        "stats": result.stats,
        "fitted_slope": result.fitted_slope,
        "bound_violations": result.bound_violations().len(),
        "baseline": baseline,
        "runtime_s": if cfg.record_wall_time { elapsed } else { 0.0 },
    });
    let text = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
    match &common.out {
        Some(p) => std::fs::write(summary_path(p), text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn cmd_gadget_table(common: &Common) -> Result<(), CliError> {
    let (_, sys) = load(common)?;
    let mut w = writer(common.out.as_deref())?;
    writeln!(w, "model {} ({}x{}), gap scale {}", sys.model, sys.rows, sys.cols, sys.gap_scale)?;
    for (b, p) in sys.layout.blocks.iter().enumerate() {
        writeln!(w, "block {b}: g_x {} g_z {}", p.g_x, p.g_z)?;
    }
    for g in &sys.gadgets {
        writeln!(w)?;
        write!(w, "{}", gadget_report(g, &sys.layout)?)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Encode(c) => cmd_encode(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Evolve(c) => cmd_evolve(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::GadgetTable(c) => cmd_gadget_table(c),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
