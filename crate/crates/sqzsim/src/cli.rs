//! `sqzsim` subcommands. Exit codes: 0 success, 2 domain or validation error, 3 IO error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use sqzsim_core::budget::{
    build_report, electronic_efficiency, extrapolate_squeezing, fresnel_efficiency, lumped_budget,
    BudgetFactor, Measured, AIR_INDEX,
};
use sqzsim_core::netlist::{compile, parse_bytes};

use crate::format::fmt_num;
use crate::report::{report_object, squeezing_only_object, to_json_string};
use crate::simulate::{run, SimulateOptions};
use crate::{exit, AppError};

#[derive(Debug, Parser)]
#[command(
    name = "sqzsim",
    version,
    about = "Squeezed-light photonic circuit simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a netlist and report the first error with its position.
    Validate { netlist: PathBuf },
    /// Simulate a netlist and write the homodyne trace and report.
    Simulate(SimulateArgs),
    /// Correct measured squeezing for detection losses.
    Analyze(AnalyzeArgs),
    /// Squeezing expected at another pump power.
    Extrapolate(ExtrapolateArgs),
    /// Fresnel and electronic-noise efficiencies.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub netlist: PathBuf,
    /// Trace CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Report JSON output; printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Seed for spectrum-analyzer noise. The trace is noiseless without it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noiseless: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("efficiency").required(true).args(["eta", "budget"])))]
pub struct AnalyzeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sq_db: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub asq_db: Option<f64>,
    /// One-sigma uncertainty of the raw readings.
    #[arg(long, default_value_t = 0.0)]
    pub unc_db: f64,
    /// Total detection efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Comma-separated `name=value` efficiencies, multiplied together.
    #[arg(long, value_delimiter = ',', value_parser = parse_factor)]
    pub budget: Option<Vec<BudgetFactor>>,
}

#[derive(Debug, Args)]
pub struct ExtrapolateArgs {
    #[arg(long)]
    pub gain: f64,
    #[arg(long)]
    pub pump_mw: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_eff: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).multiple(true).args(["snr_db", "n_chip"])))]
pub struct CalibrateArgs {
    /// Shot-noise clearance of the detector electronics.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Refractive index of the chip at the air interface.
    #[arg(long)]
    pub n_chip: Option<f64>,
}

fn parse_factor(text: &str) -> Result<BudgetFactor, String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("`{text}` is not of the form name=value"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("`{value}`: {e}"))?;
    Ok(BudgetFactor::new(name.trim(), value))
}

fn read(path: &Path) -> Result<Vec<u8>, AppError> {
    fs::read(path).map_err(|e| AppError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents).map_err(|e| AppError::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), AppError> {
    out.write_all(text.as_bytes())
        .map_err(|e| AppError::io("<stdout>", e))
}

fn validate(path: &Path, out: &mut dyn Write) -> Result<(), AppError> {
    let source = read(path)?;
    let spec = parse_bytes(&source).map_err(|e| AppError::from(e).in_file(path))?;
    let circuit = compile(&spec)?;
    emit(
        out,
        &format!(
            "{}: ok ({} modes, {} statements, {} channels)\n",
            path.display(),
            spec.modes.len(),
            spec.statements.len(),
            circuit.channels.len()
        ),
    )
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let source = read(&args.netlist)?;
    let options = SimulateOptions {
        seed: args.seed,
        noiseless: args.noiseless,
    };
    let sim = run(&source, options).map_err(|e| e.in_file(&args.netlist))?;
    if let Some(path) = &args.csv {
        write(path, &sim.csv()?)?;
    }
    let report = sim.report_json();
    match &args.report {
        Some(path) => write(path, &report),
        None => emit(out, &report),
    }
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let budget = match (&args.budget, args.eta) {
        (Some(factors), _) => factors.clone(),
        (None, Some(eta)) => lumped_budget(eta),
        (None, None) => unreachable!("clap requires --eta or --budget"),
    };
    let asq = Measured::new(args.asq_db.unwrap_or(0.0), args.unc_db);
    let report = build_report(Measured::new(args.sq_db, args.unc_db), asq, budget)?;
    let object = match args.asq_db {
        Some(_) => report_object(&report),
        None => squeezing_only_object(&report),
    };
    emit(out, &to_json_string(object))
}

fn calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> Result<(), AppError> {
    if let Some(snr) = args.snr_db {
        emit(
            out,
            &format!(
                "electronic_efficiency {}\n",
                fmt_num(electronic_efficiency(snr)?)
            ),
        )?;
    }
    if let Some(n) = args.n_chip {
        emit(
            out,
            &format!(
                "fresnel_efficiency {}\n",
                fmt_num(fresnel_efficiency(AIR_INDEX, n)?)
            ),
        )?;
    }
    Ok(())
}

/// Runs one subcommand, writing results to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), AppError> {
    match command {
        Command::Validate { netlist } => validate(netlist, out),
        Command::Simulate(args) => simulate(args, out),
        Command::Analyze(args) => analyze(args, out),
        Command::Extrapolate(a) => {
            let db = extrapolate_squeezing(a.gain, a.pump_mw, a.eta_eff)?;
            emit(out, &format!("{}\n", fmt_num(db)))
        }
        Command::Calibrate(args) => calibrate(args, out),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => exit::OK,
        Err(e) => {
            let code = e.exit_code();
            match &e {
                AppError::Parse { .. } => eprintln!("sqzsim: {e}"),
                AppError::Model(sqzsim_core::Error::InfeasibleMeasurement { .. }) => {
                    eprintln!("sqzsim: infeasible: {e}")
                }
                _ => eprintln!("sqzsim: error: {e}"),
            }
            code
        }
    }
}
