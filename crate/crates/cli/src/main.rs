//! `svm`: run presets or config files, and cut slices out of snapshots.

use clap::{Args, Parser, Subcommand};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use svm_core::config::{load_config, Axis, Case, SimConfig};
use svm_core::output::{read_snapshot, slice_rows, write_slice_csv, OutputError};
use svm_core::sim::{run_simulation, RunError, Summary};

const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "svm", version, about = "Viscoelastic shallow-water finite-volume solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset case or a config file to t_end.
    Run(RunArgs),
    /// Print the slice nearest to `axis = at` of a snapshot CSV.
    Slice(SliceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Preset 1..=4.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    case: Option<u8>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    tend: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Write snapshots and energy.csv here.
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Snapshot every n steps (0: initial and final only).
    #[arg(long)]
    snap_every: Option<usize>,
    /// Also write VTK files next to the CSV snapshots.
    #[arg(long)]
    vtk: bool,
}

#[derive(Args)]
struct SliceArgs {
    file: PathBuf,
    #[arg(long)]
    axis: Axis,
    #[arg(long)]
    at: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl ToString) -> Self {
        Self {
            code,
            msg: msg.to_string(),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match &e {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Solver(_) | RunError::StepLimit(_) => EXIT_SOLVER,
            RunError::Output(_) => EXIT_IO,
        };
        Failure::new(code, e)
    }
}

impl From<OutputError> for Failure {
    fn from(e: OutputError) -> Self {
        let code = match &e {
            OutputError::OutOfDomain { .. } => EXIT_USAGE,
            OutputError::Solver(_) => EXIT_SOLVER,
            OutputError::Io(_) | OutputError::Format { .. } => EXIT_IO,
        };
        Failure::new(code, e)
    }
}

fn build_config(a: &RunArgs) -> Result<SimConfig, Failure> {
    let mut cfg = match (&a.config, a.case) {
        (Some(path), _) => load_config(path).map_err(|e| Failure::new(EXIT_CONFIG, e))?,
        (None, Some(id)) => SimConfig::preset(id).map_err(|e| Failure::new(EXIT_CONFIG, e))?,
        (None, None) => return Err(Failure::new(EXIT_USAGE, "need --case or --config")),
    };
    if let Some(nx) = a.nx {
        cfg.nx = nx;
    }
    if let Some(ny) = a.ny {
        cfg.ny = ny;
    }
    if let Some(t) = a.tend {
        cfg.t_end = t;
    }
    if let Some(c) = a.cfl {
        cfg.cfl = c;
    }
    if let Some(dir) = &a.outdir {
        cfg.output.dir = Some(dir.clone());
    }
    if let Some(n) = a.snap_every {
        cfg.output.snap_every = n;
    }
    if a.vtk {
        cfg.output.vtk = true;
    }
    cfg.validate().map_err(|e| Failure::new(EXIT_CONFIG, e))?;
    Ok(cfg)
}

fn print_summary(cfg: &SimConfig, s: &Summary) {
    let case = match &cfg.case {
        Case::Preset(id) => id.to_string(),
        Case::Custom(_) => "custom".into(),
    };
    println!("case = {case}");
    println!("grid = {}x{}", cfg.nx, cfg.ny);
    println!("steps = {}", s.steps);
    println!("t_final = {:.6e}", s.t_final);
    println!("min_h = {:.6e}", s.min_h);
    println!("max_involution_drift = {:.3e}", s.max_involution_drift);
    println!("max_residual = {:.3e}", s.max_residual);
    println!("energy = {:.9e} -> {:.9e}", s.e_initial, s.e_final);
    println!("dt = [{:.4e}, {:.4e}]", s.min_dt, s.max_dt);
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let cfg = build_config(&a)?;
    let summary = run_simulation(&cfg)?;
    print_summary(&cfg, &summary);
    Ok(())
}

fn slice(a: SliceArgs) -> Result<(), Failure> {
    let rows = read_snapshot(&a.file).map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", a.file.display(), f.msg);
        f
    })?;
    let records = slice_rows(&rows, a.axis, a.at)?;
    let io_err = |e: io::Error| Failure::new(EXIT_IO, e);
    match &a.out {
        Some(path) => {
            let mut w = BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
            write_slice_csv(&mut w, &records).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_slice_csv(&mut w, &records).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(a) => run(a),
        Command::Slice(a) => slice(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("svm: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
