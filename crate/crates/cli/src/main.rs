//! `conegate`: design, simulate, sweep and gate subcommands over `conegate-core`.
//!
//! Exit codes: 0 success, 2 invalid arguments or domain errors, 3 I/O errors.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conegate_core::design::{solve_forward, solve_inverse, Branch, TwoLoopDesign};
use conegate_core::evolve::EvolutionMethod;
use conegate_core::gates::{
    eigenphases, gate_fidelity, tilted_gate, tilted_simulated_gate, GateSpec,
};
use conegate_core::io::{
    decomposition_to_json, design_document, design_from_json, fmt17, gate_report_to_json,
    trajectory_csv, DesignRecord, GateReport, MatrixRecord,
};
use conegate_core::phases::{decompose_trajectories, two_loop_trajectories, PhaseDecomposition};

const SWEEP_HEADER: &str = "x,branch,cos_theta,omega0,omega0_prime,omega1_prime,phi_g_predicted,phi_g_simulated,dynamic_residual";

#[derive(Debug, Parser)]
#[command(
    name = "conegate",
    version,
    about = "Two-loop geometric phase gate designer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the loop fields for a given x or target geometric phase.
    Design(DesignCmd),
    /// Run both loops and decompose the accumulated phase.
    Simulate(SimulateCmd),
    /// Tabulate designs and simulated phases over a grid of x.
    Sweep(SweepCmd),
    /// Build the (optionally tilted) phase gate for a target phase.
    Gate(GateCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Transverse amplitude of the first loop, rad/s.
    #[arg(long, default_value_t = 1.0)]
    omega1: f64,
    /// Rotation rate of the transverse field, rad/s.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Dimensionless amplitude step (omega1' - omega1)/omega in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Target geometric phase in (-2pi, 0).
    #[arg(long = "phi-g", allow_negative_numbers = true)]
    phi_g: Option<f64>,
    #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
    branch: BranchArg,
    #[command(flatten)]
    fields: FieldArgs,
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    /// RK4 steps per loop.
    #[arg(long, default_value_t = 20000)]
    steps: usize,
}

impl MethodArgs {
    fn method(&self) -> Result<EvolutionMethod, CliError> {
        match self.method {
            MethodArg::Exact => Ok(EvolutionMethod::Exact),
            MethodArg::Rk4 => Ok(EvolutionMethod::rk4(self.steps)?),
        }
    }

    fn label(&self) -> String {
        match self.method {
            MethodArg::Exact => "exact".to_string(),
            MethodArg::Rk4 => format!("rk4({})", self.steps),
        }
    }
}

#[derive(Debug, Args)]
struct DesignCmd {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Read the design from a JSON file written by `design`.
    #[arg(long)]
    design_file: Option<PathBuf>,
    #[command(flatten)]
    method: MethodArgs,
    /// Samples per loop; must be odd.
    #[arg(long, default_value_t = 401)]
    samples: usize,
    /// Write the trajectory CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the phase decomposition JSON here.
    #[arg(long)]
    phases_out: Option<PathBuf>,
    /// What to print when no output file is given.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepCmd {
    #[arg(long, allow_negative_numbers = true)]
    x_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    x_to: f64,
    #[arg(long)]
    points: usize,
    #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
    branch: BranchArg,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = 401)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GateCmd {
    #[arg(long = "phi-g", allow_negative_numbers = true)]
    phi_g: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    axis_polar: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    axis_azimuth: f64,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Domain(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<conegate_core::Error> for CliError {
    fn from(e: conegate_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn design_from_source(src: &SourceArgs) -> Result<TwoLoopDesign, CliError> {
    let FieldArgs { omega1, omega } = src.fields;
    match (src.x, src.phi_g) {
        (Some(x), None) => Ok(solve_forward(x, src.branch.into(), omega1, omega)?),
        (None, Some(phi)) => Ok(solve_inverse(phi, omega1, omega)?),
        (Some(_), Some(_)) => Err(CliError::Domain(
            "give exactly one of --x or --phi-g, not both".to_string(),
        )),
        (None, None) => Err(CliError::Domain(
            "one of --x or --phi-g is required".to_string(),
        )),
    }
}

fn run_design(cmd: &DesignCmd) -> Result<(), CliError> {
    let design = design_from_source(&cmd.source)?;
    emit(cmd.out.as_deref(), &design_document(&design))
}

fn check_samples(samples: usize) -> Result<(), CliError> {
    if samples < 3 || samples % 2 == 0 {
        return Err(CliError::Domain(format!(
            "samples = {samples}: must be odd and at least 3"
        )));
    }
    Ok(())
}

fn run_simulate(cmd: &SimulateCmd) -> Result<(), CliError> {
    check_samples(cmd.samples)?;
    let method = cmd.method.method()?;
    let design = match &cmd.design_file {
        Some(path) => {
            if cmd.source.x.is_some() || cmd.source.phi_g.is_some() {
                return Err(CliError::Domain(
                    "--design-file cannot be combined with --x or --phi-g".to_string(),
                ));
            }
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            design_from_json(&text)?
        }
        None => design_from_source(&cmd.source)?,
    };
    let (mut first, second) =
        two_loop_trajectories(&design, &design.psi_plus(), method, cmd.samples)?;
    let phases = decompose_trajectories(&first, &second, design.phi_g_predicted)?;
    first.append(&second);
    let csv = trajectory_csv(&first);
    let json = decomposition_to_json(&phases);

    if cmd.out.is_none() && cmd.phases_out.is_none() {
        return emit(
            None,
            match cmd.format {
                Format::Json => &json,
                Format::Csv => &csv,
            },
        );
    }
    if let Some(path) = &cmd.out {
        emit(Some(path), &csv)?;
    }
    if let Some(path) = &cmd.phases_out {
        emit(Some(path), &json)?;
    }
    emit(None, &summary(&phases))
}

fn summary(p: &PhaseDecomposition) -> String {
    format!(
        "geometric {}\ndynamic {}\ntotal {}\ncyclicity_defect {}\nphi_g_predicted {}\n",
        fmt17(p.geometric),
        fmt17(p.dynamic),
        fmt17(p.total),
        fmt17(p.cyclicity_defect),
        fmt17(p.phi_g_predicted),
    )
}

fn run_sweep(cmd: &SweepCmd) -> Result<(), CliError> {
    if !(cmd.x_from > 0.0 && cmd.x_from < cmd.x_to && cmd.x_to <= 1.0) {
        return Err(CliError::Domain(format!(
            "x range [{}, {}] must satisfy 0 < x-from < x-to <= 1",
            cmd.x_from, cmd.x_to
        )));
    }
    if cmd.points < 2 {
        return Err(CliError::Domain(format!(
            "points = {}: at least 2 grid points required",
            cmd.points
        )));
    }
    check_samples(cmd.samples)?;
    let method = cmd.method.method()?;
    let branch: Branch = cmd.branch.into();
    let FieldArgs { omega1, omega } = cmd.fields;

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for k in 0..cmd.points {
        let t = k as f64 / (cmd.points - 1) as f64;
        let x = if k + 1 == cmd.points {
            cmd.x_to
        } else {
            cmd.x_from + (cmd.x_to - cmd.x_from) * t
        };
        let d = solve_forward(x, branch, omega1, omega)?;
        let (first, second) = two_loop_trajectories(&d, &d.psi_plus(), method, cmd.samples)?;
        let p = decompose_trajectories(&first, &second, d.phi_g_predicted)?;
        let row = [
            fmt17(x),
            branch.to_string(),
            fmt17(d.cos_theta),
            fmt17(d.loop1.omega0),
            fmt17(d.loop2.omega0),
            fmt17(d.loop2.omega1),
            fmt17(d.phi_g_predicted),
            fmt17(p.geometric),
            fmt17(p.dynamic.abs()),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    emit(cmd.out.as_deref(), &out)
}

fn run_gate(cmd: &GateCmd) -> Result<(), CliError> {
    let method = cmd.method.method()?;
    let FieldArgs { omega1, omega } = cmd.fields;
    let design = solve_inverse(cmd.phi_g, omega1, omega)?;
    let spec = GateSpec::new(cmd.phi_g, cmd.axis_polar, cmd.axis_azimuth)?;
    let ideal = tilted_gate(&spec, &design)?;
    let simulated = tilted_simulated_gate(&spec, &design, method)?;
    let report = GateReport {
        phi_g: cmd.phi_g,
        axis_polar: cmd.axis_polar,
        axis_azimuth: cmd.axis_azimuth,
        method: cmd.method.label(),
        ideal: MatrixRecord::from(&ideal),
        simulated: MatrixRecord::from(&simulated),
        fidelity: gate_fidelity(&ideal, &simulated)?,
        eigenphases_ideal: eigenphases(&ideal),
        eigenphases_simulated: eigenphases(&simulated),
        design: DesignRecord::from(&design),
    };
    emit(cmd.out.as_deref(), &gate_report_to_json(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(c) => run_design(c),
        Command::Simulate(c) => run_simulate(c),
        Command::Sweep(c) => run_sweep(c),
        Command::Gate(c) => run_gate(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
