//! The `ekt` command-line front end.
//!
//! [`run`] parses arguments, executes one command and writes its report;
//! it returns the process exit code: 0 on success, 2 on input or domain
//! errors (with an `error: <Code>: <detail>` line on stderr), 3 when a
//! verification command finds a failing check.

mod commands;
mod output;
mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::spectrum_analytic::BoundaryCondition;
use crate::spectrum_numeric::GridSize;

pub use output::{round_sig, JSON_SCHEMA};
pub use sweep::Range;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ekt", version, about = "Stability of truncated vertical CMC cylinders in E(kappa, tau)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical length L0 by both closed-form routes.
    CriticalLength(CircleArgs),
    /// Stability verdicts and closed-form spectrum of a truncated cylinder.
    Classify(CylinderArgs),
    /// Numeric-vs-closed-form eigenvalue check under grid doubling.
    Verify(VerifyArgs),
    /// Low end of the discrete spectrum, Morse and weak indices.
    NumericSpectrum(NumericArgs),
    /// Parameter sweep emitting one row per (kappa, tau, rho, L) cell.
    Sweep(SweepArgs),
    /// Contact angles and the Robin coefficient on the support planes.
    Capillary(CapillaryArgs),
    /// Randomised residual checks of the ambient geometry.
    GeometryCheck(GeometryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
}

/// Circle radius, intrinsic (`--rho`) or in model coordinates (`--r`);
/// ρ = 1 when neither is given.
#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct RadiusArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CircleArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub radius: RadiusArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CylinderArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub radius: RadiusArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub length: f64,
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    /// Highest closed-form mode listed.
    #[arg(long, default_value_t = 4)]
    pub n_max: i64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub radius: RadiusArgs,
    /// Defaults to twice the critical length.
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    #[arg(long, default_value = "64x64")]
    pub grid: GridSize,
    /// Highest mode compared.
    #[arg(long, default_value_t = 2)]
    pub n_max: i64,
    /// Relative error tolerance on the coarse grid.
    #[arg(long, default_value_t = crate::spectrum_numeric::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub radius: RadiusArgs,
    /// Defaults to twice the critical length.
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    #[arg(long, default_value = "64x64")]
    pub grid: GridSize,
    /// Number of eigenvalues reported.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub length: f64,
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    /// A:B:STEPS, STEPS evenly spaced values from A to B.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_range: Option<Range>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_range: Option<Range>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho_range: Option<Range>,
    #[arg(long, allow_hyphen_values = true)]
    pub length_range: Option<Range>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveArg {
    Circle,
    Geodesic,
    Equidistant,
}

#[derive(Debug, Clone, Args)]
pub struct CapillaryArgs {
    #[arg(long, value_enum, default_value = "circle")]
    pub curve: CurveArg,
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Intrinsic circle radius (circle only).
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Model radius: of the circle, or of the Euclidean circle carrying an
    /// equidistant curve or horocycle.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Offset of the Euclidean circle's centre (0, -y0).
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    /// Parameter range LO:HI of the profile: model x along a geodesic,
    /// polar angle along an offset circle.
    #[arg(long, allow_hyphen_values = true)]
    pub s_range: Option<String>,
    /// Boundary points (circle) or profile samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random sample points.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Outcome of a command: the rendered report and whether its checks passed.
pub(crate) struct Report {
    pub text: String,
    pub pass: bool,
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `stdout` or the `--output` file.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error: InvalidInput: {first}");
            return EXIT_INPUT;
        }
    };
    let output = output_path(&cli.command);
    let report = match commands::execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", e.code());
            return EXIT_INPUT;
        }
    };
    let written = match output {
        Some(path) => std::fs::write(path, &report.text),
        None => stdout.write_all(report.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: Io: {e}");
        return EXIT_INPUT;
    }
    if report.pass {
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "verification failed");
        EXIT_VERIFY
    }
}

fn output_path(command: &Command) -> Option<&PathBuf> {
    let out = match command {
        Command::CriticalLength(a) => &a.out,
        Command::Classify(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::NumericSpectrum(a) => &a.out,
        Command::Sweep(a) => &a.out,
        Command::Capillary(a) => &a.out,
        Command::GeometryCheck(a) => &a.out,
    };
    out.output.as_ref()
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
