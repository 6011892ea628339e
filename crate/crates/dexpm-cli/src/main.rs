//! dexpm: matrix exponentials by double-exponential quadrature, plus the
//! standard experiment tables as CSV.
//!
//! Exit codes: 0 success, 2 input or parameter error, 3 numerical failure.

mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "dexpm", version, about = "Matrix exponential via DE quadrature")]
pub struct Cli {
    /// Worker threads for node-level parallelism; 0 keeps the default pool.
    /// Results are identical for every setting.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute e^A for a Matrix Market file.
    Expm(ExpmArgs),
    /// Absolute error of the scalar formula over complex-plane grids.
    ScalarMap(ScalarMapArgs),
    /// Error as a function of the shift abscissa.
    ShiftSweep(ShiftSweepArgs),
    /// Mesh-adaptive runs across a list of target tolerances.
    Autoquad(AutoquadArgs),
    /// DE and Talbot convergence histories on the convection-diffusion
    /// operator.
    Compare(CompareArgs),
    /// Write one of the named test matrices to disk.
    GenMatrix(GenMatrixArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// One factorization of x^2 I + A^2 per node.
    Direct,
    /// Two factorizations of A +- ixI per node; better conditioned.
    Split,
}

#[derive(Args)]
pub struct ExpmArgs {
    /// Input matrix (Matrix Market array or coordinate format).
    pub input: PathBuf,

    /// Mesh size. Defaults to 0.1, or to 0.4 as the coarsest trial mesh
    /// under --auto.
    #[arg(long)]
    pub h: Option<f64>,

    /// Truncation tolerance, or the target error under --auto.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,

    /// Shift abscissa for the spectrum, strictly negative.
    #[arg(long, default_value_t = dexpm::DEFAULT_SIGMA, allow_hyphen_values = true)]
    pub sigma: f64,

    /// Resolvent evaluation strategy.
    #[arg(long, value_enum, default_value_t = ModeArg::Direct)]
    pub mode: ModeArg,

    /// Select the mesh size automatically.
    #[arg(long)]
    pub auto: bool,

    /// Safety factor on the predicted error (--auto).
    #[arg(long, default_value_t = 10.0)]
    pub eta: f64,

    /// Smallest mesh the automatic loop may choose (--auto).
    #[arg(long, default_value_t = 1e-3)]
    pub h_min: f64,

    /// Result path; metadata and manifest are written next to it.
    #[arg(long, default_value = "expm_result.mtx")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ScalarMapArgs {
    /// Mesh sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05])]
    pub h: Vec<f64>,

    /// Real-axis window as lo,hi. Without an explicit window the map covers
    /// re [-30, 10] x im [-20, 20] and re [-5000, 0] x im [-2500, 2500].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub re_range: Option<Vec<f64>>,

    /// Imaginary-axis window as lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub im_range: Option<Vec<f64>>,

    /// Samples per axis.
    #[arg(long, default_value_t = 25)]
    pub grid: usize,

    /// Truncation tolerance per cell.
    #[arg(long, default_value_t = 2.2e-16)]
    pub eps: f64,

    #[arg(long, default_value = "scalar_map.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ShiftSweepArgs {
    /// a1, a2, or a Matrix Market file path.
    #[arg(long, default_value = "a1")]
    pub matrix: String,

    /// Shift abscissas, comma separated; default is -10 to 5 in steps of 0.5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigmas: Option<Vec<f64>>,

    #[arg(long, default_value_t = 0.1)]
    pub h: f64,

    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,

    /// Order of the named generator matrices.
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    #[arg(long, default_value_t = 2024)]
    pub seed: u64,

    #[arg(long, default_value = "shift_sweep.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct AutoquadArgs {
    /// a1, a2, or a Matrix Market file path.
    #[arg(long, default_value = "a1")]
    pub matrix: String,

    /// Target tolerances, comma separated.
    #[arg(
        long = "eps-list",
        value_delimiter = ',',
        default_values_t = vec![1e-4, 1e-6, 1e-8, 1e-10, 1e-12]
    )]
    pub eps_list: Vec<f64>,

    #[arg(long, default_value_t = dexpm::DEFAULT_SIGMA, allow_hyphen_values = true)]
    pub sigma: f64,

    /// Order of the named generator matrices.
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    #[arg(long, default_value_t = 2024)]
    pub seed: u64,

    /// Summary table path; the per-mesh trace goes to <stem>_trace.csv.
    #[arg(long, default_value = "autoquad.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Diffusion coefficient.
    #[arg(long, default_value_t = 0.01)]
    pub d: f64,

    /// Convection velocity as cx,cy.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.2])]
    pub c: Vec<f64>,

    /// Interior grid points per axis; the operator is grid-n^2 square.
    #[arg(long, default_value_t = 8)]
    pub grid_n: usize,

    /// Any of: de, talbot.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["de".to_string(), "talbot".to_string()])]
    pub methods: Vec<String>,

    #[arg(long, default_value = "compare.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct GenMatrixArgs {
    /// a1, a2, convdiff, or randsvd.
    #[arg(long)]
    pub kind: String,

    /// Order for a1/a2/randsvd; interior grid points per axis for convdiff.
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    #[arg(long, default_value_t = 2024)]
    pub seed: u64,

    /// Target 2-norm condition number (randsvd).
    #[arg(long, default_value_t = 100.0)]
    pub kappa: f64,

    /// Diffusion coefficient (convdiff).
    #[arg(long, default_value_t = 0.01)]
    pub d: f64,

    /// Convection velocity as cx,cy (convdiff).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.2])]
    pub c: Vec<f64>,

    #[arg(long, default_value = "matrix.mtx")]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    /// Usage and input problems; exit 2.
    Input(String),
    /// Library failures, split into input-shaped and numerical; exit 2 or 3.
    Lib(dexpm::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<dexpm::Error> for CliError {
    fn from(e: dexpm::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        use dexpm::Error as E;
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Lib(e) => match e {
                E::Parse { .. }
                | E::Io(_)
                | E::InvalidParam(_)
                | E::InvalidTolerance { .. }
                | E::NonFinite { .. }
                | E::DimensionMismatch(_) => ExitCode::from(2),
                E::SingularMatrix { .. }
                | E::SingularResolvent { .. }
                | E::NoConvergence { .. }
                | E::IntervalOverflow { .. }
                | E::DegenerateEstimate { .. }
                | E::MeshFloor { .. } => ExitCode::from(3),
            },
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Expm(args) => commands::cmd_expm(args),
        Command::ScalarMap(args) => commands::cmd_scalar_map(args),
        Command::ShiftSweep(args) => commands::cmd_shift_sweep(args),
        Command::Autoquad(args) => commands::cmd_autoquad(args),
        Command::Compare(args) => commands::cmd_compare(args),
        Command::GenMatrix(args) => commands::cmd_gen_matrix(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a global pool already exists, which cannot happen
        // this early; the sizing request is best-effort either way.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
