use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Radial regular and rupture solutions of a MEMS model with fringing field.
///
/// Every flag can also be given through the environment variable shown in its help;
/// a flag on the command line takes precedence over the variable, which takes
/// precedence over the built-in default.
#[derive(Debug, Parser)]
#[command(name = "mems-lab", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace lambda(alpha) by shooting and classify the curve.
    Bifurcate(BifurcateArgs),
    /// Evaluate the equation residual of a closed-form family.
    ExactVerify(ExactArgs),
    /// Build a rupture profile from a phase-plane orbit (delta >= N/2).
    Phase(PhaseArgs),
    /// Build a rupture profile by Picard iteration (N = 2 or delta > N-1).
    Picard(PicardArgs),
    /// Build a member of the critical rescaled family (delta = N-1, N >= 3).
    Critical(CriticalArgs),
    /// First Dirichlet eigenvalue of the unit ball.
    Mu1(Mu1Args),
    /// Regular and rupture lambda-ranges over a grid of (N, delta).
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent. In CSV mode the JSON summary goes to
    /// `<out>.summary.json` (stderr when writing to stdout).
    #[arg(long, env = "MEMS_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "MEMS_FORMAT", default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BifurcateArgs {
    #[arg(long, env = "MEMS_DIM")]
    pub dim: u32,
    #[arg(long, env = "MEMS_DELTA")]
    pub delta: f64,
    /// Uniform samples in (0, 0.9].
    #[arg(long, env = "MEMS_BODY_SAMPLES", default_value_t = 120)]
    pub body_samples: usize,
    /// Geometric samples of 1 - alpha in [tail-lo, tail-hi].
    #[arg(long, env = "MEMS_TAIL_SAMPLES", default_value_t = 60)]
    pub tail_samples: usize,
    #[arg(long, env = "MEMS_TAIL_LO", default_value_t = 1e-8)]
    pub tail_lo: f64,
    #[arg(long, env = "MEMS_TAIL_HI", default_value_t = 1e-1)]
    pub tail_hi: f64,
    /// Relative tolerance of the shooting integrator.
    #[arg(long, env = "MEMS_RTOL", default_value_t = 1e-10)]
    pub rtol: f64,
    /// Locate the fold by golden-section search instead of the sampled parabola.
    #[arg(long, env = "MEMS_REFINE")]
    pub refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    RuptureLine,
    Parabola,
    Liouville,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[arg(long, value_enum, env = "MEMS_FAMILY")]
    pub family: Family,
    #[arg(long, env = "MEMS_DIM", default_value_t = 2)]
    pub dim: u32,
    /// Required for the rupture line; the parabola uses N/2 and Liouville 1.
    #[arg(long, env = "MEMS_DELTA")]
    pub delta: Option<f64>,
    /// Number of family members checked (alpha for the parabola, b for Liouville).
    #[arg(long, env = "MEMS_MEMBERS", default_value_t = 20)]
    pub members: usize,
    /// Radial nodes per member.
    #[arg(long, env = "MEMS_NODES", default_value_t = 2000)]
    pub nodes: usize,
    /// Exit with status 2 when the largest residual exceeds this [default: 1e-12, 1e-10
    /// for the term-scaled Liouville residual].
    #[arg(long, env = "MEMS_MAX_RESIDUAL")]
    pub max_residual: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    #[arg(long, env = "MEMS_DIM")]
    pub dim: u32,
    #[arg(long, env = "MEMS_DELTA")]
    pub delta: f64,
    #[arg(long, env = "MEMS_LAMBDA")]
    pub lambda: f64,
    /// Initial y; the orbit starts at (x(0), y0).
    #[arg(long, env = "MEMS_Y0", default_value_t = 0.0, allow_hyphen_values = true)]
    pub y0: f64,
    #[arg(long, env = "MEMS_T_END", default_value_t = 40.0)]
    pub t_end: f64,
    #[arg(long, env = "MEMS_RTOL", default_value_t = 1e-11)]
    pub rtol: f64,
    #[arg(long, env = "MEMS_SAMPLES", default_value_t = 4000)]
    pub samples: usize,
    /// Write the orbit `t,x,y,energy` instead of the profile.
    #[arg(long, env = "MEMS_ORBIT")]
    pub orbit: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PicardArgs {
    #[arg(long, env = "MEMS_DIM")]
    pub dim: u32,
    #[arg(long, env = "MEMS_DELTA")]
    pub delta: f64,
    #[arg(long, env = "MEMS_LAMBDA")]
    pub lambda: f64,
    /// Asymptotic slope; defaults to the minimiser of the feasibility function.
    #[arg(long, env = "MEMS_M")]
    pub m: Option<f64>,
    #[arg(long, env = "MEMS_T_END", default_value_t = 30.0)]
    pub t_end: f64,
    #[arg(long, env = "MEMS_TOL", default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, env = "MEMS_STEP", default_value_t = 1e-3)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CriticalArgs {
    #[arg(long, env = "MEMS_DIM", default_value_t = 3)]
    pub dim: u32,
    /// Lane-Emden parameter; the MEMS parameter is lambda/(N-2).
    #[arg(long, env = "MEMS_LAMBDA", default_value_t = 1e-3)]
    pub lambda: f64,
    /// Initial slope of the inward shot.
    #[arg(long, env = "MEMS_BETA", default_value_t = 0.05)]
    pub beta: f64,
    #[arg(long, env = "MEMS_R_MIN", default_value_t = 1e-6)]
    pub r_min: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Mu1Args {
    #[arg(long, env = "MEMS_DIM")]
    pub dim: u32,
    #[arg(long, env = "MEMS_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, env = "MEMS_DIMS", value_delimiter = ',', default_values_t = [2u32, 3, 4, 5])]
    pub dims: Vec<u32>,
    #[arg(long, env = "MEMS_DELTAS", value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0])]
    pub deltas: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
