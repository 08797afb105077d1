use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "spca", version, about = "Sparse PCA solvers, hardness instance generators and inequality checks")]
pub struct Cli {
    /// Exact-enumeration budget on C(n,k)·k³; overrides SPCA_BUDGET.
    #[arg(long, global = true, value_name = "OPS")]
    pub budget: Option<f64>,

    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve k-sparse PCA on a matrix file.
    Solve(SolveArgs),
    /// Build a reduction instance and write its matrix.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Run named inequality checks.
    Verify(VerifyArgs),
    /// Batch ratio study on random PSD instances.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Exact,
    Approx,
    Alg1,
    Alg2,
    Ptas,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long)]
    pub k: usize,
    /// Additive error for `--alg ptas`.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// E2SAT formula to sparse PCA matrix.
    Sat(SatArgs),
    /// Walk graph to PSD small-set-expansion instance.
    Sse(SseArgs),
    /// Reed–Muller short-code instance with its SDP gap report.
    Shortcode(ShortcodeArgs),
}

#[derive(Debug, Args)]
pub struct SatArgs {
    /// DIMACS CNF input. Without it a random E2SAT formula is drawn.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    /// Variables of the random formula.
    #[arg(long, default_value_t = 6, conflicts_with = "cnf")]
    pub vars: usize,
    /// Degree of the random formula, or the target of --regularize.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Pad a 2-CNF with degrees at most `degree` to exact degree.
    #[arg(long, requires = "degree")]
    pub regularize: bool,
    #[arg(long, default_value_t = 0.9)]
    pub c: f64,
    #[arg(long, default_value_t = 0.8)]
    pub s: f64,
    /// Chain stage to write (0 to 3).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub stage: u8,
    /// Matrix output.
    #[arg(long)]
    pub out: PathBuf,
    /// Metadata output; `meta.json` beside --out by default.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SseArgs {
    /// Weighted edge list.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Parameter output; `params.json` beside --out by default.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShortcodeArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1, conflicts_with = "paper_preset")]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eps2: f64,
    /// Derive d from m and eps2 through the coupled parameter chain.
    #[arg(long)]
    pub paper_preset: bool,
    /// Also compute the exact k-sparse optimum of A (subject to --budget).
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Gap report output; `gap.json` beside --out by default.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run every check of a group: solvers, hardness, expansion, shortcode.
    pub group: Option<String>,
    /// Check name; repeatable. All checks run when neither this nor a group is given.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eps2: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.9)]
    pub c: f64,
    #[arg(long, default_value_t = 0.8)]
    pub s: f64,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Edge list to check in place of random graphs.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// DIMACS formula to check in place of random formulas.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Additive error of the PTAS column.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Sampled net directions per PTAS run.
    #[arg(long, default_value_t = 100_000)]
    pub net_points: u64,
    /// Skip the PTAS column.
    #[arg(long)]
    pub no_ptas: bool,
    #[arg(long)]
    pub csv: PathBuf,
    /// Summary report; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
