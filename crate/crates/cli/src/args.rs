//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::suites::{FdTolerances, ALL_FINITE_SPECS};

pub const ALL_SPECS: &str = "full,u1,o2,c:1..12,d:1..12,e6,e7,e8";

#[derive(Parser, Debug)]
#[command(
    name = "toda-forge",
    version,
    about = "Reduced SU(n+1) Toda solutions: dimension tables and verification suites"
)]
pub struct Cli {
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// `json`, `csv`, or a path to write the report to.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Allowed |det - 1| for unimodular matrices.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_det: f64,
    /// Kernel threshold for commutant eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_rank: f64,
    /// Magnitude below which an entry counts as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_sparsity: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form dim Δ_v against the commutant oracles.
    DimTable(DimTableArgs),
    /// Order and conjugacy classes of a finite subgroup.
    GroupInfo(GroupInfoArgs),
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Draw a random δ in Δ_v and check it.
    SampleDelta(SampleDeltaArgs),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Self::DimTable(_) => "dim-table".into(),
            Self::GroupInfo(_) => "group-info".into(),
            Self::Verify { suite } => format!("verify {}", suite.name()),
            Self::SampleDelta(_) => "sample-delta".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Formula against the oracle (characters for finite groups).
    Agreement,
    /// Formula values only, checked for integrality.
    Integrality,
    /// Character sum against nullspace, finite specs only.
    Dual,
}

#[derive(Args, Debug, Serialize)]
pub struct DimTableArgs {
    /// Selector list: full | u1 | o2 | c:<k> | c:<a>..<b> | d:<k> | e6 | e7 | e8.
    #[arg(long, default_value = ALL_SPECS)]
    pub specs: String,
    /// Values of n: `a..b`, `k`, or a comma list of either.
    #[arg(long, default_value = "1..40")]
    pub n: String,
    #[arg(long, value_enum, default_value_t = Check::Agreement)]
    pub check: Check,
}

#[derive(Args, Debug, Serialize)]
pub struct GroupInfoArgs {
    pub spec: String,
    /// Also report the character of Symⁿ on each class.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleDeltaArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum VerifySuite {
    Wronskian(WronskianArgs),
    Cholesky(CholeskyArgs),
    Intertwine(IntertwineArgs),
    Toda(FdArgs),
    Plucker(FdArgs),
    /// Every suite above with its defaults.
    All,
}

impl VerifySuite {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Wronskian(_) => "wronskian",
            Self::Cholesky(_) => "cholesky",
            Self::Intertwine(_) => "intertwine",
            Self::Toda(_) => "toda",
            Self::Plucker(_) => "plucker",
            Self::All => "all",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WronskianArgs {
    /// Random instances for the scale and power lemmas.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 5)]
    pub deg: usize,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    /// Random Möbius pairs for the unimodular lift.
    #[arg(long, default_value_t = 50)]
    pub lift_trials: usize,
    #[arg(long, default_value_t = 5)]
    pub lift_max_n: usize,
}

impl Default for WronskianArgs {
    fn default() -> Self {
        Self {
            trials: 200,
            deg: 5,
            max_n: 4,
            lift_trials: 50,
            lift_max_n: 5,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CholeskyArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Sparsity moduli.
    #[arg(long, default_value = "2..4")]
    pub k: String,
    /// Trials per modulus and direction.
    #[arg(long, default_value_t = 50)]
    pub pattern_trials: usize,
}

impl Default for CholeskyArgs {
    fn default() -> Self {
        Self {
            dim: 8,
            trials: 100,
            k: "2..4".into(),
            pattern_trials: 50,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IntertwineArgs {
    /// Largest n for random (U, z) draws.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest n for the sweep over enumerated groups.
    #[arg(long, default_value_t = 30)]
    pub group_n: usize,
    /// Groups swept for unitarity and characters.
    #[arg(long, default_value = ALL_FINITE_SPECS)]
    pub groups: String,
}

impl Default for IntertwineArgs {
    fn default() -> Self {
        Self {
            n: 10,
            trials: 100,
            group_n: 30,
            groups: ALL_FINITE_SPECS.into(),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FdArgs {
    /// JSON pair file `{"v0": [...], "v1": [...]}`; default (1, z) plus a seeded random Möbius pair.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    #[arg(long, default_value = "1,2,3,5")]
    pub n: String,
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    /// Number of spacings h, h/2, ... in the residual ladder.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// `XMIN,XMAX,YMIN,YMAX`.
    #[arg(long = "box", default_value = "-1,1,-1,1", allow_hyphen_values = true)]
    pub bounds: String,
    #[command(flatten)]
    pub tol: FdTolerances,
}

impl Default for FdArgs {
    fn default() -> Self {
        Self {
            pair: None,
            n: "1,2,3,5".into(),
            h: 0.01,
            levels: 2,
            bounds: "-1,1,-1,1".into(),
            tol: FdTolerances::default(),
        }
    }
}
