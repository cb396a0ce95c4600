//! Command-line and config-file arguments. Every subcommand's arguments are
//! also its config-file format: a JSON object with the long flag names (in
//! snake case) as keys. Flags given on the command line win over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "morrey-lab", version, about = "Bessel-Riesz kernels, maximal functions and Morrey norms on grids")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MORREY_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Print a single-line JSON result on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for artifacts.
    #[arg(long, global = true, default_value = "morrey-lab-out")]
    pub out_dir: PathBuf,
    /// JSON config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lebesgue or (generalized) Morrey norm of the kernel.
    KernelNorm(KernelNormArgs),
    /// Apply the Bessel-Riesz operator to a test function.
    Apply(ApplyArgs),
    /// Uncentred maximal function of a test function.
    Maximal(MaximalArgs),
    /// Lebesgue or (generalized) Morrey norm of a test function.
    Norm(NormArgs),
    /// Run a boundedness experiment over a corpus.
    Verify(VerifyArgs),
    /// Compare the three kernel norms of the generalized Morrey bounds.
    Compare(CompareArgs),
    /// Admissibility mask of a parameter box.
    ParamScan(ParamScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Lebesgue,
    Morrey,
    GenMorrey,
}

/// Fill every `None` field of `$dst` from `$src`.
macro_rules! overlay {
    ($dst:expr, $src:expr; $($f:ident),* $(,)?) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

/// Kernel parameters shared by several subcommands.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Bessel decay exponent (0 for the Riesz kernel).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

impl KernelArgs {
    pub fn overlay(&mut self, o: &Self) {
        overlay!(self, o; n, alpha, gamma);
    }
}

/// Grid and input function shared by the function subcommands.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FunctionArgs {
    /// Grid spacing (default depends on the dimension).
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid half-width L.
    #[arg(long)]
    pub extent: Option<f64>,
    /// Test function as JSON, or @path to a JSON file.
    #[arg(long = "f")]
    pub f: Option<String>,
    /// Sampled input in the binary grid format or as x,value CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl FunctionArgs {
    pub fn overlay(&mut self, o: &Self) {
        overlay!(self, o; h, extent, f, input);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelNormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, value_enum)]
    pub space: Option<SpaceKind>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Growth function: power:c:beta, classical:t or composite:t:t1.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Also evaluate the dyadic shell sum at this radius.
    #[arg(long)]
    pub radius: Option<f64>,
}

impl KernelNormArgs {
    pub fn overlay(&mut self, o: &Self) {
        self.kernel.overlay(&o.kernel);
        overlay!(self, o; space, t, s, sigma, radius);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ApplyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
}

impl ApplyArgs {
    pub fn overlay(&mut self, o: &Self) {
        self.kernel.overlay(&o.kernel);
        self.function.overlay(&o.function);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct MaximalArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Ratio of the radius ladder.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

impl MaximalArgs {
    pub fn overlay(&mut self, o: &Self) {
        self.function.overlay(&o.function);
        overlay!(self, o; n, ratio, r_min, r_max);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct NormArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_enum)]
    pub space: Option<SpaceKind>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Growth function: power:c:beta, classical:t or composite:t:t1.
    #[arg(long)]
    pub phi: Option<String>,
    /// Stride of the centre sublattice.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Ratio of the radius ladder.
    #[arg(long)]
    pub radius_ratio: Option<f64>,
}

impl NormArgs {
    pub fn overlay(&mut self, o: &Self) {
        self.function.overlay(&o.function);
        overlay!(self, o; n, space, p, q, phi, stride, radius_ratio);
    }
}

/// Flags of `verify`. The config file is an experiment description; these
/// flags override its fields.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct VerifyArgs {
    /// T4, T5, T6, T7, T9 or T11.
    #[arg(long)]
    pub theorem: Option<String>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    /// Input growth function: power:c:beta, classical:t or composite:t:t1.
    #[arg(long)]
    pub phi: Option<String>,
    /// Kernel growth function for T11.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub extent: Option<f64>,
    /// Skip the run on the refined grid.
    #[arg(long)]
    pub no_refine: bool,
    /// Run even if φ fails certification.
    #[arg(long)]
    pub allow_uncertified: bool,
    /// Check the Morrey inclusion chain at (--p, --q) instead.
    #[arg(long)]
    pub inclusion: bool,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    /// Also run the three corpus experiments and report C_emp times each norm.
    #[arg(long)]
    pub with_corpus: bool,
    /// Input growth exponent for the corpus runs.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
}

impl CompareArgs {
    pub fn overlay(&mut self, o: &Self) {
        self.kernel.overlay(&o.kernel);
        overlay!(self, o; s, t, t1, beta, p1);
        self.with_corpus |= o.with_corpus;
    }
}

/// Each parameter is a single value or an inclusive range `lo:hi:step`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamScanArgs {
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<String>,
}

impl ParamScanArgs {
    pub fn overlay(&mut self, o: &Self) {
        overlay!(self, o; theorem, n, alpha, gamma, p1, q1, t, s, beta, t1);
    }
}
