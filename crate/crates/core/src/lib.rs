//! Bessel-Riesz kernels `|x|^(α-n)/(1+|x|)^γ`, their fractional integral
//! operators, the Hardy-Littlewood maximal operator and (generalized) Morrey
//! norms on uniform grids in dimensions 1 to 3, plus numerical experiments
//! checking the boundedness inequalities that relate them.

pub mod error;
pub mod field;
pub mod kernel;
pub mod norms;
pub mod numeric;
pub mod operators;
pub mod params;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Grid, GridFunction, GridSpec, Region, TestFunctionSpec};
pub use kernel::{KernelNormEstimate, KernelSpec};
pub use norms::{GrowthFunction, NormValue, ScanConfig};
pub use operators::{HedbergSplit, MaximalConfig, OperatorResult};
pub use params::{KernelParams, LebesgueExponent, MorreyExponents, MorreyScale, TheoremHypothesis, TheoremId};
pub use verify::{compare_bounds, verify_inclusion, Experiment, ExperimentConfig, VerificationReport};
