//! Experiments that run the boundedness inequalities over a corpus of test
//! functions and report empirical constants.
//!
//! Every experiment evaluates the corpus on the configured grid and, unless
//! switched off, once more on the grid with half the spacing; the relative
//! change of the empirical constant is the refinement drift.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lattice_count, Grid, GridFunction, GridSpec, Step, TestFunctionSpec};
use crate::kernel::{KernelNormEstimate, KernelSpec};
use crate::norms::{self, GrowthFunction, ScanConfig};
use crate::numeric::ball_volume;
use crate::operators::{apply_bessel_riesz, hedberg_rhs, maximal, MaximalConfig};
use crate::params::{
    young_exponent, KernelParams, LebesgueExponent, MorreyScale, TheoremHypothesis, TheoremId,
};

/// Pass thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest accepted Young ratio (the exact constant is 1).
    pub young_ratio: f64,
    /// Largest accepted relative change of an empirical constant under
    /// refinement.
    pub drift: f64,
    /// Relative slack of the exact Hölder inequalities.
    pub holder: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { young_ratio: 1.05, drift: 0.1, holder: 1e-12 }
    }
}

fn default_true() -> bool {
    true
}

/// Serialized description of an experiment. Fields left out are filled in by
/// [`Experiment::new`]; the report echoes the filled-in version.
///
/// The hypothesis fields sit at the top level. For T4 and T6 `p1` is the
/// single Lebesgue exponent `p`; for T6 `beta` is the exponent of the default
/// growth function `φ(r) = r^beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub hypothesis: TheoremHypothesis,
    /// Input growth function; default `r^beta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<GrowthFunction>,
    /// Kernel growth function for T11; default `composite(t, t1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<Vec<TestFunctionSpec>>,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub maximal: MaximalConfig,
    /// Re-run on the grid with half the spacing.
    #[serde(default = "default_true")]
    pub refine: bool,
    /// Run even when `φ` fails certification.
    #[serde(default)]
    pub allow_uncertified: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(hypothesis: TheoremHypothesis) -> Self {
        Self {
            hypothesis,
            phi: None,
            sigma: None,
            grid: None,
            corpus: None,
            scan: ScanConfig::default(),
            maximal: MaximalConfig::default(),
            refine: true,
            allow_uncertified: false,
            tolerances: Tolerances::default(),
        }
    }

    /// The shipped one-dimensional defaults for each statement.
    pub fn default_for(theorem: TheoremId) -> Self {
        let mut h = TheoremHypothesis {
            theorem,
            n: 1,
            alpha: 0.5,
            gamma: 1.0,
            p1: Some(1.5),
            q1: None,
            t: Some(1.2),
            s: None,
            beta: None,
            t1: None,
        };
        match theorem {
            TheoremId::T4 => {}
            TheoremId::T5 => {
                h.p1 = Some(1.1);
                h.q1 = Some(1.3);
            }
            TheoremId::T6 => {
                h.p1 = Some(2.0);
                h.t = None;
                h.beta = Some(-0.25);
            }
            TheoremId::T7 => h.beta = Some(-0.6),
            TheoremId::T9 => {
                h.beta = Some(-0.6);
                h.s = Some(1.0);
            }
            TheoremId::T11 => {
                h.beta = Some(-0.6);
                h.s = Some(1.0);
                h.t1 = Some(2.4);
            }
        }
        Self::new(h)
    }
}

/// Default corpus: two ball indicators, two power bumps near the space
/// boundary, two gaussians and two two-bump step sums. `crit` is the critical
/// power exponent of the input space.
pub fn default_corpus(n: usize, crit: f64) -> Vec<TestFunctionSpec> {
    let e1 = |x: f64| {
        let mut v = vec![0.0; n];
        v[0] = x;
        v
    };
    let step = |c: f64, radius: f64, weight: f64| Step { center: e1(c), radius, weight };
    vec![
        TestFunctionSpec::ball(&e1(0.0), 1.0),
        TestFunctionSpec::ball(&e1(0.5), 0.25),
        TestFunctionSpec::PowerBump { beta: 0.75 * crit, radius: 1.0 },
        TestFunctionSpec::PowerBump { beta: 0.5 * crit, radius: 0.5 },
        TestFunctionSpec::gaussian(&e1(0.0), 0.5),
        TestFunctionSpec::gaussian(&e1(-0.75), 0.25),
        TestFunctionSpec::StepSum { steps: vec![step(-1.5, 0.5, 1.0), step(1.5, 0.25, 2.0)] },
        TestFunctionSpec::StepSum { steps: vec![step(0.0, 1.0, 1.0), step(0.0, 0.25, 3.0)] },
    ]
}

/// A function space measured on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Lebesgue { p: f64 },
    Morrey { p: f64, q: f64 },
    GeneralizedMorrey { p: f64, phi: GrowthFunction },
}

impl SpaceSpec {
    pub fn norm(&self, f: &GridFunction, scan: &ScanConfig) -> Result<f64> {
        Ok(match self {
            Self::Lebesgue { p } => norms::lebesgue_norm_f(f, *p)?.value,
            Self::Morrey { p, q } => norms::morrey_norm(f, *p, *q, scan)?.value,
            Self::GeneralizedMorrey { p, phi } => norms::gen_morrey_norm(f, *p, phi, scan)?.value,
        })
    }
}

/// A validated experiment with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    config: ExperimentConfig,
    kernel: KernelParams,
    grid: Grid,
    corpus: Vec<TestFunctionSpec>,
    input: SpaceSpec,
    output: SpaceSpec,
}

fn required(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{name} is required")))
}

impl Experiment {
    /// Validates the hypothesis and resolves defaults. Nothing numerical is
    /// computed here except the analytic divergence test, so that a `t`
    /// outside the admissible interval reports a divergent kernel norm.
    pub fn new(mut config: ExperimentConfig) -> Result<Self> {
        let h = config.hypothesis.clone();
        let kernel = h.kernel()?;
        if let Err(e) = h.validate() {
            if let (Some(t), TheoremId::T4 | TheoremId::T5 | TheoremId::T7) = (h.t, h.theorem) {
                if t >= 1.0 {
                    if let Some(d) = KernelSpec::new(kernel).lebesgue_divergence(t) {
                        return Err(Error::Divergent(format!("‖K‖_{{L^t}} with t = {t} diverges ({d:?}); {e}")));
                    }
                }
            }
            return Err(e);
        }
        let n = h.n;
        let p1 = required(h.p1, "p1")?;
        let (input, output, crit) = match h.theorem {
            TheoremId::T4 => {
                let q = young_exponent(p1, required(h.t, "t")?)?;
                (SpaceSpec::Lebesgue { p: p1 }, SpaceSpec::Lebesgue { p: q }, -(n as f64) / p1)
            }
            TheoremId::T5 => {
                let t = required(h.t, "t")?;
                let q1 = required(h.q1, "q1")?;
                let out = SpaceSpec::Morrey { p: young_exponent(p1, t)?, q: young_exponent(q1, t)? };
                (SpaceSpec::Morrey { p: p1, q: q1 }, out, -(n as f64) / q1)
            }
            TheoremId::T6 | TheoremId::T7 | TheoremId::T9 | TheoremId::T11 => {
                let beta = required(h.beta, "beta")?;
                let phi = match &config.phi {
                    Some(phi) => phi.clone(),
                    None => GrowthFunction::power(1.0, beta)?,
                };
                let cert = phi.certify(n, p1);
                if !cert.certified && !config.allow_uncertified {
                    return Err(Error::Uncertified(format!(
                        "φ = {phi:?} with p = {p1}: almost-decreasing factor {:.3}, r^(n/p)φ almost-increasing factor {:.3}, doubling {:.3}",
                        cert.almost_decreasing_factor, cert.scaled_almost_increasing_factor, cert.doubling_constant
                    )));
                }
                config.phi = Some(phi.clone());
                let out = if h.theorem == TheoremId::T6 {
                    SpaceSpec::GeneralizedMorrey { p: p1, phi: phi.clone() }
                } else {
                    let p2 = h
                        .p2()
                        .ok_or_else(|| Error::InvalidParameter("p2 is undefined for these parameters".into()))?;
                    SpaceSpec::GeneralizedMorrey { p: p2, phi: phi.powf(p1 / p2) }
                };
                (SpaceSpec::GeneralizedMorrey { p: p1, phi }, out, beta)
            }
        };
        if h.theorem == TheoremId::T11 && config.sigma.is_none() {
            let t = required(h.t, "t (for the default σ)")?;
            let t1 = required(h.t1, "t1 (for the default σ)")?;
            config.sigma = Some(GrowthFunction::composite(n, t, t1)?);
        }
        let grid = match config.grid {
            Some(spec) => Grid::try_from(spec)?,
            None => Grid::default_for(n)?,
        };
        if grid.n() != n {
            return Err(Error::GridMismatch(format!("{n}-D parameters on a {}-D grid", grid.n())));
        }
        config.grid = Some(grid.into());
        let corpus = match &config.corpus {
            Some(c) => c.clone(),
            None => default_corpus(n, crit),
        };
        for f in &corpus {
            f.support_radius(&grid)?;
        }
        config.corpus = Some(corpus.clone());
        Ok(Self { config, kernel, grid, corpus, input, output })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn theorem(&self) -> TheoremId {
        self.config.hypothesis.theorem
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn corpus(&self) -> &[TestFunctionSpec] {
        &self.corpus
    }

    pub fn input_space(&self) -> &SpaceSpec {
        &self.input
    }

    pub fn output_space(&self) -> &SpaceSpec {
        &self.output
    }

    /// The kernel norm the statement is stated with; `None` for T6.
    pub fn kernel_norm(&self) -> Result<Option<KernelNormEstimate>> {
        let h = &self.config.hypothesis;
        let spec = KernelSpec::new(self.kernel);
        let est = match h.theorem {
            TheoremId::T6 => return Ok(None),
            TheoremId::T4 | TheoremId::T5 | TheoremId::T7 => {
                spec.lebesgue_norm(LebesgueExponent::new(required(h.t, "t")?)?)
            }
            TheoremId::T9 => spec.morrey_norm(required(h.s, "s")?, &MorreyScale::Classical { q: required(h.t, "t")? })?,
            TheoremId::T11 => {
                let sigma = self.config.sigma.clone().expect("resolved in Experiment::new");
                spec.morrey_norm(required(h.s, "s")?, &MorreyScale::Generalized { phi: sigma })?
            }
        };
        est.finite()?;
        Ok(Some(est))
    }

    /// Runs the experiment matching the configured statement.
    pub fn run(&self) -> Result<VerificationReport> {
        match self.theorem() {
            TheoremId::T4 => verify_lebesgue(self),
            TheoremId::T5 => verify_morrey(self),
            TheoremId::T6 => verify_maximal(self),
            TheoremId::T7 | TheoremId::T9 | TheoremId::T11 => verify_gen_morrey(self),
        }
    }

    fn maximal_refined_ladder(&self) -> MaximalConfig {
        let base = self.config.maximal;
        let ratio = base.ratio.unwrap_or(if self.grid.n() == 1 { 2f64.powf(0.125) } else { 2.0 });
        MaximalConfig { ratio: Some(ratio.sqrt()), ..base }
    }

    /// Norms, ratio and Hedberg constant of one function on `grid`.
    fn measure(&self, spec: &TestFunctionSpec, grid: &Grid, kn: Option<f64>, hedberg: bool) -> Result<Measured> {
        let f = spec.sample(grid)?;
        let scan = &self.config.scan;
        let input = self.input.norm(&f, scan)?;
        if input == 0.0 {
            return Ok(Measured { input, output: 0.0, ratio: None, hedberg: None });
        }
        if self.theorem() == TheoremId::T6 {
            let mf = maximal(&f, &self.config.maximal)?;
            let output = self.output.norm(&mf, scan)?;
            return Ok(Measured { input, output, ratio: Some(output / input), hedberg: None });
        }
        let kn = kn.expect("kernel norm present for operator experiments");
        let out = apply_bessel_riesz(&self.kernel, &f)?.output;
        let output = self.output.norm(&out, scan)?;
        let hedberg = if hedberg { Some(self.hedberg_constant(&f, &out, kn, input)?) } else { None };
        Ok(Measured { input, output, ratio: Some(output / (kn * input)), hedberg })
    }

    /// `max_x |I f(x)| / rhs(x)` over the grid.
    fn hedberg_constant(&self, f: &GridFunction, out: &GridFunction, kn: f64, f_norm: f64) -> Result<f64> {
        let h = &self.config.hypothesis;
        let beta = required(h.beta, "beta")?;
        let mf = maximal(f, &self.config.maximal)?;
        let mut best: f64 = 0.0;
        for (&u, &m) in out.values().iter().zip(mf.values()) {
            let rhs = hedberg_rhs(h.theorem, kn, h.alpha, h.n, beta, f_norm, m)?;
            let ratio = if rhs > 0.0 {
                u.abs() / rhs
            } else if u == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            best = best.max(ratio);
        }
        Ok(best)
    }

    fn rows(&self, kn: Option<f64>, hedberg: bool) -> Result<Vec<ReportRow>> {
        let refined = if self.config.refine { Some(self.grid.refined()?) } else { None };
        let ladder = self.maximal_refined_ladder();
        let is_t6 = self.theorem() == TheoremId::T6;
        self.corpus
            .par_iter()
            .map(|spec| {
                let base = self.measure(spec, &self.grid, kn, hedberg)?;
                let fine = match (&refined, base.ratio) {
                    (Some(g), Some(_)) => Some(self.measure(spec, g, kn, hedberg)?),
                    _ => None,
                };
                let ladder_ratio = match (is_t6, base.ratio) {
                    (true, Some(_)) => {
                        let f = spec.sample(&self.grid)?;
                        let mf = maximal(&f, &ladder)?;
                        Some(self.output.norm(&mf, &self.config.scan)? / base.input)
                    }
                    _ => None,
                };
                Ok(ReportRow {
                    id: spec.label(),
                    degenerate: base.ratio.is_none(),
                    input_norm: base.input,
                    output_norm: base.output,
                    kernel_norm: kn,
                    ratio: base.ratio,
                    refined_ratio: fine.as_ref().and_then(|m| m.ratio),
                    ladder_ratio,
                    hedberg_constant: base.hedberg,
                    refined_hedberg_constant: fine.and_then(|m| m.hedberg),
                })
            })
            .collect()
    }

    fn report(&self, kernel_norm: Option<KernelNormEstimate>, rows: Vec<ReportRow>) -> Result<VerificationReport> {
        let mut notes = Vec::new();
        if self.theorem() == TheoremId::T6 {
            notes.push("output growth function ψ taken equal to φ".to_string());
            notes.push("maximal function is the uncentred one over balls containing the point".to_string());
        }
        if matches!(self.theorem(), TheoremId::T7 | TheoremId::T9 | TheoremId::T11) {
            notes.push("output growth function ψ = φ^(p1/p2)".to_string());
        }
        let grid = self.grid;
        let environment = Environment {
            grid: grid.into(),
            refined_grid: if self.config.refine { Some(grid.refined()?.into()) } else { None },
            scan_radii: self.config.scan.radii(&grid)?.len(),
            scan_centers: self.config.scan.centers(&grid).len(),
            maximal_ladder: self.config.maximal.ladder(&grid)?.len(),
            seed: None,
        };
        let mut report = VerificationReport {
            experiment: self.theorem().to_string(),
            config: self.config.clone(),
            input_space: self.input.clone(),
            output_space: self.output.clone(),
            kernel_norm,
            rows,
            aggregate: Aggregate::default(),
            environment,
            notes,
        };
        report.recompute();
        Ok(report)
    }
}

struct Measured {
    input: f64,
    output: f64,
    ratio: Option<f64>,
    hedberg: Option<f64>,
}

/// One corpus function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    /// Zero input norm: reported but not counted.
    pub degenerate: bool,
    pub input_norm: f64,
    pub output_norm: f64,
    pub kernel_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub refined_ratio: Option<f64>,
    /// T6 only: ratio with the maximal radius ladder refined.
    pub ladder_ratio: Option<f64>,
    pub hedberg_constant: Option<f64>,
    pub refined_hedberg_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    /// `None` when the check is finiteness only.
    pub limit: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Largest non-degenerate ratio.
    pub c_emp: Option<f64>,
    pub c_emp_refined: Option<f64>,
    pub refinement_drift: Option<f64>,
    pub ladder_drift: Option<f64>,
    pub hedberg_constant: Option<f64>,
    pub hedberg_constant_refined: Option<f64>,
    pub hedberg_drift: Option<f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub grid: GridSpec,
    pub refined_grid: Option<GridSpec>,
    pub scan_radii: usize,
    pub scan_centers: usize,
    pub maximal_ladder: usize,
    /// No experiment draws random numbers.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub input_space: SpaceSpec,
    pub output_space: SpaceSpec,
    pub kernel_norm: Option<KernelNormEstimate>,
    pub rows: Vec<ReportRow>,
    pub aggregate: Aggregate,
    pub environment: Environment,
    pub notes: Vec<String>,
}

fn max_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

fn drift(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if a > 0.0 => Some((b - a).abs() / a),
        _ => None,
    }
}

impl VerificationReport {
    /// Rebuilds the aggregate from the rows and tolerances.
    pub fn recompute(&mut self) {
        let live = || self.rows.iter().filter(|r| !r.degenerate);
        let c_emp = max_of(live().map(|r| r.ratio));
        let c_ref = max_of(live().map(|r| r.refined_ratio));
        let c_ladder = max_of(live().map(|r| r.ladder_ratio));
        let ch = max_of(live().map(|r| r.hedberg_constant));
        let ch_ref = max_of(live().map(|r| r.refined_hedberg_constant));
        let tol = self.config.tolerances;
        let mut checks = Vec::new();
        let finite = |v: Option<f64>| v.is_some_and(f64::is_finite);
        let mut push = |name: &str, value: Option<f64>, limit: Option<f64>, pass: bool| {
            checks.push(Check { name: name.to_string(), value, limit, pass })
        };
        let refine = self.config.refine;
        let theorem = self.config.hypothesis.theorem;
        if theorem == TheoremId::T4 {
            push("young ratio", c_emp, Some(tol.young_ratio), c_emp.is_some_and(|c| c <= tol.young_ratio));
        } else {
            push("C_emp finite", c_emp, None, finite(c_emp));
        }
        let refinement_drift = drift(c_emp, c_ref);
        if refine && theorem != TheoremId::T4 {
            push("refinement drift", refinement_drift, Some(tol.drift), refinement_drift.is_some_and(|d| d < tol.drift));
        }
        let ladder_drift = drift(c_emp, c_ladder);
        if theorem == TheoremId::T6 {
            push("ladder drift", ladder_drift, Some(tol.drift), ladder_drift.is_some_and(|d| d < tol.drift));
        }
        let hedberg_drift = drift(ch, ch_ref);
        if matches!(theorem, TheoremId::T7 | TheoremId::T9 | TheoremId::T11) {
            push("hedberg constant finite", ch, None, finite(ch));
            if refine {
                push("hedberg drift", hedberg_drift, Some(tol.drift), hedberg_drift.is_some_and(|d| d < tol.drift));
            }
        }
        let pass = checks.iter().all(|c| c.pass);
        self.aggregate = Aggregate {
            c_emp,
            c_emp_refined: c_ref,
            refinement_drift,
            ladder_drift,
            hedberg_constant: ch,
            hedberg_constant_refined: ch_ref,
            hedberg_drift,
            checks,
            pass,
        };
    }

    /// Parses a report and recomputes its aggregate from the rows.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut r: Self = serde_json::from_str(s)?;
        r.recompute();
        Ok(r)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per corpus function.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        writeln!(
            w,
            "id,degenerate,input_norm,output_norm,kernel_norm,ratio,refined_ratio,ladder_ratio,hedberg_constant,refined_hedberg_constant"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "\"{}\",{},{:e},{:e},{},{},{},{},{},{}",
                r.id.replace('"', "'"),
                r.degenerate,
                r.input_norm,
                r.output_norm,
                opt(r.kernel_norm),
                opt(r.ratio),
                opt(r.refined_ratio),
                opt(r.ladder_ratio),
                opt(r.hedberg_constant),
                opt(r.refined_hedberg_constant)
            )?;
        }
        Ok(())
    }
}

fn expect_theorem(exp: &Experiment, allowed: &[TheoremId]) -> Result<()> {
    if allowed.contains(&exp.theorem()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("experiment for {} passed to the wrong runner", exp.theorem())))
    }
}

/// `‖I f‖_q / (‖K‖_t ‖f‖_p)` over the corpus; passes when every ratio is at
/// most the Young tolerance.
pub fn verify_lebesgue(exp: &Experiment) -> Result<VerificationReport> {
    expect_theorem(exp, &[TheoremId::T4])?;
    operator_experiment(exp, false)
}

/// Classical Morrey bound with the `L^t` kernel norm; passes when the
/// empirical constant is finite and stable under refinement.
pub fn verify_morrey(exp: &Experiment) -> Result<VerificationReport> {
    expect_theorem(exp, &[TheoremId::T5])?;
    operator_experiment(exp, false)
}

/// `‖Mf‖_{p,φ} / ‖f‖_{p,φ}`; passes when finite and stable under both grid
/// and ladder refinement.
pub fn verify_maximal(exp: &Experiment) -> Result<VerificationReport> {
    expect_theorem(exp, &[TheoremId::T6])?;
    let rows = exp.rows(None, false)?;
    exp.report(None, rows)
}

/// Generalized Morrey bounds plus the pointwise Hedberg inequality.
pub fn verify_gen_morrey(exp: &Experiment) -> Result<VerificationReport> {
    expect_theorem(exp, &[TheoremId::T7, TheoremId::T9, TheoremId::T11])?;
    operator_experiment(exp, true)
}

fn operator_experiment(exp: &Experiment, hedberg: bool) -> Result<VerificationReport> {
    let est = exp.kernel_norm()?;
    let kn = est.as_ref().map(|e| e.finite()).transpose()?;
    let rows = exp.rows(kn, hedberg)?;
    exp.report(est, rows)
}

/// Kernel norms of the three generalized Morrey statements side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub kernel: KernelParams,
    pub s: f64,
    pub t: f64,
    pub t1: f64,
    pub lebesgue: f64,
    pub morrey: f64,
    pub generalized: f64,
    /// `ω_n^(1/s-1/t)`: Hölder constant of `‖K‖_{L^{s,t}} ≤ c‖K‖_{L^t}`.
    pub holder_constant: f64,
    /// `‖K‖_{L^{t,t}}`, equal to `‖K‖_{L^t}` in exact arithmetic.
    pub morrey_tt: f64,
    pub equality_rel_error: f64,
    pub strict: bool,
    pub dominated: bool,
    pub equality: bool,
    /// `C_emp · kernel norm` per statement when a corpus run was requested.
    pub bounds: Vec<TheoremBound>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBound {
    pub theorem: TheoremId,
    pub kernel_norm: f64,
    pub c_emp: Option<f64>,
    pub product: Option<f64>,
}

/// Relative slack allowed in `‖K‖_{L^{t,t}} = ‖K‖_{L^t}`.
pub const EQUALITY_TOL: f64 = 1e-6;

/// Orders `‖K‖_{L^{s,σ}} < ‖K‖_{L^{s,t}} ≤ ω_n^(1/s-1/t)‖K‖_{L^t}` with
/// `σ = composite(t, t1)`. With `corpus = Some(base)` the T7, T9 and T11
/// experiments are also run on `base` (its theorem field is overridden) and
/// the products `C_emp · kernel norm` reported.
pub fn compare_bounds(
    kp: &KernelParams,
    s: f64,
    t: f64,
    t1: f64,
    corpus: Option<&ExperimentConfig>,
) -> Result<BoundComparison> {
    let mut v = Vec::new();
    let (lo, hi) = crate::params::admissible_t_interval(kp)?;
    if !(t > lo && t < hi) {
        v.push(format!("t = {t} outside ({lo}, {hi})"));
    }
    if !(t1 > t) {
        v.push(format!("t1 = {t1} must exceed t = {t}"));
    }
    if !(1.0 <= s && s <= t) {
        v.push(format!("s = {s} must satisfy 1 ≤ s ≤ t"));
    }
    if !v.is_empty() {
        return Err(Error::Hypothesis(v));
    }
    let spec = KernelSpec::new(*kp);
    let n = kp.n();
    let lebesgue = spec.lebesgue_norm(LebesgueExponent::new(t)?).finite()?;
    let morrey = spec.morrey_norm(s, &MorreyScale::Classical { q: t })?.finite()?;
    let sigma = GrowthFunction::composite(n, t, t1)?;
    let generalized = spec.morrey_norm(s, &MorreyScale::Generalized { phi: sigma })?.finite()?;
    let morrey_tt = spec.morrey_norm(t, &MorreyScale::Classical { q: t })?.finite()?;
    let holder_constant = ball_volume(n).powf(1.0 / s - 1.0 / t);
    let equality_rel_error = (morrey_tt - lebesgue).abs() / lebesgue;
    let strict = generalized < morrey;
    let dominated = morrey <= holder_constant * lebesgue * (1.0 + 1e-12);
    let equality = equality_rel_error <= EQUALITY_TOL;
    let mut bounds = Vec::new();
    if let Some(base) = corpus {
        for (theorem, kn) in [(TheoremId::T7, lebesgue), (TheoremId::T9, morrey), (TheoremId::T11, generalized)] {
            let mut cfg = base.clone();
            cfg.hypothesis.theorem = theorem;
            cfg.hypothesis.n = n;
            cfg.hypothesis.alpha = kp.alpha();
            cfg.hypothesis.gamma = kp.gamma();
            cfg.hypothesis.t = Some(t);
            cfg.hypothesis.s = Some(s);
            cfg.hypothesis.t1 = Some(t1);
            cfg.sigma = None;
            let report = Experiment::new(cfg)?.run()?;
            let c_emp = report.aggregate.c_emp;
            bounds.push(TheoremBound { theorem, kernel_norm: kn, c_emp, product: c_emp.map(|c| c * kn) });
        }
    }
    Ok(BoundComparison {
        kernel: *kp,
        s,
        t,
        t1,
        lebesgue,
        morrey,
        generalized,
        holder_constant,
        morrey_tt,
        equality_rel_error,
        strict,
        dominated,
        equality,
        bounds,
        pass: strict && dominated && equality,
    })
}

/// Both Hölder inequalities for one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionRow {
    pub id: String,
    /// `‖f‖_{L^q}`
    pub lebesgue_q: f64,
    /// `‖f‖_{L^{p,q}}`
    pub morrey_pq: f64,
    /// `‖f‖_{L^{1,q}}`
    pub morrey_1q: f64,
    /// `‖f‖_{L^{p,q}} ≤ c_upper ‖f‖_{L^q}`
    pub upper_holds: bool,
    /// `‖f‖_{L^{1,q}} ≤ c_lower ‖f‖_{L^{p,q}}`
    pub lower_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub grid: GridSpec,
    pub p: f64,
    pub q: f64,
    /// Ball-measure constant `c_n`: `ω_n` in 1-D, otherwise the largest
    /// discrete ball measure over `rⁿ` on the scan ladder (at least `ω_n`).
    pub measure_constant: f64,
    /// `c_n^(1/p-1/q)`
    pub c_upper: f64,
    /// `c_n^(1-1/p)`
    pub c_lower: f64,
    pub rows: Vec<InclusionRow>,
    pub pass: bool,
}

/// Checks `‖f‖_{L^{p,q}} ≤ c^(1/p-1/q)‖f‖_{L^q}` and
/// `‖f‖_{L^{1,q}} ≤ c^(1-1/p)‖f‖_{L^{p,q}}` for every corpus function, all
/// norms taken on the same scan.
pub fn verify_inclusion(
    corpus: &[TestFunctionSpec],
    grid: &Grid,
    p: f64,
    q: f64,
    scan: &ScanConfig,
    tol: f64,
) -> Result<InclusionReport> {
    if !(1.0 <= p && p <= q) {
        return Err(Error::InvalidParameter(format!("inclusion needs 1 ≤ p ≤ q (p = {p}, q = {q})")));
    }
    let n = grid.n();
    let omega = ball_volume(n);
    let measure_constant = if n == 1 {
        omega
    } else {
        scan.radii(grid)?
            .iter()
            .map(|&r| lattice_count(n, grid.h(), r) as f64 * grid.cell_volume() / r.powi(n as i32))
            .fold(omega, f64::max)
    };
    let c_upper = measure_constant.powf(1.0 / p - 1.0 / q);
    let c_lower = measure_constant.powf(1.0 - 1.0 / p);
    let rows = corpus
        .par_iter()
        .map(|spec| {
            let f = spec.sample(grid)?;
            let lebesgue_q = norms::lebesgue_norm_f(&f, q)?.value;
            let morrey_pq = norms::morrey_norm(&f, p, q, scan)?.value;
            let morrey_1q = norms::morrey_norm(&f, 1.0, q, scan)?.value;
            Ok(InclusionRow {
                id: spec.label(),
                lebesgue_q,
                morrey_pq,
                morrey_1q,
                upper_holds: morrey_pq <= c_upper * lebesgue_q * (1.0 + tol),
                lower_holds: morrey_1q <= c_lower * morrey_pq * (1.0 + tol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.upper_holds && r.lower_holds);
    Ok(InclusionReport { grid: (*grid).into(), p, q, measure_constant, c_upper, c_lower, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(theorem: TheoremId) -> ExperimentConfig {
        let mut c = ExperimentConfig::default_for(theorem);
        c.grid = Some(GridSpec { n: 1, h: 1.0 / 64.0, extent: 4.0 });
        c
    }

    #[test]
    fn defaults_satisfy_their_hypotheses() {
        for id in TheoremId::ALL {
            let c = ExperimentConfig::default_for(id);
            assert!(c.hypothesis.violations().is_empty(), "{id}: {:?}", c.hypothesis.violations());
        }
        let t7 = ExperimentConfig::default_for(TheoremId::T7);
        assert!((t7.hypothesis.p2().unwrap() - 9.0).abs() < 1e-12);
        let t11 = ExperimentConfig::default_for(TheoremId::T11);
        assert!((t11.hypothesis.p2().unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn config_round_trips_through_json() {
        let exp = Experiment::new(ExperimentConfig::default_for(TheoremId::T11)).unwrap();
        let json = serde_json::to_string(exp.config()).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, exp.config());
        let flat: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(flat["theorem"], "T11");
        assert_eq!(flat["p1"], 1.5);
    }

    #[test]
    fn t_outside_interval_reports_divergence() {
        let mut c = ExperimentConfig::default_for(TheoremId::T4);
        c.hypothesis.t = Some(2.5);
        assert!(matches!(Experiment::new(c), Err(Error::Divergent(_))));
        let mut c = ExperimentConfig::default_for(TheoremId::T4);
        c.hypothesis.p1 = Some(0.5);
        assert!(matches!(Experiment::new(c), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn uncertified_phi_is_refused_unless_forced() {
        let mut c = ExperimentConfig::default_for(TheoremId::T6);
        c.phi = Some(GrowthFunction::power(1.0, -0.9).unwrap());
        assert!(matches!(Experiment::new(c.clone()), Err(Error::Uncertified(_))));
        c.allow_uncertified = true;
        assert!(Experiment::new(c).is_ok());
    }

    #[test]
    fn zero_function_is_degenerate_and_not_counted() {
        let mut c = small(TheoremId::T4);
        c.corpus = Some(vec![TestFunctionSpec::Zero, TestFunctionSpec::ball(&[0.0], 1.0)]);
        let r = Experiment::new(c).unwrap().run().unwrap();
        assert!(r.rows[0].degenerate && r.rows[0].ratio.is_none());
        assert_eq!(r.aggregate.c_emp, r.rows[1].ratio);
    }

    #[test]
    fn young_ratio_below_one_on_small_grid() {
        let r = Experiment::new(small(TheoremId::T4)).unwrap().run().unwrap();
        assert!(r.aggregate.pass, "{:?}", r.aggregate);
        for row in &r.rows {
            assert!(row.ratio.unwrap() <= 1.05, "{}: {:?}", row.id, row.ratio);
        }
    }

    #[test]
    fn maximal_ratio_at_least_one_for_indicator() {
        let mut c = small(TheoremId::T6);
        c.corpus = Some(vec![TestFunctionSpec::ball(&[0.0], 1.0), TestFunctionSpec::Zero]);
        let r = Experiment::new(c).unwrap().run().unwrap();
        assert!(r.rows[0].ratio.unwrap() >= 1.0);
        assert!(r.rows[1].degenerate);
    }

    #[test]
    fn recompute_on_load_restores_c_emp() {
        let mut c = small(TheoremId::T5);
        c.refine = false;
        let r = Experiment::new(c).unwrap().run().unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        v["aggregate"]["c_emp"] = serde_json::json!(123.0);
        let back = VerificationReport::from_json(&v.to_string()).unwrap();
        assert_eq!(back.aggregate.c_emp, r.aggregate.c_emp);
        assert_eq!(back, r);
    }

    #[test]
    fn scaling_the_corpus_leaves_c_emp_unchanged() {
        let mut c = small(TheoremId::T7);
        c.refine = false;
        let base = vec![TestFunctionSpec::ball(&[0.0], 1.0)];
        let scaled =
            vec![TestFunctionSpec::StepSum { steps: vec![Step { center: vec![0.0], radius: 1.0, weight: 8.0 }] }];
        c.corpus = Some(base);
        let a = Experiment::new(c.clone()).unwrap().run().unwrap();
        c.corpus = Some(scaled);
        let b = Experiment::new(c).unwrap().run().unwrap();
        let (x, y) = (a.aggregate.c_emp.unwrap(), b.aggregate.c_emp.unwrap());
        assert!((x - y).abs() <= 1e-12 * x, "{x} vs {y}");
        let (x, y) = (a.aggregate.hedberg_constant.unwrap(), b.aggregate.hedberg_constant.unwrap());
        assert!((x - y).abs() <= 1e-12 * x, "{x} vs {y}");
    }

    #[test]
    fn compare_orders_the_three_norms() {
        let kp = KernelParams::new(1, 0.5, 1.0).unwrap();
        let c = compare_bounds(&kp, 1.0, 1.2, 2.4, None).unwrap();
        assert!(c.generalized < c.morrey && c.morrey <= c.holder_constant * c.lebesgue);
        assert!(c.equality_rel_error < EQUALITY_TOL, "{}", c.equality_rel_error);
        assert!(c.pass);
        // σ → 2 r^(-n/t) as t1 → ∞, halving the classical norm.
        let far = compare_bounds(&kp, 1.0, 1.2, 1e9, None).unwrap();
        assert!((far.generalized / far.morrey - 0.5).abs() < 1e-6, "{}", far.generalized / far.morrey);
        assert!(matches!(compare_bounds(&kp, 1.0, 1.2, 1.1, None), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn inclusion_ball_indicator_example() {
        let g = Grid::new(1, 1.0 / 128.0, 4.0).unwrap();
        let corpus = vec![TestFunctionSpec::ball(&[0.0], 1.0)];
        let r = verify_inclusion(&corpus, &g, 1.0, 2.0, &ScanConfig::default(), 1e-12).unwrap();
        assert!((r.c_upper - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.pass);
        let r = verify_inclusion(&corpus, &g, 2.0, 2.0, &ScanConfig::default(), 1e-12).unwrap();
        assert_eq!(r.c_upper, 1.0);
        assert!(r.pass);
    }
}
