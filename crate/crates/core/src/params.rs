//! Scalar parameters of the kernel and of the boundedness statements, with the
//! exponent arithmetic that links them.
//!
//! Every strict inequality is tested exactly on the supplied values; a tuple
//! sitting on a boundary is reported as a violation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::GrowthFunction;

/// Dimension `n`, smoothness `alpha` and decay `gamma` of the Bessel-Riesz
/// kernel `|x|^(alpha-n) / (1+|x|)^gamma`.
///
/// `gamma = 0` (the Riesz kernel) is only produced by [`KernelParams::riesz`]
/// or by an explicit `"gamma": 0` in serialized input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelParams")]
pub struct KernelParams {
    n: usize,
    alpha: f64,
    gamma: f64,
}

#[derive(Deserialize)]
struct RawKernelParams {
    n: usize,
    alpha: f64,
    gamma: f64,
}

impl TryFrom<RawKernelParams> for KernelParams {
    type Error = Error;

    fn try_from(raw: RawKernelParams) -> Result<Self> {
        if raw.gamma == 0.0 {
            KernelParams::riesz(raw.n, raw.alpha)
        } else {
            KernelParams::new(raw.n, raw.alpha, raw.gamma)
        }
    }
}

impl KernelParams {
    pub fn new(n: usize, alpha: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive (got {gamma}); use KernelParams::riesz for gamma = 0"
            )));
        }
        Self::checked(n, alpha, gamma)
    }

    /// The Riesz kernel `|x|^(alpha-n)`, i.e. `gamma = 0`.
    pub fn riesz(n: usize, alpha: f64) -> Result<Self> {
        Self::checked(n, alpha, 0.0)
    }

    fn checked(n: usize, alpha: f64, gamma: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!("dimension n = {n} not in 1..=3")));
        }
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must satisfy 0 < alpha < n = {n}"
            )));
        }
        Ok(Self { n, alpha, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_riesz(&self) -> bool {
        self.gamma == 0.0
    }

    /// Same `n` and `alpha` with a different decay; `gamma = 0` allowed.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if gamma == 0.0 {
            Self::riesz(self.n, self.alpha)
        } else {
            Self::new(self.n, self.alpha, gamma)
        }
    }
}

/// A Lebesgue exponent `t ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LebesgueExponent(f64);

impl LebesgueExponent {
    pub fn new(t: f64) -> Result<Self> {
        if t >= 1.0 {
            Ok(Self(t))
        } else {
            Err(Error::InvalidParameter(format!("Lebesgue exponent t = {t} must be ≥ 1")))
        }
    }

    pub fn infinite() -> Self {
        Self(f64::INFINITY)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// `t' = t/(t-1)`, with `1' = ∞` and `∞' = 1`.
    pub fn conjugate(&self) -> Self {
        Self(conjugate(self.0))
    }
}

pub fn conjugate(t: f64) -> f64 {
    if t == 1.0 {
        f64::INFINITY
    } else if t.is_infinite() {
        1.0
    } else {
        t / (t - 1.0)
    }
}

/// Exponent `q` with `1/q + 1 = 1/p + 1/t` (Young's inequality).
pub fn young_exponent(p: f64, t: f64) -> Result<f64> {
    let inv = 1.0 / p + 1.0 / t - 1.0;
    if inv > 0.0 {
        Ok(1.0 / inv)
    } else {
        Err(Error::InvalidParameter(format!(
            "1/p + 1/t - 1 = {inv} must be positive (p = {p}, t = {t})"
        )))
    }
}

/// The open interval of `t` for which the kernel lies in `L^t`:
/// `(n/(n+gamma-alpha), n/(n-alpha))`.
pub fn admissible_t_interval(kp: &KernelParams) -> Result<(f64, f64)> {
    if kp.is_riesz() {
        return Err(Error::InvalidParameter(
            "the Riesz kernel (gamma = 0) lies in no L^t: the admissible interval is empty".into(),
        ));
    }
    let n = kp.n as f64;
    Ok((n / (n + kp.gamma - kp.alpha), n / (n - kp.alpha)))
}

/// Which boundedness statement a parameter tuple is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Young-type bound on Lebesgue spaces.
    T4,
    /// Classical Morrey spaces with the `L^t` kernel norm.
    T5,
    /// Maximal operator on generalized Morrey spaces.
    T6,
    /// Generalized Morrey spaces, `L^t` kernel norm.
    T7,
    /// Generalized Morrey spaces, classical Morrey kernel norm `L^{s,t}`.
    T9,
    /// Generalized Morrey spaces, generalized Morrey kernel norm `L^{s,σ}`.
    T11,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [Self::T4, Self::T5, Self::T6, Self::T7, Self::T9, Self::T11];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::T4 => "T4",
            Self::T5 => "T5",
            Self::T6 => "T6",
            Self::T7 => "T7",
            Self::T9 => "T9",
            Self::T11 => "T11",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem id {s:?}")))
    }
}

/// Output exponent `p2` of the generalized Morrey bounds.
///
/// T7/T9: `beta·p1/(alpha+beta)`; T11: `beta·p1/(beta+n-alpha)`.
pub fn derived_p2(theorem: TheoremId, p1: f64, beta: f64, alpha: f64, n: usize) -> Result<f64> {
    let denom = match theorem {
        TheoremId::T7 | TheoremId::T9 => {
            if alpha + beta >= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha + beta = {} must be negative",
                    alpha + beta
                )));
            }
            alpha + beta
        }
        TheoremId::T11 => {
            let d = beta + n as f64 - alpha;
            if d >= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "beta + n - alpha = {d} must be negative for a positive p2"
                )));
            }
            d
        }
        other => {
            return Err(Error::InvalidParameter(format!("{other} has no derived exponent p2")));
        }
    };
    Ok(beta * p1 / denom)
}

/// A parameter tuple together with the statement it is checked against.
///
/// Serializes as the flat object `{theorem, n, alpha, gamma, p1, q1, t, s, beta, t1}`;
/// fields a statement does not use may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremHypothesis {
    pub theorem: TheoremId,
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
}

/// One failed inequality of a hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated ({})", self.constraint, self.detail)
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn require(&mut self, holds: bool, constraint: &str, detail: impl FnOnce() -> String) {
        if !holds {
            self.out.push(Violation { constraint: constraint.to_string(), detail: detail() });
        }
    }

    fn field(&mut self, value: Option<f64>, name: &str) -> Option<f64> {
        if value.is_none() {
            self.out.push(Violation {
                constraint: format!("{name} present"),
                detail: format!("{name} is required by this statement"),
            });
        }
        value
    }
}

impl TheoremHypothesis {
    pub fn new(theorem: TheoremId, kp: &KernelParams) -> Self {
        Self {
            theorem,
            n: kp.n(),
            alpha: kp.alpha(),
            gamma: kp.gamma(),
            p1: None,
            q1: None,
            t: None,
            s: None,
            beta: None,
            t1: None,
        }
    }

    pub fn kernel(&self) -> Result<KernelParams> {
        KernelParams::new(self.n, self.alpha, self.gamma)
    }

    /// `p2` for the generalized Morrey statements, `None` otherwise or when
    /// `p1`/`beta` are missing.
    pub fn p2(&self) -> Option<f64> {
        match self.theorem {
            TheoremId::T7 | TheoremId::T9 | TheoremId::T11 => {
                derived_p2(self.theorem, self.p1?, self.beta?, self.alpha, self.n).ok()
            }
            _ => None,
        }
    }

    /// Every violated constraint of the selected statement; empty means the
    /// tuple is admissible.
    pub fn violations(&self) -> Vec<Violation> {
        let mut c = Checker { out: Vec::new() };
        let n = self.n as f64;
        let alpha = self.alpha;
        let gamma = self.gamma;

        c.require((1..=3).contains(&self.n), "1 ≤ n ≤ 3", || format!("n = {}", self.n));
        c.require(alpha > 0.0, "α > 0", || format!("α = {alpha}"));
        c.require(alpha < n, "α < n", || format!("α = {alpha}, n = {n}"));
        c.require(gamma > 0.0, "γ > 0", || format!("γ = {gamma}"));

        let t_interval = |c: &mut Checker, t: f64| {
            let lo = n / (n + gamma - alpha);
            let hi = n / (n - alpha);
            c.require(t > lo, "t > n/(n+γ−α)", || format!("t = {t}, n/(n+γ−α) = {lo}"));
            c.require(t < hi, "t < n/(n−α)", || format!("t = {t}, n/(n−α) = {hi}"));
        };

        match self.theorem {
            TheoremId::T4 => {
                let t = c.field(self.t, "t");
                let p = c.field(self.p1, "p₁");
                if let Some(t) = t {
                    t_interval(&mut c, t);
                }
                if let (Some(t), Some(p)) = (t, p) {
                    let tc = conjugate(t);
                    c.require(p >= 1.0, "p₁ ≥ 1", || format!("p₁ = {p}"));
                    c.require(p < tc, "p₁ < t′", || format!("p₁ = {p}, t′ = {tc}"));
                }
            }
            TheoremId::T5 => {
                let t = c.field(self.t, "t");
                let p = c.field(self.p1, "p₁");
                let q = c.field(self.q1, "q₁");
                if let Some(t) = t {
                    t_interval(&mut c, t);
                }
                if let (Some(t), Some(p), Some(q)) = (t, p, q) {
                    let tc = conjugate(t);
                    c.require(p > 1.0, "p₁ > 1", || format!("p₁ = {p}"));
                    c.require(p < q, "p₁ < q₁", || format!("p₁ = {p}, q₁ = {q}"));
                    c.require(q < tc, "q₁ < t′", || format!("q₁ = {q}, t′ = {tc}"));
                }
            }
            TheoremId::T6 => {
                if let Some(p) = c.field(self.p1, "p₁") {
                    c.require(p > 1.0, "p₁ > 1", || format!("p₁ = {p}"));
                }
                c.field(self.beta, "β");
            }
            TheoremId::T7 | TheoremId::T9 => {
                let t = c.field(self.t, "t");
                let p = c.field(self.p1, "p₁");
                let beta = c.field(self.beta, "β");
                if let Some(t) = t {
                    t_interval(&mut c, t);
                }
                if let (Some(t), Some(p), Some(beta)) = (t, p, beta) {
                    let tc = conjugate(t);
                    let lo = -alpha * tc / p;
                    c.require(beta >= lo, "β ≥ −αt′/p₁", || format!("β = {beta}, −αt′/p₁ = {lo}"));
                    c.require(beta < -alpha, "β < −α", || format!("β = {beta}, −α = {}", -alpha));
                    c.require(p > 1.0, "p₁ > 1", || format!("p₁ = {p}"));
                    c.require(p < tc, "p₁ < t′", || format!("p₁ = {p}, t′ = {tc}"));
                }
                if self.theorem == TheoremId::T9 {
                    if let (Some(s), Some(t)) = (c.field(self.s, "s"), t) {
                        c.require(s >= 1.0, "s ≥ 1", || format!("s = {s}"));
                        c.require(s <= t, "s ≤ t", || format!("s = {s}, t = {t}"));
                    }
                }
            }
            TheoremId::T11 => {
                let p = c.field(self.p1, "p₁");
                let beta = c.field(self.beta, "β");
                let s = c.field(self.s, "s");
                if let (Some(p), Some(beta)) = (p, beta) {
                    c.require(beta > -n / p, "β > −n/p₁", || format!("β = {beta}, −n/p₁ = {}", -n / p));
                    c.require(beta < -alpha, "β < −α", || format!("β = {beta}, −α = {}", -alpha));
                    // p₂ = βp₁/(β+n−α) is positive only below α − n.
                    c.require(beta < alpha - n, "β < α−n", || format!("β = {beta}, α−n = {}", alpha - n));
                }
                if let Some(p) = p {
                    c.require(p > 1.0, "p₁ > 1", || format!("p₁ = {p}"));
                    c.require(p < n / alpha, "p₁ < n/α", || format!("p₁ = {p}, n/α = {}", n / alpha));
                }
                if let Some(s) = s {
                    let hi = n / (n - alpha);
                    c.require(s >= 1.0, "s ≥ 1", || format!("s = {s}"));
                    c.require(s < hi, "s < n/(n−α)", || format!("s = {s}, n/(n−α) = {hi}"));
                }
                if let (Some(t), Some(t1)) = (self.t, self.t1) {
                    c.require(t1 > t, "t₁ > t", || format!("t₁ = {t1}, t = {t}"));
                }
            }
        }
        c.out
    }

    /// `Ok(())` when admissible, otherwise [`Error::Hypothesis`] listing every
    /// violation.
    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Hypothesis(v.iter().map(ToString::to_string).collect()))
        }
    }
}

/// Free-function form of [`TheoremHypothesis::violations`].
pub fn validate_hypothesis(h: &TheoremHypothesis) -> Vec<Violation> {
    h.violations()
}

/// Second index of a Morrey space: a power `q` (classical `L^{p,q}`) or a
/// growth function `φ` (generalized `L^{p,φ}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorreyScale {
    Classical { q: f64 },
    Generalized { phi: GrowthFunction },
}

impl MorreyScale {
    /// The growth function `r^(-n/q)` or `φ` itself.
    pub fn growth(&self, n: usize) -> GrowthFunction {
        match self {
            Self::Classical { q } => GrowthFunction::classical(n, *q),
            Self::Generalized { phi } => phi.clone(),
        }
    }
}

/// The pair `(p, q)` or `(p, φ)` naming a Morrey space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyExponents {
    pub p: f64,
    pub scale: MorreyScale,
}

impl MorreyExponents {
    pub fn classical(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && q >= p) {
            return Err(Error::InvalidParameter(format!("classical Morrey space needs 1 ≤ p ≤ q (p = {p}, q = {q})")));
        }
        Ok(Self { p, scale: MorreyScale::Classical { q } })
    }

    pub fn generalized(p: f64, phi: GrowthFunction) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} must be ≥ 1")));
        }
        Ok(Self { p, scale: MorreyScale::Generalized { phi } })
    }
}
