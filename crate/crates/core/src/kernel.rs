//! The Bessel-Riesz kernel `K(x) = |x|^(α-n) / (1+|x|)^γ` and its norms.
//!
//! All integrals of `K^s` are reduced to one-dimensional radial integrals
//! `∫ r^(a-1) (1+r)^(-c) dr` (with `a = (α-n)s + n`, `c = γs`) times the area of
//! the unit sphere. Near the origin the substitution `u = r^a` removes the
//! singularity; at infinity `v = r^(-(c-a))` maps the tail onto `(0, 1]`.
//! Divergence is always decided from the signs of these exponents, never from
//! floating-point overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::GrowthFunction;
use crate::numeric::{ball_volume, binary_split, integrate_adaptive, pairwise_sum, sphere_area};
use crate::params::{KernelParams, LebesgueExponent, MorreyScale};

const QUAD_REL_TOL: f64 = 1e-13;
const DYADIC_REL_TOL: f64 = 1e-10;
const LADDER_REL_TOL: f64 = 1e-9;
const EXPONENT_EPS: f64 = 1e-12;
/// Default radius ladder `2^j`, `j ∈ [-30, 30]`.
pub const DEFAULT_LADDER: (i32, i32) = (-30, 30);
const LADDER_LIMIT: i32 = 200;

/// `∫_0^x r^(a-1)(1+r)^(-c) dr` for `0 < x ≤ 1`, `a > 0`.
fn radial_head(a: f64, c: f64, x: f64) -> f64 {
    if c == 0.0 {
        return x.powf(a) / a;
    }
    let inv_a = 1.0 / a;
    let q = integrate_adaptive(|u| (1.0 + x * u.powf(inv_a)).powf(-c), 0.0, 1.0, 0.0, QUAD_REL_TOL);
    x.powf(a) / a * q.value
}

/// `∫_x^∞ r^(a-1)(1+r)^(-c) dr` for `x ≥ 1`, `c > a`.
fn radial_tail(a: f64, c: f64, x: f64) -> f64 {
    let b = c - a;
    let inv_b = 1.0 / b;
    let q = integrate_adaptive(|v| (1.0 + v.powf(inv_b) / x).powf(-c), 0.0, 1.0, 0.0, QUAD_REL_TOL);
    x.powf(-b) / b * q.value
}

/// `∫_lo^hi r^(a-1)(1+r)^(-c) dr` for `1 ≤ lo < hi < ∞`, via `r = e^u`.
fn radial_middle(a: f64, c: f64, lo: f64, hi: f64) -> f64 {
    let (ul, uh) = (lo.ln(), hi.ln());
    // Unit-length pieces in log-radius keep each panel well resolved.
    let pieces = ((uh - ul).ceil() as usize).max(1);
    let width = (uh - ul) / pieces as f64;
    let parts: Vec<f64> = (0..pieces)
        .map(|i| {
            let a0 = ul + i as f64 * width;
            let b0 = if i + 1 == pieces { uh } else { a0 + width };
            integrate_adaptive(|u| (u * a).exp() * (1.0 + u.exp()).powf(-c), a0, b0, 0.0, QUAD_REL_TOL).value
        })
        .collect();
    pairwise_sum(&parts)
}

/// `∫_0^R r^(a-1)(1+r)^(-c) dr`; `R = ∞` allowed when `c > a`.
fn radial_integral(a: f64, c: f64, radius: f64) -> f64 {
    debug_assert!(a > 0.0);
    if radius <= 1.0 {
        return radial_head(a, c, radius);
    }
    let head = radial_head(a, c, 1.0);
    if c > a {
        let tail = radial_tail(a, c, 1.0);
        if radius.is_infinite() {
            head + tail
        } else {
            head + (tail - radial_tail(a, c, radius))
        }
    } else {
        head + radial_middle(a, c, 1.0, radius)
    }
}

/// Which end of the radial integral fails to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divergence {
    /// Non-integrable (or unbounded) behaviour as `r → 0`.
    SmallRadius,
    /// Non-decaying behaviour as `r → ∞`.
    LargeRadius,
    Both,
}

impl Divergence {
    fn from_flags(small: bool, large: bool) -> Option<Self> {
        match (small, large) {
            (true, true) => Some(Self::Both),
            (true, false) => Some(Self::SmallRadius),
            (false, true) => Some(Self::LargeRadius),
            (false, false) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    DyadicSum,
    RadialQuadrature,
    ClosedForm,
}

/// The function space a kernel norm is taken in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpace {
    Lebesgue { t: f64 },
    Morrey { s: f64, t: f64 },
    GeneralizedMorrey { s: f64, sigma: GrowthFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelNormEstimate {
    pub space: KernelSpace,
    /// `None` when divergent.
    pub value: Option<f64>,
    pub divergent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<Divergence>,
    pub method: NormMethod,
    pub k_min: Option<i64>,
    pub k_max: Option<i64>,
    pub tail_bound: Option<f64>,
    /// Radius at which a ladder supremum was attained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_radius: Option<f64>,
}

impl KernelNormEstimate {
    fn divergent(space: KernelSpace, method: NormMethod, divergence: Divergence) -> Self {
        Self {
            space,
            value: None,
            divergent: true,
            divergence: Some(divergence),
            method,
            k_min: None,
            k_max: None,
            tail_bound: None,
            argmax_radius: None,
        }
    }

    /// The finite value, or [`Error::Divergent`].
    pub fn finite(&self) -> Result<f64> {
        self.value.ok_or_else(|| {
            Error::Divergent(format!(
                "{:?} diverges ({})",
                self.space,
                match self.divergence {
                    Some(Divergence::SmallRadius) => "small-radius end",
                    Some(Divergence::LargeRadius) => "large-radius end",
                    _ => "both ends",
                }
            ))
        })
    }
}

/// Outcome of checking `∫_0^R r^((α-n)s+n-1) dr ≤ C σ(R)^s R^n` on a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub holds: bool,
    /// Supremum of the ratio over the ladder.
    pub c_best: f64,
    pub argmax_radius: f64,
    /// Power-law exponent of the ratio as `R → 0` (must be ≥ 0).
    pub small_exponent: f64,
    /// Power-law exponent of the ratio as `R → ∞` (must be ≤ 0).
    pub large_exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub params: KernelParams,
}

impl KernelSpec {
    pub fn new(params: KernelParams) -> Self {
        Self { params }
    }

    fn n(&self) -> f64 {
        self.params.n() as f64
    }

    /// `K` as a function of `r = |x| > 0`.
    pub fn eval_radius(&self, r: f64) -> f64 {
        let kp = &self.params;
        let v = r.powf(kp.alpha() - self.n());
        if kp.is_riesz() {
            v
        } else {
            v / (1.0 + r).powf(kp.gamma())
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.params.n() {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, kernel dimension is {}",
                x.len(),
                self.params.n()
            )));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::Singular);
        }
        Ok(self.eval_radius(r))
    }

    /// Radial exponents `(a, c) = ((α-n)s + n, γs)` of `K^s`.
    fn exponents(&self, s: f64) -> (f64, f64) {
        ((self.params.alpha() - self.n()) * s + self.n(), self.params.gamma() * s)
    }

    /// `∫_{|x|<R} K(x)^s dx`.
    pub fn ball_integral(&self, s: f64, radius: f64) -> Result<f64> {
        let (a, c) = self.exponents(s);
        if a <= 0.0 {
            return Err(Error::Divergent(format!(
                "K^{s} is not locally integrable: (α-n)s+n = {a} ≤ 0"
            )));
        }
        if radius <= 0.0 {
            return Ok(0.0);
        }
        if radius.is_infinite() && c <= a {
            return Err(Error::Divergent(format!("K^{s} is not integrable at infinity")));
        }
        Ok(sphere_area(self.params.n()) * radial_integral(a, c, radius))
    }

    /// Where `∫ K^t` diverges, by exponent analysis.
    pub fn lebesgue_divergence(&self, t: f64) -> Option<Divergence> {
        let (a, c) = self.exponents(t);
        Divergence::from_flags(a <= 0.0, a - c >= 0.0)
    }

    /// `‖K‖_{L^t}` by radial quadrature, or the divergent flag with the end
    /// that fails.
    pub fn lebesgue_norm(&self, t: LebesgueExponent) -> KernelNormEstimate {
        let tv = t.value();
        let space = KernelSpace::Lebesgue { t: tv };
        if !t.is_finite() {
            // K is unbounded near the origin.
            return KernelNormEstimate::divergent(space, NormMethod::ClosedForm, Divergence::SmallRadius);
        }
        if let Some(d) = self.lebesgue_divergence(tv) {
            return KernelNormEstimate::divergent(space, NormMethod::RadialQuadrature, d);
        }
        let (a, c) = self.exponents(tv);
        let integral = sphere_area(self.params.n()) * radial_integral(a, c, f64::INFINITY);
        KernelNormEstimate {
            space,
            value: Some(integral.powf(1.0 / tv)),
            divergent: false,
            divergence: None,
            method: NormMethod::RadialQuadrature,
            k_min: None,
            k_max: None,
            tail_bound: None,
            argmax_radius: None,
        }
    }

    /// Bracketing constant `2^(|(α-n)t| + γt + n)` between one dyadic term and
    /// the integral of `K^t` over the matching shell.
    pub fn shell_factor(&self, t: f64) -> f64 {
        let kp = &self.params;
        2f64.powf(((kp.alpha() - self.n()) * t).abs() + kp.gamma() * t + self.n())
    }

    /// One dyadic term `|B_1|·ρ^((α-n)t+n)/(1+ρ)^(γt)` with `ρ = base·2^j`,
    /// evaluated in log space so that radii beyond the `f64` range are fine.
    fn dyadic_term(&self, t: f64, base: f64, j: i32) -> f64 {
        let (a, c) = self.exponents(t);
        let ln_rho = base.ln() + j as f64 * std::f64::consts::LN_2;
        let ln_1p = if ln_rho > 0.0 { ln_rho + (-ln_rho).exp().ln_1p() } else { ln_rho.exp().ln_1p() };
        ball_volume(self.params.n()) * (a * ln_rho - c * ln_1p).exp()
    }

    /// `(Σ_k |B_1|(2^k R)^((α-n)t+n)/(1+2^k R)^(γt))^(1/t)`, which is
    /// comparable to `‖K‖_{L^t}` within [`Self::shell_factor`]`^(1/t)`.
    ///
    /// The sum runs over `k_range` (relative to `R`; default: none) extended on
    /// each side until the geometric bound on the remaining tail drops below
    /// `1e-10` of the partial sum. Without an explicit range the summed set of
    /// radii depends only on `{2^k R}`, so `R` and `2R` give identical results.
    pub fn dyadic_sum_estimate(&self, t: f64, radius: f64, k_range: Option<(i32, i32)>) -> Result<KernelNormEstimate> {
        if !(radius > 0.0 && radius.is_normal()) {
            return Err(Error::InvalidParameter(format!("dyadic base radius R = {radius} must be positive")));
        }
        if t < 1.0 {
            return Err(Error::InvalidParameter(format!("t = {t} must be ≥ 1")));
        }
        let space = KernelSpace::Lebesgue { t };
        let (base, shift) = binary_split(radius);
        if let Some(d) = self.lebesgue_divergence(t) {
            let mut est = KernelNormEstimate::divergent(space, NormMethod::DyadicSum, d);
            if let Some((lo, hi)) = k_range {
                est.k_min = Some(lo as i64);
                est.k_max = Some(hi as i64);
            }
            return Ok(est);
        }

        // Work with absolute indices j: ρ_j = base·2^j, k = j − shift.
        let term = |j: i32| self.dyadic_term(t, base, j);

        // Start at the peak of the unimodal sequence (log-concave in j).
        let (a, c) = self.exponents(t);
        let peak_rho = if c > 0.0 { a / (c - a) } else { 1.0 };
        let mut j_peak = (peak_rho / base).log2().round() as i32;
        j_peak = j_peak.clamp(-1000, 1000);
        let (mut lo, mut hi) = match k_range {
            Some((k0, k1)) => ((k0 + shift).min(j_peak), (k1 + shift).max(j_peak)),
            None => (j_peak, j_peak),
        };
        let mut terms: std::collections::VecDeque<f64> = (lo..=hi).map(term).collect();
        let mut partial = pairwise_sum(terms.make_contiguous());

        let tail_bound = |ratio: f64, last: f64| {
            if ratio < 1.0 {
                last * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            }
        };
        const MAX_STEPS: usize = 200_000;
        let mut steps = 0;
        let mut low_tail;
        loop {
            let next = term(lo - 1);
            let last = *terms.front().expect("non-empty");
            let ratio = next / last;
            low_tail = tail_bound(ratio, next) + next;
            if ratio > 1.0 - 1e-6 && lo < j_peak - 64 {
                return Ok(KernelNormEstimate::divergent(space, NormMethod::DyadicSum, Divergence::SmallRadius));
            }
            if low_tail <= DYADIC_REL_TOL * partial && ratio < 1.0 {
                break;
            }
            terms.push_front(next);
            partial += next;
            lo -= 1;
            steps += 1;
            if steps > MAX_STEPS {
                return Ok(KernelNormEstimate::divergent(space, NormMethod::DyadicSum, Divergence::SmallRadius));
            }
        }
        let mut high_tail;
        loop {
            let next = term(hi + 1);
            let last = *terms.back().expect("non-empty");
            let ratio = next / last;
            high_tail = tail_bound(ratio, next) + next;
            if ratio > 1.0 - 1e-6 && hi > j_peak + 64 {
                return Ok(KernelNormEstimate::divergent(space, NormMethod::DyadicSum, Divergence::LargeRadius));
            }
            if high_tail <= DYADIC_REL_TOL * partial && ratio < 1.0 {
                break;
            }
            terms.push_back(next);
            partial += next;
            hi += 1;
            steps += 1;
            if steps > MAX_STEPS {
                return Ok(KernelNormEstimate::divergent(space, NormMethod::DyadicSum, Divergence::LargeRadius));
            }
        }
        let sum = pairwise_sum(terms.make_contiguous());
        Ok(KernelNormEstimate {
            space,
            value: Some(sum.powf(1.0 / t)),
            divergent: false,
            divergence: None,
            method: NormMethod::DyadicSum,
            k_min: Some((lo - shift) as i64),
            k_max: Some((hi - shift) as i64),
            tail_bound: Some(low_tail + high_tail),
            argmax_radius: None,
        })
    }

    /// Power-law exponents of `σ` for a Morrey scale.
    fn scale_exponents(&self, scale: &MorreyScale) -> (f64, f64) {
        match scale {
            MorreyScale::Classical { q } => (-self.n() / q, -self.n() / q),
            MorreyScale::Generalized { phi } => phi.asymptotic_exponents(),
        }
    }

    fn scale_eval(&self, scale: &MorreyScale, r: f64) -> f64 {
        match scale {
            MorreyScale::Classical { q } => r.powf(-self.n() / q),
            MorreyScale::Generalized { phi } => phi.eval(r),
        }
    }

    /// Divergence analysis of `sup_R (∫_{|x|<R} K^s)^(1/s) / (σ(R) R^(n/s))`.
    pub fn morrey_divergence(&self, s: f64, scale: &MorreyScale) -> Option<Divergence> {
        let (a, c) = self.exponents(s);
        if a <= 0.0 {
            return Some(Divergence::SmallRadius);
        }
        let (e0, e_inf) = self.scale_exponents(scale);
        let small = self.params.alpha() - self.n() - e0;
        let small_bad = small < -EXPONENT_EPS;
        let (growth, log) = if a < c - EXPONENT_EPS {
            (0.0, false)
        } else if (a - c).abs() <= EXPONENT_EPS {
            (0.0, true)
        } else {
            (a - c, false)
        };
        let large = growth / s - e_inf - self.n() / s;
        let large_bad = large > EXPONENT_EPS || (large.abs() <= EXPONENT_EPS && log);
        Divergence::from_flags(small_bad, large_bad)
    }

    /// Morrey (`scale = Classical{q: t}`, the space `L^{s,t}`) or generalized
    /// Morrey (`L^{s,σ}`) norm of `K`: the supremum over the radius ladder
    /// `R = 2^j` of the centred-ball quotient. Balls centred at the origin are
    /// extremal because `K` is radially decreasing.
    pub fn morrey_norm(&self, s: f64, scale: &MorreyScale) -> Result<KernelNormEstimate> {
        if s < 1.0 {
            return Err(Error::InvalidParameter(format!("s = {s} must be ≥ 1")));
        }
        let space = match scale {
            MorreyScale::Classical { q } => KernelSpace::Morrey { s, t: *q },
            MorreyScale::Generalized { phi } => KernelSpace::GeneralizedMorrey { s, sigma: phi.clone() },
        };
        if let Some(d) = self.morrey_divergence(s, scale) {
            return Ok(KernelNormEstimate::divergent(space, NormMethod::RadialQuadrature, d));
        }
        let n = self.n();
        let quotient = |j: i32| -> Result<f64> {
            let r = 2f64.powi(j);
            let mass = self.ball_integral(s, r)?;
            Ok(mass.powf(1.0 / s) / (self.scale_eval(scale, r) * r.powf(n / s)))
        };
        let (mut lo, mut hi) = DEFAULT_LADDER;
        let mut best = (f64::NEG_INFINITY, 0);
        for j in lo..=hi {
            let v = quotient(j)?;
            if v > best.0 {
                best = (v, j);
            }
        }
        while lo > -LADDER_LIMIT {
            let v = quotient(lo - 1)?;
            if v > best.0 * (1.0 + LADDER_REL_TOL) {
                best = (v, lo - 1);
                lo -= 1;
            } else {
                break;
            }
        }
        while hi < LADDER_LIMIT {
            let v = quotient(hi + 1)?;
            if v > best.0 * (1.0 + LADDER_REL_TOL) {
                best = (v, hi + 1);
                hi += 1;
            } else {
                break;
            }
        }
        Ok(KernelNormEstimate {
            space,
            value: Some(best.0),
            divergent: false,
            divergence: None,
            method: NormMethod::RadialQuadrature,
            k_min: Some(lo as i64),
            k_max: Some(hi as i64),
            tail_bound: None,
            argmax_radius: Some(2f64.powi(best.1)),
        })
    }
}

/// `‖K‖_{L^t}` for the given kernel parameters.
pub fn lebesgue_norm(kp: &KernelParams, t: LebesgueExponent) -> KernelNormEstimate {
    KernelSpec::new(*kp).lebesgue_norm(t)
}

/// Checks `∫_0^R r^((α-n)s+n-1) dr ≤ C σ(R)^s R^n` for every `R` on `ladder`
/// (closed-form left side), reporting the best constant on the ladder and
/// whether the supremum over all `R > 0` is finite by exponent analysis.
pub fn growth_membership_check(
    kp: &KernelParams,
    s: f64,
    sigma: &GrowthFunction,
    ladder: &[f64],
) -> Result<MembershipCheck> {
    let n = kp.n() as f64;
    let a = (kp.alpha() - n) * s + n;
    if a <= 0.0 {
        return Err(Error::Divergent(format!(
            "∫_0^R r^((α-n)s+n-1) dr diverges for every R: (α-n)s+n = {a} ≤ 0"
        )));
    }
    if ladder.is_empty() {
        return Err(Error::InvalidParameter("empty radius ladder".into()));
    }
    let mut best = (f64::NEG_INFINITY, ladder[0]);
    for &r in ladder {
        let ratio = r.powf(a) / a / (sigma.eval(r).powf(s) * r.powf(n));
        if ratio > best.0 {
            best = (ratio, r);
        }
    }
    let (e0, e_inf) = sigma.asymptotic_exponents();
    let small_exponent = a - s * e0 - n;
    let large_exponent = a - s * e_inf - n;
    Ok(MembershipCheck {
        holds: small_exponent >= -EXPONENT_EPS && large_exponent <= EXPONENT_EPS,
        c_best: best.0,
        argmax_radius: best.1,
        small_exponent,
        large_exponent,
    })
}

/// The ladder `2^j`, `j ∈ [lo, hi]`.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}
