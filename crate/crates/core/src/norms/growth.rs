//! Growth functions `φ, ψ, σ : ℝ⁺ → ℝ⁺` that parametrize generalized Morrey
//! spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample ladder used for doubling and monotonicity certification:
/// `2^(j/4)` for `j ∈ [-120, 120]`.
fn certification_ladder() -> impl Iterator<Item = f64> {
    (-120..=120).map(|j| 2f64.powf(j as f64 / 4.0))
}

/// Factor up to which "almost monotone" is certified.
pub const ALMOST_MONOTONE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum GrowthFunction {
    /// `r ↦ c·r^beta`
    Power { c: f64, beta: f64 },
    /// `r ↦ (1 + r^(n/t1))·r^(-n/t)`
    Composite { n: usize, t: f64, t1: f64 },
    /// Log-log linear interpolation through `(radii[i], values[i])`, extended
    /// by the end slopes.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    /// `r ↦ base(r)^exponent`
    Pow { base: Box<GrowthFunction>, exponent: f64 },
}

impl GrowthFunction {
    pub fn power(c: f64, beta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("power growth needs c > 0 (c = {c}, beta = {beta})")));
        }
        Ok(Self::Power { c, beta })
    }

    /// `r^(-n/t)`: the growth function of the classical space `L^{p,t}`.
    pub fn classical(n: usize, t: f64) -> Self {
        Self::Power { c: 1.0, beta: -(n as f64) / t }
    }

    pub fn composite(n: usize, t: f64, t1: f64) -> Result<Self> {
        if !(t > 0.0 && t1 > t) {
            return Err(Error::InvalidParameter(format!("composite growth needs 0 < t < t1 (t = {t}, t1 = {t1})")));
        }
        Ok(Self::Composite { n, t, t1 })
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidParameter("tabulated growth needs ≥ 2 matching samples".into()));
        }
        if radii.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) || values.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter(
                "tabulated growth needs increasing positive radii and positive values".into(),
            ));
        }
        Ok(Self::Tabulated { radii, values })
    }

    /// Parse `power:c:beta` or `composite:t:t1` (dimension supplied by caller).
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number {s:?} in growth spec {spec:?}")))
        };
        match parts.as_slice() {
            ["power", c, beta] => Self::power(num(c)?, num(beta)?),
            ["classical", t] => Ok(Self::classical(n, num(t)?)),
            ["composite", t, t1] => Self::composite(n, num(t)?, num(t1)?),
            _ => Err(Error::InvalidParameter(format!(
                "growth spec {spec:?} not of the form power:c:beta, classical:t or composite:t:t1"
            ))),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Power { c, beta } => c * r.powf(*beta),
            Self::Composite { n, t, t1 } => {
                let n = *n as f64;
                (1.0 + r.powf(n / t1)) * r.powf(-n / t)
            }
            Self::Tabulated { radii, values } => {
                let lr = r.ln();
                let k = match radii.iter().position(|&x| x >= r) {
                    Some(0) => 0,
                    Some(k) => k - 1,
                    None => radii.len() - 2,
                };
                let (x0, x1) = (radii[k].ln(), radii[k + 1].ln());
                let (y0, y1) = (values[k].ln(), values[k + 1].ln());
                (y0 + (y1 - y0) * (lr - x0) / (x1 - x0)).exp()
            }
            Self::Pow { base, exponent } => base.eval(r).powf(*exponent),
        }
    }

    /// `self^exponent`, kept in closed form where possible.
    pub fn powf(&self, exponent: f64) -> Self {
        match self {
            Self::Power { c, beta } => Self::Power { c: c.powf(exponent), beta: beta * exponent },
            Self::Pow { base, exponent: e } => Self::Pow { base: base.clone(), exponent: e * exponent },
            other => Self::Pow { base: Box::new(other.clone()), exponent },
        }
    }

    /// Power-law exponents `(e0, e_inf)` with `φ(r) ≍ r^e0` as `r → 0` and
    /// `φ(r) ≍ r^e_inf` as `r → ∞`.
    pub fn asymptotic_exponents(&self) -> (f64, f64) {
        match self {
            Self::Power { beta, .. } => (*beta, *beta),
            Self::Composite { n, t, t1 } => {
                let n = *n as f64;
                (-n / t, n / t1 - n / t)
            }
            Self::Tabulated { radii, values } => {
                let slope = |i: usize| (values[i + 1] / values[i]).ln() / (radii[i + 1] / radii[i]).ln();
                (slope(0), slope(radii.len() - 2))
            }
            Self::Pow { base, exponent } => {
                let (a, b) = base.asymptotic_exponents();
                (a * exponent, b * exponent)
            }
        }
    }

    /// Sampled doubling constant `sup_r max(φ(r)/φ(2r), φ(2r)/φ(r))`.
    pub fn doubling_constant(&self) -> f64 {
        certification_ladder()
            .map(|r| {
                let q = self.eval(r) / self.eval(2.0 * r);
                q.max(1.0 / q)
            })
            .fold(1.0, f64::max)
    }

    /// Measures how far `φ` is from decreasing and `r^(n/p)·φ(r)` from
    /// increasing on the sample ladder.
    pub fn certify(&self, n: usize, p: f64) -> Certification {
        let radii: Vec<f64> = certification_ladder().collect();
        let phi: Vec<f64> = radii.iter().map(|&r| self.eval(r)).collect();
        let scaled: Vec<f64> = radii.iter().zip(&phi).map(|(&r, &v)| r.powf(n as f64 / p) * v).collect();

        // sup_{r<v} φ(v)/φ(r)
        let mut decrease_factor: f64 = 1.0;
        let mut min_so_far = phi[0];
        for &v in &phi[1..] {
            decrease_factor = decrease_factor.max(v / min_so_far);
            min_so_far = min_so_far.min(v);
        }
        // sup_{r<v} g(r)/g(v)
        let mut increase_factor: f64 = 1.0;
        let mut max_so_far = scaled[0];
        for &v in &scaled[1..] {
            increase_factor = increase_factor.max(max_so_far / v);
            max_so_far = max_so_far.max(v);
        }
        let positive = phi.iter().all(|&v| v > 0.0 && v.is_finite());
        let doubling = self.doubling_constant();
        Certification {
            almost_decreasing_factor: decrease_factor,
            scaled_almost_increasing_factor: increase_factor,
            doubling_constant: doubling,
            certified: positive
                && decrease_factor <= ALMOST_MONOTONE_FACTOR
                && increase_factor <= ALMOST_MONOTONE_FACTOR
                && doubling.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    /// `sup_{r<v} φ(v)/φ(r)` on the sample ladder.
    pub almost_decreasing_factor: f64,
    /// `sup_{r<v} g(r)/g(v)` for `g(r) = r^(n/p)·φ(r)`.
    pub scaled_almost_increasing_factor: f64,
    pub doubling_constant: f64,
    pub certified: bool,
}
