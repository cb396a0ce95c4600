//! Uniform grids over `[-L, L]^n`, sampled compactly supported functions, the
//! midpoint-rule ball integrals used by every norm, and grid file formats.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// A point of `ℝⁿ` padded with zeros to three coordinates.
pub type Point = [f64; 3];

fn norm3(p: &Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn pad(coords: &[f64]) -> Result<Point> {
    if coords.len() > 3 {
        return Err(Error::InvalidParameter(format!("point {coords:?} has more than 3 coordinates")));
    }
    let mut p = [0.0; 3];
    p[..coords.len()].copy_from_slice(coords);
    Ok(p)
}

/// Origin-centred uniform grid with spacing `h` and `2⌊L/h⌋+1` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    n: usize,
    h: f64,
    extent: f64,
    half: usize,
}

/// Serialized form of a [`Grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
    pub extent: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.n, s.h, s.extent)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec { n: g.n, h: g.h, extent: g.extent }
    }
}

impl Grid {
    pub fn new(n: usize, h: f64, extent: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!("grid dimension {n} not in 1..=3")));
        }
        if !(h > 0.0 && h.is_finite() && extent >= h && extent.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid needs 0 < h ≤ L (h = {h}, L = {extent})")));
        }
        let half = (extent / h * (1.0 + 1e-12)).floor() as usize;
        let axis = 2 * half + 1;
        if (axis as f64).powi(n as i32) > 2e8 {
            return Err(Error::InvalidParameter(format!("grid with {axis}^{n} points is too large")));
        }
        Ok(Self { n, h, extent, half })
    }

    /// Desk-scale default: `h = 1/256, L = 8` in 1-D, `1/64, 4` in 2-D,
    /// `1/16, 2` in 3-D.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::new(1, 1.0 / 256.0, 8.0),
            2 => Self::new(2, 1.0 / 64.0, 4.0),
            3 => Self::new(3, 1.0 / 16.0, 2.0),
            _ => Err(Error::InvalidParameter(format!("grid dimension {n} not in 1..=3"))),
        }
    }

    /// Same extent, half the spacing.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, self.h / 2.0, self.extent)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// `⌊L/h⌋`; axis indices run over `0..2·half+1` with the origin at `half`.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn axis_len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume `hⁿ` of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    /// Number of rows along the last (fastest) axis.
    pub fn rows(&self) -> usize {
        self.axis_len().pow(self.n as u32 - 1)
    }

    pub fn coord(&self, axis_index: usize) -> f64 {
        (axis_index as f64 - self.half as f64) * self.h
    }

    /// Axis indices of a flat (row-major, last axis fastest) index.
    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let a = self.axis_len();
        let mut out = [self.half; 3];
        for d in (0..self.n).rev() {
            out[d] = idx % a;
            idx /= a;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize; 3]) -> usize {
        let a = self.axis_len();
        (0..self.n).fold(0, |acc, d| acc * a + multi[d])
    }

    pub fn point(&self, idx: usize) -> Point {
        let m = self.multi_index(idx);
        let mut p = [0.0; 3];
        for d in 0..self.n {
            p[d] = self.coord(m[d]);
        }
        p
    }

    /// Flat index of the grid point nearest to `x`, if `x` lies on the grid.
    pub fn index_of(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.n {
            return None;
        }
        let mut m = [self.half; 3];
        for d in 0..self.n {
            let k = (x[d] / self.h).round() + self.half as f64;
            if k < 0.0 || k >= self.axis_len() as f64 {
                return None;
            }
            m[d] = k as usize;
        }
        Some(self.flat_index(&m))
    }

    /// Axis indices `k` with `|coord(k) - c| < w`, clamped to the grid.
    pub(crate) fn open_range(&self, c: f64, w: f64) -> Option<(usize, usize)> {
        let half = self.half as f64;
        let lo = ((c - w) / self.h).floor() + 1.0 + half;
        let hi = ((c + w) / self.h).ceil() - 1.0 + half;
        let lo = lo.max(0.0);
        let hi = hi.min(self.axis_len() as f64 - 1.0);
        if hi < lo {
            None
        } else {
            Some((lo as usize, hi as usize))
        }
    }

    /// Each row (fixed leading indices) of the open ball `|y - a| < r`, as
    /// `(row, k_lo, k_hi)` with the last-axis index range inclusive.
    pub(crate) fn ball_rows(&self, a: &Point, r: f64, mut visit: impl FnMut(usize, usize, usize)) {
        if r <= 0.0 {
            return;
        }
        let last = self.n - 1;
        let r2 = r * r;
        match self.n {
            1 => {
                if let Some((lo, hi)) = self.open_range(a[0], r) {
                    visit(0, lo, hi);
                }
            }
            2 => {
                if let Some((i0, i1)) = self.open_range(a[0], r) {
                    for i in i0..=i1 {
                        let d0 = self.coord(i) - a[0];
                        let rem = r2 - d0 * d0;
                        if rem <= 0.0 {
                            continue;
                        }
                        if let Some((lo, hi)) = self.open_range(a[last], rem.sqrt()) {
                            visit(i, lo, hi);
                        }
                    }
                }
            }
            _ => {
                let axis = self.axis_len();
                if let Some((i0, i1)) = self.open_range(a[0], r) {
                    for i in i0..=i1 {
                        let d0 = self.coord(i) - a[0];
                        let rem0 = r2 - d0 * d0;
                        if rem0 <= 0.0 {
                            continue;
                        }
                        if let Some((j0, j1)) = self.open_range(a[1], rem0.sqrt()) {
                            for j in j0..=j1 {
                                let d1 = self.coord(j) - a[1];
                                let rem = rem0 - d1 * d1;
                                if rem <= 0.0 {
                                    continue;
                                }
                                if let Some((lo, hi)) = self.open_range(a[last], rem.sqrt()) {
                                    visit(i * axis + j, lo, hi);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Integration region for [`GridFunction::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Whole,
    Ball { center: Point, radius: f64 },
}

/// Prefix sums of a grid array along its rows, for fast ball integrals.
///
/// In 1-D the ball `[a-r, a+r]` is integrated with the exact overlap fraction
/// of every cell; for `n ≥ 2` a grid point belongs to the ball iff its centre
/// satisfies `|y - a| < r`.
#[derive(Debug, Clone)]
pub struct BallSums {
    grid: Grid,
    prefix: Vec<f64>,
    values: Vec<f64>,
}

impl BallSums {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len(), "value array does not match grid");
        let axis = grid.axis_len();
        let mut prefix = Vec::with_capacity(grid.rows() * (axis + 1));
        for row in values.chunks_exact(axis) {
            let mut acc = 0.0;
            prefix.push(0.0);
            for &v in row {
                acc += v;
                prefix.push(acc);
            }
        }
        Self { grid: *grid, prefix, values: values.to_vec() }
    }

    fn row_sum(&self, row: usize, lo: usize, hi: usize) -> f64 {
        let base = row * (self.grid.axis_len() + 1);
        self.prefix[base + hi + 1] - self.prefix[base + lo]
    }

    /// `∫_{B(a,r)} v` (already multiplied by the cell volume).
    pub fn ball_integral(&self, a: &Point, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let g = &self.grid;
        if g.n == 1 {
            return self.interval_integral(a[0] - r, a[0] + r);
        }
        let mut sum = 0.0;
        g.ball_rows(a, r, |row, lo, hi| sum += self.row_sum(row, lo, hi));
        sum * g.cell_volume()
    }

    /// Exact-overlap integral over `[lo, hi]` of the 1-D cell-wise constant
    /// function.
    fn interval_integral(&self, lo: f64, hi: f64) -> f64 {
        let g = &self.grid;
        let cells = g.axis_len() as f64;
        // Cell k covers w ∈ [k, k+1] with w = x/h + half + 1/2.
        let to_w = |x: f64| (x / g.h + g.half as f64 + 0.5).clamp(0.0, cells);
        let (wl, wh) = (to_w(lo), to_w(hi));
        if wh <= wl {
            return 0.0;
        }
        let k0 = wl.floor() as usize;
        let k1 = (wh.floor() as usize).min(g.axis_len());
        let v = &self.values;
        let total = if k0 == k1 {
            (wh - wl) * v[k0]
        } else {
            let mut s = (k0 as f64 + 1.0 - wl) * v[k0];
            if k1 > k0 + 1 {
                s += self.prefix[k1] - self.prefix[k0 + 1];
            }
            if k1 < g.axis_len() {
                s += (wh - k1 as f64) * v[k1];
            }
            s
        };
        total * g.h
    }

    /// Discrete measure of `B(a,r)` as seen by [`Self::ball_integral`]: the
    /// clipped length in 1-D, the lattice count times `hⁿ` otherwise.
    pub fn ball_measure(&self, a: &Point, r: f64) -> f64 {
        ball_measure(&self.grid, a, r)
    }
}

/// See [`BallSums::ball_measure`]; in 1-D the ball is not clipped to the grid.
pub fn ball_measure(grid: &Grid, a: &Point, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if grid.n == 1 {
        return 2.0 * r;
    }
    let mut count = 0usize;
    grid.ball_rows(a, r, |_, lo, hi| count += hi - lo + 1);
    count as f64 * grid.cell_volume()
}

/// Number of lattice points `d ∈ ℤⁿ` with `|d|·h < r`.
pub fn lattice_count(n: usize, h: f64, r: f64) -> usize {
    let k = (r / h).ceil() as i64;
    let r2 = r * r;
    let mut count = 0;
    match n {
        1 => {
            for i in -k..=k {
                if ((i * i) as f64) * h * h < r2 {
                    count += 1;
                }
            }
        }
        2 => {
            for i in -k..=k {
                for j in -k..=k {
                    if ((i * i + j * j) as f64) * h * h < r2 {
                        count += 1;
                    }
                }
            }
        }
        _ => {
            for i in -k..=k {
                for j in -k..=k {
                    for l in -k..=k {
                        if ((i * i + j * j + l * l) as f64) * h * h < r2 {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// Function sampled on a [`Grid`], zero outside its support radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    support_radius: f64,
}

impl GridFunction {
    /// Wraps sampled values; rejects non-finite values and functions whose
    /// support reaches beyond the extent `L`.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let f = Self::restriction(grid, values)?;
        if f.support_radius > grid.extent * (1.0 + 1e-12) {
            return Err(Error::SupportExceedsGrid { support: f.support_radius, extent: grid.extent });
        }
        Ok(f)
    }

    /// Samples of a function that need not vanish near the grid boundary,
    /// such as `I f` or `Mf`; only finiteness is checked.
    pub fn restriction(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at grid index {i}")));
        }
        let support_radius = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| norm3(&grid.point(i)))
            .fold(0.0, f64::max);
        Ok(Self { grid, values, support_radius })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], support_radius: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest `|x|` over grid points with a nonzero value.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn value_at(&self, x: &[f64]) -> Option<f64> {
        self.grid.index_of(x).map(|i| self.values[i])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            support_radius: if c == 0.0 { 0.0 } else { self.support_radius },
        }
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self::from_values(self.grid, values)
    }

    /// `|f|^p` as a plain array.
    pub fn abs_pow(&self, p: f64) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| if p == 1.0 { v.abs() } else { v.abs().powf(p) })
            .collect()
    }

    /// Midpoint rule over the whole grid or a ball (see [`BallSums`] for the
    /// boundary treatment).
    pub fn integrate(&self, region: Region) -> f64 {
        match region {
            Region::Whole => pairwise_sum(&self.values) * self.grid.cell_volume(),
            Region::Ball { center, radius } => BallSums::new(&self.grid, &self.values).ball_integral(&center, radius),
        }
    }

    /// Binary format: `n, h, L` as little-endian `f64`, the axis length as
    /// little-endian `u64`, then the row-major `f64` payload.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for x in [self.grid.n as f64, self.grid.h, self.grid.extent] {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&(self.grid.axis_len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated grid file: {e}")))?;
            Ok(buf)
        };
        let n = f64::from_le_bytes(next(&mut r)?);
        let h = f64::from_le_bytes(next(&mut r)?);
        let extent = f64::from_le_bytes(next(&mut r)?);
        let axis = u64::from_le_bytes(next(&mut r)?);
        if n.fract() != 0.0 || !(1.0..=3.0).contains(&n) {
            return Err(Error::Format(format!("bad dimension {n}")));
        }
        let grid = Grid::new(n as usize, h, extent).map_err(|e| Error::Format(e.to_string()))?;
        if grid.axis_len() as u64 != axis {
            return Err(Error::Format(format!(
                "axis length {axis} inconsistent with h = {h}, L = {extent} (expected {})",
                grid.axis_len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            values.push(f64::from_le_bytes(next(&mut r)?));
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format("trailing bytes after grid payload".into()));
        }
        Self::from_values(grid, values)
    }

    /// CSV `x,value` (1-D only).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.grid.n != 1 {
            return Err(Error::InvalidParameter("CSV export is only available in 1-D".into()));
        }
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.grid.coord(i), v)?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`Self::write_csv`]; the grid is inferred from
    /// the first two abscissae and the row count.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Format(format!("line {}: expected x,value", lineno + 1)))
            };
            xs.push(parse(parts.next())?);
            values.push(parse(parts.next())?);
        }
        if xs.len() < 3 || xs.len() % 2 == 0 {
            return Err(Error::Format(format!("{} rows: a grid has an odd number ≥ 3", xs.len())));
        }
        let h = xs[1] - xs[0];
        let extent = -xs[0];
        let grid = Grid::new(1, h, extent).map_err(|e| Error::Format(e.to_string()))?;
        if grid.axis_len() != xs.len() {
            return Err(Error::Format("abscissae do not form an origin-centred grid".into()));
        }
        Self::from_values(grid, values)
    }
}

/// One weighted ball of a [`TestFunctionSpec::StepSum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub center: Vec<f64>,
    pub radius: f64,
    pub weight: f64,
}

/// Families of compactly supported test functions.
///
/// Ball indicators take the value `1/2` on their boundary sphere, so grid
/// points lying exactly on it split the difference between inside and out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TestFunctionSpec {
    Zero,
    BallIndicator { center: Vec<f64>, radius: f64 },
    /// `|x|^beta` on `|x| ≤ radius`; values at `|x| < h` are taken at `|x| = h`.
    PowerBump { beta: f64, radius: f64 },
    /// `exp(-|x-c|²/s²)` cut off at `|x-c| = cutoff` (default `6s`, shrunk to
    /// fit the grid).
    Gaussian {
        center: Vec<f64>,
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    #[serde(alias = "radial-step-sum")]
    StepSum { steps: Vec<Step> },
}

fn indicator(dist: f64, radius: f64) -> f64 {
    if dist < radius {
        1.0
    } else if (dist - radius).abs() <= 1e-12 * radius {
        0.5
    } else {
        0.0
    }
}

impl TestFunctionSpec {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Self::BallIndicator { center: center.to_vec(), radius }
    }

    pub fn gaussian(center: &[f64], scale: f64) -> Self {
        Self::Gaussian { center: center.to_vec(), scale, cutoff: None }
    }

    /// Short human-readable label used as a report row id.
    pub fn label(&self) -> String {
        let fmt_c = |c: &[f64]| {
            let parts: Vec<String> = c.iter().map(|v| format!("{v}")).collect();
            format!("({})", parts.join(","))
        };
        match self {
            Self::Zero => "zero".into(),
            Self::BallIndicator { center, radius } => format!("ball{}r{}", fmt_c(center), radius),
            Self::PowerBump { beta, radius } => format!("power{beta:.4}r{radius}"),
            Self::Gaussian { center, scale, .. } => format!("gauss{}s{}", fmt_c(center), scale),
            Self::StepSum { steps } => {
                let parts: Vec<String> = steps
                    .iter()
                    .map(|s| format!("{}*ball{}r{}", s.weight, fmt_c(&s.center), s.radius))
                    .collect();
                parts.join("+")
            }
        }
    }

    /// Gaussian cutoff after defaults and the grid-fit cap.
    fn gaussian_cutoff(center: &Point, scale: f64, cutoff: Option<f64>, grid: &Grid) -> f64 {
        let want = cutoff.unwrap_or(6.0 * scale);
        want.min(grid.extent - norm3(center))
    }

    /// Declared support radius (about the origin) on `grid`.
    pub fn support_radius(&self, grid: &Grid) -> Result<f64> {
        Ok(match self {
            Self::Zero => 0.0,
            Self::BallIndicator { center, radius } => norm3(&pad(center)?) + radius,
            Self::PowerBump { radius, .. } => *radius,
            Self::Gaussian { center, scale, cutoff } => {
                let c = pad(center)?;
                norm3(&c) + Self::gaussian_cutoff(&c, *scale, *cutoff, grid)
            }
            Self::StepSum { steps } => {
                let mut m: f64 = 0.0;
                for s in steps {
                    m = m.max(norm3(&pad(&s.center)?) + s.radius);
                }
                m
            }
        })
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        let check_center = |c: &[f64]| -> Result<()> {
            if c.len() > grid.n() {
                return Err(Error::InvalidParameter(format!(
                    "centre {c:?} has more coordinates than the grid dimension {}",
                    grid.n()
                )));
            }
            Ok(())
        };
        match self {
            Self::Zero => {}
            Self::BallIndicator { center, radius } => {
                check_center(center)?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
                }
            }
            Self::PowerBump { beta, radius } => {
                if !(*radius > 0.0 && beta.is_finite()) {
                    return Err(Error::InvalidParameter(format!("power bump needs radius > 0 (got {radius})")));
                }
            }
            Self::Gaussian { center, scale, cutoff } => {
                check_center(center)?;
                if !(*scale > 0.0) || cutoff.is_some_and(|c| !(c > 0.0)) {
                    return Err(Error::InvalidParameter("gaussian scale and cutoff must be positive".into()));
                }
                if norm3(&pad(center)?) >= grid.extent() {
                    return Err(Error::SupportExceedsGrid { support: norm3(&pad(center)?), extent: grid.extent() });
                }
            }
            Self::StepSum { steps } => {
                for s in steps {
                    check_center(&s.center)?;
                    if !(s.radius > 0.0 && s.weight.is_finite()) {
                        return Err(Error::InvalidParameter("step radius must be positive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn eval(&self, x: &Point, h: f64, gaussian_cutoff: f64) -> Result<f64> {
        let dist = |c: &[f64]| -> Result<f64> {
            let c = pad(c)?;
            Ok(((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt())
        };
        Ok(match self {
            Self::Zero => 0.0,
            Self::BallIndicator { center, radius } => indicator(dist(center)?, *radius),
            Self::PowerBump { beta, radius } => {
                let r = norm3(x);
                let chi = indicator(r, *radius);
                if chi == 0.0 {
                    0.0
                } else {
                    chi * r.max(h).powf(*beta)
                }
            }
            Self::Gaussian { center, scale, .. } => {
                let d = dist(center)?;
                if d <= gaussian_cutoff {
                    (-(d / scale).powi(2)).exp()
                } else {
                    0.0
                }
            }
            Self::StepSum { steps } => {
                let mut v = 0.0;
                for s in steps {
                    v += s.weight * indicator(dist(&s.center)?, s.radius);
                }
                v
            }
        })
    }

    /// Pointwise evaluation on every grid point.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        self.validate(grid)?;
        let support = self.support_radius(grid)?;
        if support > grid.extent() * (1.0 + 1e-12) {
            return Err(Error::SupportExceedsGrid { support, extent: grid.extent() });
        }
        let cutoff = match self {
            Self::Gaussian { center, scale, cutoff } => Self::gaussian_cutoff(&pad(center)?, *scale, *cutoff, grid),
            _ => 0.0,
        };
        let values = (0..grid.len())
            .map(|i| self.eval(&grid.point(i), grid.h(), cutoff))
            .collect::<Result<Vec<f64>>>()?;
        GridFunction::from_values(*grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn g1(h: f64, l: f64) -> Grid {
        Grid::new(1, h, l).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = g1(0.25, 1.0);
        assert_eq!(g.axis_len(), 9);
        assert_eq!(g.coord(4), 0.0);
        let g3 = Grid::new(3, 0.5, 1.0).unwrap();
        assert_eq!(g3.len(), 125);
        let idx = g3.flat_index(&[1, 2, 4]);
        assert_eq!(g3.multi_index(idx), [1, 2, 4]);
        assert_eq!(g3.point(idx), [-0.5, 0.0, 1.0]);
        assert_eq!(g3.index_of(&[-0.5, 0.0, 1.0]), Some(idx));
        assert_eq!(Grid::default_for(1).unwrap().axis_len(), 4097);
        assert!(Grid::new(4, 0.1, 1.0).is_err());
    }

    #[test]
    fn sample_examples() {
        let g = g1(1.0 / 64.0, 2.0);
        let ball = TestFunctionSpec::ball(&[0.0], 1.0).sample(&g).unwrap();
        assert_eq!(ball.value_at(&[0.5]), Some(1.0));
        assert_eq!(ball.value_at(&[1.5]), Some(0.0));
        let gauss = TestFunctionSpec::gaussian(&[0.0], 1.0).sample(&g).unwrap();
        assert_eq!(gauss.value_at(&[0.0]), Some(1.0));
        let bump = TestFunctionSpec::PowerBump { beta: -0.25, radius: 1.0 }.sample(&g).unwrap();
        assert!((bump.value_at(&[0.5]).unwrap() - 0.5f64.powf(-0.25)).abs() < 1e-12);
        assert!((bump.value_at(&[0.0]).unwrap() - (1.0f64 / 64.0).powf(-0.25)).abs() < 1e-12);
        assert!(matches!(
            TestFunctionSpec::ball(&[1.5], 1.0).sample(&g),
            Err(Error::SupportExceedsGrid { .. })
        ));
    }

    #[test]
    fn integrate_examples() {
        let g = g1(0.01, 2.0);
        let ball = TestFunctionSpec::ball(&[0.0], 1.0).sample(&g).unwrap();
        assert!((ball.integrate(Region::Whole) - 2.0).abs() <= 0.01);
        let g = g1(0.005, 8.0);
        let gauss = TestFunctionSpec::gaussian(&[0.0], 1.0).sample(&g).unwrap();
        assert!((gauss.integrate(Region::Whole) - PI.sqrt()).abs() < 1e-3);
        assert_eq!(gauss.integrate(Region::Ball { center: [0.0; 3], radius: 0.0 }), 0.0);
    }

    #[test]
    fn one_dimensional_overlap_is_exact_for_constants() {
        let g = g1(0.125, 2.0);
        let vals: Vec<f64> = (0..g.len()).map(|i| if g.coord(i).abs() <= 1.5 { 1.0 } else { 0.0 }).collect();
        let f = GridFunction::from_values(g, vals).unwrap();
        let sums = BallSums::new(&g, f.values());
        for &(a, r) in &[(0.0, 0.3), (0.1, 0.77), (-0.43, 1.0), (0.0, 0.0625)] {
            assert!((sums.ball_integral(&[a, 0.0, 0.0], r) - 2.0 * r).abs() < 1e-12, "{a} {r}");
        }
    }

    #[test]
    fn two_dimensional_disc_area() {
        let g = Grid::new(2, 1.0 / 128.0, 2.0).unwrap();
        let f = TestFunctionSpec::ball(&[0.0, 0.0], 1.0).sample(&g).unwrap();
        let area = f.integrate(Region::Whole);
        assert!((area - PI).abs() < 5e-3, "{area}");
        let inner = f.integrate(Region::Ball { center: [0.5, 0.0, 0.0], radius: 0.25 });
        assert!((inner - PI / 16.0).abs() < 2e-3, "{inner}");
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let g = g1(0.25, 2.0);
        let f = TestFunctionSpec::gaussian(&[0.25], 0.5).sample(&g).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 8 * g.len());
        assert_eq!(GridFunction::read_binary(buf.as_slice()).unwrap(), f);
        assert!(GridFunction::read_binary(&buf[..40]).is_err());
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        assert!(csv.starts_with(b"x,value\n"));
        let back = GridFunction::read_csv(csv.as_slice()).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a, b);
        }
        let g2 = Grid::new(2, 0.5, 1.0).unwrap();
        let f2 = TestFunctionSpec::ball(&[0.0, 0.0], 1.0).sample(&g2).unwrap();
        let mut buf = Vec::new();
        f2.write_binary(&mut buf).unwrap();
        assert_eq!(GridFunction::read_binary(buf.as_slice()).unwrap(), f2);
        assert!(f2.write_csv(Vec::new()).is_err());
    }

    #[test]
    fn refinement_convergence_orders() {
        let coarse = g1(1.0 / 32.0, 4.0);
        let fine = coarse.refined().unwrap();
        let err = |g: &Grid| {
            let f = TestFunctionSpec::gaussian(&[0.1], 0.7).sample(g).unwrap();
            (f.integrate(Region::Ball { center: [0.3, 0.0, 0.0], radius: 0.9 }) - {
                // ∫_{-0.6}^{1.2} e^{-((x-0.1)/0.7)^2} dx by fine quadrature
                crate::numeric::integrate_adaptive(|x| (-((x - 0.1) / 0.7f64).powi(2)).exp(), -0.6, 1.2, 0.0, 1e-14)
                    .value
            })
            .abs()
        };
        let (e0, e1) = (err(&coarse), err(&fine));
        assert!(e1 < e0 / 3.0, "{e0} -> {e1}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn integrate_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0, r in 0.0f64..2.0) {
            let g = Grid::new(2, 0.125, 2.0).unwrap();
            let f = TestFunctionSpec::ball(&[0.25, 0.0], 0.75).sample(&g).unwrap();
            let h = TestFunctionSpec::gaussian(&[0.0, -0.25], 0.5).sample(&g).unwrap();
            let comb = f.linear_combination(a, &h, b).unwrap();
            let region = Region::Ball { center: [c, 0.5 * c, 0.0], radius: r };
            let lhs = comb.integrate(region);
            let rhs = a * f.integrate(region) + b * h.integrate(region);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn translation_on_lattice(shift in -8i32..8, a in -1.0f64..1.0, r in 0.0f64..1.5) {
            let g = g1(0.0625, 3.0);
            let h = g.h();
            let s = shift as f64 * h;
            let f = TestFunctionSpec::gaussian(&[0.0], 0.3).sample(&g).unwrap();
            let fs = TestFunctionSpec::gaussian(&[s], 0.3).sample(&g).unwrap();
            let i0 = f.integrate(Region::Ball { center: [a, 0.0, 0.0], radius: r });
            let i1 = fs.integrate(Region::Ball { center: [a + s, 0.0, 0.0], radius: r });
            prop_assert!((i0 - i1).abs() < 1e-10);
        }
    }
}
