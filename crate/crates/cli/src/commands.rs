use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use morrey_lab::field::GridSpec;
use morrey_lab::kernel::{dyadic_ladder, DEFAULT_LADDER};
use morrey_lab::norms::{self, NormValue};
use morrey_lab::params::admissible_t_interval;
use morrey_lab::verify::{compare_bounds, default_corpus, verify_inclusion};
use morrey_lab::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::*;

/// A usage error: exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Usage(format!("missing --{flag}")).into())
}

pub struct Ctx {
    pub json: bool,
    pub out_dir: PathBuf,
    pub config: Option<PathBuf>,
}

impl Ctx {
    fn load<T: DeserializeOwned>(&self) -> Result<Option<T>> {
        let Some(path) = &self.config else { return Ok(None) };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let v = serde_json::from_str(&text).map_err(morrey_lab::Error::from)?;
        Ok(Some(v))
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir).with_context(|| format!("creating {}", self.out_dir.display()))?;
        Ok(self.out_dir.join(name))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let path = self.path(name)?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name)?;
        Ok(BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?))
    }

    /// Single-line JSON with `--json`, the human text otherwise.
    fn emit(&self, value: &impl Serialize, human: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string(value)?);
        } else {
            print!("{}", human());
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Artifact<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{v:.5}")
    } else {
        format!("{v:.5e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "-".into())
}

fn kernel_params(k: &mut KernelArgs) -> Result<KernelParams> {
    let n = need(k.n, "n")?;
    let alpha = need(k.alpha, "alpha")?;
    let gamma = *k.gamma.get_or_insert(0.0);
    Ok(KernelParams::new(n, alpha, gamma)?)
}

fn growth(spec: &str, n: usize) -> Result<GrowthFunction> {
    Ok(GrowthFunction::parse(spec, n)?)
}

pub fn kernel_norm(ctx: &Ctx, mut a: KernelNormArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<KernelNormArgs>()? {
        a.overlay(&cfg);
    }
    let kp = kernel_params(&mut a.kernel)?;
    let spec = KernelSpec::new(kp);
    let n = kp.n();
    let space = *a.space.get_or_insert(SpaceKind::Lebesgue);
    let (est, scale, s) = match space {
        SpaceKind::Lebesgue => {
            let t = need(a.t, "t")?;
            (spec.lebesgue_norm(LebesgueExponent::new(t)?), MorreyScale::Classical { q: t }, t)
        }
        SpaceKind::Morrey => {
            let (s, t) = (need(a.s, "s")?, need(a.t, "t")?);
            let scale = MorreyScale::Classical { q: t };
            (spec.morrey_norm(s, &scale)?, scale, s)
        }
        SpaceKind::GenMorrey => {
            let s = need(a.s, "s")?;
            let scale = MorreyScale::Generalized { phi: growth(&need(a.sigma.clone(), "sigma")?, n)? };
            (spec.morrey_norm(s, &scale)?, scale, s)
        }
    };
    let dyadic = match a.radius {
        Some(r) => Some(spec.dyadic_sum_estimate(need(a.t, "t")?, r, None)?),
        None => None,
    };

    // (R, quotient) plot series; for L^t the quotient is the ball mass (∫_{|x|<R} K^t)^(1/t).
    if !est.divergent {
        let sigma = scale.growth(n);
        let mut w = ctx.create("kernel_quotient.csv")?;
        writeln!(w, "R,quotient")?;
        for r in dyadic_ladder(DEFAULT_LADDER.0, DEFAULT_LADDER.1) {
            let mass = spec.ball_integral(s, r)?.powf(1.0 / s);
            let q = match space {
                SpaceKind::Lebesgue => mass,
                _ => mass / (sigma.eval(r) * r.powf(n as f64 / s)),
            };
            writeln!(w, "{r:e},{q:e}")?;
        }
        w.flush()?;
    }

    #[derive(Serialize)]
    struct Out<'a> {
        estimate: &'a KernelNormEstimate,
        dyadic: Option<&'a KernelNormEstimate>,
    }
    let out = Out { estimate: &est, dyadic: dyadic.as_ref() };
    ctx.write_json("kernel_norm.json", &Artifact { command: "kernel-norm", config: &a, result: &out })?;
    ctx.emit(&out, || {
        let mut s = match est.value {
            Some(v) => format!("{}\n", num(v)),
            None => "divergent\n".to_string(),
        };
        if let Some(d) = &dyadic {
            s += &format!("dyadic sum {}\n", opt(d.value));
        }
        s
    })?;
    Ok(true)
}

/// The input function and the grid it lives on; fills the resolved grid back
/// into the arguments.
fn input_function(n: Option<usize>, f: &mut FunctionArgs) -> Result<GridFunction> {
    if let Some(path) = &f.input {
        let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
        let g = if path.extension().is_some_and(|e| e == "csv") {
            GridFunction::read_csv(BufReader::new(file))?
        } else {
            GridFunction::read_binary(BufReader::new(file))?
        };
        if n.is_some_and(|n| n != g.grid().n()) {
            bail!(Usage(format!("--n does not match the {}-D input file", g.grid().n())));
        }
        f.h = Some(g.grid().h());
        f.extent = Some(g.grid().extent());
        return Ok(g);
    }
    let n = need(n, "n")?;
    let text = need(f.f.clone(), "f (or --input)")?;
    let json = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => text,
    };
    let spec: TestFunctionSpec = serde_json::from_str(&json).map_err(morrey_lab::Error::from)?;
    let default = Grid::default_for(n)?;
    let grid = Grid::new(n, *f.h.get_or_insert(default.h()), *f.extent.get_or_insert(default.extent()))?;
    Ok(spec.sample(&grid)?)
}

fn write_function(ctx: &Ctx, stem: &str, g: &GridFunction) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let bin = ctx.path(&format!("{stem}.bin"))?;
    let mut w = BufWriter::new(File::create(&bin)?);
    g.write_binary(&mut w)?;
    w.flush()?;
    out.push(bin);
    if g.grid().n() == 1 {
        let csv = ctx.path(&format!("{stem}.csv"))?;
        let mut w = BufWriter::new(File::create(&csv)?);
        g.write_csv(&mut w)?;
        w.flush()?;
        out.push(csv);
    }
    Ok(out)
}

#[derive(Serialize)]
struct FunctionSummary {
    grid: GridSpec,
    max_abs: f64,
    integral: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular_cell: Option<morrey_lab::operators::SingularCell>,
    files: Vec<PathBuf>,
}

fn summary_text(label: &str, s: &FunctionSummary) -> String {
    let mut t = format!("{label}: max {} integral {}\n", num(s.max_abs), num(s.integral));
    if let Some(c) = &s.singular_cell {
        t += &format!("singular cell radius {} weight {}\n", num(c.radius), num(c.weight));
    }
    for f in &s.files {
        t += &format!("wrote {}\n", f.display());
    }
    t
}

pub fn apply(ctx: &Ctx, mut a: ApplyArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<ApplyArgs>()? {
        a.overlay(&cfg);
    }
    let kp = kernel_params(&mut a.kernel)?;
    let f = input_function(Some(kp.n()), &mut a.function)?;
    let res = morrey_lab::operators::apply_bessel_riesz(&kp, &f)?;
    let files = write_function(ctx, "apply", &res.output)?;
    let summary = FunctionSummary {
        grid: (*res.output.grid()).into(),
        max_abs: res.output.max_abs(),
        integral: res.output.integrate(Region::Whole),
        singular_cell: Some(res.singular_cell),
        files,
    };
    ctx.write_json("apply.json", &Artifact { command: "apply", config: &a, result: &summary })?;
    ctx.emit(&summary, || summary_text("I f", &summary))?;
    Ok(true)
}

pub fn maximal(ctx: &Ctx, mut a: MaximalArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<MaximalArgs>()? {
        a.overlay(&cfg);
    }
    let f = input_function(a.n, &mut a.function)?;
    a.n = Some(f.grid().n());
    let cfg = MaximalConfig { ratio: a.ratio, r_min: a.r_min, r_max: a.r_max };
    let mf = morrey_lab::operators::maximal(&f, &cfg)?;
    let files = write_function(ctx, "maximal", &mf)?;
    let summary = FunctionSummary {
        grid: (*mf.grid()).into(),
        max_abs: mf.max_abs(),
        integral: mf.integrate(Region::Whole),
        singular_cell: None,
        files,
    };
    ctx.write_json("maximal.json", &Artifact { command: "maximal", config: &a, result: &summary })?;
    ctx.emit(&summary, || summary_text("M f", &summary))?;
    Ok(true)
}

pub fn norm(ctx: &Ctx, mut a: NormArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<NormArgs>()? {
        a.overlay(&cfg);
    }
    let f = input_function(a.n, &mut a.function)?;
    let n = f.grid().n();
    a.n = Some(n);
    let defaults = ScanConfig::default();
    let scan = ScanConfig {
        center_stride: *a.stride.get_or_insert(defaults.center_stride),
        radius_ratio: *a.radius_ratio.get_or_insert(defaults.radius_ratio),
        ..defaults
    };
    let p = need(a.p, "p")?;
    let value: NormValue = match *a.space.get_or_insert(SpaceKind::Lebesgue) {
        SpaceKind::Lebesgue => norms::lebesgue_norm_f(&f, p)?,
        SpaceKind::Morrey => norms::morrey_norm(&f, p, need(a.q, "q")?, &scan)?,
        SpaceKind::GenMorrey => norms::gen_morrey_norm(&f, p, &growth(&need(a.phi.clone(), "phi")?, n)?, &scan)?,
    };
    ctx.write_json("norm.json", &Artifact { command: "norm", config: &a, result: &value })?;
    ctx.emit(&value, || format!("{}\n", num(value.value)))?;
    Ok(true)
}

fn resolve_experiment(ctx: &Ctx, a: &VerifyArgs) -> Result<ExperimentConfig> {
    let theorem = a.theorem.as_deref().map(str::parse::<TheoremId>).transpose()?;
    let mut cfg = match ctx.load::<ExperimentConfig>()? {
        Some(c) => c,
        None => ExperimentConfig::default_for(need(theorem, "theorem")?),
    };
    let h = &mut cfg.hypothesis;
    if let Some(t) = theorem {
        h.theorem = t;
    }
    if let Some(n) = a.kernel.n {
        h.n = n;
    }
    if let Some(v) = a.kernel.alpha {
        h.alpha = v;
    }
    if let Some(v) = a.kernel.gamma {
        h.gamma = v;
    }
    for (dst, src) in [(&mut h.p1, a.p1), (&mut h.q1, a.q1), (&mut h.t, a.t), (&mut h.s, a.s), (&mut h.beta, a.beta), (&mut h.t1, a.t1)] {
        if src.is_some() {
            *dst = src;
        }
    }
    let n = h.n;
    if let Some(phi) = &a.phi {
        cfg.phi = Some(growth(phi, n)?);
    }
    if let Some(sigma) = &a.sigma {
        cfg.sigma = Some(growth(sigma, n)?);
    }
    if a.h.is_some() || a.extent.is_some() {
        let base = match cfg.grid {
            Some(g) if g.n == n => g,
            _ => Grid::default_for(n)?.into(),
        };
        cfg.grid = Some(GridSpec { n, h: a.h.unwrap_or(base.h), extent: a.extent.unwrap_or(base.extent) });
    }
    if a.no_refine {
        cfg.refine = false;
    }
    if a.allow_uncertified {
        cfg.allow_uncertified = true;
    }
    Ok(cfg)
}

pub fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<bool> {
    if a.inclusion {
        return inclusion(ctx, &a);
    }
    let exp = Experiment::new(resolve_experiment(ctx, &a)?)?;
    let report = exp.run()?;
    let stem = format!("report_{}", exp.theorem());
    ctx.write_json(&format!("{stem}.json"), &report)?;
    let mut w = ctx.create(&format!("{stem}.csv"))?;
    report.write_csv(&mut w)?;
    w.flush()?;
    ctx.emit(&report, || report_text(&report))?;
    Ok(report.aggregate.pass)
}

fn report_text(r: &VerificationReport) -> String {
    let agg = &r.aggregate;
    let mut s = format!("{}", r.experiment);
    if let Some(k) = r.kernel_norm.as_ref().and_then(|k| k.value) {
        s += &format!("  kernel norm {}", num(k));
    }
    s += &format!("  C_emp {}", opt(agg.c_emp));
    if let Some(c) = agg.hedberg_constant {
        s += &format!("  C_H {}", num(c));
    }
    s += "\n";
    s += &format!("{:<44} {:>12} {:>12} {:>12}\n", "function", "ratio", "refined", "hedberg");
    for row in &r.rows {
        if row.degenerate {
            s += &format!("{:<44} {:>12}\n", row.id, "degenerate");
        } else {
            s += &format!(
                "{:<44} {:>12} {:>12} {:>12}\n",
                row.id,
                opt(row.ratio),
                opt(row.refined_ratio),
                opt(row.hedberg_constant)
            );
        }
    }
    for c in &agg.checks {
        let limit = c.limit.map(|l| format!("< {}", num(l))).unwrap_or_default();
        s += &format!("  {:<26} {:>12} {:<12} {}\n", c.name, opt(c.value), limit, if c.pass { "ok" } else { "FAIL" });
    }
    s += if agg.pass { "PASS\n" } else { "FAIL\n" };
    s
}

fn inclusion(ctx: &Ctx, a: &VerifyArgs) -> Result<bool> {
    let n = a.kernel.n.unwrap_or(1);
    let (p, q) = (need(a.p, "p")?, need(a.q, "q")?);
    let default = Grid::default_for(n)?;
    let grid = Grid::new(n, a.h.unwrap_or(default.h()), a.extent.unwrap_or(default.extent()))?;
    let corpus = default_corpus(n, -(n as f64) / q);
    let report = verify_inclusion(&corpus, &grid, p, q, &ScanConfig::default(), 1e-12)?;
    ctx.write_json("inclusion.json", &report)?;
    ctx.emit(&report, || {
        let mut s = format!("c_upper {}  c_lower {}\n", num(report.c_upper), num(report.c_lower));
        for r in &report.rows {
            s += &format!(
                "{:<44} L^q {:>12} L^(p,q) {:>12} L^(1,q) {:>12} {}\n",
                r.id,
                num(r.lebesgue_q),
                num(r.morrey_pq),
                num(r.morrey_1q),
                if r.upper_holds && r.lower_holds { "ok" } else { "FAIL" }
            );
        }
        s + if report.pass { "PASS\n" } else { "FAIL\n" }
    })?;
    Ok(report.pass)
}

pub fn compare(ctx: &Ctx, mut a: CompareArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<CompareArgs>()? {
        a.overlay(&cfg);
    }
    let kp = kernel_params(&mut a.kernel)?;
    let s = *a.s.get_or_insert(1.0);
    let t = need(a.t, "t")?;
    let t1 = *a.t1.get_or_insert(2.0 * t);
    let base = if a.with_corpus {
        let mut c = ExperimentConfig::default_for(TheoremId::T7);
        c.hypothesis.p1 = Some(*a.p1.get_or_insert(1.5));
        c.hypothesis.beta = Some(*a.beta.get_or_insert(-0.6));
        Some(c)
    } else {
        None
    };
    let cmp = compare_bounds(&kp, s, t, t1, base.as_ref())?;
    ctx.write_json("compare.json", &Artifact { command: "compare", config: &a, result: &cmp })?;
    ctx.emit(&cmp, || {
        let mut rows = [
            (format!("L^t       t={t}"), cmp.lebesgue),
            (format!("L^(s,t)   s={s} t={t}"), cmp.morrey),
            (format!("L^(s,σ)   s={s} t1={t1}"), cmp.generalized),
        ];
        rows.sort_by(|x, y| y.1.total_cmp(&x.1));
        let mut out = String::new();
        for (label, v) in &rows {
            out += &format!("{label:<28} {}\n", num(*v));
        }
        out += &format!("L^(t,t) = L^t relative error {}\n", num(cmp.equality_rel_error));
        for b in &cmp.bounds {
            out += &format!("{:<4} C_emp {} bound {}\n", b.theorem, opt(b.c_emp), opt(b.product));
        }
        out + if cmp.pass { "PASS\n" } else { "FAIL\n" }
    })?;
    Ok(cmp.pass)
}

/// `v` or the inclusive range `lo:hi:step`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || Usage(format!("bad range {spec:?}: expected a number or lo:hi:step"));
    let nums: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    match nums.as_slice() {
        [v] => Ok(vec![*v]),
        [lo, hi, step] if *step > 0.0 && hi >= lo => {
            let k = ((hi - lo) / step + 1e-9).floor() as usize;
            if k > 100_000 {
                bail!(Usage(format!("range {spec:?} has too many points")));
            }
            // rounded to 12 decimals so that -1 + 7·0.05 prints as -0.65
            Ok((0..=k).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
        }
        _ => Err(bad().into()),
    }
}

pub fn param_scan(ctx: &Ctx, mut a: ParamScanArgs) -> Result<bool> {
    if let Some(cfg) = ctx.load::<ParamScanArgs>()? {
        a.overlay(&cfg);
    }
    let theorem: TheoremId = need(a.theorem.clone(), "theorem")?.parse()?;
    let n = need(a.n, "n")?;
    let axis = |v: &Option<String>| -> Result<Vec<Option<f64>>> {
        match v {
            Some(s) => Ok(parse_range(s)?.into_iter().map(Some).collect()),
            None => Ok(vec![None]),
        }
    };
    let alpha = axis(&Some(need(a.alpha.clone(), "alpha")?))?;
    let gamma = axis(&Some(a.gamma.get_or_insert("0".into()).clone()))?;
    let axes = [alpha, gamma, axis(&a.p1)?, axis(&a.q1)?, axis(&a.t)?, axis(&a.s)?, axis(&a.beta)?, axis(&a.t1)?];
    let cells: usize = axes.iter().map(Vec::len).product();
    if cells > 2_000_000 {
        bail!(Usage(format!("{cells} cells is too many")));
    }
    let path = ctx.path("param_scan.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "theorem,n,alpha,gamma,p1,q1,t,s,beta,t1,admissible,p2,violations")?;
    let cell = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    let mut admissible = 0usize;
    let mut idx = [0usize; 8];
    for _ in 0..cells {
        let v: Vec<Option<f64>> = (0..8).map(|k| axes[k][idx[k]]).collect();
        let h = TheoremHypothesis {
            theorem,
            n,
            alpha: v[0].unwrap_or(f64::NAN),
            gamma: v[1].unwrap_or(0.0),
            p1: v[2],
            q1: v[3],
            t: v[4],
            s: v[5],
            beta: v[6],
            t1: v[7],
        };
        let viol = h.violations();
        let ok = viol.is_empty();
        admissible += ok as usize;
        let names: Vec<&str> = viol.iter().map(|x| x.constraint.as_str()).collect();
        writeln!(
            w,
            "{theorem},{n},{},{},{},{},{},{},{},{},{},{},\"{}\"",
            cell(v[0]),
            cell(v[1]),
            cell(v[2]),
            cell(v[3]),
            cell(v[4]),
            cell(v[5]),
            cell(v[6]),
            cell(v[7]),
            ok as u8,
            cell(if ok { h.p2() } else { None }),
            names.join("; ")
        )?;
        // odometer over the axes, last one fastest
        for k in (0..8).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    w.flush()?;

    #[derive(Serialize)]
    struct Out<'a> {
        cells: usize,
        admissible: usize,
        mask: &'a Path,
        t_interval: Option<(f64, f64)>,
    }
    let t_interval = match (axes[0].as_slice(), axes[1].as_slice()) {
        ([Some(al)], [Some(ga)]) => KernelParams::new(n, *al, *ga).ok().and_then(|kp| admissible_t_interval(&kp).ok()),
        _ => None,
    };
    let out = Out { cells, admissible, mask: &path, t_interval };
    ctx.write_json("param_scan.json", &Artifact { command: "param-scan", config: &a, result: &out })?;
    ctx.emit(&out, || format!("{admissible} of {cells} cells admissible; mask in {}\n", path.display()))?;
    Ok(true)
}
