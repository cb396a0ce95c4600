//! Acceptance criteria 1 to 11. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use morrey_lab::kernel::KernelSpec;
use morrey_lab::norms::{gen_morrey_norm, morrey_norm};
use morrey_lab::operators::maximal;
use morrey_lab::params::admissible_t_interval;
use morrey_lab::verify::{compare_bounds, default_corpus, verify_inclusion};
use morrey_lab::*;

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn texp(t: f64) -> LebesgueExponent {
    LebesgueExponent::new(t).unwrap()
}

fn kernel_norm_oracle() -> Outcome {
    let kp = KernelParams::new(1, 0.5, 1.0).unwrap();
    let v = KernelSpec::new(kp).lebesgue_norm(texp(1.0)).value.unwrap();
    let rel = (v - 2.0 * std::f64::consts::PI).abs() / (2.0 * std::f64::consts::PI);
    check(rel < 1e-3, format!("‖K‖_1 = {v:.10}, relative error {rel:.2e}"))
}

fn dyadic_equivalence() -> Outcome {
    let triples = [
        (1, 0.5, 1.0, 1.2),
        (1, 0.3, 2.0, 1.1),
        (1, 0.7, 0.5, 2.0),
        (2, 1.0, 1.0, 1.5),
        (2, 0.5, 2.0, 1.2),
        (2, 1.5, 1.0, 3.0),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, alpha, gamma, t) in triples {
        let kp = KernelParams::new(n, alpha, gamma).unwrap();
        let (lo, hi) = admissible_t_interval(&kp).unwrap();
        assert!(t > lo && t < hi, "triple ({n}, {alpha}, {gamma}, {t}) not admissible");
        let k = KernelSpec::new(kp);
        let d = k.dyadic_sum_estimate(t, 1.0, None).unwrap().value.unwrap().powf(t);
        let l = k.lebesgue_norm(texp(t)).value.unwrap().powf(t);
        let c = k.shell_factor(t);
        let ratio = d / l;
        ok &= ratio >= 1.0 / c && ratio <= c;
        lines.push(format!("n={n} α={alpha} γ={gamma} t={t}: ratio {ratio:.4} in [1/{c:.3}, {c:.3}]"));
    }
    check(ok, lines.join("; "))
}

fn divergence_boundary() -> Outcome {
    let triples = [(1, 0.5, 0.25), (2, 1.0, 0.5), (3, 2.0, 0.5), (2, 0.5, 0.2)];
    let mut ok = true;
    let mut cases = 0;
    let mut bad = Vec::new();
    for (n, alpha, gamma) in triples {
        let kp = KernelParams::new(n, alpha, gamma).unwrap();
        let (lo, hi) = admissible_t_interval(&kp).unwrap();
        let k = KernelSpec::new(kp);
        for (t, expect_divergent) in [(lo * 0.95, true), (lo * 1.05, false), (hi * 0.95, false), (hi * 1.05, true)] {
            cases += 1;
            let est = k.lebesgue_norm(texp(t));
            let right = est.divergent == expect_divergent && est.value.is_some() != expect_divergent;
            if !right {
                ok = false;
                bad.push(format!("n={n} α={alpha} γ={gamma} t={t:.4}"));
            }
        }
    }
    check(ok, format!("{cases} cases, wrong: {bad:?}"))
}

fn young_constant() -> Outcome {
    let report = Experiment::new(ExperimentConfig::default_for(TheoremId::T4)).unwrap().run().unwrap();
    let worst = report.aggregate.c_emp.unwrap();
    let all = report.rows.iter().filter(|r| !r.degenerate).all(|r| r.ratio.unwrap() <= 1.05);
    let drift = report
        .rows
        .iter()
        .filter_map(|r| Some((r.refined_ratio? - r.ratio?).abs()))
        .fold(0.0, f64::max);
    check(
        all && report.aggregate.pass,
        format!("max ratio {worst:.5} over {} functions, refinement change ≤ {drift:.1e}", report.rows.len()),
    )
}

/// Exact sup of averages over intervals with endpoints on the half-cell
/// lattice whose closure contains the point, for the cellwise-constant
/// extension of the samples.
fn brute_force_maximal(f: &GridFunction) -> Vec<f64> {
    let g = f.grid();
    let h = g.h();
    let m = g.len();
    let x0 = g.coord(0) - h / 2.0;
    // endpoints e_k = x0 + k h/2, k = 0..=2m; prefix integral at endpoints
    let vals = f.values();
    let prefix: Vec<f64> = (0..=2 * m)
        .map(|k| {
            let full = k / 2;
            let mut s: f64 = vals[..full].iter().sum::<f64>() * h;
            if k % 2 == 1 {
                s += vals[full] * h / 2.0;
            }
            s
        })
        .collect();
    (0..m)
        .map(|i| {
            let x = g.coord(i);
            let mut best: f64 = 0.0;
            for a in 0..2 * m {
                let ea = x0 + a as f64 * h / 2.0;
                if ea > x + 1e-12 {
                    break;
                }
                for b in (a + 1)..=2 * m {
                    let eb = x0 + b as f64 * h / 2.0;
                    if eb < x - 1e-12 {
                        continue;
                    }
                    best = best.max((prefix[b] - prefix[a]) / (eb - ea));
                }
            }
            best
        })
        .collect()
}

fn maximal_oracle() -> Outcome {
    let grid = Grid::new(1, 1.0 / 16.0, 4.0).unwrap();
    assert_eq!(grid.len(), 129);
    let f = TestFunctionSpec::ball(&[0.0], 1.0).sample(&grid).unwrap();
    let mf = maximal(&f, &MaximalConfig::default()).unwrap();
    let brute = brute_force_maximal(&f);
    let mut worst: f64 = 1.0;
    let mut ok = true;
    for (&m, &b) in mf.values().iter().zip(&brute) {
        let q = m / b;
        worst = worst.max(q.max(1.0 / q));
        ok &= q >= 0.5 && q <= 2.0;
    }
    let at2 = mf.value_at(&[2.0]).unwrap();
    ok &= (at2 - 2.0 / 3.0).abs() <= 0.02;
    check(ok, format!("worst factor vs brute force {worst:.4}, Mf(2) = {at2:.5}"))
}

fn morrey_oracle() -> Outcome {
    let grid = Grid::default_for(1).unwrap();
    let f = TestFunctionSpec::ball(&[0.0], 1.0).sample(&grid).unwrap();
    let scan = ScanConfig::default();
    let v = morrey_norm(&f, 2.0, 4.0, &scan).unwrap().value;
    let rel = (v - 2f64.sqrt()).abs() / 2f64.sqrt();
    let phi = GrowthFunction::power(1.0, -0.25).unwrap();
    let g = gen_morrey_norm(&f, 2.0, &phi, &scan).unwrap().value;
    let cons = (g - v).abs() / v;
    check(rel < 0.02 && cons <= 1e-9, format!("‖χ‖_(2,4) = {v:.6} (error {rel:.2e}), generalized form differs by {cons:.1e}"))
}

fn inclusion_chain() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, grid) in [(1, Grid::default_for(1).unwrap()), (2, Grid::new(2, 1.0 / 32.0, 2.5).unwrap())] {
        let corpus = default_corpus(n, -0.4);
        for (p, q) in [(1.0, 2.0), (1.5, 3.0), (2.0, 2.0)] {
            let r = verify_inclusion(&corpus, &grid, p, q, &ScanConfig::default(), 1e-12).unwrap();
            ok &= r.pass;
            lines.push(format!("n={n} ({p},{q}) {}/{}", r.rows.iter().filter(|x| x.upper_holds && x.lower_holds).count(), r.rows.len()));
        }
    }
    check(ok, lines.join(", "))
}

fn hedberg_bound() -> Outcome {
    let r = Experiment::new(ExperimentConfig::default_for(TheoremId::T7)).unwrap().run().unwrap();
    let a = &r.aggregate;
    let (ch, drift) = (a.hedberg_constant.unwrap_or(f64::INFINITY), a.hedberg_drift.unwrap_or(f64::INFINITY));
    check(ch.is_finite() && drift < 0.1, format!("C_H = {ch:.5}, refined {:?}, drift {drift:.4}", a.hedberg_constant_refined))
}

fn norm_domination() -> Outcome {
    let mut products = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for id in [TheoremId::T7, TheoremId::T9, TheoremId::T11] {
        let r = Experiment::new(ExperimentConfig::default_for(id)).unwrap().run().unwrap();
        let a = &r.aggregate;
        let c = a.c_emp.unwrap_or(f64::INFINITY);
        let drift = a.refinement_drift.unwrap_or(f64::INFINITY);
        ok &= c.is_finite() && drift < 0.1 && r.aggregate.pass;
        let kn = r.kernel_norm.as_ref().and_then(|k| k.value).unwrap();
        products.push(c * kn);
        lines.push(format!("{id}: C_emp {c:.5} drift {drift:.1e}"));
    }
    let spread = products.iter().map(|p| (p - products[0]).abs() / products[0]).fold(0.0, f64::max);
    ok &= spread <= 1e-9;
    lines.push(format!("C_emp·‖K‖ spread {spread:.1e}"));
    check(ok, lines.join(", "))
}

fn bound_ordering() -> Outcome {
    let cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(workspace().join("configs/compare.json")).unwrap()).unwrap();
    let get = |k: &str| cfg[k].as_f64().unwrap();
    let kp = KernelParams::new(cfg["n"].as_u64().unwrap() as usize, get("alpha"), get("gamma")).unwrap();
    let c = compare_bounds(&kp, get("s"), get("t"), get("t1"), None).unwrap();
    check(
        c.strict && c.dominated && c.equality,
        format!(
            "‖K‖_(s,σ) = {:.5} < ‖K‖_(s,t) = {:.5} ≤ {:.4}·‖K‖_t = {:.5}; ‖K‖_(t,t) vs ‖K‖_t error {:.1e}",
            c.generalized,
            c.morrey,
            c.holder_constant,
            c.holder_constant * c.lebesgue,
            c.equality_rel_error
        ),
    )
}

fn workspace() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace().join("configs/t7.json");
    let run = |threads: &str| {
        let out = dir.path().join(format!("threads{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_morrey-lab"))
            .args(["--threads", threads, "--out-dir"])
            .arg(&out)
            .args(["verify", "--theorem", "T7", "--config"])
            .arg(&config)
            .env_remove("MORREY_LAB_THREADS")
            .output()
            .unwrap();
        assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
        let json = std::fs::read(out.join("report_T7.json")).unwrap();
        let csv = std::fs::read(out.join("report_T7.csv")).unwrap();
        (json, csv)
    };
    let one = run("1");
    let eight = run("8");
    check(one == eight, format!("report {} bytes, csv {} bytes, identical: {}", one.0.len(), one.1.len(), one == eight))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("kernel-norm oracle", kernel_norm_oracle),
        ("dyadic equivalence", dyadic_equivalence),
        ("divergence boundary", divergence_boundary),
        ("Young constant", young_constant),
        ("maximal oracle", maximal_oracle),
        ("Morrey norm oracle", morrey_oracle),
        ("inclusion chain", inclusion_chain),
        ("Hedberg pointwise bound", hedberg_bound),
        ("norm-domination reports", norm_domination),
        ("bound ordering", bound_ordering),
        ("determinism", determinism),
    ];
    // silence the default panic printout; failures are reported below
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            }
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
