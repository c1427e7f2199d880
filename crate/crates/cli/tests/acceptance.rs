//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown:
//! `cargo test -p phisub-cli --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use phisub::bounds::{
    c_n_bound, check_conditions, gf_square_integral, gf_square_integral_oracle, select_n, tau_bound, Resolution, Target,
};
use phisub::process::{builtin_kernel, default_reference_order, verify_reliability, VerifySettings, XiMode};
use phisub::specfun::{hyp2f1, hyp2f1_quadratic, hyp2f1_regularized, hyp2f1_series, log_gamma, upper_incomplete_gamma};
use phisub::{Family, Orlicz, Process, Rule, TailBound};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn families() -> Vec<Family> {
    let mut v = vec![Family::legendre()];
    v.extend([-0.5, 0.0, 1.7].map(|a| Family::laguerre(a).unwrap()));
    v.extend([0.5, 1.0, 2.3].map(|a| Family::gegenbauer(a).unwrap()));
    v
}

fn fixture(kernel: &str, family: Family) -> Process {
    Process::new(
        builtin_kernel(kernel, 1.0).unwrap(),
        family,
        1.0,
        2.0,
        Orlicz::sub_gaussian(),
        TailBound::new(1.0, 0.5).unwrap(),
    )
    .unwrap()
}

fn orthonormality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for family in families() {
        let rule = Rule::for_family(&family, 256).map_err(|e| e.to_string())?;
        let basis: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&x| family.orthonormal_all(20, x))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for n in 0..=20 {
            for m in 0..=20 {
                let g: f64 = rule.weights().iter().zip(&basis).map(|(w, b)| w * b[n] * b[m]).sum();
                let err = (g - if n == m { 1.0 } else { 0.0 }).abs();
                if err > 1e-7 {
                    return Err(format!("{family}: G[{n}][{m}] = {g}"));
                }
                worst = worst.max(err);
            }
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(30) {
        return Err(format!("took {took:.1?}"));
    }
    Ok(format!("7 families, max |G - I| = {worst:.1e}, {took:.2?}"))
}

fn closed_form_vs_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    for family in families() {
        for w in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let closed = gf_square_integral(&family, w).map_err(|e| e.to_string())?;
            let oracle = gf_square_integral_oracle(&family, w, 256).map_err(|e| e.to_string())?;
            let r = rel(closed, oracle);
            if r > 1e-6 {
                return Err(format!("{family} w={w}: {closed} vs {oracle}"));
            }
            worst = worst.max(r);
        }
    }
    Ok(format!("35 cases, max rel = {worst:.1e}"))
}

fn reduction_identity() -> Outcome {
    let leg = Family::legendre();
    let geg = Family::gegenbauer(0.5).unwrap();
    let tb = TailBound::new(1.0, 0.5).unwrap();
    let e = |x: phisub::Error| x.to_string();
    let i_l = gf_square_integral(&leg, 0.5).map_err(e)?;
    let i_g = gf_square_integral(&geg, 0.5).map_err(e)?;
    if rel(i_g, i_l) > 1e-8 {
        return Err(format!("I(0.5): {i_g} vs {i_l}"));
    }
    for k in 0..=20 {
        let (l, g) = (tau_bound(&leg, &tb, k).map_err(e)?, tau_bound(&geg, &tb, k).map_err(e)?);
        if rel(g, l) > 1e-8 {
            return Err(format!("tau_bound k={k}: {g} vs {l}"));
        }
    }
    let res = Resolution::default();
    let target = Target { delta: 0.1, alpha: 0.05 };
    let mut worst = 0.0_f64;
    for n in [0, 1, 2, 4, 8] {
        let cl = c_n_bound(&fixture("exp-bounded", leg), n, &target, &res).map_err(e)?.c_n;
        let cg = c_n_bound(&fixture("exp-bounded", geg), n, &target, &res).map_err(e)?.c_n;
        if rel(cg, cl) > 1e-8 {
            return Err(format!("C_{n}: {cg} vs {cl}"));
        }
        worst = worst.max(rel(cg, cl));
    }
    Ok(format!("I, tau_bound k<=20, C_N N in {{0,1,2,4,8}}; max rel = {worst:.1e}"))
}

fn spot_values() -> Outcome {
    let e = |x: phisub::Error| x.to_string();
    let l = gf_square_integral(&Family::legendre(), 0.5).map_err(e)?;
    let q = gf_square_integral(&Family::laguerre(0.0).unwrap(), 0.5).map_err(e)?;
    let g = gf_square_integral(&Family::gegenbauer(1.0).unwrap(), 0.5).map_err(e)?;
    let checks = [
        ("legendre", l, 2.0 * 3.0_f64.ln(), 1e-9),
        ("laguerre", q, 4.0 / 3.0, 1e-9),
        ("gegenbauer", g, 2.0 * std::f64::consts::PI / 3.0, 1e-7),
    ];
    for (name, got, want, tol) in checks {
        if (got - want).abs() > tol {
            return Err(format!("{name}: {got} vs {want}"));
        }
    }
    Ok(format!("I = {l:.12}, {q:.12}, {g:.12}"))
}

fn threshold_arithmetic() -> Outcome {
    let s = Orlicz::new(2.0).map_err(|e| e.to_string())?;
    let r = s.threshold_reliability(1.0, 0.05, 2.0).map_err(|e| e.to_string())?;
    let want = 1.0 / (2.0 * 40.0_f64.ln());
    if (r - want).abs() > 1e-12 {
        return Err(format!("reliability {r} vs {want}"));
    }
    let a = s.threshold_accuracy(1.0, 2.0).map_err(|e| e.to_string())?;
    if a != 0.5 {
        return Err(format!("accuracy {a} != 0.5"));
    }
    Ok(format!("reliability = {r:.15}, accuracy = {a}"))
}

fn monte_carlo_gate() -> Outcome {
    let start = Instant::now();
    let spec = fixture("exp-bounded", Family::legendre());
    let res = Resolution::default();
    let target = Target { delta: 0.1, alpha: 0.05 };
    let e = |x: phisub::Error| x.to_string();
    let n = select_n(&spec, &target, 30, &res).map_err(e)?.found().map(|r| r.n).ok_or("select_N found no order")?;
    let mut settings = VerifySettings {
        model_n: n,
        reference_n: default_reference_order(n),
        delta: target.delta,
        alpha: target.alpha,
        paths: 10_000,
        mode: XiMode::NormDecaying,
        seed: 20_240_607,
    };
    let report = verify_reliability(&spec, &settings, &res).map_err(e)?;
    settings.delta = target.delta / 2.0;
    let halved = verify_reliability(&spec, &settings, &res).map_err(e)?;
    let took = start.elapsed();
    println!(
        "    info: delta halved to {}: empirical_prob = {} (informational)",
        settings.delta, halved.empirical_prob
    );
    let detail = format!(
        "delta=0.1 N={n}: empirical_prob = {} over {} paths (max norm {:.3e}), {took:.1?}",
        report.empirical_prob, report.paths, report.max_norm
    );
    if !report.passed() {
        return Err(detail);
    }
    if took > Duration::from_secs(120) {
        return Err(format!("too slow: {detail}"));
    }
    Ok(detail)
}

fn select_n_contract() -> Outcome {
    let res = Resolution::default();
    let cases = [
        (fixture("exp-bounded", Family::legendre()), 0.015),
        (fixture("exp-decay", Family::laguerre(0.0).unwrap()), 0.005),
        (fixture("poly-bounded", Family::gegenbauer(1.0).unwrap()), 0.5),
    ];
    let e = |x: phisub::Error| x.to_string();
    let mut found = Vec::new();
    for (spec, delta) in cases {
        let target = Target { delta, alpha: 0.05 };
        let n = select_n(&spec, &target, 20, &res)
            .map_err(e)?
            .found()
            .map(|r| r.n)
            .ok_or_else(|| format!("{}: not found", spec.family))?;
        if n == 0 {
            return Err(format!("{}: N = 0 leaves nothing to contrast", spec.family));
        }
        if !check_conditions(&c_n_bound(&spec, n, &target, &res).map_err(e)?) {
            return Err(format!("{}: N = {n} fails on recomputation", spec.family));
        }
        if check_conditions(&c_n_bound(&spec, n - 1, &target, &res).map_err(e)?) {
            return Err(format!("{}: N - 1 = {} passes", spec.family, n - 1));
        }
        found.push(format!("{}:N={n}", spec.family));
    }
    Ok(found.join(", "))
}

fn run_cli(dir: &Path, cmd: &str, out: &str, threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_phisub"))
        .args([cmd, "--config", dir.join("run.toml").to_str().unwrap()])
        .args(["--out", dir.join(out).to_str().unwrap(), "--threads", threads])
        .output()
        .map_err(|e| e.to_string())?;
    match status.status.code() {
        Some(0) | Some(2) => Ok(()),
        _ => Err(format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr))),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = "family = \"legendre\"\nkernel = \"exp-bounded\"\ndelta = 0.1\nalpha = 0.05\nn = 1\npaths = 2000\n\
                  seed = 7\nxi_mode = \"norm-decaying\"\n";
    fs::write(dir.path().join("run.toml"), config).map_err(|e| e.to_string())?;
    let runs = [("a", "1"), ("b", "1"), ("c", "8")];
    for (out, threads) in runs {
        run_cli(dir.path(), "simulate", &format!("sim-{out}"), threads)?;
        run_cli(dir.path(), "verify", &format!("ver-{out}"), threads)?;
    }
    let read = |p: String| fs::read(dir.path().join(p)).map_err(|e| e.to_string());
    let mut compared = 0;
    for file in ["sim-{}/paths.csv", "ver-{}/report.json", "ver-{}/report.csv"] {
        let a = read(file.replace("{}", "a"))?;
        for other in ["b", "c"] {
            if read(file.replace("{}", other))? != a {
                return Err(format!("{} differs between runs a and {other}", file.replace("{}", "*")));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} byte comparisons (repeat, 1 vs 8 threads) identical"))
}

// Adaptive Simpson kept local so the oracle shares no code with the library.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn special_functions() -> Outcome {
    let e = |x: phisub::Error| x.to_string();
    let mut checks: Vec<(&str, f64, f64, f64)> = vec![
        ("lngamma(1)", log_gamma(1.0).map_err(e)?, 0.0, 1e-13),
        ("lngamma(0.5)", log_gamma(0.5).map_err(e)?, 0.5 * std::f64::consts::PI.ln(), 1e-13),
        ("lngamma(5)", log_gamma(5.0).map_err(e)?, 24.0_f64.ln(), 1e-13),
        ("Gamma(1,2)", upper_incomplete_gamma(1.0, 2.0).map_err(e)?, (-2.0_f64).exp(), 1e-10),
        ("Gamma(3,0)", upper_incomplete_gamma(3.0, 0.0).map_err(e)?, 2.0, 1e-10),
    ];
    let oracle = simpson(&|u: f64| u.sqrt() * (-u).exp(), 1.0, 60.0, 1e-14);
    checks.push(("Gamma(1.5,1)", upper_incomplete_gamma(1.5, 1.0).map_err(e)?, oracle, 1e-10));
    for (a, b, c) in [(0.3, 1.7, 2.5), (1.0, 1.0, 2.0), (-2.0, 0.5, 0.7)] {
        checks.push(("2F1(z=0)", hyp2f1(a, b, c, 0.0).map_err(e)?.value, 1.0, 1e-9));
    }
    checks.push(("2F1(1,1;2;.5)", hyp2f1(1.0, 1.0, 2.0, 0.5).map_err(e)?.value, 2.0 * 2.0_f64.ln(), 1e-9));
    checks.push(("2F1(.5,1;1.5;.25)", hyp2f1(0.5, 1.0, 1.5, 0.25).map_err(e)?.value, 0.5_f64.atanh() / 0.5, 1e-9));
    checks.push(("2F1~(a,a;1;0)", hyp2f1_regularized(0.7, 0.7, 1.0, 0.0).map_err(e)?.value, 1.0, 1e-9));
    let inv_gamma_15 = 2.0 / std::f64::consts::PI.sqrt();
    checks.push(("2F1~(.5,1;1.5;0)", hyp2f1_regularized(0.5, 1.0, 1.5, 0.0).map_err(e)?.value, inv_gamma_15, 1e-9));
    checks.push(("2F1~(1,1;2;.5)", hyp2f1_regularized(1.0, 1.0, 2.0, 0.5).map_err(e)?.value, 2.0 * 2.0_f64.ln(), 1e-9));
    for (name, got, want, tol) in &checks {
        if rel(*got, *want) > *tol {
            return Err(format!("{name}: {got} vs {want}"));
        }
    }

    // Call sites use (a, a + 1/2; a + 1; z).
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for a in [0.5, 1.0, 2.3, -0.25, 3.7] {
        for i in 1..50 {
            let z = 0.4 + 0.5 * f64::from(i) / 50.0;
            let series = hyp2f1_series(a, a + 0.5, a + 1.0, z).map_err(e)?.value;
            let transformed = hyp2f1_quadratic(a, a + 1.0, z).map_err(e)?.value;
            let r = rel(transformed, series);
            if r > 1e-9 {
                return Err(format!("a={a} z={z}: series {series} vs transformed {transformed}"));
            }
            worst = worst.max(r);
            cases += 1;
        }
    }
    Ok(format!("{} examples; series vs transformation max rel {worst:.1e} over {cases} points", checks.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("orthonormality", orthonormality),
        ("closed form vs oracle", closed_form_vs_oracle),
        ("gegenbauer(1/2) reduction", reduction_identity),
        ("spot values", spot_values),
        ("threshold arithmetic", threshold_arithmetic),
        ("monte carlo gate", monte_carlo_gate),
        ("select_N contract", select_n_contract),
        ("determinism", determinism),
        ("special functions", special_functions),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
