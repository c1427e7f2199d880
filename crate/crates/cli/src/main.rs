//! `phisub`: batch front end for bound certificates, order selection,
//! path simulation, Monte Carlo verification and basis tables.
//!
//! Exit codes: 0 success/pass, 2 valid run whose condition is not met, 1 error.

mod config;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use phisub::bounds::{c_n_bound, check_conditions, select_n, Target};
use phisub::process::{
    compute_coefficients, default_reference_order, simulate_paths, verify_reliability, VerifySettings,
};
use phisub::quadrature::{QuadratureRule, TimeGrid};
use phisub::{Report, Selection};

use config::{Overrides, RunConfig};
use output::{num, write_atomic, write_json};

#[derive(Parser, Debug)]
#[command(name = "phisub", version, about = "Certified truncation orders for phi-sub-Gaussian process models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    paths: Option<usize>,
    /// Model order (overrides `n`).
    #[arg(long, global = true, value_name = "N")]
    n: Option<usize>,
    #[arg(long = "n-max", global = true, value_name = "N")]
    n_max: Option<usize>,
    /// Override a config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// C_N and both threshold checks at a fixed N.
    Bound,
    /// Smallest N up to n_max that passes both checks.
    SelectN,
    /// Sample paths of the order-N model.
    Simulate,
    /// Monte Carlo check of the reliability statement.
    Verify,
    /// Basis polynomials on a grid, for plotting.
    Tables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    NotMet,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::NotMet) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let path = cli.config.clone().ok_or_else(|| anyhow!("--config PATH is required"))?;
    let overrides = Overrides {
        sets: cli.sets.clone(),
        out: cli.out.clone(),
        seed: cli.seed,
        paths: cli.paths,
        n: cli.n,
        n_max: cli.n_max,
    };
    let cfg = config::load(&path, &overrides)?;
    let command = cli.command;
    match cli.threads {
        Some(0) => Err(anyhow!("--threads must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("starting worker pool")?
            .install(|| dispatch(command, &cfg)),
        None => dispatch(command, &cfg),
    }
}

fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Bound => cmd_bound(cfg),
        Command::SelectN => cmd_select_n(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Tables => cmd_tables(cfg),
    }
}

fn target(cfg: &RunConfig) -> Target<f64> {
    Target { delta: cfg.delta, alpha: cfg.alpha }
}

fn require_n(cfg: &RunConfig) -> Result<usize> {
    cfg.n.ok_or_else(|| anyhow!("n: required (config key `n` or --n)"))
}

fn report_csv(report: &Report) -> String {
    format!("{}\n{}\n", Report::CSV_HEADER, report.csv_row())
}

fn summary(report: &Report) -> String {
    format!(
        "N={} C_N={} threshold_rel={} threshold_acc={} pass={}",
        report.n,
        num(report.c_n),
        num(report.threshold_rel),
        num(report.threshold_acc),
        check_conditions(report)
    )
}

fn cmd_bound(cfg: &RunConfig) -> Result<Outcome> {
    let n = require_n(cfg)?;
    let report = c_n_bound(&cfg.process, n, &target(cfg), &cfg.resolution)?;
    write_json(&cfg.out, "report.json", &report)?;
    write_atomic(&cfg.out, "report.csv", report_csv(&report).as_bytes())?;
    println!("{}", summary(&report));
    if !report.valid {
        eprintln!(
            "warning: closed-form I(w) = {} disagrees with quadrature {}",
            num(report.gf_integral_value),
            num(report.gf_integral_oracle)
        );
    }
    Ok(if check_conditions(&report) { Outcome::Pass } else { Outcome::NotMet })
}

fn cmd_select_n(cfg: &RunConfig) -> Result<Outcome> {
    let n_max = cfg.n_max.ok_or_else(|| anyhow!("n_max: required (config key `n_max` or --n-max)"))?;
    let selection = select_n(&cfg.process, &target(cfg), n_max, &cfg.resolution)?;
    write_json(&cfg.out, "report.json", &selection)?;
    match &selection {
        Selection::Found(report) => {
            write_atomic(&cfg.out, "report.csv", report_csv(report).as_bytes())?;
            println!("{}", summary(report));
            Ok(Outcome::Pass)
        }
        Selection::NotFound { n_max, best } => {
            write_atomic(&cfg.out, "report.csv", report_csv(best).as_bytes())?;
            eprintln!(
                "no N <= {n_max} passes; best C_N = {} at N = {} (threshold_rel {}, threshold_acc {})",
                num(best.c_n),
                best.n,
                num(best.threshold_rel),
                num(best.threshold_acc)
            );
            Ok(Outcome::NotMet)
        }
    }
}

fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome> {
    let n = require_n(cfg)?;
    let spec = &cfg.process;
    let grid = TimeGrid::new(spec.horizon, cfg.resolution.time_points)?;
    let rule = QuadratureRule::for_family(&spec.family, cfg.resolution.spectral_nodes)?;
    let table = compute_coefficients(spec, n, &rule, &grid)?;
    let paths = simulate_paths(spec, &table, cfg.xi_mode, cfg.paths, cfg.seed)?;
    let mut csv = String::from("path_id,t,value\n");
    for (i, path) in paths.iter().enumerate() {
        for (t, v) in table.time_grid.iter().zip(path) {
            writeln!(csv, "{i},{},{}", num(*t), num(*v))?;
        }
    }
    write_atomic(&cfg.out, "paths.csv", csv.as_bytes())?;
    println!("paths={} N={n} points={}", cfg.paths, grid.len());
    Ok(Outcome::Pass)
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let model_n = match (cfg.n, cfg.n_max) {
        (Some(n), _) => n,
        (None, Some(n_max)) => match select_n(&cfg.process, &target(cfg), n_max, &cfg.resolution)? {
            Selection::Found(r) => r.n,
            Selection::NotFound { best, .. } => {
                eprintln!("no N <= {n_max} passes; best C_N = {} at N = {}", num(best.c_n), best.n);
                return Ok(Outcome::NotMet);
            }
        },
        (None, None) => return Err(anyhow!("n: required (or n_max to select it first)")),
    };
    let reference_n = cfg.reference_n.unwrap_or_else(|| default_reference_order(model_n));
    if reference_n < model_n {
        return Err(anyhow!("reference_n: {reference_n} is below the model order {model_n}"));
    }
    let settings = VerifySettings {
        model_n,
        reference_n,
        delta: cfg.delta,
        alpha: cfg.alpha,
        paths: cfg.paths,
        mode: cfg.xi_mode,
        seed: cfg.seed,
    };
    let report = verify_reliability(&cfg.process, &settings, &cfg.resolution)?;
    write_json(&cfg.out, "report.json", &report)?;
    let csv = format!(
        "paths,exceedances,empirical_prob,alpha,delta,reference_N,model_N,xi_mode,seed,mean_norm,max_norm,reference_energy_gap\n\
         {},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.paths,
        report.exceedances,
        num(report.empirical_prob),
        num(report.alpha),
        num(report.delta),
        report.reference_n,
        report.model_n,
        report.xi_mode.name(),
        report.seed,
        num(report.mean_norm),
        num(report.max_norm),
        num(report.reference_energy_gap)
    );
    write_atomic(&cfg.out, "report.csv", csv.as_bytes())?;
    println!(
        "N={model_n} reference_N={reference_n} exceedances={}/{} empirical_prob={} alpha={}",
        report.exceedances,
        report.paths,
        num(report.empirical_prob),
        num(report.alpha)
    );
    Ok(if report.passed() { Outcome::Pass } else { Outcome::NotMet })
}

fn cmd_tables(cfg: &RunConfig) -> Result<Outcome> {
    let family = &cfg.family;
    let (lo, hi) = cfg.table_range;
    let m = cfg.table_points;
    let name = family.kind().name();
    let mut csv = String::from("family,k,t,poly,orthonormal\n");
    let mut rows = 0usize;
    for k in 0..=cfg.table_k_max {
        for j in 0..m {
            let t = if j + 1 == m { hi } else { lo + (hi - lo) * j as f64 / (m - 1) as f64 };
            let poly = family.eval_poly(k, t)?;
            let orth = family
                .eval_orthonormal(k, t)
                .with_context(|| format!("table_lower/table_upper: orthonormal function undefined at t = {t}"))?;
            writeln!(csv, "{name},{k},{},{},{}", num(t), num(poly), num(orth))?;
            rows += 1;
        }
    }
    write_atomic(&cfg.out, "tables.csv", csv.as_bytes())?;
    println!("rows={rows}");
    Ok(Outcome::Pass)
}
