//! Run configuration: a flat TOML table, optionally patched by `--set key=value`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use phisub::bounds::Resolution;
use phisub::process::{builtin_kernel, KernelKind, XiMode};
use phisub::quadrature::MAX_NODES;
use phisub::{Family, FamilyKind, Orlicz, Process, TailBound};
use toml::{Table, Value};

pub const DEFAULT_SEED: u64 = 20_240_607;

const KEYS: &[&str] = &[
    "family",
    "family_alpha",
    "kernel",
    "kernel_rate",
    "horizon",
    "p",
    "gamma",
    "tau",
    "w",
    "delta",
    "alpha",
    "n",
    "n_max",
    "reference_n",
    "spectral_nodes",
    "reference_nodes",
    "oracle_nodes",
    "time_points",
    "paths",
    "seed",
    "xi_mode",
    "out",
    "table_k_max",
    "table_points",
    "table_lower",
    "table_upper",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Family,
    pub process: Process,
    pub delta: f64,
    pub alpha: f64,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub reference_n: Option<usize>,
    pub resolution: Resolution,
    pub paths: usize,
    pub seed: u64,
    pub xi_mode: XiMode,
    pub out: PathBuf,
    pub table_k_max: usize,
    pub table_points: usize,
    pub table_range: (f64, f64),
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut table: Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
    for set in &overrides.sets {
        let (key, raw) = set.split_once('=').ok_or_else(|| anyhow!("--set expects key=value, got `{set}`"))?;
        table.insert(key.trim().to_string(), parse_value(raw.trim()));
    }
    let mut cfg = from_table(&table)?;
    if let Some(out) = &overrides.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(paths) = overrides.paths {
        if paths == 0 {
            bail!("paths: must be at least 1");
        }
        cfg.paths = paths;
    }
    if overrides.n.is_some() {
        cfg.n = overrides.n;
    }
    if overrides.n_max.is_some() {
        cfg.n_max = overrides.n_max;
    }
    Ok(cfg)
}

// Bare words such as `family=laguerre` are taken as strings.
fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

pub fn from_table(table: &Table) -> Result<RunConfig> {
    if let Some(key) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        bail!("{key}: unknown key");
    }
    let r = Reader(table);

    let family_name = r.string("family")?.unwrap_or_else(|| "legendre".into());
    let family_alpha = r.float("family_alpha")?;
    let family = match family_name.as_str() {
        "legendre" => {
            if family_alpha.is_some() {
                bail!("family_alpha: not used by the legendre family");
            }
            Family::legendre()
        }
        "laguerre" => {
            let a = family_alpha.unwrap_or(0.0);
            if !(a > -1.0) {
                bail!("family_alpha: laguerre needs alpha > -1, got {a}");
            }
            Family::new(FamilyKind::GeneralizedLaguerre, Some(a)).map_err(|e| anyhow!("family_alpha: {e}"))?
        }
        "gegenbauer" => {
            let a = family_alpha.ok_or_else(|| anyhow!("family_alpha: required for the gegenbauer family"))?;
            if !(a > -0.5) || a == 0.0 {
                bail!("family_alpha: gegenbauer needs alpha > -1/2 and alpha != 0, got {a}");
            }
            Family::gegenbauer(a).map_err(|e| anyhow!("family_alpha: {e}"))?
        }
        other => bail!("family: unknown family `{other}` (legendre, laguerre, gegenbauer)"),
    };

    let kernel_name = r.string("kernel")?.unwrap_or_else(|| "exp-bounded".into());
    KernelKind::parse(&kernel_name).map_err(|e| anyhow!("kernel: {e}"))?;
    let rate = r.float("kernel_rate")?.unwrap_or(1.0);
    if !(rate > 0.0) || !rate.is_finite() {
        bail!("kernel_rate: must be positive, got {rate}");
    }
    let kernel = builtin_kernel(&kernel_name, rate).map_err(|e| anyhow!("kernel: {e}"))?;
    if kernel.domain() != family.domain() {
        bail!("kernel: `{kernel_name}` does not live on the {} spectral domain", family.kind().name());
    }

    let horizon = r.float("horizon")?.unwrap_or(1.0);
    positive("horizon", horizon)?;
    let p = r.float("p")?.unwrap_or(2.0);
    if !(p >= 1.0) || !p.is_finite() {
        bail!("p: must be at least 1, got {p}");
    }
    let gamma = r.float("gamma")?.unwrap_or(2.0);
    if !(gamma > 1.0) || !gamma.is_finite() {
        bail!("gamma: must exceed 1, got {gamma}");
    }
    let tau = r.float("tau")?.unwrap_or(1.0);
    positive("tau", tau)?;
    let w = r.float("w")?.unwrap_or(0.5);
    if !(w > 0.0 && w < 1.0) {
        bail!("w: must lie in (0, 1), got {w}");
    }
    let delta = r.float("delta")?.unwrap_or(0.1);
    positive("delta", delta)?;
    let alpha = r.float("alpha")?.unwrap_or(0.05);
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("alpha: must lie in (0, 1), got {alpha}");
    }

    let n = r.count("n")?;
    let n_max = r.count("n_max")?;
    let reference_n = r.count("reference_n")?;
    let defaults = Resolution::default();
    let resolution = Resolution {
        spectral_nodes: nodes(&r, "spectral_nodes", defaults.spectral_nodes)?,
        reference_nodes: nodes(&r, "reference_nodes", defaults.reference_nodes)?,
        oracle_nodes: nodes(&r, "oracle_nodes", defaults.oracle_nodes)?,
        time_points: r.count("time_points")?.unwrap_or(defaults.time_points),
    };
    if resolution.time_points < 3 || resolution.time_points.is_multiple_of(2) {
        bail!("time_points: must be odd and at least 3, got {}", resolution.time_points);
    }
    let paths = r.count("paths")?.unwrap_or(1000);
    if paths == 0 {
        bail!("paths: must be at least 1");
    }
    let seed = match r.0.get("seed") {
        None => DEFAULT_SEED,
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(Value::String(s)) => s.parse().map_err(|_| anyhow!("seed: `{s}` is not an unsigned 64-bit integer"))?,
        Some(v) => bail!("seed: expected a non-negative integer, got {v}"),
    };
    let xi_name = r.string("xi_mode")?.unwrap_or_else(|| "norm-decaying".into());
    let xi_mode = [XiMode::UnitVariance, XiMode::NormDecaying, XiMode::Zero]
        .into_iter()
        .find(|m| m.name() == xi_name)
        .ok_or_else(|| anyhow!("xi_mode: unknown mode `{xi_name}` (unit-variance, norm-decaying, zero)"))?;
    let out = PathBuf::from(r.string("out")?.unwrap_or_else(|| "out".into()));

    let table_k_max = r.count("table_k_max")?.unwrap_or(3);
    if table_k_max > phisub::orthopoly::MAX_DEGREE {
        bail!("table_k_max: at most {}", phisub::orthopoly::MAX_DEGREE);
    }
    let table_points = r.count("table_points")?.unwrap_or(5);
    if table_points < 2 {
        bail!("table_points: must be at least 2");
    }
    let (lo_default, hi_default) = match family.kind() {
        FamilyKind::GeneralizedLaguerre => (0.0, 10.0),
        _ => (-1.0, 1.0),
    };
    let lo = r.float("table_lower")?.unwrap_or(lo_default);
    let hi = r.float("table_upper")?.unwrap_or(hi_default);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        bail!("table_upper: must exceed table_lower ({lo} vs {hi})");
    }
    if !family.domain().contains(lo) {
        bail!("table_lower: {lo} lies outside the {} domain", family.kind().name());
    }
    if !family.domain().contains(hi) {
        bail!("table_upper: {hi} lies outside the {} domain", family.kind().name());
    }

    let orlicz = Orlicz::new(gamma).map_err(|e| anyhow!("gamma: {e}"))?;
    let tail = TailBound::new(tau, w).map_err(|e| anyhow!("w: {e}"))?;
    let process = Process::new(kernel, family, horizon, p, orlicz, tail).map_err(|e| anyhow!("kernel: {e}"))?;

    Ok(RunConfig {
        family,
        process,
        delta,
        alpha,
        n,
        n_max,
        reference_n,
        resolution,
        paths,
        seed,
        xi_mode,
        out,
        table_k_max,
        table_points,
        table_range: (lo, hi),
    })
}

fn positive(key: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        bail!("{key}: must be positive and finite, got {v}");
    }
    Ok(())
}

fn nodes(r: &Reader, key: &str, default: usize) -> Result<usize> {
    let n = r.count(key)?.unwrap_or(default);
    if n == 0 || n > MAX_NODES {
        bail!("{key}: must lie in 1..={MAX_NODES}, got {n}");
    }
    Ok(n)
}

struct Reader<'a>(&'a Table);

impl Reader<'_> {
    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => bail!("{key}: expected a number, got {v}"),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => {
                usize::try_from(*i).map(Some).map_err(|_| anyhow!("{key}: {i} is too large"))
            }
            Some(v) => bail!("{key}: expected a non-negative integer, got {v}"),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => bail!("{key}: expected a string, got {v}"),
        }
    }
}
