//! Kernels `f(t, λ)`, model coefficients `â_k(t)`, sample-path synthesis and
//! Monte Carlo verification of the reliability statement
//! `P{‖X − X_N‖_{L_p[0,T]} > δ} ≤ α`.
//!
//! Every Monte Carlo path draws from its own ChaCha8 stream selected by
//! `(seed, path_index)`, so results do not depend on how paths are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Resolution};
use crate::orthopoly::{Domain, PolynomialFamily};
use crate::quadrature::{lp_norm, QuadratureRule, TimeGrid};
use crate::{Error, OrliczSpec, Real, Result, TailBoundSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `e^{c t λ}` on `[−1, 1]`.
    ExpBounded,
    /// `e^{−c (1+t) λ}` on `[0, ∞)`.
    ExpDecay,
    /// `(1 + c t λ)²` on `[−1, 1]`.
    PolyBounded,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::ExpBounded => "exp-bounded",
            KernelKind::ExpDecay => "exp-decay",
            KernelKind::PolyBounded => "poly-bounded",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "exp-bounded" => Ok(KernelKind::ExpBounded),
            "exp-decay" => Ok(KernelKind::ExpDecay),
            "poly-bounded" => Ok(KernelKind::PolyBounded),
            other => Err(Error::UnknownKernel(other.to_string())),
        }
    }
}

/// Built-in kernel with its rate parameter `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel<T> {
    kind: KernelKind,
    rate: T,
}

/// Looks up a built-in kernel by name.
pub fn builtin_kernel<T: Real>(name: &str, rate: T) -> Result<Kernel<T>> {
    Kernel::new(KernelKind::parse(name)?, rate)
}

impl<T: Real> Kernel<T> {
    pub fn new(kind: KernelKind, rate: T) -> Result<Self> {
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(Error::domain("kernel", format!("rate = {rate} must be positive")));
        }
        Ok(Self { kind, rate })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            KernelKind::ExpDecay => Domain::HalfLine,
            _ => Domain::Symmetric,
        }
    }

    pub fn eval(&self, t: T, lambda: T) -> T {
        let c = self.rate;
        match self.kind {
            KernelKind::ExpBounded => (c * t * lambda).exp(),
            KernelKind::ExpDecay => (-c * (T::one() + t) * lambda).exp(),
            KernelKind::PolyBounded => {
                let v = T::one() + c * t * lambda;
                v * v
            }
        }
    }

    /// Closed-form `E(t) = ∫ |f(t, λ)|² dλ` over the kernel's domain.
    pub fn energy(&self, t: T) -> T {
        let c = self.rate;
        let two = T::lit(2.0);
        match self.kind {
            KernelKind::ExpBounded => {
                let x = two * c * t;
                if x.abs() < T::lit(1e-4) {
                    // sinh(x)/(x/2) by its Taylor series
                    two * (T::one() + x * x / T::lit(6.0) + x.powi(4) / T::lit(120.0))
                } else {
                    x.sinh() / (c * t)
                }
            }
            KernelKind::ExpDecay => T::one() / (two * c * (T::one() + t)),
            KernelKind::PolyBounded => {
                // ∫ (1 + xλ)⁴ dλ over [−1, 1]
                let x2 = (c * t) * (c * t);
                two + T::lit(4.0) * x2 + T::lit(0.4) * x2 * x2
            }
        }
    }
}

/// Process model inputs: kernel, basis, horizon, norm exponent and the
/// Orlicz/tail constants used by the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessSpec<T> {
    pub kernel: Kernel<T>,
    pub family: PolynomialFamily<T>,
    pub horizon: T,
    pub p: T,
    pub orlicz: OrliczSpec<T>,
    pub tail: TailBoundSpec<T>,
}

impl<T: Real> ProcessSpec<T> {
    pub fn new(
        kernel: Kernel<T>,
        family: PolynomialFamily<T>,
        horizon: T,
        p: T,
        orlicz: OrliczSpec<T>,
        tail: TailBoundSpec<T>,
    ) -> Result<Self> {
        if kernel.domain() != family.domain() {
            return Err(Error::domain(
                "process",
                format!("kernel {} does not live on the {} domain", kernel.kind().name(), family.kind().name()),
            ));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::domain("process", format!("T = {horizon} must be positive")));
        }
        if !(p >= T::one()) || !p.is_finite() {
            return Err(Error::domain("process", format!("p = {p} must be at least 1")));
        }
        Ok(Self { kernel, family, horizon, p, orlicz, tail })
    }
}

/// `â_k(t_j)` for `k = 0..=N` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable<T> {
    #[serde(rename = "N")]
    pub n: usize,
    pub time_grid: Vec<T>,
    /// Row `k` holds `â_k` over the grid.
    pub values: Vec<Vec<T>>,
    pub quadrature_nodes_used: usize,
}

impl<T: Real> CoefficientTable<T> {
    pub fn row(&self, k: usize) -> &[T] {
        &self.values[k]
    }

    /// Coefficients `â_0(t_j), …, â_N(t_j)` at grid index `j`.
    pub fn column(&self, j: usize) -> Vec<T> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// Table restricted to the first `n + 1` rows.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.n {
            return Err(Error::Size { op: "truncated", detail: format!("N = {n} exceeds table order {}", self.n) });
        }
        Ok(Self {
            n,
            time_grid: self.time_grid.clone(),
            values: self.values[..=n].to_vec(),
            quadrature_nodes_used: self.quadrature_nodes_used,
        })
    }
}

/// `â_k(t) = Σ_i w_i f(t, λ_i) ĝ_k(λ_i)` for `k ≤ N` at every grid point.
pub fn compute_coefficients<T: Real>(
    spec: &ProcessSpec<T>,
    n: usize,
    rule: &QuadratureRule<T>,
    grid: &TimeGrid<T>,
) -> Result<CoefficientTable<T>> {
    if !rule.covers(spec.family.domain()) {
        return Err(Error::domain("compute_coefficients", "quadrature rule does not cover the family domain"));
    }
    let basis: Vec<Vec<T>> = rule.nodes().iter().map(|&x| spec.family.orthonormal_all(n, x)).collect::<Result<_>>()?;
    let times = grid.points();
    let columns: Vec<Vec<T>> = times
        .par_iter()
        .map(|&t| {
            let mut acc = vec![T::zero(); n + 1];
            for ((&x, &w), phi) in rule.nodes().iter().zip(rule.weights()).zip(&basis) {
                let fw = w * spec.kernel.eval(t, x);
                for (a, &g) in acc.iter_mut().zip(phi) {
                    *a = *a + fw * g;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![Vec::with_capacity(times.len()); n + 1];
    for col in &columns {
        for (row, &v) in values.iter_mut().zip(col) {
            if !v.is_finite() {
                return Err(Error::Evaluation { node: f64::NAN, value: v.as_f64() });
            }
            row.push(v);
        }
    }
    Ok(CoefficientTable { n, time_grid: times, values, quadrature_nodes_used: rule.len() })
}

/// `X_N(t_j) = Σ_k ξ_k â_k(t_j)`.
pub fn synthesize_path<T: Real>(table: &CoefficientTable<T>, xi: &[T]) -> Result<Vec<T>> {
    if xi.len() != table.n + 1 {
        return Err(Error::LengthMismatch { expected: table.n + 1, actual: xi.len() });
    }
    let mut path = vec![T::zero(); table.time_grid.len()];
    for (row, &x) in table.values.iter().zip(xi) {
        for (p, &a) in path.iter_mut().zip(row) {
            *p = *p + x * a;
        }
    }
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiMode {
    /// Independent standard Gaussians, `E ξ_k² = 1`.
    UnitVariance,
    /// Gaussians with `σ_k = min(1, τ-bound_k)`.
    NormDecaying,
    /// All coefficients zero.
    Zero,
}

impl XiMode {
    pub fn name(self) -> &'static str {
        match self {
            XiMode::UnitVariance => "unit-variance",
            XiMode::NormDecaying => "norm-decaying",
            XiMode::Zero => "zero",
        }
    }
}

/// Standard deviations `σ_0, …, σ_{count−1}` used by `mode`.
pub fn xi_scales<T: Real>(
    mode: XiMode,
    count: usize,
    tb: &TailBoundSpec<T>,
    family: &PolynomialFamily<T>,
) -> Result<Vec<T>> {
    (0..count)
        .map(|k| match mode {
            XiMode::UnitVariance => Ok(T::one()),
            XiMode::Zero => Ok(T::zero()),
            XiMode::NormDecaying => Ok(bounds::tau_bound(family, tb, k)?.min(T::one())),
        })
        .collect()
}

/// Random stream for one Monte Carlo path.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Draws `count` coefficients `ξ_k` with the scales of `mode`.
pub fn draw_xi<T: Real, R: rand::Rng>(
    mode: XiMode,
    count: usize,
    tb: &TailBoundSpec<T>,
    family: &PolynomialFamily<T>,
    rng: &mut R,
) -> Result<Vec<T>> {
    if count == 0 {
        return Err(Error::Size { op: "draw_xi", detail: "count must be at least 1".into() });
    }
    let scales = xi_scales(mode, count, tb, family)?;
    Ok(scales
        .into_iter()
        .map(|s| {
            let z: f64 = StandardNormal.sample(rng);
            s * T::lit(z)
        })
        .collect())
}

/// `paths` sample paths of the model in `table`, path `i` driven by
/// `path_rng(seed, i)`.
pub fn simulate_paths<T: Real>(
    spec: &ProcessSpec<T>,
    table: &CoefficientTable<T>,
    mode: XiMode,
    paths: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            let xi = draw_xi(mode, table.n + 1, &spec.tail, &spec.family, &mut rng)?;
            synthesize_path(table, &xi)
        })
        .collect()
}

/// Monte Carlo estimate of `P{‖X − X_N‖_{L_p} > δ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    pub paths: usize,
    pub exceedances: usize,
    pub empirical_prob: T,
    pub alpha: T,
    pub delta: T,
    #[serde(rename = "reference_N")]
    pub reference_n: usize,
    #[serde(rename = "model_N")]
    pub model_n: usize,
    pub xi_mode: XiMode,
    pub seed: u64,
    pub mean_norm: T,
    pub max_norm: T,
    /// `max_t (E(t) − Σ_{k≤reference_N} â_k(t)²)`: energy the reference
    /// surrogate leaves out under unit-variance coefficients.
    pub reference_energy_gap: T,
}

impl<T: Real> VerificationReport<T> {
    pub fn passed(&self) -> bool {
        self.empirical_prob <= self.alpha
    }
}

/// Default reference order `4N + 32`.
pub fn default_reference_order(model_n: usize) -> usize {
    4 * model_n + 32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySettings<T> {
    pub model_n: usize,
    pub reference_n: usize,
    pub delta: T,
    pub alpha: T,
    pub paths: usize,
    pub mode: XiMode,
    pub seed: u64,
}

/// Counts paths whose `L_p[0,T]` distance between the reference surrogate
/// and the order-`model_n` model exceeds `δ`.
///
/// The reference uses `resolution.reference_nodes` spectral nodes, the model
/// `resolution.spectral_nodes`; both share each path's `ξ`.
pub fn verify_reliability<T: Real>(
    spec: &ProcessSpec<T>,
    settings: &VerifySettings<T>,
    resolution: &Resolution,
) -> Result<VerificationReport<T>> {
    let s = settings;
    if s.reference_n < s.model_n {
        return Err(Error::domain(
            "verify_reliability",
            format!("reference_N = {} must not be below model_N = {}", s.reference_n, s.model_n),
        ));
    }
    if s.paths == 0 {
        return Err(Error::Size { op: "verify_reliability", detail: "paths must be at least 1".into() });
    }
    if !(s.delta > T::zero()) || !(s.alpha > T::zero() && s.alpha < T::one()) {
        return Err(Error::domain("verify_reliability", "need delta > 0 and alpha in (0, 1)"));
    }
    let grid = TimeGrid::new(spec.horizon, resolution.time_points)?;
    let ref_rule = QuadratureRule::for_family(&spec.family, resolution.reference_nodes)?;
    let model_rule = QuadratureRule::for_family(&spec.family, resolution.spectral_nodes)?;
    let reference = compute_coefficients(spec, s.reference_n, &ref_rule, &grid)?;
    let model = compute_coefficients(spec, s.model_n, &model_rule, &grid)?;

    let norms: Vec<T> = (0..s.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(s.seed, i as u64);
            let xi = draw_xi(s.mode, s.reference_n + 1, &spec.tail, &spec.family, &mut rng)?;
            let x_ref = synthesize_path(&reference, &xi)?;
            let x_model = synthesize_path(&model, &xi[..=s.model_n])?;
            let diff: Vec<T> = x_ref.iter().zip(&x_model).map(|(&a, &b)| a - b).collect();
            lp_norm(&diff, &grid, spec.p)
        })
        .collect::<Result<_>>()?;

    let exceedances = norms.iter().filter(|&&n| n > s.delta).count();
    let sum: T = norms.iter().fold(T::zero(), |acc, &n| acc + n);
    let max_norm = norms.iter().fold(T::zero(), |acc, &n| acc.max(n));
    let gap = reference
        .time_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let captured = reference.values.iter().fold(T::zero(), |acc, row| acc + row[j] * row[j]);
            spec.kernel.energy(t) - captured
        })
        .fold(T::zero(), T::max);

    Ok(VerificationReport {
        paths: s.paths,
        exceedances,
        empirical_prob: T::from_usize_lossy(exceedances) / T::from_usize_lossy(s.paths),
        alpha: s.alpha,
        delta: s.delta,
        reference_n: s.reference_n,
        model_n: s.model_n,
        xi_mode: s.mode,
        seed: s.seed,
        mean_norm: sum / T::from_usize_lossy(s.paths),
        max_norm,
        reference_energy_gap: gap,
    })
}

/// Numerical `τ_φ(ξ) = sup_{λ>0} φ⁻¹(ln E e^{λξ}) / λ` over `λ ∈ (0, lambda_max]`.
///
/// A uniform scan locates the best grid cell, then golden-section search
/// refines inside it.
pub fn tau_phi_numeric<T, F>(orlicz: &OrliczSpec<T>, log_mgf: F, lambda_max: T, steps: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(lambda_max > T::zero()) || steps < 2 {
        return Err(Error::domain("tau_phi_numeric", "need lambda_max > 0 and at least 2 steps"));
    }
    let ratio = |lambda: T| -> Result<T> {
        let m = log_mgf(lambda);
        Ok(orlicz.phi_inverse(m.max(T::zero()))? / lambda)
    };
    let h = lambda_max / T::from_usize_lossy(steps);
    let mut best = (T::zero(), T::neg_infinity());
    for i in 1..=steps {
        let lambda = h * T::from_usize_lossy(i);
        let r = ratio(lambda)?;
        if r > best.1 {
            best = (lambda, r);
        }
    }
    let (mut lo, mut hi) = ((best.0 - h).max(h * T::lit(1e-6)), (best.0 + h).min(lambda_max));
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    for _ in 0..100 {
        let a = hi - inv_phi * (hi - lo);
        let b = lo + inv_phi * (hi - lo);
        if ratio(a)? < ratio(b)? {
            lo = a;
        } else {
            hi = b;
        }
    }
    Ok(best.1.max(ratio(T::lit(0.5) * (lo + hi))?))
}
