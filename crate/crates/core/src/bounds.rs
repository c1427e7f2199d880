//! Upper estimate `C_N` of `∫_0^T τ_φ(X(t) − X_N(t))^p dt` and the
//! reliability/accuracy gate on it.
//!
//! With the per-coefficient assumption `τ_φ(ξ_k) ≤ b_k = c_k τ w^k`, where
//! `c_k` is chosen so that `b_k ĝ_k = K τ w^k √weight · g_k`, Cauchy–Schwarz
//! and the generating function of the family give
//!
//! ```text
//! τ_φ(X(t) − X_N(t)) ≤ K τ √E(t) √I(w) − Σ_{k≤N} b_k â_k(t)
//! I(w) = ∫ weight(λ) (Σ_k g_k(λ) w^k)² dλ
//! ```
//!
//! with `E(t) = ∫ |f(t, λ)|² dλ`. `K = 1` for Legendre and Laguerre and
//! `K = |Γ(α)| / √(π 2^{1−2α})` for Gegenbauer. Closed forms of `I(w)`:
//!
//! | family     | `I(w)` |
//! |------------|--------|
//! | Legendre   | `ln((1+w)/(1−w)) / w` |
//! | Laguerre   | `Γ(α+1) (1−w²)^{−(α+1)}` |
//! | Gegenbauer | `√π Γ(α+½) (1+w²)^{−2α} ₂F̃₁(α, α+½; α+1; 4w²/(1+w²)²)` |
//!
//! The bracket is clamped at zero pointwise since it bounds a norm.

use serde::Serialize;

use crate::orthopoly::{FamilyKind, PolynomialFamily};
use crate::process::{compute_coefficients, CoefficientTable, ProcessSpec};
use crate::quadrature::{cosine_mapped_rule, gauss_legendre_rule, semi_infinite_mapped, QuadratureRule, TimeGrid};
use crate::specfun::{hyp2f1_regularized, ln_abs_gamma, log_gamma, upper_incomplete_gamma};
use crate::{Error, Real, Result, TailBoundSpec};

/// Node counts for the numerical parts of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resolution {
    /// Spectral nodes for the model coefficients `â_k`.
    pub spectral_nodes: usize,
    /// Spectral nodes for reference coefficients (diagnostics, Monte Carlo).
    pub reference_nodes: usize,
    /// Points of the uniform time grid (odd).
    pub time_points: usize,
    /// Nodes for the quadrature cross-check of `I(w)`.
    pub oracle_nodes: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { spectral_nodes: 256, reference_nodes: 512, time_points: 257, oracle_nodes: 256 }
    }
}

/// Accuracy `δ` and reliability `1 − α` the model must certify.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Target<T> {
    pub delta: T,
    pub alpha: T,
}

/// Oracle tolerance for `|I(w) − I_quadrature(w)|`.
pub const GF_ORACLE_TOL: f64 = 1e-6;

/// Natural log of `c_k` in `b_k = c_k τ w^k`.
fn log_tau_ratio<T: Real>(family: &PolynomialFamily<T>, k: usize) -> Result<T> {
    let kf = T::from_usize_lossy(k);
    let half = T::lit(0.5);
    match family.kind() {
        FamilyKind::Legendre => Ok(half * (T::lit(2.0) / (T::lit(2.0) * kf + T::one())).ln()),
        FamilyKind::GeneralizedLaguerre => {
            let a = family.alpha().unwrap_or_else(T::zero);
            Ok(half * (log_gamma(kf + a + T::one())? - log_gamma(kf + T::one())?))
        }
        FamilyKind::Gegenbauer => {
            let a = family.alpha().unwrap_or_else(T::zero);
            let two = T::lit(2.0);
            Ok(half * (ln_abs_gamma(kf + two * a)? - log_gamma(kf + T::one())? - (kf + a).abs().ln()))
        }
    }
}

/// Per-coefficient bound `b_k` on `τ_φ(ξ_k)`:
/// Legendre `√(2/(2k+1)) τ w^k`, Laguerre `√(Γ(k+α+1)/k!) τ w^k`,
/// Gegenbauer `√(Γ(k+2α)/(k!(k+α))) τ w^k`.
pub fn tau_bound<T: Real>(family: &PolynomialFamily<T>, tb: &TailBoundSpec<T>, k: usize) -> Result<T> {
    let log_v = log_tau_ratio(family, k)? + tb.tau().ln() + T::from_usize_lossy(k) * tb.w().ln();
    Ok(log_v.exp())
}

/// Constant `K` in front of the generating-function term.
pub fn gf_prefactor<T: Real>(family: &PolynomialFamily<T>) -> Result<T> {
    match family.kind() {
        FamilyKind::Gegenbauer => {
            let a = family.alpha().unwrap_or_else(T::zero);
            let two = T::lit(2.0);
            let log_k = ln_abs_gamma(a)? - T::lit(0.5) * (T::PI().ln() + (T::one() - two * a) * two.ln());
            Ok(log_k.exp())
        }
        _ => Ok(T::one()),
    }
}

fn check_w<T: Real>(op: &'static str, w: T) -> Result<()> {
    if !(w > T::zero() && w < T::one()) {
        return Err(Error::domain(op, format!("w = {w} must lie in (0, 1)")));
    }
    Ok(())
}

/// Closed-form `I(w)`, the integral of the weighted squared generating function.
pub fn gf_square_integral<T: Real>(family: &PolynomialFamily<T>, w: T) -> Result<T> {
    check_w("gf_square_integral", w)?;
    let one = T::one();
    match family.kind() {
        FamilyKind::Legendre => Ok(((one + w) / (one - w)).ln() / w),
        FamilyKind::GeneralizedLaguerre => {
            let s = family.alpha().unwrap_or_else(T::zero) + one;
            // ∫_0^∞ λ^α e^{−cλ} dλ with c = (1+w)/(1−w): the antiderivative
            // −c^{−s} Γ(s, cλ) vanishes at ∞, leaving c^{−s} Γ(s, 0).
            let rate = (one + w) / (one - w);
            let at_zero = upper_incomplete_gamma(s, T::zero())?;
            Ok((one - w).powf(-T::lit(2.0) * s) * rate.powf(-s) * at_zero)
        }
        FamilyKind::Gegenbauer => {
            let a = family.alpha().unwrap_or_else(T::zero);
            let half = T::lit(0.5);
            let q = one + w * w;
            let z = T::lit(4.0) * w * w / (q * q);
            let f = hyp2f1_regularized(a, a + half, a + one, z)?;
            let log_pre = half * T::PI().ln() + log_gamma(a + half)? - T::lit(2.0) * a * q.ln();
            Ok(log_pre.exp() * f.value)
        }
    }
}

/// Direct quadrature of the squared-generating-function integrand, the
/// independent check on [`gf_square_integral`].
pub fn gf_square_integral_oracle<T: Real>(family: &PolynomialFamily<T>, w: T, n_nodes: usize) -> Result<T> {
    check_w("gf_square_integral_oracle", w)?;
    let one = T::one();
    let two = T::lit(2.0);
    match family.kind() {
        FamilyKind::Legendre => {
            let rule = gauss_legendre_rule(n_nodes)?;
            rule.integrate(|x| one / (one - two * x * w + w * w))
        }
        FamilyKind::GeneralizedLaguerre => {
            let a = family.alpha().unwrap_or_else(T::zero);
            // node scale matched to the e^{−λ(1+w)/(1−w)} decay
            let rule = semi_infinite_mapped(n_nodes, (one - w) / (one + w), 2)?;
            let pre = (one - w).powf(-two * (a + one));
            rule.integrate(|x| pre * x.powf(a) * (-x).exp() * (-two * w * x / (one - w)).exp())
        }
        FamilyKind::Gegenbauer => {
            let a = family.alpha().unwrap_or_else(T::zero);
            let rule = cosine_mapped_rule(n_nodes)?;
            let half = T::lit(0.5);
            rule.integrate(|x| (one - x * x).powf(a - half) * (one - two * x * w + w * w).powf(-two * a))
        }
    }
}

/// Pieces of the bracket that do not depend on `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerms<T> {
    /// `K τ √I(w)`.
    pub leading: T,
    /// `b_0, …, b_N`.
    pub tau_bounds: Vec<T>,
    pub gf_integral: T,
}

impl<T: Real> BoundTerms<T> {
    pub fn new(family: &PolynomialFamily<T>, tb: &TailBoundSpec<T>, n: usize) -> Result<Self> {
        let gf_integral = gf_square_integral(family, tb.w())?;
        let leading = gf_prefactor(family)? * tb.tau() * gf_integral.sqrt();
        let tau_bounds = (0..=n).map(|k| tau_bound(family, tb, k)).collect::<Result<_>>()?;
        Ok(Self { leading, tau_bounds, gf_integral })
    }

    /// Unclamped bracket `K τ √E √I − Σ b_k â_k`.
    pub fn bracket(&self, kernel_energy: T, coeffs: &[T]) -> Result<T> {
        if !(kernel_energy >= T::zero()) {
            return Err(Error::domain("tail_norm_bound", format!("kernel energy {kernel_energy} is negative")));
        }
        if coeffs.len() > self.tau_bounds.len() {
            return Err(Error::LengthMismatch { expected: self.tau_bounds.len(), actual: coeffs.len() });
        }
        let sum = coeffs.iter().zip(&self.tau_bounds).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        Ok(self.leading * kernel_energy.sqrt() - sum)
    }
}

/// Pointwise bound `max(0, K τ √E(t) √I(w) − Σ_{k≤N} b_k â_k(t))`.
pub fn tail_norm_bound<T: Real>(
    family: &PolynomialFamily<T>,
    tb: &TailBoundSpec<T>,
    kernel_energy: T,
    approx_coeffs: &[T],
) -> Result<T> {
    let n = approx_coeffs.len().saturating_sub(1);
    let terms = BoundTerms::new(family, tb, n)?;
    Ok(terms.bracket(kernel_energy, approx_coeffs)?.max(T::zero()))
}

/// Result of evaluating `C_N` and the reliability and accuracy inequalities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub family: PolynomialFamily<T>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C_N")]
    pub c_n: T,
    pub threshold_rel: T,
    pub threshold_acc: T,
    pub pass_rel: bool,
    pub pass_acc: bool,
    /// Fraction of time-grid points where the bracket was clamped to zero.
    pub clamped_fraction: T,
    pub gf_integral_value: T,
    pub gf_integral_oracle: T,
    /// False when the closed form and its quadrature oracle disagree.
    pub valid: bool,
    pub delta: T,
    pub alpha: T,
    pub p: T,
    /// Fraction of `(k, t_j)` with `|a_k(t_j)| ≤ |â_k(t_j)|`, `a_k` taken
    /// from reference-resolution coefficients.
    pub dominance_fraction: T,
}

impl<T: Real> BoundReport<T> {
    pub const CSV_HEADER: &'static str = "family,alpha_family,N,C_N,threshold_rel,threshold_acc,pass_rel,pass_acc,\
clamped_fraction,gf_integral_value,gf_integral_oracle,valid,delta,alpha,p,dominance_fraction";

    /// One CSV row matching [`CSV_HEADER`](Self::CSV_HEADER), 17 significant digits.
    pub fn csv_row(&self) -> String {
        let f = |x: T| format!("{:.16e}", x.as_f64());
        let fam_alpha = self.family.alpha().map(f).unwrap_or_default();
        [
            self.family.kind().name().to_string(),
            fam_alpha,
            self.n.to_string(),
            f(self.c_n),
            f(self.threshold_rel),
            f(self.threshold_acc),
            self.pass_rel.to_string(),
            self.pass_acc.to_string(),
            f(self.clamped_fraction),
            f(self.gf_integral_value),
            f(self.gf_integral_oracle),
            self.valid.to_string(),
            f(self.delta),
            f(self.alpha),
            f(self.p),
            f(self.dominance_fraction),
        ]
        .join(",")
    }
}

/// True iff `C_N ≤ threshold_rel` and `C_N < threshold_acc`.
pub fn check_conditions<T: Real>(report: &BoundReport<T>) -> bool {
    report.pass_rel && report.pass_acc
}

/// Coefficient tables reused across orders `0..=n_max`.
struct Prepared<T> {
    model: CoefficientTable<T>,
    reference: CoefficientTable<T>,
    grid: TimeGrid<T>,
    energies: Vec<T>,
    oracle: T,
}

fn prepare<T: Real>(spec: &ProcessSpec<T>, n_max: usize, res: &Resolution) -> Result<Prepared<T>> {
    let grid = TimeGrid::new(spec.horizon, res.time_points)?;
    let rule = QuadratureRule::for_family(&spec.family, res.spectral_nodes)?;
    let model = compute_coefficients(spec, n_max, &rule, &grid)?;
    let reference = if res.reference_nodes == res.spectral_nodes {
        model.clone()
    } else {
        let ref_rule = QuadratureRule::for_family(&spec.family, res.reference_nodes)?;
        compute_coefficients(spec, n_max, &ref_rule, &grid)?
    };
    let energies = grid.points().into_iter().map(|t| spec.kernel.energy(t)).collect();
    let oracle = gf_square_integral_oracle(&spec.family, spec.tail.w(), res.oracle_nodes)?;
    Ok(Prepared { model, reference, grid, energies, oracle })
}

fn report_from<T: Real>(
    spec: &ProcessSpec<T>,
    prep: &Prepared<T>,
    n: usize,
    target: &Target<T>,
) -> Result<BoundReport<T>> {
    let terms = BoundTerms::new(&spec.family, &spec.tail, n)?;
    let points = prep.grid.len();
    let mut powered = Vec::with_capacity(points);
    let mut clamped = 0usize;
    let mut dominated = 0usize;
    for j in 0..points {
        let coeffs: Vec<T> = prep.model.values[..=n].iter().map(|row| row[j]).collect();
        let b = terms.bracket(prep.energies[j], &coeffs)?;
        if b < T::zero() {
            clamped += 1;
        }
        powered.push(b.max(T::zero()).powf(spec.p));
        for k in 0..=n {
            if prep.reference.values[k][j].abs() <= prep.model.values[k][j].abs() {
                dominated += 1;
            }
        }
    }
    let c_n = prep.grid.simpson(&powered)?.max(T::zero());
    let threshold_rel = spec.orlicz.threshold_reliability(target.delta, target.alpha, spec.p)?;
    let threshold_acc = spec.orlicz.threshold_accuracy(target.delta, spec.p)?;
    let tol = T::lit(GF_ORACLE_TOL);
    let valid = (terms.gf_integral - prep.oracle).abs() <= tol.max(tol * prep.oracle.abs());
    Ok(BoundReport {
        family: spec.family,
        n,
        c_n,
        threshold_rel,
        threshold_acc,
        pass_rel: c_n <= threshold_rel,
        pass_acc: c_n < threshold_acc,
        clamped_fraction: T::from_usize_lossy(clamped) / T::from_usize_lossy(points),
        gf_integral_value: terms.gf_integral,
        gf_integral_oracle: prep.oracle,
        valid,
        delta: target.delta,
        alpha: target.alpha,
        p: spec.p,
        dominance_fraction: T::from_usize_lossy(dominated) / T::from_usize_lossy(points * (n + 1)),
    })
}

/// `C_N` on the time grid, with thresholds and diagnostics.
pub fn c_n_bound<T: Real>(
    spec: &ProcessSpec<T>,
    n: usize,
    target: &Target<T>,
    res: &Resolution,
) -> Result<BoundReport<T>> {
    let prep = prepare(spec, n, res)?;
    report_from(spec, &prep, n, target)
}

/// Outcome of [`select_n`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Selection<T> {
    Found(BoundReport<T>),
    /// No order up to `n_max` passed; `best` has the smallest `C_N` seen.
    NotFound {
        n_max: usize,
        best: BoundReport<T>,
    },
}

impl<T> Selection<T> {
    pub fn found(&self) -> Option<&BoundReport<T>> {
        match self {
            Selection::Found(r) => Some(r),
            Selection::NotFound { .. } => None,
        }
    }
}

/// Smallest `N ∈ [0, n_max]` whose report passes [`check_conditions`].
///
/// `C_N` need not be monotone in `N`, so orders are scanned linearly.
pub fn select_n<T: Real>(
    spec: &ProcessSpec<T>,
    target: &Target<T>,
    n_max: usize,
    res: &Resolution,
) -> Result<Selection<T>> {
    let prep = prepare(spec, n_max, res)?;
    let mut best: Option<BoundReport<T>> = None;
    for n in 0..=n_max {
        let report = report_from(spec, &prep, n, target)?;
        if check_conditions(&report) {
            return Ok(Selection::Found(report));
        }
        if best.as_ref().is_none_or(|b| report.c_n < b.c_n) {
            best = Some(report);
        }
    }
    Ok(Selection::NotFound { n_max, best: best.expect("at least one order evaluated") })
}
