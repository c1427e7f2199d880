//! Fixed-node quadrature rules over `[−1, 1]`, `[0, ∞)` and `[a, b]`, an
//! adaptive Simpson integrator, and the composite-Simpson `L_p` norm on a
//! uniform time grid.

use serde::Serialize;

use crate::orthopoly::{Domain, FamilyKind, PolynomialFamily};
use crate::{Error, Real, Result};

pub const MAX_NODES: usize = 4096;

/// Default node count for spectral integrals.
pub const DEFAULT_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RuleKind {
    /// Gauss–Legendre on `[−1, 1]`, or affinely mapped to `[a, b]`.
    GaussLegendre,
    /// Gauss–Legendre on `[0, 1)` pushed through `λ = s·(u/(1−u))^m`.
    SemiInfiniteMapped,
    /// Gauss–Legendre in `θ ∈ [0, π]` pushed through `λ = −cos θ`; absorbs
    /// `(1−λ²)^{±½}`-type endpoint behaviour.
    CosineMapped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule<T> {
    kind: RuleKind,
    nodes: Vec<T>,
    weights: Vec<T>,
    lower: T,
    upper: T,
}

fn check_size(op: &'static str, n: usize) -> Result<()> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::Size { op, detail: format!("node count {n} outside 1..={MAX_NODES}") });
    }
    Ok(())
}

/// `(P_n(x), P_{n−1}(x))` by the Legendre recurrence.
fn legendre_pair<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    let two = T::lit(2.0);
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = ((two * kf + T::one()) * x * p - kf * p_prev) / (kf + T::one());
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// n-point Gauss–Legendre rule on `[−1, 1]`.
///
/// Nodes come from Newton iteration on `P_n` started at Tricomi's estimate
/// `cos(π(i − ¼)/(n + ½))`.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    check_size("gauss_legendre_rule", n)?;
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(4.0));
    let nf = T::from_usize_lossy(n);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let theta = T::PI() * (T::from_usize_lossy(i + 1) - T::lit(0.25)) / (nf + T::lit(0.5));
        let mut x = theta.cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, p1) = legendre_pair(n, x);
            dp = nf * (x * p - p1) / (x * x - T::one());
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= tol {
                let (p, p1) = legendre_pair(n, x);
                dp = nf * (x * p - p1) / (x * x - T::one());
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok(QuadratureRule { kind: RuleKind::GaussLegendre, nodes, weights, lower: -T::one(), upper: T::one() })
}

/// Rule for `∫_0^∞ h(λ) dλ` through `λ = u/(1−u)`.
pub fn semi_infinite_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    semi_infinite_mapped(n, T::one(), 1)
}

/// Rule for `∫_0^∞ h(λ) dλ` through `λ = scale·(u/(1−u))^power`.
///
/// `power = 2` removes `λ^{−½}` endpoint singularities.
pub fn semi_infinite_mapped<T: Real>(n: usize, scale: T, power: u32) -> Result<QuadratureRule<T>> {
    check_size("semi_infinite_rule", n)?;
    if !(scale > T::zero()) || power == 0 {
        return Err(Error::domain("semi_infinite_rule", "scale must be positive and power at least 1"));
    }
    let base = gauss_legendre_rule::<T>(n)?;
    let half = T::lit(0.5);
    let m = T::from_u32(power).expect("small integer");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&x, &w) in base.nodes.iter().zip(&base.weights) {
        let u = half * (x + T::one());
        let s = u / (T::one() - u);
        // dλ/du = scale · m · s^{m−1} / (1−u)²
        let jac = scale * m * s.powi(power as i32 - 1) / ((T::one() - u) * (T::one() - u));
        nodes.push(scale * s.powi(power as i32));
        weights.push(half * w * jac);
    }
    Ok(QuadratureRule { kind: RuleKind::SemiInfiniteMapped, nodes, weights, lower: T::zero(), upper: T::infinity() })
}

/// Rule on `[−1, 1]` through `λ = −cos θ`, Gauss–Legendre in `θ`.
pub fn cosine_mapped_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    check_size("cosine_mapped_rule", n)?;
    let base = gauss_legendre_rule::<T>(n)?;
    let half_pi = T::FRAC_PI_2();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&x, &w) in base.nodes.iter().zip(&base.weights) {
        let theta = half_pi * (x + T::one());
        nodes.push(-theta.cos());
        weights.push(half_pi * w * theta.sin());
    }
    Ok(QuadratureRule { kind: RuleKind::CosineMapped, nodes, weights, lower: -T::one(), upper: T::one() })
}

impl<T: Real> QuadratureRule<T> {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(lower, upper)` of the target interval.
    pub fn interval(&self) -> (T, T) {
        (self.lower, self.upper)
    }

    /// Affine image of a `[−1, 1]` rule on `[a, b]`.
    pub fn on_interval(&self, a: T, b: T) -> Result<Self> {
        if self.lower != -T::one() || self.upper != T::one() {
            return Err(Error::Unsupported("only [-1, 1] rules can be mapped affinely".into()));
        }
        if !(b > a) {
            return Err(Error::domain("on_interval", format!("empty interval [{a}, {b}]")));
        }
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (a + b);
        Ok(Self {
            kind: self.kind,
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
            lower: a,
            upper: b,
        })
    }

    /// The rule used for integrals over a family's spectral domain.
    ///
    /// Legendre uses plain Gauss–Legendre. Gegenbauer uses the cosine map,
    /// which smooths the `(1−λ²)^{(α−½)/2}` factors of the orthonormal
    /// functions. Laguerre uses the squared rational map so that
    /// `λ^{α/2}` factors with `α < 0` stay integrable at the nodes.
    pub fn for_family(family: &PolynomialFamily<T>, n: usize) -> Result<Self> {
        match family.kind() {
            FamilyKind::Legendre => gauss_legendre_rule(n),
            FamilyKind::Gegenbauer => cosine_mapped_rule(n),
            FamilyKind::GeneralizedLaguerre => semi_infinite_mapped(n, T::lit(4.0), 2),
        }
    }

    pub fn covers(&self, domain: Domain) -> bool {
        match domain {
            Domain::Symmetric => self.lower == -T::one() && self.upper == T::one(),
            Domain::HalfLine => self.lower == T::zero() && self.upper == T::infinity(),
        }
    }

    /// `Σ w_i h(x_i)`; fails on the first non-finite integrand value.
    pub fn integrate<F>(&self, mut h: F) -> Result<T>
    where
        F: FnMut(T) -> T,
    {
        let mut sum = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = h(x);
            if !v.is_finite() {
                return Err(Error::Evaluation { node: x.as_f64(), value: v.as_f64() });
            }
            sum = sum + w * v;
        }
        Ok(sum)
    }

    /// Like [`integrate`](Self::integrate) for fallible integrands.
    pub fn try_integrate<F>(&self, mut h: F) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        let mut sum = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = h(x)?;
            if !v.is_finite() {
                return Err(Error::Evaluation { node: x.as_f64(), value: v.as_f64() });
            }
            sum = sum + w * v;
        }
        Ok(sum)
    }
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    const MAX_DEPTH: u32 = 48;
    #[allow(clippy::too_many_arguments)]
    fn rec<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> Result<T> {
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let m = (a + b) / two;
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let (flm, frm) = (f(lm), f(rm));
        if !flm.is_finite() || !frm.is_finite() {
            let (node, value) = if flm.is_finite() { (rm, frm) } else { (lm, flm) };
            return Err(Error::Evaluation { node: node.as_f64(), value: value.as_f64() });
        }
        let left = (m - a) / six * (fa + T::lit(4.0) * flm + fm);
        let right = (b - m) / six * (fm + T::lit(4.0) * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= T::lit(15.0) * tol {
            return Ok(left + right + diff / T::lit(15.0));
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol / two, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, tol / two, depth - 1)?)
    }
    let m = (a + b) / T::lit(2.0);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    for (x, v) in [(a, fa), (m, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(Error::Evaluation { node: x.as_f64(), value: v.as_f64() });
        }
    }
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Uniform partition of `[0, T]` with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid<T> {
    horizon: T,
    points: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(horizon: T, points: usize) -> Result<Self> {
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::domain("time_grid", format!("horizon {horizon} must be positive")));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::Size { op: "time_grid", detail: format!("{points} points; need an odd count ≥ 3") });
        }
        Ok(Self { horizon, points })
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        self.horizon / T::from_usize_lossy(self.points - 1)
    }

    pub fn point(&self, j: usize) -> T {
        if j + 1 == self.points {
            self.horizon
        } else {
            self.step() * T::from_usize_lossy(j)
        }
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.points).map(|j| self.point(j)).collect()
    }

    /// Composite Simpson integral of sampled values, summed in index order.
    pub fn simpson(&self, values: &[T]) -> Result<T> {
        if values.len() != self.points {
            return Err(Error::LengthMismatch { expected: self.points, actual: values.len() });
        }
        let last = self.points - 1;
        let mut sum = values[0] + values[last];
        for (j, &v) in values.iter().enumerate().take(last).skip(1) {
            sum = sum + if j % 2 == 1 { T::lit(4.0) * v } else { T::lit(2.0) * v };
        }
        Ok(sum * self.step() / T::lit(3.0))
    }
}

/// `(∫_0^T |v(t)|^p dt)^{1/p}` by composite Simpson on `|v|^p`.
pub fn lp_norm<T: Real>(values: &[T], grid: &TimeGrid<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::domain("lp_norm", format!("p = {p} must be at least 1")));
    }
    let powered: Vec<T> = values.iter().map(|v| v.abs().powf(p)).collect();
    let integral = grid.simpson(&powered)?;
    Ok(integral.max(T::zero()).powf(p.recip()))
}
