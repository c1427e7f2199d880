//! Orlicz N-functions of the power (`1 < γ ≤ 2`) and piecewise (`γ > 2`)
//! regimes, and the reliability/accuracy thresholds on `C_N`.

use serde::Serialize;

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `φ(t) = |t|^γ / γ`, `1 < γ ≤ 2`.
    Power,
    /// `φ(t) = t²/γ` for `|t| < 1`, `|t|^γ/γ` otherwise; `γ > 2`.
    Piecewise,
}

/// Exponent `γ` of the N-function together with its conjugate `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrliczSpec<T> {
    gamma: T,
    beta: T,
    regime: Regime,
}

impl<T: Real> OrliczSpec<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::one()) || !gamma.is_finite() {
            return Err(Error::domain("orlicz", format!("gamma = {gamma} must exceed 1")));
        }
        let regime = if gamma <= T::lit(2.0) { Regime::Power } else { Regime::Piecewise };
        let beta = gamma / (gamma - T::one());
        Ok(Self { gamma, beta, regime })
    }

    /// The sub-Gaussian case `φ(t) = t²/2`.
    pub fn sub_gaussian() -> Self {
        Self::new(T::lit(2.0)).expect("gamma = 2 is valid")
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn phi(&self, t: T) -> T {
        let a = t.abs();
        match self.regime {
            Regime::Piecewise if a < T::one() => a * a / self.gamma,
            _ => a.powf(self.gamma) / self.gamma,
        }
    }

    /// Non-negative inverse of `φ` on `[0, ∞)`.
    pub fn phi_inverse(&self, y: T) -> Result<T> {
        if !(y >= T::zero()) {
            return Err(Error::domain("phi_inverse", format!("y = {y} must be non-negative")));
        }
        let gy = self.gamma * y;
        Ok(match self.regime {
            Regime::Power => gy.powf(self.gamma.recip()),
            Regime::Piecewise => {
                // branch point φ(1) = 1/γ
                let quad = gy.sqrt();
                if quad < T::one() {
                    quad
                } else {
                    gy.powf(self.gamma.recip())
                }
            }
        })
    }

    /// `τ_φ` of a centred Gaussian with standard deviation `sigma`; only the
    /// `γ = 2` case has this closed form (`τ_φ = σ`).
    pub fn tau_phi_gaussian(&self, sigma: T) -> Result<T> {
        if self.gamma != T::lit(2.0) {
            return Err(Error::Unsupported(format!(
                "closed-form Gaussian tau_phi needs gamma = 2, got {}",
                self.gamma
            )));
        }
        if !(sigma > T::zero()) {
            return Err(Error::domain("tau_phi_gaussian", format!("sigma = {sigma} must be positive")));
        }
        // sup_λ φ⁻¹(λ²σ²/2)/λ = sup_λ |λσ|/λ
        Ok(sigma)
    }

    /// Reliability threshold `δ / (β ln(2/α))^{p/β}`.
    pub fn threshold_reliability(&self, delta: T, alpha: T, p: T) -> Result<T> {
        check_delta_p("threshold_reliability", delta, p)?;
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::domain("threshold_reliability", format!("alpha = {alpha} must lie in (0, 1)")));
        }
        let base = self.beta * (T::lit(2.0) / alpha).ln();
        Ok(delta / base.powf(p / self.beta))
    }

    /// Accuracy threshold `δ / p^{p(1 − 1/γ)}`.
    pub fn threshold_accuracy(&self, delta: T, p: T) -> Result<T> {
        check_delta_p("threshold_accuracy", delta, p)?;
        Ok(delta / p.powf(p * (T::one() - self.gamma.recip())))
    }
}

fn check_delta_p<T: Real>(op: &'static str, delta: T, p: T) -> Result<()> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::domain(op, format!("delta = {delta} must be positive")));
    }
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::domain(op, format!("p = {p} must be at least 1")));
    }
    Ok(())
}

/// Constants of the assumed per-coefficient bound `τ_φ(ξ_k) ≤ c_k τ w^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundSpec<T> {
    tau: T,
    w: T,
}

impl<T: Real> TailBoundSpec<T> {
    pub fn new(tau: T, w: T) -> Result<Self> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::domain("tail_bound", format!("tau = {tau} must be positive")));
        }
        if !(w > T::zero() && w < T::one()) {
            return Err(Error::domain("tail_bound", format!("w = {w} must lie in (0, 1)")));
        }
        Ok(Self { tau, w })
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn w(&self) -> T {
        self.w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_construction() {
        let s = OrliczSpec::<f64>::new(2.0).unwrap();
        assert_eq!(s.regime(), Regime::Power);
        assert_eq!(s.beta(), 2.0);
        let s = OrliczSpec::<f64>::new(3.0).unwrap();
        assert_eq!(s.regime(), Regime::Piecewise);
        assert!((1.0 / s.beta() + 1.0 / s.gamma() - 1.0).abs() < 1e-12);
        assert!(OrliczSpec::<f64>::new(1.0).is_err());
        for &g in &[1.1, 1.5, 2.0, 2.5, 7.0] {
            let s = OrliczSpec::<f64>::new(g).unwrap();
            assert!(s.beta() > 1.0);
            assert!((1.0 / s.beta() + 1.0 / s.gamma() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_examples() {
        let g2 = OrliczSpec::<f64>::new(2.0).unwrap();
        assert_eq!(g2.phi(2.0), 2.0);
        let g3 = OrliczSpec::<f64>::new(3.0).unwrap();
        assert!((g3.phi(0.5) - 0.25 / 3.0).abs() < 1e-15);
        assert!((g3.phi(2.0) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn phi_inverse_examples() {
        let g2 = OrliczSpec::<f64>::new(2.0).unwrap();
        assert!((g2.phi_inverse(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(g2.phi_inverse(0.0).unwrap(), 0.0);
        let g3 = OrliczSpec::<f64>::new(3.0).unwrap();
        assert!((g3.phi_inverse(3.0).unwrap() - 9.0_f64.cbrt()).abs() < 1e-14);
        assert_eq!(g3.phi_inverse(0.0).unwrap(), 0.0);
        assert!(g3.phi_inverse(-1.0).is_err());
    }

    #[test]
    fn phi_inverse_round_trip() {
        for &g in &[1.3, 2.0, 3.0, 4.5] {
            let s = OrliczSpec::<f64>::new(g).unwrap();
            for i in 0..=120 {
                let y = 10f64.powf(-6.0 + 0.1 * f64::from(i));
                let back = s.phi(s.phi_inverse(y).unwrap());
                assert!((back - y).abs() <= 1e-10 * y, "gamma={g} y={y}");
            }
        }
    }

    #[test]
    fn phi_shape() {
        for &g in &[1.5, 2.0, 3.0] {
            let s = OrliczSpec::<f64>::new(g).unwrap();
            assert_eq!(s.phi(0.0), 0.0);
            let h = 0.01;
            for i in -300..=300 {
                let t = f64::from(i) * h;
                assert_eq!(s.phi(t), s.phi(-t));
                let second = s.phi(t + h) - 2.0 * s.phi(t) + s.phi(t - h);
                assert!(second >= -1e-15, "gamma={g} t={t}");
            }
        }
        let s = OrliczSpec::<f64>::new(3.0).unwrap();
        let below = 1.0_f64.next_down();
        assert!((s.phi(below) - s.phi(1.0)).abs() < 1e-14);
        assert!((s.phi(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_tau() {
        let s = OrliczSpec::<f64>::sub_gaussian();
        for &sigma in &[1.0, 0.25, 3.0] {
            assert_eq!(s.tau_phi_gaussian(sigma).unwrap(), sigma);
        }
        let s3 = OrliczSpec::<f64>::new(3.0).unwrap();
        assert!(matches!(s3.tau_phi_gaussian(1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn thresholds() {
        let s = OrliczSpec::<f64>::new(2.0).unwrap();
        let v = s.threshold_reliability(1.0, 0.05, 2.0).unwrap();
        assert!((v - 1.0 / (2.0 * 40.0_f64.ln())).abs() < 1e-12);
        let e2 = std::f64::consts::E * std::f64::consts::E;
        assert!((s.threshold_reliability(2.0, 2.0 / e2, 2.0).unwrap() - 0.5).abs() < 1e-12);
        let e = std::f64::consts::E;
        assert!((s.threshold_reliability(1.0, 2.0 / e, 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s.threshold_accuracy(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(OrliczSpec::<f64>::new(2.7).unwrap().threshold_accuracy(1.0, 1.0).unwrap(), 1.0);
        let s3 = OrliczSpec::<f64>::new(3.0).unwrap();
        assert!((s3.threshold_accuracy(3.0, 2.0).unwrap() - 3.0 / 2.0_f64.powf(4.0 / 3.0)).abs() < 1e-12);
        assert!(s.threshold_reliability(1.0, 1.0, 2.0).is_err());
        assert!(s.threshold_reliability(0.0, 0.05, 2.0).is_err());
        assert!(s.threshold_accuracy(1.0, 0.9).is_err());
    }

    #[test]
    fn tail_bound_validation() {
        assert!(TailBoundSpec::<f64>::new(1.0, 0.5).is_ok());
        assert!(TailBoundSpec::<f64>::new(0.0, 0.5).is_err());
        assert!(TailBoundSpec::<f64>::new(1.0, 1.0).is_err());
        assert!(TailBoundSpec::<f64>::new(1.0, 0.0).is_err());
    }
}
