//! Legendre, generalized Laguerre and Gegenbauer polynomials, their
//! orthonormal (weight-embedded) versions and generating functions.
//!
//! Polynomials are evaluated with the classical three-term recurrences:
//!
//! * Legendre: `(k+1) P_{k+1} = (2k+1) t P_k − k P_{k−1}`
//! * Laguerre: `(k+1) L_{k+1} = (2k+1+α−t) L_k − (k+α) L_{k−1}`
//! * Gegenbauer: `(k+1) C_{k+1} = 2(k+α) t C_k − (k+2α−1) C_{k−1}`
//!
//! The orthonormal versions carry the square root of the weight, so they are
//! orthonormal with respect to plain Lebesgue measure on the family domain.
//! Normalization constants are assembled in log space from [`log_gamma`].

use serde::{Deserialize, Serialize};

use crate::specfun::{ln_abs_gamma, log_gamma};
use crate::{Error, Real, Result};

/// Largest polynomial degree accepted by the evaluators.
pub const MAX_DEGREE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Legendre,
    GeneralizedLaguerre,
    Gegenbauer,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Legendre => "legendre",
            FamilyKind::GeneralizedLaguerre => "laguerre",
            FamilyKind::Gegenbauer => "gegenbauer",
        }
    }
}

/// Interval on which a family is orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// `[−1, 1]`
    Symmetric,
    /// `[0, ∞)`
    HalfLine,
}

impl Domain {
    pub fn contains<T: Real>(self, t: T) -> bool {
        match self {
            Domain::Symmetric => t >= -T::one() && t <= T::one(),
            Domain::HalfLine => t >= T::zero() && t.is_finite(),
        }
    }
}

/// A validated polynomial family with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolynomialFamily<T> {
    kind: FamilyKind,
    alpha: Option<T>,
}

impl<T: Real> PolynomialFamily<T> {
    pub fn legendre() -> Self {
        Self { kind: FamilyKind::Legendre, alpha: None }
    }

    /// Generalized Laguerre family, `α > −1`.
    pub fn laguerre(alpha: T) -> Result<Self> {
        if !(alpha > -T::one()) || !alpha.is_finite() {
            return Err(Error::domain("laguerre", format!("alpha = {alpha} must exceed -1")));
        }
        Ok(Self { kind: FamilyKind::GeneralizedLaguerre, alpha: Some(alpha) })
    }

    /// Gegenbauer family, `α > −½` and `α ≠ 0`.
    pub fn gegenbauer(alpha: T) -> Result<Self> {
        if !(alpha > -T::lit(0.5)) || !alpha.is_finite() {
            return Err(Error::domain("gegenbauer", format!("alpha = {alpha} must exceed -1/2")));
        }
        if alpha == T::zero() {
            return Err(Error::domain("gegenbauer", "alpha = 0 has no orthonormal normalization"));
        }
        Ok(Self { kind: FamilyKind::Gegenbauer, alpha: Some(alpha) })
    }

    /// Builds a family from its kind; `alpha` is ignored for Legendre.
    pub fn new(kind: FamilyKind, alpha: Option<T>) -> Result<Self> {
        let need = |a: Option<T>| a.ok_or_else(|| Error::domain("family", format!("{} requires alpha", kind.name())));
        match kind {
            FamilyKind::Legendre => Ok(Self::legendre()),
            FamilyKind::GeneralizedLaguerre => Self::laguerre(need(alpha)?),
            FamilyKind::Gegenbauer => Self::gegenbauer(need(alpha)?),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn alpha(&self) -> Option<T> {
        self.alpha
    }

    fn alpha_or_zero(&self) -> T {
        self.alpha.unwrap_or_else(T::zero)
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            FamilyKind::GeneralizedLaguerre => Domain::HalfLine,
            _ => Domain::Symmetric,
        }
    }

    /// Classical orthogonality weight.
    pub fn weight(&self, t: T) -> Result<T> {
        self.check_t("weight", t)?;
        let a = self.alpha_or_zero();
        Ok(match self.kind {
            FamilyKind::Legendre => T::one(),
            FamilyKind::GeneralizedLaguerre => t.powf(a) * (-t).exp(),
            FamilyKind::Gegenbauer => (T::one() - t * t).powf(a - T::lit(0.5)),
        })
    }

    fn check_t(&self, op: &'static str, t: T) -> Result<()> {
        if self.domain().contains(t) {
            Ok(())
        } else {
            Err(Error::domain(op, format!("t = {t} outside the {} domain", self.kind.name())))
        }
    }

    fn check_degree(op: &'static str, k: usize) -> Result<()> {
        if k > MAX_DEGREE {
            return Err(Error::Size { op, detail: format!("degree {k} exceeds {MAX_DEGREE}") });
        }
        Ok(())
    }

    /// Values `g_0(t), …, g_{k_max}(t)` of the classical polynomials.
    pub fn eval_all(&self, k_max: usize, t: T) -> Result<Vec<T>> {
        Self::check_degree("eval_poly", k_max)?;
        self.check_t("eval_poly", t)?;
        Ok(self.recurrence(k_max, t))
    }

    pub(crate) fn recurrence(&self, k_max: usize, t: T) -> Vec<T> {
        let mut out = Vec::with_capacity(k_max + 1);
        out.push(T::one());
        if k_max == 0 {
            return out;
        }
        let a = self.alpha_or_zero();
        let two = T::lit(2.0);
        out.push(match self.kind {
            FamilyKind::Legendre => t,
            FamilyKind::GeneralizedLaguerre => T::one() + a - t,
            FamilyKind::Gegenbauer => two * a * t,
        });
        for k in 1..k_max {
            let kf = T::from_usize_lossy(k);
            let k1 = kf + T::one();
            let next = match self.kind {
                FamilyKind::Legendre => ((two * kf + T::one()) * t * out[k] - kf * out[k - 1]) / k1,
                FamilyKind::GeneralizedLaguerre => {
                    ((two * kf + T::one() + a - t) * out[k] - (kf + a) * out[k - 1]) / k1
                }
                FamilyKind::Gegenbauer => (two * (kf + a) * t * out[k] - (kf + two * a - T::one()) * out[k - 1]) / k1,
            };
            out.push(next);
        }
        out
    }

    /// `P_k(t)`, `L_k^{(α)}(t)` or `C_k^{(α)}(t)`.
    pub fn eval_poly(&self, k: usize, t: T) -> Result<T> {
        Ok(self.eval_all(k, t)?[k])
    }

    /// Natural log of the constant `c_k` with `ĝ_k = c_k · √weight · g_k`.
    pub fn log_normalization(&self, k: usize) -> Result<T> {
        let kf = T::from_usize_lossy(k);
        let half = T::lit(0.5);
        let a = self.alpha_or_zero();
        let v = match self.kind {
            FamilyKind::Legendre => half * ((T::lit(2.0) * kf + T::one()) * half).ln(),
            FamilyKind::GeneralizedLaguerre => half * (log_gamma(kf + T::one())? - log_gamma(kf + a + T::one())?),
            FamilyKind::Gegenbauer => {
                let two = T::lit(2.0);
                let log_pi_term = half * (T::PI().ln() + (T::one() - two * a) * two.ln());
                ln_abs_gamma(a)? + half * (log_gamma(kf + T::one())? + (kf + a).abs().ln())
                    - log_pi_term
                    - half * ln_abs_gamma(kf + two * a)?
            }
        };
        if v.abs() >= T::max_value().ln() {
            return Err(Error::Overflow { op: "log_normalization", log_value: v.as_f64() });
        }
        Ok(v)
    }

    /// Natural log of `√weight(t)`; `−∞` where the weight vanishes.
    fn log_half_weight(&self, t: T) -> T {
        let a = self.alpha_or_zero();
        let half = T::lit(0.5);
        match self.kind {
            FamilyKind::Legendre => T::zero(),
            FamilyKind::GeneralizedLaguerre => {
                if a == T::zero() {
                    -half * t
                } else {
                    half * a * t.ln() - half * t
                }
            }
            FamilyKind::Gegenbauer => {
                let e = a - half;
                if e == T::zero() {
                    T::zero()
                } else {
                    half * e * (T::one() - t * t).ln()
                }
            }
        }
    }

    fn check_weight_finite(&self, t: T) -> Result<()> {
        let lw = self.log_half_weight(t);
        if lw.is_nan() || lw == T::infinity() {
            return Err(Error::domain(
                "eval_orthonormal",
                format!("weight of {} is singular at t = {t}", self.kind.name()),
            ));
        }
        Ok(())
    }

    /// Orthonormal functions `ĝ_0(t), …, ĝ_{k_max}(t)`, weight included.
    pub fn orthonormal_all(&self, k_max: usize, t: T) -> Result<Vec<T>> {
        let polys = self.eval_all(k_max, t)?;
        self.check_weight_finite(t)?;
        let lw = self.log_half_weight(t);
        let mut out = Vec::with_capacity(k_max + 1);
        for (k, g) in polys.into_iter().enumerate() {
            if g == T::zero() || lw == T::neg_infinity() {
                out.push(T::zero());
                continue;
            }
            let log_mag = self.log_normalization(k)? + lw + g.abs().ln();
            out.push(g.signum() * log_mag.exp());
        }
        Ok(out)
    }

    pub fn eval_orthonormal(&self, k: usize, t: T) -> Result<T> {
        Ok(self.orthonormal_all(k, t)?[k])
    }

    /// Closed-form generating function `Σ g_k(t) w^k` for `w ∈ (0, 1)`.
    pub fn generating_function(&self, t: T, w: T) -> Result<T> {
        self.check_t("generating_function", t)?;
        if !(w >= T::zero() && w < T::one()) {
            return Err(Error::domain("generating_function", format!("w = {w} must lie in [0, 1)")));
        }
        let a = self.alpha_or_zero();
        let q = T::one() - T::lit(2.0) * t * w + w * w;
        Ok(match self.kind {
            FamilyKind::Legendre => T::one() / q.sqrt(),
            FamilyKind::GeneralizedLaguerre => (T::one() - w).powf(-(a + T::one())) * (-w * t / (T::one() - w)).exp(),
            FamilyKind::Gegenbauer => q.powf(-a),
        })
    }

    /// Partial sum `Σ_{k=0}^{K} g_k(t) w^k` by recurrence.
    pub fn partial_gf_sum(&self, t: T, w: T, terms: usize) -> Result<T> {
        let g = self.eval_all(terms, t)?;
        let mut power = T::one();
        let mut sum = T::zero();
        for gk in g {
            sum = sum + gk * power;
            power = power * w;
        }
        Ok(sum)
    }
}

impl<T: Real> std::fmt::Display for PolynomialFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.alpha {
            Some(a) => write!(f, "{}(alpha={a})", self.kind.name()),
            None => f.write_str(self.kind.name()),
        }
    }
}
