//! Kernel functions and their horizon-indexed scaled families.
//!
//! A [`KernelSpec`] is a parametric mother kernel (phi-type kernels carry
//! units 1/time, k-type 1/sqrt(time) once scaled); a [`ScaledKernel`] wraps
//! it with an amplitude and a time dilation; a [`ScaledKernelPair`] builds
//! the (k_T, phi_T) family for one of the three rescaling regimes.

use crate::error::{Error, Result};
use crate::quad;
use crate::special;
use serde::{Deserialize, Serialize};

/// Parametric kernel, supported on [0, inf), non-negative and
/// non-increasing for every shipped variant.
///
/// JSON schema (field names are fixed):
/// `{"variant":"exponential","rate":nu,"scale":c}`,
/// `{"variant":"mittag_leffler","alpha":a,"lambda":l}`,
/// `{"variant":"power_law_tail","alpha":a,"cutoff":x0}`,
/// `{"variant":"zero"}`. Unknown or misplaced fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
#[serde(try_from = "KernelSpecRaw")]
pub enum KernelSpec {
    /// c * exp(-rate * t)
    Exponential { rate: f64, scale: f64 },
    /// The Mittag-Leffler probability density f^{alpha,lambda}.
    MittagLeffler { alpha: f64, lambda: f64 },
    /// C (cutoff + t)^{-(1+alpha)} with C = alpha * cutoff^alpha, so the
    /// kernel integrates to one and has tail constant
    /// lim alpha x^alpha int_x^inf = C.
    PowerLawTail { alpha: f64, cutoff: f64 },
    /// Identically zero.
    Zero,
}

/// Strict deserialization target: internally tagged enums cannot reject
/// unknown fields on their own, and config typos must not pass silently.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSpecRaw {
    variant: String,
    rate: Option<f64>,
    scale: Option<f64>,
    alpha: Option<f64>,
    lambda: Option<f64>,
    cutoff: Option<f64>,
}

impl TryFrom<KernelSpecRaw> for KernelSpec {
    type Error = String;

    fn try_from(raw: KernelSpecRaw) -> std::result::Result<Self, String> {
        let required = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| format!("kernel variant '{}' requires field '{name}'", raw.variant))
        };
        let forbid = |v: &Option<f64>, name: &str| {
            if v.is_some() {
                Err(format!(
                    "kernel variant '{}' does not take field '{name}'",
                    raw.variant
                ))
            } else {
                Ok(())
            }
        };
        match raw.variant.as_str() {
            "exponential" => {
                forbid(&raw.alpha, "alpha")?;
                forbid(&raw.lambda, "lambda")?;
                forbid(&raw.cutoff, "cutoff")?;
                Ok(KernelSpec::Exponential {
                    rate: required(raw.rate, "rate")?,
                    scale: required(raw.scale, "scale")?,
                })
            }
            "mittag_leffler" => {
                forbid(&raw.rate, "rate")?;
                forbid(&raw.scale, "scale")?;
                forbid(&raw.cutoff, "cutoff")?;
                Ok(KernelSpec::MittagLeffler {
                    alpha: required(raw.alpha, "alpha")?,
                    lambda: required(raw.lambda, "lambda")?,
                })
            }
            "power_law_tail" => {
                forbid(&raw.rate, "rate")?;
                forbid(&raw.scale, "scale")?;
                forbid(&raw.lambda, "lambda")?;
                Ok(KernelSpec::PowerLawTail {
                    alpha: required(raw.alpha, "alpha")?,
                    cutoff: required(raw.cutoff, "cutoff")?,
                })
            }
            "zero" => {
                forbid(&raw.rate, "rate")?;
                forbid(&raw.scale, "scale")?;
                forbid(&raw.alpha, "alpha")?;
                forbid(&raw.lambda, "lambda")?;
                forbid(&raw.cutoff, "cutoff")?;
                Ok(KernelSpec::Zero)
            }
            other => Err(format!("unknown kernel variant '{other}'")),
        }
    }
}

impl KernelSpec {
    pub fn exponential(rate: f64, scale: f64) -> Self {
        KernelSpec::Exponential { rate, scale }
    }

    pub fn mittag_leffler(alpha: f64, lambda: f64) -> Self {
        KernelSpec::MittagLeffler { alpha, lambda }
    }

    pub fn power_law_tail(alpha: f64, cutoff: f64) -> Self {
        KernelSpec::PowerLawTail { alpha, cutoff }
    }

    /// An exponential with unit L2 norm: sqrt(2 nu) e^{-nu t}.
    pub fn exponential_unit_l2(nu: f64) -> Self {
        KernelSpec::Exponential {
            rate: nu,
            scale: (2.0 * nu).sqrt(),
        }
    }

    /// An exponential with unit L1 norm: kappa e^{-kappa t}.
    pub fn exponential_unit_l1(kappa: f64) -> Self {
        KernelSpec::Exponential {
            rate: kappa,
            scale: kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Exponential { rate, scale } => {
                if !(rate > 0.0 && rate.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Domain(format!(
                        "exponential kernel needs rate > 0 and scale > 0, got rate={rate}, scale={scale}"
                    )));
                }
            }
            KernelSpec::MittagLeffler { alpha, lambda } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::Domain(format!(
                        "mittag_leffler kernel needs alpha in (0, 1], got {alpha}"
                    )));
                }
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::Domain(format!(
                        "mittag_leffler kernel needs lambda > 0, got {lambda}"
                    )));
                }
            }
            KernelSpec::PowerLawTail { alpha, cutoff } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Domain(format!(
                        "power_law_tail kernel needs alpha in (0, 1), got {alpha}"
                    )));
                }
                if !(cutoff > 0.0 && cutoff.is_finite()) {
                    return Err(Error::Domain(format!(
                        "power_law_tail kernel needs cutoff > 0, got {cutoff}"
                    )));
                }
            }
            KernelSpec::Zero => {}
        }
        Ok(())
    }

    /// Kernel value at t >= 0. The Mittag-Leffler density with alpha < 1
    /// returns +inf at t = 0; quadratures and convolutions treat the kernel
    /// as left-open and never sample t = 0 exactly.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("kernel evaluated at bad time {t}")));
        }
        match *self {
            KernelSpec::Exponential { rate, scale } => Ok(scale * (-rate * t).exp()),
            KernelSpec::MittagLeffler { alpha, lambda } => special::ml_density(alpha, lambda, t),
            KernelSpec::PowerLawTail { alpha, cutoff } => {
                let c = alpha * cutoff.powf(alpha);
                Ok(c * (cutoff + t).powf(-(1.0 + alpha)))
            }
            KernelSpec::Zero => Ok(0.0),
        }
    }

    /// int_0^t of the kernel.
    pub fn integral(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("kernel integral to bad time {t}")));
        }
        match *self {
            KernelSpec::Exponential { rate, scale } => {
                Ok(scale / rate * (1.0 - (-rate * t).exp()))
            }
            KernelSpec::MittagLeffler { alpha, lambda } => special::ml_integrated(alpha, lambda, t),
            KernelSpec::PowerLawTail { alpha, cutoff } => {
                let c = alpha * cutoff.powf(alpha);
                Ok(c / alpha * (cutoff.powf(-alpha) - (cutoff + t).powf(-alpha)))
            }
            KernelSpec::Zero => Ok(0.0),
        }
    }

    /// int_x^inf of the kernel.
    pub fn tail_integral(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!("kernel tail from bad point {x}")));
        }
        match *self {
            KernelSpec::Exponential { rate, scale } => Ok(scale / rate * (-rate * x).exp()),
            KernelSpec::MittagLeffler { alpha, lambda } => {
                Ok(1.0 - special::ml_integrated(alpha, lambda, x)?)
            }
            KernelSpec::PowerLawTail { alpha, cutoff } => {
                let c = alpha * cutoff.powf(alpha);
                Ok(c / alpha * (cutoff + x).powf(-alpha))
            }
            KernelSpec::Zero => Ok(0.0),
        }
    }

    /// L1 norm over [0, inf).
    pub fn l1_norm(&self) -> Result<f64> {
        match *self {
            KernelSpec::Exponential { rate, scale } => Ok(scale / rate),
            // Probability densities by construction.
            KernelSpec::MittagLeffler { .. } => Ok(1.0),
            KernelSpec::PowerLawTail { .. } => Ok(1.0),
            KernelSpec::Zero => Ok(0.0),
        }
    }

    /// Squared L2 norm over [0, inf).
    pub fn l2_norm_sq(&self) -> Result<f64> {
        match *self {
            KernelSpec::Exponential { rate, scale } => Ok(scale * scale / (2.0 * rate)),
            KernelSpec::MittagLeffler { alpha, lambda } => {
                if alpha <= 0.5 {
                    return Err(Error::Divergence(format!(
                        "L2 norm of mittag_leffler kernel diverges for alpha = {alpha} <= 1/2"
                    )));
                }
                // f^2 ~ t^{2 alpha - 2} near zero (integrable) and decays as
                // t^{-2-2alpha}; split at 1 and map the tail.
                let sq = |t: f64| {
                    let f = special::ml_density(alpha, lambda, t).unwrap_or(0.0);
                    if f.is_finite() {
                        f * f
                    } else {
                        0.0
                    }
                };
                let head = quad::integrate(sq, 0.0, 1.0, 1e-9, 1e-14);
                let tail = quad::integrate_to_inf(sq, 1.0, 1e-9, 1e-14);
                Ok(head.value + tail.value)
            }
            KernelSpec::PowerLawTail { alpha, cutoff } => {
                let c = alpha * cutoff.powf(alpha);
                Ok(c * c * cutoff.powf(-(1.0 + 2.0 * alpha)) / (1.0 + 2.0 * alpha))
            }
            KernelSpec::Zero => Ok(0.0),
        }
    }

    /// The constant K = lim_x alpha x^alpha int_x^inf, for kernels with a
    /// power-law tail.
    pub fn tail_constant(&self) -> Option<f64> {
        match *self {
            KernelSpec::PowerLawTail { alpha, cutoff } => Some(alpha * cutoff.powf(alpha)),
            _ => None,
        }
    }

    /// Finite value at t = 0 (false only for the Mittag-Leffler density
    /// with alpha < 1, which diverges there).
    pub fn bounded_at_zero(&self) -> bool {
        !matches!(*self, KernelSpec::MittagLeffler { alpha, .. } if alpha < 1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, KernelSpec::Zero)
    }
}

/// Both norms of a kernel: (L1, squared L2).
pub fn kernel_norms(spec: &KernelSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    Ok((spec.l1_norm()?, spec.l2_norm_sq()?))
}

/// A mother kernel with an amplitude and a time dilation:
/// value(t) = amplitude * mother(t / time_scale).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledKernel {
    pub mother: KernelSpec,
    pub amplitude: f64,
    pub time_scale: f64,
}

impl ScaledKernel {
    pub fn unscaled(mother: KernelSpec) -> Self {
        ScaledKernel {
            mother,
            amplitude: 1.0,
            time_scale: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self::unscaled(KernelSpec::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        self.mother.validate()?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Domain(format!(
                "kernel amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err(Error::Domain(format!(
                "kernel time scale must be positive, got {}",
                self.time_scale
            )));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.amplitude * self.mother.eval(t / self.time_scale)?)
    }

    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(self.amplitude * self.time_scale * self.mother.integral(t / self.time_scale)?)
    }

    pub fn l1_norm(&self) -> Result<f64> {
        Ok(self.amplitude * self.time_scale * self.mother.l1_norm()?)
    }

    pub fn l2_norm_sq(&self) -> Result<f64> {
        Ok(self.amplitude * self.amplitude * self.time_scale * self.mother.l2_norm_sq()?)
    }

    pub fn is_zero(&self) -> bool {
        self.mother.is_zero() || self.amplitude == 0.0
    }

    pub fn bounded_at_zero(&self) -> bool {
        self.mother.bounded_at_zero()
    }
}

/// Which of the pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRole {
    K,
    Phi,
}

/// Rescaling regime for the kernel family indexed by the horizon T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regime {
    /// phi = 0; k_T = sqrt(gamma/T) k(./T).
    PurelyQuadratic { gamma: f64 },
    /// k_T = sqrt(gamma/T) k(./T), phi_T = (beta/T) phi(./T).
    Stable { gamma: f64, beta: f64 },
    /// k_T = sqrt((1-a_T)/T) k(./T), phi_T = (2 a_T - 1) phi.
    NearlyUnstable { a_t: f64 },
}

/// Mother kernels, a regime, and a horizon: the scaled pair (k_T, phi_T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledKernelPair {
    pub mother_k: KernelSpec,
    pub mother_phi: KernelSpec,
    pub regime: Regime,
    pub horizon: f64,
}

const NORM_TOL: f64 = 1e-6;

impl ScaledKernelPair {
    pub fn new(
        mother_k: KernelSpec,
        mother_phi: KernelSpec,
        regime: Regime,
        horizon: f64,
    ) -> Result<Self> {
        let pair = ScaledKernelPair {
            mother_k,
            mother_phi,
            regime,
            horizon,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        self.mother_k.validate()?;
        self.mother_phi.validate()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        let k_l2sq = self.mother_k.l2_norm_sq()?;
        let unit_l2 = self.mother_k.is_zero() || (k_l2sq - 1.0).abs() <= NORM_TOL;
        match self.regime {
            Regime::PurelyQuadratic { gamma } => {
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::Config(format!(
                        "purely quadratic regime needs gamma in (0,1), got {gamma}"
                    )));
                }
                if !unit_l2 {
                    return Err(Error::Config(format!(
                        "mother k must have unit L2 norm, got ||k||_2^2 = {k_l2sq}"
                    )));
                }
                if !self.mother_phi.is_zero() {
                    return Err(Error::Config(
                        "purely quadratic regime requires phi = 0".into(),
                    ));
                }
            }
            Regime::Stable { gamma, beta } => {
                if !(gamma + beta > 0.0 && gamma + beta < 1.0) || gamma < 0.0 || beta < 0.0 {
                    return Err(Error::Config(format!(
                        "stable regime needs 0 < gamma + beta < 1, got gamma={gamma}, beta={beta}"
                    )));
                }
                if !unit_l2 {
                    return Err(Error::Config(format!(
                        "mother k must have unit L2 norm, got ||k||_2^2 = {k_l2sq}"
                    )));
                }
                let phi_l1 = self.mother_phi.l1_norm()?;
                if !self.mother_phi.is_zero() && (phi_l1 - 1.0).abs() > NORM_TOL {
                    return Err(Error::Config(format!(
                        "mother phi must have unit L1 norm, got ||phi||_1 = {phi_l1}"
                    )));
                }
            }
            Regime::NearlyUnstable { a_t } => {
                if !(a_t > 0.0 && a_t < 1.0) {
                    return Err(Error::Config(format!(
                        "nearly unstable regime needs a_T in (0,1), got {a_t}"
                    )));
                }
                if !unit_l2 {
                    return Err(Error::Config(format!(
                        "mother k must have unit L2 norm, got ||k||_2^2 = {k_l2sq}"
                    )));
                }
                if !self.mother_k.bounded_at_zero() {
                    return Err(Error::Config(
                        "nearly unstable regime needs k continuously differentiable with finite k(0)".into(),
                    ));
                }
                let phi_l1 = self.mother_phi.l1_norm()?;
                if (phi_l1 - 1.0).abs() > NORM_TOL {
                    return Err(Error::Config(format!(
                        "mother phi must have unit L1 norm, got ||phi||_1 = {phi_l1}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The scaled k_T as a standalone kernel.
    pub fn scaled_k(&self) -> ScaledKernel {
        let t = self.horizon;
        let amplitude = match self.regime {
            Regime::PurelyQuadratic { gamma } | Regime::Stable { gamma, .. } => (gamma / t).sqrt(),
            Regime::NearlyUnstable { a_t } => ((1.0 - a_t) / t).sqrt(),
        };
        ScaledKernel {
            mother: self.mother_k.clone(),
            amplitude,
            time_scale: t,
        }
    }

    /// The scaled phi_T as a standalone kernel.
    pub fn scaled_phi(&self) -> ScaledKernel {
        let t = self.horizon;
        match self.regime {
            Regime::PurelyQuadratic { .. } => ScaledKernel::zero(),
            Regime::Stable { beta, .. } => ScaledKernel {
                mother: self.mother_phi.clone(),
                amplitude: beta / t,
                time_scale: t,
            },
            // Note: no time dilation in this regime; the tail of phi itself
            // drives the limit.
            Regime::NearlyUnstable { a_t } => ScaledKernel {
                mother: self.mother_phi.clone(),
                amplitude: 2.0 * a_t - 1.0,
                time_scale: 1.0,
            },
        }
    }

    /// Evaluate k_T or phi_T at time t.
    pub fn eval(&self, which: KernelRole, t: f64) -> Result<f64> {
        match which {
            KernelRole::K => self.scaled_k().eval(t),
            KernelRole::Phi => self.scaled_phi().eval(t),
        }
    }

    /// ||k_T||_2^2 + ||phi_T||_1, strictly below one for every finite
    /// horizon in every regime.
    pub fn stability_sum(&self) -> Result<f64> {
        Ok(self.scaled_k().l2_norm_sq()? + self.scaled_phi().l1_norm()?)
    }
}

/// Operation-style free functions mirroring the module surface.
pub fn eval_kernel(spec: &KernelSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    spec.eval(t)
}

pub fn scaled_eval(pair: &ScaledKernelPair, which: KernelRole, t: f64) -> Result<f64> {
    pair.validate()?;
    pair.eval(which, t)
}
