//! Euler discretization of the macroscopic limit models and the rough
//! Heston reference.
//!
//! Four variants share one engine:
//!
//! * purely quadratic: `V = mu + Z^2`, `Z = sqrt(gamma) int k(t-s) sqrt(V) dB`;
//! * stable quadratic: adds `H = beta int phi(t-s) V ds`;
//! * nearly unstable: `V = int (1/2) f^{a,lam}(t-s) [(1+Z^2) ds +
//!   (lam mu*)^{-1/2} sqrt(V) dB1]`, `Z = int k(t-s) sqrt(V) dB2`,
//!   independent noises;
//! * rough Heston reference with correlated price/vol noises.
//!
//! Kernels multiplying `ds`-terms and the singular fractional kernels use
//! exact per-step integrals (point rules lose an order at the
//! singularity); the stochastic feedback kernel uses left-point values.
//! All convolutions run through the blocked causal dot product, so paths
//! are bit-identical across thread counts.

use crate::conv::causal_dot;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::special;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

const NORM_TOL: f64 = 1e-6;

/// Deterministic baseline variance curve for the rough Heston reference,
/// piecewise constant on the simulation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaZero {
    Constant(f64),
    Table(Vec<f64>),
}

impl ThetaZero {
    fn at(&self, step: usize) -> f64 {
        match self {
            ThetaZero::Constant(c) => *c,
            ThetaZero::Table(v) => v[step.min(v.len() - 1)],
        }
    }
}

/// One of the macroscopic limit models on the unit interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum LimitModelSpec {
    Pq {
        mu: f64,
        gamma: f64,
        k: KernelSpec,
    },
    Sq {
        mu: f64,
        gamma: f64,
        beta: f64,
        k: KernelSpec,
        phi: KernelSpec,
    },
    Nu {
        alpha: f64,
        lambda: f64,
        mu_star: f64,
        k: KernelSpec,
    },
    RoughHestonRef {
        v0: f64,
        lambda: f64,
        alpha: f64,
        theta0: ThetaZero,
        vol_of_vol: f64,
        rho: f64,
    },
}

impl LimitModelSpec {
    pub fn validate(&self) -> Result<()> {
        let unit_l2 = |k: &KernelSpec| -> Result<()> {
            k.validate()?;
            if !k.is_zero() {
                let l2 = k.l2_norm_sq()?;
                if (l2 - 1.0).abs() > NORM_TOL {
                    return Err(Error::Config(format!(
                        "limit-model k must have unit L2 norm, got ||k||_2^2 = {l2}"
                    )));
                }
            }
            Ok(())
        };
        match self {
            LimitModelSpec::Pq { mu, gamma, k } => {
                if !(*mu >= 0.0 && mu.is_finite()) {
                    return Err(Error::Config(format!("pq needs mu >= 0, got {mu}")));
                }
                if !(*gamma > 0.0 && *gamma < 1.0) {
                    return Err(Error::Config(format!("pq needs gamma in (0,1), got {gamma}")));
                }
                unit_l2(k)
            }
            LimitModelSpec::Sq {
                mu,
                gamma,
                beta,
                k,
                phi,
            } => {
                if !(*mu >= 0.0 && mu.is_finite()) {
                    return Err(Error::Config(format!("sq needs mu >= 0, got {mu}")));
                }
                if !(*gamma >= 0.0 && *beta >= 0.0 && gamma + beta > 0.0 && gamma + beta < 1.0) {
                    return Err(Error::Config(format!(
                        "sq needs 0 < gamma + beta < 1, got gamma={gamma}, beta={beta}"
                    )));
                }
                unit_l2(k)?;
                phi.validate()?;
                if !phi.is_zero() {
                    let l1 = phi.l1_norm()?;
                    if (l1 - 1.0).abs() > NORM_TOL {
                        return Err(Error::Config(format!(
                            "sq needs unit L1 phi, got ||phi||_1 = {l1}"
                        )));
                    }
                }
                Ok(())
            }
            LimitModelSpec::Nu {
                alpha,
                lambda,
                mu_star,
                k,
            } => {
                if !(*alpha > 0.5 && *alpha < 1.0) {
                    return Err(Error::Config(format!(
                        "nu needs alpha in (1/2,1), got {alpha}"
                    )));
                }
                if !(*lambda > 0.0 && *mu_star > 0.0) {
                    return Err(Error::Config(format!(
                        "nu needs lambda > 0 and mu_star > 0, got {lambda}, {mu_star}"
                    )));
                }
                unit_l2(k)?;
                if !k.bounded_at_zero() {
                    return Err(Error::Config(
                        "nu needs k continuously differentiable with finite k(0)".into(),
                    ));
                }
                Ok(())
            }
            LimitModelSpec::RoughHestonRef {
                v0,
                lambda,
                alpha,
                theta0,
                vol_of_vol,
                rho,
            } => {
                if !(*alpha > 0.5 && *alpha < 1.0) {
                    return Err(Error::Config(format!(
                        "rough heston needs alpha in (1/2,1), got {alpha}"
                    )));
                }
                if !(*v0 >= 0.0 && *lambda >= 0.0 && *vol_of_vol >= 0.0) {
                    return Err(Error::Config(
                        "rough heston needs v0, lambda, vol_of_vol >= 0".into(),
                    ));
                }
                if !(-1.0..=1.0).contains(rho) {
                    return Err(Error::Config(format!("rho must lie in [-1,1], got {rho}")));
                }
                let neg = match theta0 {
                    ThetaZero::Constant(c) => *c < 0.0,
                    ThetaZero::Table(v) => v.is_empty() || v.iter().any(|x| *x < 0.0),
                };
                if neg {
                    return Err(Error::Config("theta0 must be non-negative and non-empty".into()));
                }
                Ok(())
            }
        }
    }
}

/// Simulated macroscopic path on the uniform grid over [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MacroPath {
    /// n_steps + 1 grid points.
    pub grid: Vec<f64>,
    /// Spot variance.
    pub v: Vec<f64>,
    /// Feedback process.
    pub z: Vec<f64>,
    /// Integrated price (martingale).
    pub p: Vec<f64>,
    /// Integrated variance int_0^t V ds (left rule).
    pub x: Vec<f64>,
    /// Drift component H (stable quadratic model only).
    pub h: Option<Vec<f64>>,
    /// Volatility-driving martingale (nearly unstable / rough Heston).
    pub m: Option<Vec<f64>>,
    /// Primary noise increments (drives Z and P for PQ/SQ; V and M
    /// otherwise), length n_steps.
    pub db1: Vec<f64>,
    /// Secondary noise increments where the model has two.
    pub db2: Option<Vec<f64>>,
    /// Fraction of Euler proposals for V that were clipped at zero.
    pub clipped_fraction: f64,
}

impl MacroPath {
    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Index of the grid point at macro time t (must align).
    pub fn index_of(&self, t: f64) -> usize {
        let n = self.n_steps();
        ((t * n as f64).round() as usize).min(n)
    }

    /// CSV columns `t,V,Z,P[,M]`.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        if let Some(m) = &self.m {
            writeln!(w, "t,V,Z,P,M")?;
            for i in 0..self.grid.len() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.grid[i], self.v[i], self.z[i], self.p[i], m[i]
                )?;
            }
        } else {
            writeln!(w, "t,V,Z,P")?;
            for i in 0..self.grid.len() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.grid[i], self.v[i], self.z[i], self.p[i]
                )?;
            }
        }
        Ok(())
    }
}

/// Precomputed per-step kernel weights for one (spec, n_steps) pair.
/// Building the engine once and reusing it across Monte Carlo paths
/// amortizes the Mittag-Leffler evaluations.
pub struct VolterraEngine {
    spec: LimitModelSpec,
    n_steps: usize,
    dt: f64,
    /// lag-indexed stochastic-feedback weights (entry 0 unused)
    kw: Vec<f64>,
    /// lag-indexed drift weights: beta * step-integrals of phi (SQ),
    /// (1/2) step-integrals of f^{a,lam} (NU), lambda * step-integrals of
    /// the power kernel (rough Heston)
    dw: Vec<f64>,
}

impl VolterraEngine {
    pub fn new(spec: LimitModelSpec, n_steps: usize) -> Result<Self> {
        spec.validate()?;
        if n_steps < 2 {
            return Err(Error::Config(format!("n_steps must be >= 2, got {n_steps}")));
        }
        let dt = 1.0 / n_steps as f64;
        let mut kw = vec![0.0; n_steps + 1];
        let mut dw = vec![0.0; n_steps + 1];
        match &spec {
            LimitModelSpec::Pq { gamma, k, .. } => {
                let sg = gamma.sqrt();
                for d in 1..=n_steps {
                    kw[d] = sg * k.eval(d as f64 * dt)?;
                }
            }
            LimitModelSpec::Sq {
                gamma, beta, k, phi, ..
            } => {
                let sg = gamma.sqrt();
                let mut prev = 0.0;
                for d in 1..=n_steps {
                    kw[d] = sg * k.eval(d as f64 * dt)?;
                    let cur = phi.integral(d as f64 * dt)?;
                    dw[d] = beta * (cur - prev);
                    prev = cur;
                }
            }
            LimitModelSpec::Nu {
                alpha, lambda, k, ..
            } => {
                let mut prev = 0.0;
                for d in 1..=n_steps {
                    kw[d] = k.eval(d as f64 * dt)?;
                    let cur = special::ml_integrated(*alpha, *lambda, d as f64 * dt)?;
                    dw[d] = 0.5 * (cur - prev);
                    prev = cur;
                }
            }
            LimitModelSpec::RoughHestonRef { alpha, lambda, .. } => {
                // int_0^t s^{alpha-1}/Gamma(alpha) ds = t^alpha/Gamma(alpha+1)
                let g1 = gamma(*alpha + 1.0);
                let mut prev = 0.0;
                for d in 1..=n_steps {
                    let cur = (d as f64 * dt).powf(*alpha) / g1;
                    dw[d] = lambda * (cur - prev);
                    prev = cur;
                }
            }
        }
        Ok(VolterraEngine {
            spec,
            n_steps,
            dt,
            kw,
            dw,
        })
    }

    pub fn spec(&self) -> &LimitModelSpec {
        &self.spec
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn simulate(&self, rng: &mut ChaCha12Rng) -> MacroPath {
        match &self.spec {
            LimitModelSpec::Pq { mu, .. } => self.run_quadratic(*mu, false, rng),
            LimitModelSpec::Sq { mu, .. } => self.run_quadratic(*mu, true, rng),
            LimitModelSpec::Nu {
                lambda, mu_star, ..
            } => self.run_nearly_unstable(*lambda, *mu_star, rng),
            LimitModelSpec::RoughHestonRef {
                v0,
                theta0,
                vol_of_vol,
                rho,
                ..
            } => self.run_rough_heston(*v0, theta0, *vol_of_vol, *rho, rng),
        }
    }

    /// PQ and SQ share a single driving noise and the identity
    /// V = mu + H + Z^2 (H identically zero for PQ); with beta = 0 the SQ
    /// path is bit-identical to PQ under the same seed.
    fn run_quadratic(&self, mu: f64, with_h: bool, rng: &mut ChaCha12Rng) -> MacroPath {
        let n = self.n_steps;
        let dt = self.dt;
        let sqrt_dt = dt.sqrt();
        let mut v: Vec<f64> = vec![0.0; n + 1];
        let mut z = vec![0.0; n + 1];
        let mut h = vec![0.0; n + 1];
        let mut p = vec![0.0; n + 1];
        let mut x = vec![0.0; n + 1];
        let mut db = vec![0.0; n];
        let mut u = vec![0.0; n];
        v[0] = mu;
        for j in 1..=n {
            let i = j - 1;
            let g: f64 = rng.sample(StandardNormal);
            db[i] = g * sqrt_dt;
            let sv = v[i].sqrt();
            u[i] = sv * db[i];
            p[j] = p[i] + sv * db[i];
            x[j] = x[i] + v[i] * dt;
            z[j] = causal_dot(&self.kw, &u, j);
            h[j] = causal_dot(&self.dw, &v, j);
            v[j] = mu + h[j] + z[j] * z[j];
        }
        MacroPath {
            grid: (0..=n).map(|j| j as f64 * dt).collect(),
            v,
            z,
            p,
            x,
            h: if with_h { Some(h) } else { None },
            m: None,
            db1: db,
            db2: None,
            clipped_fraction: 0.0,
        }
    }

    /// Nearly-unstable limit: two independent noises, singular fractional
    /// kernel with exact step weights, V proposals clipped at zero.
    fn run_nearly_unstable(&self, lambda: f64, mu_star: f64, rng: &mut ChaCha12Rng) -> MacroPath {
        let n = self.n_steps;
        let dt = self.dt;
        let sqrt_dt = dt.sqrt();
        let noise_scale = 1.0 / (lambda * mu_star).sqrt();
        let mut v: Vec<f64> = vec![0.0; n + 1];
        let mut z = vec![0.0; n + 1];
        let mut p = vec![0.0; n + 1];
        let mut m = vec![0.0; n + 1];
        let mut x = vec![0.0; n + 1];
        let mut db1 = vec![0.0; n];
        let mut db2 = vec![0.0; n];
        // combined drift + noise input convolved with the fractional weights
        let mut ab = vec![0.0; n];
        // feedback input convolved with kw
        let mut u2 = vec![0.0; n];
        let mut clipped = 0usize;
        for j in 1..=n {
            let i = j - 1;
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            db1[i] = g1 * sqrt_dt;
            db2[i] = g2 * sqrt_dt;
            let sv = v[i].sqrt();
            ab[i] = (1.0 + z[i] * z[i]) + noise_scale * sv * db1[i] / dt;
            u2[i] = sv * db2[i];
            m[j] = m[i] + sv * db1[i];
            p[j] = p[i] + sv * db2[i];
            x[j] = x[i] + v[i] * dt;
            let raw = causal_dot(&self.dw, &ab, j);
            if raw < 0.0 {
                clipped += 1;
                v[j] = 0.0;
            } else {
                v[j] = raw;
            }
            z[j] = causal_dot(&self.kw, &u2, j);
        }
        MacroPath {
            grid: (0..=n).map(|j| j as f64 * dt).collect(),
            v,
            z,
            p,
            x,
            h: None,
            m: Some(m),
            db1,
            db2: Some(db2),
            clipped_fraction: clipped as f64 / n as f64,
        }
    }

    fn run_rough_heston(
        &self,
        v0: f64,
        theta0: &ThetaZero,
        vol_of_vol: f64,
        rho: f64,
        rng: &mut ChaCha12Rng,
    ) -> MacroPath {
        let n = self.n_steps;
        let dt = self.dt;
        let sqrt_dt = dt.sqrt();
        let rho_perp = (1.0 - rho * rho).sqrt();
        let mut v: Vec<f64> = vec![0.0; n + 1];
        let mut p = vec![0.0; n + 1];
        let mut m = vec![0.0; n + 1];
        let mut x = vec![0.0; n + 1];
        let mut db1 = vec![0.0; n];
        let mut dbp = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut clipped = 0usize;
        v[0] = v0;
        for j in 1..=n {
            let i = j - 1;
            let g1: f64 = rng.sample(StandardNormal);
            let gp: f64 = rng.sample(StandardNormal);
            db1[i] = g1 * sqrt_dt;
            dbp[i] = gp * sqrt_dt;
            let sv = v[i].sqrt();
            c[i] = (theta0.at(i) - v[i]) + vol_of_vol * sv * db1[i] / dt;
            let dw = rho * db1[i] + rho_perp * dbp[i];
            p[j] = p[i] + sv * dw;
            m[j] = m[i] + sv * db1[i];
            x[j] = x[i] + v[i] * dt;
            let raw = v0 + causal_dot(&self.dw, &c, j);
            if raw < 0.0 {
                clipped += 1;
                v[j] = 0.0;
            } else {
                v[j] = raw;
            }
        }
        MacroPath {
            grid: (0..=n).map(|j| j as f64 * dt).collect(),
            v,
            z: vec![0.0; n + 1],
            p,
            x,
            h: None,
            m: Some(m),
            db1,
            db2: Some(dbp),
            clipped_fraction: clipped as f64 / n as f64,
        }
    }
}

/// One-shot wrappers.
pub fn simulate_model(
    spec: &LimitModelSpec,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<MacroPath> {
    Ok(VolterraEngine::new(spec.clone(), n_steps)?.simulate(rng))
}

pub fn simulate_pq(
    mu: f64,
    gamma: f64,
    k: KernelSpec,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<MacroPath> {
    simulate_model(&LimitModelSpec::Pq { mu, gamma, k }, n_steps, rng)
}

pub fn simulate_sq(
    mu: f64,
    gamma: f64,
    beta: f64,
    k: KernelSpec,
    phi: KernelSpec,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<MacroPath> {
    simulate_model(
        &LimitModelSpec::Sq {
            mu,
            gamma,
            beta,
            k,
            phi,
        },
        n_steps,
        rng,
    )
}

pub fn simulate_nu(
    alpha: f64,
    lambda: f64,
    mu_star: f64,
    k: KernelSpec,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<MacroPath> {
    simulate_model(
        &LimitModelSpec::Nu {
            alpha,
            lambda,
            mu_star,
            k,
        },
        n_steps,
        rng,
    )
}

pub fn simulate_rough_heston(
    v0: f64,
    lambda: f64,
    alpha: f64,
    theta0: ThetaZero,
    vol_of_vol: f64,
    rho: f64,
    n_steps: usize,
    rng: &mut ChaCha12Rng,
) -> Result<MacroPath> {
    simulate_model(
        &LimitModelSpec::RoughHestonRef {
            v0,
            lambda,
            alpha,
            theta0,
            vol_of_vol,
            rho,
        },
        n_steps,
        rng,
    )
}

/// Forward-volatility decomposition for the stable quadratic model with
/// exponential kernels.
#[derive(Debug, Clone)]
pub struct ForwardDecomposition {
    pub t0_index: usize,
    /// Offsets h from t0 (grid-aligned, h = 0 first).
    pub h_grid: Vec<f64>,
    /// F_{t0}-measurable part: mu + e^{-2 nu h} Z_{t0}^2 + e^{-kappa h} H_{t0}.
    pub predictable: Vec<f64>,
    /// V rebuilt from (Z_{t0}, H_{t0}) and the post-t0 noise only.
    pub reconstructed: Vec<f64>,
    /// V from the original simulation on the same points.
    pub direct: Vec<f64>,
    pub z_t0: f64,
    pub h_t0: f64,
    /// k decay rate.
    pub nu: f64,
    /// phi decay rate.
    pub kappa: f64,
}

/// Split V_{t0+h} into its F_{t0}-measurable part and the fresh-noise
/// remainder via the completed square
/// `V_{t0+h} = mu + (e^{-nu h} Z_{t0} + Z~_h)^2 + H~_h + e^{-kappa h} H_{t0}`,
/// where Z~ and H~ restart the convolutions at t0. The exponential
/// semigroup makes the split exact step by step; the reconstruction below
/// re-runs the post-t0 recursion from (Z_{t0}, H_{t0}) alone and must
/// reproduce the simulated path to float accuracy.
pub fn forward_decomposition_exp(
    spec: &LimitModelSpec,
    path: &MacroPath,
    t0_index: usize,
) -> Result<ForwardDecomposition> {
    let LimitModelSpec::Sq {
        mu,
        gamma,
        beta,
        k,
        phi,
    } = spec
    else {
        return Err(Error::Config(
            "forward decomposition applies to the stable quadratic model".into(),
        ));
    };
    let KernelSpec::Exponential {
        rate: nu,
        scale: k_scale,
    } = *k
    else {
        return Err(Error::UnsupportedKernel(
            "forward decomposition needs an exponential k kernel".into(),
        ));
    };
    let KernelSpec::Exponential {
        rate: kappa,
        scale: phi_scale,
    } = *phi
    else {
        return Err(Error::UnsupportedKernel(
            "forward decomposition needs an exponential phi kernel".into(),
        ));
    };
    let n = path.n_steps();
    if t0_index >= n {
        return Err(Error::Domain(format!(
            "t0 index {t0_index} out of range (n_steps = {n})"
        )));
    }
    let h_path = path
        .h
        .as_ref()
        .ok_or_else(|| Error::Validation("path carries no H component (not an SQ path)".into()))?;
    let dt = path.dt();
    let sg = gamma.sqrt();
    let z0 = path.z[t0_index];
    let h0 = h_path[t0_index];
    let m = t0_index;

    let mut h_grid = Vec::with_capacity(n - m + 1);
    let mut predictable = Vec::with_capacity(n - m + 1);
    let mut reconstructed = Vec::with_capacity(n - m + 1);
    let mut direct = Vec::with_capacity(n - m + 1);

    // fresh-start convolution inputs, indices m..j
    let mut u_t = Vec::with_capacity(n - m); // sqrt(V^) dB
    let mut v_t = Vec::with_capacity(n - m + 1); // V^
    v_t.push(path.v[m]);
    h_grid.push(0.0);
    predictable.push(mu + z0 * z0 + h0);
    reconstructed.push(path.v[m]);
    direct.push(path.v[m]);

    for j in (m + 1)..=n {
        let off = j - m;
        let h_off = off as f64 * dt;
        let i = j - 1;
        u_t.push(v_t[i - m].sqrt() * path.db1[i]);
        // restarted convolutions
        let mut z_tilde = 0.0;
        for (ii, ut) in u_t.iter().enumerate() {
            let lag = (off - ii) as f64 * dt;
            z_tilde += sg * k_scale * (-nu * lag).exp() * ut;
        }
        let mut h_tilde = 0.0;
        for (ii, vt) in v_t.iter().take(off).enumerate() {
            let lag_hi = (off - ii) as f64 * dt;
            let lag_lo = (off - ii - 1) as f64 * dt;
            let w = beta * phi_scale / kappa
                * ((-kappa * lag_lo).exp() - (-kappa * lag_hi).exp());
            h_tilde += w * vt;
        }
        let z_hat = (-nu * h_off).exp() * z0 + z_tilde;
        let h_hat = (-kappa * h_off).exp() * h0 + h_tilde;
        let v_hat = mu + h_hat + z_hat * z_hat;
        v_t.push(v_hat);

        h_grid.push(h_off);
        predictable.push(mu + (-2.0 * nu * h_off).exp() * z0 * z0 + (-kappa * h_off).exp() * h0);
        reconstructed.push(v_hat);
        direct.push(path.v[j]);
    }

    Ok(ForwardDecomposition {
        t0_index,
        h_grid,
        predictable,
        reconstructed,
        direct,
        z_t0: z0,
        h_t0: h0,
        nu,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::replication_rng;
    use approx::assert_relative_eq;

    fn unit_k(nu: f64) -> KernelSpec {
        KernelSpec::exponential_unit_l2(nu)
    }

    fn unit_phi(kappa: f64) -> KernelSpec {
        KernelSpec::exponential_unit_l1(kappa)
    }

    #[test]
    fn pq_zero_kernel_is_brownian_with_constant_vol() {
        let mu = 0.7;
        let n_paths = 1000;
        let mut terminal = Vec::with_capacity(n_paths);
        for rep in 0..n_paths {
            let mut rng = replication_rng(2, rep as u64);
            let path = simulate_pq(mu, 0.3, KernelSpec::Zero, 256, &mut rng).unwrap();
            assert!(path.v.iter().all(|&v| v == mu));
            terminal.push(*path.p.last().unwrap());
        }
        let mean = terminal.iter().sum::<f64>() / n_paths as f64;
        let var = terminal.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n_paths - 1) as f64;
        // Var(P(1)) = mu within MC error (se of var ~ mu sqrt(2/n))
        assert!((var - mu).abs() < 4.0 * mu * (2.0 / n_paths as f64).sqrt());
    }

    #[test]
    fn structural_identity_v_eq_mu_plus_h_plus_z_sq() {
        let mut rng = replication_rng(3, 0);
        let path = simulate_sq(1.0, 0.3, 0.4, unit_k(1.0), unit_phi(1.0), 512, &mut rng).unwrap();
        let h = path.h.as_ref().unwrap();
        for j in 0..=512 {
            let rebuilt = 1.0 + h[j] + path.z[j] * path.z[j];
            assert_eq!(rebuilt, path.v[j], "identity must hold bitwise at {j}");
        }
    }

    #[test]
    fn sq_with_beta_zero_equals_pq_bitwise() {
        let mut rng1 = replication_rng(4, 7);
        let mut rng2 = replication_rng(4, 7);
        let pq = simulate_pq(1.0, 0.3, unit_k(1.0), 256, &mut rng1).unwrap();
        let sq = simulate_sq(1.0, 0.3, 0.0, unit_k(1.0), KernelSpec::Zero, 256, &mut rng2).unwrap();
        assert_eq!(pq.v, sq.v);
        assert_eq!(pq.z, sq.z);
        assert_eq!(pq.p, sq.p);
    }

    #[test]
    fn pq_mean_variance_matches_picard_oracle() {
        // E[V(t)] solves m(t) = mu + gamma int k^2(t-s) m(s) ds.
        // Independent oracle: Picard iteration with closed-form step
        // integrals of k^2 (k = sqrt(2) e^{-t}: int k^2 = 1 - e^{-2t}).
        let mu = 1.0;
        let gamma = 0.25;
        let n = 512usize;
        let dt = 1.0 / n as f64;
        let k2_int = |t: f64| 1.0 - (-2.0 * t).exp();
        let mut w2 = vec![0.0; n + 1];
        for d in 1..=n {
            w2[d] = gamma * (k2_int(d as f64 * dt) - k2_int((d - 1) as f64 * dt));
        }
        let mut m_curve = vec![mu; n + 1];
        for _ in 0..200 {
            let mut next = vec![mu; n + 1];
            for j in 1..=n {
                let mut acc = mu;
                for d in 1..=j {
                    acc += w2[d] * m_curve[j - d];
                }
                next[j] = acc;
            }
            m_curve = next;
        }

        let n_paths = 2000;
        let checks = [n / 4, n / 2, n];
        let mut sums = [0.0f64; 3];
        let mut sums_sq = [0.0f64; 3];
        let engine = VolterraEngine::new(
            LimitModelSpec::Pq {
                mu,
                gamma,
                k: unit_k(1.0),
            },
            n,
        )
        .unwrap();
        for rep in 0..n_paths {
            let mut rng = replication_rng(5, rep as u64);
            let path = engine.simulate(&mut rng);
            for (c, &idx) in checks.iter().enumerate() {
                sums[c] += path.v[idx];
                sums_sq[c] += path.v[idx] * path.v[idx];
            }
        }
        for (c, &idx) in checks.iter().enumerate() {
            let mean = sums[c] / n_paths as f64;
            let var = (sums_sq[c] / n_paths as f64 - mean * mean).max(0.0);
            let se = (var / n_paths as f64).sqrt();
            assert!(
                (mean - m_curve[idx]).abs() < 3.0 * se.max(1e-4),
                "t index {idx}: MC mean {mean} vs Picard {} (se {se})",
                m_curve[idx]
            );
        }
    }

    #[test]
    fn sq_deterministic_resolvent_with_zero_k() {
        // k = 0: V = mu + beta int phi V, phi = e^{-t}, beta = 0.5:
        // V(t) = mu (2 - e^{-0.5 t}).
        let mu = 1.0;
        let n = 4096;
        let mut rng = replication_rng(6, 0);
        let path = simulate_sq(mu, 0.0, 0.5, KernelSpec::Zero, unit_phi(1.0), n, &mut rng)
            .unwrap_or_else(|e| panic!("{e}"));
        for &tq in &[0.25, 0.5, 0.75, 1.0] {
            let idx = path.index_of(tq);
            let exact = mu * (2.0 - (-0.5 * tq).exp());
            assert!(
                (path.v[idx] - exact).abs() < 1e-4,
                "V({tq}) = {} vs {exact}",
                path.v[idx]
            );
        }
    }

    #[test]
    fn sq_mean_bound() {
        // E[V(1)] <= mu/(1-gamma-beta) + 3 s.e.
        let (gamma, beta) = (0.3, 0.4);
        let n_paths = 800;
        let engine = VolterraEngine::new(
            LimitModelSpec::Sq {
                mu: 1.0,
                gamma,
                beta,
                k: unit_k(1.0),
                phi: unit_phi(1.0),
            },
            256,
        )
        .unwrap();
        let mut vals = Vec::with_capacity(n_paths);
        for rep in 0..n_paths {
            let mut rng = replication_rng(7, rep as u64);
            vals.push(*engine.simulate(&mut rng).v.last().unwrap());
        }
        let mean = vals.iter().sum::<f64>() / n_paths as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_paths - 1) as f64;
        let se = (var / n_paths as f64).sqrt();
        let bound = 1.0 / (1.0 - gamma - beta);
        assert!(mean <= bound + 3.0 * se, "mean {mean} vs bound {bound}");
    }

    #[test]
    fn nu_zero_k_mean_matches_half_integrated_density() {
        // k = 0: E[V(t)] = F^{alpha,lambda}(t)/2.
        let (alpha, lambda) = (0.7, 1.0);
        let n = 256;
        let n_paths = 1500;
        let engine = VolterraEngine::new(
            LimitModelSpec::Nu {
                alpha,
                lambda,
                mu_star: 1.0,
                k: KernelSpec::Zero,
            },
            n,
        )
        .unwrap();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for rep in 0..n_paths {
            let mut rng = replication_rng(8, rep as u64);
            let path = engine.simulate(&mut rng);
            assert_eq!(path.v[0], 0.0);
            assert_eq!(path.z[0], 0.0);
            let v1 = *path.v.last().unwrap();
            sum += v1;
            sumsq += v1 * v1;
        }
        let mean = sum / n_paths as f64;
        let var = (sumsq / n_paths as f64 - mean * mean).max(0.0);
        let se = (var / n_paths as f64).sqrt();
        let want = 0.5 * special::ml_integrated(alpha, lambda, 1.0).unwrap();
        assert!(
            (mean - want).abs() < 3.0 * se.max(1e-4),
            "mean {mean} vs F/2 = {want} (se {se})"
        );
    }

    #[test]
    fn nu_self_consistency_on_refining_grids() {
        // X(t) = int V must match the integral form
        // int (1/2)F(t-s)(1+Z^2) ds + int (1/2) f(t-s) M_s / sqrt(lam mu*) ds
        // with error shrinking as the grid refines.
        let (alpha, lambda, mu_star) = (0.7, 1.0, 1.0);
        let mut errs = Vec::new();
        for &n in &[256usize, 512, 1024] {
            let engine = VolterraEngine::new(
                LimitModelSpec::Nu {
                    alpha,
                    lambda,
                    mu_star,
                    k: unit_k(1.0),
                },
                n,
            )
            .unwrap();
            let mut rng = replication_rng(9, 3);
            let path = engine.simulate(&mut rng);
            let dt = path.dt();
            // reconstruct X via the integral form, reusing exact F-weights
            let mut fw = vec![0.0; n + 1]; // step integrals of (1/2) F
            let mut prev = 0.0;
            for d in 1..=n {
                // int of F over one step by trapezoid of F (F is smooth)
                let cur = special::ml_integrated(alpha, lambda, d as f64 * dt).unwrap();
                fw[d] = 0.5 * 0.5 * (cur + prev) * dt;
                prev = cur;
            }
            let m = path.m.as_ref().unwrap();
            let scale = 1.0 / (lambda * mu_star).sqrt();
            let mut worst = 0.0f64;
            for j in (n / 4..=n).step_by(n / 8) {
                let mut xi = 0.0;
                for i in 0..j {
                    let d = j - i;
                    xi += fw[d] * (1.0 + path.z[i] * path.z[i]) / dt * dt;
                    // (1/2) f step-integral = engine dw
                    xi += self_dw(&engine)[d] * scale * m[i];
                }
                worst = worst.max((path.x[j] - xi).abs());
            }
            errs.push(worst);
        }
        assert!(
            errs[2] < errs[0],
            "self-consistency error must shrink: {errs:?}"
        );
        assert!(errs[2] < 0.05, "error too large: {errs:?}");
    }

    fn self_dw(engine: &VolterraEngine) -> &[f64] {
        &engine.dw
    }

    #[test]
    fn rough_heston_degenerate_cases() {
        // vol_of_vol = 0, theta0 = v0: V stays at v0.
        let mut rng = replication_rng(10, 0);
        let path = simulate_rough_heston(
            0.04,
            1.0,
            0.6,
            ThetaZero::Constant(0.04),
            0.0,
            -0.5,
            128,
            &mut rng,
        )
        .unwrap();
        for &v in &path.v {
            assert_relative_eq!(v, 0.04, max_relative = 1e-12);
        }
        // lambda = 0: V identically v0
        let mut rng = replication_rng(10, 1);
        let path = simulate_rough_heston(
            0.09,
            0.0,
            0.6,
            ThetaZero::Constant(0.2),
            0.3,
            0.0,
            128,
            &mut rng,
        )
        .unwrap();
        for &v in &path.v {
            assert_relative_eq!(v, 0.09, max_relative = 1e-12);
        }
    }

    #[test]
    fn rough_heston_stationary_mean() {
        // theta0 = v0 makes v0 the fixed point of the mean equation.
        let n_paths = 1200;
        let engine = VolterraEngine::new(
            LimitModelSpec::RoughHestonRef {
                v0: 0.04,
                lambda: 1.0,
                alpha: 0.6,
                theta0: ThetaZero::Constant(0.04),
                vol_of_vol: 0.3,
                rho: -0.7,
            },
            256,
        )
        .unwrap();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for rep in 0..n_paths {
            let mut rng = replication_rng(11, rep as u64);
            let v1 = *engine.simulate(&mut rng).v.last().unwrap();
            sum += v1;
            sumsq += v1 * v1;
        }
        let mean = sum / n_paths as f64;
        let var = (sumsq / n_paths as f64 - mean * mean).max(0.0);
        let se = (var / n_paths as f64).sqrt();
        assert!(
            (mean - 0.04).abs() < 3.0 * se.max(1e-5),
            "mean {mean} (se {se})"
        );
    }

    #[test]
    fn forward_decomposition_pathwise_identity() {
        let spec = LimitModelSpec::Sq {
            mu: 1.0,
            gamma: 0.3,
            beta: 0.4,
            k: unit_k(1.0),
            phi: unit_phi(1.0),
        };
        let engine = VolterraEngine::new(spec.clone(), 512).unwrap();
        for rep in 0..5 {
            let mut rng = replication_rng(12, rep);
            let path = engine.simulate(&mut rng);
            let t0 = path.index_of(0.5);
            let fd = forward_decomposition_exp(&spec, &path, t0).unwrap();
            // h = 0: predictable part equals V_{t0} exactly
            assert_relative_eq!(fd.predictable[0], fd.direct[0], max_relative = 1e-12);
            for (r, d) in fd.reconstructed.iter().zip(&fd.direct) {
                assert!(
                    (r - d).abs() <= 1e-10 * d.abs().max(1.0),
                    "reconstruction {r} vs direct {d}"
                );
            }
            // t0 = 0 restart: reconstruction reproduces the whole path
            let fd0 = forward_decomposition_exp(&spec, &path, 0).unwrap();
            for (r, d) in fd0.reconstructed.iter().zip(&fd0.direct) {
                assert!((r - d).abs() <= 1e-10 * d.abs().max(1.0));
            }
        }
    }

    #[test]
    fn forward_decomposition_rejects_wrong_kernels() {
        let exp_spec = LimitModelSpec::Sq {
            mu: 1.0,
            gamma: 0.3,
            beta: 0.3,
            k: unit_k(1.0),
            phi: unit_phi(1.0),
        };
        let engine = VolterraEngine::new(exp_spec, 64).unwrap();
        let mut rng = replication_rng(13, 0);
        let path = engine.simulate(&mut rng);
        let ml_spec = LimitModelSpec::Sq {
            mu: 1.0,
            gamma: 0.3,
            beta: 0.3,
            k: KernelSpec::mittag_leffler(0.8, 1.0),
            phi: unit_phi(1.0),
        };
        assert!(matches!(
            forward_decomposition_exp(&ml_spec, &path, 10),
            Err(Error::UnsupportedKernel(_))
        ));
        let pq_spec = LimitModelSpec::Pq {
            mu: 1.0,
            gamma: 0.3,
            k: unit_k(1.0),
        };
        assert!(matches!(
            forward_decomposition_exp(&pq_spec, &path, 10),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn semimartingale_decomposition_for_smooth_k() {
        // For exponential k with k(0) = sqrt(2 nu):
        // dZ^2 = 2 sqrt(gamma) k(0) Z sqrt(V) dB + (2 nu gamma V - 2 nu Z^2) dt.
        // The discrete residual of this identity shrinks with the step.
        let gamma = 0.3;
        let nu = 1.0f64;
        let k0 = (2.0 * nu).sqrt();
        let mut errs = Vec::new();
        for &n in &[512usize, 2048] {
            let engine = VolterraEngine::new(
                LimitModelSpec::Pq {
                    mu: 1.0,
                    gamma,
                    k: unit_k(nu),
                },
                n,
            )
            .unwrap();
            let mut rng = replication_rng(14, 1);
            let path = engine.simulate(&mut rng);
            let dt = path.dt();
            let mut acc = 0.0;
            let mut worst = 0.0f64;
            for i in 0..n {
                let drift = 2.0 * nu * gamma * path.v[i] - 2.0 * nu * path.z[i] * path.z[i];
                acc += 2.0 * gamma.sqrt() * k0 * path.z[i] * path.v[i].sqrt() * path.db1[i]
                    + drift * dt;
                let dev = (path.z[i + 1] * path.z[i + 1] - acc).abs();
                worst = worst.max(dev);
            }
            errs.push(worst);
        }
        assert!(
            errs[1] < errs[0],
            "decomposition residual must shrink: {errs:?}"
        );
        assert!(errs[1] < 0.2, "residual too large: {errs:?}");
    }

    #[test]
    fn brackets_match_integrated_variance() {
        // mean over paths of [P](1) / int V dt close to 1 (5% at n=2048)
        let engine = VolterraEngine::new(
            LimitModelSpec::Sq {
                mu: 1.0,
                gamma: 0.3,
                beta: 0.3,
                k: unit_k(1.0),
                phi: unit_phi(1.0),
            },
            2048,
        )
        .unwrap();
        let n_paths = 40;
        let mut ratio_sum = 0.0;
        for rep in 0..n_paths {
            let mut rng = replication_rng(15, rep);
            let path = engine.simulate(&mut rng);
            let bracket: f64 = path.db1.iter().zip(&path.v).map(|(db, v)| v * db * db).sum();
            ratio_sum += bracket / path.x.last().unwrap();
        }
        let mean_ratio = ratio_sum / n_paths as f64;
        assert!(
            (mean_ratio - 1.0).abs() < 0.05,
            "bracket/intV ratio {mean_ratio}"
        );
    }

    #[test]
    fn euler_self_convergence_of_terminal_mean() {
        // E[V(1)] moves by less than combined MC error when the grid
        // doubles, for all four variants.
        let specs: Vec<LimitModelSpec> = vec![
            LimitModelSpec::Pq {
                mu: 1.0,
                gamma: 0.3,
                k: unit_k(1.0),
            },
            LimitModelSpec::Sq {
                mu: 1.0,
                gamma: 0.3,
                beta: 0.3,
                k: unit_k(1.0),
                phi: unit_phi(1.0),
            },
            LimitModelSpec::Nu {
                alpha: 0.7,
                lambda: 1.0,
                mu_star: 1.0,
                k: unit_k(1.0),
            },
            LimitModelSpec::RoughHestonRef {
                v0: 0.04,
                lambda: 1.0,
                alpha: 0.6,
                theta0: ThetaZero::Constant(0.06),
                vol_of_vol: 0.3,
                rho: -0.5,
            },
        ];
        let n_paths = 600;
        for spec in specs {
            let mut stats = Vec::new();
            for &n in &[512usize, 1024] {
                let engine = VolterraEngine::new(spec.clone(), n).unwrap();
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for rep in 0..n_paths {
                    let mut rng = replication_rng(16, rep as u64);
                    let v1 = *engine.simulate(&mut rng).v.last().unwrap();
                    sum += v1;
                    sumsq += v1 * v1;
                }
                let mean = sum / n_paths as f64;
                let var = (sumsq / n_paths as f64 - mean * mean).max(0.0);
                stats.push((mean, (var / n_paths as f64).sqrt()));
            }
            let (m1, s1) = stats[0];
            let (m2, s2) = stats[1];
            let combined = (s1 * s1 + s2 * s2).sqrt();
            assert!(
                (m1 - m2).abs() < 3.0 * combined.max(1e-4),
                "{spec:?}: {m1} vs {m2} (combined se {combined})"
            );
        }
    }

    #[test]
    fn validation_errors() {
        assert!(LimitModelSpec::Pq {
            mu: 1.0,
            gamma: 1.2,
            k: unit_k(1.0)
        }
        .validate()
        .is_err());
        assert!(LimitModelSpec::Sq {
            mu: 1.0,
            gamma: 0.6,
            beta: 0.6,
            k: unit_k(1.0),
            phi: unit_phi(1.0)
        }
        .validate()
        .is_err());
        assert!(LimitModelSpec::Nu {
            alpha: 0.4,
            lambda: 1.0,
            mu_star: 1.0,
            k: unit_k(1.0)
        }
        .validate()
        .is_err());
        // NU with a kernel singular at zero
        assert!(LimitModelSpec::Nu {
            alpha: 0.7,
            lambda: 1.0,
            mu_star: 1.0,
            k: KernelSpec::mittag_leffler(0.8, 1.0)
        }
        .validate()
        .is_err());
        assert!(LimitModelSpec::RoughHestonRef {
            v0: 0.04,
            lambda: 1.0,
            alpha: 0.6,
            theta0: ThetaZero::Constant(0.04),
            vol_of_vol: 0.3,
            rho: -1.5
        }
        .validate()
        .is_err());
    }
}
