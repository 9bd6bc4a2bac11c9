//! Statistical estimators connecting simulations across scales: Hölder
//! regularity by structure-function regression, the weak Zumbach
//! covariance asymmetry with a moving-block bootstrap, Kolmogorov-Smirnov
//! distances, and the micro-vs-macro convergence ladder.

use crate::error::{Error, Result};
use crate::exec;
use crate::kernels::{KernelSpec, Regime, ScaledKernelPair};
use crate::qhawkes::{simulate_with_rng, QHawkesParams};
use crate::scaling::{rescale_stable, rescale_unstable, RescaledPath, UnstableSchedule};
use crate::volterra::{LimitModelSpec, MacroPath, VolterraEngine};
use rand::Rng;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Hölder regularity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderReport {
    /// Estimated Hölder exponent (mean over q of slope_q / q).
    pub exponent: f64,
    /// Mean regression R^2 across q.
    pub r_squared: f64,
    /// (q, fitted slope of log S_q against log lag).
    pub per_q_slopes: Vec<(f64, f64)>,
    /// Fitted exponent at or above 0.99: the path is smooth at this
    /// resolution and the exponent is reported as ">= 1".
    pub smooth: bool,
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Dyadic lags 1, 2, 4, ..., n/8.
fn dyadic_lags(n: usize) -> Vec<usize> {
    let mut lags = Vec::new();
    let mut lag = 1;
    while lag <= n / 8 {
        lags.push(lag);
        lag *= 2;
    }
    lags
}

/// Empirical q-th absolute moment of increments at each lag, averaged over
/// the supplied paths.
fn structure_function(paths: &[&[f64]], lags: &[usize], q: f64) -> Vec<f64> {
    lags.iter()
        .map(|&lag| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for path in paths {
                for i in 0..path.len() - lag {
                    sum += (path[i + lag] - path[i]).abs().powf(q);
                    count += 1;
                }
            }
            sum / count as f64
        })
        .collect()
}

/// Structure-function Hölder estimate pooled across paths:
/// regress log S_q(lag) on log lag over dyadic lags, H = mean(slope_q / q).
pub fn holder_estimate_pooled(paths: &[&[f64]], q_list: &[f64]) -> Result<HolderReport> {
    let n = paths.first().map_or(0, |p| p.len());
    if paths.is_empty() || n < 256 {
        return Err(Error::InsufficientData(format!(
            "need at least one path with >= 256 points, got {} points",
            n
        )));
    }
    if paths.iter().any(|p| p.len() != n) {
        return Err(Error::Validation("paths must share one grid".into()));
    }
    if q_list.is_empty() || q_list.iter().any(|&q| !(q > 0.0 && q <= 4.0)) {
        return Err(Error::Domain(format!("bad moment orders {q_list:?}")));
    }
    let lags = dyadic_lags(n - 1);
    let log_lags: Vec<f64> = lags.iter().map(|&l| (l as f64).ln()).collect();
    let mut per_q_slopes = Vec::with_capacity(q_list.len());
    let mut h_sum = 0.0;
    let mut r2_sum = 0.0;
    for &q in q_list {
        let s = structure_function(paths, &lags, q);
        if s.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InsufficientData(
                "degenerate path: a structure function vanishes, exponent undefined".into(),
            ));
        }
        let log_s: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let (slope, _, r2) = ols(&log_lags, &log_s);
        per_q_slopes.push((q, slope));
        h_sum += slope / q;
        r2_sum += r2;
    }
    let exponent = h_sum / q_list.len() as f64;
    Ok(HolderReport {
        exponent,
        r_squared: r2_sum / q_list.len() as f64,
        per_q_slopes,
        smooth: exponent >= 0.99,
    })
}

/// Single-path variant.
pub fn holder_estimate(path: &[f64], q_list: &[f64]) -> Result<HolderReport> {
    holder_estimate_pooled(&[path], q_list)
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

/// Two-sample Kolmogorov-Smirnov statistic in [0, 1].
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("ks needs non-empty samples".into()));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut d = 0.0f64;
    while ia < xa.len() && ib < xb.len() {
        let x = xa[ia].min(xb[ib]);
        while ia < xa.len() && xa[ia] <= x {
            ia += 1;
        }
        while ib < xb.len() && xb[ib] <= x {
            ib += 1;
        }
        d = d.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample KS statistic against the unit exponential distribution.
pub fn ks_statistic_exp1(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("ks needs a non-empty sample".into()));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in x.iter().enumerate() {
        let f = 1.0 - (-v).exp();
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

/// KS test against Exp(1): true when the statistic clears the asymptotic
/// critical value at the given level (supported levels 0.01/0.05).
pub fn exp1_ks_passes(samples: &[f64], level: f64) -> Result<bool> {
    let c = if (level - 0.01).abs() < 1e-12 {
        1.628
    } else if (level - 0.05).abs() < 1e-12 {
        1.358
    } else {
        return Err(Error::Domain(format!("unsupported KS level {level}")));
    };
    let n = samples.len() as f64;
    let d = ks_statistic_exp1(samples)?;
    Ok(d <= c / (n.sqrt() + 0.12 + 0.11 / n.sqrt()))
}

// ---------------------------------------------------------------------------
// Weak Zumbach statistic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolProxy {
    /// Realized variance from non-overlapping price sub-windows.
    RealizedFromPrice,
    /// The simulated spot variance integrated over the window.
    TrueV,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZumbachConfig {
    /// Window length in macro time.
    pub tau: f64,
    /// Fraction of the series dropped as burn-in (from the start).
    pub burn_in_fraction: f64,
    /// Sub-window length, in grid steps, for realized variance.
    pub rv_subwindow: usize,
    pub vol_proxy: VolProxy,
    pub n_bootstrap: usize,
    pub bootstrap_seed: u64,
    /// Two-sided bootstrap CI level (e.g. 0.99).
    pub ci_level: f64,
}

impl Default for ZumbachConfig {
    fn default() -> Self {
        ZumbachConfig {
            tau: 1.0 / 16.0,
            burn_in_fraction: 0.0,
            rv_subwindow: 16,
            vol_proxy: VolProxy::RealizedFromPrice,
            n_bootstrap: 1000,
            bootstrap_seed: 0,
            ci_level: 0.99,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZumbachReport {
    pub statistic: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub tau: f64,
    pub n_windows: usize,
}

fn population_cov(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / n
}

struct WindowStats {
    r2_past: Vec<f64>,
    r2_fut: Vec<f64>,
    rv_past: Vec<f64>,
    rv_fut: Vec<f64>,
}

fn window_stats(
    price: &[f64],
    true_v: Option<(&[f64], f64)>,
    n_tau: usize,
    burn: usize,
    rv_sub: usize,
) -> WindowStats {
    let n = price.len() - 1;
    let rv = |a: usize, b: usize| -> f64 {
        match true_v {
            Some((v, dt)) => v[a..b].iter().sum::<f64>() * dt,
            None => {
                let mut s = 0.0;
                let mut lo = a;
                while lo + rv_sub <= b {
                    let d = price[lo + rv_sub] - price[lo];
                    s += d * d;
                    lo += rv_sub;
                }
                s
            }
        }
    };
    let mut st = WindowStats {
        r2_past: Vec::new(),
        r2_fut: Vec::new(),
        rv_past: Vec::new(),
        rv_fut: Vec::new(),
    };
    for i in (burn + n_tau)..=(n - n_tau) {
        let rp = price[i] - price[i - n_tau];
        let rf = price[i + n_tau] - price[i];
        st.r2_past.push(rp * rp);
        st.r2_fut.push(rf * rf);
        st.rv_past.push(rv(i - n_tau, i));
        st.rv_fut.push(rv(i, i + n_tau));
    }
    st
}

fn zumbach_statistic(st: &WindowStats) -> f64 {
    population_cov(&st.r2_past, &st.rv_fut) - population_cov(&st.rv_past, &st.r2_fut)
}

/// Weak Zumbach covariance asymmetry
/// `C(tau) = Cov(r^2_past, RV_future) - Cov(RV_past, r^2_future)` over
/// sliding windows, with a moving-block bootstrap confidence interval
/// (block length = window length, respecting serial dependence).
///
/// `price` is a path on a uniform grid over [0, 1] with n+1 points; with
/// [`VolProxy::TrueV`], `true_v` supplies the simulated variance on the
/// same grid. With zero burn-in the statistic is antisymmetric under time
/// reversal of the input by construction.
pub fn weak_zumbach(
    price: &[f64],
    true_v: Option<&[f64]>,
    cfg: &ZumbachConfig,
) -> Result<ZumbachReport> {
    let n = price.len().saturating_sub(1);
    if n < 16 {
        return Err(Error::InsufficientData("price path too short".into()));
    }
    let dt = 1.0 / n as f64;
    if !(cfg.tau > 0.0 && cfg.tau < 0.25) {
        return Err(Error::Config(format!(
            "window tau must lie in (0, horizon/4), got {}",
            cfg.tau
        )));
    }
    let n_tau = (cfg.tau / dt).round() as usize;
    if n_tau == 0 {
        return Err(Error::Config("tau below grid resolution".into()));
    }
    if matches!(cfg.vol_proxy, VolProxy::RealizedFromPrice) && n_tau % cfg.rv_subwindow != 0 {
        return Err(Error::Config(format!(
            "tau must span a whole number of realized-variance sub-windows \
             ({n_tau} grid steps vs sub-window {})",
            cfg.rv_subwindow
        )));
    }
    let tv = match cfg.vol_proxy {
        VolProxy::TrueV => Some((
            true_v.ok_or_else(|| Error::Config("true-V proxy needs the variance path".into()))?,
            dt,
        )),
        VolProxy::RealizedFromPrice => None,
    };
    if let Some((v, _)) = tv {
        if v.len() != price.len() {
            return Err(Error::Validation("price and variance grids differ".into()));
        }
    }
    let burn = (cfg.burn_in_fraction * n as f64).round() as usize;
    if burn + 2 * n_tau >= n {
        return Err(Error::InsufficientData("no complete windows after burn-in".into()));
    }
    let st = window_stats(price, tv, n_tau, burn, cfg.rv_subwindow);
    let m = st.r2_past.len();
    if m < 30 {
        return Err(Error::InsufficientData(format!(
            "only {m} windows, need >= 30"
        )));
    }
    let statistic = zumbach_statistic(&st);

    // moving-block bootstrap over window centers
    let block = n_tau.max(1).min(m);
    let n_blocks = m.div_ceil(block);
    let mut rng = exec::replication_rng(cfg.bootstrap_seed, 0);
    let mut boot = Vec::with_capacity(cfg.n_bootstrap);
    for _ in 0..cfg.n_bootstrap {
        let mut rs = WindowStats {
            r2_past: Vec::with_capacity(m),
            r2_fut: Vec::with_capacity(m),
            rv_past: Vec::with_capacity(m),
            rv_fut: Vec::with_capacity(m),
        };
        for _ in 0..n_blocks {
            let start = rng.gen_range(0..=(m - block));
            for i in start..start + block {
                if rs.r2_past.len() >= m {
                    break;
                }
                rs.r2_past.push(st.r2_past[i]);
                rs.r2_fut.push(st.r2_fut[i]);
                rs.rv_past.push(st.rv_past[i]);
                rs.rv_fut.push(st.rv_fut[i]);
            }
        }
        boot.push(zumbach_statistic(&rs));
    }
    boot.sort_by(f64::total_cmp);
    let a = (1.0 - cfg.ci_level) / 2.0;
    let lo_idx = ((boot.len() as f64 * a) as usize).min(boot.len() - 1);
    let hi_idx = ((boot.len() as f64 * (1.0 - a)) as usize).min(boot.len() - 1);
    Ok(ZumbachReport {
        statistic,
        ci_low: boot[lo_idx],
        ci_high: boot[hi_idx],
        tau: cfg.tau,
        n_windows: m,
    })
}

/// Percentile bootstrap CI for the mean of i.i.d. values (pooling
/// per-path statistics across independent paths).
pub fn bootstrap_mean_ci(values: &[f64], n_boot: usize, seed: u64, level: f64) -> (f64, f64, f64) {
    let m = values.len();
    let mean = values.iter().sum::<f64>() / m as f64;
    let mut rng = exec::replication_rng(seed, 1);
    let mut boot: Vec<f64> = (0..n_boot)
        .map(|_| {
            let mut s = 0.0;
            for _ in 0..m {
                s += values[rng.gen_range(0..m)];
            }
            s / m as f64
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let a = (1.0 - level) / 2.0;
    let lo = boot[((n_boot as f64 * a) as usize).min(n_boot - 1)];
    let hi = boot[((n_boot as f64 * (1.0 - a)) as usize).min(n_boot - 1)];
    (mean, lo, hi)
}

// ---------------------------------------------------------------------------
// Convergence ladder
// ---------------------------------------------------------------------------

/// Functional extracted from each path for the distributional comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// X(1): terminal rescaled count / integrated variance.
    TerminalX,
    /// P*(1): terminal rescaled price.
    TerminalP,
    /// Local slope of X around t (variance proxy).
    VProxy { t: f64, half_width: f64 },
}

impl Functional {
    pub fn label(&self) -> String {
        match self {
            Functional::TerminalX => "X(1)".into(),
            Functional::TerminalP => "P(1)".into(),
            Functional::VProxy { t, .. } => format!("V({t})"),
        }
    }

    fn from_rescaled(&self, rp: &RescaledPath) -> f64 {
        match *self {
            Functional::TerminalX => rp.x_terminal(),
            Functional::TerminalP => rp.pstar_terminal(),
            Functional::VProxy { t, half_width } => {
                let n = rp.grid.len() - 1;
                let i = ((t * n as f64).round() as usize).clamp(1, n - 1);
                let w = ((half_width * n as f64).round() as usize).clamp(1, i.min(n - i));
                (rp.x[i + w] - rp.x[i - w]) / (2.0 * w as f64 / n as f64)
            }
        }
    }

    fn from_macro(&self, mp: &MacroPath) -> f64 {
        match *self {
            Functional::TerminalX => *mp.x.last().unwrap(),
            Functional::TerminalP => *mp.p.last().unwrap(),
            Functional::VProxy { t, .. } => mp.v[mp.index_of(t)],
        }
    }
}

/// Microscopic side of a ladder: mother kernels plus regime parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MicroSide {
    Scaled {
        mother_k: KernelSpec,
        mother_phi: KernelSpec,
        regime: Regime,
        mu: f64,
    },
    Unstable {
        mother_k: KernelSpec,
        mother_phi: KernelSpec,
        schedule: UnstableSchedule,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderConfig {
    pub micro: MicroSide,
    pub macro_spec: LimitModelSpec,
    pub t_ladder: Vec<f64>,
    pub n_reps: usize,
    /// Grid points for rescaled micro paths.
    pub n_grid: usize,
    /// Euler steps for macro paths.
    pub n_steps_macro: usize,
    pub functional: Functional,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderCell {
    pub horizon: f64,
    pub ks: f64,
    pub n_micro: usize,
    pub n_macro: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub master_seed: u64,
    pub description: String,
}

/// Aggregate diagnostics output; serializes to JSON, the ladder
/// additionally to a flat CSV.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zumbach: Option<ZumbachReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<LadderCell>,
    /// Functional label for the ladder CSV.
    #[serde(default)]
    pub functional: String,
    pub metadata: ReportMeta,
}

impl DiagnosticsReport {
    pub fn validate(&self) -> Result<()> {
        if let Some(z) = &self.zumbach {
            if !(z.ci_low <= z.ci_high) {
                return Err(Error::Validation("zumbach CI bounds out of order".into()));
            }
            if z.n_windows == 0 {
                return Err(Error::Validation("zumbach windows must be > 0".into()));
            }
        }
        for c in &self.convergence {
            if !(0.0..=1.0).contains(&c.ks) {
                return Err(Error::Validation(format!("ks out of range: {}", c.ks)));
            }
            if c.n_micro == 0 || c.n_macro == 0 {
                return Err(Error::Validation("ladder sample sizes must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn ladder_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "T,functional,ks,n_reps")?;
        for c in &self.convergence {
            writeln!(
                w,
                "{:.16e},{},{:.16e},{}",
                c.horizon, self.functional, c.ks, c.n_micro
            )?;
        }
        Ok(())
    }
}

fn validate_consistency(micro: &MicroSide, macro_spec: &LimitModelSpec) -> Result<()> {
    let tol = 1e-12;
    match (micro, macro_spec) {
        (
            MicroSide::Scaled {
                regime: Regime::PurelyQuadratic { gamma },
                ..
            },
            LimitModelSpec::Pq { gamma: g2, .. },
        ) if (gamma - g2).abs() < tol => Ok(()),
        (
            MicroSide::Scaled {
                regime: Regime::Stable { gamma, beta },
                ..
            },
            LimitModelSpec::Sq {
                gamma: g2,
                beta: b2,
                ..
            },
        ) if (gamma - g2).abs() < tol && (beta - b2).abs() < tol => Ok(()),
        (
            MicroSide::Unstable { schedule, .. },
            LimitModelSpec::Nu {
                alpha,
                lambda,
                mu_star,
                ..
            },
        ) if (schedule.alpha - alpha).abs() < tol
            && (schedule.lambda_macro - lambda).abs() < tol
            && (schedule.mu_star - mu_star).abs() < tol =>
        {
            Ok(())
        }
        _ => Err(Error::Config(
            "micro and macro ladder parameters are inconsistent".into(),
        )),
    }
}

/// For each horizon in the ladder, simulate micro paths, rescale, extract
/// the functional and compare with macro-model samples via the two-sample
/// KS distance. The KS sequence should be non-increasing in T up to Monte
/// Carlo noise when the two sides share parameters.
pub fn convergence_ladder(cfg: &LadderConfig) -> Result<DiagnosticsReport> {
    if cfg.t_ladder.len() < 3 {
        return Err(Error::Config(format!(
            "ladder needs at least 3 horizons, got {}",
            cfg.t_ladder.len()
        )));
    }
    if cfg.n_reps == 0 {
        return Err(Error::Config("n_reps must be positive".into()));
    }
    validate_consistency(&cfg.micro, &cfg.macro_spec)?;

    // Macro samples: one engine, one set, reused across the ladder. Stream
    // indices beyond the micro cells keep all streams distinct.
    let engine = VolterraEngine::new(cfg.macro_spec.clone(), cfg.n_steps_macro)?;
    let macro_stream_base = cfg.t_ladder.len() as u64 * cfg.n_reps as u64;
    let macro_samples: Vec<f64> = exec::par_map_indexed(cfg.n_reps, |rep| {
        let mut rng = exec::replication_rng(cfg.master_seed, macro_stream_base + rep as u64);
        let path = engine.simulate(&mut rng);
        cfg.functional.from_macro(&path)
    });

    let mut cells = Vec::with_capacity(cfg.t_ladder.len());
    for (cell_idx, &horizon) in cfg.t_ladder.iter().enumerate() {
        let params = match &cfg.micro {
            MicroSide::Scaled {
                mother_k,
                mother_phi,
                regime,
                mu,
            } => {
                let pair = ScaledKernelPair::new(
                    mother_k.clone(),
                    mother_phi.clone(),
                    *regime,
                    horizon,
                )?;
                QHawkesParams::new(*mu, pair.scaled_phi(), pair.scaled_k(), horizon)?
            }
            MicroSide::Unstable {
                mother_k,
                mother_phi,
                schedule,
            } => schedule.micro_params(mother_k.clone(), mother_phi.clone(), horizon)?,
        };
        let stream_base = cell_idx as u64 * cfg.n_reps as u64;
        let micro: Vec<Result<f64>> = exec::par_map_indexed(cfg.n_reps, |rep| {
            let mut rng = exec::replication_rng(cfg.master_seed, stream_base + rep as u64);
            let events = simulate_with_rng(&params, &mut rng)?;
            let rp = match &cfg.micro {
                MicroSide::Scaled { .. } => rescale_stable(&events, &params, cfg.n_grid)?,
                MicroSide::Unstable { schedule, .. } => {
                    rescale_unstable(&events, &params, schedule, cfg.n_grid)?
                }
            };
            Ok(cfg.functional.from_rescaled(&rp))
        });
        let micro: Vec<f64> = micro.into_iter().collect::<Result<_>>()?;
        let ks = ks_distance(&micro, &macro_samples)?;
        cells.push(LadderCell {
            horizon,
            ks,
            n_micro: micro.len(),
            n_macro: macro_samples.len(),
        });
    }
    let report = DiagnosticsReport {
        holder: None,
        zumbach: None,
        convergence: cells,
        functional: cfg.functional.label(),
        metadata: ReportMeta {
            master_seed: cfg.master_seed,
            description: "micro-vs-macro convergence ladder".into(),
        },
    };
    report.validate()?;
    Ok(report)
}
