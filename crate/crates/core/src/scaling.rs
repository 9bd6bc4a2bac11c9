//! Event streams to rescaled macroscopic observables.
//!
//! For a horizon T the stable/purely-quadratic normalization is
//!
//! ```text
//! X(t) = N_{tT}/T,   P*(t) = P_{tT}/sqrt(T),   M*(t) = (N_{tT} - Lambda(tT))/sqrt(T),
//! Z*(t) = sum_{t_i <= tT} sign_i k_T(tT - t_i),
//! ```
//!
//! while the nearly-unstable regime scales counts by (1-a_T)/(T mu_T),
//! martingales by its square root, the feedback by 1/sqrt(mu_T), and also
//! records the rescaled intensity. Path values at a grid point use events
//! with t_i <= tT (cadlag convention). The count-based bracket identity
//! [M*] = [P*] = X holds exactly on the grid by construction.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::qhawkes::{compensator, EventStream, QHawkesParams};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Which normalization produced a rescaled path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    PurelyQuadratic,
    Stable,
    NearlyUnstable,
}

/// Grid-sampled macroscopic observables of one microscopic simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledPath {
    pub regime: RegimeTag,
    /// Horizon the events were simulated on.
    pub horizon: f64,
    /// Uniform macro-time grid on [0, 1]: n_grid + 1 points.
    pub grid: Vec<f64>,
    /// Event counts N_{tT} at the grid points.
    pub counts: Vec<u64>,
    /// Rescaled counts.
    pub x: Vec<f64>,
    /// Rescaled price martingale.
    pub pstar: Vec<f64>,
    /// Rescaled compensated count martingale.
    pub mstar: Vec<f64>,
    /// Rescaled feedback process.
    pub zstar: Vec<f64>,
    /// Rescaled intensity (nearly-unstable regime only).
    pub lambda_star: Option<Vec<f64>>,
    /// Grid finer than half the mean inter-event spacing (informational).
    pub oversampled: bool,
}

impl RescaledPath {
    pub fn x_terminal(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn pstar_terminal(&self) -> f64 {
        *self.pstar.last().unwrap()
    }

    /// Count-based bracket of the price/compensated-count martingales,
    /// sharing the normalization of `x` so the identity is bit-exact.
    pub fn bracket(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// CSV columns `t,X,Pstar,Mstar,Zstar[,lambda_star]`.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        if let Some(ls) = &self.lambda_star {
            writeln!(w, "t,X,Pstar,Mstar,Zstar,lambda_star")?;
            for i in 0..self.grid.len() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.grid[i], self.x[i], self.pstar[i], self.mstar[i], self.zstar[i], ls[i]
                )?;
            }
        } else {
            writeln!(w, "t,X,Pstar,Mstar,Zstar")?;
            for i in 0..self.grid.len() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.grid[i], self.x[i], self.pstar[i], self.mstar[i], self.zstar[i]
                )?;
            }
        }
        Ok(())
    }
}

/// Sweep: cumulative counts and prices at the grid times (t_i <= g).
fn sweep_counts(events: &EventStream, grid_times: &[f64]) -> (Vec<u64>, Vec<i64>) {
    let mut counts = Vec::with_capacity(grid_times.len());
    let mut prices = Vec::with_capacity(grid_times.len());
    let mut idx = 0usize;
    let mut price = 0i64;
    for &g in grid_times {
        while idx < events.times.len() && events.times[idx] <= g {
            price += events.signs[idx] as i64;
            idx += 1;
        }
        counts.push(idx as u64);
        prices.push(price);
    }
    (counts, prices)
}

/// Z(tT) = sum_{t_i <= tT} sign_i k(tT - t_i) at each grid time, exploiting
/// the exponential semigroup when possible.
fn sweep_feedback(k: &crate::kernels::ScaledKernel, events: &EventStream, grid_times: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid_times.len());
    // exponential fast path
    let exp_par = match k.mother {
        KernelSpec::Exponential { rate, scale } => {
            Some((rate / k.time_scale, k.amplitude * scale))
        }
        KernelSpec::Zero => Some((1.0, 0.0)),
        _ => None,
    };
    if let Some((rate, scale)) = exp_par {
        let mut acc = 0.0f64; // sum of sign_i e^{-rate (t_cur - t_i)}
        let mut t_cur = 0.0f64;
        let mut idx = 0usize;
        for &g in grid_times {
            while idx < events.times.len() && events.times[idx] <= g {
                let te = events.times[idx];
                acc *= (-rate * (te - t_cur)).exp();
                acc += events.signs[idx] as f64;
                t_cur = te;
                idx += 1;
            }
            out.push(scale * acc * (-rate * (g - t_cur)).exp());
        }
        return Ok(out);
    }
    for &g in grid_times {
        let n = events.times.partition_point(|&ti| ti <= g);
        let mut z = 0.0;
        for i in 0..n {
            z += events.signs[i] as f64 * k.eval(g - events.times[i])?;
        }
        out.push(z);
    }
    Ok(out)
}

fn macro_grid(n_grid: usize) -> Result<Vec<f64>> {
    if n_grid < 2 {
        return Err(Error::Config(format!("n_grid must be >= 2, got {n_grid}")));
    }
    Ok((0..=n_grid).map(|j| j as f64 / n_grid as f64).collect())
}

fn check_events_on_horizon(events: &EventStream, horizon: f64) -> Result<()> {
    events.validate()?;
    if let Some(&last) = events.times.last() {
        if last > horizon {
            return Err(Error::Validation(format!(
                "event at {last} beyond horizon {horizon}"
            )));
        }
    }
    Ok(())
}

/// Rescale a stable-regime (or purely quadratic) simulation onto the
/// macroscopic grid. `params` are the at-horizon parameters the events
/// were simulated with (scaled kernels included).
pub fn rescale_stable(
    events: &EventStream,
    params: &QHawkesParams,
    n_grid: usize,
) -> Result<RescaledPath> {
    let horizon = params.horizon;
    check_events_on_horizon(events, horizon)?;
    let grid = macro_grid(n_grid)?;
    let grid_times: Vec<f64> = grid.iter().map(|t| t * horizon).collect();
    let (counts, prices) = sweep_counts(events, &grid_times);
    let lambda_int = compensator(params, events, &grid_times)?;
    let sqrt_t = horizon.sqrt();
    let x: Vec<f64> = counts.iter().map(|&n| n as f64 / horizon).collect();
    let pstar: Vec<f64> = prices.iter().map(|&p| p as f64 / sqrt_t).collect();
    let mstar: Vec<f64> = counts
        .iter()
        .zip(&lambda_int)
        .map(|(&n, &l)| (n as f64 - l) / sqrt_t)
        .collect();
    let zstar = sweep_feedback(&params.k, events, &grid_times)?;
    let regime = if params.phi.is_zero() {
        RegimeTag::PurelyQuadratic
    } else {
        RegimeTag::Stable
    };
    let oversampled = n_grid as u64 > 2 * events.len() as u64;
    Ok(RescaledPath {
        regime,
        horizon,
        grid,
        counts,
        x,
        pstar,
        mstar,
        zstar,
        lambda_star: None,
        oversampled,
    })
}

/// Nearly-unstable parameter schedule derived from (alpha, lambda, mu*, K):
/// delta = K Gamma(1-alpha)/alpha, a_T = 1 - lambda delta T^{-alpha},
/// mu_T = mu* delta^{-1} T^{alpha-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnstableSchedule {
    pub alpha: f64,
    pub lambda_macro: f64,
    pub mu_star: f64,
    pub k_tail: f64,
    pub delta: f64,
}

impl UnstableSchedule {
    pub fn a_t(&self, horizon: f64) -> f64 {
        1.0 - self.lambda_macro * self.delta * horizon.powf(-self.alpha)
    }

    pub fn mu_t(&self, horizon: f64) -> f64 {
        self.mu_star / self.delta * horizon.powf(self.alpha - 1.0)
    }

    /// Smallest integer horizon with a_T > 0.
    pub fn min_admissible_horizon(&self) -> u64 {
        let t_crit = (self.lambda_macro * self.delta).powf(1.0 / self.alpha);
        let mut t = t_crit.floor().max(1.0) as u64;
        while self.a_t(t as f64) <= 0.0 {
            t += 1;
        }
        t
    }

    /// Warn when a power-law kernel's tail constant deviates from the
    /// schedule's K by more than 5%.
    pub fn kernel_tail_warning(&self, phi: &KernelSpec) -> Option<String> {
        let k_emp = phi.tail_constant()?;
        let dev = (k_emp - self.k_tail).abs() / self.k_tail;
        if dev > 0.05 {
            Some(format!(
                "kernel tail constant {k_emp:.6} deviates {:.1}% from schedule K = {:.6}",
                100.0 * dev,
                self.k_tail
            ))
        } else {
            None
        }
    }

    /// Microscopic parameters at one horizon of the ladder.
    pub fn micro_params(
        &self,
        mother_k: KernelSpec,
        mother_phi: KernelSpec,
        horizon: f64,
    ) -> Result<QHawkesParams> {
        let a_t = self.a_t(horizon);
        if !(0.0 < a_t && a_t < 1.0) {
            return Err(Error::Config(format!(
                "horizon {horizon} gives a_T = {a_t} outside (0,1); minimal admissible horizon is {}",
                self.min_admissible_horizon()
            )));
        }
        let pair = crate::kernels::ScaledKernelPair::new(
            mother_k,
            mother_phi,
            crate::kernels::Regime::NearlyUnstable { a_t },
            horizon,
        )?;
        QHawkesParams::new(self.mu_t(horizon), pair.scaled_phi(), pair.scaled_k(), horizon)
    }
}

/// Build and validate the schedule for a ladder of horizons.
pub fn make_schedule(
    alpha: f64,
    lambda_macro: f64,
    mu_star: f64,
    k_tail: f64,
    t_ladder: &[f64],
) -> Result<UnstableSchedule> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "schedule needs alpha in (1/2, 1), got {alpha}"
        )));
    }
    for (name, v) in [
        ("lambda", lambda_macro),
        ("mu_star", mu_star),
        ("K", k_tail),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("schedule needs {name} > 0, got {v}")));
        }
    }
    let delta = k_tail * gamma(1.0 - alpha) / alpha;
    let schedule = UnstableSchedule {
        alpha,
        lambda_macro,
        mu_star,
        k_tail,
        delta,
    };
    for &t in t_ladder {
        let a = schedule.a_t(t);
        if !(0.0 < a && a < 1.0) {
            return Err(Error::Config(format!(
                "horizon {t} gives a_T = {a} outside (0,1); minimal admissible horizon is {}",
                schedule.min_admissible_horizon()
            )));
        }
    }
    Ok(schedule)
}

/// Rescale a nearly-unstable simulation. `params` must match the schedule
/// at this horizon (same mu_T and kernel scaling), else a configuration
/// error is returned.
pub fn rescale_unstable(
    events: &EventStream,
    params: &QHawkesParams,
    schedule: &UnstableSchedule,
    n_grid: usize,
) -> Result<RescaledPath> {
    let horizon = params.horizon;
    check_events_on_horizon(events, horizon)?;
    let a_t = schedule.a_t(horizon);
    let mu_t = schedule.mu_t(horizon);
    if !(0.0 < a_t && a_t < 1.0) {
        return Err(Error::Config(format!(
            "horizon {horizon} gives a_T = {a_t} outside (0,1)"
        )));
    }
    if (params.mu - mu_t).abs() > 1e-9 * mu_t {
        return Err(Error::Config(format!(
            "params.mu = {} does not match schedule mu_T = {mu_t}",
            params.mu
        )));
    }
    let expected_k_amp = ((1.0 - a_t) / horizon).sqrt();
    if (params.k.amplitude - expected_k_amp).abs() > 1e-9 * expected_k_amp {
        return Err(Error::Config(format!(
            "k amplitude {} does not match schedule sqrt((1-a_T)/T) = {expected_k_amp}",
            params.k.amplitude
        )));
    }
    let expected_phi_amp = 2.0 * a_t - 1.0;
    if (params.phi.amplitude - expected_phi_amp).abs() > 1e-9 * expected_phi_amp.abs().max(1e-12) {
        return Err(Error::Config(format!(
            "phi amplitude {} does not match schedule 2 a_T - 1 = {expected_phi_amp}",
            params.phi.amplitude
        )));
    }

    let grid = macro_grid(n_grid)?;
    let grid_times: Vec<f64> = grid.iter().map(|t| t * horizon).collect();
    let (counts, prices) = sweep_counts(events, &grid_times);
    let lambda_int = compensator(params, events, &grid_times)?;
    let scale_x = (1.0 - a_t) / (horizon * mu_t);
    let scale_mart = scale_x.sqrt();
    let x: Vec<f64> = counts.iter().map(|&n| n as f64 * scale_x).collect();
    let pstar: Vec<f64> = prices.iter().map(|&p| p as f64 * scale_mart).collect();
    let mstar: Vec<f64> = counts
        .iter()
        .zip(&lambda_int)
        .map(|(&n, &l)| (n as f64 - l) * scale_mart)
        .collect();
    let zstar_raw = sweep_feedback(&params.k, events, &grid_times)?;
    let inv_sqrt_mu = 1.0 / mu_t.sqrt();
    let zstar: Vec<f64> = zstar_raw.iter().map(|z| z * inv_sqrt_mu).collect();
    // lambda*(t) = (1-a_T)/mu_T * lambda_{tT}, strictly-prior events
    let scale_lam = (1.0 - a_t) / mu_t;
    let mut lambda_star = Vec::with_capacity(grid_times.len());
    for &g in &grid_times {
        lambda_star.push(scale_lam * crate::qhawkes::intensity_at(params, events, g)?);
    }
    let oversampled = n_grid as u64 > 2 * events.len() as u64;
    Ok(RescaledPath {
        regime: RegimeTag::NearlyUnstable,
        horizon,
        grid,
        counts,
        x,
        pstar,
        mstar,
        zstar,
        lambda_star: Some(lambda_star),
        oversampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Regime, ScaledKernel, ScaledKernelPair};
    use crate::qhawkes::simulate;
    use approx::assert_relative_eq;

    fn stable_params(mu: f64, gamma: f64, beta: f64, horizon: f64) -> QHawkesParams {
        let pair = ScaledKernelPair::new(
            KernelSpec::exponential_unit_l2(1.0),
            if beta == 0.0 {
                KernelSpec::Zero
            } else {
                KernelSpec::exponential_unit_l1(1.0)
            },
            if beta == 0.0 {
                Regime::PurelyQuadratic { gamma }
            } else {
                Regime::Stable { gamma, beta }
            },
            horizon,
        )
        .unwrap();
        QHawkesParams::new(mu, pair.scaled_phi(), pair.scaled_k(), horizon).unwrap()
    }

    #[test]
    fn terminal_count_normalization() {
        // 150 events by T=100 -> X(1) = 1.5
        let params = stable_params(1.0, 0.3, 0.0, 100.0);
        let times: Vec<f64> = (0..150).map(|i| 0.5 + i as f64 * 0.6).collect();
        let signs = vec![1i8; 150];
        let ev = EventStream { times, signs };
        let rp = rescale_stable(&ev, &params, 64).unwrap();
        assert_relative_eq!(rp.x_terminal(), 1.5);
        // all signs +1 -> Pstar(1) = X(1) sqrt(T)
        assert_relative_eq!(
            rp.pstar_terminal(),
            rp.x_terminal() * 100f64.sqrt(),
            max_relative = 1e-14
        );
        assert_eq!(rp.regime, RegimeTag::PurelyQuadratic);
    }

    #[test]
    fn poisson_terminal_x() {
        let params = QHawkesParams::new(
            1.0,
            ScaledKernel::zero(),
            ScaledKernel::zero(),
            1000.0,
        )
        .unwrap();
        let ev = simulate(&params, 4).unwrap();
        let rp = rescale_stable(&ev, &params, 512).unwrap();
        assert!((rp.x_terminal() - 1.0).abs() < 3.0 / 1000f64.sqrt());
    }

    #[test]
    fn empty_stream_rescales_to_zero_paths() {
        let params = stable_params(1.0, 0.3, 0.2, 50.0);
        let rp = rescale_stable(&EventStream::new(), &params, 32).unwrap();
        assert!(rp.x.iter().all(|&v| v == 0.0));
        assert!(rp.pstar.iter().all(|&v| v == 0.0));
        assert!(rp.zstar.iter().all(|&v| v == 0.0));
        // Mstar = -Lambda/sqrt(T), strictly negative after 0
        assert!(rp.mstar[1] < 0.0);
    }

    #[test]
    fn bracket_identity_is_exact() {
        let params = stable_params(1.0, 0.3, 0.25, 200.0);
        let ev = simulate(&params, 8).unwrap();
        let rp = rescale_stable(&ev, &params, 128).unwrap();
        // count-based identity, bit-exact
        assert_eq!(rp.bracket(), rp.x);
        // squared martingale jumps match the X normalization to float
        // reconstruction accuracy
        let sq_jump = (1.0 / params.horizon.sqrt()).powi(2);
        for (i, &n) in rp.counts.iter().enumerate() {
            assert_relative_eq!(
                n as f64 * sq_jump,
                rp.x[i],
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn mstar_is_centered_at_terminal_time() {
        // crude martingale check: mean of Mstar(1) over replications small
        let params = stable_params(1.0, 0.3, 0.2, 300.0);
        let n_reps = 60;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for rep in 0..n_reps {
            let mut rng = crate::exec::replication_rng(15, rep);
            let ev = crate::qhawkes::simulate_with_rng(&params, &mut rng).unwrap();
            let rp = rescale_stable(&ev, &params, 64).unwrap();
            let m = *rp.mstar.last().unwrap();
            sum += m;
            sumsq += m * m;
        }
        let mean = sum / n_reps as f64;
        let var = (sumsq / n_reps as f64 - mean * mean).max(0.0);
        let se = (var / n_reps as f64).sqrt();
        assert!(mean.abs() < 4.0 * se.max(1e-3), "mean {mean} se {se}");
    }

    #[test]
    fn schedule_formulas() {
        // alpha=0.6, lambda=1, mu*=1, K = alpha/Gamma(1-alpha) => delta=1
        let alpha = 0.6f64;
        let k_tail = alpha / gamma(1.0 - alpha);
        let s = make_schedule(alpha, 1.0, 1.0, k_tail, &[100.0]).unwrap();
        assert_relative_eq!(s.delta, 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.a_t(100.0), 1.0 - 100f64.powf(-0.6), max_relative = 1e-14);
        assert!((s.a_t(100.0) - 0.936904).abs() < 1e-6);
        assert!((s.mu_t(100.0) - 0.158489).abs() < 1e-6);
        // (1 - a_T) T^alpha = lambda delta up to float reconstruction
        for t in [10.0, 100.0, 1e4] {
            assert_relative_eq!(
                (1.0 - s.a_t(t)) * t.powf(alpha),
                s.lambda_macro * s.delta,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                t.powf(1.0 - alpha) * s.mu_t(t),
                s.mu_star / s.delta,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn schedule_delta_gamma_half() {
        // alpha=0.5, K=1: delta = Gamma(0.5)/0.5 = 2 sqrt(pi)
        let err = make_schedule(0.5, 1.0, 1.0, 1.0, &[]).unwrap_err();
        // alpha must be strictly above 1/2
        assert!(matches!(err, Error::Config(_)));
        let s = make_schedule(0.500001, 1.0, 1.0, 1.0, &[]).unwrap();
        assert!((s.delta - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn schedule_rejects_small_horizons() {
        // alpha=0.6, lambda*delta = 1: minimal integer T with a_T > 0 is 2
        let alpha = 0.6f64;
        let k_tail = alpha / gamma(1.0 - alpha);
        let err = make_schedule(alpha, 1.0, 1.0, k_tail, &[1.0]).unwrap_err();
        match err {
            Error::Config(msg) => assert!(msg.contains("minimal admissible horizon is 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let s = make_schedule(alpha, 1.0, 1.0, k_tail, &[2.0]).unwrap();
        assert!((s.a_t(2.0) - (1.0 - 2f64.powf(-0.6))).abs() < 1e-14);
        assert!((s.a_t(2.0) - 0.3402).abs() < 1e-4);
    }

    #[test]
    fn kernel_tail_consistency_warning() {
        let s = make_schedule(0.6, 1.0, 1.0, 0.6, &[]).unwrap();
        // matching kernel: K = alpha cutoff^alpha = 0.6 for cutoff = 1
        let ok = KernelSpec::power_law_tail(0.6, 1.0);
        assert!(s.kernel_tail_warning(&ok).is_none());
        // cutoff 2 gives K = 0.6 * 2^0.6, ~52% off
        let off = KernelSpec::power_law_tail(0.6, 2.0);
        assert!(s.kernel_tail_warning(&off).is_some());
        // non-power-law kernels have no tail constant
        assert!(s
            .kernel_tail_warning(&KernelSpec::exponential_unit_l1(1.0))
            .is_none());
    }

    fn nu_setup(horizon: f64) -> (UnstableSchedule, QHawkesParams) {
        let alpha = 0.7f64;
        let phi = KernelSpec::power_law_tail(alpha, 1.0);
        let k_tail = phi.tail_constant().unwrap();
        let schedule = make_schedule(alpha, 1.0, 1.0, k_tail, &[horizon]).unwrap();
        let params = schedule
            .micro_params(KernelSpec::exponential_unit_l2(1.0), phi, horizon)
            .unwrap();
        (schedule, params)
    }

    #[test]
    fn unstable_rescale_and_bounds() {
        let (schedule, params) = nu_setup(200.0);
        let ev = simulate(&params, 12).unwrap();
        let rp = rescale_unstable(&ev, &params, &schedule, 64).unwrap();
        assert_eq!(rp.regime, RegimeTag::NearlyUnstable);
        assert!(rp.lambda_star.is_some());
        assert_eq!(rp.bracket(), rp.x);
        // E[X(1)] <= 1: single path sanity (generous bound)
        assert!(rp.x_terminal() >= 0.0);

        // schedule/params mismatch is a config error
        let mut bad = params.clone();
        bad.mu *= 2.0;
        assert!(matches!(
            rescale_unstable(&ev, &bad, &schedule, 64),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unstable_mean_terminal_x_bounded_by_one() {
        let (schedule, params) = nu_setup(300.0);
        let n_reps = 60;
        let xs: Vec<f64> = (0..n_reps)
            .map(|rep| {
                let mut rng = crate::exec::replication_rng(31, rep);
                let ev = crate::qhawkes::simulate_with_rng(&params, &mut rng).unwrap();
                rescale_unstable(&ev, &params, &schedule, 32)
                    .unwrap()
                    .x_terminal()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / n_reps as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n_reps as f64 - 1.0);
        let se = (var / n_reps as f64).sqrt();
        assert!(mean <= 1.0 + 3.0 * se, "mean X(1) = {mean}, se = {se}");
    }

    #[test]
    fn events_beyond_horizon_rejected() {
        let params = stable_params(1.0, 0.3, 0.0, 10.0);
        let ev = EventStream {
            times: vec![11.0],
            signs: vec![1],
        };
        assert!(matches!(
            rescale_stable(&ev, &params, 16),
            Err(Error::Validation(_))
        ));
    }
}
