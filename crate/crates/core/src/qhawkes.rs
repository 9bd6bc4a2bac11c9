//! Exact simulation of the quadratic Hawkes price process.
//!
//! The counting process N has intensity
//!
//! ```text
//! lambda_t = mu + sum_{t_i < t} phi(t - t_i) + Z_t^2,
//! Z_t = sum_{t_i < t} sign_i k(t - t_i),
//! ```
//!
//! with i.i.d. fair signs. Simulation is Ogata-style thinning against the
//! piecewise non-increasing majorant obtained by dropping the signs in Z
//! and bounding Z^2 by the squared unsigned sum. The compensator and the
//! time-change residuals turn a correct simulator into a unit-rate Poisson
//! stream, which the tests exploit.

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, ScaledKernel};
use crate::quad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Default cap on the number of simulated events. Stability guarantees
/// non-explosion; the cap catches misconfiguration.
pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;

/// Kernel contributions older than the lag where both phi and k^2 fall
/// below this multiple of mu are dropped from intensity sums.
const TRUNCATION_REL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct QHawkesParams {
    /// Baseline intensity (events per unit time).
    pub mu: f64,
    /// Linear self-excitation kernel (phi-type).
    pub phi: ScaledKernel,
    /// Signed feedback kernel (k-type).
    pub k: ScaledKernel,
    /// Simulation horizon.
    pub horizon: f64,
    /// Explosion guard.
    pub max_events: usize,
}

impl QHawkesParams {
    pub fn new(mu: f64, phi: ScaledKernel, k: ScaledKernel, horizon: f64) -> Result<Self> {
        let p = QHawkesParams {
            mu,
            phi,
            k,
            horizon,
            max_events: DEFAULT_MAX_EVENTS,
        };
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor for unscaled mother kernels.
    pub fn from_specs(mu: f64, phi: KernelSpec, k: KernelSpec, horizon: f64) -> Result<Self> {
        Self::new(
            mu,
            ScaledKernel::unscaled(phi),
            ScaledKernel::unscaled(k),
            horizon,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!(
                "baseline intensity must be positive, got {}",
                self.mu
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        self.phi.validate()?;
        self.k.validate()?;
        let s = self.stability_sum()?;
        if s >= 1.0 {
            return Err(Error::Config(format!(
                "stability violated: ||phi||_1 + ||k||_2^2 = {s} >= 1"
            )));
        }
        Ok(())
    }

    /// ||phi||_1 + ||k||_2^2.
    pub fn stability_sum(&self) -> Result<f64> {
        Ok(self.phi.l1_norm()? + self.k.l2_norm_sq()?)
    }
}

/// Signed jump times of the price process: `price = cumulative sum of
/// signs`, and the bracket of the price equals the event count by
/// construction.
///
/// Streams produced by the simulator have strictly increasing times;
/// crafted inputs may carry ties, which intensity evaluation resolves by
/// treating both events as strictly prior.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    pub times: Vec<f64>,
    pub signs: Vec<i8>,
}

impl EventStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.signs.len() {
            return Err(Error::Validation(format!(
                "times/signs length mismatch: {} vs {}",
                self.times.len(),
                self.signs.len()
            )));
        }
        for w in self.times.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(Error::Validation(format!(
                    "event times not ordered: {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Validation(
                "non-finite or negative event time".into(),
            ));
        }
        if self.signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Validation("signs must be +1 or -1".into()));
        }
        Ok(())
    }

    /// Number of events with t_i <= t.
    pub fn count_at(&self, t: f64) -> usize {
        self.times.partition_point(|&ti| ti <= t)
    }

    /// Price at time t: sum of signs of events with t_i <= t.
    pub fn price_at(&self, t: f64) -> i64 {
        self.signs[..self.count_at(t)]
            .iter()
            .map(|&s| s as i64)
            .sum()
    }

    /// CSV with header `time,sign`; 17 significant digits make the
    /// round-trip bit-exact.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time,sign")?;
        for (t, s) in self.times.iter().zip(&self.signs) {
            writeln!(w, "{t:.16e},{s}")?;
        }
        Ok(())
    }

    pub fn from_csv<R: std::io::BufRead>(r: R) -> Result<Self> {
        let mut times = Vec::new();
        let mut signs = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Validation(format!("csv read: {e}")))?;
            if i == 0 {
                if line.trim() != "time,sign" {
                    return Err(Error::Validation(format!("bad csv header: {line}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (t, s) = line
                .split_once(',')
                .ok_or_else(|| Error::Validation(format!("bad csv row: {line}")))?;
            times.push(
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Validation(format!("bad time '{t}': {e}")))?,
            );
            signs.push(
                s.trim()
                    .parse::<i8>()
                    .map_err(|e| Error::Validation(format!("bad sign '{s}': {e}")))?,
            );
        }
        let ev = EventStream { times, signs };
        ev.validate()?;
        Ok(ev)
    }
}

/// Smallest lag beyond which the kernel value stays below `threshold`
/// (kernels are non-increasing). Returns 0 for the zero kernel.
fn lag_window(kernel: &ScaledKernel, threshold: f64) -> f64 {
    if kernel.is_zero() {
        return 0.0;
    }
    let val = |t: f64| kernel.eval(t).unwrap_or(0.0);
    if val(0.0) <= threshold {
        return 0.0;
    }
    let mut hi = 1.0;
    while val(hi) > threshold {
        hi *= 2.0;
        if hi > 1e15 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if val(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    hi
}

/// Direct windowed sums over strictly prior events:
/// (sum phi, signed sum k, unsigned sum k).
///
/// The k-window threshold is much tighter than phi's: truncation error in
/// Z gets amplified by the square, and the recursive exponential path must
/// agree with these sums to 1e-10.
fn sums_at(params: &QHawkesParams, events: &EventStream, t: f64) -> (f64, f64, f64) {
    let idx = events.times.partition_point(|&ti| ti < t);
    let thr_phi = TRUNCATION_REL * params.mu;
    let thr_k = 0.1 * TRUNCATION_REL * params.mu.sqrt().max(1.0);
    let l_phi = lag_window(&params.phi, thr_phi);
    let l_k = lag_window(&params.k, thr_k);
    let mut s_phi = 0.0;
    let mut z = 0.0;
    let mut z_abs = 0.0;
    for i in (0..idx).rev() {
        let lag = t - events.times[i];
        if lag > l_phi && lag > l_k {
            break;
        }
        if lag <= l_phi {
            s_phi += params.phi.eval(lag).unwrap_or(0.0);
        }
        if lag <= l_k {
            let kv = params.k.eval(lag).unwrap_or(0.0);
            z += events.signs[i] as f64 * kv;
            z_abs += kv;
        }
    }
    (s_phi, z, z_abs)
}

/// Intensity at time t given strictly prior events.
pub fn intensity_at(params: &QHawkesParams, events: &EventStream, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("intensity at bad time {t}")));
    }
    events.validate()?;
    let (s_phi, z, _) = sums_at(params, events, t);
    Ok(params.mu + s_phi + z * z)
}

/// Thinning envelope: signs dropped in Z, Z^2 bounded by the squared
/// unsigned sum. Non-increasing between events for non-increasing kernels,
/// hence a valid piecewise envelope.
pub fn majorant_at(params: &QHawkesParams, events: &EventStream, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("majorant at bad time {t}")));
    }
    events.validate()?;
    let (s_phi, _, z_abs) = sums_at(params, events, t);
    Ok(params.mu + s_phi + z_abs * z_abs)
}

/// Effective exponential kernel parameters (rate, scale), if the scaled
/// kernel collapses to `scale * exp(-rate t)` or zero.
fn as_exponential(k: &ScaledKernel) -> Option<(f64, f64)> {
    if k.is_zero() {
        return Some((1.0, 0.0));
    }
    match k.mother {
        KernelSpec::Exponential { rate, scale } => Some((rate / k.time_scale, k.amplitude * scale)),
        KernelSpec::MittagLeffler { alpha, lambda } if alpha == 1.0 => {
            Some((lambda / k.time_scale, k.amplitude * lambda))
        }
        _ => None,
    }
}

/// Incremental intensity state. Exponential kernels update in O(1) through
/// decay accumulators; other kernels fall back to windowed direct sums.
enum IntensityState<'a> {
    Exponential {
        params: &'a QHawkesParams,
        rate_phi: f64,
        scale_phi: f64,
        rate_k: f64,
        scale_k: f64,
        /// sum of e^{-rate_phi (t - t_i)}
        phi_acc: f64,
        /// signed sum of e^{-rate_k (t - t_i)}
        z_acc: f64,
        /// unsigned counterpart
        z_abs_acc: f64,
        t: f64,
    },
    General {
        params: &'a QHawkesParams,
        events: EventStream,
        t: f64,
    },
}

impl<'a> IntensityState<'a> {
    fn new(params: &'a QHawkesParams) -> Self {
        if let (Some((rp, sp)), Some((rk, sk))) =
            (as_exponential(&params.phi), as_exponential(&params.k))
        {
            IntensityState::Exponential {
                params,
                rate_phi: rp,
                scale_phi: sp,
                rate_k: rk,
                scale_k: sk,
                phi_acc: 0.0,
                z_acc: 0.0,
                z_abs_acc: 0.0,
                t: 0.0,
            }
        } else {
            IntensityState::General {
                params,
                events: EventStream::new(),
                t: 0.0,
            }
        }
    }

    fn advance_to(&mut self, new_t: f64) {
        match self {
            IntensityState::Exponential {
                rate_phi,
                rate_k,
                phi_acc,
                z_acc,
                z_abs_acc,
                t,
                ..
            } => {
                let dt = new_t - *t;
                *phi_acc *= (-*rate_phi * dt).exp();
                let dk = (-*rate_k * dt).exp();
                *z_acc *= dk;
                *z_abs_acc *= dk;
                *t = new_t;
            }
            IntensityState::General { t, .. } => *t = new_t,
        }
    }

    fn push_event(&mut self, time: f64, sign: i8) {
        self.advance_to(time);
        match self {
            IntensityState::Exponential {
                phi_acc,
                z_acc,
                z_abs_acc,
                ..
            } => {
                *phi_acc += 1.0;
                *z_acc += sign as f64;
                *z_abs_acc += 1.0;
            }
            IntensityState::General { events, .. } => {
                events.times.push(time);
                events.signs.push(sign);
            }
        }
    }

    /// Intensity just after the state time (events at exactly the state
    /// time count as prior).
    fn intensity(&self) -> f64 {
        match self {
            IntensityState::Exponential {
                params,
                scale_phi,
                scale_k,
                phi_acc,
                z_acc,
                ..
            } => {
                let z = scale_k * z_acc;
                params.mu + scale_phi * phi_acc + z * z
            }
            IntensityState::General { params, events, t } => {
                let (s_phi, z, _) = sums_at(params, events, t.next_up());
                params.mu + s_phi + z * z
            }
        }
    }

    fn majorant(&self) -> f64 {
        match self {
            IntensityState::Exponential {
                params,
                scale_phi,
                scale_k,
                phi_acc,
                z_abs_acc,
                ..
            } => {
                let z = scale_k * z_abs_acc;
                params.mu + scale_phi * phi_acc + z * z
            }
            IntensityState::General { params, events, t } => {
                let (s_phi, _, z_abs) = sums_at(params, events, t.next_up());
                params.mu + s_phi + z_abs * z_abs
            }
        }
    }
}

/// Exact thinning simulation, deterministic given the RNG stream.
///
/// Proposals come from an exponential clock at the current envelope rate;
/// the envelope is recomputed (tightened) after every acceptance and after
/// any rejection older than the lookahead 0.1/mu.
pub fn simulate_with_rng(params: &QHawkesParams, rng: &mut ChaCha12Rng) -> Result<EventStream> {
    params.validate()?;
    if !params.phi.bounded_at_zero() || !params.k.bounded_at_zero() {
        return Err(Error::UnsupportedKernel(
            "thinning needs kernels finite at zero; the Mittag-Leffler density with alpha < 1 is not".into(),
        ));
    }
    let mut events = EventStream::new();
    let mut state = IntensityState::new(params);
    let lookahead = 0.1 / params.mu;
    let mut envelope = state.majorant();
    let mut t_env = 0.0f64;
    let mut t = 0.0f64;
    loop {
        let u: f64 = rng.gen::<f64>();
        // u in [0,1): 1-u in (0,1] avoids ln(0)
        let dt = -(1.0 - u).ln() / envelope;
        let tau = t + dt;
        if tau > params.horizon {
            break;
        }
        state.advance_to(tau);
        let lambda = state.intensity();
        let a: f64 = rng.gen::<f64>();
        if a * envelope <= lambda {
            let sign: i8 = if rng.gen::<f64>() < 0.5 { 1 } else { -1 };
            events.times.push(tau);
            events.signs.push(sign);
            if events.len() >= params.max_events {
                return Err(Error::ExplosionGuard {
                    cap: params.max_events,
                });
            }
            state.push_event(tau, sign);
            envelope = state.majorant();
            t_env = tau;
        } else if tau - t_env > lookahead {
            envelope = state.majorant();
            t_env = tau;
        }
        t = tau;
    }
    Ok(events)
}

/// Simulate from a bare seed.
pub fn simulate(params: &QHawkesParams, seed: u64) -> Result<EventStream> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    simulate_with_rng(params, &mut rng)
}

/// Compensator Lambda(t) = int_0^t lambda_s ds evaluated at the grid
/// points (grid must be non-decreasing, non-negative).
///
/// Exponential kernels integrate in closed form per inter-event interval;
/// general kernels use adaptive quadrature per interval (relative error
/// <= 1e-6).
pub fn compensator(params: &QHawkesParams, events: &EventStream, grid: &[f64]) -> Result<Vec<f64>> {
    events.validate()?;
    for w in grid.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::Validation(
                "compensator grid must be non-decreasing".into(),
            ));
        }
    }
    if grid.iter().any(|&g| !g.is_finite() || g < 0.0) {
        return Err(Error::Validation(
            "compensator grid point out of range".into(),
        ));
    }
    let exp_kernels = as_exponential(&params.phi).zip(as_exponential(&params.k));
    match exp_kernels {
        Some(((rp, sp), (rk, sk))) => compensator_exponential(params, events, grid, rp, sp, rk, sk),
        None => compensator_quadrature(params, events, grid),
    }
}

#[allow(clippy::too_many_arguments)]
fn compensator_exponential(
    params: &QHawkesParams,
    events: &EventStream,
    grid: &[f64],
    rate_phi: f64,
    scale_phi: f64,
    rate_k: f64,
    scale_k: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut phi_acc = 0.0f64;
    let mut z_acc = 0.0f64;
    let mut t_cur = 0.0f64;
    let mut lambda_int = 0.0f64;
    let mut ev = 0usize;

    // Integral of the intensity over (t_cur, t_cur + dt] with the state
    // frozen at t_cur (no events inside).
    let seg = |phi_acc: f64, z_acc: f64, dt: f64| -> f64 {
        let mut v = params.mu * dt;
        if scale_phi != 0.0 && phi_acc != 0.0 {
            v += scale_phi * phi_acc * (1.0 - (-rate_phi * dt).exp()) / rate_phi;
        }
        let z0 = scale_k * z_acc;
        if z0 != 0.0 {
            v += z0 * z0 * (1.0 - (-2.0 * rate_k * dt).exp()) / (2.0 * rate_k);
        }
        v
    };

    for &g in grid {
        while ev < events.times.len() && events.times[ev] <= g {
            let te = events.times[ev];
            let dt = te - t_cur;
            lambda_int += seg(phi_acc, z_acc, dt);
            phi_acc = phi_acc * (-rate_phi * dt).exp() + 1.0;
            z_acc = z_acc * (-rate_k * dt).exp() + events.signs[ev] as f64;
            t_cur = te;
            ev += 1;
        }
        let dt = g - t_cur;
        let val = lambda_int + seg(phi_acc, z_acc, dt);
        out.push(val);
        // fold the partial segment into the running state
        lambda_int = val;
        phi_acc *= (-rate_phi * dt).exp();
        z_acc *= (-rate_k * dt).exp();
        t_cur = g;
    }
    Ok(out)
}

/// Quadrature fallback: integrates the intensity between consecutive
/// breakpoints (events and grid points), where it is smooth.
pub fn compensator_quadrature(
    params: &QHawkesParams,
    events: &EventStream,
    grid: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut lambda_int = 0.0f64;
    let mut t_cur = 0.0f64;
    let mut ev = 0usize;
    let lambda = |t: f64| -> f64 {
        let (s_phi, z, _) = sums_at(params, events, t);
        params.mu + s_phi + z * z
    };
    for &g in grid {
        while ev < events.times.len() && events.times[ev] <= g {
            let te = events.times[ev];
            if te > t_cur {
                lambda_int += quad::integrate(lambda, t_cur, te, 1e-7, 1e-12).value;
                t_cur = te;
            }
            ev += 1;
        }
        if g > t_cur {
            lambda_int += quad::integrate(lambda, t_cur, g, 1e-7, 1e-12).value;
            t_cur = g;
        }
        out.push(lambda_int);
    }
    Ok(out)
}

/// Inter-event compensator increments Lambda(t_{i+1}) - Lambda(t_i).
/// For a correct simulator these are i.i.d. Exp(1). Fewer than 2 events
/// yield an empty result.
pub fn time_change_residuals(params: &QHawkesParams, events: &EventStream) -> Result<Vec<f64>> {
    if events.len() < 2 {
        return Ok(Vec::new());
    }
    let lam = compensator(params, events, &events.times)?;
    Ok(lam.windows(2).map(|w| w[1] - w[0]).collect())
}
