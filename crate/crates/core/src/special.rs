//! Mittag-Leffler functions and supporting special-function numerics.
//!
//! The two-parameter Mittag-Leffler function
//!
//! ```text
//! E_{a,b}(z) = sum_{n>=0} z^n / Gamma(a n + b)
//! ```
//!
//! is evaluated by one of three routes, picked per argument:
//!
//! * truncated power series with a running cancellation bound — accepted
//!   only when the bound meets the accuracy target;
//! * for `a in (0,1)` and `z < 0`, the real-line integral representation
//!   (Gorenflo–Loutchko–Luchko), which is smooth and free of cancellation;
//! * for large negative `z`, the algebraic asymptotic expansion truncated
//!   at its envelope minimum, with an explicit error bound.
//!
//! The negative real axis is the hot path: the Mittag-Leffler density
//! `f^{a,lam}(t) = lam t^{a-1} E_{a,a}(-lam t^a)` and its integral drive both
//! the kernel family and the nearly-unstable limit model.
//!
//! For `a in (1,2]` only series-safe arguments are supported; outside that
//! zone an accuracy-loss error reports the best achieved bound (the
//! complex-argument machinery a full treatment needs is out of scope).

use crate::error::{Error, Result};
use statrs::function::gamma::{gamma, ln_gamma};

/// Internal relative accuracy target. The public contract is 1e-10; routes
/// only accept their result when their own bound clears this stricter bar.
const TARGET_REL: f64 = 1e-11;

const MAX_SERIES_TERMS: usize = 50_000;

/// sin(pi x) with argument reduction, accurate for large |x|.
fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (std::f64::consts::PI * r).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// 1/Gamma(x) for any real x; zero at the poles, saturating at +-inf when
/// Gamma underflows.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.5 {
        let lg = ln_gamma(x);
        if lg > 700.0 {
            0.0
        } else {
            (-lg).exp()
        }
    } else {
        // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi.
        let s = sin_pi(x);
        if s == 0.0 {
            return 0.0;
        }
        let lg = ln_gamma(1.0 - x);
        let ln_mag = lg + s.abs().ln() - std::f64::consts::PI.ln();
        if ln_mag > 709.0 {
            if s > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            s.signum() * ln_mag.exp()
        }
    }
}

struct SeriesOutcome {
    value: f64,
    /// Estimated relative error of `value`.
    achieved: f64,
}

/// Power series with Neumaier-compensated summation and a per-term rounding
/// budget. Returns None if the series fails to converge within the term cap
/// or drifts into float overflow while cancelling.
fn series(alpha: f64, beta: f64, z: f64) -> Option<SeriesOutcome> {
    let ln_az = z.abs().ln();
    let mut sum = 1.0 / gamma(beta); // n = 0 term
    let mut comp = 0.0f64;
    let mut abs_err = sum.abs() * 2.0 * f64::EPSILON;
    let mut converged_streak = 0;
    for n in 1..MAX_SERIES_TERMS {
        let a1 = n as f64 * ln_az;
        let a2 = ln_gamma(alpha * n as f64 + beta);
        let ln_t = a1 - a2;
        if ln_t > 700.0 {
            if z > 0.0 {
                // All terms positive: the value itself exceeds f64 range.
                return Some(SeriesOutcome {
                    value: f64::INFINITY,
                    achieved: 0.0,
                });
            }
            return None; // hopeless cancellation ahead
        }
        let mag = ln_t.exp();
        let term = if z < 0.0 && n % 2 == 1 { -mag } else { mag };
        // Neumaier summation.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        // Rounding budget: exp(a1 - a2) inherits absolute error in the log.
        abs_err += mag * ((a1.abs() + a2.abs()) * 2.0 * f64::EPSILON + 4.0 * f64::EPSILON);
        let current = sum + comp;
        if mag <= current.abs() * 1e-18 + 1e-300 {
            converged_streak += 1;
            if converged_streak >= 3 && n > 4 {
                let value = current;
                let achieved = if value == 0.0 {
                    f64::INFINITY
                } else {
                    abs_err / value.abs()
                };
                return Some(SeriesOutcome { value, achieved });
            }
        } else {
            converged_streak = 0;
        }
    }
    None
}

struct AsymOutcome {
    value: f64,
    achieved: f64,
}

/// log |1/Gamma(x)| and its sign, via reflection for x <= 0.5.
fn ln_abs_recip_gamma(x: f64) -> Option<(f64, f64)> {
    if x > 0.5 {
        Some((-ln_gamma(x), 1.0))
    } else {
        let s = sin_pi(x);
        if s == 0.0 {
            return None; // pole: 1/Gamma = 0
        }
        Some((
            ln_gamma(1.0 - x) + s.abs().ln() - std::f64::consts::PI.ln(),
            s.signum(),
        ))
    }
}

/// Algebraic expansion for z -> -inf:
/// E_{a,b}(z) = -sum_{k>=1} z^{-k}/Gamma(b - a k) + R.
///
/// The term magnitudes are bounded by the envelope
/// x^{-k} Gamma(1 - b + a k)/pi, which first decreases then grows; we
/// truncate at the minimum and take the envelope there as the algebraic
/// part of the error bound. On top of that sits an exponentially small
/// remainder of magnitude ~ e^{-x^{1/a}} (measured against the integral
/// representation across a in [0.3, 0.95], x in [10, 30]); it enters the
/// bound with a wide safety margin, so the expansion only certifies
/// itself for deep arguments.
fn asymptotic_neg(alpha: f64, beta: f64, z: f64) -> Option<AsymOutcome> {
    debug_assert!(z < 0.0);
    let x = -z;
    let ln_x = x.ln();
    let ln_env = |k: usize| -> f64 {
        let arg = 1.0 - beta + alpha * k as f64;
        if arg <= 0.0 {
            return -(k as f64) * ln_x;
        }
        -(k as f64) * ln_x + ln_gamma(arg) - std::f64::consts::PI.ln()
    };
    // Locate the envelope minimum.
    let mut k_star = 1usize;
    let mut best = ln_env(1);
    for k in 2..1000 {
        let e = ln_env(k);
        if e < best {
            best = e;
            k_star = k;
        } else if k > k_star + 8 {
            break;
        }
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 1..=k_star {
        let Some((ln_rg, sign)) = ln_abs_recip_gamma(beta - alpha * k as f64) else {
            continue;
        };
        let ln_mag = -(k as f64) * ln_x + ln_rg;
        if ln_mag < -745.0 {
            continue;
        }
        if ln_mag > 700.0 {
            return None; // cannot represent the term; give up on this route
        }
        let term = ln_mag.exp() * sign * if k % 2 == 1 { 1.0 } else { -1.0 };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let value = sum + comp;
    if value == 0.0 {
        return None;
    }
    let mut bound = ln_env(k_star + 1).exp();
    // Exponentially small remainder. For a in (1,2) the saddle decay rate
    // weakens to |cos(pi/a)|.
    let rate = if alpha > 1.0 {
        (std::f64::consts::PI / alpha).cos().abs().min(1.0)
    } else {
        1.0
    };
    let ln_floor = -0.9 * rate * x.powf(1.0 / alpha) + 100f64.ln();
    if ln_floor > -700.0 {
        bound += ln_floor.exp();
    }
    Some(AsymOutcome {
        value,
        achieved: 10.0 * bound / value.abs(),
    })
}

/// Gorenflo–Loutchko–Luchko integral representation for `a in (0,1)`,
/// `b < 1 + a`, `z < 0`:
///
/// ```text
/// E_{a,b}(z) = int_0^inf K(r) dr,
/// K(r) = (1/(a pi)) r^{(1-b)/a} e^{-r^{1/a}}
///        [r sin(pi(1-b)) - z sin(pi(1-b+a))] / (r^2 - 2 r z cos(pi a) + z^2)
/// ```
///
/// The integrand is smooth and positive-decaying; with z < 0 the
/// denominator is bounded away from zero.
fn gll_integral(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    debug_assert!(z < 0.0 && alpha < 1.0 && alpha > 0.0);
    let s1 = sin_pi(1.0 - beta);
    let s2 = sin_pi(1.0 - beta + alpha);
    let c = (std::f64::consts::PI * alpha).cos();
    let pref = 1.0 / (alpha * std::f64::consts::PI);
    let pw = (1.0 - beta) / alpha;
    let integrand = move |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let denom = r * r - 2.0 * r * z * c + z * z;
        let numer = r * s1 - z * s2;
        pref * r.powf(pw) * (-r.powf(1.0 / alpha)).exp() * numer / denom
    };
    // e^{-r^{1/a}} < 1e-27 beyond r = 62^a; polynomial prefactors are
    // negligible against that.
    let r_max = 62.0f64.powf(alpha);
    let q = crate::quad::integrate(integrand, 0.0, r_max, 1e-13, 1e-300);
    if q.value != 0.0 && q.abs_error > 1e-10 * q.value.abs() {
        return Err(Error::AccuracyLoss {
            requested: TARGET_REL,
            achieved: q.abs_error / q.value.abs(),
            context: format!("Mittag-Leffler integral route at alpha={alpha}, beta={beta}, z={z}"),
        });
    }
    Ok(q.value)
}

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.
///
/// Supported domain: `alpha in (0, 2]`, `beta > 0`. Relative accuracy is
/// 1e-10 or better for `alpha in (0, 1]` anywhere on the real line (values
/// beyond f64 range saturate to +inf). For `alpha in (1, 2]` arguments that
/// defeat the series and the asymptotic expansion produce
/// [`Error::AccuracyLoss`] carrying the best achieved bound.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 2.0 {
        return Err(Error::Domain(format!(
            "mittag_leffler: alpha must lie in (0, 2], got {alpha}"
        )));
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "mittag_leffler: beta must be positive, got {beta}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "mittag_leffler: non-finite argument z = {z}"
        )));
    }
    if z == 0.0 {
        // statrs gamma(1) and gamma(2) are a few ulp off exactly where
        // exactness matters most.
        return Ok(if beta == 1.0 || beta == 2.0 {
            1.0
        } else {
            1.0 / gamma(beta)
        });
    }
    if alpha == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }
    let series_out = series(alpha, beta, z);
    if let Some(ref s) = series_out {
        if s.achieved <= TARGET_REL {
            return Ok(s.value);
        }
    }
    if z > 0.0 {
        // No cancellation for positive arguments: reaching here means the
        // series stalled short of the term cap, which the cap precludes for
        // the supported domain; still, fail loudly rather than guess.
        return Err(Error::AccuracyLoss {
            requested: TARGET_REL,
            achieved: series_out.map_or(f64::INFINITY, |s| s.achieved),
            context: format!("series for alpha={alpha}, beta={beta}, z={z}"),
        });
    }
    // Negative axis. Fast path: deep arguments where the truncated
    // asymptotic expansion certifies itself.
    let asym = if z <= -10.0 {
        asymptotic_neg(alpha, beta, z)
    } else {
        None
    };
    if let Some(ref a) = asym {
        if a.achieved <= TARGET_REL {
            return Ok(a.value);
        }
    }
    if alpha < 1.0 && beta < 1.0 + alpha {
        return gll_integral(alpha, beta, z);
    }
    if alpha == 1.0 && beta == 2.0 {
        return Ok((z.exp() - 1.0) / z);
    }
    // alpha in [1, 2] middle zone, or beta >= 1 + alpha: report the best
    // bound we achieved instead of a silently wrong value.
    let best = [
        series_out.map(|s| s.achieved),
        asymptotic_neg(alpha, beta, z).map(|a| a.achieved),
    ]
    .into_iter()
    .flatten()
    .fold(f64::INFINITY, f64::min);
    Err(Error::AccuracyLoss {
        requested: TARGET_REL,
        achieved: best,
        context: format!("no route reaches target at alpha={alpha}, beta={beta}, z={z}"),
    })
}

/// Mittag-Leffler density f^{alpha,lambda}(t) = lambda t^{alpha-1}
/// E_{alpha,alpha}(-lambda t^alpha), a probability density on [0, inf)
/// for `alpha in (0, 1]`.
///
/// At t = 0 the density diverges for alpha < 1; +inf is returned as the
/// sentinel so callers treat the kernel as left-open.
pub fn ml_density(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::Domain(format!(
            "ml_density: alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "ml_density: lambda must be positive, got {lambda}"
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("ml_density: bad time {t}")));
    }
    if t == 0.0 {
        return Ok(if alpha < 1.0 { f64::INFINITY } else { lambda });
    }
    if alpha == 1.0 {
        return Ok(lambda * (-lambda * t).exp());
    }
    let e = mittag_leffler(alpha, alpha, -lambda * t.powf(alpha))?;
    Ok(lambda * t.powf(alpha - 1.0) * e)
}

/// Integrated Mittag-Leffler density F^{alpha,lambda}(t) =
/// int_0^t f^{alpha,lambda} = 1 - E_{alpha,1}(-lambda t^alpha).
pub fn ml_integrated(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::Domain(format!(
            "ml_integrated: alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "ml_integrated: lambda must be positive, got {lambda}"
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("ml_integrated: bad time {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if alpha == 1.0 {
        return Ok(1.0 - (-lambda * t).exp());
    }
    let e = mittag_leffler(alpha, 1.0, -lambda * t.powf(alpha))?;
    Ok(1.0 - e)
}
