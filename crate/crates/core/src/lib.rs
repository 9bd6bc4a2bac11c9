//! Quadratic Hawkes price models and their rough-volatility scaling limits.
//!
//! The crate simulates the microscopic price process — a counting process
//! whose intensity combines linear self-excitation with the square of a
//! moving average of past signed jumps — and the macroscopic stochastic
//! Volterra models it converges to under three rescaling regimes, together
//! with the statistical diagnostics connecting the two scales.
//!
//! Module map:
//!
//! * [`kernels`] — kernel functions (exponential, Mittag-Leffler,
//!   power-law tail), their norms, and the horizon-indexed scaled families.
//! * [`qhawkes`] — exact event-level simulation by thinning, compensator
//!   and residual analysis.
//! * [`scaling`] — event streams to rescaled macroscopic observables;
//!   nearly-unstable parameter schedules.
//! * [`volterra`] — Euler discretizations of the limiting models and the
//!   rough-Heston reference, plus the forward-volatility decomposition.
//! * [`diagnostics`] — Hölder regularity, weak Zumbach statistic,
//!   Kolmogorov-Smirnov distances, convergence ladders.
//! * [`exec`] — seeded replication streams and the (optionally rayon-backed)
//!   replication runner.

pub mod conv;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod qhawkes;
pub mod quad;
pub mod scaling;
pub mod special;
pub mod volterra;

pub use error::{Error, Result};
