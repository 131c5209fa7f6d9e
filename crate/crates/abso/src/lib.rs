//! Desk-scale numerical laboratory for the Schrödinger evolution of
//! superoscillatory initial data in an Aharonov-Bohm background.
//!
//! The propagator of a charged particle around an impenetrable solenoid is a
//! winding sum of Bessel functions indexed by the homotopy class of the path.
//! This crate evaluates that kernel, the Fresnel-rotated integral solution for
//! exponential initial data, its series expansion in the datum parameters, the
//! associated infinite-order differential operators on spaces of entire
//! functions, and the supershift limit of superoscillatory data — each with an
//! explicit, testable error budget.
//!
//! Modules:
//! - [`specfun`]: log-Gamma and Bessel `J`/`I` of real order at complex argument
//! - [`superosc`]: superoscillating sequences, coefficients, entire-series data
//! - [`abkernel`]: the winding sum, its explicit growth bound, the propagator
//! - [`quadrature`]: Gaussian-weighted and periodic rules, the rotated solution
//! - [`iodo`]: infinite-order differential operators and continuity bounds
//! - [`evolution`]: moment coefficients, series solution, supershift sums
//! - [`experiment`]: config-driven batch runs with machine-readable records
//!
//! Evolving the plane-wave datum `e^{i(ax+by)}` past a flux line and checking
//! the two solution representations against each other:
//!
//! ```
//! use abso::abkernel::{PhysicsConfig, PolarPoint, WindingTruncation};
//! use abso::evolution::{psi_series, TruncationSpec};
//! use abso::quadrature::{psi_direct, QuadratureSpec};
//! use abso::Complex64;
//!
//! let cfg = PhysicsConfig::unit(0.37)?; // M = hbar = t = 1, flux 0.37
//! let target = PolarPoint::new(0.7, 0.3)?;
//! let a = Complex64::new(0.3, 0.0);
//! let b = Complex64::new(0.3, 0.0);
//!
//! let trunc = TruncationSpec {
//!     m_max: 12,
//!     n_theta: 32,
//!     n_u: 64,
//!     tol: 1e-3,
//!     ..TruncationSpec::default()
//! };
//! let series = psi_series(&cfg, a, b, &target, &trunc)?;
//!
//! let qspec = QuadratureSpec::auto(&cfg, target.r, 0.6, 1.0, 32, 64, 1e-6)?;
//! let direct = psi_direct(&cfg, a, b, &target, &WindingTruncation::default(), &qspec)?;
//!
//! assert!((series.value - direct.value).norm() < 1e-4);
//! assert!(series.error > 0.0 && direct.error > 0.0);
//! # Ok::<(), abso::Error>(())
//! ```

// validation code uses `!(x > 0.0)`-style comparisons to treat NaN as out of
// domain; rewriting them with partial_cmp would obscure that intent
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abkernel;
mod dd;
pub mod evolution;
pub mod experiment;
pub mod field;
pub mod iodo;
mod kahan;
pub mod quadrature;
pub mod specfun;
pub mod superosc;

pub use field::{Diagnostics, FieldValue};
pub use specfun::Complex64;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Propagation over non-positive time; the kernel prefactor 1/t is singular.
    #[error("singular time: t = {t} must be positive")]
    SingularTime { t: f64 },

    /// Bessel argument outside the configured power-series stability radius.
    #[error("argument |z| = {abs_z} exceeds series stability radius {radius}")]
    StabilityRadius { abs_z: f64, radius: f64 },

    /// Bessel power-series tail still above tolerance at the term cutoff.
    #[error("tail not converged: estimate {achieved:e} > tolerance {required:e}")]
    TailNotConverged { achieved: f64, required: f64 },

    /// Winding-sum tail still above tolerance at the order cutoff.
    #[error("winding tail not converged: estimate {achieved:e} > tolerance {required:e}")]
    WindingTail { achieved: f64, required: f64 },

    /// Analytic bound on the truncated quadrature domain exceeds the tolerance.
    #[error("tail dominates tolerance: u_max tail bound {achieved:e} > {required:e}")]
    QuadratureTail { achieved: f64, required: f64 },

    /// Outer series truncation certificate exceeds the tolerance.
    #[error(
        "series tail exceeds tolerance: bound {achieved:e} > {required:e} \
         (suggest m_max >= {suggested_m_max})"
    )]
    SeriesTail {
        achieved: f64,
        required: f64,
        suggested_m_max: usize,
    },

    /// Neglected multi-index mass of an operator action exceeds the tolerance.
    #[error("cutoff insufficient: neglected-term majorant {achieved:e} > {required:e}")]
    CutoffInsufficient { achieved: f64, required: f64 },

    /// Operator action and direct parameter powers disagree beyond tolerance.
    #[error("operator consistency check failed: deviation {deviation:e} > {required:e}")]
    OperatorConsistency { deviation: f64, required: f64 },

    /// Experiment configuration failed to parse or validate.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
