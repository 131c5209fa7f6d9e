//! Complex field amplitudes with attached error budgets.

use num_complex::Complex64;

/// Tail bounds accumulated along the evaluation pipeline.
#[derive(Clone, Copy, Debug, Default)]
pub struct TailBounds {
    /// Neglected winding orders and Bessel series tails.
    pub winding: f64,
    /// Quadrature truncation (domain tail + node-doubling difference).
    pub quadrature: f64,
    /// Outer series truncation certificate.
    pub series: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Diagnostics {
    /// Terms contributing to the dominant sum (quadrature nodes, series terms
    /// or superoscillation terms, depending on the producing operation).
    pub terms_used: usize,
    /// Cancellation condition number of the outermost sum (1 when benign).
    pub condition_number: f64,
    pub tail_bounds: TailBounds,
}

/// A complex amplitude together with an accumulated error estimate.
#[derive(Clone, Copy, Debug)]
pub struct FieldValue {
    pub value: Complex64,
    /// Combined error estimate (never negative).
    pub error: f64,
    pub diagnostics: Diagnostics,
}

impl FieldValue {
    pub(crate) fn new(value: Complex64, error: f64, diagnostics: Diagnostics) -> Self {
        debug_assert!(error >= 0.0);
        FieldValue {
            value,
            error,
            diagnostics,
        }
    }
}
