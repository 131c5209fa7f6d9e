//! Superoscillating sequences and their building blocks.
//!
//! The one-variable sequence is `F_n(x) = sum_j C_j(n,a) e^{i(1-2j/n)x}` with
//! binomial coefficients `C_j(n,a) = binom(n,j) ((1+a)/2)^{n-j} ((1-a)/2)^j`.
//! Every raw frequency `1-2j/n` lies in [-1,1], yet for |a| > 1 the sum
//! converges pointwise to `e^{iax}`. The two-variable datum routes the
//! frequencies through a pair of entire functions `g`, `h`.
//!
//! These sums are intrinsically ill-conditioned: the coefficients grow
//! combinatorially while the sum stays O(1). Coefficients are therefore
//! computed in log-magnitude + sign form, sums use compensated accumulation in
//! fixed ascending-j order, and every result carries the condition number
//! `kappa = sum |terms| / |sum|` so callers can gate on `kappa * eps`.

use crate::kahan::{ComplexSum, NeumaierSum};
use crate::specfun::ln_gamma_pos;
use crate::{Error, Result};
use num_complex::Complex64;

/// Truncated power series of an entire function, with the coefficient-decay
/// certificate `|c_j| <= decay_c * decay_b^j / j!` attached.
#[derive(Clone, Debug)]
pub struct EntireSeries {
    coeffs: Vec<Complex64>,
    decay_c: f64,
    decay_b: f64,
}

impl EntireSeries {
    /// Wrap raw power-series coefficients; the decay certificate is computed
    /// on the fixed b-grid documented in [`crate::iodo::coeff_decay_certificate`].
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let (decay_c, decay_b) = crate::iodo::decay_certificate_for(&coeffs);
        EntireSeries {
            coeffs,
            decay_c,
            decay_b,
        }
    }

    pub fn zero() -> Self {
        EntireSeries::new(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        EntireSeries::new(vec![c])
    }

    /// The identity map `lambda -> lambda`.
    pub fn identity() -> Self {
        EntireSeries::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    /// `lambda -> lambda^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        EntireSeries::new(coeffs)
    }

    /// Truncation of `w -> e^{iaw}` to the given number of terms.
    pub fn exp_i_scaled(a: f64, terms: usize) -> Self {
        let ia = Complex64::new(0.0, a);
        let mut coeffs = Vec::with_capacity(terms);
        let mut c = Complex64::new(1.0, 0.0);
        for p in 0..terms {
            coeffs.push(c);
            c = c * ia / (p as f64 + 1.0);
        }
        EntireSeries::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The certificate `(C_f, b)` with `|c_j| <= C_f b^j / j!` for stored j.
    pub fn decay(&self) -> (f64, f64) {
        (self.decay_c, self.decay_b)
    }

    /// Horner evaluation of the stored polynomial truncation.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + c;
        }
        acc
    }

    /// Coefficient-wise difference (used for convergence diagnostics).
    pub fn sub(&self, other: &EntireSeries) -> EntireSeries {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|j| {
                self.coeffs.get(j).copied().unwrap_or(zero)
                    - other.coeffs.get(j).copied().unwrap_or(zero)
            })
            .collect();
        EntireSeries::new(coeffs)
    }
}

/// Free-function alias for [`EntireSeries::eval`].
pub fn entire_eval(s: &EntireSeries, lambda: Complex64) -> Complex64 {
    s.eval(lambda)
}

/// Parameters of a two-variable superoscillatory datum.
#[derive(Clone, Debug)]
pub struct SuperoscSpec {
    pub n: u32,
    pub a: f64,
    pub g: EntireSeries,
    pub h: EntireSeries,
}

impl SuperoscSpec {
    /// `n >= 1` and `|a| >= 1`. The supershift regime proper is `|a| > 1`;
    /// the boundary `|a| = 1` is admitted because the sum degenerates to a
    /// single term there and serves as an exactness check.
    pub fn new(n: u32, a: f64, g: EntireSeries, h: EntireSeries) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("superoscillation index n must be >= 1".into()));
        }
        if !a.is_finite() || a.abs() < 1.0 {
            return Err(Error::Domain(format!(
                "superoscillation target requires |a| >= 1, got {a}"
            )));
        }
        Ok(SuperoscSpec { n, a, g, h })
    }
}

/// A compensated sum together with its cancellation condition number.
#[derive(Clone, Copy, Debug)]
pub struct OscSum {
    pub value: Complex64,
    /// `kappa = sum_j |term_j| / |sum|`; `kappa * eps` estimates the relative
    /// accuracy floor imposed by cancellation.
    pub kappa: f64,
}

impl OscSum {
    /// True when cancellation alone already exceeds the requested tolerance.
    pub fn cancellation_limited(&self, tol: f64) -> bool {
        self.kappa * f64::EPSILON > tol
    }
}

/// Coefficient `C_j(n,a) = binom(n,j) ((1+a)/2)^{n-j} ((1-a)/2)^j`, in
/// sign + log-magnitude form so that n up to 200 stays inside f64 range.
pub fn coefficient(n: u32, j: u32, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("coefficient requires n >= 1".into()));
    }
    if j > n {
        return Err(Error::Domain(format!("coefficient requires j <= n ({j} > {n})")));
    }
    let p = (1.0 + a) / 2.0;
    let q = (1.0 - a) / 2.0;
    let nj = n - j;
    if (p == 0.0 && nj > 0) || (q == 0.0 && j > 0) {
        return Ok(0.0);
    }
    let mut log_mag = ln_gamma_pos((n + 1) as f64)
        - ln_gamma_pos((j + 1) as f64)
        - ln_gamma_pos((nj + 1) as f64);
    let mut sign = 1.0f64;
    if nj > 0 {
        log_mag += nj as f64 * p.abs().ln();
        if p < 0.0 && nj % 2 == 1 {
            sign = -sign;
        }
    }
    if j > 0 {
        log_mag += j as f64 * q.abs().ln();
        if q < 0.0 && j % 2 == 1 {
            sign = -sign;
        }
    }
    Ok(sign * log_mag.exp())
}

/// The superoscillating sequence `F_n(x) = sum_j C_j(n,a) e^{i(1-2j/n)x}`,
/// accepted at complex `x` (it extends to an entire function).
pub fn sequence(n: u32, a: f64, x: Complex64) -> Result<OscSum> {
    if n == 0 {
        return Err(Error::Domain("sequence requires n >= 1".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut acc = ComplexSum::new();
    let mut mag = NeumaierSum::new();
    for j in 0..=n {
        let k_j = 1.0 - 2.0 * j as f64 / n as f64;
        let term = coefficient(n, j, a)? * (i * k_j * x).exp();
        acc.add(term);
        mag.add(term.norm());
    }
    let value = acc.value();
    Ok(OscSum {
        value,
        kappa: mag.value() / value.norm(),
    })
}

/// The two-variable datum
/// `Y_n(x,y) = sum_j C_j(n,a) e^{i g(1-2j/n) x} e^{i h(1-2j/n) y}`.
pub fn datum(spec: &SuperoscSpec, x: f64, y: f64) -> Result<OscSum> {
    let i = Complex64::new(0.0, 1.0);
    let n = spec.n;
    let mut acc = ComplexSum::new();
    let mut mag = NeumaierSum::new();
    for j in 0..=n {
        let k_j = Complex64::new(1.0 - 2.0 * j as f64 / n as f64, 0.0);
        let phase = i * (spec.g.eval(k_j) * x + spec.h.eval(k_j) * y);
        let term = coefficient(n, j, spec.a)? * phase.exp();
        acc.add(term);
        mag.add(term.norm());
    }
    let value = acc.value();
    Ok(OscSum {
        value,
        kappa: mag.value() / value.norm(),
    })
}

/// Power-series coefficients of `w -> F_n(w)`:
/// `c_p = sum_j C_j(n,a) (i(1-2j/n))^p / p!`.
///
/// This is the entire-function view of the sequence used by the A_1-space
/// convergence diagnostics.
pub fn sequence_power_series(n: u32, a: f64, terms: usize) -> Result<EntireSeries> {
    if n == 0 {
        return Err(Error::Domain("sequence requires n >= 1".into()));
    }
    let cs: Vec<f64> = (0..=n).map(|j| coefficient(n, j, a)).collect::<Result<_>>()?;
    let mut powers: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(1.0, 0.0))
        .collect();
    let iks: Vec<Complex64> = (0..=n)
        .map(|j| Complex64::new(0.0, 1.0 - 2.0 * j as f64 / n as f64))
        .collect();
    let mut coeffs = Vec::with_capacity(terms);
    let mut factorial = 1.0f64;
    for p in 0..terms {
        if p > 0 {
            factorial *= p as f64;
            for (pw, ik) in powers.iter_mut().zip(&iks) {
                *pw *= ik;
            }
        }
        let mut acc = ComplexSum::new();
        for (c, pw) in cs.iter().zip(&powers) {
            acc.add(pw * *c);
        }
        coeffs.push(acc.value() / factorial);
    }
    Ok(EntireSeries::new(coeffs))
}
