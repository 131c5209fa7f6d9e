//! Infinite-order differential operators acting on entire-function data,
//! exponential-type norms, and the computable continuity bound.
//!
//! The operators are powers of the formal series `sum_u (g_u / i^u) D_w^u`
//! applied to a power series `f`; we only ever need the evaluation at `w = 0`,
//! which is the total-degree contraction
//!
//! ```text
//! sum over (u_1..u_{m-l}, v_1..v_l) of
//!     prod g_{u_p}/i^{u_p} * prod h_{v_j}/i^{v_j} * f_{S} * S!,
//! S = sum u + sum v.
//! ```
//!
//! The multi-index sum is grouped by total degree via truncated polynomial
//! products, in deterministic order, with a coefficient-decay majorant for
//! anything the cutoff drops.

use crate::abkernel::PhysicsConfig;
use crate::kahan::{ComplexSum, NeumaierSum};
use crate::specfun::ln_gamma_pos;
use crate::superosc::EntireSeries;
use crate::{Error, Result};
use num_complex::Complex64;

/// Fixed grid of candidate exponential-type rates for decay certificates.
pub const DECAY_B_GRID: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Pair `(m, l)` with `0 <= l <= m` indexing the operator `G_{m,l} H_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorIndex {
    m: usize,
    l: usize,
}

impl OperatorIndex {
    pub fn new(m: usize, l: usize) -> Result<Self> {
        if l > m {
            return Err(Error::Domain(format!(
                "operator index requires l <= m, got ({m}, {l})"
            )));
        }
        Ok(OperatorIndex { m, l })
    }

    pub fn m(self) -> usize {
        self.m
    }

    pub fn l(self) -> usize {
        self.l
    }
}

/// Certificate `(C_f, b)` with `|f_j| <= C_f b^j / j!` for all stored `j`.
#[derive(Clone, Copy, Debug)]
pub struct DecayCertificate {
    pub c_f: f64,
    pub b: f64,
}

/// Certificate on the fixed b-grid: for each candidate `b` the minimal valid
/// constant is `C(b) = max_j |f_j| j!/b^j`; we return the smallest grid `b`
/// attaining the grid-minimal constant (ties resolved toward small `b`).
pub(crate) fn decay_certificate_for(coeffs: &[Complex64]) -> (f64, f64) {
    let log_mags: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j, c.norm().ln() + ln_gamma_pos(j as f64 + 1.0)))
        .collect();
    if log_mags.is_empty() {
        return (0.0, DECAY_B_GRID[0]);
    }
    let log_c = |b: f64| -> f64 {
        log_mags
            .iter()
            .map(|(j, lm)| lm - *j as f64 * b.ln())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let logs: Vec<f64> = DECAY_B_GRID.iter().map(|b| log_c(*b)).collect();
    let min_log = logs.iter().copied().fold(f64::INFINITY, f64::min);
    for (b, lc) in DECAY_B_GRID.iter().zip(&logs) {
        if *lc <= min_log + 1e-12 {
            return (lc.exp(), *b);
        }
    }
    unreachable!("grid minimum always exists");
}

/// Decay certificate of a series' stored coefficients; rejects the zero series.
pub fn coeff_decay_certificate(series: &EntireSeries) -> Result<DecayCertificate> {
    if series.coeffs().iter().all(|c| c.norm() == 0.0) {
        return Err(Error::Domain(
            "decay certificate requires at least one nonzero coefficient".into(),
        ));
    }
    let (c_f, b) = decay_certificate_for(series.coeffs());
    Ok(DecayCertificate { c_f, b })
}

const GOLDEN_FRAC: f64 = 0.6180339887498949;
const GOLDEN_ANGLE: f64 = 2.399963229728653;

/// Estimate of the exponential-type norm `sup_w |f(w)| e^{-B|w|}` as a max
/// over a deterministic nested spiral inside `|w| <= radius`.
///
/// The sample at index `k` depends only on `k`, so growing `samples` only adds
/// points and the estimate is nondecreasing in the sample count.
pub fn a1_norm_estimate(
    series: &EntireSeries,
    b_norm: f64,
    samples: usize,
    radius: f64,
) -> Result<f64> {
    if !(b_norm > 0.0) {
        return Err(Error::Domain(format!("B-norm rate must be positive, got {b_norm}")));
    }
    if samples == 0 || !(radius > 0.0) {
        return Err(Error::Domain("need samples >= 1 and radius > 0".into()));
    }
    let mut best: f64 = 0.0;
    for k in 0..samples {
        let kf = k as f64;
        let r = radius * (kf * GOLDEN_FRAC).fract();
        let w = Complex64::from_polar(r, kf * GOLDEN_ANGLE);
        best = best.max(series.eval(w).norm() * (-b_norm * r).exp());
    }
    Ok(best)
}

/// A fixed-B norm estimate bundled with how it was sampled.
#[derive(Clone, Debug)]
pub struct A1Witness {
    pub b_norm: f64,
    pub norm_estimate: f64,
    pub sample_radius: f64,
    pub samples: usize,
}

impl A1Witness {
    pub fn compute(
        series: &EntireSeries,
        b_norm: f64,
        samples: usize,
        radius: f64,
    ) -> Result<Self> {
        Ok(A1Witness {
            b_norm,
            norm_estimate: a1_norm_estimate(series, b_norm, samples, radius)?,
            sample_radius: radius,
            samples,
        })
    }
}

/// `i^{-u}` for non-negative integer `u` (exact quarter-turn cycle).
#[inline]
fn i_neg_int(u: usize) -> Complex64 {
    match u % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn conv_trunc(a: &[Complex64], b: &[Complex64], max_degree: usize) -> Vec<Complex64> {
    let len = (a.len() + b.len() - 1).min(max_degree + 1);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, ai) in a.iter().enumerate() {
        if i >= len {
            break;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Weighted coefficient mass `sum_{u <= cut} |c_u| b^u`.
fn weighted_mass(coeffs: &[Complex64], b: f64, cut: usize) -> f64 {
    let mut s = NeumaierSum::new();
    let mut bp = 1.0;
    for (u, c) in coeffs.iter().enumerate() {
        if u > cut {
            break;
        }
        s.add(c.norm() * bp);
        bp *= b;
    }
    s.value()
}

/// Value of `G_{m,l}(D_w) H_l(D_w) f(w)` at `w = 0`.
///
/// `cutoff` bounds every one of the `m` multi-index sums; coefficients of `g`
/// and `h` beyond it are dropped and accounted for by a decay-certificate majorant
/// built from `f`'s decay certificate, which must stay below `tol`.
pub fn apply_at_zero(
    g: &EntireSeries,
    h: &EntireSeries,
    idx: OperatorIndex,
    f: &EntireSeries,
    cutoff: usize,
    tol: f64,
) -> Result<Complex64> {
    if f.coeffs().is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let deg_f = f.degree();
    let (c_f, b) = f.decay();

    // neglected multi-index mass from truncating g, h at the cutoff
    if (g.degree() > cutoff || h.degree() > cutoff) && c_f > 0.0 {
        let ag_full = weighted_mass(g.coeffs(), b, usize::MAX);
        let ah_full = weighted_mass(h.coeffs(), b, usize::MAX);
        let ag_cut = weighted_mass(g.coeffs(), b, cutoff);
        let ah_cut = weighted_mass(h.coeffs(), b, cutoff);
        let ml = (idx.m - idx.l) as i32;
        let neglected =
            c_f * (ag_full.powi(ml) * ah_full.powi(idx.l as i32)
                - ag_cut.powi(ml) * ah_cut.powi(idx.l as i32));
        if neglected > tol {
            return Err(Error::CutoffInsufficient {
                achieved: neglected,
                required: tol,
            });
        }
    }

    let weighted = |s: &EntireSeries| -> Vec<Complex64> {
        s.coeffs()
            .iter()
            .take(cutoff + 1)
            .enumerate()
            .map(|(u, c)| c * i_neg_int(u))
            .collect()
    };
    let pg = weighted(g);
    let ph = weighted(h);

    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..(idx.m - idx.l) {
        if pg.is_empty() {
            poly = Vec::new();
            break;
        }
        poly = conv_trunc(&poly, &pg, deg_f);
    }
    for _ in 0..idx.l {
        if ph.is_empty() || poly.is_empty() {
            poly = Vec::new();
            break;
        }
        poly = conv_trunc(&poly, &ph, deg_f);
    }

    let mut acc = ComplexSum::new();
    let mut factorial = 1.0f64;
    for (s, ps) in poly.iter().enumerate() {
        if s > 0 {
            factorial *= s as f64;
        }
        let fs = f.coeffs()[s];
        if ps.norm() == 0.0 || fs.norm() == 0.0 {
            continue;
        }
        let term = if factorial.is_finite() {
            ps * fs * factorial
        } else {
            // recover f_S * S! in log space when S! alone overflows
            let mag = (fs.norm().ln() + ln_gamma_pos(s as f64 + 1.0)).exp();
            ps * (fs / fs.norm()) * mag
        };
        acc.add(term);
    }
    let value = acc.value();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Domain(
            "operator action overflowed; reduce the series degree".into(),
        ));
    }
    Ok(value)
}

/// Tail majorant for `sum_{m > m_max} x^m / sqrt(m!)` (geometric once
/// `x < sqrt(m_max + 2)`; +inf before that point).
pub(crate) fn sqrt_factorial_tail(x: f64, m_max: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let m1 = m_max as f64 + 1.0;
    let ratio = x / (m1 + 1.0).sqrt();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let log_lead = m1 * x.ln() - 0.5 * ln_gamma_pos(m1 + 1.0);
    (log_lead - (1.0 - ratio).ln()).exp()
}

/// Partial sum and tail certificate of the continuity constant
///
/// ```text
/// Lambda = sum_m (1/m!) Gamma((m+2)/2) / (2 (M/(4 hbar t))^{(m+2)/2})
///          (sum_u |g_u| b^u + sum_v |h_v| b^v)^m
/// ```
#[derive(Clone, Copy, Debug)]
pub struct ContinuityBound {
    pub partial_sum: f64,
    pub tail_bound: f64,
}

pub fn continuity_bound(
    cfg: &PhysicsConfig,
    g: &EntireSeries,
    h: &EntireSeries,
    b: f64,
    m_max: usize,
) -> Result<ContinuityBound> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("decay rate b must be positive, got {b}")));
    }
    let s = weighted_mass(g.coeffs(), b, usize::MAX) + weighted_mass(h.coeffs(), b, usize::MAX);
    let q = cfg.mass() / (4.0 * cfg.hbar() * cfg.time());

    let mut partial = NeumaierSum::new();
    partial.add(1.0 / (2.0 * q)); // m = 0 term, Gamma(1)/(2 q) exactly
    if s > 0.0 {
        for m in 1..=m_max {
            let mf = m as f64;
            let log_term = ln_gamma_pos((mf + 2.0) / 2.0) - ln_gamma_pos(mf + 1.0)
                + mf * s.ln()
                - (mf + 2.0) / 2.0 * q.ln()
                - std::f64::consts::LN_2;
            partial.add(log_term.exp());
        }
    }
    let x = (4.0 * cfg.hbar() * cfg.time() / cfg.mass()).sqrt() * s;
    let tail = (2.0 * cfg.hbar() * cfg.time() / cfg.mass()) * sqrt_factorial_tail(x, m_max);
    Ok(ContinuityBound {
        partial_sum: partial.value(),
        tail_bound: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superosc::sequence_power_series;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn operator_index_validation() {
        assert!(OperatorIndex::new(3, 3).is_ok());
        assert!(OperatorIndex::new(2, 3).is_err());
    }

    #[test]
    fn a1_norm_examples() {
        let zero = EntireSeries::zero();
        assert_eq!(a1_norm_estimate(&zero, 1.0, 64, 4.0).unwrap(), 0.0);

        let one = EntireSeries::constant(c(1.0, 0.0));
        // e^{-B|w|} <= 1 with equality at w = 0, so the estimate is exactly 1
        assert_eq!(a1_norm_estimate(&one, 2.0, 64, 4.0).unwrap(), 1.0);

        // |e^{1.5 i w}| <= e^{1.5 |w|} and 1.5 < B = 3 forces the max onto w = 0
        let osc = EntireSeries::exp_i_scaled(1.5, 40);
        assert_eq!(a1_norm_estimate(&osc, 3.0, 128, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn a1_norm_nondecreasing_in_samples() {
        let series = EntireSeries::exp_i_scaled(2.5, 40);
        let mut prev = 0.0;
        for samples in [8, 32, 128, 512] {
            let est = a1_norm_estimate(&series, 1.0, samples, 4.0).unwrap();
            assert!(est >= prev);
            prev = est;
        }
        let w = A1Witness::compute(&series, 1.0, 128, 4.0).unwrap();
        assert_eq!(w.samples, 128);
        assert!(w.norm_estimate > 0.0);
    }

    #[test]
    fn certificate_examples() {
        // constant: C(b) = 1 for every b, minimal grid b returned
        let cert = coeff_decay_certificate(&EntireSeries::constant(c(1.0, 0.0))).unwrap();
        assert_eq!(cert.b, 0.25);
        assert!((cert.c_f - 1.0).abs() < 1e-12);

        // |f_j| = 1.5^j/j!: any b >= 1.5 gives C = 1; smallest such grid b is 2
        let cert = coeff_decay_certificate(&EntireSeries::exp_i_scaled(1.5, 30)).unwrap();
        assert_eq!(cert.b, 2.0);
        assert!((cert.c_f - 1.0).abs() < 1e-12);

        // single monomial w^3: C = 3!/b^3 at the chosen b
        let cert = coeff_decay_certificate(&EntireSeries::monomial(3)).unwrap();
        assert!((cert.c_f - 6.0 / cert.b.powi(3)).abs() < 1e-12);

        assert!(coeff_decay_certificate(&EntireSeries::zero()).is_err());
    }

    #[test]
    fn certificate_is_valid_for_stored_coefficients() {
        let series = EntireSeries::new(vec![c(0.3, -0.4), c(2.0, 1.0), c(0.0, 0.0), c(0.05, 0.0)]);
        let cert = coeff_decay_certificate(&series).unwrap();
        let mut factorial = 1.0;
        for (j, cj) in series.coeffs().iter().enumerate() {
            if j > 0 {
                factorial *= j as f64;
            }
            assert!(cj.norm() <= cert.c_f * cert.b.powi(j as i32) / factorial * (1.0 + 1e-12));
        }
    }

    #[test]
    fn apply_at_zero_base_cases() {
        let g = EntireSeries::identity();
        let h = EntireSeries::zero();
        let f = EntireSeries::new(vec![c(0.7, -0.2), c(1.0, 0.0)]);

        // empty products: (m, l) = (0, 0) returns f(0) = f_0
        let v = apply_at_zero(
            &g,
            &h,
            OperatorIndex::new(0, 0).unwrap(),
            &f,
            8,
            1e-12,
        )
        .unwrap();
        assert!((v - c(0.7, -0.2)).norm() < 1e-15);

        // g = lambda, m = 1, l = 0, f = w: single term g_1/i * f_1 * 1! = 1/i
        let fw = EntireSeries::monomial(1);
        let v = apply_at_zero(
            &g,
            &h,
            OperatorIndex::new(1, 0).unwrap(),
            &fw,
            8,
            1e-12,
        )
        .unwrap();
        assert!((v - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn exponential_collapse_to_parameter_powers() {
        // for f = truncated e^{iaw}: G_{m,l} H_l f(0) -> g(a)^{m-l} h(a)^l
        let a = 1.3;
        let g = EntireSeries::identity();
        let h = EntireSeries::monomial(2);
        let f = EntireSeries::exp_i_scaled(a, 20);
        for m in 0..=4usize {
            for l in 0..=m {
                let v = apply_at_zero(
                    &g,
                    &h,
                    OperatorIndex::new(m, l).unwrap(),
                    &f,
                    20,
                    1e-12,
                )
                .unwrap();
                let expect = 1.3f64.powi((m - l) as i32) * 1.69f64.powi(l as i32);
                assert!(
                    (v - c(expect, 0.0)).norm() < 1e-8,
                    "(m,l)=({m},{l}): {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn exponential_collapse_converges_in_truncation() {
        // entire (non-polynomial) symbols: error decreases as f's truncation grows
        let a = 1.1;
        let g = EntireSeries::exp_i_scaled(0.7, 12); // g(lambda) = e^{0.7 i lambda}
        let h = EntireSeries::identity();
        let idx = OperatorIndex::new(2, 1).unwrap();
        let ga = g.eval(c(a, 0.0));
        let ha = c(a, 0.0);
        let expect = ga * ha;
        let mut prev = f64::INFINITY;
        for d in [8usize, 12, 20] {
            let f = EntireSeries::exp_i_scaled(a, d);
            let v = apply_at_zero(&g, &h, idx, &f, 12, 1e-3).unwrap();
            let err = (v - expect).norm();
            assert!(err <= prev * 1.01, "D={d}: err {err} prev {prev}");
            prev = err;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn operator_is_linear_in_f() {
        let g = EntireSeries::exp_i_scaled(0.5, 10);
        let h = EntireSeries::monomial(2);
        let idx = OperatorIndex::new(3, 1).unwrap();
        let f = EntireSeries::exp_i_scaled(1.2, 16);
        let scaled =
            EntireSeries::new(f.coeffs().iter().map(|cj| cj * c(2.5, 0.0)).collect());
        let v = apply_at_zero(&g, &h, idx, &f, 10, 1e-6).unwrap();
        let vs = apply_at_zero(&g, &h, idx, &scaled, 10, 1e-6).unwrap();
        assert!((vs - v * 2.5).norm() <= 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn operator_norm_estimate_inequality() {
        // |G_{m,l} H_l f(0)| <= C_f (sum |g_u| b^u)^{m-l} (sum |h_v| b^v)^l
        let g = EntireSeries::identity();
        let h = EntireSeries::monomial(2);
        let test_fns = [
            EntireSeries::exp_i_scaled(1.5, 25),
            EntireSeries::monomial(3),
            EntireSeries::new(
                // truncated cos w
                (0..20)
                    .map(|j| {
                        if j % 2 == 0 {
                            let mut f = 1.0;
                            for k in 1..=j {
                                f *= k as f64;
                            }
                            c(if j % 4 == 0 { 1.0 } else { -1.0 } / f, 0.0)
                        } else {
                            c(0.0, 0.0)
                        }
                    })
                    .collect(),
            ),
        ];
        for f in &test_fns {
            let (c_f, b) = f.decay();
            let ag = weighted_mass(g.coeffs(), b, usize::MAX);
            let ah = weighted_mass(h.coeffs(), b, usize::MAX);
            for m in 0..=6usize {
                for l in 0..=m {
                    let v = apply_at_zero(
                        &g,
                        &h,
                        OperatorIndex::new(m, l).unwrap(),
                        f,
                        24,
                        1e-9,
                    )
                    .unwrap();
                    let bound = c_f * ag.powi((m - l) as i32) * ah.powi(l as i32);
                    assert!(
                        v.norm() <= bound * (1.0 + 1e-9),
                        "(m,l)=({m},{l}): |v|={} bound={bound}",
                        v.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn cutoff_insufficient_is_reported() {
        let g = EntireSeries::exp_i_scaled(2.0, 16);
        let h = EntireSeries::zero();
        let f = EntireSeries::exp_i_scaled(1.0, 16);
        let err = apply_at_zero(
            &g,
            &h,
            OperatorIndex::new(2, 0).unwrap(),
            &f,
            3,
            1e-12,
        );
        assert!(matches!(err, Err(Error::CutoffInsufficient { .. })));
    }

    #[test]
    fn continuity_bound_zero_symbols() {
        // g = h = 0: only the m = 0 term survives, Lambda = 2 hbar t / M exactly
        let cfg = PhysicsConfig::new(1.0, 1.0, 1.0, 0.37).unwrap();
        let lb = continuity_bound(&cfg, &EntireSeries::zero(), &EntireSeries::zero(), 1.0, 16)
            .unwrap();
        assert_eq!(lb.partial_sum, 2.0);
        assert_eq!(lb.tail_bound, 0.0);

        let cfg = PhysicsConfig::new(2.0, 1.0, 0.5, 0.0).unwrap();
        let lb = continuity_bound(&cfg, &EntireSeries::zero(), &EntireSeries::zero(), 1.0, 16)
            .unwrap();
        assert_eq!(lb.partial_sum, 2.0 * 1.0 * 0.5 / 2.0);
    }

    #[test]
    fn continuity_bound_partial_sums_cauchy() {
        let cfg = PhysicsConfig::unit(0.37).unwrap();
        let g = EntireSeries::identity();
        let h = EntireSeries::monomial(2);
        for b in [0.5, 1.0, 2.0] {
            let lo = continuity_bound(&cfg, &g, &h, b, 40).unwrap();
            let hi = continuity_bound(&cfg, &g, &h, b, 80).unwrap();
            assert!(
                (hi.partial_sum - lo.partial_sum).abs() <= lo.tail_bound,
                "b={b}: diff {} tail {}",
                hi.partial_sum - lo.partial_sum,
                lo.tail_bound
            );
        }
    }

    #[test]
    fn continuity_bound_monotone_in_b() {
        let cfg = PhysicsConfig::unit(0.37).unwrap();
        let g = EntireSeries::exp_i_scaled(0.8, 12);
        let h = EntireSeries::monomial(2);
        let mut prev = 0.0;
        for b in DECAY_B_GRID {
            let lb = continuity_bound(&cfg, &g, &h, b, 60).unwrap();
            assert!(lb.partial_sum >= prev, "b={b}");
            prev = lb.partial_sum;
        }
    }

    #[test]
    fn a1_convergence_of_superoscillations() {
        // with B = 2|a|, the B-norm of (F_n - truncated e^{iaw}) eventually
        // decreases along n
        let a = 1.3;
        let limit = EntireSeries::exp_i_scaled(a, 48);
        let mut errs = Vec::new();
        for n in [4u32, 8, 16, 24] {
            let fn_series = sequence_power_series(n, a, 48).unwrap();
            let diff = fn_series.sub(&limit);
            errs.push(a1_norm_estimate(&diff, 2.0 * a, 256, 4.0).unwrap());
        }
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "A1 norms not decreasing: {errs:?}");
        }
    }
}
