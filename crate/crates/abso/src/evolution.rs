//! The solution pipeline: moment coefficients, the series form of the evolved
//! field, entire-function parameter maps, and supershift sums.
//!
//! Expanding the drive exponential of the rotated integral in powers of the
//! datum parameters `(a, b)` factors the solution through coefficients
//!
//! ```text
//! c_{m,l} = int_0^{2pi} int_0^inf e^{-M u^2/(2 hbar t)} F(u e^{i pi/4})
//!           cos^{m-l}(th) sin^l(th) u^{m+1} du dth
//! ```
//!
//! which depend on the configuration and target point only. The table of all
//! `c_{m,l}` with `l <= m <= m_max` is built once — the winding basis is
//! evaluated per radial node and recombined for every angle and moment — and
//! then every series evaluation, parameter map and supershift sum reuses it.

use crate::abkernel::{
    winding_bound, PhysicsConfig, PolarPoint, WindingBasis, WindingTruncation,
};
use crate::field::{Diagnostics, FieldValue, TailBounds};
use crate::iodo::{apply_at_zero, OperatorIndex};
use crate::kahan::{ComplexSum, NeumaierSum};
use crate::quadrature::{gauss_legendre_on, Estimate, QuadratureSpec};
use crate::specfun::{ln_gamma_pos, Complex64, SeriesCutoff};
use crate::superosc::{coefficient, EntireSeries, SuperoscSpec};
use crate::{Error, Result};

/// Truncation budget for the full pipeline.
#[derive(Clone, Debug)]
pub struct TruncationSpec {
    pub winding: WindingTruncation,
    pub bessel: SeriesCutoff,
    /// Outer series order: the table holds all `c_{m,l}` with `m <= m_max`.
    pub m_max: usize,
    pub n_theta: usize,
    pub n_u: usize,
    /// Radial cutoff; `None` selects it from the damped growth majorant.
    pub u_max: Option<f64>,
    pub tol: f64,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            winding: WindingTruncation::default(),
            bessel: SeriesCutoff::default(),
            m_max: 24,
            n_theta: 96,
            n_u: 200,
            u_max: None,
            tol: 1e-6,
        }
    }
}

#[inline]
fn entry_index(m: usize, l: usize) -> usize {
    m * (m + 1) / 2 + l
}

enum KernelKind<'a> {
    Winding(&'a WindingBasis),
    Unit,
}

/// The `(a,b)`-independent moment coefficients `c_{m,l}` of one configuration
/// and target point, with per-entry error estimates and the computable
/// growth constant for the tail certificates.
pub struct CoefficientTable {
    cfg: PhysicsConfig,
    target: PolarPoint,
    m_max: usize,
    entries: Vec<Complex64>,
    errors: Vec<f64>,
    /// `K = 2 pi max_grid e^{-M u^2/(4 hbar t)} |F|-majorant` (unit majorant
    /// for the diagnostic kernel).
    k_bound: f64,
}

impl CoefficientTable {
    /// Build the table for the true winding kernel.
    pub fn build(cfg: &PhysicsConfig, target: &PolarPoint, trunc: &TruncationSpec) -> Result<Self> {
        Self::build_inner(cfg, target, trunc, false)
    }

    /// Diagnostic hook: the same double integrals with the kernel replaced by
    /// the constant 1, so every entry has a closed form (angular Beta moment
    /// times a Gaussian radial moment).
    pub fn build_unit_kernel(cfg: &PhysicsConfig, trunc: &TruncationSpec) -> Result<Self> {
        let target = PolarPoint::new(0.0, 0.0)?;
        Self::build_inner(cfg, &target, trunc, true)
    }

    fn build_inner(
        cfg: &PhysicsConfig,
        target: &PolarPoint,
        trunc: &TruncationSpec,
        unit_kernel: bool,
    ) -> Result<Self> {
        if trunc.n_theta < 4 || !trunc.n_theta.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "n_theta must be even and >= 4, got {}",
                trunc.n_theta
            )));
        }
        if trunc.n_theta <= trunc.m_max {
            // the angular rule must be exact for trigonometric degree m_max
            return Err(Error::Domain(format!(
                "n_theta ({}) must exceed m_max ({})",
                trunc.n_theta, trunc.m_max
            )));
        }
        // the angular integrands reach trigonometric degree m_max plus the
        // winding harmonics; keep the uniform rule past that
        let degree = (trunc.m_max + 1) as f64;
        let u_max = match trunc.u_max {
            Some(u) => u,
            None if unit_kernel => {
                // F = 1, so the pure damped power is the majorant
                QuadratureSpec::auto_from_majorant(
                    cfg.gamma(),
                    |u| u.powf(degree),
                    |u| degree / u,
                    trunc.n_theta,
                    trunc.n_u,
                    trunc.tol,
                )?
                .u_max
            }
            None => {
                QuadratureSpec::auto(cfg, target.r, 0.0, degree, trunc.n_theta, trunc.n_u, trunc.tol)?
                    .u_max
            }
        };

        let coarse = Self::assemble(cfg, target, trunc, u_max, trunc.n_theta, trunc.n_u, unit_kernel)?;
        let fine =
            Self::assemble(cfg, target, trunc, u_max, 2 * trunc.n_theta, 2 * trunc.n_u, unit_kernel)?;

        let n_entries = entry_index(trunc.m_max, trunc.m_max) + 1;
        let mut errors = vec![0.0; n_entries];
        let gamma = cfg.gamma();
        let scale = cfg.bessel_scale(target.r);
        for m in 0..=trunc.m_max {
            // analytic [u_max, inf) tail for the u^{m+1} integrand
            let deg_m = (m + 1) as f64;
            let rate = (5.0 / 6.0) * scale + (deg_m + 2.5) / u_max;
            let denom = 2.0 * gamma * u_max - rate;
            let majorant = if unit_kernel {
                u_max.powf(deg_m)
            } else {
                winding_bound(cfg, target.r, u_max) * u_max.powf(deg_m)
            };
            let quad_tail = if denom > 0.0 {
                2.0 * std::f64::consts::PI * (-gamma * u_max * u_max).exp() * majorant / denom
            } else {
                f64::INFINITY
            };
            for l in 0..=m {
                let idx = entry_index(m, l);
                errors[idx] = (fine.entries[idx] - coarse.entries[idx]).norm()
                    + quad_tail
                    + fine.winding_tails[m];
            }
        }

        Ok(CoefficientTable {
            cfg: *cfg,
            target: *target,
            m_max: trunc.m_max,
            entries: fine.entries,
            errors,
            k_bound: fine.k_bound,
        })
    }

    fn assemble(
        cfg: &PhysicsConfig,
        target: &PolarPoint,
        trunc: &TruncationSpec,
        u_max: f64,
        n_theta: usize,
        n_u: usize,
        unit_kernel: bool,
    ) -> Result<AssembledTable> {
        let m_max = trunc.m_max;
        let (us, ws) = gauss_legendre_on(n_u, u_max);
        let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let rhos: Vec<Complex64> = us.iter().map(|u| rot * *u).collect();

        let basis;
        let kernel = if unit_kernel {
            KernelKind::Unit
        } else {
            basis = WindingBasis::build(cfg, target.r, &rhos, &trunc.winding, &trunc.bessel)?;
            KernelKind::Winding(&basis)
        };

        let gamma = cfg.gamma();
        let step = 2.0 * std::f64::consts::PI / n_theta as f64;

        // kernel values on the (theta, u) grid, plus per-u tail majorants
        let mut fgrid = vec![Complex64::new(1.0, 0.0); n_theta * n_u];
        let mut u_tails = vec![0.0f64; n_u];
        if let KernelKind::Winding(basis) = &kernel {
            for (k, row) in fgrid.chunks_mut(n_u).enumerate() {
                let alpha = target.phi - step * k as f64;
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = basis.sum_at(alpha, j).value;
                }
            }
            for (j, t) in u_tails.iter_mut().enumerate() {
                *t = basis.tail_bound(j);
            }
        }

        // angular power tables cos^p(theta_k), sin^p(theta_k)
        let mut cos_pow = vec![1.0f64; n_theta * (m_max + 1)];
        let mut sin_pow = vec![1.0f64; n_theta * (m_max + 1)];
        for k in 0..n_theta {
            let (s, c) = (step * k as f64).sin_cos();
            for p in 1..=m_max {
                cos_pow[k * (m_max + 1) + p] = cos_pow[k * (m_max + 1) + p - 1] * c;
                sin_pow[k * (m_max + 1) + p] = sin_pow[k * (m_max + 1) + p - 1] * s;
            }
        }

        let n_entries = entry_index(m_max, m_max) + 1;
        let mut acc: Vec<ComplexSum> = vec![ComplexSum::new(); n_entries];
        let mut winding_tails = vec![NeumaierSum::new(); m_max + 1];
        let mut k_bound = 0.0f64;

        for (j, (u, w)) in us.iter().zip(&ws).enumerate() {
            let damp = w * (-gamma * u * u).exp();
            let f_col: Vec<Complex64> = (0..n_theta).map(|k| fgrid[k * n_u + j]).collect();
            let mut u_pow = *u; // u^{m+1}, starting at m = 0
            for m in 0..=m_max {
                let weight = damp * u_pow * step;
                for l in 0..=m {
                    let mut ang = ComplexSum::new();
                    for (k, f) in f_col.iter().enumerate() {
                        ang.add(f * (cos_pow[k * (m_max + 1) + (m - l)] * sin_pow[k * (m_max + 1) + l]));
                    }
                    acc[entry_index(m, l)].add(ang.value() * weight);
                }
                winding_tails[m]
                    .add(2.0 * std::f64::consts::PI * damp * u_pow * u_tails[j]);
                u_pow *= u;
            }
            let kb = 2.0
                * std::f64::consts::PI
                * (-cfg.mass() * u * u / (4.0 * cfg.hbar() * cfg.time())).exp()
                * if unit_kernel {
                    1.0
                } else {
                    winding_bound(cfg, target.r, *u)
                };
            k_bound = k_bound.max(kb);
        }

        Ok(AssembledTable {
            entries: acc.iter().map(|a| a.value()).collect(),
            winding_tails: winding_tails.iter().map(|t| t.value()).collect(),
            k_bound,
        })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn config(&self) -> &PhysicsConfig {
        &self.cfg
    }

    pub fn target(&self) -> &PolarPoint {
        &self.target
    }

    pub fn entry(&self, m: usize, l: usize) -> Complex64 {
        assert!(l <= m && m <= self.m_max);
        self.entries[entry_index(m, l)]
    }

    pub fn error(&self, m: usize, l: usize) -> f64 {
        assert!(l <= m && m <= self.m_max);
        self.errors[entry_index(m, l)]
    }

    /// Computable growth constant `K` of the entry bound.
    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }

    /// The l-free entry bound `K Gamma((m+2)/2) / (2 (M/(4 hbar t))^{(m+2)/2})`.
    pub fn entry_bound(&self, m: usize) -> f64 {
        let q = self.cfg.mass() / (4.0 * self.cfg.hbar() * self.cfg.time());
        self.k_bound * (ln_gamma_pos((m as f64 + 2.0) / 2.0) - (m as f64 + 2.0) / 2.0 * q.ln()).exp()
            / 2.0
    }
}

struct AssembledTable {
    entries: Vec<Complex64>,
    winding_tails: Vec<f64>,
    k_bound: f64,
}

/// Single moment coefficient `c_{m,l}`; builds a table up to order `m`.
pub fn moment_coefficient(
    cfg: &PhysicsConfig,
    target: &PolarPoint,
    m: usize,
    l: usize,
    trunc: &TruncationSpec,
) -> Result<Estimate> {
    if l > m {
        return Err(Error::Domain(format!("need l <= m, got ({m}, {l})")));
    }
    let mut t = trunc.clone();
    t.m_max = m;
    let table = CoefficientTable::build(cfg, target, &t)?;
    Ok(Estimate {
        value: table.entry(m, l),
        error: table.error(m, l),
    })
}

/// Series-tail certificate from the entry bound: the neglected terms beyond
/// `m_max` are majorized by
///
/// ```text
/// K sum_{m > m_max} (|a|+|b|)^m Gamma((m+2)/2) / (2 (M/(4 hbar t))^{(m+2)/2} m!)
/// ```
///
/// summed term by term in log space until the term ratio (which decreases in
/// `m`) drops below 1/2, then closed geometrically.
fn series_tail_bound(cfg: &PhysicsConfig, k_bound: f64, drive: f64, m_max: usize) -> f64 {
    if drive <= 0.0 {
        return 0.0;
    }
    let q = cfg.mass() / (4.0 * cfg.hbar() * cfg.time());
    let ln_q = q.ln();
    let ln_d = drive.ln();
    let log_term = |m: f64| {
        m * ln_d + ln_gamma_pos((m + 2.0) / 2.0)
            - (m + 2.0) / 2.0 * ln_q
            - ln_gamma_pos(m + 1.0)
            - std::f64::consts::LN_2
    };
    let mut total = 0.0f64;
    let mut m = m_max as f64 + 1.0;
    for _ in 0..4000 {
        let lt = log_term(m);
        let ratio = (log_term(m + 1.0) - lt).exp();
        if ratio <= 0.5 {
            return k_bound * (total + lt.exp() / (1.0 - ratio));
        }
        total += lt.exp();
        m += 1.0;
    }
    f64::INFINITY
}

/// Evolved field for the plane-wave datum via the moment table:
///
/// ```text
/// psi = i M/(2 pi hbar t) e^{iM r^2/(2 hbar t)}
///       sum_m ((i e^{i pi/4})^m / m!) sum_l binom(m,l) a^{m-l} b^l c_{m,l}
/// ```
pub fn psi_series_from_table(
    table: &CoefficientTable,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<FieldValue> {
    let cfg = &table.cfg;
    let drive = a.norm() + b.norm();
    let tail = series_tail_bound(cfg, table.k_bound, drive, table.m_max);
    let pref_mag = cfg.mass() / (2.0 * std::f64::consts::PI * cfg.hbar() * cfg.time());
    if pref_mag * tail > tol {
        let mut suggested = table.m_max;
        while suggested < 400 {
            suggested += 1;
            if pref_mag * series_tail_bound(cfg, table.k_bound, drive, suggested) <= tol {
                break;
            }
        }
        return Err(Error::SeriesTail {
            achieved: pref_mag * tail,
            required: tol,
            suggested_m_max: suggested,
        });
    }

    let rot_i = Complex64::from_polar(1.0, 3.0 * std::f64::consts::FRAC_PI_4); // i e^{i pi/4}
    let mut a_pow = vec![Complex64::new(1.0, 0.0); table.m_max + 1];
    let mut b_pow = vec![Complex64::new(1.0, 0.0); table.m_max + 1];
    for p in 1..=table.m_max {
        a_pow[p] = a_pow[p - 1] * a;
        b_pow[p] = b_pow[p - 1] * b;
    }

    let mut acc = ComplexSum::new();
    let mut mag = NeumaierSum::new();
    let mut err = NeumaierSum::new();
    let mut binom_row: Vec<f64> = vec![1.0];
    let mut rot_pow = Complex64::new(1.0, 0.0);
    let mut inv_factorial = 1.0f64;
    for m in 0..=table.m_max {
        if m > 0 {
            rot_pow *= rot_i;
            inv_factorial /= m as f64;
            // extend Pascal's row in place
            binom_row.push(1.0);
            for l in (1..m).rev() {
                binom_row[l] += binom_row[l - 1];
            }
        }
        for l in 0..=m {
            let weight = binom_row[l] * inv_factorial;
            let term = rot_pow * a_pow[m - l] * b_pow[l] * table.entry(m, l) * weight;
            acc.add(term);
            mag.add(term.norm());
            err.add(weight * a_pow[m - l].norm() * b_pow[l].norm() * table.error(m, l));
        }
    }

    let prefactor = Complex64::new(0.0, pref_mag)
        * Complex64::from_polar(
            1.0,
            cfg.mass() * table.target.r * table.target.r / (2.0 * cfg.hbar() * cfg.time()),
        );
    let value = prefactor * acc.value();
    let kappa = mag.value() / acc.value().norm();
    Ok(FieldValue::new(
        value,
        pref_mag * (err.value() + tail),
        Diagnostics {
            terms_used: entry_index(table.m_max, table.m_max) + 1,
            condition_number: kappa,
            tail_bounds: TailBounds {
                winding: 0.0,
                quadrature: pref_mag * err.value(),
                series: pref_mag * tail,
            },
        },
    ))
}

/// Series solution for the plane-wave datum `e^{iax + iby}` (builds the table).
pub fn psi_series(
    cfg: &PhysicsConfig,
    a: Complex64,
    b: Complex64,
    target: &PolarPoint,
    trunc: &TruncationSpec,
) -> Result<FieldValue> {
    let table = CoefficientTable::build(cfg, target, trunc)?;
    psi_series_from_table(&table, a, b, trunc.tol)
}

/// Orders checked by the operator-representation consistency hook.
const OPERATOR_CHECK_M: usize = 2;
const OPERATOR_CHECK_TERMS: usize = 20;

/// Solution with the parameters routed through entire functions:
/// `psi` at `(g(a), h(a))`.
///
/// Before assembling the series, the low-order factors `g(a)^{m-l} h(a)^l`
/// are cross-checked against the infinite-order operator action on a
/// truncated exponential; a mismatch beyond tolerance is an error.
pub fn psi_from_entire_with_table(
    table: &CoefficientTable,
    a: f64,
    g: &EntireSeries,
    h: &EntireSeries,
    tol: f64,
) -> Result<FieldValue> {
    let ac = Complex64::new(a, 0.0);
    let ga = g.eval(ac);
    let ha = h.eval(ac);

    let hook_tol = tol.max(1e-8);
    let f = EntireSeries::exp_i_scaled(a, OPERATOR_CHECK_TERMS);
    let cutoff = g.degree().max(h.degree());
    for m in 0..=OPERATOR_CHECK_M.min(table.m_max) {
        for l in 0..=m {
            let direct = ga.powu((m - l) as u32) * ha.powu(l as u32);
            let op = apply_at_zero(g, h, OperatorIndex::new(m, l)?, &f, cutoff, hook_tol)?;
            let deviation = (direct - op).norm();
            if deviation > hook_tol {
                return Err(Error::OperatorConsistency {
                    deviation,
                    required: hook_tol,
                });
            }
        }
    }
    psi_series_from_table(table, ga, ha, tol)
}

/// As [`psi_from_entire_with_table`], building the table first.
pub fn psi_from_entire(
    cfg: &PhysicsConfig,
    a: f64,
    g: &EntireSeries,
    h: &EntireSeries,
    target: &PolarPoint,
    trunc: &TruncationSpec,
) -> Result<FieldValue> {
    let table = CoefficientTable::build(cfg, target, trunc)?;
    psi_from_entire_with_table(&table, a, g, h, trunc.tol)
}

/// Supershift sum `Psi_n = sum_j C_j(n,a) psi at (g(1-2j/n), h(1-2j/n))`,
/// reusing one moment table across all `j`.
pub fn supershift_sum_with_table(
    table: &CoefficientTable,
    spec: &SuperoscSpec,
    tol: f64,
) -> Result<FieldValue> {
    let n = spec.n;
    let mut acc = ComplexSum::new();
    let mut mag = NeumaierSum::new();
    let mut err = NeumaierSum::new();
    for j in 0..=n {
        let c_j = coefficient(n, j, spec.a)?;
        let k_j = Complex64::new(1.0 - 2.0 * j as f64 / n as f64, 0.0);
        let psi_j = psi_series_from_table(table, spec.g.eval(k_j), spec.h.eval(k_j), tol)?;
        acc.add(psi_j.value * c_j);
        mag.add(psi_j.value.norm() * c_j.abs());
        err.add(psi_j.error * c_j.abs());
    }
    let value = acc.value();
    let kappa = mag.value() / value.norm();
    Ok(FieldValue::new(
        value,
        err.value() + mag.value() * f64::EPSILON,
        Diagnostics {
            terms_used: n as usize + 1,
            condition_number: kappa,
            tail_bounds: TailBounds::default(),
        },
    ))
}

/// As [`supershift_sum_with_table`], building the table first.
pub fn supershift_sum(
    cfg: &PhysicsConfig,
    spec: &SuperoscSpec,
    target: &PolarPoint,
    trunc: &TruncationSpec,
) -> Result<FieldValue> {
    let table = CoefficientTable::build(cfg, target, trunc)?;
    supershift_sum_with_table(&table, spec, trunc.tol)
}

/// One row of a supershift convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: u32,
    /// `|Psi_n - psi at (g(a), h(a))|`.
    pub deviation: f64,
    pub kappa: f64,
    /// True when cancellation (`kappa * eps`) exceeds the measured deviation,
    /// i.e. the row's deviation is below the double-precision noise floor.
    pub flagged: bool,
}

/// Deviation of `Psi_n` from the supershift limit for each `n` in
/// `n_list` (nonempty, ascending); the moment table is shared by every row.
pub fn convergence_report(
    cfg: &PhysicsConfig,
    spec: &SuperoscSpec,
    target: &PolarPoint,
    n_list: &[u32],
    trunc: &TruncationSpec,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() {
        return Err(Error::Domain("n_list must be nonempty".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("n_list must be strictly ascending".into()));
    }
    let table = CoefficientTable::build(cfg, target, trunc)?;
    let limit = psi_from_entire_with_table(&table, spec.a, &spec.g, &spec.h, trunc.tol)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec_n = SuperoscSpec::new(n, spec.a, spec.g.clone(), spec.h.clone())?;
        let psi_n = supershift_sum_with_table(&table, &spec_n, trunc.tol)?;
        let deviation = (psi_n.value - limit.value).norm();
        let kappa = psi_n.diagnostics.condition_number;
        rows.push(ConvergenceRow {
            n,
            deviation,
            kappa,
            flagged: kappa * f64::EPSILON > deviation,
        });
    }
    Ok(rows)
}
