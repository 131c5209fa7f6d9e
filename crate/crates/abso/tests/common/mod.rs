//! Shared test oracles, deliberately independent of the library's own
//! evaluation paths: Gamma via a shifted Stirling/Bernoulli series instead of
//! Lanczos, Bessel sums in exact big-rational arithmetic instead of
//! double-double recurrences, and the unrotated regularized integral for the
//! contour-rotation witness.
#![allow(dead_code)]

use abso::abkernel::{PhysicsConfig, PolarPoint, WindingBasis, WindingTruncation};
use abso::quadrature::gauss_legendre;
use abso::specfun::SeriesCutoff;
use abso::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// ln Gamma via the Stirling asymptotic series with exact Bernoulli
/// coefficients, shifted so the expansion point is >= 12.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    assert!(x > 0.0);
    // B_2/(2*1), B_4/(4*3), ... as exact rationals
    const BERN: [(f64, f64); 8] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
    ];
    let mut shift = 0.0;
    let mut y = x;
    while y < 12.0 {
        shift += y.ln();
        y += 1.0;
    }
    let mut s = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let y2 = y * y;
    let mut ypow = y;
    for (k, (num, den)) in BERN.iter().enumerate() {
        let k2 = (2 * (k + 1)) as f64;
        s += num / (den * k2 * (k2 - 1.0) * ypow);
        ypow *= y2;
    }
    s - shift
}

/// The scaled series part `S = sum_l (-1)^l (x^2/4)^l / (l! prod_{k<=l}(nu+k))`
/// of `J_nu(x) = (x/2)^nu / Gamma(nu+1) * S`, summed exactly in rational
/// arithmetic for the exact rational values of the f64 inputs.
fn bessel_series_part_exact(nu: f64, x: f64, terms: usize) -> BigRational {
    let nu_r = BigRational::from_f64(nu).expect("finite order");
    let x_r = BigRational::from_f64(x).expect("finite argument");
    let q = -(&x_r * &x_r) / BigRational::from_integer(BigInt::from(4));
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for l in 0..terms {
        sum += &term;
        let lp1 = BigRational::from_integer(BigInt::from(l as i64 + 1));
        term = term * &q / (&lp1 * (&nu_r + &lp1));
    }
    sum
}

/// Independent high-precision Bessel oracle:
/// exact-rational series part, principal power via std `powf`, Gamma via the
/// Stirling oracle. Accurate to ~1e-14 relative for `x in (0, 30]`.
pub fn bessel_j_oracle(nu: f64, x: f64, terms: usize) -> f64 {
    assert!(nu >= 0.0 && x > 0.0);
    let s = bessel_series_part_exact(nu, x, terms);
    // guard against insufficient terms: the dropped tail must be invisible
    // at the oracle's own accuracy
    let check = bessel_series_part_exact(nu, x, terms + 8);
    let diff = (&s - &check).abs().to_f64().unwrap();
    let scale = check.abs().to_f64().unwrap().max(1e-30);
    assert!(
        diff <= 1e-20 * scale.max(1.0),
        "oracle terms insufficient: {diff:e}"
    );
    let prefactor = (nu * (x / 2.0).ln() - ln_gamma_stirling(nu + 1.0)).exp();
    prefactor * s.to_f64().unwrap()
}

/// Neville polynomial extrapolation of `(xs, ys)` to `x = 0`.
pub fn neville_to_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut vals = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            vals[i] = (vals[i] * (-xs[i + k]) - vals[i + 1] * (-xs[i])) / (xs[i] - xs[i + k]);
        }
    }
    vals[0]
}

/// Composite-panel Gauss-Legendre nodes and weights on `[0, upper]`.
pub fn panel_nodes(upper: f64, panels: usize, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(per_panel);
    let width = upper / panels as f64;
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let left = p as f64 * width;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            nodes.push(left + 0.5 * width * (x + 1.0));
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

/// Winding-kernel grid for the unrotated oracle: the order-resolved basis is
/// built once over the radial nodes and shared by every angle and every
/// regularization strength.
pub struct UnrotatedGrid {
    pub cfg: PhysicsConfig,
    pub target: PolarPoint,
    pub rho: Vec<f64>,
    pub w: Vec<f64>,
    pub n_theta: usize,
    /// F(theta_k, rho_j), row-major in k.
    pub fgrid: Vec<Complex64>,
}

impl UnrotatedGrid {
    pub fn build(
        cfg: PhysicsConfig,
        target: PolarPoint,
        rho_max: f64,
        panels: usize,
        per_panel: usize,
        n_theta: usize,
    ) -> Self {
        let (rho, w) = panel_nodes(rho_max, panels, per_panel);
        let rhos_c: Vec<Complex64> = rho.iter().map(|r| Complex64::new(*r, 0.0)).collect();
        let trunc = WindingTruncation {
            max_n: 192,
            tail_tol: 1e-10,
        };
        let series = SeriesCutoff {
            max_terms: 200,
            tol: 1e-10,
        };
        let basis = WindingBasis::build(&cfg, target.r, &rhos_c, &trunc, &series)
            .expect("oracle winding basis");
        let step = 2.0 * std::f64::consts::PI / n_theta as f64;
        let mut fgrid = vec![Complex64::new(0.0, 0.0); n_theta * rho.len()];
        for k in 0..n_theta {
            let alpha = target.phi - step * k as f64;
            for j in 0..rho.len() {
                fgrid[k * rho.len() + j] = basis.sum_at(alpha, j).value;
            }
        }
        UnrotatedGrid {
            cfg,
            target,
            rho,
            w,
            n_theta,
            fgrid,
        }
    }

    /// The epsilon-regularized unrotated integral
    /// `(M/(2 pi hbar t)) e^{iMr^2/(2 hbar t)} int int e^{-eps rho^2}
    ///  e^{iM rho^2/(2 hbar t)} F(rho) e^{i rho (a cos th + b sin th)} rho ...`.
    pub fn psi_regularized(&self, a: f64, b: f64, eps: f64) -> Complex64 {
        let cfg = &self.cfg;
        let gamma = cfg.gamma();
        let step = 2.0 * std::f64::consts::PI / self.n_theta as f64;
        let n_rho = self.rho.len();
        let mut outer = Complex64::new(0.0, 0.0);
        for k in 0..self.n_theta {
            let theta = step * k as f64;
            let drive = a * theta.cos() + b * theta.sin();
            let mut inner = Complex64::new(0.0, 0.0);
            for j in 0..n_rho {
                let rho = self.rho[j];
                let weight = self.w[j] * (-eps * rho * rho).exp() * rho;
                let phase = Complex64::from_polar(1.0, gamma * rho * rho + drive * rho);
                inner += self.fgrid[k * n_rho + j] * phase * weight;
            }
            outer += inner;
        }
        outer *= step;
        let pref_mag =
            cfg.mass() / (2.0 * std::f64::consts::PI * cfg.hbar() * cfg.time());
        let prefactor = pref_mag
            * Complex64::from_polar(
                1.0,
                cfg.mass() * self.target.r * self.target.r / (2.0 * cfg.hbar() * cfg.time()),
            );
        prefactor * outer
    }
}

/// Full-period angular moment `int_0^{2pi} cos^p sin^q` via the Beta formula.
pub fn angular_moment(p: usize, q: usize) -> f64 {
    if p % 2 == 1 || q % 2 == 1 {
        return 0.0;
    }
    2.0 * (ln_gamma_stirling((p as f64 + 1.0) / 2.0) + ln_gamma_stirling((q as f64 + 1.0) / 2.0)
        - ln_gamma_stirling((p + q) as f64 / 2.0 + 1.0))
        .exp()
}

/// Gaussian radial moment `int_0^inf u^p e^{-gamma u^2} du`.
pub fn radial_moment(p: usize, gamma: f64) -> f64 {
    (ln_gamma_stirling((p as f64 + 1.0) / 2.0)).exp() / (2.0 * gamma.powf((p as f64 + 1.0) / 2.0))
}
