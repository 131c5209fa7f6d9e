//! Property-based invariants: identities that must hold across the whole
//! parameter envelope, with tolerances gated on the reported condition
//! numbers where cancellation is intrinsic.

mod common;

use abso::abkernel::{winding_bound, winding_sum, PhysicsConfig, WindingTruncation};
use abso::quadrature::{gauss_weighted_integral, periodic_integral, QuadratureSpec};
use abso::specfun::{bessel_j, ln_gamma, BesselOrder, Complex64, SeriesCutoff};
use abso::superosc::{coefficient, sequence, EntireSeries};
use common::ln_gamma_stirling;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    /// binomial theorem: sum_j C_j(n,a) = 1, up to the conditioning floor
    #[test]
    fn coefficient_sum_is_one(n in 1u32..40, a in -2.0f64..2.0) {
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for j in 0..=n {
            let cj = coefficient(n, j, a).unwrap();
            sum += cj;
            mag += cj.abs();
        }
        let tol = 1e-11 + 200.0 * mag * f64::EPSILON;
        prop_assert!((sum - 1.0).abs() < tol, "n={} a={} sum={} tol={:e}", n, a, sum, tol);
    }

    /// F_n(-x) = conj(F_n(x)) for real a and x
    #[test]
    fn sequence_conjugate_symmetry(n in 1u32..32, a in -2.0f64..2.0, x in -3.0f64..3.0) {
        let plus = sequence(n, a, c(x, 0.0)).unwrap();
        let minus = sequence(n, a, c(-x, 0.0)).unwrap();
        let tol = 1e-13 + 100.0 * plus.kappa * plus.value.norm() * f64::EPSILON;
        prop_assert!((minus.value - plus.value.conj()).norm() < tol);
    }

    /// the binomial closed form (cos(x/n) + i a sin(x/n))^n is an independent
    /// algebraic route to the same sum
    #[test]
    fn sequence_equals_binomial_closed_form(n in 1u32..32, a in -2.0f64..2.0, x in -3.0f64..3.0) {
        let v = sequence(n, a, c(x, 0.0)).unwrap();
        let u = x / n as f64;
        let closed = (c(u.cos(), 0.0) + c(0.0, a * u.sin())).powu(n);
        let tol = 1e-12 * closed.norm().max(1.0)
            + 100.0 * v.kappa * v.value.norm() * f64::EPSILON;
        prop_assert!((v.value - closed).norm() < tol);
    }

    /// uniform trapezoid integrates trigonometric polynomials of degree
    /// below n_theta/2 to machine precision: the result is 2 pi c_0
    #[test]
    fn trapezoid_exact_on_trig_polys(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
        n_theta in (8usize..64).prop_map(|n| n * 2),
    ) {
        prop_assume!(coeffs.len() < n_theta / 2);
        let f = |theta: f64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, (re, im)) in coeffs.iter().enumerate() {
                acc += c(*re, *im) * Complex64::from_polar(1.0, k as f64 * theta);
            }
            acc
        };
        let got = periodic_integral(f, n_theta);
        let want = c(coeffs[0].0, coeffs[0].1) * 2.0 * std::f64::consts::PI;
        let scale: f64 = coeffs.iter().map(|(re, im)| re.hypot(*im)).sum();
        prop_assert!((got - want).norm() <= 1e-13 * scale.max(1.0) * n_theta as f64);
    }

    /// Gaussian moments against the Gamma closed form with random decay rate
    #[test]
    fn gaussian_moments_random_rate(gamma in 0.3f64..3.0, n in 0u32..11) {
        let spec = QuadratureSpec::auto_from_majorant(
            gamma,
            |u| u.powi(n as i32),
            |u| n as f64 / u,
            8,
            80,
            1e-9,
        ).unwrap();
        let got = gauss_weighted_integral(|u| c(u.powi(n as i32), 0.0), gamma, &spec).unwrap();
        let want = ln_gamma_stirling((n as f64 + 1.0) / 2.0).exp()
            / (2.0 * gamma.powf((n as f64 + 1.0) / 2.0));
        prop_assert!((got.value.re - want).abs() < 1e-8 * want.max(1e-6));
    }

    /// the winding sum depends on the angles only through their difference
    #[test]
    fn winding_sum_angle_shift_invariance(
        xi in -2.0f64..2.0,
        rho in 0.1f64..3.0,
        phi in 0.0f64..6.2,
        shift in -3.0f64..3.0,
    ) {
        let cfg = PhysicsConfig::unit(xi).unwrap();
        let trunc = WindingTruncation::default();
        let base = winding_sum(&cfg, 1.0, phi, 0.0, c(rho, 0.0), &trunc).unwrap();
        let moved = winding_sum(&cfg, 1.0, phi + shift, shift, c(rho, 0.0), &trunc).unwrap();
        // the angle difference is reconstructed up to one rounding of the
        // shift arithmetic; the sum is Lipschitz in it with constant <= sum
        // of |n| * |J| <= (2N+1)^2
        prop_assert!((base.value - moved.value).norm() < 1e-9);
    }

    /// stored coefficients always satisfy the attached decay certificate
    #[test]
    fn entire_series_certificate_is_valid(
        coeffs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 0..14),
    ) {
        let series = EntireSeries::new(coeffs.iter().map(|(re, im)| c(*re, *im)).collect());
        let (cf, b) = series.decay();
        let mut factorial = 1.0f64;
        for (j, cj) in series.coeffs().iter().enumerate() {
            if j > 0 { factorial *= j as f64; }
            prop_assert!(cj.norm() <= cf * b.powi(j as i32) / factorial * (1.0 + 1e-12));
        }
    }

    /// Gamma product inequality: Gamma(a+1) Gamma(b+1) <= Gamma(a+b+2)
    #[test]
    fn gamma_product_inequality(alpha in 0.0f64..10.0, beta in 0.0f64..10.0) {
        let lhs = ln_gamma(alpha + 1.0).unwrap() + ln_gamma(beta + 1.0).unwrap();
        let rhs = ln_gamma(alpha + beta + 2.0).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    /// Hoelder bound: Gamma(n/q + 1) <= (n!)^{1/q} for q >= 1
    #[test]
    fn gamma_hoelder_inequality(n in 0u32..61, q in 1.0f64..4.0) {
        let lhs = ln_gamma(n as f64 / q + 1.0).unwrap();
        let rhs = ln_gamma(n as f64 + 1.0).unwrap() / q;
        prop_assert!(lhs <= rhs + 1e-12);
    }

    /// Bessel recurrence J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu on the real axis
    #[test]
    fn bessel_recurrence(nu in 1.0f64..3.5, x in 0.05f64..10.0) {
        let cut = SeriesCutoff::default();
        let j = |order: f64| bessel_j(BesselOrder::new(order).unwrap(), c(x, 0.0), &cut).unwrap().value;
        let resid = (j(nu - 1.0) + j(nu + 1.0) - (2.0 * nu / x) * j(nu)).norm();
        prop_assert!(resid <= 1e-9, "nu={} x={} resid={:e}", nu, x, resid);
    }
}

#[test]
fn winding_bound_dominates_mini_sweep() {
    // deterministic mini version of the acceptance sweep, with margins shown
    let trunc = WindingTruncation::default();
    let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let mut worst: f64 = 0.0;
    for &xi in &[-1.63, -0.5, 0.0, 0.37, 1.99] {
        for &rho in &[0.3, 1.0, 2.5, 4.0] {
            for &alpha in &[0.0, 1.0, 2.2, 4.7] {
                let cfg = PhysicsConfig::unit(xi).unwrap();
                let bound = winding_bound(&cfg, 1.0, rho);
                for z in [c(rho, 0.0), rot * rho] {
                    let f = winding_sum(&cfg, 1.0, alpha, 0.0, z, &trunc).unwrap();
                    assert!(
                        f.value.norm() <= bound,
                        "xi={xi} rho={rho} alpha={alpha}: |F|={} bound={bound}",
                        f.value.norm()
                    );
                    worst = worst.max(f.value.norm() / bound.max(1e-300));
                }
            }
        }
    }
    assert!(worst > 0.0 && worst < 1.0);
}
