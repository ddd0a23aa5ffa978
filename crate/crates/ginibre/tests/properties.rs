//! Randomized invariants of the special functions, contours, determinants and
//! the sampler.

use ginibre::contours::{choose_radius, closed_form_moments, in_sigma_interior, laurent_coefficients, phase, ContourSpec};
use ginibre::cplx::to_c64;
use ginibre::dd::Dd;
use ginibre::linalg::{lu, CMat};
use ginibre::logc::{wrap_phase, LogComplex};
use ginibre::moments::{log_det_toeplitz, ToeplitzSystem};
use ginibre::montecarlo::{mc_moment, sample_log_abs_det};
use ginibre::rng::Philox;
use ginibre::special::{gamma, log_barnes_g, log_gamma, upper_incomplete_gamma};
use ginibre::ModelParams;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Distance to the nearest multiple of 2πi, for identities between logarithms.
fn mod_2pi_i(z: C64) -> f64 {
    C64::new(z.re, wrap_phase(z.im)).norm()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn log_gamma_recurrence(re in 0.1f64..50.0, im in -50.0f64..50.0) {
        let z = C64::new(re, im);
        let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
        prop_assert!(mod_2pi_i(d) < 1e-12, "z={z}: {d}");
    }

    #[test]
    fn gamma_reflection(re in -4.0f64..4.0, im in -3.0f64..3.0) {
        let z = C64::new(re, im);
        prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
        let v = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * (z * PI).sin() / PI;
        prop_assert!((v - 1.0).norm() < 1e-10, "z={z}: {v}");
    }

    #[test]
    fn barnes_recursion(re in 0.5f64..30.0, im in -5.0f64..5.0) {
        let z = C64::new(re, im);
        let d = log_barnes_g(z + 1.0).unwrap() - log_barnes_g(z).unwrap() - log_gamma(z).unwrap();
        prop_assert!(mod_2pi_i(d) < 1e-10 * (1.0 + z.norm_sqr()), "z={z}: {d}");
    }

    #[test]
    fn wrap_phase_lands_in_principal_interval(p in -1e3f64..1e3) {
        let w = wrap_phase(p);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((p - w) / (2.0 * PI)).fract().abs().min(1.0 - ((p - w) / (2.0 * PI)).fract().abs()) < 1e-9);
    }

    #[test]
    fn log_complex_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        prop_assume!(re != 0.0 || im != 0.0);
        let z = C64::new(re, im);
        let back = LogComplex::from_complex(z).to_complex();
        prop_assert!((back - z).norm() < 1e-13 * z.norm());
    }
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn incomplete_gamma_derivative(nu_re in 0.2f64..3.0, nu_im in -1.0f64..1.0, z_re in 0.5f64..20.0, z_im in -5.0f64..5.0) {
        let nu = C64::new(nu_re, nu_im);
        let z = C64::new(z_re, z_im);
        let h = 1e-4 * z.norm();
        let dh = C64::new(h, 0.0);
        let numeric = -(upper_incomplete_gamma(nu, z + dh).unwrap() - upper_incomplete_gamma(nu, z - dh).unwrap()) / (2.0 * h);
        let exact = z.powc(nu - 1.0) * (-z).exp();
        prop_assert!((numeric - exact).norm() < 1e-6 * exact.norm(), "nu={nu} z={z}: {numeric} vs {exact}");
    }

    #[test]
    fn phase_is_positive_inside_sigma(x in 0.2f64..0.9, r in 0.0f64..1.0, t in -PI..PI) {
        let w = C64::from_polar(r, t);
        prop_assume!(w.im.abs() > 1e-9 && in_sigma_interior(w, x));
        prop_assert!(phase(w, x).unwrap().re > 0.0);
    }

    #[test]
    fn phase_on_unit_circle_is_bounded(x in 0.2f64..0.9, t in -PI..PI) {
        prop_assume!(t.abs() < PI - 1e-9);
        let w = C64::from_polar(1.0, t);
        prop_assert!(phase(w, x).unwrap().re <= x + x.ln() - x * x + 1e-12);
    }

    #[test]
    fn lu_determinant_is_multiplicative(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = Philox::for_sample(seed, 0);
        let mut draw = || CMat::<f64>::from_fn(n, |_, _| C64::new(rng.next_normal(), rng.next_normal()));
        let (a, b) = (draw(), draw());
        let ab = CMat::<f64>::from_fn(n, |i, j| (0..n).map(|k| a[(i, k)] * b[(k, j)]).sum());
        let (la, lb, lab) = (lu(&a).log_det(), lu(&b).log_det(), lu(&ab).log_det());
        prop_assert!((la.log_mag + lb.log_mag - lab.log_mag).abs() < 1e-10);
        prop_assert!(wrap_phase(la.phase + lb.phase - lab.phase).abs() < 1e-9);
    }

    #[test]
    fn sampler_is_reproducible(seed in any::<u64>(), index in any::<u64>(), n in 1usize..6) {
        let z = C64::new(0.3, -0.2);
        let a = sample_log_abs_det(n, z, &mut Philox::for_sample(seed, index));
        let b = sample_log_abs_det(n, z, &mut Philox::for_sample(seed, index));
        prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn moments_are_contour_independent(n in 2usize..20, xi in 0usize..3, gi in 0usize..4) {
        let x = [0.3, 0.5, 0.7][xi];
        let g = [C64::new(-1.0, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(2.0, 0.0)][gi];
        let p = ModelParams::new(n, x, g).unwrap();
        // Rounding in a trapezoid pass scales like ρ^{−m}, so per-coefficient
        // relative agreement needs the extended type.
        let near = laurent_coefficients::<Dd>(&p, n, &ContourSpec::centered(x, x / 2.0 + 0.25, 256)).unwrap();
        let far = laurent_coefficients::<Dd>(&p, n, &ContourSpec::centered(x, x / 2.0 + 0.6, 256)).unwrap();
        let ms = -(n as i64)..=(n as i64);
        // Exact zeros (γ/2 a non-negative integer) get an absolute floor.
        let floor = 1e-20 * ms.clone().map(|m| to_c64(far.get(m)).norm()).fold(0.0, f64::max);
        for m in ms {
            let (a, b) = (to_c64(near.get(m)), to_c64(far.get(m)));
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(floor), "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn balancing_preserves_determinant(n in 2usize..12, x in 0.2f64..0.8, g_re in -0.9f64..2.5, g_im in -1.0f64..1.0) {
        let p = ModelParams::new(n, x, C64::new(g_re, g_im)).unwrap();
        let cm = closed_form_moments::<f64>(&p, n - 1).unwrap();
        let plain = log_det_toeplitz(&ToeplitzSystem::new(cm.clone(), n, None));
        let balanced = log_det_toeplitz(&ToeplitzSystem::new(cm, n, Some(choose_radius(&p, n - 1))));
        if let (Ok(a), Ok(b)) = (plain, balanced) {
            // Compare only where both factorizations are clean.
            prop_assume!(a.condition < 1e6 && b.condition < 1e6);
            prop_assert!((a.log_det.log_mag - b.log_det.log_mag).abs() < 1e-9);
            prop_assert!(wrap_phase(a.log_det.phase - b.log_det.phase).abs() < 1e-9);
        }
    }

    #[test]
    fn estimates_are_bit_reproducible(seed in any::<u64>()) {
        let a = mc_moment(3, C64::new(0.4, 0.1), C64::new(1.0, 0.5), 2000, seed).unwrap();
        let b = mc_moment(3, C64::new(0.4, 0.1), C64::new(1.0, 0.5), 2000, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
