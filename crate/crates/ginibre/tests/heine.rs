//! Exact log-moment against a million-sample Monte Carlo estimate.

use ginibre::moments::log_expectation;
use ginibre::montecarlo::mc_moment;
use ginibre::ModelParams;
use num_complex::Complex64 as C64;

#[test]
fn exact_route_matches_sampling_at_n6() {
    let exact = log_expectation(&ModelParams::real(6, 0.5, 1.0).unwrap()).unwrap().value.to_complex();
    let mc = mc_moment(6, C64::new(0.5, 0.0), C64::new(1.0, 0.0), 1_000_000, 11).unwrap();
    let sigmas = mc.sigmas_from(exact);
    assert!(sigmas < 3.0, "exact {exact}, estimate {} ± {} ({sigmas:.2} sigma)", mc.mean, mc.std_error);
}
