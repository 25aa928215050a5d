//! The sampled suites through the public API, at a second mass and seed.

use cauchy_core::bounds::{bound_suite, SamplingConfig};
use cauchy_core::identities::{covariance_suite, identity_suite};

fn config(mass: f64, seed: u64) -> SamplingConfig {
    SamplingConfig { samples: 200, seed, v_max: 0.8, z_range: (0.05, 4.0), eps_range: (1e-6, 1.0), mass }
}

#[test]
fn identities_hold_at_another_mass() {
    for check in identity_suite(&config(2.5, 17)).unwrap() {
        assert!(check.holds, "{} worst {:e}", check.name, check.worst);
    }
}

#[test]
fn covariance_holds_at_another_mass() {
    for check in covariance_suite(&config(0.7, 3)).unwrap() {
        assert!(check.holds, "{} worst {:e}", check.name, check.worst);
    }
}

#[test]
fn bounds_hold_on_a_fresh_sample() {
    for check in bound_suite(&config(1.0, 99)).unwrap() {
        assert!(check.holds, "{} constant {:e}", check.name, check.constant);
    }
}

#[test]
fn suites_are_seed_deterministic() {
    let a = identity_suite(&config(1.0, 5)).unwrap();
    let b = identity_suite(&config(1.0, 5)).unwrap();
    assert_eq!(a, b);
}
