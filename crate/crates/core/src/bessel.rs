//! `K_1` on the cut plane and `f(xi) = K_1(xi) / xi` with two derivatives.
//!
//! Both `K_1` and `f'` come from the representations
//! `K_1(xi) = e^{-xi}/xi * int_0^inf e^{-t} sqrt(t^2 + 2 xi t) dt` and
//! `f'(xi) = -e^{-xi}/xi^3 * int_0^inf e^{-t} (t + xi) sqrt(t^2 + 2 xi t) dt`,
//! integrated together after the substitution `t = s^2`. The second derivative
//! follows from `xi f'' + 3 f' - xi f = 0`.
//!
//! Formula: `k1-integral`, `df-integral`, `bessel-ode`

use num_complex::Complex64 as C64;

use crate::conventions::{BESSEL_RTOL, MIN_BESSEL_ARG};
use crate::error::{CauchyError, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};

/// Upper end of the `s` integral. The neglected tail is below
/// `S^3 e^{-S^2} (1 + sqrt(2|xi|)) ~ 1e-22 (1 + sqrt(2|xi|))`.
const S_MAX: f64 = 7.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselEval {
    pub xi: C64,
    pub value: C64,
    pub f: C64,
    pub df: C64,
    pub d2f: C64,
}

impl BesselEval {
    /// `|xi f'' + 3 f' - xi f|`.
    pub fn ode_residual(&self) -> f64 {
        (self.xi * self.d2f + 3.0 * self.df - self.xi * self.f).norm()
    }
}

fn check_domain(xi: C64) -> Result<()> {
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(CauchyError::Domain(format!("non-finite argument {xi}")));
    }
    if xi.im == 0.0 && xi.re <= 0.0 {
        return Err(CauchyError::Domain(format!("{xi} lies on the cut")));
    }
    if xi.norm() < MIN_BESSEL_ARG {
        return Err(CauchyError::Domain(format!("|{xi}| below {MIN_BESSEL_ARG:e}")));
    }
    Ok(())
}

/// Returns `(I, J)` with `I = int_0^inf e^{-t} sqrt(t^2+2 xi t) dt` and
/// `J = int_0^inf e^{-t} (t+xi) sqrt(t^2+2 xi t) dt`.
fn moment_integrals(xi: C64) -> Result<(C64, C64)> {
    let two_xi = 2.0 * xi;
    let integrand = |s: f64| {
        let s2 = s * s;
        let g = 2.0 * s2 * (-s2).exp();
        let root = (two_xi + s2).sqrt();
        let a = root * g;
        [a, a * (xi + s2)]
    };
    // the integrand varies on the scale sqrt|xi| near the origin
    let knee = (2.0 * xi.norm()).sqrt().min(S_MAX / 2.0);
    let opts = AdaptiveOptions { rel_tol: BESSEL_RTOL * 0.25, ..Default::default() };
    let lo = integrate_adaptive(integrand, 0.0, knee, opts)?;
    let hi = integrate_adaptive(integrand, knee, S_MAX, opts)?;
    Ok((lo[0] + hi[0], lo[1] + hi[1]))
}

pub fn k1(xi: C64) -> Result<C64> {
    Ok(f_and_derivatives(xi)?.value)
}

pub fn f_and_derivatives(xi: C64) -> Result<BesselEval> {
    check_domain(xi)?;
    let (i, j) = moment_integrals(xi)?;
    let e = (-xi).exp();
    let value = e * i / xi;
    let f = value / xi;
    let df = -e * j / (xi * xi * xi);
    let d2f = f - 3.0 * df / xi;
    Ok(BesselEval { xi, value, f, df, d2f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_real;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // reference values of K_1 and -K_2(xi)/xi from 30-digit arithmetic
    const REFERENCE: [(C64, C64, C64); 9] = [
        (c_(1.0, 0.0), c_(0.601907230197234575, 0.0), c_(-1.62483889863517748, 0.0)),
        (c_(2.0, 0.0), c_(0.139865881816522427, 0.0), c_(-0.126879877283027931, 0.0)),
        (c_(0.05, 0.0), c_(19.9096743258825054, 0.0), c_(-15990.0241412954423, 0.0)),
        (c_(2.0, 1.0), c_(0.0362915924004270456, -0.124063834572834762), c_(0.0361380708130882239, 0.0896716046333706387)),
        (c_(-3.0, 0.5), c_(-5.43585032282301024, -11.206243494309981), c_(-0.857892612162348876, -2.17070435463453105)),
        (c_(10.0, 0.0), c_(0.0000186487734538255846, 0.0), c_(-2.15098170069327687e-6, 0.0)),
        (c_(1e-3, 0.0), c_(999.996238156085553, 0.0), c_(-1999999500.00097159, 0.0)),
        (c_(0.3, -4.0), c_(0.0588251906702663707, -0.468037728161340781), c_(-0.116090014772140695, -0.0506929345698719821)),
        (c_(40.0, 0.0), c_(8.49713195486103865e-19, 0.0), c_(-2.20442942446065474e-20, 0.0)),
    ];

    const fn c_(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matches_reference_table() {
        for (xi, k, df) in REFERENCE {
            let e = f_and_derivatives(xi).unwrap();
            assert!((e.value - k).norm() <= 1e-10 * k.norm(), "K1({xi})");
            assert!((e.df - df).norm() <= 1e-10 * df.norm(), "f'({xi})");
        }
    }

    #[test]
    fn agrees_with_second_representation() {
        // K_1(1) = int_1^inf e^{-s} sqrt(s^2 - 1) ds, with s = cosh(u)
        let alt = integrate_real(|u: f64| (-u.cosh()).exp() * u.sinh().powi(2), 0.0, 6.0, 1e-13).unwrap();
        assert!((k1(c(1.0, 0.0)).unwrap().re - alt).abs() <= 1e-8 * alt);
    }

    #[test]
    fn lower_bounds_on_positive_axis() {
        let x = 2.0;
        assert!(k1(c(x, 0.0)).unwrap().re >= (-x).exp() / x);
        let x = 1.5;
        assert!(-f_and_derivatives(c(x, 0.0)).unwrap().df.re >= 2.0 * (-x).exp() / x.powi(3));
    }

    #[test]
    fn continuous_across_the_positive_axis() {
        let a = k1(c(1.0, 0.0)).unwrap();
        let b = k1(c(1.0, -1e-12)).unwrap();
        assert!((a - b).norm() <= 1e-9);
    }

    #[test]
    fn ode_residual_is_small() {
        let e = f_and_derivatives(c(3.0, 0.0)).unwrap();
        assert!(e.ode_residual() <= 1e-10 * ((e.xi * e.f).norm() + e.df.norm()));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let xi = c(2.0, 1.0);
        let h = 1e-5;
        let fp = f_and_derivatives(xi + h).unwrap().f;
        let fm = f_and_derivatives(xi - h).unwrap().f;
        let fd = (fp - fm) / (2.0 * h);
        let df = f_and_derivatives(xi).unwrap().df;
        assert!((fd - df).norm() <= 1e-5 * df.norm());
    }

    #[test]
    fn rejects_the_cut() {
        for xi in [c(-1.0, 0.0), c(0.0, 0.0), c(1e-9, 0.0), c(f64::NAN, 0.0)] {
            assert!(matches!(k1(xi), Err(CauchyError::Domain(_))));
        }
    }

    #[test]
    fn upper_bounds_on_random_cut_plane_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let m = 10f64.powf(rng.gen_range(0.05f64.log10()..50f64.log10()));
            let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let xi = C64::from_polar(m, th);
            if xi.im == 0.0 && xi.re <= 0.0 {
                continue;
            }
            let e = f_and_derivatives(xi).unwrap();
            let damp = (-xi.re).exp();
            assert!(e.value.norm() <= damp * (1.0 / m + (std::f64::consts::PI / (2.0 * m)).sqrt()) * (1.0 + 1e-9));
            assert!(e.df.norm() <= damp * (2f64.powf(1.5) / m.powi(3) + 2.0 * std::f64::consts::PI.sqrt() * m.powf(-1.5)) * (1.0 + 1e-9));
        }
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(re in -5.0f64..20.0, im in 0.01f64..10.0) {
            let a = k1(c(re, im)).unwrap();
            let b = k1(c(re, -im)).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
        }
    }
}
