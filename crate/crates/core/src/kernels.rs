//! The scalar kernel `D`, its derivatives, the negative-energy kernel `p^-`,
//! the gauge phase `lambda^A` and the kernels built from them.
//!
//! With `xi = m r(w)`, `f = K_1(xi)/xi` and `c = m^3 / (2 pi^2)`:
//! `D = -c f`, `d_mu D = c m w_mu f' / r`,
//! `d_mu d_nu D = c m [(g_{mu nu}/r + w_mu w_nu / r^3) f' - m w_mu w_nu f'' / r^2]`.
//!
//! Formula: `D-bessel`, `D-gradient`, `D-hessian`, `pminus-from-D`, `gauge-phase`,
//! `gauge-chain`, `dressed-kernel`, `delta-kernel`, `counter-kernel`

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use crate::bessel::f_and_derivatives;
use crate::conventions::{DEFAULT_U, METRIC};
use crate::error::Result;
use crate::field::ExternalField;
use crate::minkowski::{radius, slash_lower, slash_real, ComplexFourVector, FourVector, SpinorMatrix};
use crate::surface::CauchySurface;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DEval {
    pub d: C64,
    /// `d_mu D`, lower index.
    pub grad: [C64; 4],
    /// `d_mu d_nu D`.
    pub hess: Matrix4<C64>,
    pub r: C64,
    pub w: ComplexFourVector,
}

impl DEval {
    /// `g^{mu nu} d_mu d_nu D + m^2 D`.
    pub fn klein_gordon_residual(&self, m: f64) -> C64 {
        (0..4).map(|k| self.hess[(k, k)] * METRIC[k]).sum::<C64>() + self.d * m * m
    }

    /// `gamma^mu d_mu D`.
    pub fn dslash(&self) -> SpinorMatrix {
        slash_lower(&self.grad)
    }
}

pub fn mass_prefactor(m: f64) -> f64 {
    m.powi(3) / (2.0 * std::f64::consts::PI.powi(2))
}

pub fn d_eval(w: &ComplexFourVector, m: f64) -> Result<DEval> {
    let r = radius(w)?;
    let b = f_and_derivatives(r * m)?;
    let c = mass_prefactor(m);
    let wl = w.lower();
    let d = -b.f * c;
    let a = b.df * (c * m) / r;
    let grad = wl.map(|x| a * x);
    let r2 = r * r;
    let pair = (b.df / (r2 * r) - b.d2f * m / r2) * (c * m);
    let diag = b.df * (c * m) / r;
    let hess = Matrix4::from_fn(|mu, nu| {
        let g = if mu == nu { diag * METRIC[mu] } else { C64::new(0.0, 0.0) };
        g + pair * wl[mu] * wl[nu]
    });
    Ok(DEval { d, grad, hess, r, w: *w })
}

pub fn p_minus_from(e: &DEval, m: f64) -> SpinorMatrix {
    (e.dslash() * (-I) + SpinorMatrix::identity() * (e.d * m)) / C64::new(2.0 * m, 0.0)
}

/// `p^-(w) = (-i dslash + m) D / (2m)`.
pub fn p_minus(w: &ComplexFourVector, m: f64) -> Result<SpinorMatrix> {
    Ok(p_minus_from(&d_eval(w, m)?, m))
}

/// Source point, target point and regularization of a kernel evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint {
    pub x: FourVector,
    pub y: FourVector,
    pub epsilon: f64,
    pub u: FourVector,
}

impl KernelPoint {
    pub fn new(x: FourVector, y: FourVector, epsilon: f64) -> Self {
        Self { x, y, epsilon, u: FourVector(DEFAULT_U) }
    }

    /// `w = y - x + i eps u`.
    pub fn w(&self) -> ComplexFourVector {
        (self.y - self.x).shifted(self.epsilon, &self.u)
    }
}

/// `lambda^A(x, y) = (A_mu(x) + A_mu(y)) (x^mu - y^mu) / 2`.
pub fn lambda_a(field: &ExternalField, x: &FourVector, y: &FourVector) -> f64 {
    let ax = field.potential(x);
    let ay = field.potential(y);
    0.5 * (0..4).map(|k| (ax[k] + ay[k]) * (x.0[k] - y.0[k])).sum::<f64>()
}

/// `Omega(x) + lambda - Omega(y)`.
pub fn gauge_chain_lambda(omega_x: f64, lambda: f64, omega_y: f64) -> f64 {
    omega_x + lambda - omega_y
}

/// `e^{-i lambda} - 1`, accurate for small phases.
pub fn phase_minus_one(lambda: f64) -> C64 {
    let s = (0.5 * lambda).sin();
    C64::new(-2.0 * s * s, -lambda.sin())
}

pub fn phase(lambda: f64) -> C64 {
    C64::new(lambda.cos(), -lambda.sin())
}

/// `e^{-i lambda^A(x,y)} p^-(y - x + i eps u)`.
pub fn p_dressed(field: &ExternalField, pt: &KernelPoint, m: f64) -> Result<SpinorMatrix> {
    Ok(p_minus(&pt.w(), m)? * phase(lambda_a(field, &pt.x, &pt.y)))
}

/// `(e^{-i lambda^A(x,y)} - 1) p^-(y - x + i eps u)`.
pub fn delta_p_kernel(field: &ExternalField, pt: &KernelPoint, m: f64) -> Result<SpinorMatrix> {
    let l = lambda_a(field, &pt.x, &pt.y);
    if l == 0.0 {
        return Ok(SpinorMatrix::zeros());
    }
    Ok(p_minus(&pt.w(), m)? * phase_minus_one(l))
}

/// `nslash(x) Eslash(x)` at a surface point.
pub fn normal_electric(surface: &CauchySurface, field: &ExternalField, x: &FourVector) -> SpinorMatrix {
    let n = surface.normal(&[x.0[1], x.0[2], x.0[3]]);
    let e = field.electric_field(x, &n);
    slash_real(&n) * slash_lower(&e.map(|v| C64::new(v, 0.0)))
}

/// `r(w)^2 dslash D(w)`.
pub fn r2_dslash(e: &DEval) -> SpinorMatrix {
    e.dslash() * (e.r * e.r)
}

/// `(1/8m) nslash(x) Eslash(x) r(w)^2 dslash D(w)`.
pub fn s_kernel(surface: &CauchySurface, field: &ExternalField, pt: &KernelPoint, m: f64) -> Result<SpinorMatrix> {
    let ne = normal_electric(surface, field, &pt.x);
    if ne.iter().all(|c| *c == C64::new(0.0, 0.0)) {
        return Ok(SpinorMatrix::zeros());
    }
    let e = d_eval(&pt.w(), m)?;
    Ok(ne * r2_dslash(&e) / C64::new(8.0 * m, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conventions::dirac_gammas;
    use crate::field::{Bump, GaugeFunction};
    use crate::minkowski::{boost, dirac_adjoint, minkowski_dot, slash, spinor_frobenius};
    use crate::surface::SurfaceShape;
    use proptest::prelude::*;

    const M: f64 = 1.0;

    fn w0() -> ComplexFourVector {
        FourVector::new(0.2, 1.1, -0.3, 0.4).shifted(0.05, &FourVector(DEFAULT_U))
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm())
    }

    fn mclose(a: &SpinorMatrix, b: &SpinorMatrix, tol: f64) -> bool {
        spinor_frobenius(&(a - b)) <= tol * spinor_frobenius(a).max(spinor_frobenius(b))
    }

    fn field() -> ExternalField {
        ExternalField::bump([0.3, -0.5, 0.2, 0.7], [0.0, 0.2, -0.1, 0.0], 1.8)
    }

    #[test]
    fn parity_and_conjugation_symmetry() {
        let w = w0();
        let d = d_eval(&w, M).unwrap().d;
        assert!(close(d_eval(&(-w), M).unwrap().d, d, 1e-12));
        assert!(close(d_eval(&w.conj(), M).unwrap().d, d.conj(), 1e-12));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = w0();
        let e = d_eval(&w, M).unwrap();
        let h = 1e-4;
        for mu in 0..4 {
            let dw = FourVector::basis(mu).to_complex().scale(C64::new(h, 0.0));
            let ep = d_eval(&(w + dw), M).unwrap();
            let em = d_eval(&(w - dw), M).unwrap();
            let fd = (ep.d - em.d) / (2.0 * h);
            assert!(close(fd, e.grad[mu], 1e-6), "grad {mu}");
            for nu in 0..4 {
                let fd2 = (ep.grad[nu] - em.grad[nu]) / (2.0 * h);
                assert!((fd2 - e.hess[(mu, nu)]).norm() <= 1e-6 * e.hess.iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
        }
    }

    #[test]
    fn dirac_operator_annihilates_pminus() {
        // (i dslash_x - m) p^-(y - x + i eps u) with d/dx = -d/dw
        let w = w0();
        let e = d_eval(&w, M).unwrap();
        let g = dirac_gammas();
        let mut acc = SpinorMatrix::zeros();
        for mu in 0..4 {
            // d_mu p^- = (-i gamma^nu d_mu d_nu D + m d_mu D) / 2m
            let dp = (0..4).fold(SpinorMatrix::zeros(), |a, nu| a + g[nu] * (e.hess[(mu, nu)] * METRIC[nu] * METRIC[nu]))
                * (-I)
                + SpinorMatrix::identity() * (e.grad[mu] * M);
            let dp = dp / C64::new(2.0 * M, 0.0);
            acc += g[mu] * dp * (-I * METRIC[mu] * METRIC[mu]);
        }
        let res = acc - p_minus_from(&e, M) * C64::new(M, 0.0);
        assert!(spinor_frobenius(&res) <= 1e-9 * spinor_frobenius(&p_minus_from(&e, M)));
    }

    #[test]
    fn pminus_dirac_hermiticity() {
        let w = w0();
        let lhs = p_minus(&(-w.conj()), M).unwrap();
        let rhs = dirac_adjoint(&p_minus(&w, M).unwrap());
        assert!(mclose(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn lorentz_covariance_of_pminus() {
        let w = w0();
        for (chi, axis) in [(0.7, 1), (-1.0, 2), (0.4, 3)] {
            let b = boost(chi, axis).unwrap();
            let lhs = b.spinor * p_minus(&b.inverse().apply(&w), M).unwrap() * b.spinor_inverse();
            assert!(mclose(&lhs, &p_minus(&w, M).unwrap(), 1e-10));
            // the literal adjoint in place of the inverse is not a symmetry for boosts
            let wrong = b.spinor * p_minus(&b.inverse().apply(&w), M).unwrap() * b.spinor.adjoint();
            assert!(!mclose(&wrong, &p_minus(&w, M).unwrap(), 1e-3));
        }
    }

    #[test]
    fn gauge_phase_examples() {
        let a = field();
        let x = FourVector::new(0.1, 0.3, -0.2, 0.5);
        let y = FourVector::new(-0.2, -0.4, 0.6, 0.1);
        assert_eq!(lambda_a(&a, &x, &x), 0.0);
        assert_eq!(lambda_a(&a, &x, &y), -lambda_a(&a, &y, &x));
        let h = 1e-6;
        let ax = a.potential(&x);
        for mu in 0..4 {
            let e = FourVector::basis(mu) * h;
            let fd = (lambda_a(&a, &(x + e), &x) - lambda_a(&a, &(x - e), &x)) / (2.0 * h);
            assert!((fd - ax[mu]).abs() < 1e-6);
        }
        assert_eq!(gauge_chain_lambda(0.0, 0.37, 0.0), 0.37);
        let l = 0.37;
        assert!((gauge_chain_lambda(-0.2, gauge_chain_lambda(0.2, l, 0.5), -0.5) - l).abs() <= 1e-15);
        assert_eq!(gauge_chain_lambda(0.9, 0.0, 0.9), 0.0);
    }

    #[test]
    fn dressed_kernel_examples() {
        let pt = KernelPoint::new(FourVector::new(0.0, 0.1, 0.2, 0.0), FourVector::new(0.1, 0.9, -0.3, 0.2), 0.1);
        let zero = ExternalField::zero();
        assert_eq!(p_dressed(&zero, &pt, M).unwrap(), p_minus(&pt.w(), M).unwrap());
        assert_eq!(delta_p_kernel(&zero, &pt, M).unwrap(), SpinorMatrix::zeros());
        let a = field();
        let pd = p_dressed(&a, &pt, M).unwrap();
        let pm = p_minus(&pt.w(), M).unwrap();
        for (u, v) in pd.iter().zip(pm.iter()) {
            assert!((u.norm() - v.norm()).abs() <= 1e-15 * v.norm().max(1.0));
        }
        let dp = delta_p_kernel(&a, &pt, M).unwrap();
        assert!(mclose(&(pd - pm), &dp, 1e-12));
    }

    #[test]
    fn gauge_identity_is_pointwise_exact() {
        let a = field();
        let om = GaugeFunction { amplitude: 0.7, bump: Bump { center: [0.0, 0.3, 0.0, 0.0], radius: 1.5 } };
        let pt = KernelPoint::new(FourVector::new(0.0, 0.1, 0.2, 0.0), FourVector::new(0.0, 0.9, -0.3, 0.2), 0.0);
        let (ox, oy) = (om.value(&pt.x), om.value(&pt.y));
        let l = lambda_a(&a, &pt.x, &pt.y);
        let pm = p_minus(&pt.w(), M).unwrap();
        let lhs = pm * (phase(ox) * phase(l) * phase(-oy));
        let rhs = pm * phase(gauge_chain_lambda(ox, l, oy));
        assert!(spinor_frobenius(&(lhs - rhs)) <= 1e-15 * spinor_frobenius(&pm).max(1.0));
    }

    #[test]
    fn delta_kernel_vanishes_outside_support() {
        let a = field();
        let pt = KernelPoint::new(FourVector::new(0.0, 3.0, 0.0, 0.0), FourVector::new(0.0, 0.0, 3.0, 0.0), 0.0);
        assert_eq!(delta_p_kernel(&a, &pt, M).unwrap(), SpinorMatrix::zeros());
    }

    #[test]
    fn counter_kernel_examples() {
        let s = CauchySurface::new(SurfaceShape::GaussianBump { height: 0.3, width: 0.9, center: [0.0; 3] }, 0.4).unwrap();
        let a = field();
        let xs = [0.2, 0.1, -0.1];
        let ys = [0.6, -0.3, 0.2];
        let outside = KernelPoint::new(s.embed(&[2.5, 0.0, 0.0]), s.embed(&ys), 0.0);
        assert_eq!(s_kernel(&s, &a, &outside, M).unwrap(), SpinorMatrix::zeros());
        let p0 = KernelPoint::new(s.embed(&xs), s.embed(&ys), 0.0);
        let k0 = s_kernel(&s, &a, &p0, M).unwrap();
        let at = |eps: f64| s_kernel(&s, &a, &KernelPoint { epsilon: eps, ..p0 }, M).unwrap();
        let (k1, k2) = (at(1e-6), at(2e-6));
        assert!(spinor_frobenius(&k0) > 0.0);
        // first order in eps, so the one-sided difference is ~1e-6 and the
        // linear extrapolation to eps = 0 is exact to second order
        assert!(spinor_frobenius(&(k0 - k1)) <= 1e-5 * spinor_frobenius(&k0));
        let limit = k1 * C64::new(2.0, 0.0) - k2;
        assert!(mclose(&limit, &k0, 1e-8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn klein_gordon_and_lorentz_symmetry(
            zs in prop::array::uniform3(-2.5f64..2.5),
            t in -0.8f64..0.8,
            eps in 0.0f64..1.0,
        ) {
            let zn = (zs[0]*zs[0] + zs[1]*zs[1] + zs[2]*zs[2]).sqrt();
            prop_assume!(zn > 0.05);
            let w = FourVector([t * zn, zs[0], zs[1], zs[2]]).shifted(eps, &FourVector(DEFAULT_U));
            let e = d_eval(&w, M).unwrap();
            prop_assert!(e.klein_gordon_residual(M).norm() <= 1e-9 * e.d.norm() * M * M);
            let wl = w.lower();
            let scale = e.grad.iter().map(|g| g.norm()).fold(0.0, f64::max) * w.euclidean_norm();
            for mu in 0..4 {
                for nu in 0..4 {
                    prop_assert!((wl[nu] * e.grad[mu] - wl[mu] * e.grad[nu]).norm() <= 1e-10 * scale);
                }
            }
            prop_assert!(close(minkowski_dot(&w, &w), -(e.r * e.r), 1e-12));
            let _ = slash(&w);
        }
    }
}
