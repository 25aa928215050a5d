//! Sampled checks of the pointwise identities satisfied by `D` and `p^-`, and of
//! the gauge and Lorentz covariance of the kernels.
//!
//! Every check reports the worst relative residual over the sample together with
//! its tolerance.
//!
//! Formula: `klein-gordon`, `lorentz-symmetry`, `r2-dslash-derivative`,
//! `dirac-annihilation`, `gauge-identity`, `lorentz-covariance`, `operator-gauge-conjugation`

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{separation_samples, SamplingConfig, SeparationSample};
use crate::conventions::{dirac_gammas, DEFAULT_U, METRIC};
use crate::error::Result;
use crate::field::{Bump, ExternalField, GaugeFunction};
use crate::flow::r2_dslash_derivatives;
use crate::kernels::{d_eval, gauge_chain_lambda, lambda_a, p_minus, p_minus_from, phase, KernelPoint};
use crate::minkowski::{boost, slash, spinor_frobenius, FourVector, SpinorMatrix, C64};
use crate::operators::linalg::{max_abs, to_c64};
use crate::operators::{assemble, DiagonalRule};
use crate::surface::{make_grid, CauchySurface, QuadratureRule, SurfaceShape};

pub const KLEIN_GORDON_TOL: f64 = 1e-9;
pub const LORENTZ_SYMMETRY_TOL: f64 = 1e-10;
pub const R2_DSLASH_TOL: f64 = 1e-8;
pub const DIRAC_TOL: f64 = 1e-9;
pub const GAUGE_TOL: f64 = 1e-15;
pub const BOOST_TOL: f64 = 1e-10;
pub const MAX_TEST_RAPIDITY: f64 = 1.0;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub samples: usize,
    /// Largest relative residual over the sample.
    pub worst: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl IdentityCheck {
    fn new(name: &str, residuals: &[f64], tolerance: f64) -> Self {
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        let holds = residuals.iter().all(|r| r.is_finite()) && worst <= tolerance;
        Self { name: name.to_string(), samples: residuals.len(), worst, tolerance, holds }
    }
}

fn w_of(s: &SeparationSample) -> crate::minkowski::ComplexFourVector {
    s.z.shifted(s.epsilon, &FourVector(DEFAULT_U))
}

fn frob_rel(a: &SpinorMatrix, b: &SpinorMatrix) -> f64 {
    spinor_frobenius(&(a - b)) / spinor_frobenius(a).max(spinor_frobenius(b))
}

/// `2 w_nu dslash D - gamma_nu w^mu d_mu D + wslash w_nu m^2 D`.
fn r2_dslash_closed_form(e: &crate::kernels::DEval, m: f64) -> [SpinorMatrix; 4] {
    let g = dirac_gammas();
    let wl = e.w.lower();
    let w_grad: C64 = (0..4).map(|mu| e.w.0[mu] * e.grad[mu]).sum();
    let ds = e.dslash();
    let ws = slash(&e.w);
    std::array::from_fn(|nu| ds * (wl[nu] * 2.0) - g[nu] * (w_grad * METRIC[nu]) + ws * (wl[nu] * e.d * m * m))
}

/// `(i dslash_x - m) p^-(y - x + i eps u) / |p^-|`, with `d/dx = -d/dw`.
fn dirac_residual(e: &crate::kernels::DEval, m: f64) -> f64 {
    let g = dirac_gammas();
    let mut acc = SpinorMatrix::zeros();
    for mu in 0..4 {
        let col: [C64; 4] = std::array::from_fn(|nu| e.hess[(mu, nu)]);
        let dp = (crate::minkowski::slash_lower(&col) * (-I) + SpinorMatrix::identity() * (e.grad[mu] * m)) / C64::new(2.0 * m, 0.0);
        acc -= g[mu] * dp * I;
    }
    let p = p_minus_from(e, m);
    spinor_frobenius(&(acc - p * C64::new(m, 0.0))) / spinor_frobenius(&p)
}

/// Klein-Gordon, Lorentz symmetry, the derivative identity of `r^2 dslash D` and the
/// Dirac equation for `p^-`, at the sampled separations.
pub fn identity_suite(cfg: &SamplingConfig) -> Result<Vec<IdentityCheck>> {
    let samples = separation_samples(cfg)?;
    let m = cfg.mass;
    let res: Vec<[f64; 4]> = samples.par_iter().map(|s| {
        let w = w_of(s);
        let e = d_eval(&w, m)?;
        let kg = e.klein_gordon_residual(m).norm() / (e.d.norm() * m * m);
        let wl = w.lower();
        let scale = e.grad.iter().map(|g| g.norm()).fold(0.0, f64::max) * wl.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut sym: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                sym = sym.max((wl[nu] * e.grad[mu] - wl[mu] * e.grad[nu]).norm() / scale);
            }
        }
        let lhs = r2_dslash_derivatives(&e);
        let rhs = r2_dslash_closed_form(&e, m);
        let top = lhs.iter().map(spinor_frobenius).fold(0.0, f64::max);
        let r2 = (0..4).map(|k| spinor_frobenius(&(lhs[k] - rhs[k]))).fold(0.0, f64::max) / top;
        Ok([kg, sym, r2, dirac_residual(&e, m)])
    }).collect::<Result<_>>()?;
    let col = |k: usize| res.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(vec![
        IdentityCheck::new("klein_gordon", &col(0), KLEIN_GORDON_TOL),
        IdentityCheck::new("lorentz_symmetry", &col(1), LORENTZ_SYMMETRY_TOL),
        IdentityCheck::new("r2_dslash_derivative", &col(2), R2_DSLASH_TOL),
        IdentityCheck::new("dirac_annihilation", &col(3), DIRAC_TOL),
    ])
}

fn covariance_field() -> ExternalField {
    ExternalField::bump([0.4, 0.3, -0.2, 0.1], [0.0, 0.1, 0.0, -0.1], 1.6)
}

fn covariance_gauge() -> GaugeFunction {
    GaugeFunction { amplitude: 0.9, bump: Bump { center: [0.0, 0.2, 0.0, 0.0], radius: 1.5 } }
}

/// Pointwise gauge identity, boost covariance of `p^-` and the gauge conjugation of an
/// assembled dressed projector on a small curved grid.
pub fn covariance_suite(cfg: &SamplingConfig) -> Result<Vec<IdentityCheck>> {
    let samples = separation_samples(cfg)?;
    let m = cfg.mass;
    let field = covariance_field();
    let om = covariance_gauge();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37));
    let extra: Vec<(FourVector, f64, usize)> = samples
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let x = FourVector(std::array::from_fn(|i| if i == 0 { rng.gen_range(-0.3..0.3) } else { rng.gen_range(-1.2..1.2) }));
            (x, rng.gen_range(-MAX_TEST_RAPIDITY..=MAX_TEST_RAPIDITY), 1 + k % 3)
        })
        .collect();
    let res: Vec<[f64; 2]> = samples
        .par_iter()
        .zip(extra.par_iter())
        .map(|(s, (x, chi, axis))| {
            let pt = KernelPoint::new(*x, *x + s.z, s.epsilon);
            let pm = p_minus(&pt.w(), m)?;
            let (ox, oy) = (om.value(&pt.x), om.value(&pt.y));
            let l = lambda_a(&field, &pt.x, &pt.y);
            let lhs = pm * (phase(ox) * phase(l) * phase(-oy));
            let rhs = pm * phase(gauge_chain_lambda(ox, l, oy));
            let gauge = frob_rel(&lhs, &rhs);
            let b = boost(*chi, *axis)?;
            let moved = b.spinor * p_minus(&b.inverse().apply(&pt.w()), m)? * b.spinor_inverse();
            Ok([gauge, frob_rel(&moved, &pm)])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| res.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(vec![
        IdentityCheck::new("gauge_identity", &col(0), GAUGE_TOL),
        IdentityCheck::new("lorentz_covariance", &col(1), BOOST_TOL),
        operator_gauge_conjugation(m)?,
    ])
}

/// `e^{-i Omega} P^lambda e^{i Omega}` against the operator built from the chained phase,
/// entrywise relative to the largest entry.
pub fn operator_gauge_conjugation(m: f64) -> Result<IdentityCheck> {
    let surface = CauchySurface::new(SurfaceShape::GaussianBump { height: 0.3, width: 0.7, center: [0.0; 3] }, 0.4)?;
    let grid = Arc::new(make_grid(&surface, 1.5, 4, QuadratureRule::Midpoint)?);
    let field = covariance_field();
    let om = covariance_gauge();
    let (g1, f1) = (grid.clone(), field.clone());
    let dressed = assemble(
        &grid,
        move |i, j| {
            let pt = KernelPoint::new(g1.points[i], g1.points[j], 0.0);
            Ok(p_minus(&pt.w(), m)? * phase(lambda_a(&f1, &pt.x, &pt.y)))
        },
        DiagonalRule::Exclude,
    )?;
    let g2 = grid.clone();
    let chained = assemble(
        &grid,
        move |i, j| {
            let pt = KernelPoint::new(g2.points[i], g2.points[j], 0.0);
            let l = gauge_chain_lambda(om.value(&pt.x), lambda_a(&field, &pt.x, &pt.y), om.value(&pt.y));
            Ok(p_minus(&pt.w(), m)? * phase(l))
        },
        DiagonalRule::Exclude,
    )?;
    let n = 4 * grid.len();
    let conj = faer::Mat::from_fn(n, n, |r, c| {
        dressed.matrix[(r, c)] * to_c64(phase(om.value(&grid.points[r / 4])) * phase(-om.value(&grid.points[c / 4])))
    });
    let worst = max_abs(&(&conj - &chained.matrix)) / max_abs(&dressed.matrix);
    Ok(IdentityCheck::new("operator_gauge_conjugation", &[worst], GAUGE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize, seed: u64) -> SamplingConfig {
        SamplingConfig { samples, seed, ..SamplingConfig::default() }
    }

    #[test]
    fn identities_hold_on_a_thousand_points() {
        for c in identity_suite(&cfg(1000, 7)).unwrap() {
            assert_eq!(c.samples, 1000);
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn covariance_holds() {
        for c in covariance_suite(&cfg(1000, 3)).unwrap() {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn closed_form_detects_a_sign_error() {
        let s = SeparationSample { z: FourVector::new(0.1, 0.7, -0.4, 0.3), epsilon: 0.05 };
        let e = d_eval(&w_of(&s), 1.0).unwrap();
        let lhs = r2_dslash_derivatives(&e);
        let rhs = r2_dslash_closed_form(&e, 1.0);
        assert!(frob_rel(&lhs[1], &rhs[1]) < 1e-10);
        assert!(frob_rel(&lhs[1], &(rhs[1] * C64::new(-1.0, 0.0))) > 0.5);
    }

    #[test]
    fn violated_identity_is_reported() {
        assert!(!IdentityCheck::new("x", &[1e-12, 2e-9], 1e-9).holds);
        assert!(!IdentityCheck::new("x", &[f64::NAN], 1e-9).holds);
        assert!(IdentityCheck::new("x", &[0.0], 0.0).holds);
    }
}
