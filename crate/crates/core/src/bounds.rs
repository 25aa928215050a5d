//! Sampled checks of the upper and lower bounds on `K_1`, `D`, its derivatives and
//! `p^-`, and of the elementary inequalities relating `r(w)`, `r(z)` and `|z|`.
//!
//! An upper bound `|F| <= C g` is checked by fitting `C = max |F| / g` over the sample;
//! a lower bound `|F| >= c g` by `c = min |F| / g`. Bounds with an explicit constant
//! are checked with that constant.
//!
//! Formula: `bound-ww-d`, `bound-d`, `bound-r2-grad-d`, `bound-grad-d`, `bound-w-grad-d`,
//! `bound-eps-u-grad-d`, `bound-grad-r2-grad-d`, `bound-p-minus`, `lower-p-minus`,
//! `bound-k1`, `bound-k1-derivative`, `lower-k1`, `r-inequalities`, `r-vs-z`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::f_and_derivatives;
use crate::conventions::DEFAULT_U;
use crate::error::{CauchyError, Result};
use crate::kernels::{d_eval, p_minus};
use crate::minkowski::{minkowski_dot, radius, spinor_frobenius, FourVector, C64};

/// Relative slack allowed for bounds with explicit constants.
pub const EXACT_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `|F| <= C g` with `C` fitted.
    Upper,
    /// `|F| >= c g` with `c` fitted and required positive.
    Lower,
    /// Inequality with explicit constants.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub kind: BoundKind,
    pub samples: usize,
    /// Fitted constant, or the worst ratio for explicit inequalities.
    pub constant: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn fitted(name: &str, kind: BoundKind, ratios: &[f64]) -> Self {
        let finite = ratios.iter().all(|r| r.is_finite());
        let (constant, holds) = match kind {
            BoundKind::Upper => {
                let c = ratios.iter().copied().fold(0.0, f64::max);
                (c, finite && c.is_finite())
            }
            BoundKind::Lower => {
                let c = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                (c, finite && c > 0.0)
            }
            // ratios are lhs / rhs and must not exceed one
            BoundKind::Explicit => {
                let c = ratios.iter().copied().fold(0.0, f64::max);
                (c, finite && c <= 1.0 + EXACT_SLACK)
            }
        };
        Self { name: name.to_string(), kind, samples: ratios.len(), constant, holds }
    }
}

/// A space-like separation `z` with `|z^0| <= v_max |z_vec|` and a regularization `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationSample {
    pub z: FourVector,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    pub v_max: f64,
    /// Range of `|z_vec|`, sampled log-uniformly.
    pub z_range: (f64, f64),
    /// Range of nonzero `eps`, sampled log-uniformly; a quarter of the samples use `eps = 0`.
    pub eps_range: (f64, f64),
    pub mass: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { samples: 10_000, seed: 1, v_max: 0.5, z_range: (0.05, 5.0), eps_range: (1e-6, 1.0), mass: 1.0 }
    }
}

impl SamplingConfig {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(CauchyError::Config("bound checks need at least one sample".into()));
        }
        if !(self.v_max > 0.0 && self.v_max < 1.0) {
            return Err(CauchyError::Config(format!("v_max = {} must lie in (0, 1)", self.v_max)));
        }
        if !(self.z_range.0 > 0.0 && self.z_range.1 > self.z_range.0 && self.eps_range.0 > 0.0 && self.eps_range.1 >= self.eps_range.0) {
            return Err(CauchyError::Config("sampling ranges must be positive and increasing".into()));
        }
        if !(self.mass > 0.0) {
            return Err(CauchyError::Config("mass must be positive".into()));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, a: f64, b: f64) -> f64 {
    (a.ln() + rng.gen::<f64>() * (b.ln() - a.ln())).exp()
}

pub fn separation_samples(cfg: &SamplingConfig) -> Result<Vec<SeparationSample>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.samples)
        .map(|k| {
            let len = log_uniform(&mut rng, cfg.z_range.0, cfg.z_range.1);
            let cos_t: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            let t = cfg.v_max * len * rng.gen_range(-1.0..1.0);
            let z = FourVector([t, len * sin_t * phi.cos(), len * sin_t * phi.sin(), len * cos_t]);
            let epsilon = if k % 4 == 0 { 0.0 } else { log_uniform(&mut rng, cfg.eps_range.0, cfg.eps_range.1) };
            SeparationSample { z, epsilon }
        })
        .collect())
}

fn max_abs(v: impl IntoIterator<Item = C64>) -> f64 {
    v.into_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Ratios of the kernel quantities to their decay profiles at one sample, in the order of
/// [`KERNEL_BOUND_NAMES`].
fn kernel_ratios(s: &SeparationSample, m: f64, v_max: f64) -> Result<[f64; 8]> {
    let u = FourVector(DEFAULT_U);
    let w = s.z.shifted(s.epsilon, &u);
    let e = d_eval(&w, m)?;
    let zl = s.z.spatial_norm();
    let decay = (-0.5 * m * (1.0 - v_max * v_max).sqrt() * zl).exp();
    let wl = w.lower();
    let r2 = e.r * e.r;
    let eps = s.epsilon;
    let ww_d = max_abs((0..16).map(|k| w.0[k / 4] * w.0[k % 4] * e.d));
    let r2_grad = max_abs(e.grad.iter().map(|g| *g * r2));
    let grad = max_abs(e.grad.iter().copied());
    let w_grad = max_abs((0..16).map(|k| w.0[k / 4] * e.grad[k % 4]));
    let eps_u_grad = max_abs((0..16).map(|k| e.grad[k % 4] * (eps * u.0[k / 4])));
    let grad_r2_grad = max_abs((0..16).map(|k| {
        let (mu, nu) = (k / 4, k % 4);
        e.grad[mu] * wl[nu] * -2.0 + e.hess[(mu, nu)] * r2
    }));
    let p = spinor_frobenius(&p_minus(&w, m)?);
    Ok([
        ww_d / decay,
        e.d.norm() / (decay / zl.powi(2)),
        r2_grad / (decay / zl),
        grad / (decay / zl.powi(3).max(eps.powi(3))),
        w_grad / (decay / zl.powi(2).max(eps.powi(2))),
        // eps = 0 gives 0 / 0 here; that case is covered by the grad bound
        if eps == 0.0 { 0.0 } else { eps_u_grad / (eps.sqrt() * decay / zl.powf(2.5)) },
        grad_r2_grad / (decay / zl.powi(2)),
        p / (decay / zl.powi(3)),
    ])
}

pub const KERNEL_BOUND_NAMES: [&str; 8] =
    ["ww_d", "d", "r2_grad_d", "grad_d", "w_grad_d", "eps_u_grad_d", "grad_r2_grad_d", "p_minus"];

/// Fitted constants of the upper bounds on `D`, its derivatives and `p^-`.
pub fn kernel_upper_bounds(samples: &[SeparationSample], m: f64, v_max: f64) -> Result<Vec<BoundCheck>> {
    let ratios: Vec<[f64; 8]> = samples.par_iter().map(|s| kernel_ratios(s, m, v_max)).collect::<Result<_>>()?;
    Ok(KERNEL_BOUND_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| BoundCheck::fitted(name, BoundKind::Upper, &ratios.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect())
}

/// `|p^-(z)| >= c e^{-m |z_vec|} / |z_vec|^3` at `eps = 0`.
pub fn p_minus_lower_bound(samples: &[SeparationSample], m: f64) -> Result<BoundCheck> {
    let ratios: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            let zl = s.z.spatial_norm();
            Ok(spinor_frobenius(&p_minus(&s.z.to_complex(), m)?) * zl.powi(3) * (m * zl).exp())
        })
        .collect::<Result<_>>()?;
    Ok(BoundCheck::fitted("p_minus_lower", BoundKind::Lower, &ratios))
}

/// The chains `sqrt(1 - v^2)|z_vec| <= r(z) <= |z_vec| <= |z| <= sqrt(1 + v^2)|z_vec|`,
/// `r(z) v eps sqrt(u.u) <= sqrt(-z.z + eps^2 u.u) <= Re r(w) <= |r(w)|` and
/// `1 <= |w|/|r(w)| <= (|u|/sqrt(u.u)) |z|/r(z)`, as worst ratios `lhs / rhs`.
pub fn separation_inequalities(samples: &[SeparationSample], v_max: f64) -> Result<Vec<BoundCheck>> {
    let u = FourVector(DEFAULT_U);
    let uu = u.dot(&u);
    let rows: Vec<[f64; 3]> = samples
        .iter()
        .map(|s| {
            let z = s.z;
            let zl = z.spatial_norm();
            let zz = z.euclidean_norm();
            let rz = (-z.dot(&z)).sqrt();
            let vs = [
                (1.0 - v_max * v_max).sqrt() * zl / rz,
                rz / zl,
                zl / zz,
                zz / ((1.0 + v_max * v_max).sqrt() * zl),
            ];
            let along = vs.iter().copied().fold(0.0, f64::max);
            if s.epsilon == 0.0 {
                return Ok([along, 0.0, 0.0]);
            }
            let w = z.shifted(s.epsilon, &u);
            let rw = radius(&w)?;
            let mid = (-z.dot(&z) + s.epsilon.powi(2) * uu).sqrt();
            let r1 = [rz.max(s.epsilon * uu.sqrt()) / mid, mid / rw.re, rw.re / rw.norm()].into_iter().fold(0.0, f64::max);
            let ratio = w.euclidean_norm() / rw.norm();
            let r2 = (1.0 / ratio).max(ratio / (u.euclidean_norm() / uu.sqrt() * zz / rz));
            debug_assert!(minkowski_dot(&w, &w).re < 0.0);
            Ok([along, r1, r2])
        })
        .collect::<Result<_>>()?;
    Ok(["r_vs_z", "r_of_w_chain", "w_over_r_of_w"]
        .iter()
        .enumerate()
        .map(|(k, name)| BoundCheck::fitted(name, BoundKind::Explicit, &rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect())
}

/// Complex `xi` with `|xi|` log-uniform in `[a, b]` and `|arg xi| <= max_arg`.
pub fn bessel_samples(count: usize, seed: u64, modulus: (f64, f64), max_arg: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| C64::from_polar(log_uniform(&mut rng, modulus.0, modulus.1), rng.gen_range(-max_arg..max_arg))).collect()
}

/// `|K_1(xi)| <= e^{-Re xi}(1/|xi| + sqrt(pi/(2|xi|)))` and
/// `|d(K_1(xi)/xi)| <= e^{-Re xi}(2^{3/2}/|xi|^3 + 2 sqrt(pi)|xi|^{-3/2})`, plus the
/// lower bounds `K_1(xi) >= e^{-xi}/xi`, `-d(K_1(xi)/xi) >= 2 e^{-xi}/xi^3` on the
/// real moduli of the samples.
pub fn bessel_bounds(xis: &[C64]) -> Result<Vec<BoundCheck>> {
    let pi = std::f64::consts::PI;
    let rows: Vec<[f64; 4]> = xis
        .par_iter()
        .map(|&xi| {
            let b = f_and_derivatives(xi)?;
            let a = xi.norm();
            let damp = (-xi.re).exp();
            let up_k1 = b.value.norm() / (damp * (1.0 / a + (pi / (2.0 * a)).sqrt()));
            let up_df = b.df.norm() / (damp * (2f64.powf(1.5) / a.powi(3) + 2.0 * pi.sqrt() * a.powf(-1.5)));
            let real = f_and_derivatives(C64::new(a, 0.0))?;
            let low_k1 = ((-a).exp() / a) / real.value.re;
            let low_df = (2.0 * (-a).exp() / a.powi(3)) / (-real.df.re);
            Ok([up_k1, up_df, low_k1, low_df])
        })
        .collect::<Result<_>>()?;
    Ok(["k1_upper", "k1_derivative_upper", "k1_lower", "k1_derivative_lower"]
        .iter()
        .enumerate()
        .map(|(k, name)| BoundCheck::fitted(name, BoundKind::Explicit, &rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect())
}

/// Every bound check on one seeded sample.
pub fn bound_suite(cfg: &SamplingConfig) -> Result<Vec<BoundCheck>> {
    let samples = separation_samples(cfg)?;
    let mut out = kernel_upper_bounds(&samples, cfg.mass, cfg.v_max)?;
    out.push(p_minus_lower_bound(&samples, cfg.mass)?);
    out.extend(separation_inequalities(&samples, cfg.v_max)?);
    out.extend(bessel_bounds(&bessel_samples(cfg.samples, cfg.seed, (0.05, 50.0), 0.95 * std::f64::consts::PI))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SamplingConfig {
        SamplingConfig { samples: 400, ..SamplingConfig::default() }
    }

    #[test]
    fn samples_are_spacelike_and_admissible() {
        let cfg = small();
        for s in separation_samples(&cfg).unwrap() {
            assert!(s.z.0[0].abs() <= cfg.v_max * s.z.spatial_norm());
            assert!(s.z.dot(&s.z) < 0.0);
        }
    }

    #[test]
    fn suite_holds_on_a_small_sample() {
        for c in bound_suite(&small()).unwrap() {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        let cfg = SamplingConfig { samples: 0, ..SamplingConfig::default() };
        assert!(matches!(bound_suite(&cfg), Err(CauchyError::Config(_))));
    }

    #[test]
    fn lower_bound_constant_is_positive_and_tight_at_large_distance() {
        let cfg = small();
        let c = p_minus_lower_bound(&separation_samples(&cfg).unwrap(), 1.0).unwrap();
        assert!(c.constant > 0.0 && c.constant < 1.0);
    }

    #[test]
    fn k1_lower_bound_example() {
        let b = f_and_derivatives(C64::new(2.0, 0.0)).unwrap();
        assert!(b.value.re >= (-2.0f64).exp() / 2.0);
        let b = f_and_derivatives(C64::new(1.5, 0.0)).unwrap();
        assert!(-b.df.re >= 2.0 * (-1.5f64).exp() / 1.5f64.powi(3));
    }

    #[test]
    fn a_violated_bound_is_reported() {
        let c = BoundCheck::fitted("x", BoundKind::Explicit, &[0.5, 1.2]);
        assert!(!c.holds);
        let c = BoundCheck::fitted("x", BoundKind::Lower, &[0.0, 1.0]);
        assert!(!c.holds);
        let c = BoundCheck::fitted("x", BoundKind::Upper, &[1.0, f64::INFINITY]);
        assert!(!c.holds);
    }
}
