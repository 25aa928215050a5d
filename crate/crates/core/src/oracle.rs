//! Brute-force momentum-space reference for `D` and `p^-`.
//!
//! `D(w) = (2 pi)^{-3} m^{-1} int_{M_-} e^{i p w} (m^2 / p^0) d^3p` with `p^0 = -E(p)`,
//! evaluated by a radial Gauss-Legendre panel rule times a product rule on the
//! sphere whose polar axis follows `Re w`. Only `Im w` in the open past cone is
//! accepted, where the integrand decays exponentially.
//!
//! Formula: `D-momentum`, `pminus-momentum`, `mass-shell-measure`

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Deserialize;

use crate::conventions::{dirac_gammas, MASS_SHELL_ENERGY_SIGN};
use crate::error::{CauchyError, Result};
use crate::minkowski::{ComplexFourVector, FourVector, SpinorMatrix};
use crate::quadrature::gauss_legendre_on;

#[derive(Clone, Copy, Debug)]
pub struct MassShellQuadrature {
    pub m: f64,
    /// Width of the radial Gauss-Legendre panels.
    pub panel_width: f64,
    pub panel_order: usize,
    /// The radial cutoff is `tail_exponent / decay_rate`.
    pub tail_exponent: f64,
    /// Multiplier on the angular node counts.
    pub angular_density: f64,
}

impl MassShellQuadrature {
    pub fn new(m: f64) -> Self {
        Self { m, panel_width: 0.5, panel_order: 24, tail_exponent: 40.0, angular_density: 1.0 }
    }

    /// Same rule with twice as many radial nodes.
    pub fn refined(&self) -> Self {
        Self { panel_width: 0.5 * self.panel_width, ..*self }
    }

    /// Decay rate `kappa` with `|e^{ipw}| <= e^{-kappa |p|}` on the shell.
    pub fn decay_rate(w: &ComplexFourVector) -> Result<f64> {
        let im = w.im();
        let spatial = im.spatial_norm();
        let kappa = -im.0[0] - spatial;
        if !(kappa > 0.0) {
            return Err(CauchyError::Domain(format!("Im w = {:?} is not strictly past time-like", im.0)));
        }
        Ok(kappa)
    }

    /// `(D, p^-)` at `w`.
    pub fn evaluate(&self, w: &ComplexFourVector) -> Result<(C64, SpinorMatrix)> {
        let kappa = Self::decay_rate(w)?;
        let k_max = self.tail_exponent / kappa;
        let re = w.re();
        let im = w.im();
        let a = [re.0[1], re.0[2], re.0[3]];
        let b = [im.0[1], im.0[2], im.0[3]];
        let frame = Frame::new(&a, &b);
        let a_len = norm3(&a);
        let b_par = dot3(&b, &frame.e3);
        let b_perp = dot3(&b, &frame.e1);
        let w0 = w.0[0];
        let m = self.m;

        let panels = (k_max / self.panel_width).ceil() as usize;
        // returns [int e^{ipw}/E, int p^k e^{ipw}/E (k=1..3), int e^{ipw}] over one radial shell
        let shell = |p: f64| -> [C64; 5] {
            let e = (p * p + m * m).sqrt();
            let phase0 = C64::new(0.0, MASS_SHELL_ENERGY_SIGN * e) * w0;
            let stretch = p * (a_len + b.iter().map(|v| v.abs()).sum::<f64>());
            let n_theta = (self.angular_density * (0.6 * stretch + 24.0)).ceil() as usize;
            let c = p * b_perp.abs();
            let n_phi = (self.angular_density * (c + 8.0 * c.sqrt() + 16.0)).ceil() as usize;
            let (xs, ws) = gauss_legendre_on(n_theta, -1.0, 1.0);
            let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
            let mut acc = [C64::new(0.0, 0.0); 5];
            for (&ct, &wt) in xs.iter().zip(&ws) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                // -i p.w_spatial restricted to the polar part
                let polar = C64::new(p * b_par * ct, -p * a_len * ct);
                let mut ring = [C64::new(0.0, 0.0); 3];
                for j in 0..n_phi {
                    let ph = (j as f64 + 0.5) * dphi;
                    let (sp, cp) = ph.sin_cos();
                    let g = C64::new(p * b_perp * st * cp, 0.0).exp();
                    ring[0] += g;
                    ring[1] += g * (st * cp);
                    ring[2] += g * (st * sp);
                }
                let f = (polar + phase0).exp() * (wt * dphi);
                acc[0] += f * ring[0];
                let dir1 = ring[1];
                let dir2 = ring[2];
                let dir3 = ring[0] * ct;
                for k in 0..3 {
                    let comp = frame.e1[k] * dir1 + frame.e2[k] * dir2 + frame.e3[k] * dir3;
                    acc[1 + k] += f * comp * p;
                }
            }
            let jac = p * p;
            [acc[0] * (jac / e), acc[1] * (jac / e), acc[2] * (jac / e), acc[3] * (jac / e), acc[0] * jac]
        };

        let (nodes, weights) = gauss_legendre_on(self.panel_order, 0.0, 1.0);
        let totals = (0..panels)
            .into_par_iter()
            .map(|k| {
                let lo = k as f64 * self.panel_width;
                let mut t = [C64::new(0.0, 0.0); 5];
                for (x, wq) in nodes.iter().zip(&weights) {
                    let v = shell(lo + x * self.panel_width);
                    for i in 0..5 {
                        t[i] += v[i] * (wq * self.panel_width);
                    }
                }
                t
            })
            .reduce(|| [C64::new(0.0, 0.0); 5], |mut a, b| {
                for i in 0..5 {
                    a[i] += b[i];
                }
                a
            });

        let norm = 1.0 / (2.0 * std::f64::consts::PI).powi(3);
        // i_p(d^4 p) = (m^2 / p^0) d^3 p with p^0 = -E
        let d = totals[0] * (norm / m * m * m * MASS_SHELL_ENERGY_SIGN);
        let g = dirac_gammas();
        // (pslash + m) / (2m) with pslash = gamma^0 p^0 - gamma^k p^k and p^0 = -E
        let mut pm = g[0] * (totals[4] * MASS_SHELL_ENERGY_SIGN) + SpinorMatrix::identity() * (totals[0] * m);
        for k in 0..3 {
            pm -= g[k + 1] * totals[1 + k];
        }
        // the E from p^0 cancels the 1/E already folded into totals[1..4]
        let pm = pm * C64::new(norm / m * m * m * MASS_SHELL_ENERGY_SIGN / (2.0 * m), 0.0);
        Ok((d, pm))
    }

    pub fn d_quadrature(&self, w: &ComplexFourVector) -> Result<C64> {
        Ok(self.evaluate(w)?.0)
    }

    pub fn pminus_quadrature(&self, w: &ComplexFourVector) -> Result<SpinorMatrix> {
        Ok(self.evaluate(w)?.1)
    }
}

struct Frame {
    e1: [f64; 3],
    e2: [f64; 3],
    e3: [f64; 3],
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(&a);
    a.map(|v| v / n)
}

impl Frame {
    /// Orthonormal frame with `e3 || a` and `b` in the `e1, e3` plane.
    fn new(a: &[f64; 3], b: &[f64; 3]) -> Frame {
        let e3 = if norm3(a) > 1e-14 {
            unit(*a)
        } else if norm3(b) > 1e-14 {
            unit(*b)
        } else {
            [0.0, 0.0, 1.0]
        };
        let bp = std::array::from_fn(|k| b[k] - dot3(b, &e3) * e3[k]);
        let e1 = if norm3(&bp) > 1e-12 * (1.0 + norm3(b)) {
            unit(bp)
        } else {
            let t = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            unit(cross(&cross(&e3, &t), &e3))
        };
        let e2 = cross(&e3, &e1);
        Frame { e1, e2, e3 }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WPoint {
    pub z: [f64; 4],
    pub epsilon: f64,
    pub u: [f64; 4],
}

impl WPoint {
    pub fn w(&self) -> ComplexFourVector {
        FourVector(self.z).shifted(self.epsilon, &FourVector(self.u))
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WSet {
    pub version: u32,
    pub mass: f64,
    pub points: Vec<WPoint>,
}

/// The versioned validation set shipped with the crate.
pub fn validation_wset() -> WSet {
    serde_json::from_str(include_str!("../data/wset_v1.json")).expect("bundled w-set parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{d_eval, p_minus};
    use crate::minkowski::{dirac_adjoint, spinor_frobenius};

    #[test]
    fn euclidean_time_point_matches_bessel_formula() {
        let q = MassShellQuadrature::new(1.0);
        let t = 2.0;
        let w = FourVector::new(0.0, 0.0, 0.0, 0.0).shifted(t, &FourVector::new(-1.0, 0.0, 0.0, 0.0));
        let d = q.d_quadrature(&w).unwrap();
        let k1 = crate::bessel::k1(C64::new(t, 0.0)).unwrap();
        let expect = -k1 / t / (2.0 * std::f64::consts::PI.powi(2));
        assert!((d - expect).norm() <= 1e-7 * expect.norm(), "{d} vs {expect}");
        // isotropy removes the spatial gammas
        let p = q.pminus_quadrature(&w).unwrap();
        let beta = dirac_gammas()[0];
        assert!(spinor_frobenius(&(p * beta - beta * p)) <= 1e-10 * spinor_frobenius(&p));
    }

    #[test]
    fn sign_agrees_with_analytic_kernel() {
        let q = MassShellQuadrature::new(1.0);
        let w = FourVector::new(0.1, 0.7, -0.2, 0.3).shifted(0.6, &FourVector::new(-1.0, 0.1, 0.0, 0.0));
        let a = d_eval(&w, 1.0).unwrap().d;
        let b = q.d_quadrature(&w).unwrap();
        assert!((a - b).norm() <= 1e-6 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn rotation_invariance() {
        let q = MassShellQuadrature::new(1.0);
        let u = FourVector::new(-1.0, 0.0, 0.0, 0.0);
        let a = q.d_quadrature(&FourVector::new(0.0, 0.8, 0.0, 0.0).shifted(0.5, &u)).unwrap();
        let b = q.d_quadrature(&FourVector::new(0.0, 0.0, 0.48, 0.64).shifted(0.5, &u)).unwrap();
        assert!((a - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn hermiticity_reproduced() {
        let q = MassShellQuadrature::new(1.0);
        let w = FourVector::new(0.1, 0.7, -0.2, 0.3).shifted(0.6, &FourVector::new(-1.0, 0.1, 0.0, 0.0));
        // -w* has the same past-pointing imaginary part
        let lhs = q.pminus_quadrature(&(-w.conj())).unwrap();
        let rhs = dirac_adjoint(&q.pminus_quadrature(&w).unwrap());
        assert!(spinor_frobenius(&(lhs - rhs)) <= 1e-9 * spinor_frobenius(&rhs));
    }

    #[test]
    fn radial_refinement_is_converged() {
        let q = MassShellQuadrature::new(1.0);
        let w = validation_wset().points[3].w();
        let (d1, p1) = q.evaluate(&w).unwrap();
        let (d2, p2) = q.refined().evaluate(&w).unwrap();
        assert!((d1 - d2).norm() <= 1e-9 * d1.norm());
        assert!(spinor_frobenius(&(p1 - p2)) <= 1e-9 * spinor_frobenius(&p1));
    }

    #[test]
    fn rejects_non_past_imaginary_part() {
        let q = MassShellQuadrature::new(1.0);
        let w = FourVector::new(0.0, 1.0, 0.0, 0.0).shifted(0.5, &FourVector::new(1.0, 0.0, 0.0, 0.0));
        assert!(q.d_quadrature(&w).is_err());
        assert!(q.d_quadrature(&FourVector::new(0.0, 1.0, 0.0, 0.0).to_complex()).is_err());
    }

    #[test]
    fn analytic_pminus_matches_on_one_point() {
        let q = MassShellQuadrature::new(1.0);
        let w = validation_wset().points[0].w();
        let a = p_minus(&w, 1.0).unwrap();
        let b = q.pminus_quadrature(&w).unwrap();
        assert!(spinor_frobenius(&(a - b)) <= 1e-6 * spinor_frobenius(&a));
    }
}
