//! Graph Cauchy surfaces `x^0 = t(x)`, their normals and spinor weights,
//! tensor quadrature grids and one-parameter families of surfaces.
//!
//! Formula: `graph-embedding`, `unit-normal`, `gamma-weight`, `normal-velocity`

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::conventions::dirac_gammas;
use crate::error::{CauchyError, Result};
use crate::minkowski::{slash_real, FourVector, SpinorMatrix};
use crate::quadrature::gauss_legendre_on;

/// `exp(-1/(1-q))` for `q < 1`, else 0, and its first three derivatives in `q`.
pub(crate) fn bump_q(q: f64) -> [f64; 4] {
    if q >= 1.0 {
        return [0.0; 4];
    }
    let a = 1.0 / (1.0 - q);
    let p = (-a).exp();
    let a2 = a * a;
    let a3 = a2 * a;
    let a4 = a2 * a2;
    [p, -p * a2, p * (a4 - 2.0 * a3), p * (-a4 * a2 + 6.0 * a4 * a - 6.0 * a4)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceShape {
    /// `t = height`.
    Flat { height: f64 },
    /// `t = e (a . x) phi(|x|^2 / R^2)`: a tilt flattened outside radius `R`.
    Tilted { slope: [f64; 3], radius: f64 },
    /// `t = h exp(-|x - c|^2 / (2 sigma^2))`.
    GaussianBump { height: f64, width: f64, center: [f64; 3] },
}

impl SurfaceShape {
    /// Value, gradient and Hessian of the graph function.
    pub fn jet(&self, x: &[f64; 3]) -> (f64, [f64; 3], Matrix3<f64>) {
        match *self {
            SurfaceShape::Flat { height } => (height, [0.0; 3], Matrix3::zeros()),
            SurfaceShape::Tilted { slope, radius } => {
                let r2 = radius * radius;
                let q = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / r2;
                let [p, p1, p2, _] = bump_q(q);
                let e = std::f64::consts::E;
                let b = e * p;
                let bj: [f64; 3] = std::array::from_fn(|j| e * p1 * 2.0 * x[j] / r2);
                let ax: f64 = (0..3).map(|j| slope[j] * x[j]).sum();
                let grad = std::array::from_fn(|j| slope[j] * b + ax * bj[j]);
                let hess = Matrix3::from_fn(|j, k| {
                    let delta = if j == k { 1.0 } else { 0.0 };
                    let bjk = e * (p2 * 4.0 * x[j] * x[k] / (r2 * r2) + p1 * 2.0 * delta / r2);
                    slope[j] * bj[k] + slope[k] * bj[j] + ax * bjk
                });
                (ax * b, grad, hess)
            }
            SurfaceShape::GaussianBump { height, width, center } => {
                let s2 = width * width;
                let d: [f64; 3] = std::array::from_fn(|j| x[j] - center[j]);
                let t = height * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * s2)).exp();
                let grad = std::array::from_fn(|j| -t * d[j] / s2);
                let hess = Matrix3::from_fn(|j, k| {
                    let delta = if j == k { 1.0 } else { 0.0 };
                    t * (d[j] * d[k] / (s2 * s2) - delta / s2)
                });
                (t, grad, hess)
            }
        }
    }

    pub fn scaled(&self, s: f64) -> SurfaceShape {
        match *self {
            SurfaceShape::Flat { height } => SurfaceShape::Flat { height: s * height },
            SurfaceShape::Tilted { slope, radius } => SurfaceShape::Tilted { slope: slope.map(|a| s * a), radius },
            SurfaceShape::GaussianBump { height, width, center } => {
                SurfaceShape::GaussianBump { height: s * height, width, center }
            }
        }
    }

    /// Ball outside which the surface is flat up to round-off: (center, radius).
    fn curved_region(&self) -> ([f64; 3], f64) {
        match *self {
            SurfaceShape::Flat { .. } => ([0.0; 3], 0.0),
            SurfaceShape::Tilted { radius, .. } => ([0.0; 3], radius),
            SurfaceShape::GaussianBump { width, center, .. } => (center, 9.0 * width),
        }
    }

    /// Largest gradient norm over a dense sample of the curved region.
    pub fn sampled_max_gradient(&self, per_axis: usize) -> f64 {
        let (c, r) = self.curved_region();
        if r == 0.0 {
            return 0.0;
        }
        let mut best = 0.0f64;
        for i in 0..per_axis {
            for j in 0..per_axis {
                for k in 0..per_axis {
                    let at = |n: usize, cc: f64| cc - r + 2.0 * r * (n as f64 + 0.5) / per_axis as f64;
                    let x = [at(i, c[0]), at(j, c[1]), at(k, c[2])];
                    let g = self.jet(&x).1;
                    best = best.max((g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt());
                }
            }
        }
        best
    }
}

/// A graph surface together with its declared uniform gradient bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchySurface {
    pub shape: SurfaceShape,
    pub v_max: f64,
}

/// Geometry of a surface at one spatial point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub point: FourVector,
    pub grad: [f64; 3],
    pub hess: Matrix3<f64>,
    /// Future unit normal `n^mu`.
    pub normal: FourVector,
    /// `d_j n^mu`, spatial derivatives of the normal extended independently of `x^0`.
    pub normal_jacobian: [[f64; 4]; 3],
}

impl CauchySurface {
    pub fn new(shape: SurfaceShape, v_max: f64) -> Result<Self> {
        if !(v_max > 0.0 && v_max < 1.0) {
            return Err(CauchyError::Config(format!("v_max = {v_max} must lie in (0, 1)")));
        }
        let g = shape.sampled_max_gradient(41);
        if g > v_max {
            return Err(CauchyError::Config(format!("sampled gradient {g:.4} exceeds v_max = {v_max}")));
        }
        Ok(Self { shape, v_max })
    }

    pub fn flat() -> Self {
        Self { shape: SurfaceShape::Flat { height: 0.0 }, v_max: 0.5 }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.shape, SurfaceShape::Flat { .. })
    }

    pub fn embed(&self, x: &[f64; 3]) -> FourVector {
        FourVector([self.shape.jet(x).0, x[0], x[1], x[2]])
    }

    pub fn normal(&self, x: &[f64; 3]) -> FourVector {
        self.geometry(x).normal
    }

    pub fn geometry(&self, x: &[f64; 3]) -> SurfacePoint {
        let (t, grad, hess) = self.shape.jet(x);
        let g2 = grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2];
        let n0 = 1.0 / (1.0 - g2).sqrt();
        let normal = FourVector([n0, grad[0] * n0, grad[1] * n0, grad[2] * n0]);
        let n0_cubed = n0 * n0 * n0;
        let normal_jacobian = std::array::from_fn(|j| {
            let dn0 = n0_cubed * (0..3).map(|k| grad[k] * hess[(k, j)]).sum::<f64>();
            [dn0, hess[(0, j)] * n0 + grad[0] * dn0, hess[(1, j)] * n0 + grad[1] * dn0, hess[(2, j)] * n0 + grad[2] * dn0]
        });
        SurfacePoint { point: FourVector([t, x[0], x[1], x[2]]), grad, hess, normal, normal_jacobian }
    }

    /// Tangent vectors `(d_k t, e_k)`.
    pub fn tangents(&self, x: &[f64; 3]) -> [FourVector; 3] {
        let g = self.shape.jet(x).1;
        std::array::from_fn(|k| {
            let mut v = [0.0; 4];
            v[0] = g[k];
            v[k + 1] = 1.0;
            FourVector(v)
        })
    }

    /// `Gamma = gamma^0 - gamma^k d_k t`.
    pub fn gamma_weight(&self, x: &[f64; 3]) -> SpinorMatrix {
        let g = self.shape.jet(x).1;
        let gam = dirac_gammas();
        gam[0] - (gam[1] * C64::new(g[0], 0.0) + gam[2] * C64::new(g[1], 0.0) + gam[3] * C64::new(g[2], 0.0))
    }

    /// `Gamma` rebuilt as `sqrt(1 - |grad t|^2) nslash`.
    pub fn gamma_weight_from_normal(&self, x: &[f64; 3]) -> SpinorMatrix {
        let g = self.shape.jet(x).1;
        let s = (1.0 - g[0] * g[0] - g[1] * g[1] - g[2] * g[2]).sqrt();
        slash_real(&self.normal(x)) * C64::new(s, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Midpoint,
    Gauss,
}

/// Tensor grid on `[-L, L]^3` lifted onto a surface.
#[derive(Clone, Debug)]
pub struct SurfaceGrid {
    pub surface: CauchySurface,
    pub half_width: f64,
    pub per_axis: usize,
    pub rule: QuadratureRule,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub points: Vec<FourVector>,
    pub gammas: Vec<SpinorMatrix>,
}

impl SurfaceGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing `2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.per_axis as f64
    }

    /// Linear index of node `(i, j, k)`.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.per_axis + j) * self.per_axis + k
    }

    pub fn require_margin(&self, support_radius: f64, margin: f64) -> Result<()> {
        if self.half_width < support_radius + margin {
            return Err(CauchyError::Config(format!(
                "half width {} below support radius {support_radius} + margin {margin}",
                self.half_width
            )));
        }
        Ok(())
    }
}

pub fn make_grid(surface: &CauchySurface, half_width: f64, per_axis: usize, rule: QuadratureRule) -> Result<SurfaceGrid> {
    if per_axis < 4 {
        return Err(CauchyError::Config(format!("need at least 4 nodes per axis, got {per_axis}")));
    }
    if !(half_width > 0.0) {
        return Err(CauchyError::Config(format!("half width {half_width} must be positive")));
    }
    let (x1, w1) = match rule {
        QuadratureRule::Midpoint => {
            let h = 2.0 * half_width / per_axis as f64;
            ((0..per_axis).map(|i| -half_width + (i as f64 + 0.5) * h).collect(), vec![h; per_axis])
        }
        QuadratureRule::Gauss => gauss_legendre_on(per_axis, -half_width, half_width),
    };
    let n3 = per_axis.pow(3);
    let mut nodes = Vec::with_capacity(n3);
    let mut weights = Vec::with_capacity(n3);
    for i in 0..per_axis {
        for j in 0..per_axis {
            for k in 0..per_axis {
                nodes.push([x1[i], x1[j], x1[k]]);
                weights.push(w1[i] * w1[j] * w1[k]);
            }
        }
    }
    let points = nodes.iter().map(|x| surface.embed(x)).collect();
    let gammas = nodes.iter().map(|x| surface.gamma_weight(x)).collect();
    Ok(SurfaceGrid { surface: surface.clone(), half_width, per_axis, rule, nodes, weights, points, gammas })
}

/// One-parameter families `s -> Sigma_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceFamily {
    /// Every slice is the same surface.
    Static { surface: CauchySurface },
    /// Flat slices `t(x, s) = s`.
    FlatRising,
    /// `t(x, s) = s t_shape(x)`, interpolating flat (s = 0) to the shape (s = 1).
    Scale { shape: SurfaceShape, v_max: f64 },
}

impl SurfaceFamily {
    pub fn slice(&self, s: f64) -> CauchySurface {
        match self {
            SurfaceFamily::Static { surface } => surface.clone(),
            SurfaceFamily::FlatRising => CauchySurface { shape: SurfaceShape::Flat { height: s }, v_max: 0.5 },
            SurfaceFamily::Scale { shape, v_max } => CauchySurface { shape: shape.scaled(s), v_max: *v_max },
        }
    }

    /// `d t / d s` at fixed spatial point.
    pub fn time_derivative(&self, x: &[f64; 3], _s: f64) -> f64 {
        match self {
            SurfaceFamily::Static { .. } => 0.0,
            SurfaceFamily::FlatRising => 1.0,
            SurfaceFamily::Scale { shape, .. } => shape.jet(x).0,
        }
    }

    /// `d (grad t) / d s`.
    fn gradient_derivative(&self, x: &[f64; 3], _s: f64) -> [f64; 3] {
        match self {
            SurfaceFamily::Scale { shape, .. } => shape.jet(x).1,
            _ => [0.0; 3],
        }
    }

    /// Normal speed `v` and normal `n` of the slice at `x`.
    pub fn velocity(&self, x: &[f64; 3], s: f64) -> (f64, FourVector) {
        let n = self.slice(s).normal(x);
        (n.0[0] * self.time_derivative(x, s), n)
    }

    /// `d n^mu / d s` at fixed spatial point.
    pub fn normal_rate(&self, x: &[f64; 3], s: f64) -> FourVector {
        let g = self.slice(s).shape.jet(x).1;
        let dg = self.gradient_derivative(x, s);
        let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        let n0 = 1.0 / (1.0 - g2).sqrt();
        let gdg = g[0] * dg[0] + g[1] * dg[1] + g[2] * dg[2];
        let dn0 = n0 * n0 * n0 * gdg;
        FourVector([dn0, dg[0] * n0 + g[0] * dn0, dg[1] * n0 + g[1] * dn0, dg[2] * n0 + g[2] * dn0])
    }
}
