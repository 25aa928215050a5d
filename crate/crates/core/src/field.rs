//! Compactly supported potentials built from smooth bumps, their field
//! strength, the electric field relative to a normal, and gauge functions.
//!
//! All potentials are stored with lower indices `A_mu`.
//!
//! Formula: `field-strength`, `electric-field`, `gauge-shift`, `tangential-components`

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{CauchyError, Result};
use crate::minkowski::FourVector;
use crate::surface::{bump_q, CauchySurface, SurfaceGrid};

pub type Jacobian = [[f64; 4]; 4];
pub type SecondDerivatives = [[[f64; 4]; 4]; 4];

/// `phi(|x - c| / R)` with `phi(s) = exp(-1/(1-s^2))` on the Euclidean ball in R^4.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 4],
    pub radius: f64,
}

impl Bump {
    fn q_and_grad(&self, x: &FourVector) -> (f64, [f64; 4]) {
        let r2 = self.radius * self.radius;
        let d: [f64; 4] = std::array::from_fn(|k| x.0[k] - self.center[k]);
        let q = d.iter().map(|v| v * v).sum::<f64>() / r2;
        (q, d.map(|v| 2.0 * v / r2))
    }

    pub fn contains(&self, x: &FourVector) -> bool {
        self.q_and_grad(x).0 < 1.0
    }

    pub fn value(&self, x: &FourVector) -> f64 {
        bump_q(self.q_and_grad(x).0)[0]
    }

    pub fn gradient(&self, x: &FourVector) -> [f64; 4] {
        let (q, dq) = self.q_and_grad(x);
        let p1 = bump_q(q)[1];
        dq.map(|v| p1 * v)
    }

    pub fn hessian(&self, x: &FourVector) -> Jacobian {
        let (q, dq) = self.q_and_grad(x);
        let [_, p1, p2, _] = bump_q(q);
        let ddq = 2.0 / (self.radius * self.radius);
        std::array::from_fn(|a| std::array::from_fn(|b| p2 * dq[a] * dq[b] + if a == b { p1 * ddq } else { 0.0 }))
    }

    pub fn third(&self, x: &FourVector) -> SecondDerivatives {
        let (q, dq) = self.q_and_grad(x);
        let [_, _, p2, p3] = bump_q(q);
        let ddq = 2.0 / (self.radius * self.radius);
        let delta = |a: usize, b: usize| if a == b { ddq } else { 0.0 };
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                std::array::from_fn(|c| {
                    p3 * dq[a] * dq[b] * dq[c] + p2 * (delta(a, c) * dq[b] + delta(b, c) * dq[a] + delta(a, b) * dq[c])
                })
            })
        })
    }
}

/// Scalar gauge function `Omega = amplitude * bump`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeFunction {
    pub amplitude: f64,
    pub bump: Bump,
}

impl GaugeFunction {
    pub fn value(&self, x: &FourVector) -> f64 {
        self.amplitude * self.bump.value(x)
    }

    /// `d_mu Omega`.
    pub fn gradient(&self, x: &FourVector) -> [f64; 4] {
        self.bump.gradient(x).map(|v| self.amplitude * v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldComponent {
    /// `A_mu = c_mu phi`.
    Bump { amplitude: [f64; 4], bump: Bump },
    /// `A_mu = d_mu Omega`, a pure gauge.
    GaugeGradient { gauge: GaugeFunction },
    /// `A_mu = a phi n_mu(x)`, proportional to the lowered unit normal of a surface.
    Conormal { amplitude: f64, bump: Bump, surface: CauchySurface },
}

impl FieldComponent {
    fn bump(&self) -> &Bump {
        match self {
            FieldComponent::Bump { bump, .. } | FieldComponent::Conormal { bump, .. } => bump,
            FieldComponent::GaugeGradient { gauge } => &gauge.bump,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    pub components: Vec<FieldComponent>,
}

fn spatial(x: &FourVector) -> [f64; 3] {
    [x.0[1], x.0[2], x.0[3]]
}

impl ExternalField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn bump(amplitude: [f64; 4], center: [f64; 4], radius: f64) -> Self {
        Self { components: vec![FieldComponent::Bump { amplitude, bump: Bump { center, radius } }] }
    }

    pub fn with(mut self, c: FieldComponent) -> Self {
        self.components.push(c);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| match c {
            FieldComponent::Bump { amplitude, .. } => amplitude.iter().all(|a| *a == 0.0),
            FieldComponent::GaugeGradient { gauge } => gauge.amplitude == 0.0,
            FieldComponent::Conormal { amplitude, .. } => *amplitude == 0.0,
        })
    }

    /// Radius of a ball about the spatial origin that contains the spatial projection of the support.
    pub fn spatial_support_radius(&self) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let b = c.bump();
                (b.center[1].powi(2) + b.center[2].powi(2) + b.center[3].powi(2)).sqrt() + b.radius
            })
            .fold(0.0, f64::max)
    }

    pub fn in_support(&self, x: &FourVector) -> bool {
        self.components.iter().any(|c| c.bump().contains(x))
    }

    pub fn potential(&self, x: &FourVector) -> [f64; 4] {
        let mut a = [0.0; 4];
        for c in &self.components {
            if !c.bump().contains(x) {
                continue;
            }
            match c {
                FieldComponent::Bump { amplitude, bump } => {
                    let p = bump.value(x);
                    (0..4).for_each(|k| a[k] += amplitude[k] * p);
                }
                FieldComponent::GaugeGradient { gauge } => {
                    let g = gauge.gradient(x);
                    (0..4).for_each(|k| a[k] += g[k]);
                }
                FieldComponent::Conormal { amplitude, bump, surface } => {
                    let n = FourVector(surface.normal(&spatial(x)).lower());
                    let p = amplitude * bump.value(x);
                    (0..4).for_each(|k| a[k] += p * n.0[k]);
                }
            }
        }
        a
    }

    /// `J[mu][nu] = d_mu A_nu`.
    pub fn jacobian(&self, x: &FourVector) -> Jacobian {
        let mut j = [[0.0; 4]; 4];
        for c in &self.components {
            if !c.bump().contains(x) {
                continue;
            }
            match c {
                FieldComponent::Bump { amplitude, bump } => {
                    let g = bump.gradient(x);
                    (0..4).for_each(|m| (0..4).for_each(|n| j[m][n] += g[m] * amplitude[n]));
                }
                FieldComponent::GaugeGradient { gauge } => {
                    let h = gauge.bump.hessian(x);
                    (0..4).for_each(|m| (0..4).for_each(|n| j[m][n] += gauge.amplitude * h[m][n]));
                }
                FieldComponent::Conormal { amplitude, bump, surface } => {
                    let geo = surface.geometry(&spatial(x));
                    let n = geo.normal.lower();
                    let p = bump.value(x);
                    let g = bump.gradient(x);
                    for m in 0..4 {
                        for nu in 0..4 {
                            let dn = if m == 0 { 0.0 } else { crate::conventions::METRIC[nu] * geo.normal_jacobian[m - 1][nu] };
                            j[m][nu] += amplitude * (g[m] * n[nu] + p * dn);
                        }
                    }
                }
            }
        }
        j
    }

    /// `S[l][mu][nu] = d_l d_mu A_nu`; conormal components are not supported.
    pub fn second_derivatives(&self, x: &FourVector) -> Result<SecondDerivatives> {
        let mut s = [[[0.0; 4]; 4]; 4];
        for c in &self.components {
            if let FieldComponent::Conormal { .. } = c {
                return Err(CauchyError::Config("second derivatives of conormal components are not available".into()));
            }
            if !c.bump().contains(x) {
                continue;
            }
            match c {
                FieldComponent::Bump { amplitude, bump } => {
                    let h = bump.hessian(x);
                    for l in 0..4 {
                        for m in 0..4 {
                            for n in 0..4 {
                                s[l][m][n] += h[l][m] * amplitude[n];
                            }
                        }
                    }
                }
                FieldComponent::GaugeGradient { gauge } => {
                    let t = gauge.bump.third(x);
                    for l in 0..4 {
                        for m in 0..4 {
                            for n in 0..4 {
                                s[l][m][n] += gauge.amplitude * t[l][m][n];
                            }
                        }
                    }
                }
                FieldComponent::Conormal { .. } => unreachable!(),
            }
        }
        Ok(s)
    }

    /// `F_{mu nu} = d_mu A_nu - d_nu A_mu`.
    pub fn field_strength(&self, x: &FourVector) -> Matrix4<f64> {
        let j = self.jacobian(x);
        Matrix4::from_fn(|m, n| j[m][n] - j[n][m])
    }

    /// `d_l F_{mu nu}`.
    pub fn field_strength_derivatives(&self, x: &FourVector) -> Result<[Matrix4<f64>; 4]> {
        let s = self.second_derivatives(x)?;
        Ok(std::array::from_fn(|l| Matrix4::from_fn(|m, n| s[l][m][n] - s[l][n][m])))
    }

    /// `E_mu = F_{mu nu} n^nu`.
    pub fn electric_field(&self, x: &FourVector, n: &FourVector) -> [f64; 4] {
        let f = self.field_strength(x);
        std::array::from_fn(|m| (0..4).map(|k| f[(m, k)] * n.0[k]).sum())
    }

    /// `A + d Omega`.
    pub fn gauge_transform(&self, omega: &GaugeFunction) -> ExternalField {
        self.clone().with(FieldComponent::GaugeGradient { gauge: *omega })
    }
}

/// `max_i max_k |(A - B)_mu tau_k^mu|` over grid nodes, with tangents `tau_k = (d_k t, e_k)`.
pub fn tangential_difference(a: &ExternalField, b: &ExternalField, grid: &SurfaceGrid) -> f64 {
    let surface = &grid.surface;
    grid.nodes
        .iter()
        .zip(&grid.points)
        .map(|(xs, x)| {
            let pa = a.potential(x);
            let pb = b.potential(x);
            surface
                .tangents(xs)
                .iter()
                .map(|t| (0..4).map(|m| (pa[m] - pb[m]) * t.0[m]).sum::<f64>().abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
