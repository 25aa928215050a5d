//! Minkowski vectors, the Clifford algebra in the Dirac representation,
//! the complexified radius and coordinate-axis boosts.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::Matrix4;
pub use num_complex::Complex64 as C64;

use crate::conventions::{dirac_gammas, BOOST_SPINOR_SIGN, METRIC};
use crate::error::{CauchyError, Result};

pub type SpinorMatrix = Matrix4<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct FourVector(pub [f64; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComplexFourVector(pub [C64; 4]);

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self([t, x, y, z])
    }

    pub fn basis(mu: usize) -> Self {
        let mut v = [0.0; 4];
        v[mu] = 1.0;
        Self(v)
    }

    /// Index-lowered components `v_mu`.
    pub fn lower(&self) -> [f64; 4] {
        std::array::from_fn(|k| METRIC[k] * self.0[k])
    }

    pub fn dot(&self, other: &Self) -> f64 {
        (0..4).map(|k| METRIC[k] * self.0[k] * other.0[k]).sum()
    }

    /// Euclidean length of the spatial part.
    pub fn spatial_norm(&self) -> f64 {
        (self.0[1] * self.0[1] + self.0[2] * self.0[2] + self.0[3] * self.0[3]).sqrt()
    }

    /// Euclidean length in R^4.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> ComplexFourVector {
        ComplexFourVector(self.0.map(|x| C64::new(x, 0.0)))
    }

    /// `self + i eps u`.
    pub fn shifted(&self, eps: f64, u: &FourVector) -> ComplexFourVector {
        ComplexFourVector(std::array::from_fn(|k| C64::new(self.0[k], eps * u.0[k])))
    }
}

impl ComplexFourVector {
    pub fn lower(&self) -> [C64; 4] {
        std::array::from_fn(|k| self.0[k] * METRIC[k])
    }

    pub fn re(&self) -> FourVector {
        FourVector(self.0.map(|c| c.re))
    }

    pub fn im(&self) -> FourVector {
        FourVector(self.0.map(|c| c.im))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    /// Euclidean length `sqrt(sum |w^mu|^2)`.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

macro_rules! vec_ops {
    ($t:ty, $s:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                Self(std::array::from_fn(|k| self.0[k] + o.0[k]))
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                Self(std::array::from_fn(|k| self.0[k] - o.0[k]))
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                Self(self.0.map(|c| -c))
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t {
                Self(self.0.map(|c| c * s))
            }
        }
        impl Index<usize> for $t {
            type Output = $s;
            fn index(&self, k: usize) -> &$s {
                &self.0[k]
            }
        }
    };
}
vec_ops!(FourVector, f64);
vec_ops!(ComplexFourVector, C64);

impl From<FourVector> for ComplexFourVector {
    fn from(v: FourVector) -> Self {
        v.to_complex()
    }
}

/// `a_mu b^mu`, bilinear (no complex conjugation).
pub fn minkowski_dot(a: &ComplexFourVector, b: &ComplexFourVector) -> C64 {
    (0..4).map(|k| a.0[k] * b.0[k] * METRIC[k]).sum()
}

/// Principal square root of `-w_mu w^mu`; the closed negative half-line is rejected.
pub fn radius(w: &ComplexFourVector) -> Result<C64> {
    let q = -minkowski_dot(w, w);
    if q.im == 0.0 && q.re <= 0.0 {
        return Err(CauchyError::Domain(format!("-w.w = {q} lies on the cut")));
    }
    Ok(q.sqrt())
}

/// `gamma^mu v_mu`, written out in the Dirac representation.
pub fn slash(v: &ComplexFourVector) -> SpinorMatrix {
    let [t, x, y, z] = v.0;
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    // sigma . v
    let s00 = z;
    let s01 = x - i * y;
    let s10 = x + i * y;
    let s11 = -z;
    Matrix4::new(
        t, zero, -s00, -s01, //
        zero, t, -s10, -s11, //
        s00, s01, -t, zero, //
        s10, s11, zero, -t,
    )
}

pub fn slash_real(v: &FourVector) -> SpinorMatrix {
    slash(&v.to_complex())
}

/// `gamma^mu a_mu` for covariant components `a_mu`.
pub fn slash_lower(a: &[C64; 4]) -> SpinorMatrix {
    slash(&ComplexFourVector(std::array::from_fn(|k| a[k] * METRIC[k])))
}

/// `gamma^0 M^dagger gamma^0`, the Dirac adjoint of a spinor matrix.
pub fn dirac_adjoint(m: &SpinorMatrix) -> SpinorMatrix {
    let g0 = dirac_gammas()[0];
    g0 * m.adjoint() * g0
}

/// Spectral norm of a 4x4 complex matrix.
pub fn spinor_norm2(m: &SpinorMatrix) -> f64 {
    let h = m.adjoint() * m;
    h.symmetric_eigenvalues().iter().fold(0.0f64, |a, &b| a.max(b)).max(0.0).sqrt()
}

pub fn spinor_frobenius(m: &SpinorMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Boost along a coordinate axis together with its spinor representative.
///
/// `lambda` is the passive boost `t' = cosh(chi) t - sinh(chi) x^k`; `spinor` obeys
/// `S gamma^mu S^{-1} = (Lambda^{-1})^mu_nu gamma^nu`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzBoost {
    pub lambda: Matrix4<f64>,
    pub spinor: SpinorMatrix,
    pub rapidity: f64,
    pub axis: usize,
}

pub const MAX_RAPIDITY: f64 = 5.0;

pub fn boost(rapidity: f64, axis: usize) -> Result<LorentzBoost> {
    if !(1..=3).contains(&axis) {
        return Err(CauchyError::Config(format!("boost axis {axis} not in 1..=3")));
    }
    if !rapidity.is_finite() || rapidity.abs() > MAX_RAPIDITY {
        return Err(CauchyError::Config(format!("rapidity {rapidity} out of range")));
    }
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut lambda = Matrix4::<f64>::identity();
    lambda[(0, 0)] = ch;
    lambda[(axis, axis)] = ch;
    lambda[(0, axis)] = -sh;
    lambda[(axis, 0)] = -sh;
    let g = dirac_gammas();
    let half = 0.5 * rapidity;
    let spinor = SpinorMatrix::identity() * C64::new(half.cosh(), 0.0)
        + g[0] * g[axis] * C64::new(BOOST_SPINOR_SIGN * half.sinh(), 0.0);
    Ok(LorentzBoost { lambda, spinor, rapidity, axis })
}

impl LorentzBoost {
    pub fn inverse(&self) -> LorentzBoost {
        boost(-self.rapidity, self.axis).expect("inverse of a valid boost")
    }

    pub fn apply(&self, w: &ComplexFourVector) -> ComplexFourVector {
        ComplexFourVector(std::array::from_fn(|mu| {
            (0..4).map(|nu| w.0[nu] * self.lambda[(mu, nu)]).sum()
        }))
    }

    pub fn apply_real(&self, x: &FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| (0..4).map(|nu| self.lambda[(mu, nu)] * x.0[nu]).sum()))
    }

    pub fn spinor_inverse(&self) -> SpinorMatrix {
        self.inverse().spinor
    }

    /// `max |Lambda^T g Lambda - g|`.
    pub fn metric_defect(&self) -> f64 {
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::from(METRIC));
        (self.lambda.transpose() * g * self.lambda - g).abs().max()
    }

    /// `max_mu || S gamma^mu S^{-1} - (Lambda^{-1})^mu_nu gamma^nu ||_F`.
    pub fn spinor_defect(&self) -> f64 {
        let g = dirac_gammas();
        let inv = self.lambda.try_inverse().expect("boosts are invertible");
        let s_inv = self.spinor.try_inverse().expect("boosts are invertible");
        (0..4)
            .map(|mu| {
                let lhs = self.spinor * g[mu] * s_inv;
                let rhs = (0..4).fold(SpinorMatrix::zeros(), |acc, nu| {
                    acc + g[nu] * C64::new(inv[(mu, nu)], 0.0)
                });
                spinor_frobenius(&(lhs - rhs))
            })
            .fold(0.0, f64::max)
    }
}
