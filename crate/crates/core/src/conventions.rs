//! Sign and representation conventions used throughout the crate.
//!
//! Every other module takes its metric, Dirac matrices, mass-shell
//! orientation, boost convention and quadrature weight convention from here.
//! Each constant is pinned by at least one test (see `docs/MATHMAP.md`).

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

/// Minkowski metric `g = diag(+1, -1, -1, -1)`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Default mass in natural units.
pub const DEFAULT_MASS: f64 = 1.0;

/// Default regularization direction `u = (-1, 0, 0, 0)` (past-directed, time-like).
pub const DEFAULT_U: [f64; 4] = [-1.0, 0.0, 0.0, 0.0];

/// Sign of `p^0` on the mass-shell sheet used for the negative-energy kernel.
/// The signed measure is `m^2 / p^0 d^3p`, so with this sign the weight is negative.
pub const MASS_SHELL_ENERGY_SIGN: f64 = -1.0;

/// Spinor boost along a coordinate axis is `S = cosh(chi/2) - sinh(chi/2) gamma^0 gamma^k`,
/// paired with the passive boost `t' = cosh(chi) t - sinh(chi) x^k`.
/// This sign multiplies `sinh(chi/2) gamma^0 gamma^k`.
pub const BOOST_SPINOR_SIGN: f64 = -1.0;

/// Discretized operators carry the surface weight on the right:
/// entry `(i, j)` is `k(x_i, x_j) * Gamma_j * w_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightConvention {
    RightGammaWeight,
}

pub const WEIGHT_CONVENTION: WeightConvention = WeightConvention::RightGammaWeight;

/// Smallest `|xi|` accepted by the Bessel routines.
pub const MIN_BESSEL_ARG: f64 = 1e-8;

/// Relative tolerance of the adaptive quadrature for `K_1`.
pub const BESSEL_RTOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dirac (standard) representation: `gamma^0 = diag(1,1,-1,-1)`,
/// `gamma^k = [[0, sigma_k], [-sigma_k, 0]]`.
pub fn dirac_gammas() -> [Matrix4<C64>; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let g0 = Matrix4::new(o, z, z, z, z, o, z, z, z, z, -o, z, z, z, z, -o);
    // sigma_1 = [[0,1],[1,0]]
    let g1 = Matrix4::new(z, z, z, o, z, z, o, z, z, -o, z, z, -o, z, z, z);
    // sigma_2 = [[0,-i],[i,0]]
    let g2 = Matrix4::new(z, z, z, -i, z, z, i, z, z, i, z, z, -i, z, z, z);
    // sigma_3 = [[1,0],[0,-1]]
    let g3 = Matrix4::new(z, z, o, z, z, z, z, -o, -o, z, z, z, z, o, z, z);
    [g0, g1, g2, g3]
}
