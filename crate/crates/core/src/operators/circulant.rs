//! Translation-invariant operators on the periodic flat grid, stored by their
//! 4x4 Fourier symbols and applied with FFTs.
//!
//! A block-circulant operator has blocks `M[x, y] = c(y - x)` (offsets taken modulo
//! the box) and symbol `S(p) = sum_d c(d) e^{i p d}`, so that plane waves `e^{i p x} v`
//! are mapped to `e^{i p x} S(p) v`. Its operator norm is `max_p |S(p)|`.
//!
//! Formula: `negative-energy-symbol`, `periodic-kernel-symbol`

use std::sync::Arc;

use faer::{c64, Mat};
use nalgebra::Matrix4;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::linalg::to_c64;
use super::DiscretizedOperator;
use crate::conventions::dirac_gammas;
use crate::error::{CauchyError, Result};
use crate::kernels::p_minus;
use crate::minkowski::{FourVector, SpinorMatrix, C64};
use crate::surface::{QuadratureRule, SurfaceGrid};

#[derive(Clone, Debug)]
pub struct BlockCirculant {
    pub per_axis: usize,
    pub spacing: f64,
    /// Symbols in FFT mode order, linear index `(k1 * N + k2) * N + k3`.
    pub symbols: Vec<SpinorMatrix>,
}

/// Signed mode number in FFT order (`N/2` maps to `-N/2`).
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if 2 * k >= n {
        k as i64 - n as i64
    } else {
        k as i64
    }
}

/// Lattice momentum of mode `(k1, k2, k3)`.
pub fn mode_momentum(k: [usize; 3], n: usize, h: f64) -> [f64; 3] {
    let scale = 2.0 * std::f64::consts::PI / (n as f64 * h);
    k.map(|ki| scale * signed_mode(ki, n) as f64)
}

/// `Lambda_-(p) = (1 - (alpha.p + beta m) / E) / 2` with `alpha_k = gamma^0 gamma^k`, `beta = gamma^0`.
pub fn negative_energy_symbol(p: &[f64; 3], m: f64) -> SpinorMatrix {
    let g = dirac_gammas();
    let e = (m * m + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let mut h = g[0] * C64::new(m, 0.0);
    for k in 0..3 {
        h += g[0] * g[k + 1] * C64::new(p[k], 0.0);
    }
    (SpinorMatrix::identity() - h / C64::new(e, 0.0)) * C64::new(0.5, 0.0)
}

/// Negative-energy projector of the Wilson lattice Hamiltonian
/// `alpha . sin(p h)/h + beta (m + (2/h) sum sin^2(p h / 2))`. The symbol is smooth and
/// periodic in `p`, and agrees with the continuum symbol for `|p| h << 1`.
pub fn wilson_symbol(p: &[f64; 3], m: f64, h: f64) -> SpinorMatrix {
    let g = dirac_gammas();
    let kin: [f64; 3] = p.map(|pk| (pk * h).sin() / h);
    let mass = m + (2.0 / h) * p.iter().map(|pk| (0.5 * pk * h).sin().powi(2)).sum::<f64>();
    let e = (mass * mass + kin.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let mut ham = g[0] * C64::new(mass, 0.0);
    for k in 0..3 {
        ham += g[0] * g[k + 1] * C64::new(kin[k], 0.0);
    }
    (SpinorMatrix::identity() - ham / C64::new(e, 0.0)) * C64::new(0.5, 0.0)
}

fn require_periodic(grid: &SurfaceGrid) -> Result<()> {
    if !grid.surface.is_flat() {
        return Err(CauchyError::Config("periodic symbols need a flat surface".into()));
    }
    if grid.rule != QuadratureRule::Midpoint {
        return Err(CauchyError::Config("periodic symbols need the midpoint rule".into()));
    }
    Ok(())
}

/// Runs an FFT over each of the three axes of `N^3` complex samples.
fn fft3(data: &mut [C64], n: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        for base in 0..n * n {
            // `base` enumerates the two remaining axes
            let (hi, lo) = (base / stride, base % stride);
            let start = hi * stride * n + lo;
            for t in 0..n {
                line[t] = data[start + t * stride];
            }
            fft.process(&mut line);
            for t in 0..n {
                data[start + t * stride] = line[t];
            }
        }
    }
}

fn unravel(idx: usize, n: usize) -> [usize; 3] {
    [idx / (n * n), (idx / n) % n, idx % n]
}

impl BlockCirculant {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Builds the operator from its offset blocks `c(d)`, indexed like the symbols.
    pub fn from_offsets(per_axis: usize, spacing: f64, offsets: &[SpinorMatrix]) -> Self {
        let n = per_axis;
        let mut symbols = vec![SpinorMatrix::zeros(); n * n * n];
        let mut buf = vec![C64::new(0.0, 0.0); n * n * n];
        for a in 0..4 {
            for b in 0..4 {
                for (slot, c) in buf.iter_mut().zip(offsets) {
                    *slot = c[(a, b)];
                }
                fft3(&mut buf, n, FftDirection::Inverse);
                for (s, v) in symbols.iter_mut().zip(&buf) {
                    s[(a, b)] = *v;
                }
            }
        }
        Self { per_axis, spacing, symbols }
    }

    /// Offset blocks `c(d) = N^{-3} sum_p S(p) e^{-i p d}`.
    pub fn offsets(&self) -> Vec<SpinorMatrix> {
        let n = self.per_axis;
        let norm = C64::new(1.0 / (n * n * n) as f64, 0.0);
        let mut out = vec![SpinorMatrix::zeros(); n * n * n];
        let mut buf = vec![C64::new(0.0, 0.0); n * n * n];
        for a in 0..4 {
            for b in 0..4 {
                for (slot, s) in buf.iter_mut().zip(&self.symbols) {
                    *slot = s[(a, b)];
                }
                fft3(&mut buf, n, FftDirection::Forward);
                for (c, v) in out.iter_mut().zip(&buf) {
                    c[(a, b)] = *v * norm;
                }
            }
        }
        out
    }

    /// `psi` holds four spinor components per node, nodes in grid order.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.per_axis;
        let n3 = n * n * n;
        assert_eq!(psi.len(), 4 * n3, "spinor field length");
        let mut comps: Vec<Vec<C64>> = (0..4).map(|a| (0..n3).map(|i| psi[4 * i + a]).collect()).collect();
        for c in comps.iter_mut() {
            fft3(c, n, FftDirection::Forward);
        }
        let mut out: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n3]; 4];
        for k in 0..n3 {
            let s = &self.symbols[k];
            for a in 0..4 {
                out[a][k] = (0..4).map(|b| s[(a, b)] * comps[b][k]).sum();
            }
        }
        let norm = C64::new(1.0 / n3 as f64, 0.0);
        for c in out.iter_mut() {
            fft3(c, n, FftDirection::Inverse);
        }
        let mut res = vec![C64::new(0.0, 0.0); 4 * n3];
        for i in 0..n3 {
            for a in 0..4 {
                res[4 * i + a] = out[a][i] * norm;
            }
        }
        res
    }

    /// Block columns of the operator at the given nodes, `4 N^3 x 4 |nodes|`.
    pub fn columns(&self, nodes: &[usize]) -> Mat<c64> {
        let n = self.per_axis;
        let c = self.offsets();
        Mat::from_fn(4 * n * n * n, 4 * nodes.len(), |r, col| {
            let x = unravel(r / 4, n);
            let y = unravel(nodes[col / 4], n);
            let d = [0, 1, 2].map(|k| (y[k] + n - x[k]) % n);
            to_c64(c[(d[0] * n + d[1]) * n + d[2]][(r % 4, col % 4)])
        })
    }

    /// Applies the operator to every column.
    pub fn apply_columns(&self, a: &Mat<c64>) -> Mat<c64> {
        let cols: Vec<Vec<C64>> = (0..a.ncols())
            .into_par_iter()
            .map(|j| {
                let v: Vec<C64> = (0..a.nrows()).map(|i| C64::new(a[(i, j)].re, a[(i, j)].im)).collect();
                self.apply(&v)
            })
            .collect();
        Mat::from_fn(a.nrows(), a.ncols(), |i, j| to_c64(cols[j][i]))
    }

    pub fn adjoint(&self) -> Self {
        Self { symbols: self.symbols.iter().map(|s| s.adjoint()).collect(), ..self.clone() }
    }

    /// `1 - S`.
    pub fn complement(&self) -> Self {
        Self { symbols: self.symbols.iter().map(|s| SpinorMatrix::identity() - s).collect(), ..self.clone() }
    }

    /// `a <- S a`, one column at a time.
    pub fn apply_columns_inplace(&self, a: &mut Mat<c64>) {
        let mut v = vec![C64::new(0.0, 0.0); a.nrows()];
        for j in 0..a.ncols() {
            for (i, slot) in v.iter_mut().enumerate() {
                let z = a[(i, j)];
                *slot = C64::new(z.re, z.im);
            }
            let out = self.apply(&v);
            for (i, z) in out.iter().enumerate() {
                a[(i, j)] = to_c64(*z);
            }
        }
    }

    /// `a <- a S`, one row at a time through `(a S)^dagger = S^dagger a^dagger`.
    pub fn apply_rows_inplace(&self, a: &mut Mat<c64>) {
        let adj = self.adjoint();
        let mut v = vec![C64::new(0.0, 0.0); a.ncols()];
        for i in 0..a.nrows() {
            for (j, slot) in v.iter_mut().enumerate() {
                let z = a[(i, j)];
                *slot = C64::new(z.re, -z.im);
            }
            let out = adj.apply(&v);
            for (j, z) in out.iter().enumerate() {
                a[(i, j)] = c64::new(z.re, -z.im);
            }
        }
    }

    /// Block `(x, y)` of the operator.
    pub fn block(&self, offsets: &[SpinorMatrix], x: usize, y: usize) -> SpinorMatrix {
        let n = self.per_axis;
        let (xi, yi) = (unravel(x, n), unravel(y, n));
        let d = [0, 1, 2].map(|k| (yi[k] + n - xi[k]) % n);
        offsets[(d[0] * n + d[1]) * n + d[2]]
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.per_axis;
        let n3 = n * n * n;
        let c = self.offsets();
        Mat::from_fn(4 * n3, 4 * n3, |r, col| {
            let x = unravel(r / 4, n);
            let y = unravel(col / 4, n);
            let d = [0, 1, 2].map(|k| (y[k] + n - x[k]) % n);
            to_c64(c[(d[0] * n + d[1]) * n + d[2]][(r % 4, col % 4)])
        })
    }

    pub fn to_operator(&self, grid: &Arc<SurfaceGrid>) -> DiscretizedOperator {
        DiscretizedOperator {
            grid: grid.clone(),
            matrix: self.to_dense(),
            weight_convention: crate::conventions::WEIGHT_CONVENTION,
        }
    }

    /// `max_p |S(p)^2 - S(p)|`.
    pub fn projector_defect(&self) -> f64 {
        self.symbols.iter().map(|s| spectral_norm4(&(s * s - s))).fold(0.0, f64::max)
    }

    /// `max_p |S(p) - S(p)^dagger|`.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.symbols.iter().map(|s| spectral_norm4(&(s - s.adjoint()))).fold(0.0, f64::max)
    }

    /// Operator-norm distance `max_p |S(p) - T(p)|`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.per_axis != other.per_axis || self.spacing != other.spacing {
            return Err(CauchyError::GridMismatch);
        }
        Ok(self.symbols.iter().zip(&other.symbols).map(|(a, b)| spectral_norm4(&(a - b))).fold(0.0, f64::max))
    }
}

pub fn spectral_norm4(a: &SpinorMatrix) -> f64 {
    let h: Matrix4<C64> = a.adjoint() * a;
    nalgebra::SymmetricEigen::new(h).eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v)).max(0.0).sqrt()
}

/// Spectral negative-energy projector on the periodic flat grid.
pub fn pminus_flat_oracle(grid: &SurfaceGrid, m: f64) -> Result<BlockCirculant> {
    require_periodic(grid)?;
    let n = grid.per_axis;
    let h = grid.spacing();
    let symbols = (0..n * n * n).map(|k| negative_energy_symbol(&mode_momentum(unravel(k, n), n, h), m)).collect();
    Ok(BlockCirculant { per_axis: n, spacing: h, symbols })
}

/// Wilson lattice counterpart of [`pminus_flat_oracle`].
pub fn pminus_wilson(grid: &SurfaceGrid, m: f64) -> Result<BlockCirculant> {
    require_periodic(grid)?;
    let n = grid.per_axis;
    let h = grid.spacing();
    let symbols = (0..n * n * n).map(|k| wilson_symbol(&mode_momentum(unravel(k, n), n, h), m, h)).collect();
    Ok(BlockCirculant { per_axis: n, spacing: h, symbols })
}

/// Regularized kernel `p^-(d + i eps u) gamma^0 h^3` on minimum-image offsets.
/// Offsets exactly half a box away average the images on each ambiguous axis.
pub fn regularized_pminus_circulant(grid: &SurfaceGrid, eps: f64, u: &FourVector, m: f64) -> Result<BlockCirculant> {
    require_periodic(grid)?;
    if !(eps > 0.0) {
        return Err(CauchyError::Domain(format!("regularization {eps} must be positive")));
    }
    let n = grid.per_axis;
    let h = grid.spacing();
    let g0 = dirac_gammas()[0];
    let w3 = C64::new(h.powi(3), 0.0);
    let images = |k: usize| -> Vec<f64> {
        if 2 * k == n {
            vec![-(k as f64) * h, k as f64 * h]
        } else {
            vec![signed_mode(k, n) as f64 * h]
        }
    };
    let mut offsets = Vec::with_capacity(n * n * n);
    for idx in 0..n * n * n {
        let k = unravel(idx, n);
        let (i0, i1, i2) = (images(k[0]), images(k[1]), images(k[2]));
        let count = (i0.len() * i1.len() * i2.len()) as f64;
        let mut acc = SpinorMatrix::zeros();
        for a in &i0 {
            for b in &i1 {
                for c in &i2 {
                    let w = FourVector([0.0, *a, *b, *c]).shifted(eps, u);
                    acc += p_minus(&w, m)?;
                }
            }
        }
        offsets.push(acc * g0 * w3 / C64::new(count, 0.0));
    }
    Ok(BlockCirculant::from_offsets(n, h, &offsets))
}
