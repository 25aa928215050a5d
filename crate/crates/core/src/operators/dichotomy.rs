//! Refinement study of `|Delta P^{lambda^A} - Delta P^{lambda^B}|_HS`.
//!
//! The kernel difference `(e^{-i lambda^A} - e^{-i lambda^B}) p^-` vanishes unless one
//! of the two points lies in the support of `A` or `B`, so the Hilbert-Schmidt sum over
//! node pairs is evaluated directly in `O(|K| n)` kernel calls, without any matrix.
//!
//! Formula: `hs-trace`, `tangential-dichotomy`

use serde::Serialize;

use crate::error::{CauchyError, Result};
use crate::field::{tangential_difference, ExternalField};
use crate::kernels::{lambda_a, p_minus, phase, KernelPoint};
use super::sparse_hs_squared;
use crate::stats::{fit_loglog, relative_change, LineFit};
use crate::surface::{make_grid, CauchySurface, QuadratureRule, SurfaceGrid};

/// Relative change below which consecutive refinements count as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub per_axis: usize,
    pub spacing: f64,
    pub hs_norm: f64,
    pub hs_squared: f64,
    /// `hs^2` ratio to the previous row.
    pub growth_factor: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Trivial,
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub tangential_difference: f64,
    /// Fit of `ln hs^2` against `ln h`; the divergence law predicts slope `-1`.
    pub fit: Option<LineFit>,
    /// `hs^2` growth per halving of `h` implied by the fit.
    pub fitted_halving_factor: Option<f64>,
    pub classification: Classification,
}

impl GrowthTable {
    pub fn row(&self, per_axis: usize) -> Option<&GrowthRow> {
        self.rows.iter().find(|r| r.per_axis == per_axis)
    }

    /// `hs^2(fine) / hs^2(coarse)` between two rows.
    pub fn squared_ratio(&self, coarse: usize, fine: usize) -> Option<f64> {
        Some(self.row(fine)?.hs_squared / self.row(coarse)?.hs_squared)
    }

    pub fn norm_change(&self, coarse: usize, fine: usize) -> Option<f64> {
        Some(relative_change(self.row(coarse)?.hs_norm, self.row(fine)?.hs_norm))
    }
}

/// `sum_{i != j} w_i w_j |e^{-i lambda^A} - e^{-i lambda^B}|^2 tr[gamma^0 p^-dag gamma^0 Gamma_i p^- Gamma_j]`.
pub fn pair_hs_squared(grid: &SurfaceGrid, a: &ExternalField, b: &ExternalField, m: f64) -> Result<f64> {
    let active: Vec<bool> = grid.points.iter().map(|x| a.in_support(x) || b.in_support(x)).collect();
    sparse_hs_squared(grid, &active, |i, j| {
        let (x, y) = (grid.points[i], grid.points[j]);
        let d = phase(lambda_a(a, &x, &y)) - phase(lambda_a(b, &x, &y));
        if d.norm_sqr() == 0.0 {
            return Ok(None);
        }
        Ok(Some(p_minus(&KernelPoint::new(x, y, 0.0).w(), m)? * d))
    })
}

pub fn tangential_dichotomy_experiment(
    a: &ExternalField,
    b: &ExternalField,
    surface: &CauchySurface,
    half_width: f64,
    per_axis: &[usize],
    rule: QuadratureRule,
    m: f64,
) -> Result<GrowthTable> {
    if per_axis.len() < 3 {
        return Err(CauchyError::Config(format!("refinement needs at least 3 grids, got {}", per_axis.len())));
    }
    if per_axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CauchyError::Config("grid sizes must increase".into()));
    }
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(per_axis.len());
    let mut tangential = 0.0f64;
    for &n in per_axis {
        let grid = make_grid(surface, half_width, n, rule)?;
        tangential = tangential.max(tangential_difference(a, b, &grid));
        let s = pair_hs_squared(&grid, a, b, m)?;
        let growth = rows.last().map(|r| s / r.hs_squared);
        rows.push(GrowthRow { per_axis: n, spacing: grid.spacing(), hs_norm: s.sqrt(), hs_squared: s, growth_factor: growth });
    }
    if rows.iter().all(|r| r.hs_squared == 0.0) {
        return Ok(GrowthTable { rows, tangential_difference: tangential, fit: None, fitted_halving_factor: None, classification: Classification::Trivial });
    }
    let h: Vec<f64> = rows.iter().map(|r| r.spacing).collect();
    let s: Vec<f64> = rows.iter().map(|r| r.hs_squared).collect();
    let fit = fit_loglog(&h, &s).ok();
    let halving = fit.as_ref().map(|f| 0.5f64.powf(f.slope));
    let last = &rows[rows.len() - 1];
    let prev = &rows[rows.len() - 2];
    let classification = if relative_change(prev.hs_norm, last.hs_norm) <= CONVERGENCE_TOLERANCE {
        Classification::Convergent
    } else if halving.is_some_and(|g| g >= 1.5) {
        Classification::Divergent
    } else {
        Classification::Inconclusive
    };
    Ok(GrowthTable { rows, tangential_difference: tangential, fit, fitted_halving_factor: halving, classification })
}
