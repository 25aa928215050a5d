//! Nystrom discretization of integral operators on a surface grid and the
//! diagnostics used for the Hilbert-Schmidt criteria.
//!
//! Block `(i, j)` of a discretized operator is `k(x_i, x_j) Gamma_j w_j`, so the
//! grid inner product is `<phi, psi> = sum_i w_i phi_i^dagger gamma^0 Gamma_i psi_i`.
//! With `G_i = w_i gamma^0 Gamma_i`, the matrix `B = G^{1/2} M G^{-1/2}` is the
//! operator in an orthonormal frame: its Frobenius norm is the Hilbert-Schmidt norm
//! `sum w_i w_j tr[gamma^0 k^dagger gamma^0 Gamma_i k Gamma_j]` and its spectral norm
//! is the operator norm.
//!
//! Formula: `nystrom-weight`, `hs-trace`, `commutator-Q`, `unitary-exp`, `representative-Pi`

pub mod circulant;
pub mod dichotomy;
pub mod linalg;
pub mod representative;

use std::sync::Arc;

use faer::{c64, Mat, Scale};
use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::Serialize;

use crate::conventions::{dirac_gammas, WeightConvention, WEIGHT_CONVENTION};
use crate::error::{CauchyError, Result};
use crate::field::ExternalField;
use crate::kernels::{delta_p_kernel, p_minus, KernelPoint};
use crate::minkowski::{SpinorMatrix, C64};
use crate::surface::SurfaceGrid;
use linalg::{exp_skew_hermitian, frobenius, identity, max_abs, singular_values, spectral_norm, to_c64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiagonalRule {
    /// Diagonal blocks are set to zero.
    Exclude,
    /// Diagonal blocks use the kernel value at `x = y` (regularized kernels only).
    Limit,
}

#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    pub grid: Arc<SurfaceGrid>,
    pub matrix: Mat<c64>,
    pub weight_convention: WeightConvention,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSReport {
    pub hs_norm: f64,
    pub op_norm: f64,
    pub top_singular_values: Vec<f64>,
    pub projector_defect: f64,
}

/// Hermitian square root and inverse square root of a positive 4x4 block.
fn sqrt_blocks(g: &SpinorMatrix) -> (SpinorMatrix, SpinorMatrix) {
    let eig = nalgebra::SymmetricEigen::new(*g);
    let v = eig.eigenvectors;
    let s = Matrix4::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.sqrt(), 0.0)));
    let si = Matrix4::from_diagonal(&eig.eigenvalues.map(|x| C64::new(1.0 / x.sqrt(), 0.0)));
    (v * s * v.adjoint(), v * si * v.adjoint())
}

fn same_grid(a: &SurfaceGrid, b: &SurfaceGrid) -> bool {
    a.per_axis == b.per_axis && a.half_width == b.half_width && a.rule == b.rule && a.surface == b.surface
}

pub fn assemble<F>(grid: &Arc<SurfaceGrid>, kernel: F, diagonal: DiagonalRule) -> Result<DiscretizedOperator>
where
    F: Fn(usize, usize) -> Result<SpinorMatrix> + Sync,
{
    let n = grid.len();
    let rows: Vec<Vec<SpinorMatrix>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j && diagonal == DiagonalRule::Exclude {
                        return Ok(SpinorMatrix::zeros());
                    }
                    let k = kernel(i, j).map_err(|e| match e {
                        CauchyError::Domain(msg) => CauchyError::Domain(format!("nodes ({i}, {j}): {msg}")),
                        other => other,
                    })?;
                    Ok(k * grid.gammas[j] * C64::new(grid.weights[j], 0.0))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = Mat::from_fn(4 * n, 4 * n, |r, c| to_c64(rows[r / 4][c / 4][(r % 4, c % 4)]));
    Ok(DiscretizedOperator { grid: grid.clone(), matrix, weight_convention: WEIGHT_CONVENTION })
}

/// Squared HS norm of the assembled kernel without forming the matrix, for kernels
/// that vanish unless one of the two nodes is `active`. Diagonal blocks are excluded;
/// the kernel may return `None` for a vanishing block.
pub fn sparse_hs_squared<F>(grid: &SurfaceGrid, active: &[bool], kernel: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<Option<SpinorMatrix>> + Sync,
{
    let n = grid.len();
    let g0 = dirac_gammas()[0];
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                if i == j || !(active[i] || active[j]) {
                    continue;
                }
                let Some(k) = kernel(i, j).map_err(|e| match e {
                    CauchyError::Domain(msg) => CauchyError::Domain(format!("nodes ({i}, {j}): {msg}")),
                    other => other,
                })?
                else {
                    continue;
                };
                let t: C64 = (g0 * k.adjoint() * g0 * grid.gammas[i] * k * grid.gammas[j]).trace();
                acc += grid.weights[i] * grid.weights[j] * t.re;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.iter().sum())
}

impl DiscretizedOperator {
    pub fn zeros(grid: &Arc<SurfaceGrid>) -> Self {
        let d = 4 * grid.len();
        Self { grid: grid.clone(), matrix: Mat::zeros(d, d), weight_convention: WEIGHT_CONVENTION }
    }

    pub fn identity(grid: &Arc<SurfaceGrid>) -> Self {
        Self { grid: grid.clone(), matrix: identity(4 * grid.len()), weight_convention: WEIGHT_CONVENTION }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_grid(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(CauchyError::GridMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, ..self.clone() })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { matrix: &self.matrix * &other.matrix, ..self.clone() })
    }

    fn half_weights(&self) -> Vec<(SpinorMatrix, SpinorMatrix)> {
        let g0 = dirac_gammas()[0];
        (0..self.grid.len())
            .map(|i| sqrt_blocks(&(g0 * self.grid.gammas[i] * C64::new(self.grid.weights[i], 0.0))))
            .collect()
    }

    /// `G^{1/2} M G^{-1/2}`.
    pub fn symmetrized(&self) -> Mat<c64> {
        let h = self.half_weights();
        conjugate_blocks(&self.matrix, &h, false)
    }

    pub fn from_symmetrized(grid: &Arc<SurfaceGrid>, b: &Mat<c64>) -> Self {
        let tmp = Self { grid: grid.clone(), matrix: Mat::zeros(0, 0), weight_convention: WEIGHT_CONVENTION };
        let h = tmp.half_weights();
        Self { matrix: conjugate_blocks(b, &h, true), ..tmp }
    }

    pub fn hs_norm(&self) -> f64 {
        frobenius(&self.symmetrized())
    }

    pub fn op_norm(&self) -> Result<f64> {
        spectral_norm(&self.symmetrized())
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.symmetrized())
    }

    /// `|| P^2 - P ||` in operator norm.
    pub fn projector_defect(&self) -> Result<f64> {
        let b = self.symmetrized();
        spectral_norm(&(&b * &b - &b))
    }

    /// `|| K - K^sharp ||` where `K^sharp` is the adjoint for the grid inner product.
    pub fn self_adjoint_defect(&self) -> Result<f64> {
        let b = self.symmetrized();
        spectral_norm(&(&b - b.adjoint()))
    }

    pub fn skew_adjoint_defect(&self) -> Result<f64> {
        let b = self.symmetrized();
        spectral_norm(&(&b + b.adjoint()))
    }

    pub fn unitarity_defect(&self) -> Result<f64> {
        let b = self.symmetrized();
        spectral_norm(&(&b * b.adjoint() - identity(b.nrows())))
    }

    pub fn report(&self, projector_defect: f64, keep: usize) -> Result<HSReport> {
        let b = self.symmetrized();
        let sv = singular_values(&b)?;
        Ok(HSReport {
            hs_norm: frobenius(&b),
            op_norm: sv.first().copied().unwrap_or(0.0),
            top_singular_values: sv.into_iter().take(keep).collect(),
            projector_defect,
        })
    }
}

fn conjugate_blocks(m: &Mat<c64>, h: &[(SpinorMatrix, SpinorMatrix)], inverse: bool) -> Mat<c64> {
    let n = h.len();
    let pick = |i: usize, left: bool| -> &SpinorMatrix {
        let (s, si) = &h[i];
        if left != inverse {
            s
        } else {
            si
        }
    };
    let blocks: Vec<Vec<SpinorMatrix>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let blk = Matrix4::from_fn(|a, b| {
                        let z = m[(4 * i + a, 4 * j + b)];
                        C64::new(z.re, z.im)
                    });
                    pick(i, true) * blk * pick(j, false)
                })
                .collect()
        })
        .collect();
    Mat::from_fn(4 * n, 4 * n, |r, c| to_c64(blocks[r / 4][c / 4][(r % 4, c % 4)]))
}

/// `Delta P^{lambda^A}` on the grid at `eps = 0`, diagonal excluded.
pub fn assemble_delta_p(grid: &Arc<SurfaceGrid>, field: &ExternalField, m: f64) -> Result<DiscretizedOperator> {
    let g = grid.clone();
    assemble(grid, move |i, j| delta_p_kernel(field, &KernelPoint::new(g.points[i], g.points[j], 0.0), m), DiagonalRule::Exclude)
}

/// Regularized free projector `P^{0, eps u}` assembled from the kernel.
pub fn assemble_regularized_pminus(grid: &Arc<SurfaceGrid>, eps: f64, m: f64) -> Result<DiscretizedOperator> {
    let g = grid.clone();
    assemble(grid, move |i, j| p_minus(&KernelPoint::new(g.points[i], g.points[j], eps).w(), m), DiagonalRule::Limit)
}

/// Free projector from three regularizations `eps0, eps0/2, eps0/4`, extrapolated to
/// `eps = 0` assuming an error `c1 eps + c2 eps^2`. Approximate by construction.
pub fn extrapolated_pminus(grid: &Arc<SurfaceGrid>, eps0: f64, m: f64) -> Result<DiscretizedOperator> {
    let a = assemble_regularized_pminus(grid, eps0, m)?;
    let b = assemble_regularized_pminus(grid, 0.5 * eps0, m)?;
    let c = assemble_regularized_pminus(grid, 0.25 * eps0, m)?;
    let third = c64::new(1.0 / 3.0, 0.0);
    let matrix = (&a.matrix - &b.matrix * Scale(c64::new(6.0, 0.0)) + &c.matrix * Scale(c64::new(8.0, 0.0))) * Scale(third);
    Ok(DiscretizedOperator { matrix, ..a })
}

#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    pub p_minus: DiscretizedOperator,
    pub p_lambda: DiscretizedOperator,
    pub delta_p: DiscretizedOperator,
    /// True when `P^-` comes from the extrapolated kernel rather than the spectral oracle.
    pub approximate: bool,
}

/// `P^lambda = P^- + Delta P^{lambda^A}`.
pub fn p_lambda(grid: &Arc<SurfaceGrid>, field: &ExternalField, m: f64, eps0: f64) -> Result<ProjectorFamily> {
    let (p_minus, approximate) = if grid.surface.is_flat() {
        (circulant::pminus_flat_oracle(grid, m)?.to_operator(grid), false)
    } else {
        (extrapolated_pminus(grid, eps0, m)?, true)
    };
    let delta_p = assemble_delta_p(grid, field, m)?;
    let p_lambda = p_minus.add(&delta_p)?;
    Ok(ProjectorFamily { p_minus, p_lambda, delta_p, approximate })
}

/// `Q = [P^A, P^-]`.
pub fn q_commutator(p_a: &DiscretizedOperator, p_minus: &DiscretizedOperator) -> Result<DiscretizedOperator> {
    let ab = p_a.compose(p_minus)?;
    let ba = p_minus.compose(p_a)?;
    ab.sub(&ba)
}

pub const SKEW_TOLERANCE: f64 = 1e-8;

/// `e^Q` for `Q` skew-adjoint in the grid inner product.
pub fn exp_unitary(q: &DiscretizedOperator) -> Result<DiscretizedOperator> {
    let b = q.symmetrized();
    let defect = max_abs(&(&b + b.adjoint()));
    if defect > SKEW_TOLERANCE * (1.0 + max_abs(&b)) {
        return Err(CauchyError::NotSkewAdjoint(defect));
    }
    let e = exp_skew_hermitian(&b)?;
    Ok(DiscretizedOperator::from_symmetrized(&q.grid, &e))
}

/// `Pi = e^Q P^- e^{-Q}` with the report for `Pi - P^A`.
pub fn representative_projector(
    p_minus: &DiscretizedOperator,
    q: &DiscretizedOperator,
    p_a: &DiscretizedOperator,
) -> Result<(DiscretizedOperator, HSReport)> {
    let u = exp_unitary(q)?;
    let neg = DiscretizedOperator { matrix: &q.matrix * Scale(c64::new(-1.0, 0.0)), ..q.clone() };
    let u_inv = exp_unitary(&neg)?;
    let pi = u.compose(p_minus)?.compose(&u_inv)?;
    let defect = pi.projector_defect()?;
    let report = pi.sub(p_a)?.report(defect, 50)?;
    Ok((pi, report))
}

/// `P^- Q P^-` and `P^+ Q P^+`, the diagonal blocks in the splitting by `P^-`.
pub fn diagonal_blocks(q: &DiscretizedOperator, p_minus: &DiscretizedOperator) -> Result<(f64, f64)> {
    let p = p_minus.symmetrized();
    let bq = q.symmetrized();
    let pp = identity(p.nrows()) - &p;
    Ok((spectral_norm(&(&p * &bq * &p))?, spectral_norm(&(&pp * &bq * &pp))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Bump, FieldComponent, GaugeFunction};
    use crate::kernels::{gauge_chain_lambda, lambda_a, phase};
    use crate::minkowski::FourVector;
    use crate::surface::{make_grid, CauchySurface, QuadratureRule, SurfaceShape};

    const M: f64 = 1.0;

    fn flat_grid(n: usize, l: f64) -> Arc<SurfaceGrid> {
        Arc::new(make_grid(&CauchySurface::flat(), l, n, QuadratureRule::Midpoint).unwrap())
    }

    fn curved_grid(n: usize) -> Arc<SurfaceGrid> {
        let s = CauchySurface::new(SurfaceShape::GaussianBump { height: 0.3, width: 0.7, center: [0.0; 3] }, 0.4).unwrap();
        Arc::new(make_grid(&s, 1.5, n, QuadratureRule::Midpoint).unwrap())
    }

    fn field() -> ExternalField {
        ExternalField::bump([0.4, 0.3, -0.2, 0.1], [0.0, 0.1, 0.0, -0.1], 1.0)
    }

    #[test]
    fn trivial_assemblies_vanish() {
        let g = flat_grid(4, 1.5);
        let z = assemble(&g, |_, _| Ok(SpinorMatrix::zeros()), DiagonalRule::Exclude).unwrap();
        assert_eq!(max_abs(&z.matrix), 0.0);
        assert_eq!(z.hs_norm(), 0.0);
        let dp = assemble_delta_p(&g, &ExternalField::zero(), M).unwrap();
        assert_eq!(max_abs(&dp.matrix), 0.0);
    }

    #[test]
    fn assembly_is_linear_in_the_kernel() {
        let g = curved_grid(4);
        let k1 = |i: usize, j: usize| Ok(SpinorMatrix::identity() * C64::new(i as f64 + 0.5 * j as f64, 0.1));
        let k2 = |i: usize, j: usize| Ok(dirac_gammas()[1] * C64::new(0.3 * j as f64, -(i as f64)));
        let a = assemble(&g, k1, DiagonalRule::Limit).unwrap();
        let b = assemble(&g, k2, DiagonalRule::Limit).unwrap();
        let c = assemble(&g, |i, j| Ok(k1(i, j)? + k2(i, j)?), DiagonalRule::Limit).unwrap();
        // equal up to the rounding of one product per entry
        assert!(max_abs(&(&a.matrix + &b.matrix - &c.matrix)) <= 4.0 * f64::EPSILON * max_abs(&c.matrix));
    }

    #[test]
    fn hs_norm_matches_trace_formula_on_curved_grid() {
        let g = curved_grid(4);
        let a = field();
        let op = assemble_delta_p(&g, &a, M).unwrap();
        let g0 = dirac_gammas()[0];
        let mut direct = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                if i == j {
                    continue;
                }
                let k = delta_p_kernel(&a, &KernelPoint::new(g.points[i], g.points[j], 0.0), M).unwrap();
                let t = (g0 * k.adjoint() * g0 * g.gammas[i] * k * g.gammas[j]).trace();
                direct += g.weights[i] * g.weights[j] * t.re;
            }
        }
        assert!((op.hs_norm() - direct.sqrt()).abs() <= 1e-10 * direct.sqrt());
        assert!(op.hs_norm() >= op.op_norm().unwrap());
    }

    #[test]
    fn flat_hs_norm_is_plain_weighted_frobenius() {
        let g = flat_grid(4, 1.5);
        let op = assemble_delta_p(&g, &field(), M).unwrap();
        let h3 = g.spacing().powi(3);
        assert!((op.hs_norm() - frobenius(&op.matrix)).abs() <= 1e-12 * op.hs_norm());
        assert!(h3 > 0.0);
    }

    #[test]
    fn separable_kernel_hs_norm_factorizes() {
        // k(x, y) = a(x) b(y) gamma^0 on a flat grid: |K|_HS^2 = 4 int a^2 int b^2
        let g = make_grid(&CauchySurface::flat(), 1.0, 10, QuadratureRule::Gauss).unwrap();
        let g = Arc::new(g);
        let a = |x: &[f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let b = |x: &[f64; 3]| 1.0 + 0.5 * x[0] - x[1] * x[2];
        let g2 = g.clone();
        let op = assemble(&g, move |i, j| Ok(dirac_gammas()[0] * C64::new(a(&g2.nodes[i]) * b(&g2.nodes[j]), 0.0)), DiagonalRule::Limit).unwrap();
        let ia: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * a(x) * a(x)).sum();
        let ib: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * b(x) * b(x)).sum();
        // exact one-dimensional factors of the Gaussian integral
        let erf_part = crate::quadrature::integrate_real(|t| (-2.0 * t * t).exp(), -1.0, 1.0, 1e-14).unwrap();
        assert!((ia - erf_part.powi(3)).abs() < 1e-8 * ia, "{ia} {}", erf_part.powi(3));
        assert!((op.hs_norm().powi(2) - 4.0 * ia * ib).abs() < 1e-10 * ia * ib);
    }

    #[test]
    fn delta_p_is_self_adjoint_on_curved_grid() {
        let g = curved_grid(4);
        let op = assemble_delta_p(&g, &field(), M).unwrap();
        assert!(op.self_adjoint_defect().unwrap() <= 1e-10 * op.op_norm().unwrap().max(1.0));
    }

    #[test]
    fn gauge_conjugation_matches_chained_phase() {
        let g = curved_grid(4);
        let a = field();
        let om = GaugeFunction { amplitude: 0.9, bump: Bump { center: [0.0, 0.2, 0.0, 0.0], radius: 1.3 } };
        let g1 = g.clone();
        let a1 = a.clone();
        let p = assemble(&g, move |i, j| {
            let pt = KernelPoint::new(g1.points[i], g1.points[j], 0.0);
            Ok(p_minus(&pt.w(), M)? * phase(lambda_a(&a1, &pt.x, &pt.y)))
        }, DiagonalRule::Exclude).unwrap();
        let g2 = g.clone();
        let chained = assemble(&g, move |i, j| {
            let pt = KernelPoint::new(g2.points[i], g2.points[j], 0.0);
            let l = gauge_chain_lambda(om.value(&pt.x), lambda_a(&a, &pt.x, &pt.y), om.value(&pt.y));
            Ok(p_minus(&pt.w(), M)? * phase(l))
        }, DiagonalRule::Exclude).unwrap();
        let n = g.len();
        let conj = Mat::<c64>::from_fn(4 * n, 4 * n, |r, c| {
            let ox = om.value(&g.points[r / 4]);
            let oy = om.value(&g.points[c / 4]);
            p.matrix[(r, c)] * to_c64(phase(ox) * phase(-oy))
        });
        let scale = max_abs(&p.matrix);
        assert!(max_abs(&(&conj - &chained.matrix)) <= 1e-15 * scale.max(1.0) * 4.0);
    }

    #[test]
    fn conormal_field_component_is_supported_in_assembly() {
        let g = curved_grid(4);
        let a = ExternalField::zero().with(FieldComponent::Conormal {
            amplitude: 0.5,
            bump: Bump { center: [0.0; 4], radius: 1.0 },
            surface: g.surface.clone(),
        });
        let op = assemble_delta_p(&g, &a, M).unwrap();
        assert!(op.hs_norm().is_finite());
        let _ = FourVector::basis(0);
    }

    #[test]
    fn dense_representative_pipeline() {
        let g = flat_grid(4, 1.5);
        let fam = p_lambda(&g, &field(), M, 0.2).unwrap();
        assert!(!fam.approximate);
        assert!(fam.p_lambda.self_adjoint_defect().unwrap() <= 1e-10);
        let q = q_commutator(&fam.p_lambda, &fam.p_minus).unwrap();
        assert!(q.skew_adjoint_defect().unwrap() <= 1e-10);
        let (d_minus, d_plus) = diagonal_blocks(&q, &fam.p_minus).unwrap();
        assert!(d_minus <= 1e-10 && d_plus <= 1e-10);
        let u = exp_unitary(&q).unwrap();
        assert!(u.unitarity_defect().unwrap() <= 1e-10);
        let (pi, report) = representative_projector(&fam.p_minus, &q, &fam.p_lambda).unwrap();
        let oracle_defect = fam.p_minus.projector_defect().unwrap();
        assert!(report.projector_defect <= 1e-10 + oracle_defect);
        assert!(report.hs_norm >= report.op_norm);
        assert!(pi.self_adjoint_defect().unwrap() <= 1e-10);
    }

    #[test]
    fn zero_field_gives_trivial_representative() {
        let g = flat_grid(4, 1.5);
        let fam = p_lambda(&g, &ExternalField::zero(), M, 0.2).unwrap();
        let q = q_commutator(&fam.p_lambda, &fam.p_minus).unwrap();
        assert_eq!(max_abs(&q.matrix), 0.0);
        let u = exp_unitary(&q).unwrap();
        assert!(max_abs(&(&u.matrix - identity(u.dim()))) <= 1e-14);
        let (pi, _) = representative_projector(&fam.p_minus, &q, &fam.p_lambda).unwrap();
        assert!(max_abs(&(&pi.matrix - &fam.p_minus.matrix)) <= 1e-13);
    }

    #[test]
    fn non_skew_input_is_rejected() {
        let g = flat_grid(4, 1.5);
        assert!(matches!(exp_unitary(&DiscretizedOperator::identity(&g)), Err(CauchyError::NotSkewAdjoint(_))));
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = DiscretizedOperator::zeros(&flat_grid(4, 1.5));
        let b = DiscretizedOperator::zeros(&flat_grid(4, 2.0));
        assert!(matches!(q_commutator(&a, &b), Err(CauchyError::GridMismatch)));
    }
}
