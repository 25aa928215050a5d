//! The representative projector `Pi = e^Q P^- e^{-Q}` on flat grids too large for
//! dense matrices.
//!
//! `Delta P` only couples pairs with at least one node in the field support `K`, so
//! `Delta P = E_K R + C E_K^dagger` with `E_K` the coordinate columns of `K`. The
//! subspace `W = span[E_K, C, P E_K, P C]` contains the ranges of `Delta P` and `Q`
//! and is invariant under the spectral `P^-`, so `e^Q`, `Pi` and every defect reduce
//! to matrices of size `dim W`.
//!
//! Formula: `commutator-Q`, `unitary-exp`, `representative-Pi`, `Q-block-structure`

use std::sync::Arc;

use faer::{c64, Mat, Scale};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circulant::{pminus_flat_oracle, pminus_wilson, BlockCirculant};
use super::linalg::{exp_skew_hermitian, frobenius, identity, max_abs, orthonormal_basis, singular_values, spectral_norm, to_c64};
use super::{diagonal_blocks, exp_unitary, p_lambda, q_commutator, representative_projector, SKEW_TOLERANCE};
use crate::error::{CauchyError, Result};
use crate::field::ExternalField;
use crate::minkowski::{SpinorMatrix, C64};
use crate::kernels::{delta_p_kernel, phase_minus_one, KernelPoint};
use crate::surface::SurfaceGrid;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentativeReport {
    pub per_axis: usize,
    pub half_width: f64,
    pub support_nodes: usize,
    pub subspace_dim: usize,
    pub q_skew_defect: f64,
    pub unitarity_defect: f64,
    pub inverse_defect: f64,
    pub oracle_projector_defect: f64,
    pub pi_projector_defect: f64,
    pub diagonal_block_minus: f64,
    pub diagonal_block_plus: f64,
    /// `|Pi - P^A|_HS`.
    pub hs_pi_minus_pa: f64,
    pub op_pi_minus_pa: f64,
    /// `|P^A - P^-|_HS`.
    pub hs_pa_minus_p: f64,
    /// `|P^- Delta P P^- + P^+ Delta P P^+|_HS`.
    pub hs_delta_diagonal: f64,
    pub top_singular_values: Vec<f64>,
}

/// Nodes where the field potential is nonzero.
pub fn support_nodes(grid: &SurfaceGrid, field: &ExternalField) -> Vec<usize> {
    (0..grid.len()).filter(|&i| field.potential(&grid.points[i]).iter().any(|a| *a != 0.0)).collect()
}

/// Block columns of `Delta P` at the nodes `k`, diagonal blocks excluded.
fn delta_p_columns(grid: &SurfaceGrid, field: &ExternalField, nodes: &[usize], m: f64) -> Result<Mat<c64>> {
    let n = grid.len();
    let blocks: Vec<Vec<SpinorMatrix>> = nodes
        .par_iter()
        .map(|&j| {
            (0..n)
                .map(|i| {
                    if i == j {
                        return Ok(SpinorMatrix::zeros());
                    }
                    let k = delta_p_kernel(field, &KernelPoint::new(grid.points[i], grid.points[j], 0.0), m)?;
                    Ok(k * grid.gammas[j] * C64::new(grid.weights[j], 0.0))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_fn(4 * n, 4 * nodes.len(), |r, c| to_c64(blocks[c / 4][r / 4][(r % 4, c % 4)])))
}

/// `e^{-i lambda^A(x_i, x_j)} - 1` on the periodic grid, with `x_j` replaced by its
/// image nearest to `x_i`.
pub fn periodic_phase_minus_one(grid: &SurfaceGrid, field: &ExternalField, i: usize, j: usize) -> C64 {
    let (x, y) = (grid.points[i], grid.points[j]);
    let box_len = 2.0 * grid.half_width;
    let mut image = y;
    for k in 1..4 {
        let d = y.0[k] - x.0[k];
        image.0[k] = x.0[k] + d - box_len * (d / box_len).round();
    }
    let (ax, ay) = (field.potential(&x), field.potential(&y));
    phase_minus_one(0.5 * (0..4).map(|k| (ax[k] + ay[k]) * (x.0[k] - image.0[k])).sum::<f64>())
}

/// Block columns at `nodes` of the Schur product `(e^{-i lambda^A} - 1) o P`.
fn lattice_delta_p_columns(grid: &SurfaceGrid, field: &ExternalField, nodes: &[usize], p: &BlockCirculant) -> Mat<c64> {
    let pc = p.columns(nodes);
    let phases: Vec<Vec<C64>> =
        nodes.iter().map(|&j| (0..grid.len()).map(|i| periodic_phase_minus_one(grid, field, i, j)).collect()).collect();
    Mat::from_fn(pc.nrows(), pc.ncols(), |r, c| pc[(r, c)] * to_c64(phases[c / 4][r / 4]))
}

fn unit_columns(a: &Mat<c64>) -> Mat<c64> {
    let mut out = a.clone();
    for j in 0..a.ncols() {
        let norm = a.col(j).norm_l2();
        if norm > 0.0 {
            for i in 0..a.nrows() {
                out[(i, j)] = a[(i, j)] / norm;
            }
        }
    }
    out
}

fn hcat(parts: &[&Mat<c64>]) -> Mat<c64> {
    let rows = parts[0].nrows();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Mat::<c64>::zeros(rows, cols);
    let mut off = 0;
    for p in parts {
        for j in 0..p.ncols() {
            for i in 0..rows {
                out[(i, off + j)] = p[(i, j)];
            }
        }
        off += p.ncols();
    }
    out
}

fn finish(
    grid: &SurfaceGrid,
    support: usize,
    ps: &Mat<c64>,
    dps: &Mat<c64>,
    q: &Mat<c64>,
    oracle_defect: f64,
) -> Result<RepresentativeReport> {
    let d = ps.nrows();
    let skew = spectral_norm(&(q + q.adjoint()))?;
    if max_abs(&(q + q.adjoint())) > SKEW_TOLERANCE * (1.0 + max_abs(q)) {
        return Err(CauchyError::NotSkewAdjoint(skew));
    }
    let e = exp_skew_hermitian(q)?;
    let e_inv = exp_skew_hermitian(&(q * Scale(c64::new(-1.0, 0.0))))?;
    let pi = &e * ps * &e_inv;
    let diff = &pi - ps - dps;
    let sv = singular_values(&diff)?;
    let comp = identity(d) - ps;
    Ok(RepresentativeReport {
        per_axis: grid.per_axis,
        half_width: grid.half_width,
        support_nodes: support,
        subspace_dim: d,
        q_skew_defect: skew,
        unitarity_defect: spectral_norm(&(&e * e.adjoint() - identity(d)))?,
        inverse_defect: spectral_norm(&(&e * &e_inv - identity(d)))?,
        oracle_projector_defect: oracle_defect,
        pi_projector_defect: spectral_norm(&(&pi * &pi - &pi))? + oracle_defect,
        diagonal_block_minus: spectral_norm(&(ps * q * ps))?,
        diagonal_block_plus: spectral_norm(&(&comp * q * &comp))?,
        hs_pi_minus_pa: frobenius(&diff),
        op_pi_minus_pa: sv.first().copied().unwrap_or(0.0),
        hs_pa_minus_p: frobenius(dps),
        hs_delta_diagonal: frobenius(&(ps * dps * ps + &comp * dps * &comp)),
        top_singular_values: sv.into_iter().take(50).collect(),
    })
}

/// How `Delta P` is discretized next to the spectral `P^-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaModel {
    /// Nystrom assembly of the continuum kernel at `eps = 0`.
    Kernel,
    /// Entrywise phase factors applied to the spectral projector.
    Lattice,
    /// Entrywise phase factors applied to the Wilson lattice projector, which also
    /// replaces the spectral `P^-`.
    Wilson,
}

/// Structured evaluation on a flat periodic grid.
pub fn representative_lowrank(
    grid: &Arc<SurfaceGrid>,
    field: &ExternalField,
    m: f64,
    model: DeltaModel,
    rank_rtol: f64,
) -> Result<RepresentativeReport> {
    let p = match model {
        DeltaModel::Wilson => pminus_wilson(grid, m)?,
        _ => pminus_flat_oracle(grid, m)?,
    };
    let oracle_defect = p.projector_defect();
    let k = support_nodes(grid, field);
    if k.is_empty() {
        return Ok(RepresentativeReport {
            per_axis: grid.per_axis,
            half_width: grid.half_width,
            support_nodes: 0,
            subspace_dim: 0,
            q_skew_defect: 0.0,
            unitarity_defect: 0.0,
            inverse_defect: 0.0,
            oracle_projector_defect: oracle_defect,
            pi_projector_defect: oracle_defect,
            diagonal_block_minus: 0.0,
            diagonal_block_plus: 0.0,
            hs_pi_minus_pa: 0.0,
            op_pi_minus_pa: 0.0,
            hs_pa_minus_p: 0.0,
            hs_delta_diagonal: 0.0,
            top_singular_values: vec![],
        });
    }
    let dim = 4 * grid.len();
    let cols: Vec<usize> = k.iter().flat_map(|&j| (0..4).map(move |a| 4 * j + a)).collect();
    let e_k = Mat::<c64>::from_fn(dim, cols.len(), |r, c| if r == cols[c] { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
    let c_full = match model {
        DeltaModel::Kernel => delta_p_columns(grid, field, &k, m)?,
        DeltaModel::Lattice | DeltaModel::Wilson => lattice_delta_p_columns(grid, field, &k, &p),
    };
    // C with the K rows removed, so that E_K C_full^dagger + C E_K^dagger counts K x K once
    let mut c_off = c_full.clone();
    for &r in &cols {
        for j in 0..c_off.ncols() {
            c_off[(r, j)] = c64::new(0.0, 0.0);
        }
    }
    let pe = p.columns(&k);
    let pc = p.apply_columns(&c_off);
    let w = orthonormal_basis(&hcat(&[&e_k, &unit_columns(&c_off), &unit_columns(&pe), &unit_columns(&pc)]), rank_rtol);
    let pw = p.apply_columns(&w);
    let ps_raw = w.adjoint() * &pw;
    let ps = (&ps_raw + ps_raw.adjoint()) * Scale(c64::new(0.5, 0.0));
    // W^dagger Delta P W = W_K^dagger (C_full^dagger W) + (W^dagger C_off) W_K
    let w_k = Mat::<c64>::from_fn(cols.len(), w.ncols(), |i, j| w[(cols[i], j)]);
    let dps = w_k.adjoint() * (c_full.adjoint() * &w) + (w.adjoint() * &c_off) * &w_k;
    let q = &dps * &ps - &ps * &dps;
    let mut report = finish(grid, k.len(), &ps, &dps, &q, oracle_defect)?;
    // the restriction must carry all of Delta P
    let full = (frobenius(&c_full).powi(2) + frobenius(&c_off).powi(2)).sqrt();
    if (report.hs_pa_minus_p - full).abs() > 1e-8 * full.max(1e-300) {
        return Err(CauchyError::Convergence(format!(
            "subspace misses part of Delta P: {} vs {full}",
            report.hs_pa_minus_p
        )));
    }
    report.hs_pa_minus_p = full;
    Ok(report)
}

/// Dense `Delta P` on a flat periodic grid, next to the projector it perturbs.
fn flat_delta_p(grid: &SurfaceGrid, field: &ExternalField, m: f64, model: DeltaModel) -> Result<(BlockCirculant, Mat<c64>)> {
    let p = match model {
        DeltaModel::Wilson => pminus_wilson(grid, m)?,
        _ => pminus_flat_oracle(grid, m)?,
    };
    let offsets = p.offsets();
    let n = grid.len();
    let cols: Vec<Vec<SpinorMatrix>> = (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|i| flat_delta_block(grid, field, m, model, &p.block(&offsets, i, j), i, j)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut out = Mat::<c64>::zeros(4 * n, 4 * n);
    for (j, col) in cols.iter().enumerate() {
        for (i, b) in col.iter().enumerate() {
            for a in 0..4 {
                for c in 0..4 {
                    out[(4 * i + a, 4 * j + c)] = to_c64(b[(a, c)]);
                }
            }
        }
    }
    Ok((p, out))
}

fn flat_delta_block(
    grid: &SurfaceGrid,
    field: &ExternalField,
    m: f64,
    model: DeltaModel,
    p_block: &SpinorMatrix,
    i: usize,
    j: usize,
) -> Result<SpinorMatrix> {
    match model {
        DeltaModel::Kernel => {
            if i == j {
                return Ok(SpinorMatrix::zeros());
            }
            let k = delta_p_kernel(field, &KernelPoint::new(grid.points[i], grid.points[j], 0.0), m)?;
            Ok(k * grid.gammas[j] * C64::new(grid.weights[j], 0.0))
        }
        _ => Ok(p_block * periodic_phase_minus_one(grid, field, i, j)),
    }
}

/// `|P^- Delta P P^- + P^+ Delta P P^+|_HS` on a flat periodic grid, the first-order
/// part of `|Pi - P^A|_HS`.
pub fn flat_delta_diagonal_hs(grid: &SurfaceGrid, field: &ExternalField, m: f64, model: DeltaModel) -> Result<f64> {
    let (p, dp) = flat_delta_p(grid, field, m, model)?;
    Ok(diagonal_part_hs(&p, &dp))
}

fn diagonal_part_hs(p: &BlockCirculant, dp: &Mat<c64>) -> f64 {
    let complement = p.complement();
    let mut minus = dp.clone();
    p.apply_columns_inplace(&mut minus);
    p.apply_rows_inplace(&mut minus);
    let mut plus = dp.clone();
    complement.apply_columns_inplace(&mut plus);
    complement.apply_rows_inplace(&mut plus);
    minus += &plus;
    frobenius(&minus)
}

/// Dense evaluation on a flat periodic grid, applying `P^-` through FFTs so that at most
/// a few full matrices are alive at once. Defects are reported through Frobenius norms,
/// which bound the operator norms from above.
pub fn representative_flat_dense(
    grid: &Arc<SurfaceGrid>,
    field: &ExternalField,
    m: f64,
    model: DeltaModel,
) -> Result<RepresentativeReport> {
    let (p, mut q) = flat_delta_p(grid, field, m, model)?;
    let oracle_defect = p.projector_defect();
    let offsets = p.offsets();
    let n = grid.len();
    let dim = 4 * n;
    let support = support_nodes(grid, field).len();
    let complement = p.complement();

    // Q = Delta P P - P Delta P
    let hs_pa_minus_p = frobenius(&q);
    let hs_delta_diagonal = diagonal_part_hs(&p, &q);
    let mut left = q.clone();
    p.apply_columns_inplace(&mut left);
    p.apply_rows_inplace(&mut q);
    q -= &left;
    drop(left);
    let q_skew_defect = frobenius(&(&q + q.adjoint()));
    if max_abs(&(&q + q.adjoint())) > SKEW_TOLERANCE * (1.0 + max_abs(&q)) {
        return Err(CauchyError::NotSkewAdjoint(q_skew_defect));
    }
    let block_defect = |proj: &BlockCirculant| {
        let mut b = q.clone();
        proj.apply_columns_inplace(&mut b);
        proj.apply_rows_inplace(&mut b);
        frobenius(&b)
    };
    let diagonal_block_minus = block_defect(&p);
    let diagonal_block_plus = block_defect(&complement);

    // e^{+-Q} from the eigendecomposition of the Hermitian i Q
    let herm = (&q - q.adjoint()) * Scale(c64::new(0.0, 0.5));
    drop(q);
    let (vals, u) = super::linalg::hermitian_eigen(&herm)?;
    drop(herm);
    let e = {
        let scaled = Mat::<c64>::from_fn(dim, dim, |i, j| u[(i, j)] * c64::new(vals[j].cos(), -vals[j].sin()));
        &scaled * u.adjoint()
    };
    drop(u);
    // e^{-Q} is taken as (e^Q)^dagger, so one product measures both defects
    let unitarity_defect = frobenius(&(e.adjoint() * &e - identity(dim)));
    let inverse_defect = unitarity_defect;

    // Pi = e^Q P e^{-Q}
    let mut pi = {
        let mut right = e.adjoint().to_owned();
        p.apply_columns_inplace(&mut right);
        &e * &right
    };
    drop(e);
    // with G = E^dagger E - 1 and R = P^2 - P: Pi^2 - Pi = E (R + P G P) E^dagger
    let pi_projector_defect =
        (1.0 + unitarity_defect) * (oracle_defect + (1.0 + oracle_defect).powi(2) * unitarity_defect);

    // Pi - P^A = Pi - P - Delta P, Hermitian up to rounding
    let subtract: Vec<Vec<SpinorMatrix>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    let pb = p.block(&offsets, i, j);
                    Ok(pb + flat_delta_block(grid, field, m, model, &pb, i, j)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for (j, col) in subtract.iter().enumerate() {
        for (i, b) in col.iter().enumerate() {
            for a in 0..4 {
                for c in 0..4 {
                    pi[(4 * i + a, 4 * j + c)] -= to_c64(b[(a, c)]);
                }
            }
        }
    }
    drop(subtract);
    let hs_pi_minus_pa = frobenius(&pi);
    let herm = (&pi + pi.adjoint()) * Scale(c64::new(0.5, 0.0));
    drop(pi);
    let sv = if dim <= EXACT_SPECTRUM_DIM {
        let mut sv: Vec<f64> = herm
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|err| CauchyError::Convergence(format!("Hermitian eigensolver: {err:?}")))?
            .into_iter()
            .map(f64::abs)
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    } else {
        vec![power_norm(&herm, 200)]
    };
    Ok(RepresentativeReport {
        per_axis: grid.per_axis,
        half_width: grid.half_width,
        support_nodes: support,
        subspace_dim: dim,
        q_skew_defect,
        unitarity_defect,
        inverse_defect,
        oracle_projector_defect: oracle_defect,
        pi_projector_defect,
        diagonal_block_minus,
        diagonal_block_plus,
        hs_pi_minus_pa,
        op_pi_minus_pa: sv.first().copied().unwrap_or(0.0),
        hs_pa_minus_p,
        hs_delta_diagonal,
        top_singular_values: sv.into_iter().take(50).collect(),
    })
}

/// Largest dimension for which the full spectrum of `Pi - P^A` is computed.
pub const EXACT_SPECTRUM_DIM: usize = 3000;

/// Spectral norm of a Hermitian matrix by power iteration on its square.
fn power_norm(h: &Mat<c64>, iterations: usize) -> f64 {
    let n = h.nrows();
    let mut v = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    let mut est = 0.0;
    for _ in 0..iterations {
        let w = h * &v;
        let norm = w.norm_l2();
        if norm == 0.0 {
            return 0.0;
        }
        est = norm / v.norm_l2();
        v = w * Scale(c64::new(1.0 / norm, 0.0));
    }
    est
}

/// Same quantities from dense matrices, for small grids.
pub fn representative_dense(grid: &Arc<SurfaceGrid>, field: &ExternalField, m: f64) -> Result<RepresentativeReport> {
    let fam = p_lambda(grid, field, m, 0.0)?;
    let q = q_commutator(&fam.p_lambda, &fam.p_minus)?;
    let u = exp_unitary(&q)?;
    let neg = super::DiscretizedOperator { matrix: &q.matrix * Scale(c64::new(-1.0, 0.0)), ..q.clone() };
    let u_inv = exp_unitary(&neg)?;
    let oracle_defect = fam.p_minus.projector_defect()?;
    let (_, rep) = representative_projector(&fam.p_minus, &q, &fam.p_lambda)?;
    let (dm, dp) = diagonal_blocks(&q, &fam.p_minus)?;
    Ok(RepresentativeReport {
        per_axis: grid.per_axis,
        half_width: grid.half_width,
        support_nodes: support_nodes(grid, field).len(),
        subspace_dim: q.dim(),
        q_skew_defect: q.skew_adjoint_defect()?,
        unitarity_defect: u.unitarity_defect()?,
        inverse_defect: u.compose(&u_inv)?.sub(&super::DiscretizedOperator::identity(grid))?.op_norm()?,
        oracle_projector_defect: oracle_defect,
        pi_projector_defect: rep.projector_defect,
        diagonal_block_minus: dm,
        diagonal_block_plus: dp,
        hs_pi_minus_pa: rep.hs_norm,
        op_pi_minus_pa: rep.op_norm,
        hs_pa_minus_p: fam.delta_p.hs_norm(),
        hs_delta_diagonal: {
            let p = fam.p_minus.symmetrized();
            let d = fam.delta_p.symmetrized();
            let c = identity(p.nrows()) - &p;
            frobenius(&(&p * &d * &p + &c * &d * &c))
        },
        top_singular_values: rep.top_singular_values,
    })
}
