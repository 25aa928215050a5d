//! The flow derivative `D_t^A` of kernels along a family of Cauchy surfaces, its
//! leading term, the counter-kernel `s` that cancels it, and the Hilbert-Schmidt size
//! of the remainder.
//!
//! For a kernel `k(x, y)` on the slice `Sigma_s` with normal speed `v` and normal `n`:
//! `D_t^A k = v(x) nslash(x) D^A_x k - (k <-D^A_y) v(y) nslash(y)` where
//! `D^A_x = i dslash_x - Aslash(x) - m` and `k <-D^A_y = -i d^y_mu k gamma^mu - k Aslash(y) - m k`.
//! Every derivative is analytic. The normal is extended off the slice independently
//! of `x^0`.
//!
//! Formula: `flow-derivative`, `leading-term`, `counter-kernel`, `counter-rate`,
//! `r2-dslash-derivative`, `remainder-kernel`

use nalgebra::Matrix4;
use serde::Serialize;

use crate::conventions::dirac_gammas;
use crate::error::{CauchyError, Result};
use crate::field::ExternalField;
use crate::kernels::{d_eval, lambda_a, p_minus_from, phase, DEval, KernelPoint};
use crate::minkowski::{slash_lower, slash_real, FourVector, SpinorMatrix, C64};
use crate::operators::sparse_hs_squared;
use crate::stats::{fit_loglog, logspace, relative_change, LineFit};
use crate::surface::{make_grid, QuadratureRule, SurfaceFamily};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowEval {
    /// `D_t^A p^{A, eps u}`.
    pub flow_p: SpinorMatrix,
    /// `-(i/2m) v(x) z^mu E_mu(x) dslash D(w)`.
    pub leading: SpinorMatrix,
    /// `D_t^A (p^{A, eps u} + s^{A, eps u})`.
    pub flow_p_plus_s: SpinorMatrix,
    pub z_norm: f64,
    pub epsilon: f64,
}

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn slash_real_lower(a: &[f64; 4]) -> SpinorMatrix {
    slash_lower(&a.map(real))
}

/// `d_mu p^-(w) = (-i gamma^nu d_nu d_mu D + m d_mu D) / 2m`.
fn p_minus_derivatives(e: &DEval, m: f64) -> [SpinorMatrix; 4] {
    std::array::from_fn(|mu| {
        let col: [C64; 4] = std::array::from_fn(|nu| e.hess[(nu, mu)]);
        (slash_lower(&col) * (-I) + SpinorMatrix::identity() * (e.grad[mu] * m)) / real(2.0 * m)
    })
}

/// `d_nu (r^2 dslash D) = -2 w_nu dslash D + r^2 gamma^mu d_mu d_nu D`.
pub fn r2_dslash_derivatives(e: &DEval) -> [SpinorMatrix; 4] {
    let wl = e.w.lower();
    let ds = e.dslash();
    let r2 = e.r * e.r;
    std::array::from_fn(|nu| {
        let col: [C64; 4] = std::array::from_fn(|mu| e.hess[(mu, nu)]);
        ds * (wl[nu] * -2.0) + slash_lower(&col) * r2
    })
}

/// `D^A_x k` from `k` and its `x` derivatives.
fn dirac_left(k: &SpinorMatrix, dk: &[SpinorMatrix; 4], a: &[f64; 4], m: f64) -> SpinorMatrix {
    let g = dirac_gammas();
    let mut out = -(slash_real_lower(a) * k) - k * real(m);
    for mu in 0..4 {
        out += g[mu] * dk[mu] * I;
    }
    out
}

/// `k <-D^A_y` from `k` and its `y` derivatives.
fn dirac_right(k: &SpinorMatrix, dk: &[SpinorMatrix; 4], a: &[f64; 4], m: f64) -> SpinorMatrix {
    let g = dirac_gammas();
    let mut out = -(k * slash_real_lower(a)) - k * real(m);
    for mu in 0..4 {
        out -= dk[mu] * g[mu] * I;
    }
    out
}

/// Gradients of `lambda^A` in `x` and in `y`, lower index.
fn lambda_gradients(field: &ExternalField, x: &FourVector, y: &FourVector) -> ([f64; 4], [f64; 4]) {
    let (ax, ay) = (field.potential(x), field.potential(y));
    let (jx, jy) = (field.jacobian(x), field.jacobian(y));
    let d: [f64; 4] = std::array::from_fn(|k| x.0[k] - y.0[k]);
    let gx = std::array::from_fn(|mu| 0.5 * (0..4).map(|nu| jx[mu][nu] * d[nu]).sum::<f64>() + 0.5 * (ax[mu] + ay[mu]));
    let gy = std::array::from_fn(|mu| 0.5 * (0..4).map(|nu| jy[mu][nu] * d[nu]).sum::<f64>() - 0.5 * (ax[mu] + ay[mu]));
    (gx, gy)
}

/// `nslash E slash` at `x` and its derivatives `d_mu`, with `E_mu = F_{mu nu} n^nu`.
fn normal_electric_jet(family: &SurfaceFamily, s: f64, field: &ExternalField, x: &FourVector) -> Result<(SpinorMatrix, [SpinorMatrix; 4])> {
    let xs = [x.0[1], x.0[2], x.0[3]];
    let geo = family.slice(s).geometry(&xs);
    let n = geo.normal;
    if !field.in_support(x) {
        return Ok((SpinorMatrix::zeros(), [SpinorMatrix::zeros(); 4]));
    }
    let f = field.field_strength(x);
    let df = field.field_strength_derivatives(x)?;
    let electric = |fm: &Matrix4<f64>, nv: &[f64; 4]| -> [f64; 4] { std::array::from_fn(|a| (0..4).map(|b| fm[(a, b)] * nv[b]).sum()) };
    let n_slash = slash_real(&n);
    let e = electric(&f, &n.0);
    let value = n_slash * slash_real_lower(&e);
    let derivs = std::array::from_fn(|mu| {
        // the normal does not depend on x^0
        let dn: [f64; 4] = if mu == 0 { [0.0; 4] } else { geo.normal_jacobian[mu - 1] };
        let de: [f64; 4] = std::array::from_fn(|a| electric(&df[mu], &n.0)[a] + electric(&f, &dn)[a]);
        slash_real(&FourVector(dn)) * slash_real_lower(&e) + n_slash * slash_real_lower(&de)
    });
    Ok((value, derivs))
}

/// Spatial point `x` lifted onto the slice `Sigma_s`.
pub fn on_slice(family: &SurfaceFamily, s: f64, x: &[f64; 3]) -> FourVector {
    family.slice(s).embed(x)
}

pub fn flow_derivative_kernel(
    family: &SurfaceFamily,
    s: f64,
    field: &ExternalField,
    x: &[f64; 3],
    y: &[f64; 3],
    epsilon: f64,
    m: f64,
) -> Result<FlowEval> {
    Ok(flow_eval(family, s, field, x, y, epsilon, m)?.0)
}

fn flow_eval(
    family: &SurfaceFamily,
    s: f64,
    field: &ExternalField,
    x: &[f64; 3],
    y: &[f64; 3],
    epsilon: f64,
    m: f64,
) -> Result<(FlowEval, DEval)> {
    let (px, py) = (on_slice(family, s, x), on_slice(family, s, y));
    let pt = KernelPoint::new(px, py, epsilon);
    let e = d_eval(&pt.w(), m)?;
    let z = py - px;
    let (vx, nx) = family.velocity(x, s);
    let (vy, ny) = family.velocity(y, s);
    let (nsx, nsy) = (slash_real(&nx), slash_real(&ny));
    let (ax, ay) = (field.potential(&px), field.potential(&py));

    // p^{A, eps u} = e^{-i lambda} p^-(w), w = y - x + i eps u
    let ph = phase(lambda_a(field, &px, &py));
    let p = p_minus_from(&e, m);
    let dp = p_minus_derivatives(&e, m);
    let (glx, gly) = lambda_gradients(field, &px, &py);
    let k = p * ph;
    let dkx: [SpinorMatrix; 4] = std::array::from_fn(|mu| (p * (-I * glx[mu]) - dp[mu]) * ph);
    let dky: [SpinorMatrix; 4] = std::array::from_fn(|mu| (p * (-I * gly[mu]) + dp[mu]) * ph);
    let flow = |l: SpinorMatrix, r: SpinorMatrix| nsx * l * real(vx) - r * nsy * real(vy);
    let flow_p = flow(dirac_left(&k, &dkx, &ax, m), dirac_right(&k, &dky, &ay, m));

    // s = (1/8m) N(x) G(w), N = nslash Eslash, G = r^2 dslash D
    let (ne, dne) = normal_electric_jet(family, s, field, &px)?;
    let g = e.dslash() * (e.r * e.r);
    let dg = r2_dslash_derivatives(&e);
    let c = real(1.0 / (8.0 * m));
    let sk = ne * g * c;
    let dsx: [SpinorMatrix; 4] = std::array::from_fn(|mu| (dne[mu] * g - ne * dg[mu]) * c);
    let dsy: [SpinorMatrix; 4] = std::array::from_fn(|mu| ne * dg[mu] * c);
    let flow_s = flow(dirac_left(&sk, &dsx, &ax, m), dirac_right(&sk, &dsy, &ay, m));

    let electric = field.electric_field(&px, &nx);
    let z_e: f64 = (0..4).map(|mu| z.0[mu] * electric[mu]).sum();
    let leading = e.dslash() * (-I * (vx * z_e / (2.0 * m)));
    Ok((FlowEval { flow_p, leading, flow_p_plus_s: flow_p + flow_s, z_norm: z.spatial_norm(), epsilon }, e))
}

/// `d s / d s_flow` at fixed spacetime points: `(1/8m) [d nslash Eslash + nslash (F dn)slash] r^2 dslash D`.
pub fn s_dot_kernel(
    family: &SurfaceFamily,
    s: f64,
    field: &ExternalField,
    x: &[f64; 3],
    y: &[f64; 3],
    epsilon: f64,
    m: f64,
) -> Result<SpinorMatrix> {
    let (px, py) = (on_slice(family, s, x), on_slice(family, s, y));
    s_dot_at(family, s, field, &KernelPoint::new(px, py, epsilon), m)
}

fn s_dot_at(family: &SurfaceFamily, s: f64, field: &ExternalField, pt: &KernelPoint, m: f64) -> Result<SpinorMatrix> {
    match s_dot_rate(family, s, field, &pt.x) {
        None => Ok(SpinorMatrix::zeros()),
        Some(rate) => {
            let ev = d_eval(&pt.w(), m)?;
            Ok(rate * ev.dslash() * (ev.r * ev.r) / real(8.0 * m))
        }
    }
}

/// `d (nslash Eslash) / d s_flow` at `x`, or `None` where it vanishes identically.
fn s_dot_rate(family: &SurfaceFamily, s: f64, field: &ExternalField, x: &FourVector) -> Option<SpinorMatrix> {
    let xs = [x.0[1], x.0[2], x.0[3]];
    let dn = family.normal_rate(&xs, s);
    if !field.in_support(x) || dn.0.iter().all(|v| *v == 0.0) {
        return None;
    }
    let n = family.slice(s).normal(&xs);
    let f = field.field_strength(x);
    let e: [f64; 4] = std::array::from_fn(|a| (0..4).map(|b| f[(a, b)] * n.0[b]).sum());
    let de: [f64; 4] = std::array::from_fn(|a| (0..4).map(|b| f[(a, b)] * dn.0[b]).sum());
    Some(slash_real(&dn) * slash_real_lower(&e) + slash_real(&n) * slash_real_lower(&de))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingStatus {
    Fitted,
    /// The field vanishes, so both kernels vanish and nothing is fitted.
    ZeroField,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSample {
    pub z_norm: f64,
    pub flow_p: f64,
    pub flow_p_plus_s: f64,
    /// `|D_t^A p - leading| |z|`.
    pub scaled_leading_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub status: ScalingStatus,
    pub epsilon: f64,
    pub without_s: Option<LineFit>,
    pub with_s: Option<LineFit>,
    pub samples: Vec<ScalingSample>,
}

impl ScalingReport {
    pub fn slope_gap(&self) -> Option<f64> {
        Some(self.with_s?.slope - self.without_s?.slope)
    }
}

/// Pairs `x = c - z d/2`, `y = c + z d/2` about `center` along the unit direction `d`.
pub fn symmetric_pair(center: &[f64; 3], dir: &[f64; 3], z: f64) -> ([f64; 3], [f64; 3]) {
    let x = std::array::from_fn(|k| center[k] - 0.5 * z * dir[k]);
    let y = std::array::from_fn(|k| center[k] + 0.5 * z * dir[k]);
    (x, y)
}

/// Log-log slopes of `|D_t^A p|` and `|D_t^A (p + s)|` over `|z|` samples in
/// `[z_min, z_max]`, taken along the direction `dir` about `center`.
#[allow(clippy::too_many_arguments)]
pub fn residual_scaling(
    family: &SurfaceFamily,
    s: f64,
    field: &ExternalField,
    epsilon: f64,
    center: &[f64; 3],
    dir: &[f64; 3],
    z_range: (f64, f64),
    samples: usize,
    m: f64,
) -> Result<ScalingReport> {
    if field.is_zero() {
        return Ok(ScalingReport { status: ScalingStatus::ZeroField, epsilon, without_s: None, with_s: None, samples: vec![] });
    }
    let zs = logspace(z_range.0, z_range.1, samples);
    let norm = crate::minkowski::spinor_frobenius;
    let rows = zs
        .iter()
        .map(|&z| {
            let (x, y) = symmetric_pair(center, dir, z);
            let f = flow_derivative_kernel(family, s, field, &x, &y, epsilon, m)?;
            Ok(ScalingSample {
                z_norm: f.z_norm,
                flow_p: norm(&f.flow_p),
                flow_p_plus_s: norm(&f.flow_p_plus_s),
                scaled_leading_residual: norm(&(f.flow_p - f.leading)) * f.z_norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let z: Vec<f64> = rows.iter().map(|r| r.z_norm).collect();
    let a: Vec<f64> = rows.iter().map(|r| r.flow_p).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.flow_p_plus_s).collect();
    Ok(ScalingReport {
        status: ScalingStatus::Fitted,
        epsilon,
        without_s: Some(fit_loglog(&z, &a)?),
        with_s: Some(fit_loglog(&z, &b)?),
        samples: rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonScaling {
    pub epsilons: Vec<f64>,
    /// `|D_t^A (p + s)(eps) - D_t^A (p + s)(0)|`.
    pub deviations: Vec<f64>,
    pub fit: LineFit,
}

/// Exponent of the approach of `D_t^A (p + s)` to its `eps = 0` value at one pair.
#[allow(clippy::too_many_arguments)]
pub fn epsilon_scaling(
    family: &SurfaceFamily,
    s: f64,
    field: &ExternalField,
    x: &[f64; 3],
    y: &[f64; 3],
    epsilons: &[f64],
    m: f64,
) -> Result<EpsilonScaling> {
    let limit = flow_derivative_kernel(family, s, field, x, y, 0.0, m)?.flow_p_plus_s;
    let deviations = epsilons
        .iter()
        .map(|&eps| Ok(crate::minkowski::spinor_frobenius(&(flow_derivative_kernel(family, s, field, x, y, eps, m)?.flow_p_plus_s - limit))))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_loglog(epsilons, &deviations)?;
    Ok(EpsilonScaling { epsilons: epsilons.to_vec(), deviations, fit })
}

/// Remainder kernel `D_t^A (p + s) + d s / d s_flow` at `eps = 0`.
pub fn remainder_kernel(family: &SurfaceFamily, s: f64, field: &ExternalField, x: &[f64; 3], y: &[f64; 3], m: f64) -> Result<SpinorMatrix> {
    let (f, e) = flow_eval(family, s, field, x, y, 0.0, m)?;
    let rate = s_dot_rate(family, s, field, &on_slice(family, s, x));
    Ok(match rate {
        None => f.flow_p_plus_s,
        Some(rate) => f.flow_p_plus_s + rate * e.dslash() * (e.r * e.r) / real(8.0 * m),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderRow {
    pub slice: f64,
    pub per_axis: usize,
    pub hs_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderReport {
    pub rows: Vec<RemainderRow>,
    /// Per grid size, the largest slice norm.
    pub sup: Vec<(usize, f64)>,
    /// Largest relative change of a slice norm between the two finest grids.
    pub refinement_drift: f64,
}

/// HS norms of the remainder operator on each slice, for each grid size.
pub fn remainder_hs_estimate(
    family: &SurfaceFamily,
    slices: &[f64],
    field: &ExternalField,
    half_width: f64,
    per_axis: &[usize],
    m: f64,
) -> Result<RemainderReport> {
    if per_axis.is_empty() || slices.is_empty() {
        return Err(CauchyError::Config("remainder estimate needs slices and grid sizes".into()));
    }
    let mut rows = Vec::new();
    for &n in per_axis {
        for &s in slices {
            let hs = if field.is_zero() {
                0.0
            } else {
                let grid = make_grid(&family.slice(s), half_width, n, QuadratureRule::Midpoint)?;
                grid.require_margin(field.spatial_support_radius(), 0.0)?;
                let active: Vec<bool> = grid.points.iter().map(|x| field.in_support(x)).collect();
                sparse_hs_squared(&grid, &active, |i, j| Ok(Some(remainder_kernel(family, s, field, &grid.nodes[i], &grid.nodes[j], m)?)))?
                    .sqrt()
            };
            rows.push(RemainderRow { slice: s, per_axis: n, hs_norm: hs });
        }
    }
    let sup = per_axis
        .iter()
        .map(|&n| (n, rows.iter().filter(|r| r.per_axis == n).map(|r| r.hs_norm).fold(0.0, f64::max)))
        .collect();
    let refinement_drift = if per_axis.len() < 2 {
        0.0
    } else {
        let (coarse, fine) = (per_axis[per_axis.len() - 2], per_axis[per_axis.len() - 1]);
        slices
            .iter()
            .map(|&s| {
                let pick = |n: usize| rows.iter().find(|r| r.per_axis == n && r.slice == s).map(|r| r.hs_norm).unwrap_or(0.0);
                relative_change(pick(coarse), pick(fine))
            })
            .fold(0.0, f64::max)
    };
    Ok(RemainderReport { rows, sup, refinement_drift })
}
