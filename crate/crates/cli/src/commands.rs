//! The experiment drivers behind each subcommand.

use std::sync::Arc;
use std::time::Instant;

use cauchy_core::bounds::{bound_suite, BoundKind, SamplingConfig};
use cauchy_core::field::FieldComponent;
use cauchy_core::flow::{epsilon_scaling, remainder_hs_estimate, residual_scaling, symmetric_pair};
use cauchy_core::identities::{covariance_suite, identity_suite};
use cauchy_core::kernels::{d_eval, p_minus};
use cauchy_core::minkowski::{spinor_frobenius, FourVector};
use cauchy_core::operators::circulant::{pminus_flat_oracle, regularized_pminus_circulant};
use cauchy_core::operators::dichotomy::{tangential_dichotomy_experiment, Classification, GrowthTable};
use cauchy_core::operators::representative::representative_flat_dense;
use cauchy_core::oracle::{validation_wset, MassShellQuadrature};
use cauchy_core::stats::relative_change;
use cauchy_core::surface::{make_grid, CauchySurface, QuadratureRule, SurfaceFamily};
use cauchy_core::Result;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::table::ResultTable;

pub const ORACLE_TOL: f64 = 1e-6;
pub const DEFECT_TOL: f64 = 1e-10;
pub const FLAT_ORACLE_TOL: f64 = 1e-12;
pub const REFINEMENT_TOL: f64 = 0.10;
pub const HALVING_RANGE: (f64, f64) = (1.6, 2.6);
pub const SLOPE_WITH_S_MIN: f64 = -1.3;
pub const SLOPE_WITHOUT_S_MAX: f64 = -2.5;
pub const EPSILON_EXPONENT_RANGE: (f64, f64) = (0.4, 0.6);
pub const REMAINDER_DRIFT_TOL: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyIdentities,
    VerifyBounds,
    Dichotomy,
    Representative,
    Flow,
    OracleCrosscheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentities => "verify-identities",
            Command::VerifyBounds => "verify-bounds",
            Command::Dichotomy => "dichotomy",
            Command::Representative => "representative",
            Command::Flow => "flow",
            Command::OracleCrosscheck => "oracle-crosscheck",
        }
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, quick: bool) -> Result<ResultTable> {
    cfg.validate()?;
    match cmd {
        Command::VerifyIdentities => verify_identities(cfg),
        Command::VerifyBounds => verify_bounds(cfg),
        Command::Dichotomy => dichotomy(cfg, quick),
        Command::Representative => representative(cfg, quick),
        Command::Flow => flow(cfg, quick),
        Command::OracleCrosscheck => oracle_crosscheck(cfg),
    }
}

fn timed<T>(table: &mut ResultTable, experiment: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let out = f()?;
    table.timing(experiment, t0.elapsed().as_secs_f64());
    Ok(out)
}

/// Analytic `D` and `p^-` against mass-shell quadrature on the bundled w-set.
pub fn oracle_crosscheck(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let set = validation_wset();
    let exp = "oracle_crosscheck";
    let errors = timed(&mut t, exp, || {
        let q = MassShellQuadrature::new(set.mass);
        set.points
            .par_iter()
            .map(|pt| {
                let w = pt.w();
                let e = d_eval(&w, set.mass)?;
                let (d, p) = q.evaluate(&w)?;
                let pa = p_minus(&w, set.mass)?;
                Ok(((e.d - d).norm() / e.d.norm(), spinor_frobenius(&(pa - p)) / spinor_frobenius(&pa)))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    for (k, (ed, ep)) in errors.iter().enumerate() {
        let params = format!("set_version={};point={k}", set.version);
        t.at_most(exp, params.clone(), "d_relative_error", *ed, ORACLE_TOL);
        t.at_most(exp, params, "p_minus_relative_error", *ep, ORACLE_TOL);
    }
    Ok(t)
}

fn sampling(cfg: &ExperimentConfig, samples: usize, v_max: f64, z: (f64, f64), eps: (f64, f64)) -> SamplingConfig {
    SamplingConfig { samples, seed: cfg.seed, v_max, z_range: z, eps_range: eps, mass: cfg.mass }
}

pub fn verify_identities(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let s = &cfg.identities;
    let sc = sampling(cfg, s.samples, s.v_max, s.z_range, s.eps_range);
    let params = format!("samples={};seed={}", s.samples, cfg.seed);
    for (exp, checks) in [
        ("identities", timed(&mut t, "identities", || identity_suite(&sc))?),
        ("covariance", timed(&mut t, "covariance", || covariance_suite(&sc))?),
    ] {
        for c in checks {
            t.at_most(exp, format!("{params};samples_checked={}", c.samples), &c.name, c.worst, c.tolerance);
        }
    }
    Ok(t)
}

pub fn verify_bounds(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let s = &cfg.bounds;
    let sc = sampling(cfg, s.samples, s.v_max, s.z_range, s.eps_range);
    let checks = timed(&mut t, "bounds", || bound_suite(&sc))?;
    for c in checks {
        let rule = match c.kind {
            BoundKind::Upper => "finite fitted constant",
            BoundKind::Lower => "fitted constant > 0",
            BoundKind::Explicit => "worst ratio <= 1",
        };
        let params = format!("samples={};seed={}", c.samples, cfg.seed);
        t.check("bounds", params, &c.name, c.constant, rule, c.holds);
    }
    Ok(t)
}

fn growth_rows(t: &mut ResultTable, exp: &str, g: &GrowthTable) {
    for r in &g.rows {
        let params = format!("per_axis={};h={:.6}", r.per_axis, r.spacing);
        t.info(exp, params.clone(), "hs_norm", r.hs_norm);
        t.info(exp, params, "hs_squared", r.hs_squared);
        t.point(exp, "hs_squared_vs_h", r.spacing, r.hs_squared);
    }
    t.info(exp, "", "tangential_difference", g.tangential_difference);
    if let Some(f) = g.fitted_halving_factor {
        t.info(exp, "", "fitted_halving_factor", f);
    }
}

/// `hs^2` growth per halving of the spacing between the coarsest and finest grids.
pub fn halving_factor(g: &GrowthTable) -> f64 {
    let (a, b) = (&g.rows[0], &g.rows[g.rows.len() - 1]);
    (b.hs_squared / a.hs_squared).powf(std::f64::consts::LN_2 / (a.spacing / b.spacing).ln())
}

pub fn dichotomy(cfg: &ExperimentConfig, quick: bool) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let d = &cfg.dichotomy;
    let surface = CauchySurface::new(d.surface.shape.clone(), d.surface.v_max)?;
    let b = d.field_a.clone().with(FieldComponent::Conormal {
        amplitude: d.conormal_amplitude,
        bump: d.conormal_bump,
        surface: surface.clone(),
    });
    let (eq_n, diff_n) = if quick {
        (&d.quick_equal_per_axis, &d.quick_differing_per_axis)
    } else {
        (&d.equal_per_axis, &d.differing_per_axis)
    };

    let exp = "tangentially_equal";
    let g = timed(&mut t, exp, || tangential_dichotomy_experiment(&d.field_a, &b, &surface, d.half_width, eq_n, d.rule, d.mass))?;
    growth_rows(&mut t, exp, &g);
    let (n0, n1) = (eq_n[0], eq_n[eq_n.len() - 1]);
    let change = g.norm_change(n0, n1).unwrap_or(f64::NAN);
    t.at_most(exp, format!("from={n0};to={n1}"), "hs_norm_refinement_change", change, REFINEMENT_TOL);
    t.check(exp, "", "tangential_difference_vanishes", g.tangential_difference, "<= 1e-12", g.tangential_difference <= 1e-12);
    t.check(exp, "", "classified_convergent", f64::from(u8::from(g.classification == Classification::Convergent)), "= 1", g.classification == Classification::Convergent);

    let exp = "tangentially_differing";
    let g = timed(&mut t, exp, || tangential_dichotomy_experiment(&d.field_a, &d.field_c, &surface, d.half_width, diff_n, d.rule, d.mass))?;
    growth_rows(&mut t, exp, &g);
    let (n0, n1) = (diff_n[0], diff_n[diff_n.len() - 1]);
    t.within(exp, format!("from={n0};to={n1}"), "hs_squared_halving_factor", halving_factor(&g), HALVING_RANGE.0, HALVING_RANGE.1);
    t.check(exp, "", "tangential_difference_positive", g.tangential_difference, "> 0", g.tangential_difference > 0.0);
    t.check(exp, "", "classified_divergent", f64::from(u8::from(g.classification == Classification::Divergent)), "= 1", g.classification == Classification::Divergent);
    Ok(t)
}

pub fn representative(cfg: &ExperimentConfig, quick: bool) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let r = &cfg.representative;

    // assembled p^- against the spectral oracle on a flat periodic grid
    let exp = "flat_projector";
    let (defect, dist) = timed(&mut t, exp, || {
        let grid = make_grid(&CauchySurface::flat(), r.projector_half_width, r.projector_per_axis, QuadratureRule::Midpoint)?;
        let oracle = pminus_flat_oracle(&grid, cfg.mass)?;
        let u = FourVector(cfg.u);
        let dist = r
            .epsilons
            .iter()
            .map(|&e| regularized_pminus_circulant(&grid, e, &u, cfg.mass)?.distance(&oracle))
            .collect::<Result<Vec<_>>>()?;
        Ok((oracle.projector_defect(), dist))
    })?;
    let params = format!("per_axis={}", r.projector_per_axis);
    t.at_most(exp, params.clone(), "oracle_projector_defect", defect, FLAT_ORACLE_TOL);
    for (e, d) in r.epsilons.iter().zip(&dist) {
        t.info(exp, format!("{params};eps={e}"), "operator_distance_to_oracle", *d);
        t.point(exp, "operator_distance_vs_eps", *e, *d);
    }
    let monotone = dist.windows(2).all(|w| w[1] < w[0]);
    t.check(exp, params, "monotone_in_decreasing_eps", f64::from(u8::from(monotone)), "= 1", monotone);

    let exp = "representative";
    let sizes = if quick { &r.quick_per_axis } else { &r.per_axis };
    let mut hs = Vec::new();
    for &n in sizes {
        let rep = timed(&mut t, exp, || {
            let grid = Arc::new(make_grid(&CauchySurface::flat(), r.half_width, n, QuadratureRule::Midpoint)?);
            representative_flat_dense(&grid, &r.field, r.mass, r.model)
        })?;
        let p = format!("per_axis={n}");
        t.at_most(exp, p.clone(), "q_skew_defect", rep.q_skew_defect, DEFECT_TOL);
        t.at_most(exp, p.clone(), "unitarity_defect", rep.unitarity_defect, DEFECT_TOL);
        t.at_most(exp, p.clone(), "pi_projector_defect", rep.pi_projector_defect, DEFECT_TOL + rep.oracle_projector_defect);
        t.at_most(exp, p.clone(), "diagonal_block_minus", rep.diagonal_block_minus, DEFECT_TOL);
        t.at_most(exp, p.clone(), "diagonal_block_plus", rep.diagonal_block_plus, DEFECT_TOL);
        t.info(exp, p.clone(), "oracle_projector_defect", rep.oracle_projector_defect);
        t.info(exp, p.clone(), "hs_pi_minus_pa", rep.hs_pi_minus_pa);
        t.info(exp, p.clone(), "op_pi_minus_pa", rep.op_pi_minus_pa);
        t.info(exp, p, "hs_pa_minus_p", rep.hs_pa_minus_p);
        t.point(exp, "hs_pi_minus_pa_vs_per_axis", n as f64, rep.hs_pi_minus_pa);
        hs.push(rep.hs_pi_minus_pa);
    }
    let change = relative_change(hs[0], hs[hs.len() - 1]);
    t.at_most(exp, format!("from={};to={}", sizes[0], sizes[sizes.len() - 1]), "hs_refinement_change", change, REFINEMENT_TOL);
    Ok(t)
}

pub fn flow(cfg: &ExperimentConfig, quick: bool) -> Result<ResultTable> {
    let mut t = ResultTable::new(&cfg.hash());
    let f = &cfg.flow;
    let m = cfg.mass;
    let family = SurfaceFamily::FlatRising;

    let exp = "flow_scaling";
    let rep = timed(&mut t, exp, || residual_scaling(&family, 0.0, &f.field, f.epsilon, &f.center, &f.direction, f.z_range, f.z_samples, m))?;
    for s in &rep.samples {
        t.point(exp, "flow_p", s.z_norm, s.flow_p);
        t.point(exp, "flow_p_plus_s", s.z_norm, s.flow_p_plus_s);
        t.point(exp, "scaled_leading_residual", s.z_norm, s.scaled_leading_residual);
    }
    let params = format!("eps={};samples={}", f.epsilon, f.z_samples);
    let without = rep.without_s.map(|l| l.slope).unwrap_or(f64::NAN);
    let with = rep.with_s.map(|l| l.slope).unwrap_or(f64::NAN);
    t.check(exp, params.clone(), "slope_without_counter_kernel", without, format!("<= {SLOPE_WITHOUT_S_MAX}"), without <= SLOPE_WITHOUT_S_MAX);
    t.check(exp, params.clone(), "slope_with_counter_kernel", with, format!(">= {SLOPE_WITH_S_MIN}"), with >= SLOPE_WITH_S_MIN);
    t.info(exp, params.clone(), "slope_gap", with - without);
    let lead = rep.samples.iter().map(|s| s.scaled_leading_residual).fold(0.0, f64::max);
    t.info(exp, params, "max_scaled_leading_residual", lead);

    let exp = "flow_epsilon";
    let (x, y) = symmetric_pair(&f.center, &f.direction, f.epsilon_pair_z);
    let es = timed(&mut t, exp, || epsilon_scaling(&family, 0.0, &f.field, &x, &y, &f.epsilons, m))?;
    for (e, d) in es.epsilons.iter().zip(&es.deviations) {
        t.point(exp, "deviation_from_eps_zero", *e, *d);
    }
    t.within(exp, format!("z={}", f.epsilon_pair_z), "epsilon_exponent", es.fit.slope, EPSILON_EXPONENT_RANGE.0, EPSILON_EXPONENT_RANGE.1);

    let exp = "flow_remainder";
    let sizes = if quick { &f.quick_per_axis } else { &f.per_axis };
    let rem = timed(&mut t, exp, || remainder_hs_estimate(&f.remainder_family, &f.slices, &f.remainder_field, f.half_width, sizes, m))?;
    for r in &rem.rows {
        t.check(exp, format!("slice={};per_axis={}", r.slice, r.per_axis), "hs_norm", r.hs_norm, "finite", r.hs_norm.is_finite());
        t.point(exp, &format!("hs_norm_per_axis_{}", r.per_axis), r.slice, r.hs_norm);
    }
    for (n, s) in &rem.sup {
        t.info(exp, format!("per_axis={n}"), "sup_over_slices", *s);
    }
    let (a, b) = (sizes[sizes.len() - 2], sizes[sizes.len() - 1]);
    t.at_most(exp, format!("from={a};to={b}"), "refinement_drift", rem.refinement_drift, REMAINDER_DRIFT_TOL);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_factor_of_an_exact_power_law() {
        use cauchy_core::operators::dichotomy::GrowthRow;
        let row = |n: usize, h: f64| GrowthRow { per_axis: n, spacing: h, hs_norm: (1.0 / h).sqrt(), hs_squared: 1.0 / h, growth_factor: None };
        let g = GrowthTable {
            rows: vec![row(6, 0.6), row(9, 0.4), row(12, 0.3)],
            tangential_difference: 1.0,
            fit: None,
            fitted_halving_factor: None,
            classification: Classification::Divergent,
        };
        assert!((halving_factor(&g) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identities_table_passes() {
        let mut cfg = ExperimentConfig::default();
        cfg.identities.samples = 200;
        let t = run(Command::VerifyIdentities, &cfg, true).unwrap();
        assert!(t.all_pass(), "{:?}", t.failures().collect::<Vec<_>>());
        assert_eq!(t.rows.len(), 7);
    }

    #[test]
    fn seed_changes_points_but_not_verdicts() {
        let mut cfg = ExperimentConfig::default();
        cfg.identities.samples = 100;
        let a = verify_identities(&cfg).unwrap();
        cfg.seed = 99;
        let b = verify_identities(&cfg).unwrap();
        let verdicts = |t: &ResultTable| t.rows.iter().map(|r| r.pass).collect::<Vec<_>>();
        assert_eq!(verdicts(&a), verdicts(&b));
        assert_ne!(a.rows[0].value, b.rows[0].value);
    }

    #[test]
    fn quick_dichotomy_reports_both_pairs() {
        let t = run(Command::Dichotomy, &ExperimentConfig::default(), true).unwrap();
        assert!(t.rows_of("tangentially_equal").count() > 0);
        assert!(t.rows_of("tangentially_differing").count() > 0);
        assert!(t.series.iter().all(|p| p.y >= 0.0));
    }
}
