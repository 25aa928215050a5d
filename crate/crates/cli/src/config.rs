//! Versioned JSON experiment configuration.
//!
//! Every section has defaults, so `{}` is a valid config. Unknown keys are rejected.

use std::path::Path;

use cauchy_core::field::{Bump, ExternalField};
use cauchy_core::operators::representative::DeltaModel;
use cauchy_core::surface::{CauchySurface, QuadratureRule, SurfaceFamily, SurfaceShape};
use cauchy_core::{CauchyError, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub mass: f64,
    pub seed: u64,
    /// Past-directed time-like regularization direction.
    pub u: [f64; 4],
    pub identities: IdentitiesSection,
    pub bounds: BoundsSection,
    pub dichotomy: DichotomySection,
    pub representative: RepresentativeSection,
    pub flow: FlowSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesSection {
    pub samples: usize,
    pub v_max: f64,
    pub z_range: (f64, f64),
    pub eps_range: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub samples: usize,
    pub v_max: f64,
    pub z_range: (f64, f64),
    pub eps_range: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DichotomySection {
    pub mass: f64,
    pub surface: CauchySurface,
    pub field_a: ExternalField,
    /// `B = A + amplitude * bump * n`: tangentially equal to `A`.
    pub conormal_amplitude: f64,
    pub conormal_bump: Bump,
    /// Field with tangential components different from `A`.
    pub field_c: ExternalField,
    pub half_width: f64,
    pub rule: QuadratureRule,
    pub equal_per_axis: Vec<usize>,
    pub differing_per_axis: Vec<usize>,
    pub quick_equal_per_axis: Vec<usize>,
    pub quick_differing_per_axis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepresentativeSection {
    pub mass: f64,
    pub field: ExternalField,
    pub model: DeltaModel,
    pub half_width: f64,
    pub per_axis: Vec<usize>,
    pub quick_per_axis: Vec<usize>,
    /// Grid and regularizations for the convergence of the assembled `p^-`.
    pub projector_per_axis: usize,
    pub projector_half_width: f64,
    pub epsilons: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    pub field: ExternalField,
    pub epsilon: f64,
    pub center: [f64; 3],
    pub direction: [f64; 3],
    pub z_range: (f64, f64),
    pub z_samples: usize,
    pub epsilons: Vec<f64>,
    /// Separation of the pair used for the `eps` exponent.
    pub epsilon_pair_z: f64,
    pub remainder_family: SurfaceFamily,
    pub remainder_field: ExternalField,
    pub slices: Vec<f64>,
    pub half_width: f64,
    pub per_axis: Vec<usize>,
    pub quick_per_axis: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mass: 1.0,
            seed: 1,
            u: cauchy_core::conventions::DEFAULT_U,
            identities: IdentitiesSection::default(),
            bounds: BoundsSection::default(),
            dichotomy: DichotomySection::default(),
            representative: RepresentativeSection::default(),
            flow: FlowSection::default(),
        }
    }
}

impl Default for IdentitiesSection {
    fn default() -> Self {
        Self { samples: 1000, v_max: 0.9, z_range: (0.05, 5.0), eps_range: (1e-6, 1.0) }
    }
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self { samples: 10_000, v_max: 0.5, z_range: (0.05, 5.0), eps_range: (1e-6, 1.0) }
    }
}

fn bump_surface() -> CauchySurface {
    CauchySurface { shape: SurfaceShape::GaussianBump { height: 0.3, width: 0.8, center: [0.0; 3] }, v_max: 0.5 }
}

impl Default for DichotomySection {
    fn default() -> Self {
        Self {
            mass: 0.5,
            surface: bump_surface(),
            field_a: ExternalField::bump([0.3, 0.2, -0.25, 0.1], [0.0, 0.1, 0.0, -0.1], 1.0),
            conormal_amplitude: 0.4,
            conormal_bump: Bump { center: [0.0; 4], radius: 1.0 },
            field_c: ExternalField::bump([0.0, 0.4, 0.0, 0.2], [0.0, 0.0, 0.2, 0.0], 0.9),
            half_width: 2.0,
            rule: QuadratureRule::Midpoint,
            equal_per_axis: vec![8, 10, 12],
            differing_per_axis: vec![12, 18, 24],
            quick_equal_per_axis: vec![8, 10, 12],
            quick_differing_per_axis: vec![6, 9, 12],
        }
    }
}

impl Default for RepresentativeSection {
    fn default() -> Self {
        Self {
            mass: 0.5,
            field: ExternalField::bump([0.3, 0.2, -0.25, 0.1], [0.0; 4], 1.5),
            model: DeltaModel::Wilson,
            half_width: 1.5,
            per_axis: vec![8, 12],
            quick_per_axis: vec![4, 6],
            projector_per_axis: 10,
            projector_half_width: 1.0,
            epsilons: vec![0.4, 0.2, 0.1],
        }
    }
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            field: ExternalField::bump([0.3, 0.2, -0.25, 0.1], [0.1, 0.05, -0.1, 0.0], 1.6),
            epsilon: 1e-4,
            center: [0.8, 0.0, 0.0],
            direction: [1.0, 0.0, 0.0],
            z_range: (0.1, 2.0),
            z_samples: 24,
            epsilons: vec![1e-5, 3e-5, 1e-4, 3e-4, 1e-3],
            epsilon_pair_z: 0.4,
            remainder_family: SurfaceFamily::Scale {
                shape: SurfaceShape::GaussianBump { height: 0.3, width: 0.8, center: [0.0; 3] },
                v_max: 0.5,
            },
            remainder_field: ExternalField::bump([0.3, 0.2, -0.25, 0.1], [0.1, 0.05, -0.1, 0.0], 1.6),
            slices: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            half_width: 2.0,
            per_axis: vec![6, 12],
            quick_per_axis: vec![4, 6],
        }
    }
}

fn config_error(msg: impl Into<String>) -> CauchyError {
    CauchyError::Config(msg.into())
}

fn check_surface(name: &str, s: &CauchySurface) -> Result<()> {
    CauchySurface::new(s.shape.clone(), s.v_max).map(|_| ()).map_err(|e| config_error(format!("{name}: {e}")))
}

fn check_increasing(name: &str, v: &[usize], min_len: usize) -> Result<()> {
    if v.len() < min_len {
        return Err(config_error(format!("{name} needs at least {min_len} grid sizes, got {}", v.len())));
    }
    if v.contains(&0) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_error(format!("{name} must be positive and strictly increasing")));
    }
    Ok(())
}

fn check_margin(name: &str, half_width: f64, field: &ExternalField) -> Result<()> {
    let r = field.spatial_support_radius();
    if !(half_width > 0.0) || half_width < r {
        return Err(config_error(format!("{name}: half width {half_width} does not cover the field support radius {r:.3}")));
    }
    Ok(())
}

fn check_ranges(name: &str, samples: usize, v_max: f64, z: (f64, f64), eps: (f64, f64)) -> Result<()> {
    if samples == 0 {
        return Err(config_error(format!("{name}.samples must be positive")));
    }
    if !(v_max > 0.0 && v_max < 1.0) {
        return Err(config_error(format!("{name}.v_max = {v_max} must lie in (0, 1)")));
    }
    if !(z.0 > 0.0 && z.1 > z.0 && eps.0 > 0.0 && eps.1 >= eps.0) {
        return Err(config_error(format!("{name}: ranges must be positive and increasing")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_error(format!("schema: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        for (name, m) in [("mass", self.mass), ("dichotomy.mass", self.dichotomy.mass), ("representative.mass", self.representative.mass)] {
            if !(m > 0.0 && m.is_finite()) {
                return Err(config_error(format!("{name} must be positive")));
            }
        }
        let u = self.u;
        if !(u[0] < 0.0 && u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3] > 0.0) {
            return Err(config_error("u must be past-directed and time-like"));
        }
        let i = &self.identities;
        check_ranges("identities", i.samples, i.v_max, i.z_range, i.eps_range)?;
        let b = &self.bounds;
        check_ranges("bounds", b.samples, b.v_max, b.z_range, b.eps_range)?;

        let d = &self.dichotomy;
        check_surface("dichotomy.surface", &d.surface)?;
        check_increasing("dichotomy.equal_per_axis", &d.equal_per_axis, 3)?;
        check_increasing("dichotomy.differing_per_axis", &d.differing_per_axis, 3)?;
        check_increasing("dichotomy.quick_equal_per_axis", &d.quick_equal_per_axis, 3)?;
        check_increasing("dichotomy.quick_differing_per_axis", &d.quick_differing_per_axis, 3)?;
        check_margin("dichotomy", d.half_width, &d.field_a)?;
        check_margin("dichotomy", d.half_width, &d.field_c)?;

        let r = &self.representative;
        check_increasing("representative.per_axis", &r.per_axis, 2)?;
        check_increasing("representative.quick_per_axis", &r.quick_per_axis, 2)?;
        check_margin("representative", r.half_width, &r.field)?;
        if r.projector_per_axis == 0 || !(r.projector_half_width > 0.0) {
            return Err(config_error("representative projector grid must be nonempty"));
        }
        if r.epsilons.len() < 2 || r.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(config_error("representative.epsilons needs at least two positive values"));
        }

        let f = &self.flow;
        check_increasing("flow.per_axis", &f.per_axis, 2)?;
        check_increasing("flow.quick_per_axis", &f.quick_per_axis, 2)?;
        check_margin("flow", f.half_width, &f.remainder_field)?;
        if !(f.epsilon > 0.0) || f.z_samples < 3 || !(f.z_range.0 > 0.0 && f.z_range.1 > f.z_range.0) {
            return Err(config_error("flow scaling needs eps > 0, at least 3 samples and an increasing z range"));
        }
        if f.epsilons.len() < 2 || f.epsilons.iter().any(|e| !(*e > 0.0)) || !(f.epsilon_pair_z > 0.0) {
            return Err(config_error("flow.epsilons needs at least two positive values"));
        }
        let dn = f.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (dn - 1.0).abs() > 1e-12 {
            return Err(config_error("flow.direction must be a unit vector"));
        }
        if f.slices.is_empty() {
            return Err(config_error("flow.slices must not be empty"));
        }
        for s in &f.slices {
            let slice = f.remainder_family.slice(*s);
            check_surface("flow.remainder_family", &slice)?;
        }
        Ok(())
    }

    /// Canonical JSON of the resolved config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.canonical_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn seed_changes_the_hash() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { seed: 2, ..a.clone() };
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for text in [
            r#"{"schema_version": 2}"#,
            r#"{"mass": -1}"#,
            r#"{"unknown_key": 1}"#,
            r#"{"bounds": {"samples": 0}}"#,
            r#"{"dichotomy": {"equal_per_axis": [8, 12]}}"#,
            r#"{"representative": {"per_axis": [8, 6]}}"#,
            r#"{"u": [1, 0, 0, 0]}"#,
            r#"{"dichotomy": {"half_width": 0.5}}"#,
            r#"{"dichotomy": {"surface": {"shape": {"kind": "gaussian_bump", "height": 2.0, "width": 0.5, "center": [0, 0, 0]}, "v_max": 0.5}}}"#,
            "not json",
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(CauchyError::Config(_))), "{text}");
        }
    }
}
