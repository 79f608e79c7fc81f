//! Scenario file ingestion: a single TOML document describing grippers,
//! objects, scenarios and shared configuration. The schema is strict:
//! unknown keys are rejected with the offending key and line, and every
//! cross-reference is validated before any computation runs.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{AnalysisConfig, Scenario, SiteSpec};
use crate::geometry::{Arrangement, FingerProfile, GripperConfig};
use crate::shape::{ObjectModel, Pose, ShapePrimitive};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Parse(String),
    #[error("invalid {context}: {message}")]
    Invalid { context: String, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    #[serde(default)]
    config: ConfigSection,
    #[serde(default)]
    grippers: Vec<GripperDef>,
    #[serde(default)]
    objects: Vec<ObjectDef>,
    #[serde(default)]
    scenarios: Vec<ScenarioDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigSection {
    gel_stiffness: f64,
    cone_edges: usize,
    secure_threshold: f64,
    gravity: [f64; 3],
    flatten_threshold: f64,
    grid_nx: usize,
    grid_ny: usize,
    pose_jitter: usize,
    jitter_pos_mm: f64,
    jitter_rot_deg: f64,
    seed: u64,
    default_mu: f64,
}

impl Default for ConfigSection {
    fn default() -> Self {
        let d = AnalysisConfig::default();
        Self {
            gel_stiffness: d.gel_stiffness,
            cone_edges: d.cone_edges,
            secure_threshold: d.secure_threshold,
            gravity: [d.gravity.x, d.gravity.y, d.gravity.z],
            flatten_threshold: d.flatten_threshold,
            grid_nx: d.grid_nx,
            grid_ny: d.grid_ny,
            pose_jitter: d.pose_jitter,
            jitter_pos_mm: d.jitter_pos_mm,
            jitter_rot_deg: d.jitter_rot_deg,
            seed: d.seed,
            default_mu: 0.5,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FingerDef {
    length: f64,
    width_base: f64,
    width_tip: f64,
    #[serde(default)]
    gel_thickness_base: f64,
    #[serde(default)]
    gel_thickness_tip: f64,
    #[serde(default)]
    pitch: f64,
    #[serde(default)]
    nail_length: f64,
    #[serde(default)]
    nail_width: f64,
    #[serde(default)]
    compliant: bool,
}

impl FingerDef {
    fn build(&self) -> Result<FingerProfile, crate::error::GraspError> {
        Ok(FingerProfile::new(
            self.length,
            self.width_base,
            self.width_tip,
            self.gel_thickness_base,
            self.gel_thickness_tip,
            self.pitch,
            self.nail_length,
            self.nail_width,
        )?
        .with_compliant_backing(self.compliant))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GripperDef {
    name: String,
    arrangement: Arrangement,
    fingers: Vec<FingerDef>,
    #[serde(default)]
    v_half_angle: f64,
    #[serde(default)]
    base_separation: f64,
    jaw_opening_max: f64,
    f_max: f64,
    #[serde(default)]
    studs: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDef {
    name: String,
    shape: ShapePrimitive,
    mass: f64,
    mu: Option<f64>,
    #[serde(default)]
    position: [f64; 3],
    #[serde(default)]
    rot_x_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SiteDef {
    Keyword(String),
    At(f64),
}

impl Default for SiteDef {
    fn default() -> Self {
        SiteDef::Keyword("auto".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDef {
    #[serde(default)]
    name: Option<String>,
    gripper: String,
    object: String,
    #[serde(default)]
    site: SiteDef,
    #[serde(default)]
    f_max: Option<f64>,
    #[serde(default)]
    threshold: Option<f64>,
}

/// A fully validated scenario suite ready to run.
#[derive(Debug, Clone)]
pub struct LoadedSuite {
    pub config: AnalysisConfig,
    pub grippers: Vec<(String, GripperConfig)>,
    pub objects: Vec<(String, ObjectModel)>,
    pub scenarios: Vec<Scenario>,
}

pub fn load_file(path: &Path) -> Result<LoadedSuite, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<LoadedSuite, SchemaError> {
    let doc: FileDoc = toml::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))?;

    let c = &doc.config;
    let config = AnalysisConfig {
        gel_stiffness: c.gel_stiffness,
        cone_edges: c.cone_edges,
        secure_threshold: c.secure_threshold,
        gravity: nalgebra::Vector3::new(c.gravity[0], c.gravity[1], c.gravity[2]),
        flatten_threshold: c.flatten_threshold,
        grid_nx: c.grid_nx,
        grid_ny: c.grid_ny,
        pose_jitter: c.pose_jitter,
        jitter_pos_mm: c.jitter_pos_mm,
        jitter_rot_deg: c.jitter_rot_deg,
        seed: c.seed,
    };
    if config.gravity.norm() == 0.0 || !config.gravity.norm().is_finite() {
        return Err(SchemaError::Invalid {
            context: "config.gravity".into(),
            message: "gravity direction must be nonzero and finite".into(),
        });
    }
    if !(config.gel_stiffness.is_finite() && config.gel_stiffness > 0.0) {
        return Err(SchemaError::Invalid {
            context: "config.gel_stiffness".into(),
            message: "gel stiffness must be finite and positive".into(),
        });
    }
    if !(config.secure_threshold.is_finite() && config.secure_threshold >= 0.0) {
        return Err(SchemaError::Invalid {
            context: "config.secure_threshold".into(),
            message: "secure threshold must be finite and non-negative".into(),
        });
    }

    let mut grippers = Vec::new();
    for (i, g) in doc.grippers.iter().enumerate() {
        let ctx = format!("grippers[{i}] ({})", g.name);
        let fingers = g
            .fingers
            .iter()
            .map(|f| f.build())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SchemaError::Invalid { context: ctx.clone(), message: e.to_string() })?;
        let gripper = GripperConfig {
            arrangement: g.arrangement,
            fingers,
            v_half_angle_deg: g.v_half_angle,
            base_separation: g.base_separation,
            jaw_opening_max: g.jaw_opening_max,
            f_max: g.f_max,
            studs: g.studs.clone(),
        };
        gripper
            .validate()
            .map_err(|e| SchemaError::Invalid { context: ctx.clone(), message: e.to_string() })?;
        if grippers.iter().any(|(n, _)| n == &g.name) {
            return Err(SchemaError::Invalid {
                context: ctx,
                message: "duplicate gripper name".into(),
            });
        }
        grippers.push((g.name.clone(), gripper));
    }

    let mut objects = Vec::new();
    for (i, o) in doc.objects.iter().enumerate() {
        let ctx = format!("objects[{i}] ({})", o.name);
        let object = ObjectModel::new(
            o.shape.clone(),
            Pose { position: o.position, rot_x_deg: o.rot_x_deg },
            o.mass,
            o.mu.unwrap_or(doc.config.default_mu),
        )
        .map_err(|e| SchemaError::Invalid { context: ctx.clone(), message: e.to_string() })?;
        if objects.iter().any(|(n, _)| n == &o.name) {
            return Err(SchemaError::Invalid {
                context: ctx,
                message: "duplicate object name".into(),
            });
        }
        objects.push((o.name.clone(), object));
    }

    let mut scenarios = Vec::new();
    for (i, s) in doc.scenarios.iter().enumerate() {
        let ctx = format!("scenarios[{i}]");
        let gripper = grippers
            .iter()
            .find(|(n, _)| n == &s.gripper)
            .ok_or_else(|| SchemaError::Invalid {
                context: ctx.clone(),
                message: format!("unknown gripper {:?}", s.gripper),
            })?;
        let object = objects
            .iter()
            .find(|(n, _)| n == &s.object)
            .ok_or_else(|| SchemaError::Invalid {
                context: ctx.clone(),
                message: format!("unknown object {:?}", s.object),
            })?;
        let site = match &s.site {
            SiteDef::At(v) => SiteSpec::At(*v),
            SiteDef::Keyword(k) if k == "auto" => SiteSpec::Auto,
            SiteDef::Keyword(k) => {
                return Err(SchemaError::Invalid {
                    context: format!("{ctx}.site"),
                    message: format!("expected \"auto\" or a number, got {k:?}"),
                })
            }
        };
        let name = s
            .name
            .clone()
            .unwrap_or_else(|| format!("{}_{}", s.gripper, s.object));
        scenarios.push(Scenario {
            name,
            gripper_name: s.gripper.clone(),
            gripper: gripper.1.clone(),
            object_name: s.object.clone(),
            object: object.1.clone(),
            site,
            f_max: s.f_max,
            threshold: s.threshold,
        });
    }
    Ok(LoadedSuite { config, grippers, objects, scenarios })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[config]
cone_edges = 8

[[grippers]]
name = "flat"
arrangement = "flat_pair"
jaw_opening_max = 60.0
f_max = 15.0

[[grippers.fingers]]
length = 100.0
width_base = 12.0
width_tip = 6.0
gel_thickness_base = 4.0
gel_thickness_tip = 4.0

[[grippers.fingers]]
length = 100.0
width_base = 12.0
width_tip = 6.0
gel_thickness_base = 4.0
gel_thickness_tip = 4.0

[[objects]]
name = "ball"
shape = { kind = "sphere", radius = 15.0 }
mass = 0.2

[[scenarios]]
gripper = "flat"
object = "ball"
site = 50.0
"#;

    #[test]
    fn minimal_file_loads() {
        let suite = load_str(MINIMAL).unwrap();
        assert_eq!(suite.grippers.len(), 1);
        assert_eq!(suite.scenarios.len(), 1);
        assert_eq!(suite.scenarios[0].site, SiteSpec::At(50.0));
        // default_mu applied
        assert_eq!(suite.objects[0].1.mu, 0.5);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let bad = MINIMAL.replace("mass = 0.2", "mass = 0.2\nfrictionn = 0.5");
        let err = load_str(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("frictionn"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn unknown_reference_is_located() {
        let bad = MINIMAL.replace("object = \"ball\"", "object = \"cube\"");
        let err = load_str(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scenarios[0]") && msg.contains("cube"), "{msg}");
    }

    #[test]
    fn bad_site_keyword_rejected() {
        let bad = MINIMAL.replace("site = 50.0", "site = \"tip\"");
        let err = load_str(&bad).unwrap_err();
        assert!(err.to_string().contains("auto"), "{err}");
    }

    #[test]
    fn non_finite_values_rejected() {
        let bad = MINIMAL.replace("mass = 0.2", "mass = nan");
        let err = load_str(&bad).unwrap_err();
        assert!(err.to_string().contains("finite"), "{err}");
        let bad = MINIMAL.replace("f_max = 15.0", "f_max = inf");
        let err = load_str(&bad).unwrap_err();
        assert!(err.to_string().contains("finite"), "{err}");
    }

    #[test]
    fn invariant_violations_are_contextualized() {
        let bad = MINIMAL.replace("width_tip = 6.0", "width_tip = 20.0");
        let err = load_str(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grippers[0]"), "{msg}");
        assert!(msg.contains("width"), "{msg}");
    }
}
